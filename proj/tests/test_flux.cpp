#include "kinscl/flux.hpp"
#include "kinscl/polynomial.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace kinscl;

namespace {
double burgers_godunov(double l, double r) {
  if (l <= r) {
    if (l <= 0 && 0 <= r) return 0.0;
    return std::min(0.5 * l * l, 0.5 * r * r);
  }
  return std::max(0.5 * l * l, 0.5 * r * r);
}
}  // namespace

TEST(Polynomial, CalculusAndRoots) {
  const Polynomial<double> p{-6, 11, -6, 1};  // (x-1)(x-2)(x-3)
  EXPECT_EQ(p(2.0), 0.0);
  EXPECT_EQ(p.derivative()(0.0), 11.0);
  EXPECT_DOUBLE_EQ(p.antiderivative()(1.0), -6 + 5.5 - 2 + 0.25);
  const auto roots = real_roots_in(p, 0.0, 4.0);
  ASSERT_EQ(roots.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(roots[i], i + 1.0, 1e-12);
  EXPECT_TRUE(real_roots_in(p, 1.0, 2.0).empty());
  const auto q = p.compose_affine(2.0, 1.0);  // p(2s + 1)
  EXPECT_DOUBLE_EQ(q(0.5), p(2.0));
  EXPECT_DOUBLE_EQ(q(1.25), p(3.5));
}

TEST(Flux, GodunovMatchesBurgersClosedForm) {
  const auto f = FluxSpec::burgers(2.0);
  for (double l = -1.5; l <= 1.5; l += 0.125)
    for (double r = -1.5; r <= 1.5; r += 0.125) {
      EXPECT_DOUBLE_EQ(f.godunov(l, r), burgers_godunov(l, r)) << l << " " << r;
      EXPECT_DOUBLE_EQ(f.engquist_osher(l, r), 0.5 * std::pow(std::max(l, 0.0), 2) + 0.5 * std::pow(std::min(r, 0.0), 2));
    }
}

TEST(Flux, ConsistentAndMonotone) {
  const FluxSpec cubic(Polynomial<double>{0, 0.3, -0.5, 0.25}, 1.5);
  for (const auto& f : {FluxSpec::burgers(1.5), FluxSpec::linear(-0.7, 1.5), cubic})
    for (auto kind : {NumericalFlux::godunov, NumericalFlux::engquist_osher, NumericalFlux::lax_friedrichs}) {
      for (double c = -1.5; c <= 1.5; c += 0.25) EXPECT_NEAR(f.numerical(kind, c, c), f.A(c), 1e-14);
      const double d = 0.05;
      for (double l = -1.5; l <= 1.5 - d; l += 0.1)
        for (double r = -1.5; r <= 1.5 - d; r += 0.1) {
          EXPECT_LE(f.numerical(kind, l, r), f.numerical(kind, l + d, r) + 1e-14);
          EXPECT_GE(f.numerical(kind, l, r), f.numerical(kind, l, r + d) - 1e-14);
        }
    }
}

TEST(Flux, LipschitzCertificateOnLattice) {
  const FluxSpec cubic(Polynomial<double>{0, 0.3, -0.5, 0.25}, 1.5);
  for (const auto& f : {FluxSpec::burgers(2.0), FluxSpec::linear(-0.7, 1.0), FluxSpec::zero(1.0), cubic}) {
    double m = 0;
    for (int i = 0; i <= 3000; ++i) m = std::max(m, std::abs(f.a(-f.bound() + 2 * f.bound() * i / 3000.0)));
    EXPECT_NEAR(f.lipschitz(), m, 1e-6);
    EXPECT_GE(f.lipschitz(), m);
  }
  EXPECT_EQ(FluxSpec::burgers(2.0).lipschitz(), 2.0);
}

TEST(Flux, Names) {
  EXPECT_EQ(numerical_flux_from_string(to_string(NumericalFlux::engquist_osher)), NumericalFlux::engquist_osher);
  EXPECT_THROW(numerical_flux_from_string("roe"), std::invalid_argument);
}
