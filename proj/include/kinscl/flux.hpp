#pragma once

#include "kinscl/polynomial.hpp"

#include <string>
#include <vector>

namespace kinscl {

enum class NumericalFlux { godunov, engquist_osher, lax_friedrichs };

std::string to_string(NumericalFlux f);
NumericalFlux numerical_flux_from_string(const std::string& name);

/// Polynomial flux A with closed-form speed a = A'.
///
/// On the 2-torus the same scalar flux acts along both axes, A(u) = (A_1(u), A_1(u)).
/// The Lipschitz certificate is max |a| over [-bound, bound].
class FluxSpec {
 public:
  FluxSpec() = default;
  FluxSpec(Polynomial<double> A, double bound);

  static FluxSpec burgers(double bound) { return FluxSpec(Polynomial<double>{0.0, 0.0, 0.5}, bound); }
  static FluxSpec linear(double speed, double bound) { return FluxSpec(Polynomial<double>{0.0, speed}, bound); }
  static FluxSpec zero(double bound) { return FluxSpec(Polynomial<double>{0.0}, bound); }

  double A(double u) const { return A_(u); }
  double a(double u) const { return a_(u); }
  const Polynomial<double>& A_poly() const { return A_; }
  const Polynomial<double>& a_poly() const { return a_; }

  double bound() const { return bound_; }
  double lipschitz() const { return lipschitz_; }
  /// max |a| over [lo, hi], exact up to root isolation.
  double max_speed(double lo, double hi) const;

  /// Monotone two-point flux F(l, r); lax_friedrichs uses the certificate as viscosity.
  double numerical(NumericalFlux kind, double l, double r) const;

  double godunov(double l, double r) const;
  double engquist_osher(double l, double r) const;
  double lax_friedrichs(double l, double r) const { return 0.5 * (A_(l) + A_(r)) - 0.5 * lipschitz_ * (r - l); }

 private:
  /// Integral of max(a, 0) (positive = true) or min(a, 0) over [0, v].
  double signed_part_integral(double v, bool positive) const;

  Polynomial<double> A_;
  Polynomial<double> a_;
  double bound_ = 1.0;
  double lipschitz_ = 0.0;
  std::vector<double> critical_;  // all real roots of a, sorted
};

}  // namespace kinscl
