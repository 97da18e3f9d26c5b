#pragma once

#include "kinscl/grid.hpp"
#include "kinscl/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace kinscl {

/// theta(s) = c0 + sum_m (a_m cos(2 pi m s) + b_m sin(2 pi m s)), m = 1..
template <typename Scalar>
struct TrigPolynomial {
  Scalar c0 = Scalar(0);
  std::vector<Scalar> cos_coeffs;
  std::vector<Scalar> sin_coeffs;

  static TrigPolynomial constant(Scalar c) { return {c, {}, {}}; }

  /// derivative order 0, 1 or 2
  Scalar eval(Scalar s, int order = 0) const {
    Scalar v = order == 0 ? c0 : Scalar(0);
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    const std::size_t n = std::max(cos_coeffs.size(), sin_coeffs.size());
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar w = two_pi * Scalar(i + 1);
      const Scalar a = i < cos_coeffs.size() ? cos_coeffs[i] : Scalar(0);
      const Scalar b = i < sin_coeffs.size() ? sin_coeffs[i] : Scalar(0);
      const Scalar c = std::cos(w * s), sn = std::sin(w * s);
      switch (order) {
        case 0:
          v += a * c + b * sn;
          break;
        case 1:
          v += w * (-a * sn + b * c);
          break;
        default:
          v += -w * w * (a * c + b * sn);
          break;
      }
    }
    return v;
  }

  bool is_constant() const {
    for (Scalar a : cos_coeffs)
      if (a != Scalar(0)) return false;
    for (Scalar b : sin_coeffs)
      if (b != Scalar(0)) return false;
    return true;
  }
};

/// Separable test function phi(x, xi) = theta(x) psi(xi).
///
/// theta is a product of trig polynomials (one per axis); psi(xi) = P(s) (1 - s^2)^q
/// with s = (xi - center) / radius on |s| < 1 and 0 elsewhere. With q >= 3 the
/// function is C^2 in xi, and every derivative and primitive is closed form.
template <typename Scalar>
class TestFunction {
 public:
  TestFunction() = default;
  TestFunction(std::array<TrigPolynomial<Scalar>, 2> theta, Polynomial<Scalar> prefactor, int q, Scalar center,
               Scalar radius)
      : theta_(std::move(theta)), center_(center), radius_(radius) {
    if (!(radius > 0)) throw std::invalid_argument("test function radius must be > 0");
    Polynomial<Scalar> bump{Scalar(1)};
    const Polynomial<Scalar> base{Scalar(1), Scalar(0), Scalar(-1)};
    for (int i = 0; i < q; ++i) bump = bump * base;
    psi_s_ = prefactor * bump;
    dpsi_s_ = psi_s_.derivative();
    d2psi_s_ = dpsi_s_.derivative();
    prim_s_ = (psi_s_ * radius).antiderivative();
    prim_offset_ = prim_s_(Scalar(-1));
  }

  Scalar center() const { return center_; }
  Scalar radius() const { return radius_; }
  Scalar support_lo() const { return center_ - radius_; }
  Scalar support_hi() const { return center_ + radius_; }
  bool supported_inside(const XiGrid& xg) const { return support_lo() > -xg.R() && support_hi() < xg.R(); }

  Scalar theta(const std::array<double, 2>& x, int dim) const {
    return dim == 1 ? theta_[0].eval(x[0]) : theta_[0].eval(x[0]) * theta_[1].eval(x[1]);
  }
  /// d theta / d x_axis
  Scalar theta_grad(const std::array<double, 2>& x, int dim, int axis) const {
    if (dim == 1) return theta_[0].eval(x[0], 1);
    return axis == 0 ? theta_[0].eval(x[0], 1) * theta_[1].eval(x[1]) : theta_[0].eval(x[0]) * theta_[1].eval(x[1], 1);
  }
  Scalar theta_laplacian(const std::array<double, 2>& x, int dim) const {
    if (dim == 1) return theta_[0].eval(x[0], 2);
    return theta_[0].eval(x[0], 2) * theta_[1].eval(x[1]) + theta_[0].eval(x[0]) * theta_[1].eval(x[1], 2);
  }
  bool theta_constant(int dim) const { return theta_[0].is_constant() && (dim == 1 || theta_[1].is_constant()); }

  Scalar psi(Scalar xi) const { return inside(xi) ? psi_s_(to_s(xi)) : Scalar(0); }
  Scalar dpsi(Scalar xi) const { return inside(xi) ? dpsi_s_(to_s(xi)) / radius_ : Scalar(0); }
  Scalar d2psi(Scalar xi) const { return inside(xi) ? d2psi_s_(to_s(xi)) / (radius_ * radius_) : Scalar(0); }

  /// integral of psi over (-inf, xi]
  Scalar psi_primitive(Scalar xi) const {
    if (xi <= support_lo()) return Scalar(0);
    return prim_s_(std::min(to_s(xi), Scalar(1))) - prim_offset_;
  }

  /// Primitive of w(xi) psi(xi) over (-inf, xi] for a polynomial weight w.
  class WeightedPrimitive {
   public:
    WeightedPrimitive(const TestFunction& tf, const Polynomial<Scalar>& weight) : tf_(&tf) {
      prim_ = (weight.compose_affine(tf.radius_, tf.center_) * tf.psi_s_ * tf.radius_).antiderivative();
      offset_ = prim_(Scalar(-1));
    }
    Scalar operator()(Scalar xi) const {
      if (xi <= tf_->support_lo()) return Scalar(0);
      return prim_(std::min(tf_->to_s(xi), Scalar(1))) - offset_;
    }

   private:
    const TestFunction* tf_;
    Polynomial<Scalar> prim_;
    Scalar offset_ = Scalar(0);
  };

  WeightedPrimitive weighted_primitive(const Polynomial<Scalar>& weight) const { return WeightedPrimitive(*this, weight); }

  Scalar operator()(const std::array<double, 2>& x, Scalar xi, int dim) const { return theta(x, dim) * psi(xi); }

  /// L1 norm over the torus of |theta|, |grad theta| summed, or |laplacian theta| (order 0, 1, 2), by quadrature.
  Scalar theta_l1(int dim, int order, int n = 2048) const {
    Scalar s = 0;
    const int ny = dim == 1 ? 1 : n;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < n; ++i) {
        const std::array<double, 2> x{(i + 0.5) / n, dim == 1 ? 0.0 : (j + 0.5) / n};
        Scalar v = order == 0 ? theta(x, dim)
                   : order == 2 ? theta_laplacian(x, dim)
                                : theta_grad(x, dim, 0) + (dim == 2 ? theta_grad(x, dim, 1) : Scalar(0));
        s += std::abs(v);
      }
    return s / (Scalar(n) * ny);
  }

  Scalar psi_l1(int n = 4096) const {
    Scalar s = 0;
    for (int i = 0; i < n; ++i) s += std::abs(psi_s_(Scalar(-1) + (i + Scalar(0.5)) * Scalar(2) / n));
    return s * Scalar(2) / n * radius_;
  }

 private:
  Scalar to_s(Scalar xi) const { return (xi - center_) / radius_; }
  bool inside(Scalar xi) const { return std::abs(xi - center_) < radius_; }

  std::array<TrigPolynomial<Scalar>, 2> theta_{TrigPolynomial<Scalar>::constant(Scalar(1)),
                                               TrigPolynomial<Scalar>::constant(Scalar(1))};
  Scalar center_ = Scalar(0);
  Scalar radius_ = Scalar(1);
  Polynomial<Scalar> psi_s_{Scalar(1)};
  Polynomial<Scalar> dpsi_s_{Scalar(0)};
  Polynomial<Scalar> d2psi_s_{Scalar(0)};
  Polynomial<Scalar> prim_s_{Scalar(0)};
  Scalar prim_offset_ = Scalar(0);
};

/// cos(2 pi x) (1 - (xi/r)^2)^4 style member of the library.
template <typename Scalar>
TestFunction<Scalar> make_test_function(TrigPolynomial<Scalar> theta, Polynomial<Scalar> prefactor, Scalar center,
                                        Scalar radius, int q = 4) {
  return TestFunction<Scalar>({theta, TrigPolynomial<Scalar>::constant(Scalar(1))}, std::move(prefactor), q, center,
                              radius);
}

/// The three-member library used by residual and martingale checks; all
/// supports lie inside (-1.6, 1.6).
template <typename Scalar>
std::vector<TestFunction<Scalar>> standard_test_functions() {
  using TP = TrigPolynomial<Scalar>;
  std::vector<TestFunction<Scalar>> lib;
  lib.push_back(make_test_function<Scalar>(TP{0, {1}, {}}, Polynomial<Scalar>{1}, 0, Scalar(1.5)));
  lib.push_back(make_test_function<Scalar>(TP{0, {}, {1}}, Polynomial<Scalar>{0, 1}, Scalar(0.1), Scalar(1.2)));
  lib.push_back(make_test_function<Scalar>(TP{1, {0, 1}, {}}, Polynomial<Scalar>{1}, Scalar(0.2), Scalar(1.0)));
  return lib;
}

}  // namespace kinscl
