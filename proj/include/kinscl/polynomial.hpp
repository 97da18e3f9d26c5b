#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace kinscl {

/// Dense univariate polynomial, coefficients in increasing degree.
template <typename Scalar>
class Polynomial {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Polynomial() : coeffs_(Coefficients::Zero(1)) {}
  explicit Polynomial(Coefficients coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() == 0) coeffs_ = Coefficients::Zero(1);
  }
  Polynomial(std::initializer_list<Scalar> c) : coeffs_(static_cast<Eigen::Index>(c.size())) {
    Eigen::Index i = 0;
    for (Scalar v : c) coeffs_(i++) = v;
    if (coeffs_.size() == 0) coeffs_ = Coefficients::Zero(1);
  }

  static Polynomial constant(Scalar c) { return Polynomial{c}; }
  static Polynomial monomial(int degree, Scalar c = Scalar(1)) {
    Coefficients v = Coefficients::Zero(degree + 1);
    v(degree) = c;
    return Polynomial(v);
  }

  const Coefficients& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  bool is_zero() const { return (coeffs_.array() == Scalar(0)).all(); }

  Scalar operator()(Scalar x) const {
    Scalar acc = coeffs_(coeffs_.size() - 1);
    for (Eigen::Index i = coeffs_.size() - 2; i >= 0; --i) acc = acc * x + coeffs_(i);
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs_.size() <= 1) return Polynomial{Scalar(0)};
    Coefficients d(coeffs_.size() - 1);
    for (Eigen::Index i = 1; i < coeffs_.size(); ++i) d(i - 1) = Scalar(i) * coeffs_(i);
    return Polynomial(d);
  }

  /// Antiderivative vanishing at zero.
  Polynomial antiderivative() const {
    Coefficients a = Coefficients::Zero(coeffs_.size() + 1);
    for (Eigen::Index i = 0; i < coeffs_.size(); ++i) a(i + 1) = coeffs_(i) / Scalar(i + 1);
    return Polynomial(a);
  }

  /// p(scale * s + shift) as a polynomial in s.
  Polynomial compose_affine(Scalar scale, Scalar shift) const {
    Polynomial result{Scalar(0)};
    Polynomial power{Scalar(1)};
    const Polynomial inner{shift, scale};
    for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
      result = result + power * coeffs_(i);
      power = power * inner;
    }
    return result;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    const Eigen::Index n = std::max(a.coeffs_.size(), b.coeffs_.size());
    Coefficients c = Coefficients::Zero(n);
    c.head(a.coeffs_.size()) += a.coeffs_;
    c.head(b.coeffs_.size()) += b.coeffs_;
    return Polynomial(c);
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Coefficients c = Coefficients::Zero(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (Eigen::Index i = 0; i < a.coeffs_.size(); ++i)
      for (Eigen::Index j = 0; j < b.coeffs_.size(); ++j) c(i + j) += a.coeffs_(i) * b.coeffs_(j);
    return Polynomial(c);
  }

  friend Polynomial operator*(const Polynomial& a, Scalar s) { return Polynomial(Coefficients(a.coeffs_ * s)); }

 private:
  Coefficients coeffs_;
};

/// Real roots of p inside the open interval (lo, hi), sorted.
///
/// Roots are isolated by recursion on the derivative's roots; each monotone
/// piece is then bisected to full precision.
template <typename Scalar>
std::vector<Scalar> real_roots_in(const Polynomial<Scalar>& p, Scalar lo, Scalar hi) {
  std::vector<Scalar> roots;
  if (p.degree() <= 0 || !(lo < hi)) return roots;
  if (p.degree() == 1 && p.coeffs()(1) != Scalar(0)) {
    const Scalar r = -p.coeffs()(0) / p.coeffs()(1);
    if (r > lo && r < hi) roots.push_back(r);
    return roots;
  }
  std::vector<Scalar> knots{lo};
  for (Scalar r : real_roots_in(p.derivative(), lo, hi)) knots.push_back(r);
  knots.push_back(hi);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    Scalar a = knots[i], b = knots[i + 1];
    Scalar fa = p(a), fb = p(b);
    if (fa == Scalar(0)) {
      if (i > 0 && (roots.empty() || roots.back() != a)) roots.push_back(a);
      continue;
    }
    if ((fa < 0) == (fb < 0) || fb == Scalar(0)) continue;
    for (;;) {
      const Scalar m = a + (b - a) / 2;
      if (m <= a || m >= b) break;
      const Scalar fm = p(m);
      if (fm == Scalar(0)) {
        a = b = m;
        break;
      }
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    roots.push_back(std::abs(p(a)) <= std::abs(p(b)) ? a : b);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace kinscl
