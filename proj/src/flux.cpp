#include "kinscl/flux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kinscl {

std::string to_string(NumericalFlux f) {
  switch (f) {
    case NumericalFlux::godunov:
      return "godunov";
    case NumericalFlux::engquist_osher:
      return "engquist_osher";
    case NumericalFlux::lax_friedrichs:
      return "lax_friedrichs";
  }
  return "unknown";
}

NumericalFlux numerical_flux_from_string(const std::string& name) {
  if (name == "godunov") return NumericalFlux::godunov;
  if (name == "engquist_osher") return NumericalFlux::engquist_osher;
  if (name == "lax_friedrichs") return NumericalFlux::lax_friedrichs;
  throw std::invalid_argument("unknown numerical flux '" + name + "'");
}

namespace {
// Polynomial growth means roots of a lie within this radius of the origin for
// any flux configured in practice; the Cauchy bound is used when larger.
double cauchy_root_bound(const Polynomial<double>& p) {
  const auto& c = p.coeffs();
  const double lead = c(c.size() - 1);
  if (lead == 0.0) return 1.0;
  double m = 0.0;
  for (Eigen::Index i = 0; i + 1 < c.size(); ++i) m = std::max(m, std::abs(c(i) / lead));
  return 1.0 + m;
}

Polynomial<double> trimmed(const Polynomial<double>& p) {
  auto c = p.coeffs();
  Eigen::Index n = c.size();
  while (n > 1 && c(n - 1) == 0.0) --n;
  return Polynomial<double>(Eigen::VectorXd(c.head(n)));
}
}  // namespace

FluxSpec::FluxSpec(Polynomial<double> A, double bound) : A_(trimmed(A)), a_(trimmed(A_.derivative())), bound_(bound) {
  if (!(bound > 0)) throw std::invalid_argument("flux certificate interval bound must be > 0");
  const double r = cauchy_root_bound(a_) + 1.0;
  critical_ = real_roots_in(a_, -r, r);
  lipschitz_ = max_speed(-bound, bound);
}

double FluxSpec::max_speed(double lo, double hi) const {
  double m = std::max(std::abs(a_(lo)), std::abs(a_(hi)));
  const auto inner = real_roots_in(a_.derivative(), lo, hi);
  for (double x : inner) m = std::max(m, std::abs(a_(x)));
  return m;
}

double FluxSpec::godunov(double l, double r) const {
  if (l == r) return A_(l);
  if (l < r) {
    double m = std::min(A_(l), A_(r));
    for (double c : critical_)
      if (c > l && c < r) m = std::min(m, A_(c));
    return m;
  }
  double m = std::max(A_(l), A_(r));
  for (double c : critical_)
    if (c > r && c < l) m = std::max(m, A_(c));
  return m;
}

double FluxSpec::signed_part_integral(double v, bool positive) const {
  if (v == 0.0) return 0.0;
  const double lo = std::min(0.0, v), hi = std::max(0.0, v);
  std::vector<double> knots{lo};
  for (double c : critical_)
    if (c > lo && c < hi) knots.push_back(c);
  knots.push_back(hi);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double mid = 0.5 * (knots[i] + knots[i + 1]);
    const double sign = a_(mid);
    if ((positive && sign > 0) || (!positive && sign < 0)) s += A_(knots[i + 1]) - A_(knots[i]);
  }
  return v > 0 ? s : -s;
}

double FluxSpec::engquist_osher(double l, double r) const {
  return A_(0.0) + signed_part_integral(l, true) + signed_part_integral(r, false);
}

double FluxSpec::numerical(NumericalFlux kind, double l, double r) const {
  switch (kind) {
    case NumericalFlux::godunov:
      return godunov(l, r);
    case NumericalFlux::engquist_osher:
      return engquist_osher(l, r);
    case NumericalFlux::lax_friedrichs:
      return lax_friedrichs(l, r);
  }
  return 0.0;
}

}  // namespace kinscl
