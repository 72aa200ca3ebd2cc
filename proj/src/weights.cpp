#include "hpk/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hpk/error.hpp"
#include "hpk/specfun.hpp"

namespace hpk {

HPParam HPParam::make(double s) {
  if (!std::isfinite(s)) throw DomainError("HPParam: s must be finite");
  HPParam p;
  p.s = s;
  p.n_s = (s > -0.5) ? 0 : static_cast<int>(std::floor(-0.5 - s)) + 1;
  p.s_prime = s + p.n_s;
  return p;
}

double log_line_weight(double a, double t) {
  const double at = std::abs(t);
  if (at < 1e150) return -a * std::log1p(t * t);
  return -a * (2.0 * std::log(at) + std::log1p(1.0 / (t * t)));
}

double eval_line_weight(const HPParam& param, int N, double x) {
  if (N < 1) throw DomainError("eval_line_weight: N must be >= 1");
  return std::pow(1.0 + x * x, -param.s - N);
}

double eval_circle_weight(const CircleWeight& w, double theta) {
  const double pi = std::numbers::pi;
  if (!(theta > -pi && theta < pi) && !(w.kind == WeightKind::w && theta == pi))
    throw DomainError("eval_circle_weight: theta outside (-pi, pi)");
  // 2 +- 2 cos(theta) as a square of a half-angle, accurate near the zero.
  const double half = (w.kind == WeightKind::lambda) ? 2.0 * std::cos(0.5 * theta) : 2.0 * std::sin(0.5 * theta);
  if (half == 0.0 && w.param.s < 0.0) throw DomainError("eval_circle_weight: singular angle");
  return std::pow(std::abs(half), 2.0 * w.param.s);
}

double eval_circle_weight_complex(std::complex<double> s, double theta) {
  // (1 + e^{i theta}) = 2 cos(theta/2) e^{i theta/2} on (-pi, pi).
  const double L = std::log(2.0 * std::cos(0.5 * theta));
  return std::exp(2.0 * s.real() * L + s.imag() * theta);
}

double circle_normalization(const CircleWeight& w) {
  const double s = w.param.s;
  if (!(s > -0.5)) throw DomainError("circle_normalization: s must exceed -1/2");
  return std::exp(specfun::log_gamma(2.0 * s + 1.0) - 2.0 * specfun::log_gamma(s + 1.0));
}

double weight_ratio_bound(std::complex<double> s, double a) {
  if (!(a > -0.5)) throw DomainError("weight_ratio_bound: Re s must exceed -1/2");
  if (std::abs(a - s.real()) > 1e-15 * std::max(1.0, std::abs(a)))
    throw DomainError("weight_ratio_bound: a must equal Re s");
  return std::exp(std::numbers::pi * std::abs(s.imag()));
}

double weight_ratio_grid_max(std::complex<double> s, double a, int points) {
  const double pi = std::numbers::pi;
  double worst = 1.0;
  for (int i = 0; i < points; ++i) {
    const double theta = -pi + (i + 0.5) * (2.0 * pi / points);
    const double r = eval_circle_weight_complex(s, theta) / eval_circle_weight_complex({a, 0.0}, theta);
    worst = std::max({worst, r, 1.0 / r});
  }
  return worst;
}

double golinskii_envelope(const HPParam& param, int n, double theta) {
  const double mod = std::abs(2.0 * std::cos(0.5 * theta));
  return std::pow(mod + 1.0 / (n + 1.0), -param.s);
}

}  // namespace hpk
