#include "hpk/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "hpk/error.hpp"

namespace hpk::quad {

namespace {

Rule compute_rule(int n) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

}  // namespace

const Rule& gauss_legendre(int order) {
  if (order < 1) throw DomainError("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

void append_gl_panels(double a, double b, int panels, int order, std::vector<double>& x,
                      std::vector<double>& w) {
  const Rule& r = gauss_legendre(order);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      x.push_back(mid + 0.5 * h * r.x[i]);
      w.push_back(0.5 * h * r.w[i]);
    }
  }
}

double adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &err);
  if (!std::isfinite(v) || err > 100.0 * tol * std::max(1.0, std::abs(v)))
    throw QuadFailure("adaptive quadrature did not reach tolerance");
  return v;
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  double err = 0.0;
  const double v = integrator.integrate(f, a, b, tol, &err);
  if (!std::isfinite(v)) throw QuadFailure("tanh_sinh: non-finite result");
  return v;
}

double bessel_sq_over_t_tail(double nu, double T) {
  const double pi = std::numbers::pi;
  // 2 omega = 2T - nu pi - pi/2
  const double two_omega = 2.0 * T - nu * pi - 0.5 * pi;
  return (1.0 / T - std::sin(two_omega) / (2.0 * T * T)) / pi;
}

}  // namespace hpk::quad
