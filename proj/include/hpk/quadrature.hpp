#pragma once

#include <functional>
#include <vector>

namespace hpk::quad {

// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Cached per order; the returned reference stays valid for the program lifetime.
const Rule& gauss_legendre(int order);

// Composite Gauss-Legendre over `panels` equal panels of [a, b].
template <class F>
double gl_panels(F&& f, double a, double b, int panels, int order = 16) {
  const Rule& r = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * f(mid + 0.5 * h * r.x[i]);
    total += 0.5 * h * acc;
  }
  return total;
}

// Nodes/weights of the composite rule, for tensor products and grid operators.
void append_gl_panels(double a, double b, int panels, int order, std::vector<double>& x,
                      std::vector<double>& w);

// Adaptive Gauss-Kronrod (boost) on a finite interval; throws QuadFailure when
// the error estimate stays above tol * max(1, |result|).
double adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

// Double-exponential rule for integrable endpoint singularities on [a, b].
double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

// Integral of J_nu(t)^2 / t over [T, inf) from the Hankel expansion; error O(T^-3).
double bessel_sq_over_t_tail(double nu, double T);

}  // namespace hpk::quad
