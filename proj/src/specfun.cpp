#include "hpk/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hpk/error.hpp"

namespace hpk::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGammaMax = 171.6243769563027;

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double xm1) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm1 + static_cast<double>(i));
  return a;
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// Gamma for x >= 1/2.
double gamma_right(double x) {
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  const double a = lanczos_sum(xm1);
  const double half = std::pow(t, 0.5 * (xm1 + 0.5));
  return std::sqrt(2.0 * kPi) * a * (half * std::exp(-t)) * half;
}

double log_gamma_right(double x) {
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(xm1));
}

}  // namespace

void AccuracyPolicy::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_terms < 1)
    throw DomainError("AccuracyPolicy: tolerances must be positive and max_terms >= 1");
}

double gamma_fn(double x, const AccuracyPolicy& policy) {
  policy.validate();
  if (std::isnan(x)) throw DomainError("gamma_fn: NaN argument");
  if (is_nonpositive_integer(x)) throw PoleError("gamma_fn: pole at " + std::to_string(x));
  if (x > kGammaMax) throw OverflowError("gamma_fn: overflow at " + std::to_string(x));
  if (x >= 0.5) return gamma_right(x);
  // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
  const double s = std::sin(kPi * x);
  if (1.0 - x <= kGammaMax) return kPi / (s * gamma_right(1.0 - x));
  const double mag = std::log(kPi) - std::log(std::abs(s)) - log_gamma_right(1.0 - x);
  return (s > 0 ? 1.0 : -1.0) * std::exp(mag);
}

double log_gamma(double x) {
  if (is_nonpositive_integer(x)) throw PoleError("log_gamma: pole at " + std::to_string(x));
  if (x >= 0.5) return log_gamma_right(x);
  return std::log(kPi) - std::log(std::abs(std::sin(kPi * x))) - log_gamma_right(1.0 - x);
}

constexpr double kSeriesLimit = 17.0;

double bessel_switchover(double nu) { return std::max(kSeriesLimit, 1.2 * nu * nu); }

namespace {

double bessel_series(double nu, double x, const AccuracyPolicy& policy) {
  using ld = long double;
  const ld q = -static_cast<ld>(x) * x / 4.0L;
  ld term = 1.0L;
  ld sum = 1.0L;
  int k = 0;
  for (; k < policy.max_terms; ++k) {
    term *= q / (static_cast<ld>(k + 1) * (static_cast<ld>(nu) + k + 1));
    sum += term;
    if (std::abs(term) < 1e-20L * std::abs(sum) && static_cast<ld>(k) > -q) break;
  }
  if (k == policy.max_terms) throw NonConvergence("bessel_j: series did not converge");
  // Prefactor (x/2)^nu / Gamma(nu+1), through logs when nu is large.
  double pref;
  if (nu + 1.0 < 150.0)
    pref = std::pow(0.5 * x, nu) / gamma_fn(nu + 1.0);
  else
    pref = std::exp(nu * std::log(0.5 * x) - log_gamma(nu + 1.0));
  return pref * static_cast<double>(sum);
}

double bessel_hankel(double nu, double x, const AccuracyPolicy& policy) {
  const double mu = 4.0 * nu * nu;
  // a_k / x^k with a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k)
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double prev_abs = std::numeric_limits<double>::infinity();
  for (int k = 1; k < policy.max_terms; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(next);
    if (mag == 0.0) break;
    if (mag > prev_abs) break;  // asymptotic series began diverging
    // Terms alternate in pairs: k odd feeds Q, k even feeds P.
    const int r = k % 4;
    if (r == 1) q += next;
    else if (r == 2) p -= next;
    else if (r == 3) q -= next;
    else p += next;
    term = next;
    prev_abs = mag;
    if (mag < 1e-17 * std::max(std::abs(p), std::abs(q) + 1.0)) break;
  }
  // omega = x - nu pi/2 - pi/4, expanded so cos/sin see the exact x.
  const double phi = 0.5 * nu * kPi + 0.25 * kPi;
  const double cx = std::cos(x), sx = std::sin(x);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double cw = cx * cp + sx * sp;
  const double sw = sx * cp - cx * sp;
  return std::sqrt(2.0 / (kPi * x)) * (p * cw - q * sw);
}

// Upward recurrence J_{v+1} = (2v/x) J_v - J_{v-1} from Hankel seeds at
// orders in [1/2, 3/2); stable while the order stays below x.
double bessel_recurrence(double nu, double x, const AccuracyPolicy& policy) {
  const double steps = std::floor(nu - 0.5);
  double v = nu - steps;
  double jm = bessel_hankel(v - 1.0, x, policy);
  double j = bessel_hankel(v, x, policy);
  while (v < nu - 0.5) {
    const double next = (2.0 * v / x) * j - jm;
    jm = j;
    j = next;
    v += 1.0;
  }
  return j;
}

double bessel_dispatch(double nu, double x, const AccuracyPolicy& policy) {
  if (x < kSeriesLimit) return bessel_series(nu, x, policy);
  if (x >= bessel_switchover(nu)) return bessel_hankel(nu, x, policy);
  if (nu < x) return bessel_recurrence(nu, x, policy);
  return bessel_series(nu, x, policy);
}

}  // namespace

double bessel_j(double nu, double x, const AccuracyPolicy& policy) {
  policy.validate();
  if (!(x > 0.0)) throw DomainError("bessel_j: x must be > 0");
  if (!(nu >= -0.5)) throw DomainError("bessel_j: order must be >= -1/2");
  return bessel_dispatch(nu, x, policy);
}

double bessel_j_ext(double nu, double x, const AccuracyPolicy& policy) {
  policy.validate();
  if (!(x > 0.0)) throw DomainError("bessel_j_ext: x must be > 0");
  if (!(nu > -1.0)) throw DomainError("bessel_j_ext: order must be > -1");
  return bessel_dispatch(nu, x, policy);
}

double bessel_j_derivative(double nu, double x, const AccuracyPolicy& policy) {
  return (nu / x) * bessel_j(nu, x, policy) - bessel_j(nu + 1.0, x, policy);
}

std::complex<double> hyp1f1(std::complex<double> a, std::complex<double> c,
                            std::complex<double> z, const AccuracyPolicy& policy) {
  policy.validate();
  if (c.imag() == 0.0 && is_nonpositive_integer(c.real()))
    throw PoleError("hyp1f1: c is a non-positive integer");
  std::complex<double> term = 1.0;
  std::complex<double> sum = 1.0;
  int small_run = 0;
  for (int n = 0; n < policy.max_terms; ++n) {
    const double dn = static_cast<double>(n);
    term *= (a + dn) / ((c + dn) * (dn + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;  // a was a non-positive integer
    // Require two consecutive small terms once the ratio |z|/n has dropped below 1.
    if (std::abs(term) <= policy.rel_tol * 1e-4 * std::abs(sum) + policy.abs_tol * 1e-4 &&
        dn + 1.0 > std::abs(z)) {
      if (++small_run >= 2) return sum;
    } else {
      small_run = 0;
    }
  }
  throw NonConvergence("hyp1f1: series exceeded max_terms");
}

}  // namespace hpk::specfun
