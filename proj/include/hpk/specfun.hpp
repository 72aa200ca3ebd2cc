#pragma once

#include <complex>

namespace hpk::specfun {

/// Stopping rules shared by the series evaluators below.
struct AccuracyPolicy {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_terms = 10'000;

  /// Throws DomainError unless every field is positive.
  void validate() const;
};

/// Gamma function. Lanczos (g = 7) for x >= 1/2, reflection below.
/// Throws PoleError at non-positive integers, OverflowError past x ~ 171.6.
double gamma_fn(double x, const AccuracyPolicy& policy = {});

/// log|Gamma(x)|; defined away from the poles.
double log_gamma(double x);

/// Bessel function of the first kind J_nu(x) for real order nu >= -1/2 and x > 0.
///
/// Ascending series (summed in extended precision) for x < 17, Hankel
/// asymptotic expansion for x >= max(17, 1.2 nu^2) where it reaches its
/// optimal truncation before the terms grow. In between, upward recurrence
/// from low-order Hankel seeds when nu < x, else the series.
double bessel_j(double nu, double x, const AccuracyPolicy& policy = {});

/// Same evaluator with the order restriction relaxed to nu > -1, for the
/// F component of the limit kernel when -1/2 < s < 0.
double bessel_j_ext(double nu, double x, const AccuracyPolicy& policy = {});

/// d/dx J_nu(x) via J'_nu = (nu/x) J_nu - J_{nu+1}; same domain as bessel_j.
double bessel_j_derivative(double nu, double x, const AccuracyPolicy& policy = {});

/// Smallest x at which bessel_j evaluates J_nu by the Hankel expansion directly.
double bessel_switchover(double nu);

/// Kummer's confluent hypergeometric function 1F1(a; c; z) summed from its
/// defining series. Throws PoleError when c is a non-positive integer and
/// NonConvergence when policy.max_terms is exhausted.
std::complex<double> hyp1f1(std::complex<double> a, std::complex<double> c,
                            std::complex<double> z, const AccuracyPolicy& policy = {});

}  // namespace hpk::specfun
