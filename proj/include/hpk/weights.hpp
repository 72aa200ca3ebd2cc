#pragma once

#include <complex>

namespace hpk {

// Ensemble parameter with the shift bookkeeping used for s <= -1/2.
struct HPParam {
  double s = 0.0;
  int n_s = 0;          // smallest integer with s + n_s > -1/2
  double s_prime = 0.0; // s + n_s

  static HPParam make(double s);
  int N_prime(int N) const { return N - n_s; }
};

enum class WeightKind { lambda, w };

// lambda(theta) = (2 + 2 cos theta)^s; the w kind is lambda(-e^{i theta}).
struct CircleWeight {
  HPParam param;
  WeightKind kind = WeightKind::lambda;
};

// (1 + x^2)^{-s-N}.
double eval_line_weight(const HPParam& param, int N, double x);

// log of (1 + t^2)^{-a}, safe for |t| up to the double range.
double log_line_weight(double a, double t);

// Unnormalized circle weight at angle theta in (-pi, pi).
double eval_circle_weight(const CircleWeight& w, double theta);

// Weight for complex s: (1 + e^{i theta})^{conj s} (1 + e^{-i theta})^s.
double eval_circle_weight_complex(std::complex<double> s, double theta);

// (1/2pi) * integral of the unnormalized weight = Gamma(2s+1) / Gamma(s+1)^2.
double circle_normalization(const CircleWeight& w);

// C = e^{pi |Im s|}; requires a = Re s > -1/2.
double weight_ratio_bound(std::complex<double> s, double a);

// max over an interior theta grid of max(r, 1/r), r = lambda^(s) / lambda^(a).
double weight_ratio_grid_max(std::complex<double> s, double a, int points = 10'000);

// (|1 + e^{i theta}| + 1/(n+1))^{-s}.
double golinskii_envelope(const HPParam& param, int n, double theta);

}  // namespace hpk
