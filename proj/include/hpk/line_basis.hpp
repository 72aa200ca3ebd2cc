#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hpk/weights.hpp"
#include "json.hpp"

namespace hpk {

// Monic orthogonal polynomials on R for phi(t) = (1 + t^2)^{-s-N}, built by
// Gram-Schmidt on the closed-form moments in extended precision.
struct MonicLineBasis {
  HPParam param;
  int N = 0;
  int degree_count = 0;
  double a = 0.0;  // exponent s + N of the weight
  // coeffs[k][j]: coefficient of t^j in p_k (monic; may overflow for large N).
  std::vector<std::vector<double>> coeffs;
  std::vector<std::vector<std::string>> coeff_digits;
  std::vector<double> log_h;   // log of ||p_k||^2 under phi
  std::vector<double> b;       // three-term coefficients, p_{k+1} = t p_k - b_k p_{k-1}; b[0] = 0
  std::vector<double> sqrt_b;

  // out[k] = p_k(t) sqrt(phi(t)) / sqrt(h_k) for k < count, evaluated by the
  // orthonormal recurrence with running rescaling (valid for |t| up to ~1e300).
  void eval_weighted_orthonormal(double t, int count, double* out) const;
  // p_k(t) from the coefficient table.
  double eval_monic(int k, double t) const;
};

// Refuses max_degree >= N (moments diverge) and builds degrees 0..max_degree.
std::shared_ptr<const MonicLineBasis> build_monic_line(const HPParam& param, int N, int max_degree);

// Closed-form three-term coefficients b_1..b_count for the same weight.
std::vector<double> romanovski_b(double s, int N, int count);

// log h_0 = log B(1/2, s + N - 1/2).
double line_log_h0(double s, int N);

nlohmann::json line_to_json(const MonicLineBasis& basis);

}  // namespace hpk
