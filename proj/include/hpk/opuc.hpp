#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include "json.hpp"
#include <vector>

#include "hpk/weights.hpp"

namespace hpk {

// Orthonormal polynomials on the unit circle for the probability-normalized
// weight, i.e. (1/2pi) int conj(p_j) p_k weight(theta) / c_0 dtheta = delta_jk.
struct OPUCBasis {
  CircleWeight weight;
  int degree_count = 0;
  // coeffs[k][j]: coefficient of z^j in p_k.
  std::vector<std::vector<std::complex<double>>> coeffs;
  std::vector<double> leading;
  // 25-digit decimal strings of the (real) coefficients, same layout as coeffs.
  std::vector<std::vector<std::string>> coeff_digits;
  double gram_residual = 0.0;
  double normalization = 1.0;  // c_0 of the unnormalized weight

  std::complex<double> eval(int k, std::complex<double> z) const;
  // Reversed polynomial p_k^*(z) = z^k conj(p_k(1/conj z)).
  std::complex<double> eval_star(int k, std::complex<double> z) const;
  // Normalized weight (weight / c_0).
  double weight_at(double theta) const;
};

inline constexpr int kOpucDegreeCap = 120;

// Trigonometric moments of the normalized weight, c_0 .. c_{count-1}.
std::vector<double> circle_moments(const CircleWeight& w, int count);

// Extended-precision Toeplitz Cholesky build. Results are cached.
std::shared_ptr<const OPUCBasis> build_opuc(const CircleWeight& w, int n);

// K_N(e^{i alpha}, e^{i beta}) = sqrt(lambda(alpha) lambda(beta)) sum_{k<N} p_k conj(p_k),
// with the normalized weight and no 1/2pi factor.
std::complex<double> cd_sum_circle(const OPUCBasis& basis, int N, double alpha, double beta);

// |sum_{k<n} p_k(z) conj p_k(w) - Christoffel-Darboux closed form|.
double cd_identity_residual(const OPUCBasis& basis, int n, double theta, double tau);

// Lower bound on s_N(mu, e^{i theta}) from trial polynomials (reproducing
// kernel trial plus random trials), with norms taken from the moment matrix.
struct ExtremalResult {
  double best = 0.0;
  double kernel_trial = 0.0;
  double best_random = 0.0;
};
ExtremalResult szego_extremal(const CircleWeight& w, int N, double theta, int trial_count,
                              std::uint64_t seed = 1);

nlohmann::json opuc_to_json(const OPUCBasis& basis);

}  // namespace hpk
