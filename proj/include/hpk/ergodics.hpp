#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hpk/sampling.hpp"
#include "hpk/weights.hpp"
#include "json.hpp"

namespace hpk {

// Point (alpha+, alpha-, gamma1, delta) of the Pickrell set with finitely many
// nonzero alphas.
struct OmegaPoint {
  std::vector<double> alpha_plus;
  std::vector<double> alpha_minus;
  double gamma1 = 0.0;
  double delta = 0.0;

  // Throws DomainError unless the alphas are nonnegative and weakly decreasing
  // and gamma2 >= 0.
  void validate() const;
  double gamma2() const;
  // x_l: the alpha+ followed by the negated alpha-.
  std::vector<double> points() const;
};

// prod_j e^{i gamma1 r_j - gamma2 r_j^2} prod_l e^{-i x_l r_j} / (1 - i x_l r_j).
std::complex<double> char_function(const OmegaPoint& omega, const std::vector<double>& r);

// phi_n: 0 on |x| <= 1/(2n^2), 2n^2|x| - 1 on the ramp, 1 beyond 1/n^2.
double tent(int n, double x);

struct BalanceReport {
  int n_max = 0;
  std::vector<double> hard;        // hard[n-1] = sum x 1_{|x| > 1/n^2}
  std::vector<double> tented;      // tented[n-1] = sum x phi_n(x)
  std::vector<double> hard_diff;   // |hard[n] - hard[n-1]|, n >= 1
  std::vector<double> tent_diff;
  std::vector<bool> ramp_empty;    // no point with 1/(2n^2) <= |x| <= 1/n^2
  int stable_from = 0;             // smallest n with 1/n^2 < min|x| (0 if beyond n_max)
  double full_sum = 0.0;
};

BalanceReport principal_value_sums(const Configuration& config, int n_max);

// Integral of x^2 K_N(x, x) over (-eps, eps), from the line eigenfunctions.
double rho1_second_moment(const HPParam& param, int N, double eps);

// J_N = N^{-2} int_{|theta| <= 2 atan(N eps)} tan^2(theta/2) K_N^circ(theta, theta) dtheta / 2pi,
// from the orthonormal polynomials on the circle.
double circle_moment_JN(const HPParam& param, int N, double eps);

// Integral of K_N(x, x) over |x| >= R.
double tail_mass(const HPParam& param, int N, double R);

// Integral of K_N(x, x) over |x| >= R for the limit kernel.
double limit_tail_mass(double s, double R);

struct VarianceCheck {
  double T = 0.0;        // E[(sum x 1_{|x|<=eps})^2] = A - T3
  double A = 0.0;        // int x^2 1_{|x|<=eps} K(x, x)
  double T2 = 0.0;       // int x 1_{|x|<=eps} K(x, x), zero by evenness
  double T3 = 0.0;       // double integral of x y K(x, y)^2 on the square
  double bound = 0.0;    // 2 A
  bool holds = false;    // 0 <= T <= bound and |T2| < 1e-10
};

VarianceCheck variance_bound_check(const HPParam& param, int N, double eps);

// Monte-Carlo estimate of T with standard error, from spectral draws.
struct MonteCarloEstimate {
  double mean = 0.0;
  double sem = 0.0;
  int draws = 0;
};
MonteCarloEstimate variance_monte_carlo(const HPParam& param, int N, double eps, int draws,
                                        std::uint64_t seed, int jobs = 1);

struct Gamma1Params {
  int M = 256;
  std::vector<int> N_list{64, 128, 256};
  std::vector<int> n_list{8, 11, 16};  // paired with N_list elementwise
  int draws = 200;
  double R = 0.0;                      // 0: no upper cutoff
  std::uint64_t seed = 1;
  int jobs = 1;

  void validate() const;
  nlohmann::json to_json() const;
};

// Median |c^(N) - truncated sum| across s = 0 matrix draws, plus the exact
// stabilization check for every (draw, N).
nlohmann::json gamma1_balance_experiment(const Gamma1Params& p);

// Truncated eigenvalue sum sum x 1_{1/n^2 < |x| < R} (R <= 0 means no upper cutoff).
double truncated_sum(const std::vector<double>& points, int n, double R = 0.0);

}  // namespace hpk
