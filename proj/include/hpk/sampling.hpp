#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hpk/kernels.hpp"
#include "hpk/rng.hpp"
#include "json.hpp"

namespace hpk {

// Finite sorted point configuration on R* (multiset semantics).
struct Configuration {
  std::vector<double> points;

  static Configuration from_points(std::vector<double> pts);
  std::size_t size() const { return points.size(); }
  double s2() const;
};

enum class SamplerMethod { spectral_dpp, mcmc };

struct SamplerConfig {
  std::uint64_t seed = 1;
  int grid_points = 4096;
  int max_grid_points = 1 << 17;
  double R = 0.0;  // 0: the angle grid covers all of R; otherwise |x| <= R
  SamplerMethod method = SamplerMethod::spectral_dpp;
  double mcmc_step = 0.5;  // initial random-walk scale in u = arctan x
  int burn_in = 1000;      // sweeps
  int thinning = 10;       // sweeps between emitted states

  void validate() const;
  nlohmann::json to_json() const;
  static SamplerConfig from_json(const nlohmann::json& j);
};

// Sequential-conditioning sampler for a projection kernel with explicit
// eigenfunctions. Works on a grid in v in (-1, 1) with
// theta(v) = theta_R sgn(v) (1 - (1 - |v|)^p) and x = tan(theta/2) / N, so the
// whole line is covered without truncation. Grid cells are chosen from the
// residual diagonal; the point inside the cell is uniform and the residual is
// then updated with the exact eigenfunction values at that point.
class ProjectionSampler {
 public:
  ProjectionSampler(const FiniteKernel& kernel, const SamplerConfig& cfg);

  Configuration draw(Rng& rng) const;
  int grid_points() const { return G_; }
  double mass_deficit() const { return deficit_; }

 private:
  double x_of_v(double v) const;
  double dxdv(double v) const;
  void build(int G);

  const FiniteKernel& kernel_;
  int N_;
  int G_ = 0;
  double theta_max_;
  double power_;
  double deficit_ = 0.0;
  Eigen::MatrixXd psi_;  // G x N, eigenfunctions in v-coordinates at cell midpoints
  Eigen::VectorXd diag0_;
};

Configuration sample_projection_dpp(const FiniteKernel& kernel, const SamplerConfig& cfg);

// Discrete projection DPP on grid nodes: columns of U are orthonormal in l^2.
// Returns the sampled node indices (sorted).
std::vector<int> sample_discrete_projection(const Eigen::MatrixXd& U, Rng& rng);

struct McmcResult {
  std::vector<Configuration> states;  // rescaled by 1/N
  double acceptance = 0.0;            // post burn-in
  double step = 0.0;                  // frozen step scale
  bool acceptance_in_range = true;    // [0.1, 0.6]
  std::string warning;
};

// Metropolis single-site random walk in u = arctan(x) for the unscaled
// pseudo-Jacobi density, including the Jacobian of the substitution.
McmcResult sample_pseudo_jacobi_mcmc(const HPParam& param, int N, const SamplerConfig& cfg,
                                     int count);

// X = i (1 + U)(1 - U)^{-1} for Haar U, symmetrized. Retries on a near-singular
// 1 - U and throws SingularCayley after repeated failures.
Eigen::MatrixXcd sample_hp_matrix_s0(int M, Rng& rng);
Eigen::MatrixXcd sample_hp_matrix_s0(int M, const SamplerConfig& cfg);

struct CornerSummary {
  int N = 0;
  std::vector<double> a_plus;   // decreasing
  std::vector<double> a_minus;  // decreasing
  double c = 0.0;               // tr(X_N) / N
  double d = 0.0;               // tr(X_N^2) / N^2
  std::vector<double> scaled_eigenvalues;  // ascending, divided by N
};

std::vector<CornerSummary> corner_summaries(const Eigen::MatrixXcd& X, const std::vector<int>& N_list);

// Cauchy interlacing between successive corners in N_list (ascending N).
bool corners_interlace(const Eigen::MatrixXcd& X, const std::vector<int>& N_list, double tol = 1e-9);

// Archive replay contract: the request fully determines the output.
struct SampleRequest {
  double s = 0.0;
  int N = 1;
  int draws = 1;
  SamplerConfig cfg;

  nlohmann::json to_json() const;
  static SampleRequest from_json(const nlohmann::json& j);
};

struct SampleRun {
  std::vector<Configuration> configs;
  nlohmann::json report;  // acceptance rate, grid size, ...
};

SampleRun run_sample_request(const SampleRequest& req, int jobs = 1);

// CSV: a "# runspec:" comment line, then one configuration per row.
std::string sample_archive_csv(const SampleRequest& req, const SampleRun& run);

}  // namespace hpk
