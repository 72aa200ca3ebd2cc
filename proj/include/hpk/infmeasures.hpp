#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hpk/sampling.hpp"
#include "hpk/weights.hpp"
#include "json.hpp"

namespace hpk {

// v_k(x) = x^k V_{s'}(x), k = 1..n_s, for s <= -1/2.
class VBasis {
 public:
  explicit VBasis(const HPParam& param);
  const HPParam& param() const { return param_; }
  int size() const { return param_.n_s; }
  double eval(int k, double x) const;

 private:
  HPParam param_;
  VFunction v_;
};

double eval_v_basis(const VBasis& vb, int k, double x);

struct GrowthCertificate {
  double exponent = 0.0;          // k - 1 - s'
  bool square_integrable = false; // exponent < -1/2
  double fitted_slope = 0.0;      // log-log slope of int_1^T v_k^2 over the fit window
  double expected_slope = 0.0;    // 2 exponent + 1
  std::vector<double> T;
  std::vector<double> integral;
};

// Fit window T in [T_lo, T_hi], log-spaced.
GrowthCertificate growth_certificate(const VBasis& vb, int k, double T_lo = 1e4, double T_hi = 1e8,
                                     int points = 9);
// Verdict for an arbitrary exponent.
bool exponent_square_integrable(double exponent);

// Whole-line quadrature grid in theta = 2 atan(N x) for a rank-N proxy kernel,
// with geometric refinement toward theta = +-pi (levels halvings of the last panel).
struct LineGrid {
  std::vector<double> x;
  std::vector<double> w;
};
LineGrid proxy_line_grid(int N, int order = 16, int levels = 100);

struct ContractionSpec {
  int N_proxy = 128;
  int order = 16;
};

struct ContractionReport {
  double norm = 0.0;               // largest eigenvalue of sqrt(1-g) Pi sqrt(1-g)
  std::vector<double> spectrum;    // descending
  double trace = 0.0;              // sum of the spectrum
  double trace_quadrature = 0.0;   // int (1 - g) K_N(x, x) dx by an independent rule
  double limit_trace = 0.0;        // int (1 - g) Pi_infinity(x, x) dx
  bool warning = false;            // norm within 1e-3 of 1
  int N_proxy = 0;
};

ContractionReport contraction_report(double s_prime, double sigma, const ContractionSpec& spec = {});
double contraction_norm(double s_prime, double sigma, const ContractionSpec& spec = {});

// Truncated symmetric grid: theta-uniform panels for |x| <= 1 and linear panels
// in x on 1 <= |x| <= R, with R = sqrt(40 / sigma).
struct DampedGridSpec {
  int order = 16;
  int theta_panels_per_rank = 2;  // panels on 0 < theta <= 2 atan(m), times m
  double x_panel = 0.25;
  double R = 0.0;                 // 0: sqrt(40 / sigma)
};

struct DampedProjectionGrid {
  HPParam param;
  double sigma = 0.0;
  int m = 0;
  double R = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  Eigen::MatrixXd basis;        // orthonormal columns in l^2 (sqrt(w) scaling folded in)
  Eigen::MatrixXd P;            // basis * basis^T
  double idempotency_residual = 0.0;  // ||P^2 - P||_F / ||P||_F
  double symmetry_residual = 0.0;     // ||P - P^T||_F / ||P||_F
  double trace = 0.0;
  int rank = 0;                        // m + n_s
  double min_gram_eigenvalue = 0.0;    // of Psi^T g Psi for the L block
  std::vector<double> transversality;  // |P_L a_k| / |a_k| for the damped v_k

  // K(x_i, x_i) = P_ii / w_i.
  std::vector<double> diagonal() const;
};

// Projection onto sqrt(g^sigma) (span of sgn-corrected rank-m proxy eigenfunctions
// for s' plus the v-basis), g^sigma = exp(-sigma x^2).
DampedProjectionGrid damped_projection(const HPParam& param, double sigma, int m,
                                       const DampedGridSpec& spec = {});

// sqrt(g) Pi (1 + (g - 1) Pi)^{-1} Pi sqrt(g) evaluated with grid matrices; used to
// cross-check damped_projection when n_s = 0.
Eigen::MatrixXd damped_projection_formula(const HPParam& param, double sigma, int m,
                                          const DampedGridSpec& spec = {});

struct DampedDiagonal {
  std::vector<double> x;
  std::vector<double> K;
  std::vector<double> w;
  double integral = 0.0;
};
DampedDiagonal damped_dpp_diagonal(const HPParam& param, double sigma, int m,
                                   const DampedGridSpec& spec = {});

struct S2Result {
  double S2 = 0.0;
  double weight = 1.0;
};
S2Result s2_functional(const Configuration& config, double sigma);

// Binary export: one JSON header line, then rows*cols little-endian doubles in
// row-major order.
void export_matrix(const std::string& path, const Eigen::MatrixXd& M, const nlohmann::json& header);
Eigen::MatrixXd import_matrix(const std::string& path, nlohmann::json* header = nullptr);
nlohmann::json damped_header(const DampedProjectionGrid& d);

}  // namespace hpk
