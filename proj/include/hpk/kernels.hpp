#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "hpk/line_basis.hpp"
#include "hpk/opuc.hpp"
#include "hpk/weights.hpp"

namespace hpk {

// Cayley correspondence e^{i theta} = (i - x)/(i + x) = (1 + ix)/(1 - ix),
// i.e. theta = 2 arctan x.
double cayley(double x);
double cayley_inverse(double theta);
// d theta / dx = 2 / (1 + x^2).
double cayley_jacobian(double x);

enum class KernelSource { line_direct, circle_cayley };

// Rank-N kernel of the rescaled eigenvalue ensemble C_N^(s):
// K(x, y) = N K^{(s,N)}(Nx, Ny) with explicit orthonormal eigenfunctions.
class FiniteKernel {
 public:
  FiniteKernel(const HPParam& param, int N, KernelSource source = KernelSource::line_direct);

  const HPParam& param() const { return param_; }
  int N() const { return N_; }
  KernelSource source() const { return source_; }
  const MonicLineBasis& line_basis() const { return *line_; }

  // psi_0..psi_{N-1} at x (line_direct only; real-valued).
  void eigenfunctions(double x, double* out) const;
  std::vector<double> eigenfunctions(double x) const;
  // Circle-transported eigenfunctions (circle_cayley only).
  void eigenfunctions_complex(double x, std::complex<double>* out) const;

  // Real kernel value. For circle_cayley the conjugating phase
  // e^{-i(N-1)(theta_x - theta_y)/2} is applied, which makes the sum real.
  double eval(double x, double y) const;
  double diagonal(double x) const;

 private:
  HPParam param_;
  int N_;
  KernelSource source_;
  std::shared_ptr<const MonicLineBasis> line_;
  std::shared_ptr<const OPUCBasis> circle_;
};

double eval_finite_kernel(const FiniteKernel& k, double x, double y);

// Phi_n^(s) built from the orthonormal polynomials of w^(s).
class RescaledCircleKernel {
 public:
  RescaledCircleKernel(const HPParam& param, int n);
  std::complex<double> eval(double alpha, double beta) const;
  int n() const { return n_; }

 private:
  HPParam param_;
  int n_;
  std::shared_ptr<const OPUCBasis> basis_;
};

std::complex<double> eval_phi_n(const RescaledCircleKernel& k, double alpha, double beta);

// Pi_infinity^(s)(x, y) = (F(x)G(y) - F(y)G(x)) / (x - y).
class LimitKernel {
 public:
  explicit LimitKernel(double s, double h_diag = 1e-5);

  double s() const { return s_; }
  double h_diag() const { return h_diag_; }
  double F(double x) const;
  double G(double x) const;
  double dF(double x) const;
  double dG(double x) const;

  double eval(double x, double y) const;
  // Analytic F'G - FG'.
  double diagonal(double x) const;
  // Central differences of F, G with relative step h_diag and one Richardson step.
  double diagonal_fd(double x) const;

 private:
  double s_;
  double h_diag_;
};

double eval_limit_kernel(const LimitKernel& k, double x, double y);

// Limit V_s or prelimit V_{s,N}.
class VFunction {
 public:
  explicit VFunction(double s);
  VFunction(double s, int N);

  double eval(double x) const;
  // Closed form 2^{2s+1} Gamma(s+1/2)^2 (s+1/2) (limit) or N^{1+2s} h_{N-1} (prelimit).
  double norm2() const;
  bool is_limit() const { return N_ == 0; }
  double s() const { return s_; }
  int N() const { return N_; }

 private:
  double s_;
  int N_;  // 0 for the limit flavor
  double log_scale_ = 0.0;
  std::shared_ptr<const MonicLineBasis> basis_;
};

double eval_V(const VFunction& v, double x);

// ||V||^2 by quadrature of V(x)^2 over R (t = 1/x substitution near 0).
double v_norm2_quadrature(const VFunction& v);

struct ProjectionQuad {
  double t_max = 2e4;       // |gamma| < 1/t_max handled by the averaged tail term
  double t_panel = 2.0;     // panel width in t = 1/|gamma|
  int order = 20;
  int bulk_panels = 400;    // log-spaced panels on 1 <= |gamma| <= R
};

struct ProjectionReport {
  double residual = 0.0;       // |int_{|gamma|<=R} Pi Pi - Pi(x, y)|
  double integral = 0.0;
  double target = 0.0;
  double tail_estimate = 0.0;  // leading asymptotic of the |gamma| > R contribution
  double tail_bound = 0.0;
};

ProjectionReport check_projection(const LimitKernel& k, double x, double y, double R,
                                  const ProjectionQuad& quad = {});

double check_limit_recurrence(double s, double x, double y);
// Diagonal variant evaluated through the central-difference diagonal.
double check_limit_recurrence_fd(double s, double x);

double check_finite_recurrence(double s, int N, double x, double y);

struct ConvergenceProfile {
  std::vector<int> N;
  std::vector<double> gap;
  bool strictly_decreasing = false;
  bool monotone_with_slack = false;  // gap[i+1] <= 1.2 gap[i]
};

ConvergenceProfile convergence_profile(double s, const std::vector<int>& N_list,
                                       const std::vector<double>& grid);

}  // namespace hpk
