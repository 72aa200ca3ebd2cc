#include "hpk/kernels.hpp"

#include <cmath>
#include <numbers>

#include "hpk/error.hpp"
#include "hpk/quadrature.hpp"
#include "hpk/specfun.hpp"

namespace hpk {

namespace {

constexpr double kPi = std::numbers::pi;

double sgn(double x) { return x > 0 ? 1.0 : -1.0; }

void require_nonzero(double x, const char* what) {
  if (x == 0.0 || !std::isfinite(x)) throw DomainError(std::string(what) + ": argument must be a nonzero finite real");
}

}  // namespace

double cayley(double x) { return 2.0 * std::atan(x); }
double cayley_inverse(double theta) { return std::tan(0.5 * theta); }
double cayley_jacobian(double x) { return 2.0 / (1.0 + x * x); }

// ---------------------------------------------------------------- FiniteKernel

FiniteKernel::FiniteKernel(const HPParam& param, int N, KernelSource source)
    : param_(param), N_(N), source_(source) {
  if (N < 1) throw DomainError("FiniteKernel: N must be >= 1");
  if (!(param.s > -0.5)) throw DomainError("FiniteKernel: s must exceed -1/2");
  line_ = build_monic_line(param, N, N - 1);
  if (source == KernelSource::circle_cayley) circle_ = build_opuc({param, WeightKind::lambda}, N);
}

void FiniteKernel::eigenfunctions(double x, double* out) const {
  line_->eval_weighted_orthonormal(N_ * x, N_, out);
  const double r = std::sqrt(static_cast<double>(N_));
  for (int k = 0; k < N_; ++k) out[k] *= r;
}

std::vector<double> FiniteKernel::eigenfunctions(double x) const {
  std::vector<double> v(N_);
  eigenfunctions(x, v.data());
  return v;
}

void FiniteKernel::eigenfunctions_complex(double x, std::complex<double>* out) const {
  if (!circle_) throw DomainError("eigenfunctions_complex: kernel was not built from the circle");
  const double t = N_ * x;
  const double theta = cayley(t);
  const std::complex<double> z = std::polar(1.0, theta);
  // |1 + e^{i theta}|^{2s} = (4 / (1 + t^2))^s, written through t to stay finite near theta = pi.
  const double lam = std::exp(circle_->weight.param.s * (std::log(4.0) + log_line_weight(1.0, t))) /
                     circle_->normalization;
  const double amp = std::sqrt(lam / (2.0 * kPi) * N_ * cayley_jacobian(t));
  for (int k = 0; k < N_; ++k) out[k] = amp * circle_->eval(k, z);
}

double FiniteKernel::eval(double x, double y) const {
  require_nonzero(x, "eval_finite_kernel");
  require_nonzero(y, "eval_finite_kernel");
  if (source_ == KernelSource::line_direct) {
    std::vector<double> a(N_), b(N_);
    eigenfunctions(x, a.data());
    eigenfunctions(y, b.data());
    double acc = 0.0;
    for (int k = 0; k < N_; ++k) acc += a[k] * b[k];
    return acc;
  }
  std::vector<std::complex<double>> a(N_), b(N_);
  eigenfunctions_complex(x, a.data());
  eigenfunctions_complex(y, b.data());
  std::complex<double> acc = 0.0;
  for (int k = 0; k < N_; ++k) acc += a[k] * std::conj(b[k]);
  const double dtheta = cayley(N_ * x) - cayley(N_ * y);
  return (acc * std::polar(1.0, -0.5 * (N_ - 1) * dtheta)).real();
}

double FiniteKernel::diagonal(double x) const { return eval(x, x); }

double eval_finite_kernel(const FiniteKernel& k, double x, double y) { return k.eval(x, y); }

// --------------------------------------------------------- RescaledCircleKernel

RescaledCircleKernel::RescaledCircleKernel(const HPParam& param, int n) : param_(param), n_(n) {
  if (n < 1) throw DomainError("RescaledCircleKernel: n must be >= 1");
  basis_ = build_opuc({param, WeightKind::w}, n);
}

std::complex<double> RescaledCircleKernel::eval(double alpha, double beta) const {
  const double lim = n_ * kPi;
  if (!(std::abs(alpha) < lim) || !(std::abs(beta) < lim))
    throw DomainError("eval_phi_n: angles must lie in (-n pi, n pi)");
  const double c = (n_ - 1.0) / (2.0 * n_);
  const std::complex<double> k = cd_sum_circle(*basis_, n_, alpha / n_, beta / n_);
  return std::polar(1.0, -c * alpha) * k * std::polar(1.0, c * beta) / (2.0 * kPi * n_);
}

std::complex<double> eval_phi_n(const RescaledCircleKernel& k, double alpha, double beta) {
  return k.eval(alpha, beta);
}

// ---------------------------------------------------------------- LimitKernel

LimitKernel::LimitKernel(double s, double h_diag) : s_(s), h_diag_(h_diag) {
  if (!(s > -0.5)) throw DomainError("LimitKernel: s must exceed -1/2");
  if (!(h_diag > 0.0 && h_diag < 1e-2)) throw DomainError("LimitKernel: h_diag must lie in (0, 1e-2)");
}

double LimitKernel::F(double x) const {
  require_nonzero(x, "LimitKernel::F");
  const double u = std::abs(x);
  return specfun::bessel_j_ext(s_ - 0.5, 1.0 / u) / (2.0 * std::sqrt(u));
}

double LimitKernel::G(double x) const {
  require_nonzero(x, "LimitKernel::G");
  const double u = std::abs(x);
  return sgn(x) * specfun::bessel_j(s_ + 0.5, 1.0 / u) / std::sqrt(u);
}

double LimitKernel::dF(double x) const {
  require_nonzero(x, "LimitKernel::dF");
  const double u = std::abs(x);
  const double z = 1.0 / u;
  const double nu = s_ - 0.5;
  const double J = specfun::bessel_j_ext(nu, z);
  const double dJ = (nu / z) * J - specfun::bessel_j(nu + 1.0, z);
  const double d = -0.25 * J / (u * std::sqrt(u)) - 0.5 * dJ / (u * u * std::sqrt(u));
  return sgn(x) * d;  // F is even
}

double LimitKernel::dG(double x) const {
  require_nonzero(x, "LimitKernel::dG");
  const double u = std::abs(x);
  const double z = 1.0 / u;
  const double nu = s_ + 0.5;
  const double J = specfun::bessel_j(nu, z);
  const double dJ = specfun::bessel_j_derivative(nu, z);
  return -0.5 * J / (u * std::sqrt(u)) - dJ / (u * u * std::sqrt(u));  // G is odd, G' even
}

double LimitKernel::diagonal(double x) const { return dF(x) * G(x) - F(x) * dG(x); }

double LimitKernel::diagonal_fd(double x) const {
  require_nonzero(x, "LimitKernel::diagonal_fd");
  auto at_step = [&](double h) {
    const double dF_ = (F(x + h) - F(x - h)) / (2.0 * h);
    const double dG_ = (G(x + h) - G(x - h)) / (2.0 * h);
    return dF_ * G(x) - F(x) * dG_;
  };
  const double h = h_diag_ * std::abs(x);
  return (4.0 * at_step(0.5 * h) - at_step(h)) / 3.0;
}

double LimitKernel::eval(double x, double y) const {
  require_nonzero(x, "eval_limit_kernel");
  require_nonzero(y, "eval_limit_kernel");
  if (std::abs(x - y) < h_diag_ * std::max(std::abs(x), std::abs(y))) return diagonal(0.5 * (x + y));
  return (F(x) * G(y) - F(y) * G(x)) / (x - y);
}

double eval_limit_kernel(const LimitKernel& k, double x, double y) { return k.eval(x, y); }

// ------------------------------------------------------------------ VFunction

VFunction::VFunction(double s) : s_(s), N_(0) {
  if (!(s > -0.5)) throw DomainError("VFunction: s must exceed -1/2");
  log_scale_ = (s + 0.5) * std::log(2.0) + specfun::log_gamma(s + 1.5);
}

VFunction::VFunction(double s, int N) : s_(s), N_(N) {
  if (!(s > -0.5)) throw DomainError("VFunction: s must exceed -1/2");
  if (N < 2) throw DomainError("VFunction: prelimit flavor needs N >= 2");
  basis_ = build_monic_line(HPParam::make(s), N, N - 1);
  log_scale_ = (1.0 + s) * std::log(static_cast<double>(N)) + 0.5 * basis_->log_h[N - 1];
}

double VFunction::eval(double x) const {
  require_nonzero(x, "eval_V");
  if (N_ == 0) {
    const double u = std::abs(x);
    return sgn(x) * std::exp(log_scale_) * specfun::bessel_j(s_ + 0.5, 1.0 / u) / std::sqrt(u);
  }
  std::vector<double> q(N_);
  basis_->eval_weighted_orthonormal(N_ * x, N_, q.data());
  const double sign = (N_ % 2 == 1) ? sgn(x) : 1.0;
  return sign * std::exp(log_scale_) * q[N_ - 1];
}

double VFunction::norm2() const {
  if (N_ == 0)
    return std::exp((2.0 * s_ + 1.0) * std::log(2.0) + 2.0 * specfun::log_gamma(s_ + 0.5)) * (s_ + 0.5);
  return std::exp((1.0 + 2.0 * s_) * std::log(static_cast<double>(N_)) + basis_->log_h[N_ - 1]);
}

double eval_V(const VFunction& v, double x) { return v.eval(x); }

double v_norm2_quadrature(const VFunction& v) {
  if (!v.is_limit()) {
    // x = tan(theta/2) / N on (0, pi); V^2 is even.
    const double N = v.N();
    auto f = [&](double theta) {
      const double x = std::tan(0.5 * theta) / N;
      if (x == 0.0) return 0.0;
      const double c = std::cos(0.5 * theta);
      const double val = v.eval(x);
      return val * val / (2.0 * N * c * c);
    };
    return 2.0 * quad::tanh_sinh(f, 0.0, kPi, 1e-13);
  }
  // Limit flavor: with t = 1/x, V(1/t)^2 / t^2 = C^2 J_{s+1/2}(t)^2 / t.
  auto g = [&](double t) {
    const double val = v.eval(1.0 / t) / t;
    return val * val;
  };
  const double T = 1e4;
  const double head = quad::tanh_sinh(g, 0.0, 1.0, 1e-14);
  const double body = quad::gl_panels(g, 1.0, T, static_cast<int>((T - 1.0) / 2.0), 20);
  const double C = std::exp((v.s() + 0.5) * std::log(2.0) + specfun::log_gamma(v.s() + 1.5));
  const double tail = C * C * quad::bessel_sq_over_t_tail(v.s() + 0.5, T);
  return 2.0 * (head + body + tail);
}

// ------------------------------------------------------------ identity checks

ProjectionReport check_projection(const LimitKernel& k, double x, double y, double R,
                                  const ProjectionQuad& quad) {
  if (!(k.s() >= -0.49)) throw DomainError("check_projection: s must be >= -0.49");
  require_nonzero(x, "check_projection");
  require_nonzero(y, "check_projection");
  if (!(R > 1.0)) throw DomainError("check_projection: R must exceed 1");

  const double Fx = k.F(x), Gx = k.G(x), Fy = k.F(y), Gy = k.G(y);
  const double h = k.h_diag();
  auto pi_with = [&](double u, double Fu, double Gu, double v, double Fv, double Gv) {
    if (std::abs(u - v) < h * std::max(std::abs(u), std::abs(v))) return k.diagonal(0.5 * (u + v));
    return (Fu * Gv - Fv * Gu) / (u - v);
  };
  auto integrand = [&](double g) {
    const double Fg = k.F(g), Gg = k.G(g);
    return pi_with(x, Fx, Gx, g, Fg, Gg) * pi_with(g, Fg, Gg, y, Fy, Gy);
  };

  double total = 0.0;
  for (double sign : {1.0, -1.0}) {
    // 1 <= |gamma| <= R in log coordinates.
    total += quad::gl_panels(
        [&](double u) {
          const double g = std::exp(u);
          return g * integrand(sign * g);
        },
        0.0, std::log(R), quad.bulk_panels, quad.order);
    // 1/t_max <= |gamma| <= 1 in t = 1/|gamma|.
    const int tp = std::max(1, static_cast<int>(std::ceil((quad.t_max - 1.0) / quad.t_panel)));
    total += quad::gl_panels([&](double t) { return integrand(sign / t) / (t * t); }, 1.0, quad.t_max,
                             tp, quad.order);
  }
  // |gamma| < 1/t_max: the oscillating factors average to F^2 -> 1/(4 pi), G^2 -> 1/pi.
  total += 2.0 * (Fx * Fy / kPi + Gx * Gy / (4.0 * kPi)) / (x * y * quad.t_max);

  ProjectionReport rep;
  rep.integral = total;
  rep.target = k.eval(x, y);
  rep.residual = std::abs(total - rep.target);
  const double s = k.s();
  rep.tail_estimate = Gx * Gy * std::pow(2.0, -2.0 * s) * std::pow(R, -1.0 - 2.0 * s) /
                      ((1.0 + 2.0 * s) * std::exp(2.0 * specfun::log_gamma(s + 0.5)));
  rep.tail_bound = std::abs(rep.tail_estimate);
  return rep;
}

double check_limit_recurrence(double s, double x, double y) {
  require_nonzero(x, "check_limit_recurrence");
  require_nonzero(y, "check_limit_recurrence");
  const LimitKernel k0(s), k1(s + 1.0);
  const double ss = sgn(x) * sgn(y);
  const double rank_one = ss * (s + 0.5) / std::sqrt(std::abs(x * y)) *
                          specfun::bessel_j(s + 0.5, 1.0 / std::abs(x)) *
                          specfun::bessel_j(s + 0.5, 1.0 / std::abs(y));
  return std::abs(k0.eval(x, y) - ss * k1.eval(x, y) - rank_one);
}

double check_limit_recurrence_fd(double s, double x) {
  require_nonzero(x, "check_limit_recurrence_fd");
  const LimitKernel k0(s), k1(s + 1.0);
  const double J = specfun::bessel_j(s + 0.5, 1.0 / std::abs(x));
  return std::abs(k0.diagonal_fd(x) - k1.diagonal_fd(x) - (s + 0.5) / std::abs(x) * J * J);
}

double check_finite_recurrence(double s, int N, double x, double y) {
  if (N < 2) throw DomainError("check_finite_recurrence: N must be >= 2");
  require_nonzero(x, "check_finite_recurrence");
  require_nonzero(y, "check_finite_recurrence");
  const FiniteKernel kN(HPParam::make(s), N);
  const FiniteKernel kM(HPParam::make(s + 1.0), N - 1);
  const double ss = sgn(x) * sgn(y);
  const double lhs = std::pow(ss, N) * kN.eval(x, y);
  const double r = static_cast<double>(N) / (N - 1);
  const double shifted = std::pow(ss, N - 1) * kM.eval(r * x, r * y);
  const VFunction V(s, N);
  const double rhs = ss * r * shifted + V.eval(x) * V.eval(y) / V.norm2();
  return std::abs(lhs - rhs);
}

ConvergenceProfile convergence_profile(double s, const std::vector<int>& N_list,
                                       const std::vector<double>& grid) {
  const LimitKernel lim(s);
  const std::size_t G = grid.size();
  std::vector<double> pi_vals(G * G);
  for (std::size_t i = 0; i < G; ++i)
    for (std::size_t j = 0; j < G; ++j) pi_vals[i * G + j] = lim.eval(grid[i], grid[j]);

  ConvergenceProfile prof;
  for (int N : N_list) {
    const FiniteKernel kn(HPParam::make(s), N);
    std::vector<std::vector<double>> psi(G);
    for (std::size_t i = 0; i < G; ++i) psi[i] = kn.eigenfunctions(grid[i]);
    double gap = 0.0;
    for (std::size_t i = 0; i < G; ++i) {
      for (std::size_t j = 0; j < G; ++j) {
        double kv = 0.0;
        for (int m = 0; m < N; ++m) kv += psi[i][m] * psi[j][m];
        const double sign = std::pow(sgn(grid[i]) * sgn(grid[j]), N);
        gap = std::max(gap, std::abs(sign * kv - pi_vals[i * G + j]));
      }
    }
    prof.N.push_back(N);
    prof.gap.push_back(gap);
  }
  prof.strictly_decreasing = true;
  prof.monotone_with_slack = true;
  for (std::size_t i = 1; i < prof.gap.size(); ++i) {
    if (!(prof.gap[i] < prof.gap[i - 1])) prof.strictly_decreasing = false;
    if (!(prof.gap[i] <= 1.2 * prof.gap[i - 1])) prof.monotone_with_slack = false;
  }
  return prof;
}

}  // namespace hpk
