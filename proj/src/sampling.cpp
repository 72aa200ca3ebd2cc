#include "hpk/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hpk/error.hpp"
#include "hpk/parallel.hpp"
#include "hpk/report.hpp"

namespace hpk {

namespace {
constexpr double kPi = std::numbers::pi;
}

Configuration Configuration::from_points(std::vector<double> pts) {
  for (double x : pts)
    if (x == 0.0 || !std::isfinite(x)) throw DomainError("Configuration: points must be nonzero and finite");
  std::sort(pts.begin(), pts.end());
  return Configuration{std::move(pts)};
}

double Configuration::s2() const {
  double acc = 0.0;
  for (double x : points) acc += x * x;
  return acc;
}

// ---------------------------------------------------------------- config

void SamplerConfig::validate() const {
  if (grid_points < 16 || grid_points % 2 != 0) throw InvalidSpec("grid_points must be even and >= 16");
  if (max_grid_points < grid_points) throw InvalidSpec("max_grid_points must be >= grid_points");
  if (!(R >= 0.0)) throw InvalidSpec("R must be >= 0");
  if (!(mcmc_step > 0.0)) throw InvalidSpec("mcmc step must be positive");
  if (burn_in < 1 || thinning < 1) throw InvalidSpec("burn_in and thinning must be >= 1");
}

nlohmann::json SamplerConfig::to_json() const {
  return {{"seed", seed},
          {"grid_points", grid_points},
          {"max_grid_points", max_grid_points},
          {"R", R},
          {"method", method == SamplerMethod::spectral_dpp ? "spectral" : "mcmc"},
          {"mcmc_step", mcmc_step},
          {"burn_in", burn_in},
          {"thinning", thinning}};
}

SamplerConfig SamplerConfig::from_json(const nlohmann::json& j) {
  SamplerConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.grid_points = j.at("grid_points").get<int>();
  c.max_grid_points = j.at("max_grid_points").get<int>();
  c.R = j.at("R").get<double>();
  const auto m = j.at("method").get<std::string>();
  if (m == "spectral") c.method = SamplerMethod::spectral_dpp;
  else if (m == "mcmc") c.method = SamplerMethod::mcmc;
  else throw InvalidSpec("unknown sampler method " + m);
  c.mcmc_step = j.at("mcmc_step").get<double>();
  c.burn_in = j.at("burn_in").get<int>();
  c.thinning = j.at("thinning").get<int>();
  c.validate();
  return c;
}

// ---------------------------------------------------------- spectral sampler

ProjectionSampler::ProjectionSampler(const FiniteKernel& kernel, const SamplerConfig& cfg)
    : kernel_(kernel), N_(kernel.N()) {
  cfg.validate();
  const double s = kernel.param().s;
  power_ = std::max(3.0, 2.0 / (1.0 + 2.0 * s));
  theta_max_ = (cfg.R > 0.0) ? 2.0 * std::atan(N_ * cfg.R) : kPi;
  int G = cfg.grid_points;
  for (;;) {
    build(G);
    if (deficit_ < 1e-4 || 2 * G > cfg.max_grid_points) break;
    G *= 2;
  }
  if (deficit_ >= 0.01)
    throw GridTooCoarse("projection sampler: grid mass deficit " + std::to_string(deficit_));
}

double ProjectionSampler::x_of_v(double v) const {
  const double w = std::pow(1.0 - std::abs(v), power_);
  const double sg = v > 0 ? 1.0 : -1.0;
  if (theta_max_ == kPi) return sg / (std::tan(0.5 * kPi * w) * N_);
  return sg * std::tan(0.5 * theta_max_ * (1.0 - w)) / N_;
}

double ProjectionSampler::dxdv(double v) const {
  const double x = x_of_v(v);
  const double t = N_ * x;
  return (1.0 + t * t) / (2.0 * N_) * theta_max_ * power_ * std::pow(1.0 - std::abs(v), power_ - 1.0);
}

void ProjectionSampler::build(int G) {
  G_ = G;
  const double dv = 2.0 / G;
  psi_.resize(G, N_);
  diag0_.resize(G);
  std::vector<double> row(N_);
  double mass = 0.0;
  for (int i = 0; i < G; ++i) {
    const double v = -1.0 + (i + 0.5) * dv;
    kernel_.eigenfunctions(x_of_v(v), row.data());
    const double jac = std::sqrt(dxdv(v));
    double d = 0.0;
    for (int k = 0; k < N_; ++k) {
      psi_(i, k) = row[k] * jac;
      d += psi_(i, k) * psi_(i, k);
    }
    diag0_(i) = d;
    mass += d * dv;
  }
  if (theta_max_ == kPi) {
    deficit_ = std::abs(N_ - mass);
    return;
  }
  // Truncated grid: the exact mass is unknown, so use the midpoint-rule error
  // estimate from a half-resolution pass.
  double coarse = 0.0;
  for (int i = 0; i < G / 2; ++i) {
    const double v = -1.0 + (i + 0.5) * 2.0 * dv;
    kernel_.eigenfunctions(x_of_v(v), row.data());
    double d = 0.0;
    for (double r : row) d += r * r;
    coarse += d * dxdv(v) * 2.0 * dv;
  }
  deficit_ = std::abs(mass - coarse) / 3.0;
}

Configuration ProjectionSampler::draw(Rng& rng) const {
  const double dv = 2.0 / G_;
  Eigen::VectorXd d = diag0_;
  std::vector<Eigen::VectorXd> basis;
  std::vector<double> pts;
  std::vector<double> cum(G_);
  std::vector<double> row(N_);
  for (int j = 0; j < N_; ++j) {
    double total = 0.0;
    for (int i = 0; i < G_; ++i) {
      total += std::max(0.0, d(i));
      cum[i] = total;
    }
    const double u = rng.uniform() * total;
    int cell = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    cell = std::min(cell, G_ - 1);
    const double v = -1.0 + (cell + rng.uniform()) * dv;
    const double x = x_of_v(v);
    kernel_.eigenfunctions(x, row.data());

    Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(row.data(), N_);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : basis) w -= w.dot(e) * e;
    double nrm = w.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
      // Degenerate direction: fall back to the grid row of the chosen cell.
      w = psi_.row(cell).transpose();
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& e : basis) w -= w.dot(e) * e;
      nrm = w.norm();
      if (!(nrm > 0.0)) throw NonConvergence("projection sampler: residual direction vanished");
    }
    w /= nrm;
    const Eigen::VectorXd proj = psi_ * w;
    d -= proj.cwiseProduct(proj);
    basis.push_back(std::move(w));
    pts.push_back(x);
  }
  return Configuration::from_points(std::move(pts));
}

Configuration sample_projection_dpp(const FiniteKernel& kernel, const SamplerConfig& cfg) {
  const ProjectionSampler sampler(kernel, cfg);
  Rng rng(cfg.seed);
  return sampler.draw(rng);
}

std::vector<int> sample_discrete_projection(const Eigen::MatrixXd& U, Rng& rng) {
  const int n = static_cast<int>(U.rows());
  const int r = static_cast<int>(U.cols());
  Eigen::VectorXd d = U.rowwise().squaredNorm();
  std::vector<Eigen::VectorXd> basis;
  std::vector<int> picked;
  std::vector<double> cum(n);
  for (int j = 0; j < r; ++j) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += std::max(0.0, d(i));
      cum[i] = total;
    }
    const double u = rng.uniform() * total;
    int idx = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    idx = std::min(idx, n - 1);
    Eigen::VectorXd w = U.row(idx).transpose();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : basis) w -= w.dot(e) * e;
    const double nrm = w.norm();
    if (!(nrm > 1e-300)) throw NonConvergence("discrete projection sampler: residual vanished");
    w /= nrm;
    const Eigen::VectorXd proj = U * w;
    d -= proj.cwiseProduct(proj);
    d(idx) = 0.0;
    basis.push_back(std::move(w));
    picked.push_back(idx);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

// ------------------------------------------------------------------- MCMC

McmcResult sample_pseudo_jacobi_mcmc(const HPParam& param, int N, const SamplerConfig& cfg,
                                     int count) {
  cfg.validate();
  if (!(param.s > -0.5)) throw DomainError("mcmc: s must exceed -1/2");
  if (N < 1 || count < 1) throw DomainError("mcmc: N and count must be >= 1");
  Rng rng(cfg.seed);
  const double half_pi = 0.5 * kPi;
  std::vector<double> u(N);
  for (int j = 0; j < N; ++j) u[j] = -half_pi + kPi * (j + 0.5) / N;

  // With x = tan u: |x_j - x_k| = |sin(u_j - u_k)| / (cos u_j cos u_k),
  // (1 + x^2)^{-s-N} = cos^{2s+2N} u and dx = du / cos^2 u, so the cos powers
  // collapse to cos^{2s} u per site.
  auto site_logp = [&](int j, double uj) {
    double acc = 2.0 * param.s * std::log(std::cos(uj));
    for (int k = 0; k < N; ++k)
      if (k != j) acc += 2.0 * std::log(std::abs(std::sin(uj - u[k])));
    return acc;
  };

  double log_step = std::log(cfg.mcmc_step);
  long long accepted = 0, proposed = 0;
  McmcResult res;
  auto sweep = [&](bool adapt, int sweep_index) {
    int acc_sweep = 0;
    for (int j = 0; j < N; ++j) {
      const double prop = u[j] + std::exp(log_step) * rng.normal();
      const double r = rng.uniform();
      if (std::abs(prop) >= half_pi) continue;
      const double delta = site_logp(j, prop) - site_logp(j, u[j]);
      if (std::log(r) < delta) {
        u[j] = prop;
        ++acc_sweep;
      }
    }
    if (adapt) {
      const double rate = static_cast<double>(acc_sweep) / N;
      log_step += (rate - 0.3) / std::sqrt(1.0 + sweep_index / 10.0);
      log_step = std::clamp(log_step, std::log(1e-4), std::log(10.0));
    } else {
      accepted += acc_sweep;
      proposed += N;
    }
  };
  for (int b = 0; b < cfg.burn_in; ++b) sweep(true, b);
  res.states.reserve(count);
  for (int c = 0; c < count; ++c) {
    for (int t = 0; t < cfg.thinning; ++t) sweep(false, 0);
    std::vector<double> pts(N);
    for (int j = 0; j < N; ++j) pts[j] = std::tan(u[j]) / N;
    res.states.push_back(Configuration::from_points(std::move(pts)));
  }
  res.step = std::exp(log_step);
  res.acceptance = proposed ? static_cast<double>(accepted) / proposed : 0.0;
  res.acceptance_in_range = res.acceptance >= 0.1 && res.acceptance <= 0.6;
  if (!res.acceptance_in_range)
    res.warning = "NonConvergence: acceptance rate " + std::to_string(res.acceptance) + " outside [0.1, 0.6]";
  return res;
}

// --------------------------------------------------------- matrix sampler

Eigen::MatrixXcd sample_hp_matrix_s0(int M, Rng& rng) {
  if (M < 1) throw DomainError("sample_hp_matrix_s0: M must be >= 1");
  const double r2 = 1.0 / std::sqrt(2.0);
  for (int attempt = 0; attempt < 16; ++attempt) {
    Eigen::MatrixXcd Z(M, M);
    for (int j = 0; j < M; ++j)
      for (int i = 0; i < M; ++i) Z(i, j) = {r2 * rng.normal(), r2 * rng.normal()};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
    Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(M, M);
    const Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < M; ++j) {
      const std::complex<double> r = R(j, j);
      const double a = std::abs(r);
      Q.col(j) *= (a > 0.0) ? r / a : std::complex<double>(1.0);
    }
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(M, M);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(I - Q);
    if (!(lu.rcond() > 1e-12)) continue;
    const std::complex<double> i_unit(0.0, 1.0);
    // (1 + U) and (1 - U)^{-1} commute, so either order gives X.
    Eigen::MatrixXcd X = i_unit * lu.solve(I + Q);
    X = 0.5 * (X + X.adjoint()).eval();
    return X;
  }
  throw SingularCayley("sample_hp_matrix_s0: 1 - U repeatedly near singular");
}

Eigen::MatrixXcd sample_hp_matrix_s0(int M, const SamplerConfig& cfg) {
  Rng rng(cfg.seed);
  return sample_hp_matrix_s0(M, rng);
}

// -------------------------------------------------------- corner summaries

namespace {
Eigen::VectorXd corner_eigenvalues(const Eigen::MatrixXcd& X, int N) {
  const Eigen::MatrixXcd C = X.topLeftCorner(N, N);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigenFailure("corner eigensolver failed for N=" + std::to_string(N));
  return es.eigenvalues();  // ascending
}
}  // namespace

std::vector<CornerSummary> corner_summaries(const Eigen::MatrixXcd& X, const std::vector<int>& N_list) {
  std::vector<CornerSummary> out;
  for (int N : N_list) {
    if (N < 1 || N > X.rows()) throw DomainError("corner_summaries: N exceeds the matrix dimension");
    const Eigen::VectorXd ev = corner_eigenvalues(X, N);
    CornerSummary cs;
    cs.N = N;
    const Eigen::MatrixXcd C = X.topLeftCorner(N, N);
    cs.c = C.trace().real() / N;
    cs.d = C.squaredNorm() / (static_cast<double>(N) * N);
    for (int i = 0; i < N; ++i) {
      const double a = ev(i) / N;
      cs.scaled_eigenvalues.push_back(a);
      if (a > 0) cs.a_plus.push_back(a);
      else if (a < 0) cs.a_minus.push_back(-a);
    }
    std::sort(cs.a_plus.rbegin(), cs.a_plus.rend());
    std::sort(cs.a_minus.rbegin(), cs.a_minus.rend());
    out.push_back(std::move(cs));
  }
  return out;
}

bool corners_interlace(const Eigen::MatrixXcd& X, const std::vector<int>& N_list, double tol) {
  for (std::size_t t = 1; t < N_list.size(); ++t) {
    const int n = N_list[t - 1], m = N_list[t];
    if (!(n < m)) throw DomainError("corners_interlace: N_list must be increasing");
    const Eigen::VectorXd a = corner_eigenvalues(X, n), b = corner_eigenvalues(X, m);
    const double scale = tol * std::max(1.0, b.cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k)
      if (a(k) < b(k) - scale || a(k) > b(k + m - n) + scale) return false;
  }
  return true;
}

// -------------------------------------------------------------- archives

nlohmann::json SampleRequest::to_json() const {
  return {{"s", s}, {"N", N}, {"draws", draws}, {"sampler", cfg.to_json()}};
}

SampleRequest SampleRequest::from_json(const nlohmann::json& j) {
  SampleRequest r;
  r.s = j.at("s").get<double>();
  r.N = j.at("N").get<int>();
  r.draws = j.at("draws").get<int>();
  r.cfg = SamplerConfig::from_json(j.at("sampler"));
  return r;
}

SampleRun run_sample_request(const SampleRequest& req, int jobs) {
  req.cfg.validate();
  if (req.N < 1 || req.draws < 1) throw InvalidSpec("N and draws must be >= 1");
  if (!(req.s > -0.5)) throw InvalidSpec("sampling needs s > -1/2");
  SampleRun run;
  const HPParam p = HPParam::make(req.s);
  if (req.cfg.method == SamplerMethod::spectral_dpp) {
    const FiniteKernel k(p, req.N);
    const ProjectionSampler sampler(k, req.cfg);
    run.configs = par::sample_batch_parallel(sampler, req.cfg.seed, req.draws, jobs);
    run.report = {{"method", "spectral"}, {"grid_points", sampler.grid_points()},
                  {"mass_deficit", sampler.mass_deficit()}};
  } else {
    auto res = sample_pseudo_jacobi_mcmc(p, req.N, req.cfg, req.draws);
    run.configs = std::move(res.states);
    run.report = {{"method", "mcmc"}, {"acceptance_rate", res.acceptance}, {"step", res.step},
                  {"acceptance_in_range", res.acceptance_in_range}, {"warning", res.warning}};
  }
  return run;
}

std::string sample_archive_csv(const SampleRequest& req, const SampleRun& run) {
  std::ostringstream os;
  os << "# runspec: " << req.to_json().dump() << "\n";
  for (const auto& c : run.configs) {
    for (std::size_t i = 0; i < c.points.size(); ++i) os << (i ? "," : "") << report::fmt(c.points[i]);
    os << "\n";
  }
  return os.str();
}

}  // namespace hpk
