#include "hpk/ergodics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hpk/error.hpp"
#include "hpk/kernels.hpp"
#include "hpk/opuc.hpp"
#include "hpk/parallel.hpp"
#include "hpk/quadrature.hpp"
#include "hpk/report.hpp"
#include "hpk/stats.hpp"

namespace hpk {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kOrder = 20;

void require_probability_regime(const HPParam& p, int N, const char* who) {
  if (!(p.s > -0.5)) throw DomainError(std::string(who) + ": s must exceed -1/2");
  if (N < 1) throw DomainError(std::string(who) + ": N must be >= 1");
}

// GL panels in theta on [0, theta_max]; the diagonal oscillates on the scale pi/N.
int theta_panels(int N, double theta_max) {
  return std::max(4, static_cast<int>(std::ceil(2.0 * theta_max * N / kPi)) + 2);
}
}  // namespace

// ---------------------------------------------------------------- Omega

void OmegaPoint::validate() const {
  auto check = [](const std::vector<double>& a, const char* name) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!(a[i] >= 0.0) || !std::isfinite(a[i]))
        throw DomainError(std::string("OmegaPoint: ") + name + " entries must be nonnegative");
      if (i > 0 && a[i] > a[i - 1])
        throw DomainError(std::string("OmegaPoint: ") + name + " must be weakly decreasing");
    }
  };
  check(alpha_plus, "alpha_plus");
  check(alpha_minus, "alpha_minus");
  if (!std::isfinite(gamma1)) throw DomainError("OmegaPoint: gamma1 must be finite");
  if (gamma2() < -1e-12 * std::max(1.0, delta)) throw DomainError("OmegaPoint: delta < sum alpha^2");
}

double OmegaPoint::gamma2() const {
  double g = delta;
  for (double a : alpha_plus) g -= a * a;
  for (double a : alpha_minus) g -= a * a;
  return g;
}

std::vector<double> OmegaPoint::points() const {
  std::vector<double> x;
  for (double a : alpha_plus)
    if (a != 0.0) x.push_back(a);
  for (double a : alpha_minus)
    if (a != 0.0) x.push_back(-a);
  return x;
}

std::complex<double> char_function(const OmegaPoint& omega, const std::vector<double>& r) {
  omega.validate();
  const double g2 = std::max(0.0, omega.gamma2());
  const std::vector<double> xs = omega.points();
  const std::complex<double> I(0.0, 1.0);
  std::complex<double> out = 1.0;
  for (double rj : r) {
    std::complex<double> f = std::exp(I * omega.gamma1 * rj - g2 * rj * rj);
    for (double x : xs) {
      const std::complex<double> den = 1.0 - I * x * rj;
      if (den == 0.0) throw PoleError("char_function: 1 - i x r = 0");
      f *= std::exp(-I * x * rj) / den;
    }
    out *= f;
  }
  return out;
}

double tent(int n, double x) {
  if (n < 1) throw DomainError("tent: n must be >= 1");
  const double a = std::abs(x);
  const double n2 = static_cast<double>(n) * n;
  if (a * n2 >= 1.0) return 1.0;
  if (2.0 * a * n2 <= 1.0) return 0.0;
  return 2.0 * n2 * a - 1.0;
}

BalanceReport principal_value_sums(const Configuration& config, int n_max) {
  if (n_max < 1) throw DomainError("principal_value_sums: n_max must be >= 1");
  std::vector<double> by_mag = config.points;
  std::stable_sort(by_mag.begin(), by_mag.end(),
                   [](double a, double b) { return std::abs(a) > std::abs(b); });
  const std::size_t m = by_mag.size();
  // prefix[k] = sum of the k largest-magnitude points; every cutoff sum is a prefix.
  std::vector<double> prefix(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) prefix[k + 1] = prefix[k] + by_mag[k];

  BalanceReport rep;
  rep.n_max = n_max;
  rep.full_sum = prefix[m];
  const double min_abs = m ? std::abs(by_mag.back()) : 0.0;
  auto count_above = [&](double thr) {  // number of points with |x| > thr
    return static_cast<std::size_t>(
        std::partition_point(by_mag.begin(), by_mag.end(), [&](double v) { return std::abs(v) > thr; }) -
        by_mag.begin());
  };
  rep.hard.reserve(n_max);
  rep.tented.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const double n2 = static_cast<double>(n) * n;
    const std::size_t k_hard = count_above(1.0 / n2);
    const std::size_t k_ramp = count_above(0.5 / n2);
    rep.hard.push_back(prefix[k_hard]);
    double t = prefix[k_hard];
    bool empty = true;
    for (std::size_t k = k_hard; k < k_ramp; ++k) {
      t += by_mag[k] * tent(n, by_mag[k]);
      empty = false;
    }
    // A point sitting exactly on |x| = 1/n^2 has phi_n = 1 but fails the strict cutoff.
    if (k_hard < m && std::abs(by_mag[k_hard]) * n2 == 1.0) empty = false;
    rep.tented.push_back(t);
    rep.ramp_empty.push_back(empty);
    if (rep.stable_from == 0 && m > 0 && min_abs * n2 > 1.0) rep.stable_from = n;
    if (n > 1) {
      rep.hard_diff.push_back(std::abs(rep.hard[n - 1] - rep.hard[n - 2]));
      rep.tent_diff.push_back(std::abs(rep.tented[n - 1] - rep.tented[n - 2]));
    }
  }
  if (m == 0) rep.stable_from = 1;
  return rep;
}

// ------------------------------------------------------------ moments

double rho1_second_moment(const HPParam& param, int N, double eps) {
  require_probability_regime(param, N, "rho1_second_moment");
  if (!(eps > 0.0)) throw DomainError("rho1_second_moment: eps must be positive");
  const FiniteKernel k(param, N);
  const double th = 2.0 * std::atan(N * eps);
  // x = tan(theta/2)/N on [0, th], doubled by evenness.
  auto f = [&](double theta) {
    const double t = std::tan(0.5 * theta);
    const double x = t / N;
    return x * x * k.diagonal(x) * (1.0 + t * t) / (2.0 * N);
  };
  return 2.0 * quad::gl_panels(f, 0.0, th, theta_panels(N, th), kOrder);
}

double circle_moment_JN(const HPParam& param, int N, double eps) {
  require_probability_regime(param, N, "circle_moment_JN");
  if (!(eps > 0.0)) throw DomainError("circle_moment_JN: eps must be positive");
  const auto basis = build_opuc(CircleWeight{param, WeightKind::lambda}, N);
  const double th = 2.0 * std::atan(N * eps);
  auto f = [&](double theta) {
    const double t = std::tan(0.5 * theta);
    return t * t * cd_sum_circle(*basis, N, theta, theta).real() / (2.0 * kPi);
  };
  return 2.0 * quad::gl_panels(f, 0.0, th, theta_panels(N, th), kOrder) / (static_cast<double>(N) * N);
}

double tail_mass(const HPParam& param, int N, double R) {
  require_probability_regime(param, N, "tail_mass");
  if (!(R > 0.0)) throw DomainError("tail_mass: R must be positive");
  const auto basis = build_opuc(CircleWeight{param, WeightKind::lambda}, N);
  // phi = pi - theta; the normalized weight is (2 sin(phi/2))^{2s} / c_0, which is
  // evaluated from phi so the endpoint singularity at phi = 0 stays resolved.
  const double phi_max = kPi - 2.0 * std::atan(N * R);
  const double s = param.s;
  const double c0 = basis->normalization;
  auto density = [&](double phi) {
    const std::complex<double> z = std::polar(1.0, kPi - phi);
    double acc = 0.0;
    for (int k = 0; k < N; ++k) acc += std::norm(basis->eval(k, z));
    const double w = std::exp(2.0 * s * std::log(2.0 * std::sin(0.5 * phi))) / c0;
    return acc * w / (2.0 * kPi);
  };
  const int panels = theta_panels(N, phi_max);
  const double h = phi_max / panels;
  double total = quad::tanh_sinh(density, 0.0, h, 1e-13);
  total += quad::gl_panels(density, h, phi_max, panels - 1, kOrder);
  return 2.0 * total;
}

double limit_tail_mass(double s, double R) {
  if (!(s > -0.5)) throw DomainError("limit_tail_mass: s must exceed -1/2");
  if (!(R > 0.0)) throw DomainError("limit_tail_mass: R must be positive");
  const LimitKernel k(s);
  // t = 1/x; Pi(1/t, 1/t)/t^2 ~ c t^{2s} as t -> 0, whose [0, t0] piece is added in closed form.
  auto g = [&](double t) { return k.diagonal(1.0 / t) / (t * t); };
  const double t_hi = 1.0 / R;
  const double t0 = std::min(1e-6, 0.5 * t_hi);
  const double c = g(t0) / std::pow(t0, 2.0 * s);
  const double head = c * std::pow(t0, 2.0 * s + 1.0) / (2.0 * s + 1.0);
  return 2.0 * (head + quad::adaptive(g, t0, t_hi, 1e-11));
}

// ----------------------------------------------------------- variance

VarianceCheck variance_bound_check(const HPParam& param, int N, double eps) {
  require_probability_regime(param, N, "variance_bound_check");
  if (!(eps > 0.0)) throw DomainError("variance_bound_check: eps must be positive");
  const FiniteKernel k(param, N);
  const double th = 2.0 * std::atan(N * eps);
  std::vector<double> nodes, wts;
  const int panels = theta_panels(N, th);
  quad::append_gl_panels(-th, 0.0, panels, kOrder, nodes, wts);
  quad::append_gl_panels(0.0, th, panels, kOrder, nodes, wts);
  const int Q = static_cast<int>(nodes.size());
  Eigen::MatrixXd psi(Q, N);
  Eigen::VectorXd xw(Q), x(Q), w(Q);
  std::vector<double> row(N);
  for (int i = 0; i < Q; ++i) {
    const double t = std::tan(0.5 * nodes[i]);
    x(i) = t / N;
    w(i) = wts[i] * (1.0 + t * t) / (2.0 * N);
    k.eigenfunctions(x(i), row.data());
    for (int j = 0; j < N; ++j) psi(i, j) = row[j];
    xw(i) = x(i) * w(i);
  }
  const Eigen::VectorXd diag = psi.rowwise().squaredNorm();
  VarianceCheck out;
  out.A = (xw.array() * x.array() * diag.array()).sum();
  out.T2 = xw.dot(diag);
  // sum_ij xw_i xw_j K_ij^2 = || Psi^T diag(xw) Psi ||_F^2.
  const Eigen::MatrixXd B = psi.transpose() * xw.asDiagonal() * psi;
  out.T3 = B.squaredNorm();
  out.T = out.A - out.T3;
  out.bound = 2.0 * out.A;
  out.holds = out.T >= -1e-14 && out.T <= out.bound && std::abs(out.T2) < 1e-10;
  return out;
}

MonteCarloEstimate variance_monte_carlo(const HPParam& param, int N, double eps, int draws,
                                        std::uint64_t seed, int jobs) {
  require_probability_regime(param, N, "variance_monte_carlo");
  if (draws < 2) throw DomainError("variance_monte_carlo: need at least two draws");
  const FiniteKernel k(param, N);
  SamplerConfig cfg;
  cfg.seed = seed;
  const ProjectionSampler sampler(k, cfg);
  const auto configs = par::sample_batch_parallel(sampler, seed, draws, jobs);
  std::vector<double> vals;
  vals.reserve(draws);
  for (const auto& c : configs) {
    double acc = 0.0;
    for (double v : c.points)
      if (std::abs(v) <= eps) acc += v;
    vals.push_back(acc * acc);
  }
  const auto sm = stats::summarize(vals);
  return {sm.mean, sm.sem, draws};
}

// ------------------------------------------------------------- gamma1

double truncated_sum(const std::vector<double>& points, int n, double R) {
  const double lo = 1.0 / (static_cast<double>(n) * n);
  double acc = 0.0;
  for (double x : points) {
    const double a = std::abs(x);
    if (a > lo && (R <= 0.0 || a < R)) acc += x;
  }
  return acc;
}

void Gamma1Params::validate() const {
  if (M < 1) throw InvalidSpec("gamma1: M must be >= 1");
  if (N_list.empty() || N_list.size() != n_list.size())
    throw InvalidSpec("gamma1: N_list and n_list must be nonempty and of equal length");
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    if (N_list[i] < 1 || N_list[i] > M) throw InvalidSpec("gamma1: each N must lie in [1, M]");
    if (i > 0 && N_list[i] <= N_list[i - 1]) throw InvalidSpec("gamma1: N_list must be increasing");
    if (n_list[i] < 1) throw InvalidSpec("gamma1: n must be >= 1");
  }
  if (draws < 1) throw InvalidSpec("gamma1: draws must be >= 1");
  if (!(R >= 0.0)) throw InvalidSpec("gamma1: R must be >= 0");
}

nlohmann::json Gamma1Params::to_json() const {
  return {{"s", 0.0}, {"M", M}, {"N_list", N_list}, {"n_list", n_list},
          {"draws", draws}, {"R", R}, {"seed", seed}};
}

nlohmann::json gamma1_balance_experiment(const Gamma1Params& p) {
  p.validate();
  const std::size_t L = p.N_list.size();
  std::vector<std::vector<double>> gaps(L, std::vector<double>(p.draws));
  std::vector<int> stable_ok(p.draws, 1);
  constexpr int kNCap = 2'000'000;
  par::for_each_index(static_cast<std::size_t>(p.draws), p.jobs, [&](std::size_t d) {
    Rng rng = Rng::stream(p.seed, d);
    const Eigen::MatrixXcd X = sample_hp_matrix_s0(p.M, rng);
    const auto cs = corner_summaries(X, p.N_list);
    for (std::size_t i = 0; i < L; ++i) {
      const auto& pts = cs[i].scaled_eigenvalues;
      gaps[i][d] = std::abs(cs[i].c - truncated_sum(pts, p.n_list[i], p.R));
      // Exact stabilization: once 1/n^2 < min|x| the cutoff sum is the full sum.
      double min_abs = INFINITY;
      double scale = 0.0;
      for (double x : pts) {
        min_abs = std::min(min_abs, std::abs(x));
        scale += std::abs(x);
      }
      const double n_need = std::ceil(1.0 / std::sqrt(min_abs)) + 1.0;
      if (!(n_need < kNCap)) {
        stable_ok[d] = 0;
        continue;
      }
      const int n_max = static_cast<int>(n_need) + 2;
      const auto rep = principal_value_sums(Configuration::from_points(pts), n_max);
      bool ok = rep.stable_from > 0;
      for (int n = std::max(rep.stable_from, 1); ok && n <= n_max; ++n)
        ok = rep.hard[n - 1] == rep.full_sum && rep.tented[n - 1] == rep.full_sum;
      ok = ok && std::abs(rep.full_sum - cs[i].c) <= 1e-10 * std::max(1.0, scale);
      if (!ok) stable_ok[d] = 0;
    }
  });

  std::vector<report::Cell> cells;
  std::vector<double> medians;
  for (std::size_t i = 0; i < L; ++i) {
    report::Cell c;
    c.inputs = {{"N", p.N_list[i]}, {"n", p.n_list[i]}, {"statistic", "median_gap"}};
    c.value = stats::median(gaps[i]);
    c.bound = i ? medians.back() : c.value;
    c.pass = i == 0 || c.value < medians.back();
    c.asserted = false;
    medians.push_back(c.value);
    cells.push_back(c);
  }
  report::Cell trend;
  trend.inputs = {{"statistic", "median_gap_decreasing"}};
  trend.pass = true;
  for (std::size_t i = 1; i < L; ++i) trend.pass = trend.pass && medians[i] < medians[i - 1];
  trend.value = trend.pass ? 1.0 : 0.0;
  trend.bound = 1.0;
  cells.push_back(trend);
  report::Cell stab;
  stab.inputs = {{"statistic", "exact_stabilization"}};
  stab.value = std::accumulate(stable_ok.begin(), stable_ok.end(), 0);
  stab.bound = p.draws;
  stab.pass = stab.value == stab.bound;
  cells.push_back(stab);
  return report::experiment_report("gamma1", p.to_json(), cells);
}

}  // namespace hpk
