#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hpk/error.hpp"
#include "hpk/kernels.hpp"
#include "hpk/parallel.hpp"
#include "hpk/quadrature.hpp"
#include "hpk/sampling.hpp"
#include "hpk/stats.hpp"

using namespace hpk;
constexpr double kPi = std::numbers::pi;

namespace {

// Integral of K(x, x) over theta = 2 atan(N x) in [a, b].
double diag_mass(const FiniteKernel& k, double a, double b) {
  const int N = k.N();
  auto f = [&](double th) {
    const double x = std::tan(0.5 * th) / N;
    if (x == 0.0) return k.diagonal(1e-300 / N);
    return k.diagonal(x) / (2.0 * N * std::pow(std::cos(0.5 * th), 2));
  };
  return quad::tanh_sinh(f, a, b, 1e-12);
}

double cauchy_cdf(double x) { return 0.5 + std::atan(x) / kPi; }

}  // namespace

TEST_CASE("configurations") {
  const auto c = Configuration::from_points({2.0, -1.0, 0.5, 2.0});
  CHECK(c.points == std::vector<double>{-1.0, 0.5, 2.0, 2.0});
  CHECK(c.s2() == doctest::Approx(9.25));
  CHECK_THROWS_AS(Configuration::from_points({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(Configuration::from_points({1.0, std::nan("")}), DomainError);
}

TEST_CASE("sampler config validation and JSON round trip") {
  SamplerConfig cfg;
  cfg.seed = 99;
  cfg.method = SamplerMethod::mcmc;
  cfg.thinning = 7;
  const auto back = SamplerConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.seed == 99);
  CHECK(back.method == SamplerMethod::mcmc);
  SamplerConfig bad;
  bad.grid_points = 10;
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);
  bad = SamplerConfig{};
  bad.thinning = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidSpec);
  auto j = cfg.to_json();
  j["method"] = "gibbs";
  CHECK_THROWS_AS(SamplerConfig::from_json(j), InvalidSpec);
}

TEST_CASE("spectral sampler: cardinality and reproducibility") {
  for (double s : {-0.3, 0.0, 1.0})
    for (int N : {1, 4, 9}) {
      const FiniteKernel k(HPParam::make(s), N);
      SamplerConfig cfg;
      const ProjectionSampler sampler(k, cfg);
      CHECK(sampler.mass_deficit() < 1e-4);
      for (int i = 0; i < 50; ++i) {
        Rng r1 = Rng::stream(5, i), r2 = Rng::stream(5, i);
        const auto a = sampler.draw(r1);
        CHECK(a.size() == static_cast<std::size_t>(N));
        CHECK(std::is_sorted(a.points.begin(), a.points.end()));
        CHECK(a.points == sampler.draw(r2).points);
      }
    }
}

TEST_CASE("spectral sampler: rank-one histogram matches |psi|^2") {
  const FiniteKernel k(HPParam::make(0.5), 1);
  const ProjectionSampler sampler(k, SamplerConfig{});
  const int draws = 100000, bins = 40;
  const auto out = par::sample_batch_serial(sampler, 17, draws);
  std::vector<int> count(bins, 0);
  for (const auto& c : out) {
    const double th = 2 * std::atan(c.points[0]);
    count[std::min(bins - 1, static_cast<int>((th + kPi) / (2 * kPi) * bins))]++;
  }
  double worst = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double p = diag_mass(k, -kPi + 2 * kPi * b / bins, -kPi + 2 * kPi * (b + 1) / bins);
    worst = std::max(worst, std::abs(count[b] - draws * p) / std::sqrt(draws * p * (1 - p) + 1e-300));
  }
  // Simultaneous band for 40 bins.
  CHECK(worst < 3.5);
  std::vector<double> x;
  for (const auto& c : out) x.push_back(c.points[0]);
  const FiniteKernel k0(HPParam::make(0.0), 1);
  const auto out0 = par::sample_batch_serial(ProjectionSampler(k0, SamplerConfig{}), 18, 20000);
  std::vector<double> x0;
  for (const auto& c : out0) x0.push_back(c.points[0]);
  CHECK(stats::ks_one_sample(x0, cauchy_cdf).p_value > 0.01);
}

TEST_CASE("spectral sampler: one-point density at s = 0, N = 4") {
  const int N = 4, draws = 10000, bins = 20;
  const FiniteKernel k(HPParam::make(0.0), N);
  const auto out = par::sample_batch_serial(ProjectionSampler(k, SamplerConfig{}), 23, draws);
  std::vector<int> count(bins, 0);
  for (const auto& c : out)
    for (double x : c.points) count[std::min(bins - 1, static_cast<int>((2 * std::atan(N * x) + kPi) / (2 * kPi) * bins))]++;
  for (int b = 0; b < bins; ++b) {
    const double mean = draws * diag_mass(k, -kPi + 2 * kPi * b / bins, -kPi + 2 * kPi * (b + 1) / bins);
    // Counts of a determinantal process have variance at most their mean.
    CHECK(std::abs(count[b] - mean) <= 3 * std::sqrt(mean));
  }
}

TEST_CASE("spectral sampler: global sign flip symmetry") {
  const FiniteKernel k(HPParam::make(0.7), 5);
  const auto out = par::sample_batch_serial(ProjectionSampler(k, SamplerConfig{}), 31, 4000);
  std::vector<double> mx, mn;
  for (const auto& c : out) {
    mx.push_back(c.points.back());
    mn.push_back(-c.points.front());
  }
  CHECK(stats::ks_two_sample(mx, mn).p_value > 0.01);
}

TEST_CASE("spectral sampler: truncated grid and coarse-grid failure") {
  const FiniteKernel k(HPParam::make(0.0), 3);
  SamplerConfig cfg;
  cfg.R = 20.0;
  const ProjectionSampler sampler(k, cfg);
  Rng r(1);
  for (int i = 0; i < 100; ++i)
    for (double x : sampler.draw(r).points) CHECK(std::abs(x) <= 20.0);
  SamplerConfig coarse;
  coarse.grid_points = 16;
  coarse.max_grid_points = 16;
  const FiniteKernel big(HPParam::make(0.0), 40);
  CHECK_THROWS_AS(ProjectionSampler(big, coarse), GridTooCoarse);
}

TEST_CASE("MCMC sampler") {
  SamplerConfig cfg;
  cfg.method = SamplerMethod::mcmc;
  cfg.seed = 8;
  cfg.thinning = 20;
  const auto res = sample_pseudo_jacobi_mcmc(HPParam::make(0.0), 3, cfg, 3000);
  CHECK(res.states.size() == 3000);
  CHECK(res.acceptance_in_range);
  CHECK(res.warning.empty());
  double pos = 0.0;
  for (const auto& c : res.states) {
    CHECK(c.size() == 3);
    pos += std::count_if(c.points.begin(), c.points.end(), [](double x) { return x > 0; });
  }
  // Quadrature of rho_1 over (0, inf) is N/2 by evenness.
  const FiniteKernel k(HPParam::make(0.0), 3);
  CHECK(diag_mass(k, 0.0, kPi) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(pos / res.states.size() == doctest::Approx(1.5).epsilon(0.05));

  cfg.thinning = 10;
  const auto one = sample_pseudo_jacobi_mcmc(HPParam::make(0.0), 1, cfg, 20000);
  std::vector<double> x;
  for (const auto& c : one.states) x.push_back(c.points[0]);
  CHECK(stats::ks_one_sample(x, cauchy_cdf).p_value > 0.01);
  CHECK_THROWS_AS(sample_pseudo_jacobi_mcmc(HPParam::make(-0.6), 3, cfg, 10), DomainError);
}

TEST_CASE("MCMC agrees with the spectral sampler") {
  SamplerConfig cfg;
  cfg.method = SamplerMethod::mcmc;
  cfg.seed = 4;
  cfg.thinning = 20;
  const auto chain = sample_pseudo_jacobi_mcmc(HPParam::make(0.5), 4, cfg, 3000);
  const FiniteKernel k(HPParam::make(0.5), 4);
  const auto exact = par::sample_batch_serial(ProjectionSampler(k, SamplerConfig{}), 9, 3000);
  std::vector<double> a, b;
  for (const auto& c : chain.states) a.push_back(c.points.back());
  for (const auto& c : exact) b.push_back(c.points.back());
  CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("matrix sampler at s = 0") {
  Rng r(12);
  std::vector<double> one;
  for (int i = 0; i < 20000; ++i) one.push_back(sample_hp_matrix_s0(1, r)(0, 0).real());
  CHECK(stats::ks_one_sample(one, cauchy_cdf).p_value > 0.01);
  const auto X = sample_hp_matrix_s0(12, r);
  CHECK((X - X.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  SamplerConfig cfg;
  cfg.seed = 3;
  CHECK((sample_hp_matrix_s0(6, cfg) - sample_hp_matrix_s0(6, cfg)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(sample_hp_matrix_s0(0, r), DomainError);

  // Law of tr(X)/N against the eigenvalue-level sampler.
  const int N = 8, draws = 3000;
  std::vector<double> mat, eig;
  for (int i = 0; i < draws; ++i) mat.push_back(sample_hp_matrix_s0(N, r).trace().real() / N);
  const FiniteKernel k(HPParam::make(0.0), N);
  for (const auto& c : par::sample_batch_serial(ProjectionSampler(k, SamplerConfig{}), 77, draws)) {
    double t = 0.0;
    for (double x : c.points) t += x;
    eig.push_back(t);
  }
  CHECK(stats::ks_two_sample(mat, eig).p_value > 0.01);
}

TEST_CASE("corner summaries") {
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(3, 3);
  D(0, 0) = 1;
  D(1, 1) = 2;
  D(2, 2) = 3;
  const auto cs = corner_summaries(D, {2});
  CHECK(cs[0].a_plus.size() == 2);
  CHECK(cs[0].a_plus[0] == doctest::Approx(1.0));
  CHECK(cs[0].a_plus[1] == doctest::Approx(0.5));
  CHECK(cs[0].a_minus.empty());
  CHECK(cs[0].c == doctest::Approx(1.5));
  CHECK(cs[0].d == doctest::Approx(1.25));
  const auto z = corner_summaries(Eigen::MatrixXcd::Zero(4, 4), {4});
  CHECK(z[0].a_plus.empty());
  CHECK(z[0].a_minus.empty());
  CHECK(z[0].c == 0.0);
  CHECK(z[0].d == 0.0);
  Rng r(2);
  const auto X = sample_hp_matrix_s0(16, r);
  for (const auto& c : corner_summaries(X, {4, 8, 16})) {
    double sp = 0.0, sm = 0.0, sq = 0.0;
    for (double a : c.a_plus) sp += a, sq += a * a;
    for (double a : c.a_minus) sm += a, sq += a * a;
    CHECK(std::abs(c.c - (sp - sm)) < 1e-10 * std::max(1.0, std::abs(c.c)));
    CHECK(sq == doctest::Approx(c.d).epsilon(1e-10));
    CHECK(std::is_sorted(c.a_plus.rbegin(), c.a_plus.rend()));
  }
  CHECK(corners_interlace(X, {4, 8, 12, 16}));
  CHECK_THROWS_AS(corner_summaries(X, {17}), DomainError);
  CHECK_THROWS_AS(corners_interlace(X, {8, 4}), DomainError);
}

TEST_CASE("discrete projection sampler") {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(6, 2);
  E(0, 0) = 1;
  E(3, 1) = 1;
  Rng r(6);
  CHECK(sample_discrete_projection(E, r) == std::vector<int>{0, 3});
  // Inclusion probabilities equal the diagonal of U U^T.
  const Eigen::MatrixXd U = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(8, 3)).householderQ() *
                            Eigen::MatrixXd::Identity(8, 3);
  std::vector<int> hits(8, 0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const auto idx = sample_discrete_projection(U, r);
    CHECK(idx.size() == 3);
    for (int j : idx) hits[j]++;
  }
  for (int j = 0; j < 8; ++j) {
    const double p = U.row(j).squaredNorm();
    CHECK(std::abs(hits[j] - draws * p) <= 4 * std::sqrt(draws * p * (1 - p)) + 1);
  }
}

TEST_CASE("sample requests, archives and replay") {
  SampleRequest req;
  req.s = 0.0;
  req.N = 4;
  req.draws = 50;
  req.cfg.seed = 7;
  const auto back = SampleRequest::from_json(req.to_json());
  CHECK(back.to_json() == req.to_json());
  const auto run1 = run_sample_request(req, 1);
  const auto run2 = run_sample_request(back, 2);
  CHECK(sample_archive_csv(req, run1) == sample_archive_csv(back, run2));
  const std::string csv = sample_archive_csv(req, run1);
  CHECK(csv.rfind("# runspec: ", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 51);
  CHECK(run1.report.at("method") == "spectral");
  req.cfg.method = SamplerMethod::mcmc;
  req.s = 0.5;
  const auto mc = run_sample_request(req);
  CHECK(mc.report.contains("acceptance_rate"));
  CHECK(mc.configs.size() == 50);
  req.s = -0.7;
  CHECK_THROWS_AS(run_sample_request(req), InvalidSpec);
}
