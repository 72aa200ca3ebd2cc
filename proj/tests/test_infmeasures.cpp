#include <cmath>
#include <filesystem>
#include <numbers>
#include <cstring>
#include <limits>
#include <algorithm>

#include "doctest.h"
#include "hpk/error.hpp"
#include "hpk/infmeasures.hpp"
#include "hpk/kernels.hpp"
#include "hpk/rng.hpp"

using namespace hpk;
constexpr double kPi = std::numbers::pi;

TEST_CASE("v-basis values, parity and bounded growth") {
  const VBasis vb(HPParam::make(-1.0));
  CHECK(vb.size() == 1);
  CHECK(eval_v_basis(vb, 1, 2.0 / kPi) == doctest::Approx(2.0 / kPi).epsilon(1e-14));
  for (double x : {0.03, 0.5, 4.0}) CHECK(eval_v_basis(vb, 1, -x) == doctest::Approx(eval_v_basis(vb, 1, x)));
  double sup = 0.0;
  for (double x = 10.0; x <= 100.0; x += 0.5) sup = std::max(sup, std::abs(eval_v_basis(vb, 1, x)));
  CHECK(sup == doctest::Approx(1.0).epsilon(2e-3));
  const VBasis vb2(HPParam::make(-2.0));
  CHECK(vb2.size() == 2);
  CHECK(eval_v_basis(vb2, 2, 0.7) == doctest::Approx(0.49 * VFunction(0.0).eval(0.7)));
  CHECK(eval_v_basis(vb2, 2, -0.7) == doctest::Approx(-eval_v_basis(vb2, 2, 0.7)));
  CHECK_THROWS_AS(eval_v_basis(vb, 2, 1.0), DomainError);
  CHECK_THROWS_AS(eval_v_basis(vb, 1, 0.0), DomainError);
}

TEST_CASE("growth certificates") {
  const auto g1 = growth_certificate(VBasis(HPParam::make(-1.0)), 1);
  CHECK(g1.exponent == doctest::Approx(0.0));
  CHECK_FALSE(g1.square_integrable);
  CHECK(g1.fitted_slope == doctest::Approx(1.0).epsilon(0.1));
  const auto g2 = growth_certificate(VBasis(HPParam::make(-0.6)), 1);
  CHECK(g2.exponent == doctest::Approx(-0.4));
  CHECK_FALSE(g2.square_integrable);
  CHECK(std::abs(g2.fitted_slope - 0.2) < 0.1);
  for (int k : {1, 2}) {
    const auto g = growth_certificate(VBasis(HPParam::make(-2.3)), k);
    CHECK(std::abs(g.fitted_slope - g.expected_slope) < 0.1);
  }
  CHECK(exponent_square_integrable(-0.7));
  CHECK_FALSE(exponent_square_integrable(-0.5));
  CHECK_FALSE(exponent_square_integrable(0.3));
}

TEST_CASE("contraction norm") {
  for (auto [sp, sg] : {std::pair{0.5, 1.0}, {0.2, 0.5}, {0.0, 2.0}, {-0.3, 1.0}}) {
    const auto r = contraction_report(sp, sg);
    CHECK(r.norm > 0.0);
    CHECK(r.norm < 1.0);
    CHECK_FALSE(r.warning);
    CHECK(std::abs(r.trace - r.trace_quadrature) < 1e-6);
    CHECK(r.trace <= r.limit_trace * 1.05);
    CHECK(std::is_sorted(r.spectrum.rbegin(), r.spectrum.rend()));
  }
  double prev = 1.0;
  for (double sg : {4.0, 1.0, 0.25, 0.0625}) {
    const double n = contraction_norm(0.5, sg);
    CHECK(n < prev);
    prev = n;
  }
  CHECK_THROWS_AS(contraction_norm(-0.5, 1.0), DomainError);
  CHECK_THROWS_AS(contraction_norm(0.5, 0.0), DomainError);
}

TEST_CASE("damped projection for s = -1") {
  const auto d = damped_projection(HPParam::make(-1.0), 1.0, 20);
  CHECK(d.rank == 21);
  CHECK(d.idempotency_residual < 1e-8);
  CHECK(d.symmetry_residual < 1e-8);
  CHECK(std::abs(d.trace - 21) < 0.05);
  CHECK(d.min_gram_eigenvalue > 0.0);
  for (double t : d.transversality) {
    CHECK(t < 1.0);
    CHECK(t >= 0.0);
  }
  const auto diag = d.diagonal();
  for (double v : diag) CHECK(v >= -1e-12);
  const auto dd = damped_dpp_diagonal(HPParam::make(-1.0), 1.0, 20);
  CHECK(dd.integral == doctest::Approx(21.0).epsilon(0.05 / 21));
  CHECK(dd.x.size() == dd.K.size());
  CHECK_THROWS_AS(damped_projection(HPParam::make(-1.0), 0.0, 20), DomainError);
  CHECK_THROWS_AS(damped_projection(HPParam::make(-1.0), 1.0, 0), DomainError);
}

TEST_CASE("damped projection: degenerate case matches the operator formula") {
  const auto hp = HPParam::make(-0.4);
  const auto d = damped_projection(hp, 0.7, 12);
  CHECK(d.rank == 12);
  const Eigen::MatrixXd F = damped_projection_formula(hp, 0.7, 12);
  CHECK((F - d.P).norm() / d.P.norm() < 1e-8);
  const auto d2 = damped_projection(HPParam::make(-2.0), 1.5, 10);
  CHECK(d2.rank == 12);
  CHECK(d2.idempotency_residual < 1e-8);
}

TEST_CASE("sampling the damped process follows its diagonal") {
  const auto d = damped_projection(HPParam::make(-1.0), 1.0, 8);
  Rng r(44);
  const int draws = 4000;
  // Bins: |x| < 0.5, 0.5 <= |x| < 1.5, beyond.
  double expect[3] = {0, 0, 0};
  const auto diag = d.diagonal();
  auto bin = [](double x) { return std::abs(x) < 0.5 ? 0 : (std::abs(x) < 1.5 ? 1 : 2); };
  for (std::size_t i = 0; i < d.nodes.size(); ++i) expect[bin(d.nodes[i])] += diag[i] * d.weights[i];
  double count[3] = {0, 0, 0};
  for (int t = 0; t < draws; ++t) {
    const auto idx = sample_discrete_projection(d.basis, r);
    CHECK(static_cast<int>(idx.size()) == d.rank);
    for (int i : idx) count[bin(d.nodes[i])] += 1;
  }
  for (int b = 0; b < 3; ++b) CHECK(std::abs(count[b] - draws * expect[b]) <= 3 * std::sqrt(draws * expect[b]));
}

TEST_CASE("S2 functional") {
  const auto e = s2_functional(Configuration{}, 1.0);
  CHECK(e.S2 == 0.0);
  CHECK(e.weight == 1.0);
  const auto r = s2_functional(Configuration::from_points({1.0, -2.0}), 0.5);
  CHECK(r.S2 == 5.0);
  CHECK(r.weight == doctest::Approx(std::exp(-2.5)));
  CHECK(s2_functional(Configuration::from_points({1e3}), 10.0).weight >= 0.0);
  CHECK_THROWS_AS(s2_functional(Configuration{}, -1.0), DomainError);
}

TEST_CASE("matrix export round trip is bit-exact") {
  const auto d = damped_projection(HPParam::make(-1.0), 1.0, 6);
  const auto path = (std::filesystem::temp_directory_path() / "hpk_damped_roundtrip.bin").string();
  export_matrix(path, d.P, damped_header(d));
  nlohmann::json header;
  const Eigen::MatrixXd back = import_matrix(path, &header);
  CHECK(back.rows() == d.P.rows());
  CHECK(back.cols() == d.P.cols());
  CHECK(std::memcmp(back.data(), d.P.data(), sizeof(double) * d.P.size()) == 0);
  CHECK(header.at("rows") == d.P.rows());
  CHECK(header.contains("sigma"));
  Eigen::MatrixXd odd(2, 3);
  odd << 1.0, -0.0, std::numeric_limits<double>::denorm_min(), 1e308, -3.25, std::nextafter(1.0, 2.0);
  export_matrix(path, odd, {{"note", "odd values"}});
  CHECK(std::memcmp(import_matrix(path).data(), odd.data(), sizeof(double) * 6) == 0);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 4);
  CHECK_THROWS_AS(import_matrix(path), Error);
  std::filesystem::remove(path);
}
