#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "hpk/error.hpp"
#include "hpk/quadrature.hpp"
#include "hpk/specfun.hpp"
#include "hpk/weights.hpp"

using namespace hpk;
constexpr double kPi = std::numbers::pi;

TEST_CASE("HPParam shift bookkeeping") {
  const auto a = HPParam::make(0.3);
  CHECK(a.n_s == 0);
  CHECK(a.s_prime == 0.3);
  const auto b = HPParam::make(-1.0);
  CHECK(b.n_s == 1);
  CHECK(b.s_prime == doctest::Approx(0.0));
  const auto c = HPParam::make(-0.6);
  CHECK(c.n_s == 1);
  CHECK(c.s_prime == doctest::Approx(0.4));
  const auto d = HPParam::make(-2.0);
  CHECK(d.n_s == 2);
  CHECK(d.N_prime(10) == 8);
  const auto e = HPParam::make(-0.5);
  CHECK(e.n_s == 1);
  CHECK(e.s_prime == doctest::Approx(0.5));
  for (double s = -4.9; s < 2.0; s += 0.1) {
    const auto p = HPParam::make(s);
    CHECK(p.s_prime > -0.5);
    if (s > -0.5) CHECK(p.n_s == 0);
    else CHECK(p.s_prime <= 0.5 + 1e-12);
  }
}

TEST_CASE("line weight: examples and the shift identity") {
  CHECK(eval_line_weight(HPParam::make(0.0), 1, 0.0) == 1.0);
  CHECK(eval_line_weight(HPParam::make(0.0), 1, 1.0) == 0.5);
  for (int i = 0; i < 100; ++i) {
    const double x = -5.0 + 0.1 * i;
    const double w = eval_line_weight(HPParam::make(-1.0), 3, x);
    CHECK(w == eval_line_weight(HPParam::make(0.0), 2, x));
    CHECK(w == eval_line_weight(HPParam::make(1.0), 1, x));
  }
  for (int N = 2; N <= 6; ++N)
    for (int m = 1; m <= std::min(3, N - 1); ++m)
      for (double x : {0.1, 1.7, 40.0})
        CHECK(eval_line_weight(HPParam::make(0.35), N, x) == eval_line_weight(HPParam::make(0.35 + m), N - m, x));
  CHECK(std::exp(log_line_weight(2.5, 1e200)) == 0.0);
  CHECK(log_line_weight(2.5, 1e200) == doctest::Approx(-2.5 * 2 * std::log(1e200)));
}

TEST_CASE("circle weight: examples, kinds and singular angle") {
  CHECK(eval_circle_weight({HPParam::make(0.0), WeightKind::lambda}, 1.2) == 1.0);
  CHECK(eval_circle_weight({HPParam::make(1.0), WeightKind::lambda}, 0.0) == doctest::Approx(4.0));
  CHECK(eval_circle_weight({HPParam::make(0.5), WeightKind::lambda}, kPi / 2) == doctest::Approx(std::sqrt(2.0)));
  for (double t : {-2.0, 0.4, 1.9}) {
    const double lam = eval_circle_weight({HPParam::make(0.7), WeightKind::lambda}, t);
    const double w = eval_circle_weight({HPParam::make(0.7), WeightKind::w}, t);
    CHECK(w == doctest::Approx(std::pow(2.0 - 2.0 * std::cos(t), 0.7)));
    CHECK(lam == doctest::Approx(std::pow(2.0 + 2.0 * std::cos(t), 0.7)));
  }
  CHECK_THROWS_AS(eval_circle_weight({HPParam::make(-0.3), WeightKind::lambda}, kPi), DomainError);
  CHECK_THROWS_AS(eval_circle_weight({HPParam::make(-0.3), WeightKind::w}, 0.0), DomainError);
}

TEST_CASE("circle normalization matches quadrature") {
  for (double s : {-0.3, 0.0, 0.5, 1.0, 2.2}) {
    const CircleWeight w{HPParam::make(s), WeightKind::lambda};
    // lambda(pi - phi) = w(phi) moves the singular point to the origin.
    const CircleWeight shifted{HPParam::make(s), WeightKind::w};
    auto f = [&](double phi) { return eval_circle_weight(shifted, phi); };
    const double integral = 2.0 * quad::tanh_sinh(f, 0.0, kPi, 1e-14);
    CHECK(circle_normalization(w) == doctest::Approx(integral / (2 * kPi)).epsilon(1e-11));
    const double closed = specfun::gamma_fn(2 * s + 1) / std::pow(specfun::gamma_fn(s + 1), 2);
    CHECK(circle_normalization(w) == doctest::Approx(closed).epsilon(1e-13));
  }
}

TEST_CASE("weight ratio bound") {
  CHECK(weight_ratio_bound({0.7, 0.0}, 0.7) == 1.0);
  CHECK(weight_ratio_bound({0.5, 1.0}, 0.5) == doctest::Approx(std::exp(kPi)));
  CHECK(weight_ratio_bound({0.0, 0.1}, 0.0) == doctest::Approx(std::exp(0.1 * kPi)));
  for (auto s : {std::complex<double>(0.5, 1.0), std::complex<double>(0.0, 0.1), std::complex<double>(-0.2, -0.7)}) {
    const double grid = weight_ratio_grid_max(s, s.real());
    CHECK(grid <= weight_ratio_bound(s, s.real()) * (1 + 1e-12));
    CHECK(grid >= 0.99 * weight_ratio_bound(s, s.real()));
  }
  CHECK_THROWS_AS(weight_ratio_bound({-0.5, 1.0}, -0.5), DomainError);
}

TEST_CASE("complex-parameter weight reduces to the real one") {
  for (double t : {-2.5, 0.3, 1.0})
    CHECK(eval_circle_weight_complex({0.8, 0.0}, t) ==
          doctest::Approx(eval_circle_weight({HPParam::make(0.8), WeightKind::lambda}, t)));
}

TEST_CASE("Golinskii envelope examples") {
  for (int n : {1, 5, 40})
    CHECK(golinskii_envelope(HPParam::make(0.5), n, kPi) == doctest::Approx(std::sqrt(n + 1.0)));
  CHECK(golinskii_envelope(HPParam::make(0.0), 7, 0.4) == 1.0);
  CHECK(golinskii_envelope(HPParam::make(1.0), 3, 0.0) == doctest::Approx(4.0 / 9.0));
}
