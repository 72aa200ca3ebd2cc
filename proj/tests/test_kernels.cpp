#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hpk/error.hpp"
#include "hpk/kernels.hpp"
#include "hpk/quadrature.hpp"
#include "hpk/rng.hpp"
#include "hpk/specfun.hpp"

using namespace hpk;
constexpr double kPi = std::numbers::pi;

namespace {

// int f(x) dx over R through theta = 2 atan(N x), with graded panels toward +-pi.
template <class F>
double line_integral(F&& f, int N) {
  // theta in (0, pi/2] directly; theta = pi - phi near pi so the endpoint singularity sits at phi = 0.
  auto inner = [&](double th) { return f(std::tan(0.5 * th) / N) / (2.0 * N * std::pow(std::cos(0.5 * th), 2)); };
  auto outer = [&](double phi) {
    if (std::abs(phi) < 1e-30) return 0.0;  // remaining mass below phi^{1 + 2s} ~ 1e-12
    return f(1.0 / (std::tan(0.5 * phi) * N)) / (2.0 * N * std::pow(std::sin(0.5 * phi), 2));
  };
  double acc = 0.0;
  for (int side : {-1, 1}) {
    acc += quad::tanh_sinh([&](double u) { return inner(side * u); }, 0.0, kPi / 2, 1e-13);
    acc += quad::tanh_sinh([&](double u) { return outer(side * u); }, 0.0, kPi / 2, 1e-13);
  }
  return acc;
}

}  // namespace

TEST_CASE("Cayley correspondence") {
  CHECK(cayley(0.0) == 0.0);
  CHECK(cayley(1.0) == doctest::Approx(kPi / 2));
  CHECK(cayley(-1.0) == doctest::Approx(-kPi / 2));
  for (double x : {-30.0, -0.4, 0.2, 7.0}) {
    const std::complex<double> I(0, 1);
    CHECK(std::abs(std::polar(1.0, cayley(x)) - (I - x) / (I + x)) < 1e-14);
    CHECK(cayley_inverse(cayley(x)) == doctest::Approx(x).epsilon(1e-13));
    const double h = 1e-6;
    CHECK(cayley_jacobian(x) == doctest::Approx((cayley(x + h) - cayley(x - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("Cayley transport of the ensemble density") {
  // Line density times |d x / d theta| over torus density is constant in the configuration.
  Rng rng(5);
  for (double s : {0.0, 0.5, 1.0})
    for (int N = 1; N <= 6; ++N) {
      const auto hp = HPParam::make(s);
      double ref = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(N);
        for (double& v : x) v = std::tan(0.9 * kPi * (rng.uniform() - 0.5));
        double log_line = 0.0, log_torus = 0.0;
        for (int j = 0; j < N; ++j) {
          log_line += std::log(eval_line_weight(hp, N, x[j])) - std::log(cayley_jacobian(x[j]));
          log_torus += std::log(eval_circle_weight({hp, WeightKind::lambda}, cayley(x[j])));
          for (int k = j + 1; k < N; ++k) {
            log_line += 2 * std::log(std::abs(x[j] - x[k]));
            log_torus += 2 * std::log(std::abs(std::polar(1.0, cayley(x[j])) - std::polar(1.0, cayley(x[k]))));
          }
        }
        const double r = log_line - log_torus;
        if (trial == 0) ref = r;
        CHECK(std::abs(std::exp(r - ref) - 1.0) < 1e-10);
      }
    }
}

TEST_CASE("finite kernel: closed form at s = 0, N = 2") {
  // p_0 = 1, p_1 = t, h_0 = h_1 = pi/2, phi = (1+t^2)^{-2}.
  const FiniteKernel k(HPParam::make(0.0), 2);
  auto exact = [](double x, double y) {
    const double tx = 2 * x, ty = 2 * y;
    return 2.0 * (1.0 + tx * ty) / (kPi / 2) / ((1 + tx * tx) * (1 + ty * ty));
  };
  CHECK(k.eval(0.5, 1.0) == doctest::Approx(1.2 / kPi).epsilon(1e-14));
  for (auto [x, y] : {std::pair{0.3, 2.0}, {1.5, 1.5}, {0.7, 4.0}}) CHECK(k.eval(x, y) == doctest::Approx(exact(x, y)).epsilon(1e-13));
}

TEST_CASE("finite kernel: trace, reproducing identity and symmetries") {
  for (double s : {-0.3, 0.0, 0.5, 1.0})
    for (int N : {1, 3, 8}) {
      const FiniteKernel k(HPParam::make(s), N);
      CHECK(line_integral([&](double x) { return k.diagonal(x); }, N) == doctest::Approx(N).epsilon(1e-8));
      for (auto [x, y] : {std::pair{0.4, 1.3}, {-0.2, 0.9}, {2.0, 2.0}}) {
        const double rep = line_integral([&](double g) { return k.eval(x, g) * k.eval(g, y); }, N);
        CHECK(std::abs(rep - k.eval(x, y)) < 1e-8);
        CHECK(k.eval(-x, -y) == doctest::Approx(k.eval(x, y)).epsilon(1e-12));
        CHECK(k.eval(x, y) == doctest::Approx(k.eval(y, x)).epsilon(1e-13));
      }
    }
  const FiniteKernel k(HPParam::make(0.0), 3);
  CHECK_THROWS_AS(k.eval(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(FiniteKernel(HPParam::make(-0.5), 3), DomainError);
}

TEST_CASE("finite kernel: line and circle constructions agree") {
  for (double s : {-0.3, 0.0, 0.5, 1.0})
    for (int N : {2, 5, 12}) {
      const FiniteKernel line(HPParam::make(s), N, KernelSource::line_direct);
      const FiniteKernel circ(HPParam::make(s), N, KernelSource::circle_cayley);
      for (auto [x, y] : {std::pair{0.3, 0.7}, {-1.2, 0.4}, {2.0, 2.0}, {-0.05, 0.2}, {-5.0, 30.0}})
        CHECK(std::abs(line.eval(x, y) - circ.eval(x, y)) <= 1e-9 * std::max(1.0, std::abs(line.eval(x, y))));
    }
}

TEST_CASE("rescaled circle kernel at s = 0") {
  for (int n : {2, 5, 17}) {
    const RescaledCircleKernel k(HPParam::make(0.0), n);
    for (auto [a, b] : {std::pair{0.3, -1.0}, {2.0, 2.5}, {-3.0, 1.0}}) {
      const double closed = std::sin((a - b) / 2) / (2 * kPi * n * std::sin((a - b) / (2 * n)));
      const auto v = eval_phi_n(k, a, b);
      CHECK(std::abs(v - closed) < 1e-12);
    }
  }
  const RescaledCircleKernel k2(HPParam::make(0.0), 2);
  CHECK(eval_phi_n(k2, kPi, 0.0).real() == doctest::Approx(1.0 / (2 * std::sqrt(2.0) * kPi)).epsilon(1e-12));
  CHECK_THROWS_AS(eval_phi_n(k2, 2 * kPi, 0.0), DomainError);
  const RescaledCircleKernel k3(HPParam::make(0.6), 9);
  for (double a = -8.0; a <= 8.0; a += 0.5) {
    const auto d = eval_phi_n(k3, a, a);
    CHECK(std::abs(d.imag()) < 1e-12);
    CHECK(d.real() >= 0.0);
  }
}

TEST_CASE("limit kernel: s = 0 closed forms") {
  const LimitKernel k(0.0);
  CHECK(k.eval(2.0, 2.0) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-10));
  CHECK(k.diagonal(2.0) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-12));
  CHECK(k.eval(1.0, -1.0) == doctest::Approx(-std::sin(2.0) / (2 * kPi)).epsilon(1e-13));
  for (auto [x, y] : {std::pair{0.3, 1.7}, {-2.0, 0.5}})
    CHECK(k.eval(x, y) == doctest::Approx(std::sin(1 / y - 1 / x) / (kPi * (x - y))).epsilon(1e-12));
  for (int i = 0; i < 20; ++i) {
    const double x = 0.1 + 0.25 * i;
    CHECK(std::abs(k.diagonal(x) - 1.0 / (kPi * x * x)) < 1e-10);
  }
}

TEST_CASE("limit kernel: symmetry, evenness and diagonal") {
  for (double s : {-0.3, 0.0, 0.5, 1.3}) {
    const LimitKernel k(s);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) {
        const double x = -3.0 + 6.0 * (i + 0.5) / 50, y = -3.0 + 6.0 * (j + 0.37) / 50;
        CHECK(k.eval(x, y) == k.eval(y, x));
        CHECK(k.eval(-x, -y) == doctest::Approx(k.eval(x, y)).epsilon(1e-12));
      }
    for (double x : {0.05, 0.4, 1.0, 7.0}) {
      CHECK(k.diagonal(x) >= 0.0);
      CHECK(k.diagonal_fd(x) == doctest::Approx(k.diagonal(x)).epsilon(1e-7));
      CHECK(k.eval(x, x * (1 + 1e-7)) == doctest::Approx(k.diagonal(x)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(k.eval(0.0, 1.0), DomainError);
  }
}

TEST_CASE("V-functions") {
  const VFunction v0(0.0);
  CHECK(v0.eval(2.0 / kPi) == doctest::Approx(1.0).epsilon(1e-14));
  for (double x : {-3.0, 0.05, 0.7, 12.0}) {
    CHECK(std::abs(v0.eval(x) - std::sin(1.0 / x)) < 1e-12);
    CHECK(v0.eval(-x) == doctest::Approx(-v0.eval(x)));
  }
  CHECK(VFunction(0.5).norm2() == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(VFunction(0.0).norm2() == doctest::Approx(kPi).epsilon(1e-13));
  for (double s : {0.0, 0.5, 1.0}) {
    const VFunction v(s);
    CHECK(std::abs(v_norm2_quadrature(v) / v.norm2() - 1.0) < 1e-6);
  }
  CHECK_THROWS_AS(v0.eval(0.0), DomainError);
  CHECK_THROWS_AS(VFunction(0.0, 1), DomainError);
}

TEST_CASE("prelimit V-function converges to the limit") {
  for (double s : {0.0, 0.5}) {
    const VFunction lim(s);
    double prev = 1e300;
    for (int N : {8, 32, 128}) {
      const VFunction v(s, N);
      double gap = 0.0;
      for (double x = 0.5; x <= 3.0; x += 0.1) gap = std::max(gap, std::abs(v.eval(x) - lim.eval(x)));
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(prev < 1e-2);
  }
  // The rank-one term integrates to one.
  for (auto [s, N] : {std::pair{0.0, 3}, {0.5, 5}}) {
    const VFunction v(s, N);
    CHECK(v_norm2_quadrature(v) / v.norm2() == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("recurrence identities") {
  CHECK(check_limit_recurrence(0.0, 1.0, 2.0) < 1e-10);
  CHECK(check_limit_recurrence(0.25, -0.5, 0.8) < 1e-10);
  for (double s : {0.0, 0.25, 0.8})
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double x = 0.2 + 2.8 * i / 19, y = 0.2 + 2.8 * j / 19;
        CHECK(check_limit_recurrence(s, x, y) < 1e-10);
      }
  CHECK(check_limit_recurrence_fd(0.3, 1.1) < 1e-8);
  CHECK(check_finite_recurrence(0.0, 3, 0.4, -0.9) < 1e-8);
  CHECK(check_finite_recurrence(0.5, 5, 0.6, 0.6) < 1e-8);
  CHECK_THROWS_AS(check_finite_recurrence(0.5, 1, 0.6, 0.6), DomainError);
}

TEST_CASE("projection identity with truncation") {
  const LimitKernel k0(0.0);
  const auto r50 = check_projection(k0, 1.0, 2.0, 50.0);
  CHECK(r50.residual == doctest::Approx(r50.tail_bound).epsilon(0.2));
  const auto r100 = check_projection(k0, 1.0, 2.0, 100.0);
  CHECK(r100.residual < 1e-3);
  CHECK(r100.residual / r50.residual == doctest::Approx(0.5).epsilon(0.3));
  const LimitKernel kh(0.5);
  CHECK(check_projection(kh, 0.7, 0.7, 100.0).residual < 1e-3);
  const LimitKernel k1(1.0);
  CHECK(check_projection(k1, 1.0, 2.0, 100.0).residual < check_projection(k1, 1.0, 2.0, 50.0).residual);
  CHECK_THROWS_AS(check_projection(LimitKernel(-0.495), 1.0, 2.0, 50.0), DomainError);
}

TEST_CASE("finite-N convergence to the limit kernel") {
  std::vector<double> grid;
  for (int i = 0; i < 26; ++i) grid.push_back(0.5 + 0.1 * i);
  const auto p0 = convergence_profile(0.0, {4, 8, 16, 32}, grid);
  CHECK(p0.strictly_decreasing);
  CHECK(p0.gap.back() < 1e-2);
  const auto ph = convergence_profile(0.5, {4, 8, 16, 32}, grid);
  CHECK(ph.monotone_with_slack);
  CHECK(ph.gap.back() < ph.gap.front());
  std::vector<double> inner;
  for (int i = 0; i <= 10; ++i) inner.push_back(1.0 + 0.1 * i);
  CHECK(convergence_profile(0.0, {32}, inner).gap[0] < 1e-2);
}
