#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hpk/error.hpp"
#include "hpk/quadrature.hpp"
#include "hpk/specfun.hpp"

using namespace hpk;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (int order : {4, 16, 20}) {
    const auto& r = quad::gauss_legendre(order);
    CHECK(r.x.size() == static_cast<std::size_t>(order));
    double wsum = 0.0;
    for (double w : r.w) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    const int deg = 2 * order - 2;  // even degree below the exactness limit
    double acc = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * std::pow(r.x[i], deg);
    CHECK(acc == doctest::Approx(2.0 / (deg + 1)).epsilon(1e-13));
  }
}

TEST_CASE("composite rules and node export agree") {
  auto f = [](double x) { return std::exp(-x) * std::cos(3 * x); };
  const double exact = (1.0 - std::exp(-2.0) * (std::cos(6.0) - 3 * std::sin(6.0))) / 10.0;
  CHECK(quad::gl_panels(f, 0.0, 2.0, 8, 16) == doctest::Approx(exact).epsilon(1e-14));
  std::vector<double> x, w;
  quad::append_gl_panels(0.0, 2.0, 8, 16, x, w);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(x[i]);
  CHECK(acc == doctest::Approx(exact).epsilon(1e-14));
  CHECK(quad::adaptive(f, 0.0, 2.0) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("tanh-sinh handles integrable endpoint singularities") {
  CHECK(quad::tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(quad::tanh_sinh([](double x) { return std::log(x); }, 0.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(quad::tanh_sinh([](double x) { return std::pow(x, -0.6); }, 0.0, 1.0) ==
        doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("Bessel-square tail matches direct quadrature") {
  for (double nu : {0.5, 1.0, 1.8}) {
    auto f = [nu](double t) {
      const double j = specfun::bessel_j(nu, t);
      return j * j / t;
    };
    const double direct = quad::gl_panels(f, 200.0, 4000.0, 3000, 16) + quad::bessel_sq_over_t_tail(nu, 4000.0);
    CHECK(quad::bessel_sq_over_t_tail(nu, 200.0) == doctest::Approx(direct).epsilon(1e-7));
  }
}
