#include "hpk/opuc.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "hpk/error.hpp"
#include "hpk/rng.hpp"
#include "mp_util.hpp"

namespace hpk {

using detail::mp;

namespace {

// Normalized moments in extended precision: c_{m+1} = c_m (s - m) / (s + m + 1),
// with alternating signs for the w kind.
std::vector<mp> mp_moments(const CircleWeight& w, int count) {
  std::vector<mp> c(count);
  const mp s = mp(w.param.s);
  c[0] = 1;
  for (int m = 0; m + 1 < count; ++m) c[m + 1] = c[m] * (s - m) / (s + m + 1);
  if (w.kind == WeightKind::w)
    for (int m = 1; m < count; m += 2) c[m] = -c[m];
  return c;
}

}  // namespace

std::vector<double> circle_moments(const CircleWeight& w, int count) {
  detail::PrecisionScope scope(40);
  const auto c = mp_moments(w, count);
  std::vector<double> out(count);
  for (int m = 0; m < count; ++m) out[m] = static_cast<double>(c[m]);
  return out;
}

std::complex<double> OPUCBasis::eval(int k, std::complex<double> z) const {
  if (k < 0 || k >= degree_count) throw DegreeError("OPUCBasis::eval: degree out of range");
  const auto& c = coeffs[k];
  std::complex<double> acc = 0.0;
  for (int j = k; j >= 0; --j) acc = acc * z + c[j];
  return acc;
}

std::complex<double> OPUCBasis::eval_star(int k, std::complex<double> z) const {
  if (k < 0 || k >= degree_count) throw DegreeError("OPUCBasis::eval_star: degree out of range");
  const auto& c = coeffs[k];
  // p_k^*(z) = sum_j conj(c_j) z^{k-j}
  std::complex<double> acc = 0.0;
  for (int j = 0; j <= k; ++j) acc = acc * z + std::conj(c[j]);
  return acc;
}

double OPUCBasis::weight_at(double theta) const {
  return eval_circle_weight(weight, theta) / normalization;
}

std::shared_ptr<const OPUCBasis> build_opuc(const CircleWeight& w, int n) {
  if (!(w.param.s > -0.5)) throw DomainError("build_opuc: s must exceed -1/2");
  if (n < 1) throw DomainError("build_opuc: n must be >= 1");
  if (n > kOpucDegreeCap) throw DegreeError("build_opuc: n exceeds the degree cap");

  static std::mutex cache_mu;
  static std::map<std::tuple<int, double, int>, std::shared_ptr<const OPUCBasis>> cache;
  const auto key = std::make_tuple(static_cast<int>(w.kind), w.param.s, n);
  {
    std::lock_guard<std::mutex> lock(cache_mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  auto basis = std::make_shared<OPUCBasis>();
  basis->weight = w;
  basis->degree_count = n;
  basis->normalization = circle_normalization(w);
  {
    detail::PrecisionScope scope(50);
    const auto c = mp_moments(w, n);
    detail::MpMatrix T(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) T(i, j) = c[std::abs(i - j)];
    const auto Linv = detail::lower_inverse(detail::cholesky(T));
    basis->coeffs.assign(n, {});
    basis->coeff_digits.assign(n, {});
    basis->leading.resize(n);
    for (int k = 0; k < n; ++k) {
      basis->coeffs[k].resize(k + 1);
      basis->coeff_digits[k].resize(k + 1);
      for (int j = 0; j <= k; ++j) {
        basis->coeffs[k][j] = static_cast<double>(Linv(k, j));
        basis->coeff_digits[k][j] = detail::to_digits(Linv(k, j));
      }
      basis->leading[k] = static_cast<double>(Linv(k, k));
    }
  }

  // Gram residual of the double-rounded coefficients against the moment matrix.
  const auto cd = circle_moments(w, n);
  double resid = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= a; ++b) {
      long double g = 0.0L;
      for (int i = 0; i <= a; ++i) {
        long double row = 0.0L;
        for (int j = 0; j <= b; ++j)
          row += static_cast<long double>(basis->coeffs[b][j].real()) * cd[std::abs(i - j)];
        g += static_cast<long double>(basis->coeffs[a][i].real()) * row;
      }
      const double target = (a == b) ? 1.0 : 0.0;
      resid = std::max(resid, static_cast<double>(std::abs(g - target)));
    }
  }
  basis->gram_residual = resid;
  if (resid > 1e-8) throw IllConditioned("build_opuc: Gram residual " + std::to_string(resid));

  std::lock_guard<std::mutex> lock(cache_mu);
  return cache.emplace(key, std::move(basis)).first->second;
}

std::complex<double> cd_sum_circle(const OPUCBasis& basis, int N, double alpha, double beta) {
  if (N < 1 || N > basis.degree_count) throw DegreeError("cd_sum_circle: N exceeds basis degrees");
  const std::complex<double> z = std::polar(1.0, alpha);
  const std::complex<double> u = std::polar(1.0, beta);
  std::complex<double> sum = 0.0;
  for (int k = 0; k < N; ++k) sum += basis.eval(k, z) * std::conj(basis.eval(k, u));
  return std::sqrt(basis.weight_at(alpha) * basis.weight_at(beta)) * sum;
}

double cd_identity_residual(const OPUCBasis& basis, int n, double theta, double tau) {
  if (n + 1 > basis.degree_count) throw DegreeError("cd_identity_residual: need degree n available");
  const std::complex<double> z = std::polar(1.0, theta);
  const std::complex<double> u = std::polar(1.0, tau);
  if (std::abs(z - u) < 1e-12) throw DomainError("cd_identity_residual: coincident angles");
  std::complex<double> lhs = 0.0;
  for (int k = 0; k < n; ++k) lhs += basis.eval(k, z) * std::conj(basis.eval(k, u));
  const std::complex<double> rhs =
      (basis.eval_star(n, z) * std::conj(basis.eval_star(n, u)) -
       basis.eval(n, z) * std::conj(basis.eval(n, u))) /
      (1.0 - z * std::conj(u));
  return std::abs(lhs - rhs);
}

ExtremalResult szego_extremal(const CircleWeight& w, int N, double theta, int trial_count,
                              std::uint64_t seed) {
  if (!(w.param.s > -0.5)) throw DomainError("szego_extremal: s must exceed -1/2");
  const auto basis = build_opuc(w, N);
  const auto c = circle_moments(w, N);
  const std::complex<double> z = std::polar(1.0, theta);

  // |P(z)|^2 / ||P||^2 for monomial coefficients b.
  auto ratio = [&](const std::vector<std::complex<double>>& b) {
    std::complex<double> val = 0.0;
    for (int j = N - 1; j >= 0; --j) val = val * z + b[j];
    double norm2 = 0.0;
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) norm2 += (std::conj(b[j]) * b[k] * c[std::abs(j - k)]).real();
    return std::norm(val) / norm2;
  };

  // Reproducing-kernel trial: P = sum_k conj(p_k(z)) p_k.
  std::vector<std::complex<double>> rk(N, 0.0);
  for (int k = 0; k < N; ++k) {
    const auto pk = std::conj(basis->eval(k, z));
    for (int j = 0; j <= k; ++j) rk[j] += pk * basis->coeffs[k][j];
  }
  ExtremalResult res;
  res.kernel_trial = ratio(rk);

  Rng rng(seed);
  std::vector<std::complex<double>> b(N);
  for (int t = 0; t < trial_count; ++t) {
    // Alternate between fresh Gaussian trials and perturbations of the kernel trial.
    const double scale = (t % 2 == 0) ? 1.0 : 1e-2 * std::sqrt(res.kernel_trial);
    for (int j = 0; j < N; ++j) {
      const std::complex<double> g(rng.normal(), rng.normal());
      b[j] = (t % 2 == 0) ? g : rk[j] + scale * g;
    }
    res.best_random = std::max(res.best_random, ratio(b));
  }
  res.best = std::max(res.kernel_trial, res.best_random);
  return res;
}

nlohmann::json opuc_to_json(const OPUCBasis& basis) {
  nlohmann::json j;
  j["kind"] = basis.weight.kind == WeightKind::lambda ? "lambda" : "w";
  j["s"] = basis.weight.param.s;
  j["degree_count"] = basis.degree_count;
  j["coefficients"] = basis.coeff_digits;
  j["leading"] = basis.leading;
  j["gram_residual"] = basis.gram_residual;
  j["normalization"] = basis.normalization;
  return j;
}

}  // namespace hpk
