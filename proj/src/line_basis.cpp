#include "hpk/line_basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "hpk/error.hpp"
#include "hpk/specfun.hpp"
#include "mp_util.hpp"

namespace hpk {

using detail::mp;

double line_log_h0(double s, int N) {
  const double a = s + N;
  return 0.5 * std::log(std::numbers::pi) + specfun::log_gamma(a - 0.5) - specfun::log_gamma(a);
}

std::vector<double> romanovski_b(double s, int N, int count) {
  const double a = s + N;
  std::vector<double> b(count);
  for (int n = 1; n <= count; ++n)
    b[n - 1] = n * (2.0 * a - n) / (4.0 * (a - n - 0.5) * (a - n + 0.5));
  return b;
}

std::shared_ptr<const MonicLineBasis> build_monic_line(const HPParam& param, int N, int max_degree) {
  if (!(param.s > -0.5)) throw DomainError("build_monic_line: effective s must exceed -1/2");
  if (N < 1) throw DomainError("build_monic_line: N must be >= 1");
  if (max_degree < 0) throw DomainError("build_monic_line: max_degree must be >= 0");
  if (max_degree >= N) throw MomentDivergence("build_monic_line: degree >= N is not square-integrable");

  static std::mutex cache_mu;
  static std::map<std::tuple<double, int, int>, std::shared_ptr<const MonicLineBasis>> cache;
  const auto key = std::make_tuple(param.s, N, max_degree);
  {
    std::lock_guard<std::mutex> lock(cache_mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  const int D = max_degree + 1;
  auto basis = std::make_shared<MonicLineBasis>();
  basis->param = param;
  basis->N = N;
  basis->degree_count = D;
  basis->a = param.s + N;
  basis->log_h.resize(D);
  basis->b.assign(D, 0.0);
  basis->sqrt_b.assign(D, 0.0);
  basis->coeffs.assign(D, {});
  basis->coeff_digits.assign(D, {});

  // The Hankel matrix loses roughly N/4 digits; keep a wide margin.
  detail::PrecisionScope scope(static_cast<unsigned>(40 + N / 2));
  const mp a = mp(param.s) + N;
  std::vector<mp> mu(2 * D - 1, mp(0));
  mu[0] = 1;  // normalized by h_0
  for (int k = 1; 2 * k <= 2 * D - 2; ++k) mu[2 * k] = mu[2 * k - 2] * (mp(k) - 0.5) / (a - k - 0.5);

  detail::MpMatrix H(D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) H(i, j) = mu[i + j];
  const auto L = detail::cholesky(H);
  const auto Linv = detail::lower_inverse(L);

  const double log_h0 = line_log_h0(param.s, N);
  for (int k = 0; k < D; ++k) {
    const mp lkk = L(k, k);
    basis->coeffs[k].resize(k + 1);
    basis->coeff_digits[k].resize(k + 1);
    for (int j = 0; j <= k; ++j) {
      const mp c = Linv(k, j) * lkk;
      basis->coeffs[k][j] = static_cast<double>(c);
      basis->coeff_digits[k][j] = detail::to_digits(c);
    }
    basis->log_h[k] = log_h0 + 2.0 * static_cast<double>(log(lkk));
    if (k > 0) {
      const mp ratio = (lkk * lkk) / (L(k - 1, k - 1) * L(k - 1, k - 1));
      basis->b[k] = static_cast<double>(ratio);
      basis->sqrt_b[k] = static_cast<double>(sqrt(ratio));
      if (!(basis->b[k] > 0.0) || !std::isfinite(basis->b[k]))
        throw IllConditioned("build_monic_line: invalid recurrence coefficient");
    }
  }

  std::lock_guard<std::mutex> lock(cache_mu);
  return cache.emplace(key, std::move(basis)).first->second;
}

void MonicLineBasis::eval_weighted_orthonormal(double t, int count, double* out) const {
  if (count > degree_count) throw DegreeError("eval_weighted_orthonormal: count exceeds degrees");
  const double lw = 0.5 * log_line_weight(a, t) - 0.5 * log_h[0];
  // Keep |t| * max(|cur|, |prev|) well inside the double range.
  const double limit = 1e150 / std::max(1.0, std::abs(t));
  double prev = 0.0, cur = 1.0, scale = 0.0;
  out[0] = std::exp(lw);
  for (int k = 0; k + 1 < count; ++k) {
    const double next = (t * cur - sqrt_b[k] * prev) / sqrt_b[k + 1];
    prev = cur;
    cur = next;
    const double m = std::max(std::abs(cur), std::abs(prev));
    if (m > limit) {
      cur /= m;
      prev /= m;
      scale += std::log(m);
    }
    out[k + 1] = cur * std::exp(scale + lw);
  }
}

double MonicLineBasis::eval_monic(int k, double t) const {
  if (k < 0 || k >= degree_count) throw DegreeError("eval_monic: degree out of range");
  double acc = 0.0;
  for (int j = k; j >= 0; --j) acc = acc * t + coeffs[k][j];
  return acc;
}

nlohmann::json line_to_json(const MonicLineBasis& basis) {
  nlohmann::json j;
  j["s"] = basis.param.s;
  j["N"] = basis.N;
  j["degree_count"] = basis.degree_count;
  j["coefficients"] = basis.coeff_digits;
  j["log_h"] = basis.log_h;
  return j;
}

}  // namespace hpk
