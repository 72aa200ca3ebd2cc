#pragma once

// Extended-precision helpers shared by the moment-based basis builders.

#include <boost/multiprecision/mpfr.hpp>
#include <mutex>
#include <string>
#include <vector>

#include "hpk/error.hpp"

namespace hpk::detail {

using mp = boost::multiprecision::mpfr_float;

// Boost's mpfr default precision is process-wide, so builders hold this lock
// for the whole extended-precision section.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits) : lock_(mutex()), saved_(mp::default_precision()) {
    mp::default_precision(digits);
  }
  ~PrecisionScope() { mp::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  static std::recursive_mutex& mutex() {
    static std::recursive_mutex m;
    return m;
  }
  std::lock_guard<std::recursive_mutex> lock_;
  unsigned saved_;
};

// Dense row-major square matrix.
struct MpMatrix {
  int n = 0;
  std::vector<mp> a;
  explicit MpMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, mp(0)) {}
  mp& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const mp& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Lower Cholesky factor; throws IllConditioned on a non-positive pivot.
inline MpMatrix cholesky(const MpMatrix& A) {
  MpMatrix L(A.n);
  for (int j = 0; j < A.n; ++j) {
    mp d = A(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (d <= 0) throw IllConditioned("moment matrix lost positivity at index " + std::to_string(j));
    L(j, j) = sqrt(d);
    for (int i = j + 1; i < A.n; ++i) {
      mp v = A(i, j);
      for (int k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
      L(i, j) = v / L(j, j);
    }
  }
  return L;
}

// Inverse of a lower-triangular matrix.
inline MpMatrix lower_inverse(const MpMatrix& L) {
  MpMatrix X(L.n);
  for (int i = 0; i < L.n; ++i) {
    X(i, i) = mp(1) / L(i, i);
    for (int j = 0; j < i; ++j) {
      mp v = 0;
      for (int k = j; k < i; ++k) v += L(i, k) * X(k, j);
      X(i, j) = -v / L(i, i);
    }
  }
  return X;
}

inline std::string to_digits(const mp& v, int digits = 25) {
  return v.str(digits, std::ios_base::scientific);
}

}  // namespace hpk::detail
