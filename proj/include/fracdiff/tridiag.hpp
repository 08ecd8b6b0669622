#pragma once

#include <cfloat>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracdiff/error.hpp"

namespace fracdiff {

/// A x = rhs with A tridiagonal. Row i reads
///   sub[i] x[i-1] + diag[i] x[i] + super[i] x[i+1] = rhs[i];
/// sub[0] and super[size-1] are ignored.
struct TridiagonalSystem {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> super;
  std::vector<double> rhs;

  TridiagonalSystem() = default;
  explicit TridiagonalSystem(std::size_t n) : sub(n, 0.0), diag(n, 0.0), super(n, 0.0), rhs(n, 0.0) {}

  std::size_t size() const noexcept { return diag.size(); }

  void resize(std::size_t n) {
    sub.assign(n, 0.0);
    diag.assign(n, 0.0);
    super.assign(n, 0.0);
    rhs.assign(n, 0.0);
  }

  /// (A x)_i.
  double row_product(std::size_t i, std::span<const double> x) const {
    double v = diag[i] * x[i];
    if (i > 0) {
      v += sub[i] * x[i - 1];
    }
    if (i + 1 < size()) {
      v += super[i] * x[i + 1];
    }
    return v;
  }
};

/// Thomas algorithm without pivoting, writing the solution into x.
/// `scratch` holds the modified super-diagonal and may be reused across calls.
inline void solve_tridiagonal(const TridiagonalSystem& system, std::vector<double>& x, std::vector<double>& scratch) {
  const std::size_t n = system.size();
  if (n == 0) {
    throw InvalidArgument("tridiagonal system is empty");
  }
  if (system.sub.size() != n || system.super.size() != n || system.rhs.size() != n) {
    throw InvalidArgument("tridiagonal system has inconsistent band lengths");
  }
  x.resize(n);
  scratch.resize(n);

  double pivot = system.diag[0];
  if (!(std::abs(pivot) >= DBL_MIN)) {
    throw SingularSystem(0);
  }
  scratch[0] = n > 1 ? system.super[0] / pivot : 0.0;
  x[0] = system.rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = system.diag[i] - system.sub[i] * scratch[i - 1];
    if (!(std::abs(pivot) >= DBL_MIN)) {
      throw SingularSystem(i);
    }
    scratch[i] = i + 1 < n ? system.super[i] / pivot : 0.0;
    x[i] = (system.rhs[i] - system.sub[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    x[i] -= scratch[i] * x[i + 1];
  }
}

inline std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
  std::vector<double> x;
  std::vector<double> scratch;
  solve_tridiagonal(system, x, scratch);
  return x;
}

} // namespace fracdiff
