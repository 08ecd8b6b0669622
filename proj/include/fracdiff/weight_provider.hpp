#pragma once

// Weights g_s^{j+1} and blend parameters sigma_{j+1} of the general weighted
// scheme family
//   sum_s g_s^{j+1} (y^{s+1} - y^s) = Lambda y^{(sigma_{j+1})} + phi^{j+1}.

#include <concepts>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "fracdiff/caputo.hpp"

namespace fracdiff {

/// Weights of one step: g[s] multiplies y^{s+1} - y^s (s = 0..j), so g[j]
/// belongs to the unknown layer; sigma is the implicit share of Lambda.
struct StepWeights {
  std::vector<double> g;
  double sigma = 1.0;
};

template <class P>
concept WeightProvider = requires(P& p, std::size_t j, StepWeights& out) {
  { p.fill(j, out) };
};

/// L2-1sigma: g_s = c_{j-s} tau^{-alpha}/Gamma(2-alpha), sigma = 1 - alpha/2.
class L21SigmaProvider {
public:
  L21SigmaProvider(FractionalOrder order, double tau) : table_(order), scale_(order.scale(tau)), sigma_(order.sigma()) {}

  void fill(std::size_t j, StepWeights& out) {
    table_.coefficients(j, c_);
    out.g.resize(j + 1);
    for (std::size_t s = 0; s <= j; ++s) {
      out.g[s] = scale_ * c_[j - s];
    }
    out.sigma = sigma_;
  }

  double scale() const noexcept { return scale_; }

private:
  L21SigmaTable table_;
  std::vector<double> c_;
  double scale_;
  double sigma_;
};

/// L1 on a uniform mesh: fully implicit (sigma = 1), collocated at t_{j+1}.
class L1Provider {
public:
  L1Provider(FractionalOrder order, double tau) : table_(order), scale_(order.scale(tau)) {}

  void fill(std::size_t j, StepWeights& out) {
    table_.coefficients(j, c_);
    out.g.resize(j + 1);
    for (std::size_t s = 0; s <= j; ++s) {
      out.g[s] = scale_ * c_[j - s];
    }
    out.sigma = 1.0;
  }

  double scale() const noexcept { return scale_; }

private:
  L1Table table_;
  std::vector<double> c_;
  double scale_;
};

/// Arbitrary weights from callables g(j, s) and sigma(j); used to probe the
/// stability auditor with families that violate its hypotheses.
class FunctionProvider {
public:
  FunctionProvider(std::function<double(std::size_t, std::size_t)> g, std::function<double(std::size_t)> sigma)
      : g_(std::move(g)), sigma_(std::move(sigma)) {}

  void fill(std::size_t j, StepWeights& out) {
    out.g.resize(j + 1);
    for (std::size_t s = 0; s <= j; ++s) {
      out.g[s] = g_(j, s);
    }
    out.sigma = sigma_(j);
  }

private:
  std::function<double(std::size_t, std::size_t)> g_;
  std::function<double(std::size_t)> sigma_;
};

static_assert(WeightProvider<L21SigmaProvider>);
static_assert(WeightProvider<L1Provider>);
static_assert(WeightProvider<FunctionProvider>);

} // namespace fracdiff
