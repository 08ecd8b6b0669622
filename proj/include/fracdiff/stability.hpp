#pragma once

// Executable versions of the stability hypotheses of the weighted scheme
// family and of the energy inequalities they imply.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fracdiff/error.hpp"
#include "fracdiff/weight_provider.hpp"

namespace fracdiff {

/// Data entering the a priori bound: the lower bound c1 of k, the domain
/// length, ||y^0||^2 and max_j ||phi^j||^2.
struct OperatorBounds {
  double c1 = 1.0;
  double length = 1.0;
  double initial_norm_sq = 0.0;
  double source_max_sq = 0.0;
};

struct StabilityStep {
  std::size_t j = 0;
  bool monotone = true;     // g_j > g_{j-1} > ... > g_0 > 0
  double g0 = 0.0;
  double sigma = 0.0;
  double sigma_lower = 0.0; // g_j / (2 g_j - g_{j-1}), g_{-1} = 0
  bool sigma_ok = true;     // sigma_lower <= sigma <= 1
};

struct StabilityReport {
  std::vector<StabilityStep> steps;
  bool monotone_ok = true;
  bool floor_ok = true;
  bool sigma_ok = true;
  double c2 = std::numeric_limits<double>::infinity(); // min_j g_0^{j+1}
  double kappa = 0.0;                                 // 4 c1 / l^2
  std::optional<double> bound;                        // ||y^0||^2 + max||phi||^2 / (2 kappa c2)

  bool passed() const noexcept { return monotone_ok && floor_ok && sigma_ok; }

  /// First step at which any condition fails.
  std::optional<std::size_t> first_failure() const {
    for (const auto& s : steps) {
      if (!s.monotone || !s.sigma_ok) {
        return s.j;
      }
    }
    return std::nullopt;
  }
};

/// Checks the unconditional-stability hypotheses on the weights for j = 0..j_max.
template <WeightProvider P>
StabilityReport check_stability_conditions(P& provider, std::size_t j_max,
                                           std::optional<OperatorBounds> bounds = std::nullopt) {
  StabilityReport report;
  report.steps.reserve(j_max + 1);
  StepWeights w;
  for (std::size_t j = 0; j <= j_max; ++j) {
    provider.fill(j, w);
    const auto& g = w.g;
    StabilityStep step;
    step.j = j;
    step.g0 = g[0];
    step.monotone = g[0] > 0.0;
    for (std::size_t s = 0; s < j && step.monotone; ++s) {
      step.monotone = g[s + 1] > g[s];
    }
    const double prev = j == 0 ? 0.0 : g[j - 1];
    const double denom = 2.0 * g[j] - prev;
    step.sigma = w.sigma;
    step.sigma_lower = denom > 0.0 ? g[j] / denom : std::numeric_limits<double>::infinity();
    step.sigma_ok = step.sigma_lower <= w.sigma && w.sigma <= 1.0;

    report.monotone_ok = report.monotone_ok && step.monotone;
    report.sigma_ok = report.sigma_ok && step.sigma_ok;
    report.c2 = std::min(report.c2, g[0]);
    report.steps.push_back(step);
  }
  report.floor_ok = report.c2 > 0.0;
  if (bounds) {
    if (!(bounds->c1 > 0.0) || !(bounds->length > 0.0)) {
      throw InvalidArgument("operator bounds need positive c1 and length");
    }
    report.kappa = 4.0 * bounds->c1 / (bounds->length * bounds->length);
    if (report.floor_ok) {
      report.bound = bounds->initial_norm_sq + bounds->source_max_sq / (2.0 * report.kappa * report.c2);
    }
  }
  return report;
}

/// Left-minus-right margins of the three energy inequalities at one step j,
/// with D = sum_s g_s (v^{s+1} - v^s) and D2 the same sum applied to v^2:
///   upper:   v^{j+1} D - D2/2 - D^2 / (2 g_j)
///   lower:   v^j D - D2/2 + D^2 / (2 (g_j - g_{j-1}))
///   blended: (sigma v^{j+1} + (1 - sigma) v^j) D - D2/2
/// `magnitude` is the size of the largest term, for relative slack.
struct EnergyMargins {
  std::size_t j = 0;
  double upper = 0.0;
  double lower = 0.0;
  double blended = 0.0;
  double magnitude = 0.0;

  double worst() const noexcept { return std::min({upper, lower, blended}); }
};

template <WeightProvider P>
std::vector<EnergyMargins> energy_inequality_probe(P& provider, std::span<const double> v) {
  if (v.size() < 2) {
    throw InvalidArgument("energy probe needs a series with at least two values");
  }
  std::vector<EnergyMargins> out;
  out.reserve(v.size() - 1);
  StepWeights w;
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    provider.fill(j, w);
    const auto& g = w.g;
    double d = 0.0;
    double d2 = 0.0;
    double mag = 0.0;
    for (std::size_t s = 0; s <= j; ++s) {
      d += g[s] * (v[s + 1] - v[s]);
      d2 += g[s] * (v[s + 1] * v[s + 1] - v[s] * v[s]);
      mag = std::max(mag, g[s] * (v[s + 1] * v[s + 1] + v[s] * v[s]));
    }
    const double gap = g[j] - (j == 0 ? 0.0 : g[j - 1]);
    EnergyMargins m;
    m.j = j;
    m.upper = v[j + 1] * d - 0.5 * d2 - d * d / (2.0 * g[j]);
    m.lower = v[j] * d - 0.5 * d2 + d * d / (2.0 * gap);
    m.blended = (w.sigma * v[j + 1] + (1.0 - w.sigma) * v[j]) * d - 0.5 * d2;
    m.magnitude = std::max({mag, std::abs(v[j + 1] * d), std::abs(v[j] * d), d * d / g[j]});
    out.push_back(m);
  }
  return out;
}

} // namespace fracdiff
