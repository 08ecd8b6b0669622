#pragma once

// Spatial meshes, time layers, the stored solution history and the discrete
// norms used by the error studies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracdiff/error.hpp"

namespace fracdiff {

/// Uniform mesh x_i = i*h on [0, length] with n subintervals.
struct SpaceGrid {
  std::size_t n = 0;
  double h = 0.0;
  double length = 0.0;

  SpaceGrid() = default;
  SpaceGrid(std::size_t subintervals, double extent) : n(subintervals), length(extent) {
    if (subintervals < 2) {
      throw InvalidArgument("space grid needs at least two subintervals");
    }
    if (!(extent > 0.0)) {
      throw InvalidArgument("domain length must be positive");
    }
    h = extent / static_cast<double>(subintervals);
  }

  std::size_t nodes() const noexcept { return n + 1; }
  std::size_t interior() const noexcept { return n - 1; }
  double node(std::size_t i) const { return i == n ? length : static_cast<double>(i) * h; }
  double midpoint(std::size_t i) const { return (static_cast<double>(i) - 0.5) * h; } // x_{i-1/2}
};

/// Values at every node of one time level.
struct GridLayer {
  std::vector<double> values;
  double time = 0.0;
};

/// Every layer of a run, plus the increments y^{s+1}_i - y^s_i stored node by
/// node so that the history sum of the time operator is a contiguous dot product.
class SolutionHistory {
public:
  SolutionHistory() = default;
  explicit SolutionHistory(GridLayer initial, std::size_t expected_steps = 0) {
    const std::size_t n = initial.values.size();
    increments_.resize(n);
    for (auto& row : increments_) {
      row.reserve(expected_steps);
    }
    layers_.reserve(expected_steps + 1);
    layers_.push_back(std::move(initial));
  }

  std::size_t size() const noexcept { return layers_.size(); }
  bool empty() const noexcept { return layers_.empty(); }
  std::size_t nodes() const noexcept { return increments_.size(); }

  const GridLayer& operator[](std::size_t j) const { return layers_[j]; }
  const GridLayer& back() const { return layers_.back(); }
  const std::vector<GridLayer>& layers() const noexcept { return layers_; }

  void push(GridLayer layer) {
    if (layers_.empty()) {
      throw InvalidArgument("history must be started from an initial layer");
    }
    if (layer.values.size() != nodes()) {
      throw InvalidArgument("layer size " + std::to_string(layer.values.size()) + " does not match history (" +
                            std::to_string(nodes()) + ")");
    }
    const auto& prev = layers_.back().values;
    for (std::size_t i = 0; i < nodes(); ++i) {
      increments_[i].push_back(layer.values[i] - prev[i]);
    }
    layers_.push_back(std::move(layer));
  }

  /// y^{s+1}_i - y^s_i for s = 0..size()-2.
  std::span<const double> increments(std::size_t i) const { return increments_[i]; }

  /// sum_{s < count} g[s] (y^{s+1}_i - y^s_i), with a fixed four-way
  /// accumulation order so results do not depend on the caller.
  double weighted_increment_sum(std::size_t i, std::span<const double> g, std::size_t count) const {
    const double* inc = increments_[i].data();
    const double* w = g.data();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t s = 0;
    for (; s + 4 <= count; s += 4) {
      s0 += w[s] * inc[s];
      s1 += w[s + 1] * inc[s + 1];
      s2 += w[s + 2] * inc[s + 2];
      s3 += w[s + 3] * inc[s + 3];
    }
    for (; s < count; ++s) {
      s0 += w[s] * inc[s];
    }
    return (s0 + s1) + (s2 + s3);
  }

private:
  std::vector<GridLayer> layers_;
  std::vector<std::vector<double>> increments_;
};

/// sqrt(h * sum_{i=1}^{N-1} y_i^2); boundary nodes are excluded.
inline double l2_norm(std::span<const double> values, const SpaceGrid& grid) {
  if (values.size() != grid.nodes()) {
    throw InvalidArgument("layer has " + std::to_string(values.size()) + " values, grid has " +
                          std::to_string(grid.nodes()) + " nodes");
  }
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    sum += values[i] * values[i];
  }
  return std::sqrt(grid.h * sum);
}

inline double l2_norm(const GridLayer& layer, const SpaceGrid& grid) { return l2_norm(layer.values, grid); }

inline double max_norm(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

/// Maximum of |y| over all nodes of all layers.
inline double max_norm(const SolutionHistory& history) {
  if (history.empty()) {
    throw InvalidArgument("max_norm of an empty history");
  }
  double m = 0.0;
  for (const auto& layer : history.layers()) {
    m = std::max(m, max_norm(layer.values));
  }
  return m;
}

struct RefinementLevel {
  double step = 0.0;
  double error = 0.0;
};

/// log(e1/e2) / log(s1/s2) for each consecutive pair of levels.
inline std::vector<double> convergence_order(std::span<const RefinementLevel> levels) {
  if (levels.size() < 2) {
    throw InvalidArgument("convergence order needs at least two levels");
  }
  std::vector<double> orders;
  orders.reserve(levels.size() - 1);
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const auto& coarse = levels[k];
    const auto& fine = levels[k + 1];
    if (!(coarse.error > 0.0) || !(fine.error > 0.0)) {
      throw InvalidArgument("convergence order needs positive errors");
    }
    if (!(fine.step > 0.0) || !(coarse.step > fine.step)) {
      throw InvalidArgument("step sizes must be positive and strictly decreasing");
    }
    orders.push_back(std::log(coarse.error / fine.error) / std::log(coarse.step / fine.step));
  }
  return orders;
}

/// Errors of a run against an exact solution sampled at the nodes:
/// max_j ||z^j||_0 and max_{i,j} |z_i^j|.
struct ErrorNorms {
  double l2max = 0.0;
  double sup = 0.0;
};

template <class Exact>
ErrorNorms error_norms(const SolutionHistory& history, const SpaceGrid& grid, Exact&& exact) {
  ErrorNorms out;
  std::vector<double> z(grid.nodes());
  for (const auto& layer : history.layers()) {
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      z[i] = layer.values[i] - exact(grid.node(i), layer.time);
    }
    out.l2max = std::max(out.l2max, l2_norm(z, grid));
    out.sup = std::max(out.sup, max_norm(z));
  }
  return out;
}

} // namespace fracdiff
