#pragma once

// Implicit difference schemes for
//   D_t^alpha u = d/dx (k du/dx) - q u + f,  u(0,t) = u(l,t) = 0,  u(x,0) = u0(x),
// on uniform meshes: the general weighted family with the three-point
// operator Lambda (second order in space) and the compact fourth-order
// scheme for coefficients that depend on t only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracdiff/caputo.hpp"
#include "fracdiff/error.hpp"
#include "fracdiff/grid.hpp"
#include "fracdiff/tridiag.hpp"
#include "fracdiff/weight_provider.hpp"

namespace fracdiff {

using Field = std::function<double(double, double)>;

struct ProblemSpec {
  Field k;                          // k(x, t) >= c1 > 0
  Field q;                          // q(x, t) >= 0
  Field f;                          // source
  std::function<double(double)> u0; // initial profile, zero at both ends
  double length = 1.0;
  double horizon = 1.0;
  double c1 = 1.0;
  Field exact;                      // empty when no exact solution is known
  bool coefficients_vary_in_x = true;

  bool has_exact() const { return static_cast<bool>(exact); }
};

enum class Scheme { second_order, compact };

inline std::string_view to_string(Scheme s) { return s == Scheme::second_order ? "second" : "compact"; }

struct RunResult {
  SpaceGrid space;
  TimeGrid time;
  SolutionHistory history;
  std::vector<double> source_norms_sq; // ||phi^{j+1}||_0^2 (||H phi^{j+1}||_0^2 for compact) per step
};

/// Reusable buffers for one run.
struct StepWorkspace {
  TridiagonalSystem system;
  std::vector<double> a, d, phi, hist, x, scratch;
};

namespace detail {

inline void require_runnable(const ProblemSpec& p) {
  if (!p.k || !p.q || !p.f || !p.u0) {
    throw InvalidArgument("problem needs k, q, f and u0");
  }
  if (!(p.length > 0.0) || !(p.horizon > 0.0)) {
    throw InvalidArgument("problem needs positive length and horizon");
  }
}

inline GridLayer initial_layer(const ProblemSpec& p, const SpaceGrid& space) {
  GridLayer layer;
  layer.values.resize(space.nodes());
  for (std::size_t i = 1; i < space.n; ++i) {
    layer.values[i] = p.u0(space.node(i));
  }
  layer.time = 0.0;
  return layer;
}

/// sum_{s<j} g_s (y^{s+1}_i - y^s_i) at every node.
inline void history_sums(const SolutionHistory& history, const StepWeights& w, std::vector<double>& hist) {
  const std::size_t j = history.size() - 1;
  hist.resize(history.nodes());
  for (std::size_t i = 0; i < history.nodes(); ++i) {
    hist[i] = history.weighted_increment_sum(i, w.g, j);
  }
}

/// (v_{i-1} + 10 v_i + v_{i+1}) / 12.
inline double average(std::span<const double> v, std::size_t i) { return (v[i - 1] + 10.0 * v[i] + v[i + 1]) / 12.0; }

inline double interior_norm_sq(std::span<const double> v, const SpaceGrid& space) {
  const double n = l2_norm(v, space);
  return n * n;
}

inline double averaged_norm_sq(std::span<const double> v, const SpaceGrid& space) {
  double sum = 0.0;
  for (std::size_t i = 1; i < space.n; ++i) {
    const double hv = average(v, i);
    sum += hv * hv;
  }
  return space.h * sum;
}

} // namespace detail

/// One step of the weighted scheme with Lambda y = (a y_xbar)_x - d y:
///   sum_s g_s (y^{s+1} - y^s) = Lambda y^{(sigma)} + phi,
/// with a_i = k(x_{i-1/2}, t_c), d_i = q(x_i, t_c), phi_i = f(x_i, t_c) and
/// t_c = t_j + sigma tau. Returns ||phi||_0^2 of the step.
inline double step_weighted(const ProblemSpec& p, const SpaceGrid& space, const TimeGrid& time, const StepWeights& w,
                            SolutionHistory& history, StepWorkspace& ws) {
  const std::size_t j = history.size() - 1;
  if (w.g.size() != j + 1) {
    throw InvalidArgument("step weights do not match the history length");
  }
  const std::size_t n = space.n;
  const double h2 = space.h * space.h;
  const double sigma = w.sigma;
  const double gj = w.g[j];
  const double tc = time.node(j) + sigma * time.tau;
  const auto& y = history.back().values;

  ws.a.resize(n + 1);
  ws.d.resize(n + 1);
  ws.phi.resize(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    ws.a[i] = p.k(space.midpoint(i), tc);
  }
  for (std::size_t i = 0; i <= n; ++i) {
    ws.d[i] = p.q(space.node(i), tc);
    ws.phi[i] = p.f(space.node(i), tc);
  }
  detail::history_sums(history, w, ws.hist);

  auto& sys = ws.system;
  sys.resize(n - 1);
  double phi_sq = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t r = i - 1;
    const double ai = ws.a[i];
    const double ai1 = ws.a[i + 1];
    const double lam = (ai1 * y[i + 1] - (ai1 + ai) * y[i] + ai * y[i - 1]) / h2 - ws.d[i] * y[i];
    sys.sub[r] = -sigma * ai / h2;
    sys.super[r] = -sigma * ai1 / h2;
    sys.diag[r] = gj + sigma * (ai + ai1) / h2 + sigma * ws.d[i];
    sys.rhs[r] = gj * y[i] - ws.hist[i] + (1.0 - sigma) * lam + ws.phi[i];
    const double margin = sys.diag[r] - std::abs(sys.sub[r]) - std::abs(sys.super[r]);
    if (!(margin > 0.0)) {
      throw InvariantViolation("second-order system not strictly diagonally dominant at row " + std::to_string(i) +
                               " of step " + std::to_string(j + 1));
    }
    phi_sq += ws.phi[i] * ws.phi[i];
  }
  solve_tridiagonal(sys, ws.x, ws.scratch);

  GridLayer next;
  next.values.assign(n + 1, 0.0);
  std::copy(ws.x.begin(), ws.x.end(), next.values.begin() + 1);
  next.time = time.node(j + 1);
  history.push(std::move(next));
  return space.h * phi_sq;
}

/// One step of the compact scheme
///   sum_s g_s H(y^{s+1} - y^s) = a y_xbarx^{(sigma)} - d H y^{(sigma)} + H phi,
/// H v = v + h^2 v_xbarx / 12, a = k(t_c), d = q(t_c). phi is sampled at the
/// boundary nodes too. Returns ||H phi||_0^2 of the step.
inline double step_compact_weighted(const ProblemSpec& p, const SpaceGrid& space, const TimeGrid& time,
                                    const StepWeights& w, SolutionHistory& history, StepWorkspace& ws) {
  if (p.coefficients_vary_in_x) {
    throw InvalidArgument("compact scheme requires k=k(t) and q=q(t)");
  }
  const std::size_t j = history.size() - 1;
  if (w.g.size() != j + 1) {
    throw InvalidArgument("step weights do not match the history length");
  }
  const std::size_t n = space.n;
  const double h2 = space.h * space.h;
  const double sigma = w.sigma;
  const double m = w.g[j];
  const double tc = time.node(j) + sigma * time.tau;
  const double xm = 0.5 * space.length;
  const double a = p.k(xm, tc);
  const double d = p.q(xm, tc);
  const auto& y = history.back().values;

  ws.phi.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    ws.phi[i] = p.f(space.node(i), tc);
  }
  detail::history_sums(history, w, ws.hist);

  const double md = m + sigma * d;
  const double diag = md * 10.0 / 12.0 + 2.0 * sigma * a / h2;
  const double off = md / 12.0 - sigma * a / h2;
  if (!(diag - 2.0 * std::abs(off) > 0.0)) {
    throw InvariantViolation("compact system not strictly diagonally dominant at step " + std::to_string(j + 1));
  }
  const double explicit_mass = m - (1.0 - sigma) * d;
  const double explicit_stiff = (1.0 - sigma) * a / h2;

  auto& sys = ws.system;
  sys.resize(n - 1);
  double hphi_sq = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t r = i - 1;
    const double hphi = detail::average(ws.phi, i);
    sys.sub[r] = off;
    sys.super[r] = off;
    sys.diag[r] = diag;
    sys.rhs[r] = explicit_mass * detail::average(y, i) + explicit_stiff * (y[i + 1] - 2.0 * y[i] + y[i - 1]) -
                 detail::average(ws.hist, i) + hphi;
    hphi_sq += hphi * hphi;
  }
  solve_tridiagonal(sys, ws.x, ws.scratch);

  GridLayer next;
  next.values.assign(n + 1, 0.0);
  std::copy(ws.x.begin(), ws.x.end(), next.values.begin() + 1);
  next.time = time.node(j + 1);
  history.push(std::move(next));
  return space.h * hphi_sq;
}

/// Runs nt steps of either scheme with weights from `provider`.
template <WeightProvider P>
RunResult run_weighted(const ProblemSpec& p, Scheme scheme, P& provider, std::size_t nx, std::size_t nt) {
  detail::require_runnable(p);
  if (scheme == Scheme::compact && p.coefficients_vary_in_x) {
    throw InvalidArgument("compact scheme requires k=k(t) and q=q(t)");
  }
  RunResult out;
  out.space = SpaceGrid(nx, p.length);
  out.time = TimeGrid::uniform(nt, p.horizon);
  out.history = SolutionHistory(detail::initial_layer(p, out.space), nt);
  out.source_norms_sq.reserve(nt);
  StepWorkspace ws;
  StepWeights w;
  for (std::size_t j = 0; j < nt; ++j) {
    provider.fill(j, w);
    const double src = scheme == Scheme::second_order
                           ? step_weighted(p, out.space, out.time, w, out.history, ws)
                           : step_compact_weighted(p, out.space, out.time, w, out.history, ws);
    out.source_norms_sq.push_back(src);
  }
  return out;
}

/// L2-1sigma scheme, second order in space and time.
inline RunResult run_second_order(const ProblemSpec& p, const FractionalOrder& order, std::size_t nx, std::size_t nt) {
  L21SigmaProvider provider(order, p.horizon / static_cast<double>(nt));
  return run_weighted(p, Scheme::second_order, provider, nx, nt);
}

/// L2-1sigma compact scheme, second order in time and fourth order in space.
inline RunResult run_compact(const ProblemSpec& p, const FractionalOrder& order, std::size_t nx, std::size_t nt) {
  L21SigmaProvider provider(order, p.horizon / static_cast<double>(nt));
  return run_weighted(p, Scheme::compact, provider, nx, nt);
}

inline RunResult run(const ProblemSpec& p, const FractionalOrder& order, Scheme scheme, std::size_t nx,
                     std::size_t nt) {
  return scheme == Scheme::second_order ? run_second_order(p, order, nx, nt) : run_compact(p, order, nx, nt);
}

/// Single L2-1sigma step appended to `history`; weights are computed directly.
inline const GridLayer& step_second_order(const ProblemSpec& p, const FractionalOrder& order, const SpaceGrid& space,
                                          const TimeGrid& time, SolutionHistory& history) {
  const std::size_t j = history.size() - 1;
  const WeightVector c = weights(order, j, time.tau);
  StepWeights w;
  w.sigma = order.sigma();
  w.g.resize(j + 1);
  for (std::size_t s = 0; s <= j; ++s) {
    w.g[s] = c.scale() * c[j - s];
  }
  StepWorkspace ws;
  step_weighted(p, space, time, w, history, ws);
  return history.back();
}

inline const GridLayer& step_compact(const ProblemSpec& p, const FractionalOrder& order, const SpaceGrid& space,
                                     const TimeGrid& time, SolutionHistory& history) {
  const std::size_t j = history.size() - 1;
  const WeightVector c = weights(order, j, time.tau);
  StepWeights w;
  w.sigma = order.sigma();
  w.g.resize(j + 1);
  for (std::size_t s = 0; s <= j; ++s) {
    w.g[s] = c.scale() * c[j - s];
  }
  StepWorkspace ws;
  step_compact_weighted(p, space, time, w, history, ws);
  return history.back();
}

/// Starts a history from u0 on the given grid.
inline SolutionHistory start_history(const ProblemSpec& p, const SpaceGrid& space, std::size_t expected_steps = 0) {
  detail::require_runnable(p);
  return SolutionHistory(detail::initial_layer(p, space), expected_steps);
}

/// Per-step left-hand sides ||y^{j+1}||_0^2 (||H y^{j+1}||_0^2 for compact)
/// and the common right-hand side
///   second order: ||y^0||^2 + l^2 T^alpha Gamma(1-alpha) / (4 c1) max ||phi||^2
///   compact:      ||H y^0||^2 + l^2 T^alpha Gamma(1-alpha) / c1 max ||H phi||^2.
struct AprioriEstimate {
  std::vector<double> lhs;
  double rhs = 0.0;

  double worst_lhs() const {
    double m = 0.0;
    for (double v : lhs) {
      m = std::max(m, v);
    }
    return m;
  }
  /// Every step satisfies lhs <= rhs (with relative slack for rounding).
  bool holds(double rel_slack = 1e-12) const { return worst_lhs() <= rhs * (1.0 + rel_slack); }
};

inline AprioriEstimate a_priori_bound(const ProblemSpec& p, const FractionalOrder& order, Scheme scheme,
                                      const RunResult& result) {
  const auto& space = result.space;
  const auto norm_sq = [&](std::span<const double> v) {
    return scheme == Scheme::second_order ? detail::interior_norm_sq(v, space) : detail::averaged_norm_sq(v, space);
  };
  AprioriEstimate est;
  const auto& layers = result.history.layers();
  est.lhs.reserve(layers.size() - 1);
  for (std::size_t j = 1; j < layers.size(); ++j) {
    est.lhs.push_back(norm_sq(layers[j].values));
  }
  double src = 0.0;
  for (double s : result.source_norms_sq) {
    src = std::max(src, s);
  }
  const double alpha = order.alpha();
  const double l = p.length;
  double constant = l * l * std::pow(p.horizon, alpha) * std::tgamma(1.0 - alpha) / p.c1;
  if (scheme == Scheme::second_order) {
    constant /= 4.0;
  }
  est.rhs = norm_sq(layers.front().values) + constant * src;
  return est;
}

} // namespace fracdiff
