#pragma once

// Refinement studies: grid schedules for the seven reference experiments,
// error/convergence-order reports, and CSV/markdown output.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fracdiff/caputo.hpp"
#include "fracdiff/error.hpp"
#include "fracdiff/grid.hpp"
#include "fracdiff/problems.hpp"
#include "fracdiff/schemes.hpp"

namespace fracdiff {

enum class StudyKind { caputo_l21sigma, caputo_l1, second_order, compact };

/// Which step size the convergence order is measured against.
enum class RefineBy { tau, h };

struct GridLevel {
  std::size_t nx = 0; // 0 for scalar kernel studies
  std::size_t nt = 0;
};

struct StudyPlan {
  int table = 0;
  StudyKind kind = StudyKind::second_order;
  RefineBy refine = RefineBy::h;
  std::vector<double> alphas;
  std::vector<GridLevel> levels;
};

/// The grid schedule of reference table 1..7. With `fast`, table 5 uses
/// tau = 1/5000 instead of 1/20000.
inline StudyPlan plan_for_table(int table, bool fast = false) {
  StudyPlan plan;
  plan.table = table;
  switch (table) {
  case 1:
    plan.kind = StudyKind::caputo_l21sigma;
    plan.refine = RefineBy::tau;
    plan.alphas = {0.9, 0.5, 0.1};
    for (std::size_t m = 10; m <= 5120; m *= 2) {
      plan.levels.push_back({0, m});
    }
    break;
  case 2:
    plan.kind = StudyKind::second_order;
    plan.refine = RefineBy::h;
    plan.alphas = {0.1, 0.5, 0.9, 0.99};
    plan.levels = {{160, 160}, {320, 320}, {640, 640}};
    break;
  case 3:
    plan.kind = StudyKind::second_order;
    plan.refine = RefineBy::tau;
    plan.alphas = {0.1, 0.5, 0.9, 0.99};
    plan.levels = {{1000, 10}, {1000, 20}, {1000, 40}};
    break;
  case 4:
    plan.kind = StudyKind::compact;
    plan.refine = RefineBy::tau;
    plan.alphas = {0.75, 0.85, 0.95};
    plan.levels = {{100, 10}, {100, 20}, {100, 40}, {100, 80}};
    break;
  case 5: {
    plan.kind = StudyKind::compact;
    plan.refine = RefineBy::h;
    plan.alphas = {0.1, 0.5, 0.9};
    const std::size_t m = fast ? 5000 : 20000;
    plan.levels = {{4, m}, {8, m}, {16, m}, {32, m}};
    break;
  }
  case 6:
    plan.kind = StudyKind::compact;
    plan.refine = RefineBy::h;
    plan.alphas = {0.1, 0.5, 0.9};
    for (std::size_t n = 10; n <= 80; n *= 2) {
      plan.levels.push_back({n, n * n});
    }
    break;
  case 7:
    plan.kind = StudyKind::compact;
    plan.refine = RefineBy::tau;
    plan.alphas = {0.7, 0.8, 0.9};
    for (std::size_t m = 10; m <= 2430; m *= 3) {
      const auto n = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
      plan.levels.push_back({n, m});
    }
    break;
  default:
    throw InvalidArgument("table must be in 1..7, got " + std::to_string(table));
  }
  return plan;
}

struct ReportRow {
  double alpha = 0.0;
  std::size_t level = 0; // 1-based within the alpha block
  std::size_t nx = 0;
  std::size_t nt = 0;
  std::optional<double> h;
  double tau = 0.0;
  double err_l2max = 0.0;
  std::optional<double> co_l2max;
  double err_sup = 0.0;
  std::optional<double> co_sup;
  double seconds = 0.0;
  bool apriori_ok = true; // a priori estimate held at every step (PDE runs only)
};

struct ConvergenceReport {
  int table = 0;
  StudyKind kind = StudyKind::second_order;
  std::vector<ReportRow> rows;

  bool apriori_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.apriori_ok; });
  }
};

namespace detail {

/// |D^alpha t^{4+alpha} at t = 1 - exact|, with tau = 1/(M-1+sigma) for
/// L2-1sigma (evaluation at j = M-1) and tau = 1/M for L1 (evaluation at j = M-1, t_M = 1).
inline double monomial_error(const FractionalOrder& order, std::size_t m, bool l1, double& tau) {
  const auto problem = problem_caputo_monomial(order);
  const std::size_t j = m - 1;
  tau = l1 ? 1.0 / static_cast<double>(m) : TimeGrid::unit_collocation(m, order).tau;
  const WeightVector w = l1 ? weights_l1(order, j, tau) : weights(order, j, tau);
  std::vector<double> u(j + 2);
  for (std::size_t s = 0; s < u.size(); ++s) {
    u[s] = problem.u(static_cast<double>(s) * tau);
  }
  return std::abs(fracdiff::apply(w, u) - problem.exact_at_one());
}

inline ReportRow run_level(const StudyPlan& plan, double alpha, const GridLevel& level) {
  const FractionalOrder order(alpha);
  ReportRow row;
  row.alpha = alpha;
  row.nx = level.nx;
  row.nt = level.nt;
  const auto start = std::chrono::steady_clock::now();
  if (plan.kind == StudyKind::caputo_l21sigma || plan.kind == StudyKind::caputo_l1) {
    const double e = monomial_error(order, level.nt, plan.kind == StudyKind::caputo_l1, row.tau);
    row.err_l2max = e;
    row.err_sup = e;
  } else {
    const Scheme scheme = plan.kind == StudyKind::second_order ? Scheme::second_order : Scheme::compact;
    const ProblemSpec p =
        scheme == Scheme::second_order ? problem_varcoeff_2nd(order) : problem_timecoeff_compact(order);
    const RunResult result = run(p, order, scheme, level.nx, level.nt);
    const ErrorNorms e = error_norms(result.history, result.space, p.exact);
    row.h = result.space.h;
    row.tau = result.time.tau;
    row.err_l2max = e.l2max;
    row.err_sup = e.sup;
    row.apriori_ok = a_priori_bound(p, order, scheme, result).holds();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

} // namespace detail

/// Runs every (alpha, level) of the plan on up to `threads` workers and fills
/// the convergence-order columns. Row order follows the plan regardless of
/// scheduling.
inline ConvergenceReport run_study(const StudyPlan& plan, unsigned threads = 1) {
  ConvergenceReport report;
  report.table = plan.table;
  report.kind = plan.kind;
  const std::size_t per_alpha = plan.levels.size();
  const std::size_t total = plan.alphas.size() * per_alpha;
  report.rows.resize(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const double alpha = plan.alphas[task / per_alpha];
      const GridLevel& level = plan.levels[task % per_alpha];
      try {
        report.rows[task] = detail::run_level(plan, alpha, level);
        report.rows[task].level = task % per_alpha + 1;
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(Error("alpha=" + std::to_string(alpha) + " nx=" +
                                                  std::to_string(level.nx) + " nt=" + std::to_string(level.nt) +
                                                  ": " + e.what()));
        }
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(total, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
    for (std::size_t k = 1; k < per_alpha; ++k) {
      ReportRow& fine = report.rows[a * per_alpha + k];
      const ReportRow& coarse = report.rows[a * per_alpha + k - 1];
      const double s_coarse = plan.refine == RefineBy::tau ? coarse.tau : coarse.h.value_or(0.0);
      const double s_fine = plan.refine == RefineBy::tau ? fine.tau : fine.h.value_or(0.0);
      const RefinementLevel l2[] = {{s_coarse, coarse.err_l2max}, {s_fine, fine.err_l2max}};
      const RefinementLevel sup[] = {{s_coarse, coarse.err_sup}, {s_fine, fine.err_sup}};
      fine.co_l2max = convergence_order(l2).front();
      fine.co_sup = convergence_order(sup).front();
    }
  }
  return report;
}

enum class ReportFormat { csv, markdown };

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

inline std::string sci(const std::optional<double>& v) { return v ? sci(*v) : std::string(); }

inline std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// 1/n when v is the reciprocal of an integer, otherwise scientific.
inline std::string step_label(double v) {
  const double inv = 1.0 / v;
  const double r = std::round(inv);
  if (std::abs(inv - r) < 1e-9 * r) {
    return "1/" + std::to_string(static_cast<long long>(r));
  }
  return sci(v);
}

} // namespace detail

inline constexpr const char* csv_header = "alpha,level,h,tau,err_l2max,co_l2max,err_sup,co_sup,seconds";

inline void emit(const ConvergenceReport& report, ReportFormat format, std::ostream& out) {
  using detail::sci;
  if (format == ReportFormat::csv) {
    out << csv_header << '\n';
    for (const auto& r : report.rows) {
      out << detail::fixed(r.alpha, 2) << ',' << r.level << ',' << sci(r.h) << ',' << sci(r.tau) << ','
          << sci(r.err_l2max) << ',' << sci(r.co_l2max) << ',' << sci(r.err_sup) << ',' << sci(r.co_sup) << ','
          << sci(r.seconds) << '\n';
    }
    return;
  }

  const bool scalar = report.kind == StudyKind::caputo_l21sigma || report.kind == StudyKind::caputo_l1;
  out << "Table " << report.table << "\n\n";
  if (scalar) {
    out << "| alpha | M | tau | E(tau) | CO |\n|---|---|---|---|---|\n";
  } else {
    out << "| alpha | N | M | h | tau | max_n \\|z^n\\|_0 | CO | \\|z\\|_C | CO | CPU(s) |\n"
           "|---|---|---|---|---|---|---|---|---|---|\n";
  }
  double prev_alpha = -1.0;
  for (const auto& r : report.rows) {
    const std::string alpha = r.alpha != prev_alpha ? detail::fixed(r.alpha, 2) : "";
    prev_alpha = r.alpha;
    const auto co = [](const std::optional<double>& v) { return v ? detail::fixed(*v, 4) : std::string(); };
    if (scalar) {
      out << "| " << alpha << " | " << r.nt << " | " << sci(r.tau) << " | " << sci(r.err_l2max) << " | "
          << (r.co_l2max ? detail::fixed(*r.co_l2max, 2) : std::string()) << " |\n";
    } else {
      out << "| " << alpha << " | " << r.nx << " | " << r.nt << " | " << detail::step_label(*r.h) << " | "
          << detail::step_label(r.tau) << " | " << sci(r.err_l2max) << " | " << co(r.co_l2max) << " | "
          << sci(r.err_sup) << " | " << co(r.co_sup) << " | " << detail::fixed(r.seconds, 4) << " |\n";
    }
  }
}

inline std::string emit(const ConvergenceReport& report, ReportFormat format) {
  std::ostringstream out;
  emit(report, format, out);
  return out.str();
}

} // namespace fracdiff
