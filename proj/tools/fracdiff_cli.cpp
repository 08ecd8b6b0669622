// Command-line front end: discrete Caputo errors, single solver runs,
// refinement studies and coefficient/stability audits.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fracdiff/fracdiff.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

/// Raised for inputs that pass flag parsing but are not usable.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const CLI::Validator open_unit_interval(
    [](std::string& s) {
      try {
        const double v = std::stod(s);
        if (v > 0.0 && v < 1.0) {
          return std::string();
        }
      } catch (const std::exception&) {
      }
      return "alpha must lie in the open interval (0, 1), got " + s;
    },
    "in (0,1)");

std::string sci(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

struct CaputoArgs {
  double alpha = 0.5;
  std::vector<std::size_t> m;
  std::string formula = "l21sigma";
  std::string function = "monomial";
};

int cmd_caputo(const CaputoArgs& args) {
  const fracdiff::FractionalOrder order(args.alpha);
  const bool l1 = args.formula == "l1";
  std::vector<fracdiff::RefinementLevel> levels;
  std::printf("%-8s %-14s %-14s %s\n", "M", "tau", "E", "CO");
  for (std::size_t m : args.m) {
    if (m < 2) {
      throw UsageError("--m values must be at least 2");
    }
    double tau = 0.0;
    const double e = fracdiff::detail::monomial_error(order, m, l1, tau);
    std::string co;
    if (!levels.empty()) {
      const fracdiff::RefinementLevel pair[] = {levels.back(), {tau, e}};
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", fracdiff::convergence_order(pair).front());
      co = buf;
    }
    levels.push_back({tau, e});
    std::printf("%-8zu %-14s %-14s %s\n", m, sci(tau, 6).c_str(), sci(e, 6).c_str(), co.c_str());
  }
  return exit_ok;
}

struct SolveArgs {
  std::string problem;
  double alpha = 0.5;
  std::size_t nx = 0;
  std::size_t nt = 0;
  std::string scheme = "second";
  std::string out;
};

int cmd_solve(const SolveArgs& args) {
  const fracdiff::FractionalOrder order(args.alpha);
  const auto scheme = args.scheme == "compact" ? fracdiff::Scheme::compact : fracdiff::Scheme::second_order;
  fracdiff::ProblemSpec problem;
  try {
    problem = fracdiff::find_problem(args.problem, order);
  } catch (const fracdiff::InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (scheme == fracdiff::Scheme::compact && problem.coefficients_vary_in_x) {
    throw UsageError("compact scheme requires k=k(t) and q=q(t); problem '" + args.problem +
                     "' has x-dependent coefficients");
  }
  if (args.nx < 2 || args.nt < 1) {
    throw UsageError("--nx must be at least 2 and --nt at least 1");
  }

  const auto result = fracdiff::run(problem, order, scheme, args.nx, args.nt);
  const auto estimate = fracdiff::a_priori_bound(problem, order, scheme, result);

  std::printf("problem %s, scheme %s, alpha %g, h %s, tau %s\n", args.problem.c_str(),
              std::string(fracdiff::to_string(scheme)).c_str(), args.alpha, sci(result.space.h).c_str(),
              sci(result.time.tau).c_str());
  if (problem.has_exact()) {
    const auto e = fracdiff::error_norms(result.history, result.space, problem.exact);
    std::printf("max_n ||z^n||_0 = %s\n||z||_C        = %s\n", sci(e.l2max).c_str(), sci(e.sup).c_str());
  }
  std::printf("a priori: max lhs %s <= rhs %s : %s\n", sci(estimate.worst_lhs()).c_str(), sci(estimate.rhs).c_str(),
              estimate.holds() ? "holds" : "VIOLATED");

  if (!args.out.empty()) {
    std::ofstream file(args.out);
    if (!file) {
      throw UsageError("cannot open " + args.out);
    }
    file << "x,value\n";
    const auto& last = result.history.back().values;
    char buf[64];
    for (std::size_t i = 0; i < last.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.6e,%.17g\n", result.space.node(i), last[i]);
      file << buf;
    }
  }
  return estimate.holds() ? exit_ok : exit_failed;
}

struct StudyArgs {
  int table = 0;
  bool fast = false;
  std::string format = "csv";
  std::string out;
};

int cmd_study(const StudyArgs& args, unsigned threads) {
  const auto plan = fracdiff::plan_for_table(args.table, args.fast);
  const auto report = fracdiff::run_study(plan, threads);
  const auto format = args.format == "markdown" ? fracdiff::ReportFormat::markdown : fracdiff::ReportFormat::csv;
  if (args.out.empty()) {
    fracdiff::emit(report, format, std::cout);
  } else {
    std::ofstream file(args.out);
    if (!file) {
      throw UsageError("cannot open " + args.out);
    }
    fracdiff::emit(report, format, file);
  }
  if (!report.apriori_ok()) {
    std::fprintf(stderr, "a priori estimate violated in at least one run\n");
    return exit_failed;
  }
  return exit_ok;
}

struct AuditArgs {
  double alpha = 0.5;
  std::size_t jmax = 1000;
  std::string weights = "l21sigma";
};

void print_check(const fracdiff::AuditCheck& c) {
  std::printf("%-5s %-18s worst margin %s at index %zu (%zu evaluated)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
              c.evaluated ? sci(c.worst_margin, 6).c_str() : "n/a", c.worst_index, c.evaluated);
}

int cmd_audit(const AuditArgs& args) {
  const fracdiff::FractionalOrder order(args.alpha);
  const double tau = 1.0 / static_cast<double>(args.jmax + 1);
  const bool l1 = args.weights == "l1";

  std::printf("coefficients (%s, alpha %g, j <= %zu)\n", args.weights.c_str(), args.alpha, args.jmax);
  // L1 vectors for successive j are prefixes of one another, so the longest covers all.
  const auto audit = l1 ? fracdiff::audit_weights(fracdiff::weights_l1(order, args.jmax, tau))
                        : fracdiff::audit_weight_family(order, args.jmax);
  for (const auto& c : audit.checks) {
    print_check(c);
  }

  fracdiff::StabilityReport report;
  if (l1) {
    fracdiff::L1Provider provider(order, tau);
    report = fracdiff::check_stability_conditions(provider, args.jmax);
  } else {
    fracdiff::L21SigmaProvider provider(order, tau);
    report = fracdiff::check_stability_conditions(provider, args.jmax);
  }
  std::printf("stability hypotheses (tau %s)\n", sci(tau).c_str());
  const auto failure = report.first_failure();
  std::printf("%-5s %-18s\n", report.monotone_ok ? "PASS" : "FAIL", "g-monotone");
  std::printf("%-5s %-18s c2 = %s\n", report.floor_ok ? "PASS" : "FAIL", "g0-floor", sci(report.c2, 6).c_str());
  std::printf("%-5s %-18s\n", report.sigma_ok ? "PASS" : "FAIL", "sigma-range");
  if (failure) {
    std::printf("first failing step j = %zu\n", *failure);
  }
  return audit.passed() && report.passed() ? exit_ok : exit_failed;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Caputo derivatives and time-fractional diffusion solvers"};
  app.require_subcommand(1, 1);
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "Worker threads for studies; 1 gives the sequential path")
      ->check(CLI::PositiveNumber);

  CaputoArgs caputo;
  auto* caputo_cmd = app.add_subcommand("caputo", "Error of the discrete Caputo derivative of t^{4+alpha} at t=1");
  caputo_cmd->add_option("--alpha", caputo.alpha, "Order alpha in (0,1)")->required()->check(open_unit_interval);
  caputo_cmd->add_option("--m", caputo.m, "Step counts M, comma separated")->required()->delimiter(',');
  caputo_cmd->add_option("--formula", caputo.formula, "l21sigma or l1")
      ->check(CLI::IsMember({"l21sigma", "l1"}))
      ->capture_default_str();
  caputo_cmd->add_option("--function", caputo.function, "Test function (monomial)")
      ->check(CLI::IsMember({"monomial"}))
      ->capture_default_str();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one solver and report errors against the exact solution");
  solve_cmd->add_option("--problem", solve.problem, "varcoeff-2nd or timecoeff-compact")->required();
  solve_cmd->add_option("--alpha", solve.alpha, "Order alpha in (0,1)")->required()->check(open_unit_interval);
  solve_cmd->add_option("--nx", solve.nx, "Spatial subintervals N")->required();
  solve_cmd->add_option("--nt", solve.nt, "Time steps M")->required();
  solve_cmd->add_option("--scheme", solve.scheme, "second or compact")
      ->check(CLI::IsMember({"second", "compact"}))
      ->capture_default_str();
  solve_cmd->add_option("--out", solve.out, "Write the final layer as CSV x,value");

  StudyArgs study;
  auto* study_cmd = app.add_subcommand("study", "Reproduce one of the reference convergence tables");
  study_cmd->add_option("--table", study.table, "Table id 1..7")->required()->check(CLI::Range(1, 7));
  study_cmd->add_flag("--fast", study.fast, "Table 5 with tau=1/5000 instead of 1/20000");
  study_cmd->add_option("--format", study.format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}))
      ->capture_default_str();
  study_cmd->add_option("--out", study.out, "Output file (default: standard output)");

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "Check coefficient inequalities and stability hypotheses");
  audit_cmd->add_option("--alpha", audit.alpha, "Order alpha in (0,1)")->required()->check(open_unit_interval);
  audit_cmd->add_option("--jmax", audit.jmax, "Largest target index")->capture_default_str();
  audit_cmd->add_option("--weights", audit.weights, "l21sigma or l1")
      ->check(CLI::IsMember({"l21sigma", "l1"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*caputo_cmd) {
      return cmd_caputo(caputo);
    }
    if (*solve_cmd) {
      return cmd_solve(solve);
    }
    if (*study_cmd) {
      return cmd_study(study, threads);
    }
    return cmd_audit(audit);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_usage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_failed;
  }
}
