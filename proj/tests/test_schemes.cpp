#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "fracdiff/problems.hpp"
#include "fracdiff/schemes.hpp"

using namespace fracdiff;

namespace {

constexpr double pi = std::numbers::pi;

ProblemSpec zero_problem(bool vary_in_x) {
  ProblemSpec p;
  p.k = [](double x, double t) { return 1.0 + x + t; };
  p.q = [](double, double) { return 0.5; };
  p.f = [](double, double) { return 0.0; };
  p.u0 = [](double) { return 0.0; };
  p.coefficients_vary_in_x = vary_in_x;
  if (!vary_in_x) {
    p.k = [](double, double t) { return 1.0 + t; };
  }
  return p;
}

// u = (1 + 2t) x (1 - x): linear in t and quadratic in x, so both schemes
// reproduce it up to rounding.
ProblemSpec linear_quadratic(double alpha) {
  const double g2 = boost::math::tgamma(2.0 - alpha);
  ProblemSpec p;
  p.k = [](double, double t) { return 1.0 + t; };
  p.q = [](double, double t) { return 2.0 + t; };
  p.f = [alpha, g2](double x, double t) {
    const double w = x * (1 - x);
    return 2 * std::pow(t, 1 - alpha) / g2 * w + 2 * (1 + t) * (1 + 2 * t) + (2 + t) * (1 + 2 * t) * w;
  };
  p.u0 = [](double x) { return x * (1 - x); };
  p.exact = [](double x, double t) { return (1 + 2 * t) * x * (1 - x); };
  p.coefficients_vary_in_x = false;
  return p;
}

// Time-independent u = sin(pi x); the discrete solution differs from it only
// through the spatial truncation error.
ProblemSpec steady_sine(bool vary_in_x) {
  ProblemSpec p;
  if (vary_in_x) {
    p.k = [](double x, double) { return 1.0 + 0.5 * x; };
    p.f = [](double x, double) {
      return -0.5 * pi * std::cos(pi * x) + (1.0 + 0.5 * x) * pi * pi * std::sin(pi * x) + std::sin(pi * x);
    };
  } else {
    p.k = [](double, double) { return 2.0; };
    p.f = [](double x, double) { return (2 * pi * pi + 1) * std::sin(pi * x); };
  }
  p.q = [](double, double) { return 1.0; };
  p.u0 = [](double x) { return std::sin(pi * x); };
  p.exact = [](double x, double) { return std::sin(pi * x); };
  p.coefficients_vary_in_x = vary_in_x;
  return p;
}

double max_error(const ProblemSpec& p, const RunResult& r) { return error_norms(r.history, r.space, p.exact).sup; }

} // namespace

TEST(Schemes, ZeroDataGiveIdenticallyZeroHistory) {
  const FractionalOrder o(0.6);
  for (const Scheme s : {Scheme::second_order, Scheme::compact}) {
    const auto p = zero_problem(s == Scheme::second_order);
    const auto r = run(p, o, s, 16, 20);
    ASSERT_EQ(r.history.size(), 21u);
    for (const auto& layer : r.history.layers()) {
      for (double v : layer.values) {
        ASSERT_EQ(v, 0.0);
      }
    }
    const auto est = a_priori_bound(p, o, s, r);
    EXPECT_EQ(est.worst_lhs(), 0.0);
    EXPECT_EQ(est.rhs, 0.0);
  }
}

TEST(Schemes, SingleInteriorNodeMatchesScalarQuotient) {
  const FractionalOrder o(0.4);
  ProblemSpec p;
  p.k = [](double x, double t) { return 2.0 + x * t + x; };
  p.q = [](double x, double t) { return x + t; };
  p.f = [](double x, double t) { return 3.0 * x + t; };
  p.u0 = [](double x) { return x * (1 - x); };
  const SpaceGrid space(2, 1.0);
  const TimeGrid time = TimeGrid::uniform(4, 1.0);
  auto history = start_history(p, space);
  const auto& layer = step_second_order(p, o, space, time, history);

  const double s = o.sigma();
  const double tc = s * time.tau;
  const double g0 = o.scale(time.tau) * std::pow(s, 1 - o.alpha());
  const double a1 = p.k(0.25, tc), a2 = p.k(0.75, tc), d1 = p.q(0.5, tc), phi = p.f(0.5, tc);
  const double y0 = 0.25;
  const double h2 = 0.25;
  const double rhs = g0 * y0 + (1 - s) * (-(a1 + a2) * y0 / h2 - d1 * y0) + phi;
  const double want = rhs / (g0 + s * (a1 + a2) / h2 + s * d1);
  EXPECT_NEAR(layer.values[1], want, 1e-15 * std::abs(want));
  EXPECT_EQ(layer.values[0], 0.0);
  EXPECT_EQ(layer.values[2], 0.0);
  EXPECT_DOUBLE_EQ(layer.time, 0.25);
}

TEST(Schemes, LinearInTimeQuadraticInSpaceIsReproducedExactly) {
  for (double alpha : {0.2, 0.7}) {
    const FractionalOrder o(alpha);
    const auto p = linear_quadratic(alpha);
    for (const Scheme s : {Scheme::second_order, Scheme::compact}) {
      const auto r = run(p, o, s, 12, 30);
      EXPECT_LT(max_error(p, r), 1e-12) << alpha << " " << to_string(s);
    }
  }
}

TEST(Schemes, StepApiMatchesRunBitForBit) {
  const FractionalOrder o(0.5);
  const auto second = problem_varcoeff_2nd(o);
  const auto compact = problem_timecoeff_compact(o);
  const auto r2 = run_second_order(second, o, 20, 7);
  const auto rc = run_compact(compact, o, 20, 7);
  auto h2 = start_history(second, r2.space);
  auto hc = start_history(compact, rc.space);
  for (int j = 0; j < 7; ++j) {
    step_second_order(second, o, r2.space, r2.time, h2);
    step_compact(compact, o, rc.space, rc.time, hc);
  }
  for (std::size_t j = 0; j < 8; ++j) {
    EXPECT_EQ(h2[j].values, r2.history[j].values);
    EXPECT_EQ(hc[j].values, rc.history[j].values);
  }
}

TEST(Schemes, RunsAreDeterministic) {
  const FractionalOrder o(0.3);
  const auto p = problem_varcoeff_2nd(o);
  const auto a = run_second_order(p, o, 40, 40);
  const auto b = run_second_order(p, o, 40, 40);
  EXPECT_EQ(a.history.back().values, b.history.back().values);
}

TEST(Schemes, NearUnitOrderStepMatchesCrankNicolson) {
  const FractionalOrder o(1.0 - 1e-6);
  ProblemSpec p;
  p.k = [](double, double) { return 1.0; };
  p.q = [](double, double) { return 0.0; };
  p.f = [](double, double) { return 0.0; };
  p.u0 = [](double x) { return std::sin(pi * x) + 0.3 * std::sin(2 * pi * x); };
  const std::size_t n = 32;
  const SpaceGrid space(n, 1.0);
  const TimeGrid time = TimeGrid::uniform(100, 1.0);
  auto history = start_history(p, space);
  const auto y1 = step_second_order(p, o, space, time, history).values;

  // (y1 - y0)/tau = (delta^2 y1 + delta^2 y0) / 2
  const auto& y0 = history[0].values;
  const double r = time.tau / (2 * space.h * space.h);
  TridiagonalSystem cn(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    cn.sub[i - 1] = -r;
    cn.super[i - 1] = -r;
    cn.diag[i - 1] = 1 + 2 * r;
    cn.rhs[i - 1] = y0[i] + r * (y0[i + 1] - 2 * y0[i] + y0[i - 1]);
  }
  const auto x = solve_tridiagonal(cn);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    diff = std::max(diff, std::abs(y1[i] - x[i - 1]));
    scale = std::max(scale, std::abs(x[i - 1]));
  }
  EXPECT_LT(diff, 1e-4 * scale);
}

TEST(Schemes, SecondOrderSpatialConvergence) {
  const FractionalOrder o(0.5);
  const auto p = steady_sine(true);
  std::vector<RefinementLevel> levels;
  for (std::size_t n : {8u, 16u, 32u, 64u}) {
    levels.push_back({1.0 / n, max_error(p, run_second_order(p, o, n, 4))});
  }
  for (double order : convergence_order(levels)) {
    EXPECT_NEAR(order, 2.0, 0.1);
  }
}

TEST(Schemes, CompactSpatialConvergence) {
  const FractionalOrder o(0.5);
  const auto p = steady_sine(false);
  std::vector<RefinementLevel> levels;
  for (std::size_t n : {4u, 8u, 16u, 32u}) {
    levels.push_back({1.0 / n, max_error(p, run_compact(p, o, n, 4))});
  }
  for (double order : convergence_order(levels)) {
    EXPECT_NEAR(order, 4.0, 0.1);
  }
}

TEST(Schemes, CompactOperatorTruncationIsFourthOrder) {
  // a delta^2 u - H(a u'') for u = sin(pi x): the spatial truncation of the
  // compact discretization; without H it is the second-order truncation.
  const double a = 1.7;
  std::vector<RefinementLevel> compact, plain;
  for (std::size_t n : {8u, 16u, 32u, 64u}) {
    const double h = 1.0 / n;
    double rc = 0.0, rp = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double x = i * h;
      const double d2 = (std::sin(pi * (x + h)) - 2 * std::sin(pi * x) + std::sin(pi * (x - h))) / (h * h);
      const double lu = [&](double xx) { return -a * pi * pi * std::sin(pi * xx); }(x);
      const double hlu = (-a * pi * pi) * (std::sin(pi * (x - h)) + 10 * std::sin(pi * x) + std::sin(pi * (x + h))) / 12;
      rc = std::max(rc, std::abs(a * d2 - hlu));
      rp = std::max(rp, std::abs(a * d2 - lu));
    }
    compact.push_back({h, rc});
    plain.push_back({h, rp});
  }
  for (double order : convergence_order(compact)) {
    EXPECT_NEAR(order, 4.0, 0.05);
  }
  for (double order : convergence_order(plain)) {
    EXPECT_NEAR(order, 2.0, 0.05);
  }
}

TEST(Schemes, DominanceViolationIsReported) {
  const FractionalOrder o(0.5);
  for (const Scheme s : {Scheme::second_order, Scheme::compact}) {
    auto p = zero_problem(s == Scheme::second_order);
    p.q = [](double, double) { return -1e6; };
    EXPECT_THROW(run(p, o, s, 8, 4), InvariantViolation);
  }
}

TEST(Schemes, CompactRejectsSpaceDependentCoefficients) {
  const FractionalOrder o(0.5);
  const auto p = problem_varcoeff_2nd(o);
  EXPECT_THROW(run_compact(p, o, 8, 4), InvalidArgument);
  auto history = start_history(p, SpaceGrid(8, 1.0));
  EXPECT_THROW(step_compact(p, o, SpaceGrid(8, 1.0), TimeGrid::uniform(4, 1.0), history), InvalidArgument);
}

TEST(Schemes, RejectsIncompleteProblem) {
  ProblemSpec p;
  EXPECT_THROW(run_second_order(p, FractionalOrder(0.5), 8, 4), InvalidArgument);
}

TEST(Schemes, L1ProviderConvergesInTime) {
  const FractionalOrder o(0.5);
  const auto p = problem_varcoeff_2nd(o);
  std::vector<RefinementLevel> levels;
  for (std::size_t m : {10u, 20u, 40u}) {
    L1Provider provider(o, 1.0 / m);
    const auto r = run_weighted(p, Scheme::second_order, provider, 400, m);
    levels.push_back({1.0 / m, error_norms(r.history, r.space, p.exact).l2max});
  }
  for (double order : convergence_order(levels)) {
    EXPECT_GT(order, 0.9);
    EXPECT_LT(order, 2.0);
  }
}

TEST(AprioriBound, TableRunSatisfiesEstimate) {
  const FractionalOrder o(0.5);
  const auto p = problem_varcoeff_2nd(o);
  const auto r = run_second_order(p, o, 160, 160);
  const auto est = a_priori_bound(p, o, Scheme::second_order, r);
  EXPECT_EQ(est.lhs.size(), 160u);
  EXPECT_TRUE(est.holds());
}

TEST(AprioriBound, RandomSmoothData) {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> alpha(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    const FractionalOrder o(alpha(rng));
    const double f1 = 10 * u(rng), f2 = 10 * u(rng), w = 5 * u(rng), b1 = u(rng), b3 = u(rng);
    const double k0 = 0.5 + std::abs(u(rng));
    for (const Scheme s : {Scheme::second_order, Scheme::compact}) {
      ProblemSpec p;
      p.c1 = k0;
      if (s == Scheme::second_order) {
        p.k = [k0](double x, double t) { return k0 * (1.5 + 0.5 * std::sin(3 * x + t)); };
      } else {
        p.k = [k0](double, double t) { return k0 * (1.5 + 0.5 * std::cos(2 * t)); };
      }
      p.coefficients_vary_in_x = s == Scheme::second_order;
      p.q = [](double, double t) { return t * t; };
      p.f = [=](double x, double t) { return f1 * std::sin(pi * x) * std::cos(w * t) + f2 * x * (1 - x); };
      p.u0 = [=](double x) { return b1 * std::sin(pi * x) + b3 * std::sin(3 * pi * x); };
      const auto r = run(p, o, s, 64, 64);
      EXPECT_TRUE(a_priori_bound(p, o, s, r).holds()) << trial;
    }
  }
}
