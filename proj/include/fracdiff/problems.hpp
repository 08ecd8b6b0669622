#pragma once

// Manufactured test problems with known exact solutions.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "fracdiff/caputo.hpp"
#include "fracdiff/error.hpp"
#include "fracdiff/reference.hpp"
#include "fracdiff/schemes.hpp"

namespace fracdiff {

/// u(t) = t^{4+alpha}, whose Caputo derivative at t = 1 is Gamma(5+alpha)/24.
struct MonomialProblem {
  FractionalOrder order;
  double exponent;

  explicit MonomialProblem(FractionalOrder o) : order(o), exponent(4.0 + o.alpha()) {}

  double u(double t) const { return std::pow(t, exponent); }
  double du(double t) const { return exponent * std::pow(t, exponent - 1.0); }
  double exact_derivative(double t) const { return caputo_monomial(order, exponent, t); }
  double exact_at_one() const { return std::tgamma(5.0 + order.alpha()) / 24.0; }
};

inline MonomialProblem problem_caputo_monomial(const FractionalOrder& order) { return MonomialProblem(order); }

/// u = sin(pi x)(t^3 + 3t^2 + 1), k = 2 - sin(xt), q = 1 - cos(xt) on [0,1]^2.
/// f is obtained from the exact solution: f = D^alpha u - (k u_x)_x + q u.
inline ProblemSpec problem_varcoeff_2nd(const FractionalOrder& order) {
  constexpr double pi = std::numbers::pi;
  const double alpha = order.alpha();
  const double g4 = std::tgamma(4.0 - alpha);
  const double g3 = std::tgamma(3.0 - alpha);

  ProblemSpec p;
  p.k = [](double x, double t) { return 2.0 - std::sin(x * t); };
  p.q = [](double x, double t) { return 1.0 - std::cos(x * t); };
  p.f = [alpha, g3, g4](double x, double t) {
    const double g = t * t * t + 3.0 * t * t + 1.0;
    const double caputo = 6.0 * std::pow(t, 3.0 - alpha) / g4 + 6.0 * std::pow(t, 2.0 - alpha) / g3;
    const double s = std::sin(pi * x);
    const double flux_x = -t * std::cos(x * t) * pi * std::cos(pi * x) - (2.0 - std::sin(x * t)) * pi * pi * s;
    return s * caputo - flux_x * g + (1.0 - std::cos(x * t)) * s * g;
  };
  p.u0 = [](double x) { return std::sin(pi * x); };
  p.exact = [](double x, double t) { return std::sin(pi * x) * (t * t * t + 3.0 * t * t + 1.0); };
  p.length = 1.0;
  p.horizon = 1.0;
  p.c1 = 2.0 - std::sin(1.0); // min of k over [0,1]^2
  p.coefficients_vary_in_x = true;
  return p;
}

/// u = t^2 sin(pi x), k = e^t, q = 1 - sin(2t) on [0,1]^2, u0 = 0.
inline ProblemSpec problem_timecoeff_compact(const FractionalOrder& order) {
  constexpr double pi = std::numbers::pi;
  const double alpha = order.alpha();
  const double g3 = std::tgamma(3.0 - alpha);

  ProblemSpec p;
  p.k = [](double, double t) { return std::exp(t); };
  p.q = [](double, double t) { return 1.0 - std::sin(2.0 * t); };
  p.f = [alpha, g3](double x, double t) {
    const double t2 = t * t;
    return (pi * pi * t2 * std::exp(t) + t2 * (1.0 - std::sin(2.0 * t)) + 2.0 * std::pow(t, 2.0 - alpha) / g3) *
           std::sin(pi * x);
  };
  p.u0 = [](double) { return 0.0; };
  p.exact = [](double x, double t) { return t * t * std::sin(pi * x); };
  p.length = 1.0;
  p.horizon = 1.0;
  p.c1 = 1.0; // min of e^t on [0,1]
  p.coefficients_vary_in_x = false;
  return p;
}

inline constexpr std::array<std::string_view, 3> problem_ids{"caputo-monomial", "varcoeff-2nd", "timecoeff-compact"};

/// PDE problems by id; "caputo-monomial" is a scalar test and is not a PDE.
inline ProblemSpec find_problem(std::string_view id, const FractionalOrder& order) {
  if (id == "varcoeff-2nd") {
    return problem_varcoeff_2nd(order);
  }
  if (id == "timecoeff-compact") {
    return problem_timecoeff_compact(order);
  }
  if (id == "caputo-monomial") {
    throw InvalidArgument("caputo-monomial is a scalar test; use the caputo subcommand");
  }
  throw InvalidArgument("unknown problem '" + std::string(id) + "'");
}

} // namespace fracdiff
