#pragma once

// High-accuracy evaluation of the continuous Caputo derivative, used as an
// oracle for the discrete operators and for manufactured right-hand sides.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <functional>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracdiff/caputo.hpp"
#include "fracdiff/error.hpp"

namespace fracdiff {

/// Caputo derivative of t^p at t: Gamma(p+1)/Gamma(p+1-alpha) t^{p-alpha}; zero for p = 0.
inline double caputo_monomial(const FractionalOrder& order, double p, double t) {
  if (p == 0.0) {
    return 0.0;
  }
  if (!(p > 0.0)) {
    throw InvalidArgument("monomial exponent must be non-negative");
  }
  const double alpha = order.alpha();
  return std::exp(std::lgamma(p + 1.0) - std::lgamma(p + 1.0 - alpha)) * std::pow(t, p - alpha);
}

/// (1/Gamma(1-alpha)) int_0^{t*} u'(eta) (t* - eta)^{-alpha} d eta, given u'.
///
/// The substitution eta = t* - zeta^{1/(1-alpha)} absorbs the kernel
/// singularity, leaving
///   1/Gamma(2-alpha) int_0^{t*^{1-alpha}} u'(t* - zeta^{1/(1-alpha)}) d zeta,
/// which is integrated by tanh-sinh quadrature (the remaining endpoint
/// behaviour zeta^{1/(1-alpha)} is mild for it). Throws QuadratureFailure when
/// the error estimate exceeds rel_tol times the L1 norm.
inline double caputo_reference(const FractionalOrder& order, const std::function<double(double)>& derivative,
                               double t_star, double rel_tol = 1e-12) {
  if (t_star < 0.0) {
    throw InvalidArgument("evaluation time must be non-negative");
  }
  if (t_star == 0.0) {
    return 0.0;
  }
  const double alpha = order.alpha();
  const double exponent = 1.0 / (1.0 - alpha);
  const double upper = std::pow(t_star, 1.0 - alpha);
  auto integrand = [&](double zeta) { return derivative(std::max(0.0, t_star - std::pow(zeta, exponent))); };

  static thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    value = rule.integrate(integrand, 0.0, upper, rel_tol * 0.01, &error, &l1);
  } catch (const std::exception& e) {
    throw QuadratureFailure(std::string("Caputo reference quadrature failed: ") + e.what());
  }
  if (!std::isfinite(value) || !(error <= rel_tol * l1 || error == 0.0)) {
    throw QuadratureFailure("Caputo reference quadrature did not converge: error estimate " + std::to_string(error) +
                            " against L1 norm " + std::to_string(l1));
  }
  return value / std::tgamma(2.0 - alpha);
}

} // namespace fracdiff
