#pragma once

// Discrete Caputo derivatives on a uniform time mesh: the L2-1sigma
// formula (quadratic interpolation on history intervals, collocation at
// t_{j+sigma}) and the classical L1 formula, plus executable checks of
// the inequalities satisfied by the L2-1sigma coefficients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracdiff/error.hpp"

namespace fracdiff {

/// Order alpha of the Caputo derivative, restricted to the open interval (0, 1).
/// Carries the collocation offset sigma = 1 - alpha/2.
class FractionalOrder {
public:
  explicit FractionalOrder(double alpha) : alpha_(alpha), sigma_(1.0 - 0.5 * alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw InvalidArgument("fractional order must lie in (0, 1), got " + std::to_string(alpha));
    }
  }

  double alpha() const noexcept { return alpha_; }
  double sigma() const noexcept { return sigma_; }

  /// tau^{-alpha} / Gamma(2 - alpha): turns coefficient-weighted first
  /// differences into a derivative approximation.
  double scale(double tau) const { return std::pow(tau, -alpha_) / std::tgamma(2.0 - alpha_); }

private:
  double alpha_;
  double sigma_;
};

/// Uniform time mesh t_s = s * tau.
struct TimeGrid {
  std::size_t steps = 0;
  double tau = 0.0;
  double horizon = 0.0;

  /// tau = horizon / steps.
  static TimeGrid uniform(std::size_t steps, double horizon) {
    if (steps == 0 || !(horizon > 0.0)) {
      throw InvalidArgument("time grid needs at least one step and a positive horizon");
    }
    return TimeGrid{steps, horizon / static_cast<double>(steps), horizon};
  }

  /// tau = 1/(M - 1 + sigma), so that the collocation point t_{M-1+sigma} is 1.
  static TimeGrid unit_collocation(std::size_t steps, const FractionalOrder& order) {
    if (steps == 0) {
      throw InvalidArgument("time grid needs at least one step");
    }
    const double tau = 1.0 / (static_cast<double>(steps) - 1.0 + order.sigma());
    return TimeGrid{steps, tau, 1.0};
  }

  double node(std::size_t s) const { return static_cast<double>(s) * tau; }
  double shifted(std::size_t j, double sigma) const { return (static_cast<double>(j) + sigma) * tau; }
};

namespace detail {

/// (x + 1)^p - x^p for x >= 0, evaluated without cancellation.
inline double power_step(double x, double p) {
  if (x == 0.0) {
    return 1.0;
  }
  return std::pow(x, p) * std::expm1(p * std::log1p(1.0 / x));
}

/// Trapezoidal-rule defect of y^{1-alpha} on [x, x + 1]:
///   int_x^{x+1} y^{1-alpha} dy - ((x+1)^{1-alpha} + x^{1-alpha}) / 2.
/// For x >= 2 the two leading orders of the binomial expansion in 1/x cancel
/// exactly and the remainder is summed directly, keeping full relative accuracy
/// even though the defect is O(x^{-1-alpha}) against O(x^{2-alpha}) terms.
inline double trapezoid_defect(double x, double alpha) {
  const double p = 1.0 - alpha;
  if (x >= 2.0) {
    const double u = 1.0 / x;
    double binom = 0.5 * p * (p - 1.0); // binom(p, 2)
    double upow = u * u * u;
    double sum = 0.0;
    for (int k = 3; k < 400; ++k) {
      const double term = binom * (1.0 / k - 0.5) * upow;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) {
        break;
      }
      binom *= (p - static_cast<double>(k - 1)) / static_cast<double>(k);
      upow *= u;
    }
    return std::pow(x, 2.0 - alpha) * sum;
  }
  return power_step(x, 2.0 - alpha) / (2.0 - alpha) - 0.5 * (std::pow(x + 1.0, p) + std::pow(x, p));
}

} // namespace detail

/// a_0 = sigma^{1-alpha}; a_l = (l+sigma)^{1-alpha} - (l-1+sigma)^{1-alpha}.
inline double coeff_a(const FractionalOrder& order, std::size_t l) {
  const double p = 1.0 - order.alpha();
  if (l == 0) {
    return std::pow(order.sigma(), p);
  }
  return detail::power_step(static_cast<double>(l) - 1.0 + order.sigma(), p);
}

/// b_l for l >= 1: the weight of the second difference on history interval l.
inline double coeff_b(const FractionalOrder& order, std::size_t l) {
  if (l == 0) {
    throw InvalidArgument("coeff_b is defined for l >= 1");
  }
  return detail::trapezoid_defect(static_cast<double>(l) - 1.0 + order.sigma(), order.alpha());
}

enum class WeightKind { l21sigma, l1 };

inline std::string_view to_string(WeightKind kind) {
  return kind == WeightKind::l21sigma ? "l21sigma" : "l1";
}

/// Convolution coefficients c_0..c_j for one target index j. Coefficient
/// c_{j-s} multiplies the increment u^{s+1} - u^s, so c_0 belongs to the
/// newest increment.
class WeightVector {
public:
  WeightVector(WeightKind kind, std::vector<double> coefficients, double scale,
               std::optional<FractionalOrder> order = std::nullopt)
      : kind_(kind), coefficients_(std::move(coefficients)), scale_(scale), order_(order) {
    if (coefficients_.empty()) {
      throw InvalidArgument("weight vector needs at least one coefficient");
    }
  }

  WeightKind kind() const noexcept { return kind_; }
  std::size_t target_index() const noexcept { return coefficients_.size() - 1; }
  std::size_t size() const noexcept { return coefficients_.size(); }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  double operator[](std::size_t s) const { return coefficients_[s]; }
  double scale() const noexcept { return scale_; }
  const std::optional<FractionalOrder>& order() const noexcept { return order_; }

private:
  WeightKind kind_;
  std::vector<double> coefficients_;
  double scale_;
  std::optional<FractionalOrder> order_;
};

/// L2-1sigma coefficients for target index j (approximation at t_{j+sigma}).
inline WeightVector weights(const FractionalOrder& order, std::size_t j, double tau) {
  if (!(tau > 0.0)) {
    throw InvalidArgument("time step must be positive");
  }
  std::vector<double> c(j + 1);
  if (j == 0) {
    c[0] = coeff_a(order, 0);
  } else {
    c[0] = coeff_a(order, 0) + coeff_b(order, 1);
    for (std::size_t s = 1; s < j; ++s) {
      c[s] = coeff_a(order, s) + coeff_b(order, s + 1) - coeff_b(order, s);
    }
    c[j] = coeff_a(order, j) - coeff_b(order, j);
  }
  return WeightVector(WeightKind::l21sigma, std::move(c), order.scale(tau), order);
}

/// Uniform-mesh L1 coefficients for target index j (approximation at t_{j+1}):
/// c_m = (m+1)^{1-alpha} - m^{1-alpha}.
inline WeightVector weights_l1(const FractionalOrder& order, std::size_t j, double tau) {
  if (!(tau > 0.0)) {
    throw InvalidArgument("time step must be positive");
  }
  std::vector<double> c(j + 1);
  for (std::size_t m = 0; m <= j; ++m) {
    c[m] = detail::power_step(static_cast<double>(m), 1.0 - order.alpha());
  }
  return WeightVector(WeightKind::l1, std::move(c), order.scale(tau), order);
}

/// Caches a_l and b_l so that coefficient vectors for successive target
/// indices cost O(j) additions instead of O(j) power evaluations. The vectors
/// are assembled with the same expressions as weights(), so they agree bit for bit.
class L21SigmaTable {
public:
  explicit L21SigmaTable(FractionalOrder order) : order_(order) {}

  const FractionalOrder& order() const noexcept { return order_; }

  void coefficients(std::size_t j, std::vector<double>& out) {
    extend(j + 1);
    out.resize(j + 1);
    if (j == 0) {
      out[0] = a_[0];
      return;
    }
    out[0] = a_[0] + b_[1];
    for (std::size_t s = 1; s < j; ++s) {
      out[s] = a_[s] + b_[s + 1] - b_[s];
    }
    out[j] = a_[j] - b_[j];
  }

private:
  void extend(std::size_t l_max) {
    while (a_.size() <= l_max) {
      const std::size_t l = a_.size();
      a_.push_back(coeff_a(order_, l));
      b_.push_back(l == 0 ? 0.0 : coeff_b(order_, l));
    }
  }

  FractionalOrder order_;
  std::vector<double> a_;
  std::vector<double> b_; // b_[0] unused
};

/// Cached L1 coefficients (m+1)^{1-alpha} - m^{1-alpha}.
class L1Table {
public:
  explicit L1Table(FractionalOrder order) : order_(order) {}

  const FractionalOrder& order() const noexcept { return order_; }

  void coefficients(std::size_t j, std::vector<double>& out) {
    while (d_.size() <= j) {
      d_.push_back(detail::power_step(static_cast<double>(d_.size()), 1.0 - order_.alpha()));
    }
    out.assign(d_.begin(), d_.begin() + static_cast<std::ptrdiff_t>(j + 1));
  }

private:
  FractionalOrder order_;
  std::vector<double> d_;
};

/// scale * sum_{s=0}^{j} c_{j-s} (u^{s+1} - u^s) for a series u^0..u^{j+1}.
inline double apply(const WeightVector& w, std::span<const double> series) {
  const std::size_t j = w.target_index();
  if (series.size() != j + 2) {
    throw InvalidArgument("series length " + std::to_string(series.size()) + " does not match weight vector (expected " +
                          std::to_string(j + 2) + ")");
  }
  const auto c = w.coefficients();
  double sum = 0.0;
  for (std::size_t s = 0; s <= j; ++s) {
    sum += c[j - s] * (series[s + 1] - series[s]);
  }
  return w.scale() * sum;
}

// ---------------------------------------------------------------------------
// Coefficient audits

struct AuditCheck {
  std::string name;
  bool passed = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::size_t worst_index = 0;
  std::size_t evaluated = 0;
};

struct WeightAudit {
  std::vector<AuditCheck> checks;

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) {
        return false;
      }
    }
    return true;
  }

  const AuditCheck* find(std::string_view name) const {
    for (const auto& c : checks) {
      if (c.name == name) {
        return &c;
      }
    }
    return nullptr;
  }
};

namespace detail {

class MarginTracker {
public:
  explicit MarginTracker(std::string name) { check_.name = std::move(name); }

  void add(double margin, std::size_t index) {
    ++check_.evaluated;
    if (margin < check_.worst_margin || std::isnan(margin)) {
      check_.worst_margin = margin;
      check_.worst_index = index;
    }
  }

  AuditCheck finish(double slack) {
    check_.passed = check_.evaluated == 0 || check_.worst_margin > -slack;
    return check_;
  }

private:
  AuditCheck check_;
};

} // namespace detail

/// Checks one coefficient vector. Positivity and strict decrease apply to
/// every kind; for L2-1sigma vectors with a known order the tail lower bound,
/// the gate inequality (2 sigma - 1) c_0 - sigma c_1 > 0, the bracket
/// 1/2 < kappa_s < 1/(2 - alpha) and positivity of b_s are checked as well.
/// A check passes when its worst margin exceeds -slack.
inline WeightAudit audit_weights(const WeightVector& w, double slack = 1e-12) {
  const auto c = w.coefficients();
  const std::size_t j = w.target_index();

  detail::MarginTracker positivity("positivity");
  detail::MarginTracker monotone("monotonicity");
  for (std::size_t s = 0; s <= j; ++s) {
    positivity.add(c[s], s);
    if (s < j) {
      monotone.add(c[s] - c[s + 1], s);
    }
  }

  WeightAudit audit;
  audit.checks.push_back(positivity.finish(slack));
  audit.checks.push_back(monotone.finish(slack));

  if (w.kind() != WeightKind::l21sigma || !w.order()) {
    return audit;
  }

  const FractionalOrder& order = *w.order();
  const double alpha = order.alpha();
  const double sigma = order.sigma();

  detail::MarginTracker tail("tail-lower-bound");
  detail::MarginTracker gate("gate");
  detail::MarginTracker kappa("kappa-bounds");
  detail::MarginTracker bpos("b-positivity");
  if (j >= 1) {
    tail.add(c[j] - 0.5 * (1.0 - alpha) * std::pow(static_cast<double>(j) + sigma, -alpha), j);
    gate.add((2.0 * sigma - 1.0) * c[0] - sigma * c[1], j);
  }
  const double kappa_upper = 1.0 / (2.0 - alpha);
  for (std::size_t s = 1; s <= j; ++s) {
    const double a = coeff_a(order, s);
    const double b = coeff_b(order, s);
    const double excess = b / a; // kappa_s - 1/2
    kappa.add(std::min(excess, kappa_upper - (0.5 + excess)), s);
    bpos.add(b, s);
  }
  audit.checks.push_back(tail.finish(slack));
  audit.checks.push_back(gate.finish(slack));
  audit.checks.push_back(kappa.finish(slack));
  audit.checks.push_back(bpos.finish(slack));
  return audit;
}

/// Audits the L2-1sigma vectors for every target index 0..j_max at once.
///
/// For j >= 1 the vector is c_0 = a_0 + b_1, c_s = r_s := a_s + b_{s+1} - b_s
/// (1 <= s <= j-1) and the tail c_j = a_j - b_j. Only the tail depends on j,
/// so the union over all j of the pairwise comparisons reduces to
///   c_0 > tail_1,  c_0 > r_1,  r_s > r_{s+1} (s <= j_max-2),  r_{j-1} > tail_j,
/// which is O(j_max) instead of O(j_max^2).
inline WeightAudit audit_weight_family(const FractionalOrder& order, std::size_t j_max, double slack = 1e-12) {
  const double alpha = order.alpha();
  const double sigma = order.sigma();

  std::vector<double> a(j_max + 2);
  std::vector<double> b(j_max + 2, 0.0);
  for (std::size_t l = 0; l < a.size(); ++l) {
    a[l] = coeff_a(order, l);
    if (l > 0) {
      b[l] = coeff_b(order, l);
    }
  }

  detail::MarginTracker positivity("positivity");
  detail::MarginTracker monotone("monotonicity");
  detail::MarginTracker tail("tail-lower-bound");
  detail::MarginTracker gate("gate");
  detail::MarginTracker kappa("kappa-bounds");
  detail::MarginTracker bpos("b-positivity");

  positivity.add(a[0], 0); // j = 0: the single coefficient a_0

  if (j_max >= 1) {
    const double c0 = a[0] + b[1];
    positivity.add(c0, 0);
    const auto regular = [&](std::size_t s) { return a[s] + b[s + 1] - b[s]; };
    const auto last = [&](std::size_t jj) { return a[jj] - b[jj]; };

    // target index 1: (c_0, tail_1)
    monotone.add(c0 - last(1), 1);
    gate.add((2.0 * sigma - 1.0) * c0 - sigma * last(1), 1);
    if (j_max >= 2) {
      monotone.add(c0 - regular(1), 0);
      gate.add((2.0 * sigma - 1.0) * c0 - sigma * regular(1), 2);
    }
    for (std::size_t s = 1; s + 1 < j_max; ++s) {
      positivity.add(regular(s), s);
      monotone.add(regular(s) - regular(s + 1), s);
    }
    if (j_max >= 2) {
      positivity.add(regular(j_max - 1), j_max - 1);
    }
    for (std::size_t jj = 1; jj <= j_max; ++jj) {
      positivity.add(last(jj), jj);
      tail.add(last(jj) - 0.5 * (1.0 - alpha) * std::pow(static_cast<double>(jj) + sigma, -alpha), jj);
      if (jj >= 2) {
        monotone.add(regular(jj - 1) - last(jj), jj);
      }
    }
    const double kappa_upper = 1.0 / (2.0 - alpha);
    for (std::size_t s = 1; s <= j_max; ++s) {
      const double excess = b[s] / a[s];
      kappa.add(std::min(excess, kappa_upper - (0.5 + excess)), s);
      bpos.add(b[s], s);
    }
  }

  WeightAudit audit;
  for (auto* t : {&positivity, &monotone, &tail, &gate, &kappa, &bpos}) {
    audit.checks.push_back(t->finish(slack));
  }
  return audit;
}

} // namespace fracdiff
