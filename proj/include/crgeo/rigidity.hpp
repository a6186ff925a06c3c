#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crgeo/core.hpp"
#include "crgeo/tensor.hpp"

namespace crgeo {

// Constants from the vanishing argument for nonnegative subsolutions of
// Delta_b psi >= -B psi. Preconditions: delta > 0 and 0 < eps < sigma - B - 1;
// violations name the failed constraint.
inline double vanishing_constant(double sigma, double b_coef, double delta, double eps) {
  require(delta > 0.0, "vanishing_constant: delta must be positive");
  require(eps > 0.0, "vanishing_constant: eps must be positive");
  require(eps < sigma - b_coef - 1.0, "vanishing_constant: eps must stay below sigma - B - 1");
  return 4.0 / (sigma * sigma) / (1.0 + delta) * (sigma - b_coef - 1.0 - eps);
}

// Same constant folded with the Sobolev normalisation 2n/(n+1) in place of 4.
inline double vanishing_constant_normalized(int n, double sigma, double b_coef, double delta,
                                            double eps) {
  require(n >= 1, "vanishing_constant_normalized: n must be at least 1");
  require(delta > 0.0, "vanishing_constant_normalized: delta must be positive");
  require(eps > 0.0, "vanishing_constant_normalized: eps must be positive");
  require(eps < sigma - b_coef - 1.0,
          "vanishing_constant_normalized: eps must stay below sigma - B - 1");
  return (2.0 * n / (n + 1.0)) * (sigma - b_coef - 1.0 - eps) / (sigma * sigma * (1.0 + delta));
}

// Names of the pinching statements the evaluator knows about, in report order.
inline const std::vector<std::string>& pinch_theorem_ids() {
  static const std::vector<std::string> ids = {
      "pinch-e-integral",  "pinch-e-conformal", "pinch-compactness", "pinch-e-positive",
      "pinch-e-sup",       "pinch-c-integral",  "pinch-c-sphere",    "pinch-c-sup",
      "pinch-heisenberg-combined", "pinch-sphere-combined"};
  return ids;
}

namespace detail {

inline void check_pinch_dim(int n) {
  require(n >= 2, "pinch threshold: n must be at least 2");
}

// sigma-dependent factor of the traceless-Ricci integral thresholds.
inline double e_integral_sigma_factor(int n, double sigma) {
  return (2.0 * n * sigma - 2.0 * n + 2.0) / (sigma * sigma);
}

// sigma-dependent factor of the Chern-Moser integral threshold.
inline double c_integral_sigma_factor(int n, double sigma) {
  return (sigma + 2.0 / (n + 1.0) - 1.0) / (sigma * sigma);
}

}  // namespace detail

// Piecewise compactness coefficient. The two branches agree at sigma = n - 1,
// where the sigma-dependent branch evaluates to 2/(n+1) exactly.
inline double compactness_coefficient(int n, double sigma) {
  detail::check_pinch_dim(n);
  require(sigma >= 2.0, "compactness_coefficient: sigma must be at least 2");
  if (n >= 4 && sigma < n - 1.0) return 2.0 / (n + 1.0);
  return detail::e_integral_sigma_factor(n, sigma) / (n + 1.0);
}

// Coefficient of the sphere pinching threshold. The low-dimensional values are
// sharper than the general formula, so the branches are intentionally
// discontinuous at n = 2 and n = 3.
inline double sphere_coefficient(int n) {
  detail::check_pinch_dim(n);
  if (n == 2) return 5.0 / (9.0 * std::sqrt(3.0));
  if (n == 3) return 9.0 * std::sqrt(2.0) / 56.0;
  return 2.0 * std::sqrt(double(n) * n - 1.0) / (3.0 * (double(n) * n - 2.0));
}

// Threshold coefficient plus the unit it multiplies. The caller supplies the
// Yamabe constant or the scalar curvature itself; coefficients are never
// pre-multiplied so the two scales cannot be mixed up.
struct ThresholdSpec {
  std::string id;
  double coefficient = 0.0;
  std::string multiplier;  // "yamabe" or "rho"
};

inline ThresholdSpec pinch_threshold(const std::string& id, int n,
                                     std::optional<double> sigma = std::nullopt) {
  detail::check_pinch_dim(n);
  const double np1 = n + 1.0;
  const double np2 = n + 2.0;
  const double denom = 2.0 * n * n + 4.0 * n + 3.0;
  auto need_sigma = [&]() -> double {
    require(sigma.has_value(), "pinch threshold: " + id + " needs sigma");
    require(*sigma >= 2.0, "pinch threshold: sigma must be at least 2");
    return *sigma;
  };
  ThresholdSpec spec;
  spec.id = id;
  if (id == "pinch-e-integral") {
    const double s = need_sigma();
    spec.coefficient =
        detail::e_integral_sigma_factor(n, s) / std::sqrt(np1) * std::sqrt(np2 / denom);
    spec.multiplier = "yamabe";
  } else if (id == "pinch-e-conformal" || id == "pinch-e-positive") {
    spec.coefficient = (2.0 * n * n + 2.0) / std::pow(np1, 2.5) * std::sqrt(np2 / denom);
    spec.multiplier = "yamabe";
  } else if (id == "pinch-compactness") {
    const double s = need_sigma();
    spec.coefficient = compactness_coefficient(n, s) * std::sqrt(np1 * np2 / denom);
    spec.multiplier = "yamabe";
  } else if (id == "pinch-e-sup") {
    spec.coefficient = std::sqrt(8.0 * np2 / (np1 * denom));
    spec.multiplier = "rho";
  } else if (id == "pinch-c-integral") {
    const double s = need_sigma();
    spec.coefficient = (2.0 * n * n / (3.0 * (double(n) * n - 2.0))) *
                       std::sqrt((n - 1.0) / np1) * detail::c_integral_sigma_factor(n, s);
    spec.multiplier = "yamabe";
  } else if (id == "pinch-c-sphere") {
    spec.coefficient = sphere_coefficient(n);
    spec.multiplier = "yamabe";
  } else if (id == "pinch-c-sup") {
    spec.coefficient = 2.0 * std::sqrt(double(n) * n - 1.0) / (3.0 * (double(n) * n - 2.0));
    spec.multiplier = "rho";
  } else if (id == "pinch-heisenberg-combined") {
    spec.coefficient = (2.0 * n * n * (double(n) * n + n + 2.0) /
                        (3.0 * np1 * np1 * np1 * (double(n) * n - 2.0))) *
                       std::sqrt((n - 1.0) / np1);
    spec.multiplier = "yamabe";
  } else if (id == "pinch-sphere-combined") {
    spec.coefficient = sphere_coefficient(n);
    spec.multiplier = "yamabe";
  } else {
    require(false, "pinch threshold: unknown theorem id " + id);
  }
  require_finite(spec.coefficient, "pinch threshold coefficient");
  require(spec.coefficient > 0.0, "pinch threshold: coefficient must be positive");
  return spec;
}

// The sup-norm sphere coefficient never exceeds the sup-norm pseudo-Einstein
// coefficient, so the sup hypotheses can be checked in either order.
inline SlackRecord comparison_check(int n) {
  detail::check_pinch_dim(n);
  const double lhs = pinch_threshold("pinch-c-sup", n).coefficient;
  const double rhs = pinch_threshold("pinch-e-sup", n).coefficient;
  return make_slack_record("sup-coefficient-comparison", n, lhs, rhs, "{}");
}

// Maximiser of a threshold coefficient over sigma in [lo, hi]. The bracket
// check certifies a local maximum with boundary clamping; at_lower_boundary
// records that the optimum sits at sigma = lo.
struct BestSigma {
  double sigma = 0.0;
  double coefficient = 0.0;
  bool at_lower_boundary = false;
};

inline BestSigma best_sigma(const std::string& id, int n, double lo = 2.0, double hi = 64.0) {
  detail::check_pinch_dim(n);
  require(id == "pinch-e-integral" || id == "pinch-compactness" || id == "pinch-c-integral",
          "best_sigma: " + id + " has no sigma dependence");
  require(lo >= 2.0 && hi > lo, "best_sigma: need 2 <= lo < hi");
  auto value = [&](double s) { return pinch_threshold(id, n, s).coefficient; };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = value(c), fd = value(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = value(d);
    }
  }
  BestSigma best;
  best.sigma = 0.5 * (a + b);
  // Golden sections shrink toward an interior optimum; a boundary maximum
  // leaves the endpoint value ahead of the interior one.
  if (value(lo) >= value(best.sigma)) {
    best.sigma = lo;
    best.at_lower_boundary = true;
  } else if (value(hi) >= value(best.sigma)) {
    best.sigma = hi;
  }
  best.coefficient = value(best.sigma);
  const double h = 1e-5 * (hi - lo);
  const double left = value(std::max(lo, best.sigma - h));
  const double right = value(std::min(hi, best.sigma + h));
  const double tol = 1e-9 * (1.0 + std::abs(best.coefficient));
  require(best.coefficient >= left - tol && best.coefficient >= right - tol,
          "best_sigma: bracket check failed to certify a local maximum");
  return best;
}

// Numeric profile of one manifold, as supplied by the user. Optional fields
// stay empty when unknown; the evaluator never substitutes guesses.
struct ManifoldSummary {
  int n = 0;
  double rho = 0.0;  // constant pseudo-Hermitian scalar curvature
  std::optional<double> yamabe;
  std::optional<double> norm_c;  // L^{n+1} norm of the Chern-Moser tensor
  std::optional<double> norm_e;  // L^{n+1} norm of the traceless Ricci tensor
  std::optional<double> sup_c;
  std::optional<double> sup_e;
  std::optional<double> sigma;
  std::optional<bool> compact;
  std::optional<bool> simply_connected;
  std::optional<bool> pseudo_einstein;

  void validate() const {
    require(n >= 2, "manifold summary: n must be at least 2");
    require(is_finite(rho), "manifold summary: rho must be finite");
    auto check_nonneg = [](const std::optional<double>& v, const char* what) {
      if (!v) return;
      require(is_finite(*v) && *v >= 0.0, std::string("manifold summary: ") + what +
                                              " must be finite and nonnegative");
    };
    check_nonneg(norm_c, "norm_c");
    check_nonneg(norm_e, "norm_e");
    check_nonneg(sup_c, "sup_c");
    check_nonneg(sup_e, "sup_e");
    if (yamabe) require(is_finite(*yamabe), "manifold summary: yamabe must be finite");
    if (sigma) {
      require(is_finite(*sigma) && *sigma >= 2.0, "manifold summary: sigma must be at least 2");
    }
  }

  // Vanishing traceless Ricci in either norm is accepted as pseudo-Einstein
  // evidence alongside the explicit flag.
  bool pseudo_einstein_evidence() const {
    if (pseudo_einstein && *pseudo_einstein) return true;
    if (norm_e && *norm_e == 0.0) return true;
    if (sup_e && *sup_e == 0.0) return true;
    return false;
  }
};

enum class PinchStatus { kSatisfied, kNotSatisfied, kNotApplicable };

inline const char* pinch_status_name(PinchStatus s) {
  switch (s) {
    case PinchStatus::kSatisfied: return "satisfied";
    case PinchStatus::kNotSatisfied: return "not-satisfied";
    default: return "not-applicable";
  }
}

// Outcome of testing one pinching statement against a summary. lhs, threshold
// and the coefficient/multiplier pair are filled whenever the hypothesis was
// actually evaluated; conclusion and kappa_sign only on satisfied.
struct PinchReport {
  std::string id;
  PinchStatus status = PinchStatus::kNotApplicable;
  double lhs = 0.0;
  double threshold = 0.0;
  double coefficient = 0.0;
  std::string multiplier;
  std::string conclusion;
  bool has_kappa = false;
  int kappa_sign = 0;
  std::string reason;  // set when not applicable
  std::vector<std::string> notes;
};

namespace detail {

struct PinchGate {
  PinchReport report;
  bool open = true;

  explicit PinchGate(std::string id) { report.id = std::move(id); }

  void require_field(bool present, const std::string& what) {
    if (!open) return;
    if (!present) {
      open = false;
      report.reason = "needs " + what;
    }
  }

  void block(bool condition, const std::string& why) {
    if (!open) return;
    if (condition) {
      open = false;
      report.reason = why;
    }
  }
};

inline bool positive_yamabe(PinchGate& gate, const ManifoldSummary& s) {
  gate.require_field(s.yamabe.has_value(), "the CR Yamabe constant");
  if (!gate.open) return false;
  gate.block(*s.yamabe <= 0.0, "needs a positive CR Yamabe constant");
  return gate.open;
}

inline void finish_pinch(PinchReport& r, double lhs, const ThresholdSpec& spec, double scale) {
  r.lhs = lhs;
  r.coefficient = spec.coefficient;
  r.multiplier = spec.multiplier;
  r.threshold = spec.coefficient * scale;
  r.status = lhs < r.threshold ? PinchStatus::kSatisfied : PinchStatus::kNotSatisfied;
}

inline void space_form_conclusion(PinchReport& r, const ManifoldSummary& s, int kappa_sign,
                                  const char* model) {
  r.has_kappa = true;
  r.kappa_sign = kappa_sign;
  if (s.simply_connected && *s.simply_connected && model != nullptr) {
    r.conclusion = model;
  } else if (kappa_sign < 0) {
    r.conclusion = "space-form(kappa<0)";
  } else if (kappa_sign == 0) {
    r.conclusion = "space-form(kappa=0)";
  } else {
    r.conclusion = "space-form(kappa>0)";
  }
}

}  // namespace detail

// Evaluate one pinching statement. Total: every input yields a report, and
// missing data or a hypothesis outside the statement's range turns into
// not-applicable with the reason spelled out.
inline PinchReport evaluate_pinch(const std::string& id, const ManifoldSummary& s) {
  s.validate();
  detail::PinchGate gate(id);
  PinchReport& r = gate.report;
  const int n = s.n;

  if (id == "pinch-e-integral") {
    gate.block(s.compact && *s.compact, "stated for noncompact manifolds");
    gate.block(s.rho > 0.0, "stated for zero or negative scalar curvature");
    gate.require_field(s.sigma.has_value(), "sigma");
    if (gate.open && s.rho < 0.0) {
      gate.block(!(*s.sigma < n - 1.0),
                 n <= 3 ? "negative scalar curvature needs 2 <= sigma < n - 1, an empty"
                          " range in this dimension"
                        : "negative scalar curvature needs 2 <= sigma < n - 1");
    }
    gate.require_field(s.norm_c.has_value() && s.norm_e.has_value(),
                       "the Chern-Moser and traceless Ricci integral norms");
    if (detail::positive_yamabe(gate, s)) {
      detail::finish_pinch(r, *s.norm_c / std::sqrt(2.0) + *s.norm_e,
                           pinch_threshold(id, n, s.sigma), *s.yamabe);
      if (r.status == PinchStatus::kSatisfied) {
        r.conclusion = s.rho == 0.0 ? "Ricci-flat" : "pseudo-Einstein";
      }
    }
  } else if (id == "pinch-e-conformal") {
    gate.block(s.compact && *s.compact, "stated for noncompact manifolds");
    gate.block(s.rho != 0.0, "stated for zero scalar curvature");
    gate.require_field(s.norm_c.has_value() && s.norm_e.has_value(),
                       "the Chern-Moser and traceless Ricci integral norms");
    if (detail::positive_yamabe(gate, s)) {
      detail::finish_pinch(r, *s.norm_c / std::sqrt(2.0) + *s.norm_e, pinch_threshold(id, n),
                           *s.yamabe);
      if (r.status == PinchStatus::kSatisfied) r.conclusion = "Ricci-flat";
    }
  } else if (id == "pinch-compactness") {
    gate.block(s.rho <= 0.0, "needs positive scalar curvature");
    gate.require_field(s.sigma.has_value(), "sigma");
    gate.require_field(s.norm_c.has_value() && s.norm_e.has_value(),
                       "the Chern-Moser and traceless Ricci integral norms");
    if (detail::positive_yamabe(gate, s)) {
      detail::finish_pinch(r, *s.norm_c / std::sqrt(2.0) + *s.norm_e,
                           pinch_threshold(id, n, s.sigma), *s.yamabe);
      if (n >= 4 && *s.sigma == n - 1.0) {
        r.notes.push_back("sigma sits on the coefficient branch boundary; both branches agree");
      }
      if (r.status == PinchStatus::kSatisfied) r.conclusion = "compact";
    }
  } else if (id == "pinch-e-positive") {
    gate.block(s.rho <= 0.0, "needs positive scalar curvature");
    gate.require_field(s.norm_c.has_value() && s.norm_e.has_value(),
                       "the Chern-Moser and traceless Ricci integral norms");
    if (detail::positive_yamabe(gate, s)) {
      detail::finish_pinch(r, *s.norm_c / std::sqrt(2.0) + *s.norm_e, pinch_threshold(id, n),
                           *s.yamabe);
      if (r.status == PinchStatus::kSatisfied) {
        r.conclusion = "pseudo-Einstein";
        r.notes.push_back("also compact, with vanishing real first Chern class of the"
                          " horizontal bundle");
      }
    }
  } else if (id == "pinch-e-sup") {
    gate.block(s.rho <= 0.0, "needs positive scalar curvature");
    gate.require_field(s.sup_c.has_value() && s.sup_e.has_value(),
                       "the Chern-Moser and traceless Ricci sup norms");
    if (gate.open) {
      // sqrt(2) sup|E| + sup|C| dominates sup(sqrt(2)|E| + |C|), so a pass
      // with this bound certifies the pointwise hypothesis.
      detail::finish_pinch(r, std::sqrt(2.0) * *s.sup_e + *s.sup_c, pinch_threshold(id, n),
                           s.rho);
      if (r.status == PinchStatus::kSatisfied) {
        r.conclusion = "pseudo-Einstein";
        r.notes.push_back("also compact, with vanishing real first Chern class of the"
                          " horizontal bundle");
      }
    }
  } else if (id == "pinch-c-integral") {
    gate.block(s.compact && *s.compact, "stated for noncompact manifolds");
    gate.block(!s.pseudo_einstein_evidence(), "needs pseudo-Einstein evidence");
    gate.block(s.rho > 0.0, "stated for zero or negative scalar curvature");
    gate.require_field(s.sigma.has_value(), "sigma");
    if (gate.open && s.rho < 0.0) {
      gate.block(n < 4, "negative scalar curvature needs dimension 2n + 1 >= 9");
      if (gate.open) {
        const double cap = (double(n) * n + std::sqrt(std::pow(double(n), 4) -
                                                      4.0 * std::pow(double(n), 3) +
                                                      4.0 * double(n) * n)) /
                           (2.0 * (n + 1.0));
        gate.block(!(*s.sigma < cap),
                   "negative scalar curvature needs sigma below the dimension-dependent cap");
      }
    }
    gate.require_field(s.norm_c.has_value(), "the Chern-Moser integral norm");
    if (detail::positive_yamabe(gate, s)) {
      detail::finish_pinch(r, *s.norm_c, pinch_threshold(id, n, s.sigma), *s.yamabe);
      if (r.status == PinchStatus::kSatisfied) {
        if (s.rho == 0.0) {
          detail::space_form_conclusion(r, s, 0, "heisenberg");
        } else {
          detail::space_form_conclusion(r, s, -1, nullptr);
        }
      }
    }
  } else if (id == "pinch-c-sphere") {
    gate.require_field(s.compact.has_value() && *s.compact, "a compact manifold");
    gate.block(!s.pseudo_einstein_evidence(), "needs pseudo-Einstein evidence");
    gate.block(s.rho <= 0.0, "needs positive scalar curvature");
    gate.require_field(s.norm_c.has_value(), "the Chern-Moser integral norm");
    if (detail::positive_yamabe(gate, s)) {
      detail::finish_pinch(r, *s.norm_c, pinch_threshold(id, n), *s.yamabe);
      if (r.status == PinchStatus::kSatisfied) {
        detail::space_form_conclusion(r, s, +1, "sphere");
      }
    }
  } else if (id == "pinch-c-sup") {
    gate.require_field(s.compact.has_value() && *s.compact, "a compact manifold");
    gate.block(!s.pseudo_einstein_evidence(), "needs pseudo-Einstein evidence");
    gate.block(s.rho <= 0.0, "needs positive scalar curvature");
    gate.require_field(s.sup_c.has_value(), "the Chern-Moser sup norm");
    if (gate.open) {
      detail::finish_pinch(r, *s.sup_c, pinch_threshold(id, n), s.rho);
      if (r.status == PinchStatus::kSatisfied) {
        detail::space_form_conclusion(r, s, +1, "sphere");
      }
    }
  } else if (id == "pinch-heisenberg-combined") {
    gate.require_field(s.simply_connected.has_value() && *s.simply_connected,
                       "a simply connected manifold");
    gate.block(s.compact && *s.compact, "stated for noncompact manifolds");
    gate.block(s.rho != 0.0, "stated for zero scalar curvature");
    gate.require_field(s.norm_c.has_value() && s.norm_e.has_value(),
                       "the Chern-Moser and traceless Ricci integral norms");
    if (detail::positive_yamabe(gate, s)) {
      detail::finish_pinch(r, *s.norm_c + std::sqrt(2.0) * *s.norm_e, pinch_threshold(id, n),
                           *s.yamabe);
      if (r.status == PinchStatus::kSatisfied) {
        r.conclusion = "heisenberg";
        r.has_kappa = true;
        r.kappa_sign = 0;
      }
    }
  } else if (id == "pinch-sphere-combined") {
    gate.require_field(s.simply_connected.has_value() && *s.simply_connected,
                       "a simply connected manifold");
    gate.block(s.rho <= 0.0, "needs positive scalar curvature");
    gate.require_field(s.norm_c.has_value() && s.norm_e.has_value(),
                       "the Chern-Moser and traceless Ricci integral norms");
    if (detail::positive_yamabe(gate, s)) {
      detail::finish_pinch(r, *s.norm_c + std::sqrt(2.0) * *s.norm_e, pinch_threshold(id, n),
                           *s.yamabe);
      if (r.status == PinchStatus::kSatisfied) {
        r.conclusion = "sphere";
        r.has_kappa = true;
        r.kappa_sign = +1;
      }
    }
  } else {
    require(false, "evaluate_pinch: unknown theorem id " + id);
  }
  return gate.report;
}

inline std::vector<PinchReport> evaluate_all(const ManifoldSummary& s) {
  std::vector<PinchReport> reports;
  reports.reserve(pinch_theorem_ids().size());
  for (const auto& id : pinch_theorem_ids()) reports.push_back(evaluate_pinch(id, s));
  return reports;
}

}  // namespace crgeo
