#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "crgeo/rigidity.hpp"

using namespace crgeo;

namespace {

ManifoldSummary flat_example() {
  ManifoldSummary s;
  s.n = 2;
  s.rho = 0.0;
  s.yamabe = 1.0;
  s.norm_c = 0.0;
  s.norm_e = 0.0;
  s.sigma = 2.0;
  return s;
}

const PinchReport& find_report(const std::vector<PinchReport>& reports, const std::string& id) {
  for (const auto& r : reports) {
    if (r.id == id) return r;
  }
  FAIL("no report for " << id);
  return reports.front();
}

}  // namespace

TEST_CASE("vanishing constants match their closed forms and limits") {
  // With sigma = 2, B = 0 both factors collapse and the constant tends to 1.
  CHECK(std::abs(vanishing_constant(2.0, 0.0, 1e-12, 1e-12) - 1.0) < 1e-9);
  // Normalized variant at n = 2, sigma = 2, B = -1/2 tends to 1/2.
  CHECK(std::abs(vanishing_constant_normalized(2, 2.0, -0.5, 1e-12, 1e-12) - 0.5) < 1e-9);

  const double v = vanishing_constant(3.0, 0.25, 0.5, 0.125);
  CHECK(v == Catch::Approx(4.0 / 9.0 / 1.5 * (3.0 - 0.25 - 1.0 - 0.125)).epsilon(1e-14));
  const double w = vanishing_constant_normalized(4, 3.0, 0.25, 0.5, 0.125);
  CHECK(w == Catch::Approx((8.0 / 5.0) * (3.0 - 0.25 - 1.0 - 0.125) / (9.0 * 1.5))
                 .epsilon(1e-14));

  CHECK_THROWS_AS(vanishing_constant(2.0, 0.0, 0.0, 0.5), domain_error);
  CHECK_THROWS_AS(vanishing_constant(2.0, 0.0, 0.1, 0.0), domain_error);
  CHECK_THROWS_AS(vanishing_constant(2.0, 0.0, 0.1, 1.0), domain_error);
  CHECK_THROWS_AS(vanishing_constant(2.0, 1.5, 0.1, 0.1), domain_error);
  CHECK_THROWS_AS(vanishing_constant_normalized(0, 2.0, 0.0, 0.1, 0.1), domain_error);
}

TEST_CASE("threshold coefficients match hand-derived values") {
  // Sphere coefficient branch table, n = 2 value to full precision.
  CHECK(sphere_coefficient(2) == Catch::Approx(5.0 / (9.0 * std::sqrt(3.0))).margin(1e-15));
  CHECK(sphere_coefficient(2) == Catch::Approx(0.320750149549792091).margin(1e-12));
  CHECK(sphere_coefficient(3) == Catch::Approx(9.0 * std::sqrt(2.0) / 56.0).margin(1e-15));
  CHECK(sphere_coefficient(3) == Catch::Approx(0.227284322524247419).margin(1e-12));
  CHECK(sphere_coefficient(4) == Catch::Approx(0.184427778390829375).margin(1e-12));

  // Three substituted thresholds, worked out by hand from the formulas.
  const auto compactness = pinch_threshold("pinch-compactness", 2, 2.0);
  CHECK(compactness.coefficient == Catch::Approx(0.397359707119513142).margin(1e-12));
  CHECK(compactness.multiplier == "yamabe");

  const auto sup_e = pinch_threshold("pinch-e-sup", 2);
  CHECK(sup_e.coefficient == Catch::Approx(std::sqrt(32.0 / 57.0)).margin(1e-15));
  CHECK(sup_e.coefficient == Catch::Approx(0.749268649265355173).margin(1e-12));
  CHECK(sup_e.multiplier == "rho");

  const auto sphere = pinch_threshold("pinch-c-sphere", 2);
  CHECK(sphere.coefficient == Catch::Approx(0.320750149549792091).margin(1e-12));
  CHECK(sphere.multiplier == "yamabe");

  // Remaining families, one literal each.
  CHECK(pinch_threshold("pinch-e-integral", 2, 2.0).coefficient ==
        Catch::Approx(0.397359707119513142).margin(1e-12));
  CHECK(pinch_threshold("pinch-e-conformal", 2).coefficient ==
        Catch::Approx(0.294340523792231957).margin(1e-12));
  CHECK(pinch_threshold("pinch-e-positive", 2).coefficient ==
        Catch::Approx(0.294340523792231957).margin(1e-12));
  CHECK(pinch_threshold("pinch-c-sup", 2).coefficient ==
        Catch::Approx(0.577350269189625765).margin(1e-12));
  CHECK(pinch_threshold("pinch-heisenberg-combined", 2).coefficient ==
        Catch::Approx(0.228088995235407709).margin(1e-12));
  CHECK(pinch_threshold("pinch-sphere-combined", 3).coefficient ==
        Catch::Approx(sphere_coefficient(3)).margin(1e-15));

  CHECK_THROWS_AS(pinch_threshold("pinch-e-integral", 2), domain_error);
  CHECK_THROWS_AS(pinch_threshold("pinch-e-integral", 2, 1.5), domain_error);
  CHECK_THROWS_AS(pinch_threshold("pinch-e-integral", 1, 2.0), domain_error);
  CHECK_THROWS_AS(pinch_threshold("no-such-theorem", 2), domain_error);
}

TEST_CASE("coefficient cross-checks tie the families together") {
  // On the sigma-dependent branch the compactness threshold equals the
  // traceless Ricci integral threshold.
  for (int n : {2, 3, 7}) {
    for (double sigma : {2.0, 2.5, 4.0, 9.0}) {
      if (n >= 4 && sigma < n - 1.0) continue;
      const double a = pinch_threshold("pinch-e-integral", n, sigma).coefficient;
      const double b = pinch_threshold("pinch-compactness", n, sigma).coefficient;
      CHECK(a == Catch::Approx(b).epsilon(1e-14));
    }
  }
  // The Chern-Moser integral threshold at n = 2, sigma = 2 reproduces the
  // sphere coefficient.
  CHECK(pinch_threshold("pinch-c-integral", 2, 2.0).coefficient ==
        Catch::Approx(sphere_coefficient(2)).epsilon(1e-14));
}

TEST_CASE("compactness coefficient branches agree where they meet") {
  CHECK(compactness_coefficient(2, 2.0) == Catch::Approx(0.5).margin(1e-15));
  for (int n : {4, 5, 8}) {
    const double boundary = n - 1.0;
    CHECK(compactness_coefficient(n, boundary) ==
          Catch::Approx(2.0 / (n + 1.0)).margin(1e-15));
    CHECK(compactness_coefficient(n, boundary - 1e-9) ==
          Catch::Approx(compactness_coefficient(n, boundary + 1e-9)).epsilon(1e-7));
    // Plateau below the boundary, strictly decreasing above it.
    CHECK(compactness_coefficient(n, 2.0) == Catch::Approx(2.0 / (n + 1.0)).margin(1e-15));
    CHECK(compactness_coefficient(n, boundary + 1.0) < 2.0 / (n + 1.0));
  }
  CHECK_THROWS_AS(compactness_coefficient(2, 1.0), domain_error);
}

TEST_CASE("sup-norm coefficient comparison holds for every dimension") {
  const SlackRecord two = comparison_check(2);
  CHECK(two.lhs == Catch::Approx(0.577350269189625765).margin(1e-12));
  CHECK(two.rhs == Catch::Approx(0.749268649265355173).margin(1e-12));
  CHECK(two.slack > 0.0);

  const SlackRecord three = comparison_check(3);
  CHECK(three.lhs == Catch::Approx(0.269374011880589533).margin(1e-12));
  CHECK(three.rhs == Catch::Approx(0.550481882563180303).margin(1e-12));

  for (int n = 2; n <= 10000; ++n) {
    if (comparison_check(n).slack < 0.0) {
      FAIL("comparison fails at n = " << n);
    }
  }
  SUCCEED("comparison sweep complete");
}

TEST_CASE("best sigma lands on the lower boundary") {
  for (const char* id : {"pinch-e-integral", "pinch-c-integral"}) {
    for (int n : {2, 3, 6}) {
      const BestSigma best = best_sigma(id, n);
      CHECK(best.at_lower_boundary);
      CHECK(best.sigma == Catch::Approx(2.0).margin(1e-6));
      CHECK(best.coefficient ==
            Catch::Approx(pinch_threshold(id, n, 2.0).coefficient).epsilon(1e-12));
    }
  }
  // The plateau branch still reports its value at the boundary.
  const BestSigma plateau = best_sigma("pinch-compactness", 6);
  CHECK(plateau.at_lower_boundary);
  CHECK(plateau.coefficient ==
        Catch::Approx(pinch_threshold("pinch-compactness", 6, 2.0).coefficient)
            .epsilon(1e-12));
  CHECK_THROWS_AS(best_sigma("pinch-c-sphere", 2), domain_error);
  CHECK_THROWS_AS(best_sigma("pinch-e-integral", 2, 1.0, 8.0), domain_error);
}

TEST_CASE("summary validation rejects malformed input") {
  ManifoldSummary s = flat_example();
  CHECK_NOTHROW(s.validate());
  s.n = 1;
  CHECK_THROWS_AS(s.validate(), domain_error);
  s = flat_example();
  s.sigma = 1.5;
  CHECK_THROWS_AS(s.validate(), domain_error);
  s = flat_example();
  s.norm_c = -1.0;
  CHECK_THROWS_AS(s.validate(), domain_error);
  s = flat_example();
  s.sup_e = std::nan("");
  CHECK_THROWS_AS(s.validate(), domain_error);
}

TEST_CASE("pseudo-Einstein evidence comes from the flag or a vanishing norm") {
  ManifoldSummary s = flat_example();
  s.norm_e = 0.0;
  CHECK(s.pseudo_einstein_evidence());
  s.norm_e = 0.5;
  CHECK_FALSE(s.pseudo_einstein_evidence());
  s.sup_e = 0.0;
  CHECK(s.pseudo_einstein_evidence());
  s.sup_e.reset();
  s.pseudo_einstein = true;
  CHECK(s.pseudo_einstein_evidence());
}

TEST_CASE("evaluation of the flat noncompact example") {
  const auto reports = evaluate_all(flat_example());
  REQUIRE(reports.size() == pinch_theorem_ids().size());

  const auto& e_integral = find_report(reports, "pinch-e-integral");
  CHECK(e_integral.status == PinchStatus::kSatisfied);
  CHECK(e_integral.conclusion == "Ricci-flat");
  CHECK(e_integral.lhs == 0.0);
  CHECK(e_integral.threshold == Catch::Approx(0.397359707119513142).margin(1e-12));
  CHECK(e_integral.multiplier == "yamabe");

  const auto& e_conformal = find_report(reports, "pinch-e-conformal");
  CHECK(e_conformal.status == PinchStatus::kSatisfied);
  CHECK(e_conformal.conclusion == "Ricci-flat");

  // Vanishing traceless Ricci norm doubles as pseudo-Einstein evidence, and
  // without a simple connectivity flag the conclusion stays a space form.
  const auto& c_integral = find_report(reports, "pinch-c-integral");
  CHECK(c_integral.status == PinchStatus::kSatisfied);
  CHECK(c_integral.conclusion == "space-form(kappa=0)");
  CHECK(c_integral.has_kappa);
  CHECK(c_integral.kappa_sign == 0);

  // Everything needing positive scalar curvature, sup norms, or flags that
  // were not supplied reports not-applicable.
  for (const char* id : {"pinch-compactness", "pinch-e-positive", "pinch-e-sup",
                         "pinch-c-sphere", "pinch-c-sup", "pinch-heisenberg-combined",
                         "pinch-sphere-combined"}) {
    CHECK(find_report(reports, id).status == PinchStatus::kNotApplicable);
    CHECK_FALSE(find_report(reports, id).reason.empty());
  }

  // Simple connectivity upgrades the conclusions to the model spaces.
  ManifoldSummary sc = flat_example();
  sc.simply_connected = true;
  const auto upgraded = evaluate_all(sc);
  CHECK(find_report(upgraded, "pinch-c-integral").conclusion == "heisenberg");
  const auto& combined = find_report(upgraded, "pinch-heisenberg-combined");
  CHECK(combined.status == PinchStatus::kSatisfied);
  CHECK(combined.conclusion == "heisenberg");
  CHECK(combined.kappa_sign == 0);
}

TEST_CASE("evaluation of the sup-norm pseudo-Einstein example") {
  ManifoldSummary s;
  s.n = 2;
  s.rho = 1.0;
  s.sup_c = 0.0;
  s.sup_e = 0.0;
  const auto reports = evaluate_all(s);

  const auto& sup = find_report(reports, "pinch-e-sup");
  CHECK(sup.status == PinchStatus::kSatisfied);
  CHECK(sup.conclusion == "pseudo-Einstein");
  CHECK(sup.multiplier == "rho");
  CHECK(sup.threshold == Catch::Approx(0.749268649265355173).margin(1e-12));

  // The sup sphere test still needs an explicit compact flag.
  CHECK(find_report(reports, "pinch-c-sup").status == PinchStatus::kNotApplicable);
  ManifoldSummary compact = s;
  compact.compact = true;
  const PinchReport c_sup = find_report(evaluate_all(compact), "pinch-c-sup");
  CHECK(c_sup.status == PinchStatus::kSatisfied);
  CHECK(c_sup.conclusion == "space-form(kappa>0)");
  compact.simply_connected = true;
  CHECK(find_report(evaluate_all(compact), "pinch-c-sup").conclusion == "sphere");
}

TEST_CASE("evaluation of the compact sphere example") {
  ManifoldSummary s;
  s.n = 2;
  s.rho = 1.0;
  s.yamabe = 1.0;
  s.norm_c = 0.99 * sphere_coefficient(2);
  s.sigma = 2.0;
  s.compact = true;
  s.simply_connected = true;
  s.pseudo_einstein = true;
  const auto reports = evaluate_all(s);

  const auto& sphere = find_report(reports, "pinch-c-sphere");
  CHECK(sphere.status == PinchStatus::kSatisfied);
  CHECK(sphere.conclusion == "sphere");
  CHECK(sphere.kappa_sign == 1);

  // Noncompact statements are blocked by the compact flag, and the combined
  // sphere test still needs the traceless Ricci norm.
  CHECK(find_report(reports, "pinch-e-integral").status == PinchStatus::kNotApplicable);
  CHECK(find_report(reports, "pinch-sphere-combined").status ==
        PinchStatus::kNotApplicable);

  // Equality misses the strict inequality.
  ManifoldSummary at_threshold = s;
  at_threshold.norm_c = sphere_coefficient(2);
  CHECK(find_report(evaluate_all(at_threshold), "pinch-c-sphere").status ==
        PinchStatus::kNotSatisfied);

  // With the full data the combined test concludes a sphere as well.
  ManifoldSummary full = s;
  full.norm_e = 0.0;
  const PinchReport combined = find_report(evaluate_all(full), "pinch-sphere-combined");
  CHECK(combined.status == PinchStatus::kSatisfied);
  CHECK(combined.conclusion == "sphere");
}

TEST_CASE("negative scalar curvature windows route correctly") {
  ManifoldSummary s;
  s.n = 5;
  s.rho = -1.0;
  s.yamabe = 1.0;
  s.norm_c = 0.0;
  s.norm_e = 0.0;
  s.sigma = 3.0;  // inside 2 <= sigma < n - 1 = 4

  auto r = evaluate_pinch("pinch-e-integral", s);
  CHECK(r.status == PinchStatus::kSatisfied);
  CHECK(r.conclusion == "pseudo-Einstein");

  s.sigma = 4.0;
  CHECK(evaluate_pinch("pinch-e-integral", s).status == PinchStatus::kNotApplicable);

  ManifoldSummary low = s;
  low.n = 2;
  low.sigma = 2.0;
  const auto empty = evaluate_pinch("pinch-e-integral", low);
  CHECK(empty.status == PinchStatus::kNotApplicable);
  CHECK(empty.reason.find("empty") != std::string::npos);

  // Chern-Moser window: needs dimension 2n + 1 >= 9 and sigma below the cap,
  // (n^2 + sqrt(n^4 - 4n^3 + 4n^2)) / (2(n + 1)) = 2.4 at n = 4.
  ManifoldSummary c;
  c.n = 4;
  c.rho = -1.0;
  c.yamabe = 1.0;
  c.norm_c = 0.0;
  c.pseudo_einstein = true;
  c.sigma = 2.2;
  auto cr = evaluate_pinch("pinch-c-integral", c);
  CHECK(cr.status == PinchStatus::kSatisfied);
  CHECK(cr.conclusion == "space-form(kappa<0)");
  CHECK(cr.kappa_sign == -1);

  c.sigma = 2.5;
  CHECK(evaluate_pinch("pinch-c-integral", c).status == PinchStatus::kNotApplicable);
  c.n = 3;
  c.sigma = 2.0;
  CHECK(evaluate_pinch("pinch-c-integral", c).status == PinchStatus::kNotApplicable);
}

TEST_CASE("missing or inconsistent data yields not-applicable, never a guess") {
  ManifoldSummary s = flat_example();
  s.yamabe = -1.0;
  const auto r = evaluate_pinch("pinch-e-integral", s);
  CHECK(r.status == PinchStatus::kNotApplicable);
  CHECK(r.reason == "needs a positive CR Yamabe constant");

  ManifoldSummary no_yamabe = flat_example();
  no_yamabe.yamabe.reset();
  CHECK(evaluate_pinch("pinch-e-integral", no_yamabe).status ==
        PinchStatus::kNotApplicable);

  // A rho-scaled threshold never substitutes the Yamabe constant and vice
  // versa: the sup test ignores yamabe, the integral tests ignore rho's size.
  ManifoldSummary sup;
  sup.n = 2;
  sup.rho = 1.0;
  sup.yamabe = 100.0;
  const auto sup_report = evaluate_pinch("pinch-e-sup", sup);
  CHECK(sup_report.status == PinchStatus::kNotApplicable);
  CHECK(sup_report.reason.find("sup norms") != std::string::npos);

  CHECK_THROWS_AS(evaluate_pinch("no-such-theorem", flat_example()), domain_error);
}

TEST_CASE("sigma on the compactness branch boundary is flagged") {
  ManifoldSummary s;
  s.n = 5;
  s.rho = 1.0;
  s.yamabe = 1.0;
  s.norm_c = 0.0;
  s.norm_e = 0.0;
  s.sigma = 4.0;
  const auto r = evaluate_pinch("pinch-compactness", s);
  CHECK(r.status == PinchStatus::kSatisfied);
  CHECK(r.conclusion == "compact");
  REQUIRE_FALSE(r.notes.empty());
  CHECK(r.notes.front().find("branch boundary") != std::string::npos);
}

TEST_CASE("evaluation is deterministic and total") {
  ManifoldSummary s;
  s.n = 3;
  s.rho = 0.5;
  s.yamabe = 2.0;
  s.norm_c = 0.1;
  s.norm_e = 0.05;
  s.sup_c = 0.2;
  s.sup_e = 0.1;
  s.sigma = 2.5;
  s.compact = true;
  s.simply_connected = true;
  s.pseudo_einstein = false;

  const auto first = evaluate_all(s);
  const auto second = evaluate_all(s);
  REQUIRE(first.size() == pinch_theorem_ids().size());
  std::map<std::string, int> seen;
  for (size_t i = 0; i < first.size(); ++i) {
    ++seen[first[i].id];
    CHECK(first[i].id == second[i].id);
    CHECK(first[i].status == second[i].status);
    CHECK(first[i].lhs == second[i].lhs);
    CHECK(first[i].threshold == second[i].threshold);
    CHECK(first[i].conclusion == second[i].conclusion);
    CHECK(first[i].reason == second[i].reason);
  }
  for (const auto& id : pinch_theorem_ids()) CHECK(seen[id] == 1);
}
