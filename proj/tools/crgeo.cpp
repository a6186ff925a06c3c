#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "crgeo/conformal.hpp"
#include "crgeo/json_io.hpp"

namespace {

using crgeo::json;

// Worker count comes from the environment only; every numeric control is a
// flag so results never depend on ambient configuration.
int env_workers() {
  const char* s = std::getenv("CRGEO_WORKERS");
  if (s == nullptr) return 1;
  const int w = std::atoi(s);
  return w >= 1 ? w : 1;
}

std::string read_stream(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_input(const std::string& path) {
  if (path == "-") return read_stream(std::cin);
  std::ifstream file(path);
  if (!file) throw crgeo::domain_error("cannot open " + path);
  return read_stream(file);
}

json parse_json(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw crgeo::domain_error(what + ": invalid JSON");
  return doc;
}

crgeo::PlanItem plan_item_for(const std::string& id) {
  for (const crgeo::PlanItem& item : crgeo::default_plan())
    if (item.id == id) return item;
  throw crgeo::domain_error("unknown inequality id " + id);
}

crgeo::PlanItem apply_overrides(crgeo::PlanItem item, const std::vector<int>& dims, int count) {
  if (!dims.empty()) item.dims = dims;
  if (count > 0) item.per_seed = count;
  return item;
}

int run_decompose(const std::string& input) {
  const crgeo::WebsterTensor w =
      crgeo::webster_from_json(parse_json(read_input(input), "decompose input"));
  std::cout << crgeo::decomposition_to_json(crgeo::decompose(w)).dump(2) << "\n";
  return 0;
}

// Streams the slack record of every sample in deterministic order. A verified
// violation flips the exit code; the unprojected kato-c-raw diagnostic is
// reported but never gates.
int run_verify(const crgeo::PlanItem& item, std::uint64_t seed_lo, std::uint64_t seed_hi) {
  if (seed_hi <= seed_lo) throw crgeo::domain_error("verify: empty seed range");
  const double tol = crgeo::violation_tolerance(item.id);
  bool violated = false;
  for (std::uint64_t seed = seed_lo; seed < seed_hi; ++seed)
    for (int dim : item.dims)
      for (int k = 0; k < item.per_seed; ++k) {
        const crgeo::SlackRecord rec = crgeo::evaluate_inequality_sample(
            item.id, dim, seed, static_cast<std::uint64_t>(k));
        const double scale = std::max({1.0, std::abs(rec.lhs), std::abs(rec.rhs)});
        if (rec.slack / scale < -tol) violated = true;
        std::cout << crgeo::slack_record_to_json(rec).dump() << "\n";
      }
  return violated && item.id != "kato-c-raw" ? 3 : 0;
}

int run_sample(const std::vector<crgeo::PlanItem>& items, std::uint64_t seed_lo,
               std::uint64_t seed_hi, double near_tol) {
  if (seed_hi <= seed_lo) throw crgeo::domain_error("sample: empty seed range");
  const int workers = env_workers();
  bool violated = false;
  for (const crgeo::PlanItem& item : items) {
    const crgeo::InequalityRun run =
        crgeo::run_inequality(item, seed_lo, seed_hi, workers, near_tol);
    for (const crgeo::SlackRecord& rec : run.near_equality_records)
      std::cout << crgeo::slack_record_to_json(rec).dump() << "\n";
    std::cout << crgeo::run_summary_to_json(run).dump() << "\n";
    if (run.violations > 0 && item.id != "kato-c-raw") violated = true;
  }
  return violated ? 3 : 0;
}

int run_thresholds(const std::string& theorem, int n, std::optional<double> sigma) {
  const crgeo::ThresholdSpec spec = crgeo::pinch_threshold(theorem, n, sigma);
  json doc;
  doc["version"] = crgeo::kVersion;
  doc["theorem"] = spec.id;
  doc["n"] = n;
  if (sigma) doc["sigma"] = *sigma;
  doc["coefficient"] = spec.coefficient;
  doc["multiplier"] = spec.multiplier;
  std::cout << doc.dump() << "\n";
  return 0;
}

int run_evaluate(const std::string& summary_path) {
  const crgeo::ManifoldSummary s = crgeo::manifold_summary_from_json(
      parse_json(read_input(summary_path), "evaluate summary"));
  for (const crgeo::PinchReport& report : crgeo::evaluate_all(s))
    std::cout << crgeo::pinch_report_to_json(report).dump() << "\n";
  return 0;
}

int run_yamabe(int n, int samples, const std::vector<double>& box, const std::string& family,
               double rho) {
  if (family != "gaussian")
    throw crgeo::domain_error("yamabe-estimate: unknown family " + family);
  crgeo::GridSpec spec;
  spec.n = n;
  spec.samples = samples;
  spec.half_z = box.empty() ? 3.0 : box[0];
  spec.half_t = box.size() > 1 ? box[1] : spec.half_z;
  const crgeo::YamabeEstimate est = crgeo::yamabe_minimize(spec, rho);

  // Order estimate by two grid halvings at the minimizing parameters, when
  // the sample count nests (samples = 4k + 1 with a usable coarsest level).
  json order = nullptr;
  if ((samples - 1) % 4 == 0 && (samples - 1) / 4 + 1 >= 9) {
    crgeo::GridSpec mid = spec, coarse = spec;
    mid.samples = (samples - 1) / 2 + 1;
    coarse.samples = (samples - 1) / 4 + 1;
    const double q3 = est.quotient;
    const double q2 = crgeo::yamabe_quotient(mid, est.a, est.b, rho);
    const double q1 = crgeo::yamabe_quotient(coarse, est.a, est.b, rho);
    if (q2 != q3) order = std::log2(std::abs(q1 - q2) / std::abs(q2 - q3));
  }
  json doc = crgeo::yamabe_estimate_to_json(est, 0.0);
  doc["order_estimate"] = order;
  std::cout << doc.dump() << "\n";
  return 0;
}

crgeo::HeisenbergPoint parse_point(const json& row, int n) {
  crgeo::require(row.is_array() && row.size() == static_cast<std::size_t>(2 * n + 1),
                 "conformal-example: each point needs 2n + 1 coordinates "
                 "[x1, y1, ..., xn, yn, t]");
  crgeo::HeisenbergPoint p;
  p.z.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    crgeo::require(row[2 * a].is_number() && row[2 * a + 1].is_number(),
                   "conformal-example: coordinates must be numbers");
    p.z[static_cast<std::size_t>(a)] =
        crgeo::cplx{row[2 * a].get<double>(), row[2 * a + 1].get<double>()};
  }
  crgeo::require(row[2 * n].is_number(), "conformal-example: t must be a number");
  p.t = row[2 * n].get<double>();
  return p;
}

int run_conformal(int n, const std::string& points_text, const std::string& factor_id) {
  const crgeo::ConformalTransform transform(crgeo::conformal_catalogue(factor_id, n));
  json points = parse_json(points_text, "conformal-example points");
  crgeo::require(points.is_array() && !points.empty(),
                 "conformal-example: points must be a nonempty JSON list");
  for (const json& row : points) {
    const crgeo::HeisenbergPoint p = parse_point(row, n);
    const crgeo::TransformedPointData d = transform.at(p);
    json doc;
    doc["version"] = crgeo::kVersion;
    doc["factor"] = factor_id;
    json zs = json::array();
    for (const crgeo::cplx& z : p.z) zs.push_back(json::array({z.real(), z.imag()}));
    doc["point"] = {{"z", zs}, {"t", p.t}};
    doc["webster_scale"] = d.webster_scale;
    doc["torsion"] = crgeo::torsion_to_json(d.torsion);
    doc["ricci"] = crgeo::hermitian_to_json(d.ricci);
    doc["scalar"] = d.scalar;
    doc["scalar_display_variant"] = d.scalar_display_variant;
    doc["einstein_residual"] =
        crgeo::TracelessHermitianMatrix::project(d.ricci).max_abs();
    std::cout << doc.dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-Hermitian curvature toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", crgeo::kVersion);

  std::string input = "-";
  CLI::App* dec = app.add_subcommand("decompose",
                                     "split a curvature tensor (JSON on stdin or --input) "
                                     "into trace-free, traceless Ricci, and scalar parts");
  dec->add_option("--input", input, "tensor JSON file, - for stdin");

  std::string inequality;
  std::vector<int> dims;
  int count = 0;
  std::uint64_t seed_lo = 0, seed_hi = 10;
  double near_tol = 1e-3;
  CLI::App* ver = app.add_subcommand("verify",
                                     "stream the slack record of every sample of one "
                                     "inequality; exit 3 on a verified violation");
  ver->add_option("--inequality", inequality, "inequality id")->required();
  ver->add_option("--n", dims, "dimensions to sample (default: plan entry)");
  ver->add_option("--count", count, "samples per seed and dimension (default: plan entry)");
  ver->add_option("--seed-lo", seed_lo, "first seed (default 0)");
  ver->add_option("--seed-hi", seed_hi, "one past the last seed (default 10)");

  std::string sample_id;
  std::vector<int> sample_dims;
  int sample_count = 0;
  std::uint64_t sample_lo = 0, sample_hi = 10;
  CLI::App* smp = app.add_subcommand("sample",
                                     "search for near-equality witnesses; one JSON line per "
                                     "witness plus a summary per inequality");
  smp->add_option("--inequality", sample_id, "inequality id (default: whole plan)");
  smp->add_option("--n", sample_dims, "dimensions to sample (default: plan entry)");
  smp->add_option("--count", sample_count, "samples per seed and dimension");
  smp->add_option("--seed-lo", sample_lo, "first seed (default 0)");
  smp->add_option("--seed-hi", sample_hi, "one past the last seed (default 10)");
  smp->add_option("--near-tol", near_tol, "slack ratio below which a witness is logged");

  std::string theorem;
  int thm_n = 2;
  double sigma_value = 0.0;
  CLI::App* thr = app.add_subcommand("thresholds", "print one pinching threshold coefficient");
  thr->add_option("--theorem", theorem, "theorem id")->required();
  thr->add_option("--n", thm_n, "complex dimension n (manifold dimension 2n + 1)")->required();
  CLI::Option* sigma_opt = thr->add_option("--sigma", sigma_value, "integral exponent sigma");

  std::string summary_path;
  CLI::App* ev = app.add_subcommand("evaluate",
                                    "test every pinching theorem against a manifold summary; "
                                    "one JSON object per theorem");
  ev->add_option("--summary", summary_path, "summary JSON file, - for stdin")->required();

  int yam_n = 1, yam_grid = 33;
  std::vector<double> yam_box;
  std::string family = "gaussian";
  double yam_rho = 0.0;
  CLI::App* yam = app.add_subcommand("yamabe-estimate",
                                     "minimize the quotient functional over a trial family "
                                     "on a grid");
  yam->add_option("--n", yam_n, "complex dimension (default 1)");
  yam->add_option("--grid", yam_grid, "odd samples per axis (default 33)");
  yam->add_option("--box", yam_box, "half-widths: one value, or z and t separately")
      ->expected(1, 2);
  yam->add_option("--family", family, "trial family (gaussian)");
  yam->add_option("--rho", yam_rho, "scalar curvature term in the numerator (default 0)");

  int conf_n = 2;
  std::string points_text = "[]";
  std::string factor_id = "abs-z-sq";
  CLI::App* conf = app.add_subcommand("conformal-example",
                                      "transformed torsion, Ricci, and scalar at points "
                                      "[x1, y1, ..., xn, yn, t]");
  conf->add_option("--n", conf_n, "complex dimension (default 2)");
  conf->add_option("--points", points_text, "JSON list of points (default: the origin)");
  conf->add_option("--u", factor_id, "conformal factor catalogue id (default abs-z-sq)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*dec) return run_decompose(input);
    if (*ver)
      return run_verify(apply_overrides(plan_item_for(inequality), dims, count), seed_lo,
                        seed_hi);
    if (*smp) {
      std::vector<crgeo::PlanItem> items;
      if (sample_id.empty()) {
        items = crgeo::default_plan();
      } else {
        items.push_back(apply_overrides(plan_item_for(sample_id), sample_dims, sample_count));
      }
      return run_sample(items, sample_lo, sample_hi, near_tol);
    }
    if (*thr)
      return run_thresholds(theorem, thm_n,
                            sigma_opt->count() > 0 ? std::optional<double>(sigma_value)
                                                   : std::nullopt);
    if (*ev) return run_evaluate(summary_path);
    if (*yam) return run_yamabe(yam_n, yam_grid, yam_box, family, yam_rho);
    if (*conf) {
      if (points_text == "[]") {
        json origin = json::array();
        json row = json::array();
        for (int i = 0; i < 2 * conf_n + 1; ++i) row.push_back(0.0);
        origin.push_back(row);
        points_text = origin.dump();
      }
      return run_conformal(conf_n, points_text, factor_id);
    }
  } catch (const crgeo::invariant_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const crgeo::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
