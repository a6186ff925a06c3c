#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "crgeo/core.hpp"
#include "crgeo/curvature.hpp"
#include "crgeo/heisenberg.hpp"
#include "crgeo/inequalities.hpp"
#include "crgeo/rigidity.hpp"
#include "crgeo/tensor.hpp"

namespace crgeo {

using json = nlohmann::ordered_json;

namespace detail {

// Shared shape of the sparse tensor documents: {"kind", "n", "entries"} with
// one [i1, ..., re, im] row per nonzero component and 0-based indices.
inline json sparse_entries_rank2(const CMatrix& m) {
  json entries = json::array();
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j) {
      const cplx z = m(i, j);
      if (z == cplx{0.0, 0.0}) continue;
      entries.push_back(json::array({i, j, z.real(), z.imag()}));
    }
  return entries;
}

inline int parse_tensor_dim(const json& doc) {
  require(doc.is_object() && doc.contains("kind") && doc.contains("n") &&
              doc.contains("entries"),
          "tensor JSON: need an object with kind, n, and entries");
  require(doc.at("n").is_number_integer(), "tensor JSON: n must be an integer");
  const int n = doc.at("n").get<int>();
  require(n >= 1, "tensor JSON: n must be positive");
  require(doc.at("entries").is_array(), "tensor JSON: entries must be an array");
  return n;
}

// Reads entries of the given rank into a fresh tensor, rejecting rows of the
// wrong width, fractional or out-of-range indices, and duplicates.
template <int R>
NTensor<R> parse_sparse_entries(const json& doc, int n) {
  NTensor<R> t(n);
  std::unordered_set<std::size_t> seen;
  for (const json& row : doc.at("entries")) {
    require(row.is_array() && row.size() == static_cast<std::size_t>(R) + 2,
            "tensor JSON: each entry must hold the indices plus re and im");
    std::array<int, R> idx{};
    for (int r = 0; r < R; ++r) {
      require(row[static_cast<std::size_t>(r)].is_number_integer(),
              "tensor JSON: indices must be integers");
      idx[static_cast<std::size_t>(r)] = row[static_cast<std::size_t>(r)].get<int>();
      require(idx[static_cast<std::size_t>(r)] >= 0 && idx[static_cast<std::size_t>(r)] < n,
              "tensor JSON: index out of range");
    }
    require(row[R].is_number() && row[R + 1].is_number(),
            "tensor JSON: re and im must be numbers");
    require(seen.insert(t.flat(idx)).second, "tensor JSON: duplicate entry");
    t.at(idx) = cplx{row[R].get<double>(), row[R + 1].get<double>()};
  }
  return t;
}

}  // namespace detail

inline std::string tensor_kind(const json& doc) {
  require(doc.is_object() && doc.contains("kind") && doc.at("kind").is_string(),
          "tensor JSON: need a string kind field");
  return doc.at("kind").get<std::string>();
}

inline json webster_to_json(const WebsterTensor& w) {
  json doc;
  doc["kind"] = "webster";
  doc["n"] = w.n();
  json entries = json::array();
  for (int a = 0; a < w.n(); ++a)
    for (int b = 0; b < w.n(); ++b)
      for (int l = 0; l < w.n(); ++l)
        for (int m = 0; m < w.n(); ++m) {
          const cplx z = w(a, b, l, m);
          if (z == cplx{0.0, 0.0}) continue;
          entries.push_back(json::array({a, b, l, m, z.real(), z.imag()}));
        }
  doc["entries"] = std::move(entries);
  return doc;
}

inline json hermitian_to_json(const HermitianMatrix& m) {
  json doc;
  doc["kind"] = "hermitian";
  doc["n"] = m.n();
  doc["entries"] = detail::sparse_entries_rank2(m.raw());
  return doc;
}

inline json torsion_to_json(const TorsionMatrix& m) {
  json doc;
  doc["kind"] = "torsion";
  doc["n"] = m.n();
  doc["entries"] = detail::sparse_entries_rank2(m.raw());
  return doc;
}

inline WebsterTensor webster_from_json(const json& doc) {
  require(tensor_kind(doc) == "webster", "tensor JSON: expected kind webster");
  const int n = detail::parse_tensor_dim(doc);
  return WebsterTensor(detail::parse_sparse_entries<4>(doc, n));
}

inline HermitianMatrix hermitian_from_json(const json& doc) {
  require(tensor_kind(doc) == "hermitian", "tensor JSON: expected kind hermitian");
  const int n = detail::parse_tensor_dim(doc);
  return HermitianMatrix(detail::parse_sparse_entries<2>(doc, n));
}

inline TorsionMatrix torsion_from_json(const json& doc) {
  require(tensor_kind(doc) == "torsion", "tensor JSON: expected kind torsion");
  const int n = detail::parse_tensor_dim(doc);
  return TorsionMatrix(detail::parse_sparse_entries<2>(doc, n));
}

// Three linked tensor documents plus the scalar: the trace-free part, the
// traceless Ricci block, and the full Ricci contraction they came from.
inline json decomposition_to_json(const CurvatureDecomposition& d) {
  json doc;
  doc["version"] = kVersion;
  doc["kind"] = "decomposition";
  doc["n"] = d.n();
  doc["scalar"] = d.scalar;
  doc["chern_moser"] = webster_to_json(d.chern_moser);
  doc["traceless_ricci"] = hermitian_to_json(d.traceless_ricci);
  HermitianMatrix ricci(d.n());
  for (int i = 0; i < d.n(); ++i) {
    for (int j = 0; j < d.n(); ++j) ricci.entry(i, j) = d.traceless_ricci(i, j);
    ricci.entry(i, i) += d.scalar / d.n();
  }
  doc["ricci"] = hermitian_to_json(ricci);
  return doc;
}

inline json slack_record_to_json(const SlackRecord& rec) {
  json doc;
  doc["inequality"] = rec.inequality;
  doc["n"] = rec.n;
  doc["lhs"] = rec.lhs;
  doc["rhs"] = rec.rhs;
  doc["slack"] = rec.slack;
  json witness = json::parse(rec.witness, nullptr, false);
  doc["witness"] = witness.is_discarded() ? json(rec.witness) : witness;
  return doc;
}

inline json run_summary_to_json(const InequalityRun& run) {
  json doc;
  doc["inequality"] = run.id;
  doc["n"] = run.dims;
  doc["count"] = run.samples;
  doc["min_slack_ratio"] = run.min_rel_slack;
  doc["violations"] = run.violations;
  return doc;
}

inline json yamabe_estimate_to_json(const YamabeEstimate& est, double order_estimate) {
  json doc;
  doc["version"] = kVersion;
  doc["quotient"] = est.quotient;
  doc["params"] = {{"a", est.a}, {"b", est.b}};
  doc["grid"] = {{"n", est.spec.n},
                 {"samples", est.spec.samples},
                 {"half_z", est.spec.half_z},
                 {"half_t", est.spec.half_t}};
  doc["order_estimate"] = order_estimate;
  return doc;
}

inline json manifold_summary_to_json(const ManifoldSummary& s) {
  json doc;
  doc["n"] = s.n;
  doc["rho"] = s.rho;
  auto put = [&doc](const char* key, const auto& opt) {
    if (opt) doc[key] = *opt;
  };
  put("yamabe", s.yamabe);
  put("norm_c", s.norm_c);
  put("norm_e", s.norm_e);
  put("sup_c", s.sup_c);
  put("sup_e", s.sup_e);
  put("sigma", s.sigma);
  put("compact", s.compact);
  put("simply_connected", s.simply_connected);
  put("pseudo_einstein", s.pseudo_einstein);
  return doc;
}

// Strict reader: unknown keys are rejected so a typo cannot silently drop a
// hypothesis, and absent keys stay absent.
inline ManifoldSummary manifold_summary_from_json(const json& doc) {
  require(doc.is_object(), "manifold summary JSON: need an object");
  static const std::unordered_set<std::string> known = {
      "n",     "rho",   "yamabe", "norm_c",  "norm_e",           "sup_c",
      "sup_e", "sigma", "compact", "simply_connected", "pseudo_einstein"};
  for (const auto& item : doc.items())
    require(known.count(item.key()) > 0,
            "manifold summary JSON: unknown key " + item.key());
  require(doc.contains("n") && doc.at("n").is_number_integer(),
          "manifold summary JSON: need an integer n");
  require(doc.contains("rho") && doc.at("rho").is_number(),
          "manifold summary JSON: need a numeric rho");

  ManifoldSummary s;
  s.n = doc.at("n").get<int>();
  s.rho = doc.at("rho").get<double>();
  auto get_number = [&doc](const char* key, std::optional<double>& out) {
    if (!doc.contains(key)) return;
    require(doc.at(key).is_number(),
            std::string("manifold summary JSON: ") + key + " must be a number");
    out = doc.at(key).get<double>();
  };
  auto get_flag = [&doc](const char* key, std::optional<bool>& out) {
    if (!doc.contains(key)) return;
    require(doc.at(key).is_boolean(),
            std::string("manifold summary JSON: ") + key + " must be a boolean");
    out = doc.at(key).get<bool>();
  };
  get_number("yamabe", s.yamabe);
  get_number("norm_c", s.norm_c);
  get_number("norm_e", s.norm_e);
  get_number("sup_c", s.sup_c);
  get_number("sup_e", s.sup_e);
  get_number("sigma", s.sigma);
  get_flag("compact", s.compact);
  get_flag("simply_connected", s.simply_connected);
  get_flag("pseudo_einstein", s.pseudo_einstein);
  s.validate();
  return s;
}

inline json pinch_report_to_json(const PinchReport& r) {
  json doc;
  doc["version"] = kVersion;
  doc["theorem"] = r.id;
  doc["status"] = pinch_status_name(r.status);
  if (r.status != PinchStatus::kNotApplicable) {
    doc["lhs"] = r.lhs;
    doc["coefficient"] = r.coefficient;
    doc["multiplier"] = r.multiplier;
    doc["threshold"] = r.threshold;
  }
  if (r.status == PinchStatus::kSatisfied) {
    doc["conclusion"] = r.conclusion;
    if (r.has_kappa) doc["kappa_sign"] = r.kappa_sign;
  }
  if (r.status == PinchStatus::kNotApplicable) doc["reason"] = r.reason;
  if (!r.notes.empty()) doc["notes"] = r.notes;
  return doc;
}

}  // namespace crgeo
