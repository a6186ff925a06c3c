#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "crgeo/core.hpp"
#include "crgeo/curvature.hpp"
#include "crgeo/eigen.hpp"
#include "crgeo/rng.hpp"
#include "crgeo/sampling.hpp"
#include "crgeo/tensor.hpp"

namespace crgeo {

// --- scalar inequalities ----------------------------------------------------

// Cubic power-sum bound for centered real tuples: with sum(a) = 0 and
// k^2 = sum(a^2), |sum(a^3)| <= (m - 2) / sqrt(m (m - 1)) * k^3.
inline SlackRecord okumura_inequality(const std::vector<double>& a, const std::string& witness = "{}") {
  const int m = static_cast<int>(a.size());
  require(m >= 2, "okumura_inequality: need at least 2 components");
  for (double v : a) require_finite(v, "okumura_inequality component");

  std::vector<double> sq_terms(a.size()), cu_terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    sq_terms[i] = a[i] * a[i];
    cu_terms[i] = a[i] * a[i] * a[i];
  }
  const double k2 = pairwise_sum(sq_terms);
  const double mean = pairwise_sum(a) / m;
  require(std::abs(mean) <= 1e-10 * std::max(1.0, std::sqrt(k2)),
          "okumura_inequality: components must sum to zero");

  const double lhs = std::abs(pairwise_sum(cu_terms));
  const double rhs = (m - 2.0) / std::sqrt(static_cast<double>(m) * (m - 1.0)) *
                     std::pow(k2, 1.5);
  return make_slack_record("okumura", m, lhs, rhs, witness);
}

// The extremal distribution (m-1, -1, ..., -1) scaled to norm k.
inline std::vector<double> okumura_equality_vector(int m, double k) {
  require(m >= 2, "okumura_equality_vector: need m >= 2");
  require_finite(k, "okumura_equality_vector k");
  std::vector<double> a(static_cast<std::size_t>(m), -k / std::sqrt(static_cast<double>(m) * (m - 1.0)));
  a[0] = (m - 1.0) * k / std::sqrt(static_cast<double>(m) * (m - 1.0));
  return a;
}

// Pointwise refined Kato bound: for centered real lambda and a matrix mu
// whose rows are centered, each row gamma satisfies
//   |sum_a lambda_a mu(g, a)|^2
//     <= n/(n+1) (sum lambda^2) (|mu(g, g)|^2 + 2 sum_{a != g} |mu(g, a)|^2).
// Returns the row with the smallest slack.
inline SlackRecord kato_e_pointwise(const std::vector<double>& lambda, const CMatrix& mu,
                                    const std::string& witness = "{}") {
  const int n = static_cast<int>(lambda.size());
  require(n >= 2, "kato_e_pointwise: need n >= 2");
  require(mu.n() == n, "kato_e_pointwise: size mismatch");

  std::vector<double> sq_terms(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) sq_terms[i] = lambda[i] * lambda[i];
  const double l2 = pairwise_sum(sq_terms);
  require(std::abs(pairwise_sum(lambda)) <= 1e-10 * std::max(1.0, std::sqrt(l2)) * n,
          "kato_e_pointwise: lambda must sum to zero");

  SlackRecord worst;
  bool first = true;
  for (int g = 0; g < n; ++g) {
    PairwiseAcc<cplx> row_sum;
    PairwiseAcc<cplx> row_mean;
    PairwiseAcc<double> weight;
    for (int a = 0; a < n; ++a) {
      row_mean.add(mu(g, a));
      row_sum.add(lambda[static_cast<std::size_t>(a)] * mu(g, a));
      weight.add((a == g ? 1.0 : 2.0) * norm_sq(mu(g, a)));
    }
    require(std::abs(row_mean.total()) <= 1e-10 * std::max(1.0, mu.max_abs()) * n,
            "kato_e_pointwise: mu rows must sum to zero");

    const double lhs = norm_sq(row_sum.total());
    const double rhs = n / (n + 1.0) * l2 * weight.total();
    SlackRecord rec = make_slack_record("kato-e-pointwise", n, lhs, rhs, witness);
    if (first || rec.slack < worst.slack) {
      worst = rec;
      first = false;
    }
  }
  return worst;
}

// --- derivative-type tensors ------------------------------------------------

// Model of a covariant derivative of a traceless Hermitian matrix: slots
// (unbarred, barred, unbarred), symmetric in the two unbarred slots and
// trace-free against the barred slot.
inline NTensor<3> project_derivative_e(const NTensor<3>& raw) {
  const int n = raw.n();
  require(n >= 2, "project_derivative_e: n must be >= 2");
  NTensor<3> t(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        t(a, b, g) = 0.5 * (raw(a, b, g) + raw(g, b, a));

  std::vector<cplx> tr(static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) {
    PairwiseAcc<cplx> acc;
    for (int a = 0; a < n; ++a) acc.add(t(a, a, g));
    tr[static_cast<std::size_t>(g)] = acc.total();
  }
  const double w = 1.0 / (n + 1.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g) {
        cplx corr{0.0, 0.0};
        if (a == b) corr += tr[static_cast<std::size_t>(g)];
        if (g == b) corr += tr[static_cast<std::size_t>(a)];
        t(a, b, g) -= w * corr;
      }
  return t;
}

inline double derivative_e_trace_residual(const NTensor<3>& t) {
  const int n = t.n();
  double worst = 0.0;
  for (int g = 0; g < n; ++g) {
    PairwiseAcc<cplx> acc;
    for (int a = 0; a < n; ++a) acc.add(t(a, a, g));
    worst = std::max(worst, std::abs(acc.total()));
  }
  return worst;
}

inline NTensor<3> random_derivative_e(int n, std::uint64_t seed) {
  CounterRng rng = object_stream(seed, 0);
  NTensor<3> raw(n);
  for (cplx& z : raw.data()) z = rng.complex_box();
  return project_derivative_e(raw);
}

// Rank-5 symmetry ops for derivatives of curvature-type tensors: all
// permutations of the three unbarred slots {1, 2, 4} crossed with the swap
// of the barred slots {0, 3}.
struct SymOp5 {
  std::array<int, 5> perm;
};

inline const std::vector<SymOp5>& derivative_c_symmetry_group() {
  static const std::vector<SymOp5> group = [] {
    std::vector<SymOp5> ops;
    std::array<int, 3> unbarred{1, 2, 4};
    std::array<int, 3> u = unbarred;
    std::sort(u.begin(), u.end());
    do {
      for (int barred_swap = 0; barred_swap < 2; ++barred_swap) {
        SymOp5 op{};
        op.perm[0] = barred_swap ? 3 : 0;
        op.perm[3] = barred_swap ? 0 : 3;
        for (int k = 0; k < 3; ++k) op.perm[unbarred[static_cast<std::size_t>(k)]] = u[static_cast<std::size_t>(k)];
        ops.push_back(op);
      }
    } while (std::next_permutation(u.begin(), u.end()));
    return ops;
  }();
  return group;
}

inline NTensor<5> apply_sym_op(const SymOp5& op, const NTensor<5>& t) {
  const int n = t.n();
  NTensor<5> out(n);
  std::array<int, 5> idx{}, src{};
  for (idx[0] = 0; idx[0] < n; ++idx[0])
    for (idx[1] = 0; idx[1] < n; ++idx[1])
      for (idx[2] = 0; idx[2] < n; ++idx[2])
        for (idx[3] = 0; idx[3] < n; ++idx[3])
          for (idx[4] = 0; idx[4] < n; ++idx[4]) {
            for (int k = 0; k < 5; ++k) src[k] = idx[op.perm[k]];
            out.at(idx) = t.at(src);
          }
  return out;
}

inline NTensor<5> symmetrize_derivative_c(const NTensor<5>& raw) {
  const auto& group = derivative_c_symmetry_group();
  NTensor<5> acc(raw.n());
  for (const SymOp5& op : group) acc += apply_sym_op(op, raw);
  acc *= cplx{1.0 / static_cast<double>(group.size()), 0.0};
  return acc;
}

// Largest single-contraction magnitude over all (barred, unbarred) slot
// pairs.
inline double derivative_c_trace_residual(const NTensor<5>& t) {
  const int n = t.n();
  const std::array<std::pair<int, int>, 6> pairs{
      {{0, 1}, {0, 2}, {0, 4}, {3, 1}, {3, 2}, {3, 4}}};
  double worst = 0.0;
  std::array<int, 5> idx{};
  for (const auto& [bs, us] : pairs) {
    std::array<int, 3> rest{};
    int r = 0;
    for (int k = 0; k < 5; ++k)
      if (k != bs && k != us) rest[static_cast<std::size_t>(r++)] = k;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          idx[static_cast<std::size_t>(rest[0])] = i;
          idx[static_cast<std::size_t>(rest[1])] = j;
          idx[static_cast<std::size_t>(rest[2])] = k;
          PairwiseAcc<cplx> acc;
          for (int p = 0; p < n; ++p) {
            idx[static_cast<std::size_t>(bs)] = p;
            idx[static_cast<std::size_t>(us)] = p;
            acc.add(t.at(idx));
          }
          worst = std::max(worst, std::abs(acc.total()));
        }
  }
  return worst;
}

// Orthogonal projection onto the symmetric, fully trace-free class via
// alternating projections: group average, then exact removal of one trace
// pair (the group identifies all six). Both steps are orthogonal projections
// onto subspaces, so the alternation converges to the intersection.
inline NTensor<5> project_derivative_c(const NTensor<5>& raw, int max_rounds = 600) {
  const int n = raw.n();
  NTensor<5> t = symmetrize_derivative_c(raw);
  const double scale = std::max(t.max_abs(), 1e-300);

  for (int round = 0; round < max_rounds; ++round) {
    // Remove the (slot 0, slot 1) trace exactly.
    NTensor<3> tr(n);
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m)
        for (int g = 0; g < n; ++g) {
          PairwiseAcc<cplx> acc;
          for (int p = 0; p < n; ++p) acc.add(t(p, p, l, m, g));
          tr(l, m, g) = acc.total();
        }
    for (int a = 0; a < n; ++a)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          for (int g = 0; g < n; ++g) t(a, a, l, m, g) -= tr(l, m, g) * (1.0 / n);

    t = symmetrize_derivative_c(t);
    if (derivative_c_trace_residual(t) <= 1e-14 * scale) return t;
  }
  throw invariant_error("project_derivative_c: alternating projections did not converge");
}

inline NTensor<5> random_derivative_c(int n, std::uint64_t seed, bool traceless) {
  CounterRng rng = object_stream(seed, 0);
  NTensor<5> raw(n);
  for (cplx& z : raw.data()) z = rng.complex_box();
  return traceless ? project_derivative_c(raw) : symmetrize_derivative_c(raw);
}

// --- tensor inequalities ----------------------------------------------------

// Gradient pairing sum: 8 sum_g |sum_a lambda_a de'(a, a, g)|^2 evaluated in
// the eigenbasis of e.
inline double derivative_e_pairing_sq(const TracelessHermitianMatrix& e, const NTensor<3>& de) {
  const int n = e.n();
  require(de.n() == n, "derivative_e_pairing_sq: size mismatch");
  EigenResult eig = hermitian_eigen(e);
  const CMatrix& v = eig.unitary;

  PairwiseAcc<double> total;
  for (int g = 0; g < n; ++g) {
    PairwiseAcc<cplx> sg;
    // de'(a, a, g) = sum conj(v(p, a)) v(q, a) conj(v(r, g)) de(p, q, r).
    for (int a = 0; a < n; ++a)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          for (int r = 0; r < n; ++r)
            sg.add(eig.values[static_cast<std::size_t>(a)] * std::conj(v(p, a)) * v(q, a) *
                   std::conj(v(r, g)) * de(p, q, r));
    total.add(norm_sq(sg.total()));
  }
  return 8.0 * total.total();
}

// Frame-independent route for the same quantity.
inline double derivative_e_pairing_sq_direct(const HermitianMatrix& e, const NTensor<3>& de) {
  const int n = e.n();
  require(de.n() == n, "derivative_e_pairing_sq_direct: size mismatch");
  PairwiseAcc<double> total;
  for (int g = 0; g < n; ++g) {
    PairwiseAcc<cplx> sg;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) sg.add(e(a, b) * de(b, a, g));
    total.add(norm_sq(sg.total()));
  }
  return 8.0 * total.total();
}

// Tensor refined Kato bound for the traceless Ricci part.
inline SlackRecord kato_e_tensor(const TracelessHermitianMatrix& e, const NTensor<3>& de,
                                 const std::string& witness = "{}") {
  const int n = e.n();
  const double lhs = derivative_e_pairing_sq(e, de);
  const double rhs = n / (n + 1.0) * norm_e_sq(e) * norm_grad_e_sq(de);
  return make_slack_record("kato-e-tensor", n, lhs, rhs, witness);
}

// Cubic trace bound for traceless Hermitian matrices.
inline SlackRecord cubic_e_inequality(const TracelessHermitianMatrix& e,
                                      const std::string& witness = "{}") {
  const int n = e.n();
  CMatrix e2 = matmul(e.raw(), e.raw());
  CMatrix e3 = matmul(e2, e.raw());
  std::vector<double> diag(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = e3(i, i).real();
  const double lhs = std::abs(pairwise_sum(diag));
  const double rhs = 1.0 / (2.0 * std::sqrt(2.0)) * (n - 2.0) /
                     std::sqrt(static_cast<double>(n) * (n - 1.0)) * std::pow(norm_e_sq(e), 1.5);
  return make_slack_record("cubic-e", n, lhs, rhs, witness);
}

// Coupling bound between the traceless Ricci part and the trace-free part.
inline SlackRecord coupling_bound(const TracelessHermitianMatrix& e, const WebsterTensor& c,
                                  const std::string& witness = "{}") {
  const int n = e.n();
  const double lhs = std::abs(coupling_inner(e, c));
  const double rhs = 0.25 *
                     std::sqrt((2.0 * n * n + 4.0 * n + 3.0) / (2.0 * (n + 1.0) * (n + 2.0))) *
                     norm_e_sq(e) * norm_c(c);
  return make_slack_record("coupling-bound", n, lhs, rhs, witness);
}

// Trace-free curvature reshaped as a Hermitian form on C^n x C^n; index
// (l, a) flattens to l * n + a.
inline HermitianMatrix cm_matrix(const WebsterTensor& c) {
  const int n = c.n();
  CMatrix d(n * n);
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a)
      for (int m = 0; m < n; ++m)
        for (int b = 0; b < n; ++b) d(l * n + a, m * n + b) = c(l, a, m, b);

  double scale = std::max(c.max_abs(), 1e-300);
  for (int i = 0; i < n * n; ++i)
    for (int j = i; j < n * n; ++j)
      if (std::abs(d(i, j) - std::conj(d(j, i))) > 1e-10 * scale)
        throw symmetry_error("cm_matrix: reshape is not Hermitian");
  return HermitianMatrix::hermitian_part(d);
}

// Cubic trace bound for the reshaped trace-free curvature. lhs is the direct
// six-index contraction; the matrix route through eigenvalues must agree.
inline SlackRecord cm_cubic_inequality(const WebsterTensor& c, const std::string& witness = "{}") {
  const int n = c.n();
  const double scale = std::max(c.max_abs(), 1e-300);
  if (max_contraction_residual(c.raw()) > 1e-8 * scale * n)
    throw domain_error("cm_cubic_inequality: input must be trace-free");

  PairwiseAcc<cplx> tr3;
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a)
      for (int m = 0; m < n; ++m)
        for (int b = 0; b < n; ++b)
          for (int g = 0; g < n; ++g)
            for (int v = 0; v < n; ++v)
              tr3.add(c(l, a, m, b) * c(m, b, g, v) * c(g, v, l, a));
  cplx t3 = tr3.total();
  if (std::abs(t3.imag()) > 1e-9 * std::max(1.0, std::abs(t3)))
    throw invariant_error("cm_cubic_inequality: cubic trace is not real");

  const double m2 = component_sq_sum(c.raw());
  const double mm = static_cast<double>(n) * n;
  const double lhs = std::abs(t3.real());
  const double rhs = (mm - 2.0) / std::sqrt(mm * (mm - 1.0)) * std::pow(m2, 1.5);
  return make_slack_record("cm-cubic", n, lhs, rhs, witness);
}

// Refined Kato bound for the trace-free curvature part and its derivative
// model. raw_variant reports the plain symmetrized class instead of the
// trace-free one.
inline SlackRecord kato_c_inequality(const WebsterTensor& c, const NTensor<5>& dc,
                                     bool raw_variant = false,
                                     const std::string& witness = "{}") {
  const int n = c.n();
  require(dc.n() == n, "kato_c_inequality: size mismatch");

  PairwiseAcc<double> pairing;
  for (int g = 0; g < n; ++g) {
    PairwiseAcc<cplx> sg;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m)
            sg.add(std::conj(c(a, b, l, m)) * dc(a, b, l, m, g));
    pairing.add(norm_sq(sg.total()));
  }

  const double lhs = (n + 3.0) / (n + 1.0) * 32.0 * pairing.total();
  const double rhs = norm_c_sq(c) * norm_grad_c_sq(dc);
  return make_slack_record(raw_variant ? "kato-c-raw" : "kato-c", n, lhs, rhs, witness);
}

// Fourth power sum bound: tr(E^4) <= (tr(E^2))^2 for traceless Hermitian E.
inline SlackRecord z_bound(const TracelessHermitianMatrix& e, const std::string& witness = "{}") {
  CMatrix e2 = matmul(e.raw(), e.raw());
  CMatrix e4 = matmul(e2, e2);
  const int n = e.n();
  std::vector<double> diag(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = e4(i, i).real();
  const double lhs = pairwise_sum(diag);
  const double f = e.frobenius_sq();
  return make_slack_record("z-bound", n, lhs, f * f, witness);
}

// --- sampling harness -------------------------------------------------------

struct PlanItem {
  std::string id;
  std::vector<int> dims;
  int per_seed = 0;  // samples per dimension per seed
};

inline const std::vector<std::string>& inequality_ids() {
  static const std::vector<std::string> ids = {
      "okumura",   "kato-e-pointwise", "kato-e-tensor", "cubic-e", "coupling-bound",
      "cm-cubic",  "kato-c",           "kato-c-raw",    "z-bound"};
  return ids;
}

inline int inequality_index(const std::string& id) {
  const auto& ids = inequality_ids();
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return static_cast<int>(i);
  throw domain_error("unknown inequality id: " + id);
}

// Relative slack below which a sample counts as a violation. The refined
// Kato bound for the curvature part accumulates more roundoff than the
// algebraic bounds.
inline double violation_tolerance(const std::string& id) {
  if (id == "kato-c" || id == "kato-c-raw") return 1e-9;
  return 1e-10;
}

inline std::vector<PlanItem> default_plan() {
  return {
      {"okumura", {3, 4, 5, 6, 7, 8, 9, 10}, 125},
      {"kato-e-pointwise", {2, 3, 4, 5, 6, 7, 8}, 142},
      {"kato-e-tensor", {2, 3, 4, 5, 6}, 20},
      {"cubic-e", {3, 4, 5, 6, 7, 8}, 166},
      {"coupling-bound", {2, 3, 4, 5, 6}, 100},
      {"cm-cubic", {2, 3, 4, 5}, 25},
      {"kato-c", {2, 3, 4}, 34},
      {"kato-c-raw", {2, 3, 4}, 34},
      {"z-bound", {2, 3, 4, 5, 6, 7, 8}, 142},
  };
}

inline std::string sample_witness(const std::string& id, int dim, std::uint64_t seed,
                                  std::uint64_t k) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "{\"inequality\":\"%s\",\"n\":%d,\"seed\":%llu,\"sample\":%llu}", id.c_str(), dim,
                static_cast<unsigned long long>(seed), static_cast<unsigned long long>(k));
  return std::string(buf);
}

// Deterministic per-sample stream: identified by inequality, dimension,
// outer seed, and sample index, independent of evaluation order.
inline std::uint64_t sample_base_seed(const std::string& id, int dim, std::uint64_t seed,
                                      std::uint64_t k) {
  std::uint64_t s1 = rng_word_at(seed, 0x1000u + static_cast<std::uint64_t>(inequality_index(id)));
  return rng_word_at(s1, static_cast<std::uint64_t>(dim) * 0x10000u + k);
}

inline SlackRecord evaluate_inequality_sample(const std::string& id, int dim, std::uint64_t seed,
                                              std::uint64_t k) {
  const std::uint64_t base = sample_base_seed(id, dim, seed, k);
  const std::string witness = sample_witness(id, dim, seed, k);

  if (id == "okumura") return okumura_inequality(random_centered_real(dim, base), witness);
  if (id == "kato-e-pointwise") {
    std::vector<double> lambda = random_centered_real(dim, rng_word_at(base, 0));
    CMatrix mu(dim);
    for (int g = 0; g < dim; ++g) {
      std::vector<cplx> row = random_centered_complex(dim, rng_word_at(base, 1 + static_cast<std::uint64_t>(g)));
      for (int a = 0; a < dim; ++a) mu(g, a) = row[static_cast<std::size_t>(a)];
    }
    return kato_e_pointwise(lambda, mu, witness);
  }
  if (id == "kato-e-tensor")
    return kato_e_tensor(random_traceless_hermitian(dim, rng_word_at(base, 0)),
                         random_derivative_e(dim, rng_word_at(base, 1)), witness);
  if (id == "cubic-e")
    return cubic_e_inequality(random_traceless_hermitian(dim, rng_word_at(base, 0)), witness);
  if (id == "coupling-bound")
    return coupling_bound(random_traceless_hermitian(dim, rng_word_at(base, 0)),
                          random_webster(dim, rng_word_at(base, 1), true), witness);
  if (id == "cm-cubic")
    return cm_cubic_inequality(random_webster(dim, rng_word_at(base, 0), true), witness);
  if (id == "kato-c" || id == "kato-c-raw") {
    bool raw_variant = id == "kato-c-raw";
    return kato_c_inequality(random_webster(dim, rng_word_at(base, 0), true),
                             random_derivative_c(dim, rng_word_at(base, 1), !raw_variant),
                             raw_variant, witness);
  }
  if (id == "z-bound")
    return z_bound(random_traceless_hermitian(dim, rng_word_at(base, 0)), witness);
  throw domain_error("unknown inequality id: " + id);
}

struct InequalityRun {
  std::string id;
  std::vector<int> dims;
  std::uint64_t seed_lo = 0;
  std::uint64_t seed_hi = 0;
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double min_rel_slack = 0.0;  // min over samples of slack / scale
  SlackRecord worst;           // sample attaining min_rel_slack
  std::vector<SlackRecord> violation_records;      // capped
  std::vector<SlackRecord> near_equality_records;  // capped
};

namespace detail {

struct SampleKey {
  int dim;
  std::uint64_t seed;
  std::uint64_t k;
};

inline double rel_slack_of(const SlackRecord& rec) {
  double scale = std::max({1.0, std::abs(rec.lhs), std::abs(rec.rhs)});
  return rec.slack / scale;
}

}  // namespace detail

// Evaluates one inequality over the given seed range. Slacks are computed per
// sample from order-independent streams; the interesting samples are
// re-evaluated afterwards for their full records, so worker count never
// changes the result.
inline InequalityRun run_inequality(const PlanItem& item, std::uint64_t seed_lo,
                                    std::uint64_t seed_hi, int workers = 1,
                                    double near_tol = 1e-3, std::size_t record_cap = 8) {
  require(seed_hi > seed_lo, "run_inequality: empty seed range");
  require(workers >= 1, "run_inequality: need at least one worker");

  std::vector<detail::SampleKey> keys;
  for (std::uint64_t seed = seed_lo; seed < seed_hi; ++seed)
    for (int dim : item.dims)
      for (int k = 0; k < item.per_seed; ++k)
        keys.push_back({dim, seed, static_cast<std::uint64_t>(k)});

  std::vector<double> rel(keys.size(), 0.0);
  auto eval_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      SlackRecord rec =
          evaluate_inequality_sample(item.id, keys[i].dim, keys[i].seed, keys[i].k);
      rel[i] = detail::rel_slack_of(rec);
    }
  };

  if (workers == 1 || keys.size() < 256) {
    eval_range(0, keys.size());
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (keys.size() + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
    for (int w = 0; w < workers; ++w) {
      std::size_t lo = static_cast<std::size_t>(w) * chunk;
      std::size_t hi = std::min(keys.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(eval_range, lo, hi);
    }
    for (std::thread& t : pool) t.join();
  }

  InequalityRun run;
  run.id = item.id;
  run.dims = item.dims;
  run.seed_lo = seed_lo;
  run.seed_hi = seed_hi;
  run.samples = keys.size();

  const double tol = violation_tolerance(item.id);
  std::size_t worst_idx = 0;
  std::vector<std::size_t> viol_idx, near_idx;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (rel[i] < rel[worst_idx]) worst_idx = i;
    if (rel[i] < -tol)
      viol_idx.push_back(i);
    else if (rel[i] < near_tol)
      near_idx.push_back(i);
  }
  run.violations = viol_idx.size();
  run.min_rel_slack = rel[worst_idx];

  auto by_rel = [&](std::size_t a, std::size_t b) { return rel[a] < rel[b]; };
  std::sort(viol_idx.begin(), viol_idx.end(), by_rel);
  std::sort(near_idx.begin(), near_idx.end(), by_rel);
  if (viol_idx.size() > record_cap) viol_idx.resize(record_cap);
  if (near_idx.size() > record_cap) near_idx.resize(record_cap);

  run.worst =
      evaluate_inequality_sample(item.id, keys[worst_idx].dim, keys[worst_idx].seed, keys[worst_idx].k);
  for (std::size_t i : viol_idx)
    run.violation_records.push_back(
        evaluate_inequality_sample(item.id, keys[i].dim, keys[i].seed, keys[i].k));
  for (std::size_t i : near_idx)
    run.near_equality_records.push_back(
        evaluate_inequality_sample(item.id, keys[i].dim, keys[i].seed, keys[i].k));
  return run;
}

inline std::vector<InequalityRun> run_plan(const std::vector<PlanItem>& plan,
                                           std::uint64_t seed_lo, std::uint64_t seed_hi,
                                           int workers = 1, double near_tol = 1e-3) {
  std::vector<InequalityRun> out;
  out.reserve(plan.size());
  for (const PlanItem& item : plan)
    out.push_back(run_inequality(item, seed_lo, seed_hi, workers, near_tol));
  return out;
}

}  // namespace crgeo
