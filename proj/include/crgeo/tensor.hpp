#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "crgeo/core.hpp"

namespace crgeo {

// Dense rank-R complex tensor over C^n, row-major. Rank is tiny (2..5) so
// everything stays in flat vectors with computed strides.
template <int R>
class NTensor {
  static_assert(R >= 1 && R <= 6);

 public:
  NTensor() : n_(0) {}
  explicit NTensor(int n) : n_(n) {
    require(n >= 1, "NTensor: dimension must be >= 1");
    std::size_t total = 1;
    for (int r = 0; r < R; ++r) total *= static_cast<std::size_t>(n);
    data_.assign(total, cplx{0.0, 0.0});
  }

  int n() const { return n_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

  template <typename... Idx>
  cplx& operator()(Idx... idx) {
    static_assert(sizeof...(Idx) == R);
    return data_[flat(std::array<int, R>{static_cast<int>(idx)...})];
  }
  template <typename... Idx>
  cplx operator()(Idx... idx) const {
    static_assert(sizeof...(Idx) == R);
    return data_[flat(std::array<int, R>{static_cast<int>(idx)...})];
  }

  cplx at(const std::array<int, R>& idx) const { return data_[flat(idx)]; }
  cplx& at(const std::array<int, R>& idx) { return data_[flat(idx)]; }

  std::size_t flat(const std::array<int, R>& idx) const {
    std::size_t f = 0;
    for (int r = 0; r < R; ++r) f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[r]);
    return f;
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  NTensor<R>& operator+=(const NTensor<R>& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  NTensor<R>& operator-=(const NTensor<R>& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  NTensor<R>& operator*=(cplx s) {
    for (cplx& z : data_) z *= s;
    return *this;
  }
  friend NTensor<R> operator+(NTensor<R> a, const NTensor<R>& b) { return a += b; }
  friend NTensor<R> operator-(NTensor<R> a, const NTensor<R>& b) { return a -= b; }
  friend NTensor<R> operator*(cplx s, NTensor<R> a) { return a *= s; }

 private:
  int n_;
  std::vector<cplx> data_;
};

using CMatrix = NTensor<2>;

// --- small dense matrix helpers -------------------------------------------

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  require(a.n() == b.n(), "matmul: size mismatch");
  const int n = a.n();
  CMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline CMatrix adjoint(const CMatrix& a) {
  const int n = a.n();
  CMatrix b(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = std::conj(a(j, i));
  return b;
}

inline CMatrix identity_matrix(int n) {
  CMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

// --- Hermitian / symmetric matrix types -----------------------------------

// Hermitian n x n matrix. Entry (a, b) holds the component whose first slot
// is the unbarred index a and second slot the barred index b, so the matrix
// of a one-one curvature-type tensor reads M[a][b] with conj(M[a][b]) equal
// to M[b][a].
class HermitianMatrix {
 public:
  static constexpr double kTol = 1e-12;

  explicit HermitianMatrix(int n) : m_(n) {}

  explicit HermitianMatrix(CMatrix m, bool validate = true) : m_(std::move(m)) {
    if (validate) {
      double scale = std::max(m_.max_abs(), 1e-300);
      for (int i = 0; i < m_.n(); ++i)
        for (int j = i; j < m_.n(); ++j) {
          if (std::abs(m_(i, j) - std::conj(m_(j, i))) > kTol * scale)
            throw symmetry_error("HermitianMatrix: input is not Hermitian");
          if (!is_finite(m_(i, j)) || !is_finite(m_(j, i)))
            throw domain_error("HermitianMatrix: non-finite entry");
        }
    }
  }

  // Averages m with its adjoint; use when building from noisy data.
  static HermitianMatrix hermitian_part(const CMatrix& m) {
    CMatrix h(m.n());
    for (int i = 0; i < m.n(); ++i)
      for (int j = 0; j < m.n(); ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    return HermitianMatrix(std::move(h), false);
  }

  int n() const { return m_.n(); }
  cplx operator()(int a, int b) const { return m_(a, b); }
  cplx& entry(int a, int b) { return m_.data()[m_.flat({a, b})]; }
  const CMatrix& raw() const { return m_; }

  double trace_real() const {
    std::vector<double> d(static_cast<std::size_t>(n()));
    for (int i = 0; i < n(); ++i) d[static_cast<std::size_t>(i)] = m_(i, i).real();
    return pairwise_sum(d);
  }

  double frobenius_sq() const {
    std::vector<double> terms;
    terms.reserve(m_.size());
    for (const cplx& z : m_.data()) terms.push_back(norm_sq(z));
    return pairwise_sum(terms);
  }

  double max_abs() const { return m_.max_abs(); }

  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    m_ += o.m_;
    return *this;
  }
  HermitianMatrix& operator-=(const HermitianMatrix& o) {
    m_ -= o.m_;
    return *this;
  }
  HermitianMatrix scaled(double s) const {
    CMatrix m = m_;
    m *= cplx{s, 0.0};
    return HermitianMatrix(std::move(m), false);
  }

 private:
  CMatrix m_;
};

// Hermitian with vanishing trace (the traceless Ricci part lives here).
class TracelessHermitianMatrix : public HermitianMatrix {
 public:
  explicit TracelessHermitianMatrix(HermitianMatrix m, bool validate = true)
      : HermitianMatrix(std::move(m)) {
    if (validate) {
      double scale = std::max(max_abs(), 1e-300);
      if (std::abs(trace_real()) > kTol * n() * scale)
        throw symmetry_error("TracelessHermitianMatrix: trace is not zero");
    }
  }

  explicit TracelessHermitianMatrix(CMatrix m)
      : TracelessHermitianMatrix(HermitianMatrix(std::move(m))) {}

  // Subtracts (tr/n) * identity.
  static TracelessHermitianMatrix project(const HermitianMatrix& m) {
    CMatrix r = m.raw();
    cplx shift{m.trace_real() / m.n(), 0.0};
    for (int i = 0; i < m.n(); ++i) r.data()[r.flat({i, i})] -= shift;
    return TracelessHermitianMatrix(HermitianMatrix(std::move(r), false), false);
  }
};

// Symmetric complex n x n matrix holding the pseudo-Hermitian torsion
// components A_{ab} (both slots unbarred, A_{ab} = A_{ba}).
class TorsionMatrix {
 public:
  static constexpr double kTol = 1e-12;

  explicit TorsionMatrix(int n) : m_(n) {}

  explicit TorsionMatrix(CMatrix m, bool validate = true) : m_(std::move(m)) {
    if (validate) {
      double scale = std::max(m_.max_abs(), 1e-300);
      for (int i = 0; i < m_.n(); ++i)
        for (int j = i + 1; j < m_.n(); ++j)
          if (std::abs(m_(i, j) - m_(j, i)) > kTol * scale)
            throw symmetry_error("TorsionMatrix: input is not symmetric");
    }
  }

  int n() const { return m_.n(); }
  cplx operator()(int a, int b) const { return m_(a, b); }
  cplx& entry(int a, int b) { return m_.data()[m_.flat({a, b})]; }
  const CMatrix& raw() const { return m_; }
  double max_abs() const { return m_.max_abs(); }
  bool is_zero(double tol = 0.0) const { return m_.max_abs() <= tol; }

 private:
  CMatrix m_;
};

// --- the curvature-type symmetry group ------------------------------------

// One symmetry operation on a rank-4 tensor: permute slots, optionally
// conjugate. apply(t)(i0,i1,i2,i3) = maybe_conj(t(i_perm[0], ..., i_perm[3])).
struct SymOp4 {
  std::array<int, 4> perm;
  bool conjugate;

  bool operator==(const SymOp4& o) const { return perm == o.perm && conjugate == o.conjugate; }
};

inline SymOp4 compose(const SymOp4& a, const SymOp4& b) {
  SymOp4 c{};
  for (int k = 0; k < 4; ++k) c.perm[k] = a.perm[b.perm[k]];
  c.conjugate = a.conjugate != b.conjugate;
  return c;
}

// Closure of the three generators: exchange of the two unbarred slots
// (first Bianchi), exchange of the two barred slots, and the reality map
// conj t(a,b,l,m) = t(b,a,m,l). Order 8.
inline const std::vector<SymOp4>& curvature_symmetry_group() {
  static const std::vector<SymOp4> group = [] {
    std::vector<SymOp4> ops = {SymOp4{{0, 1, 2, 3}, false}};
    const std::vector<SymOp4> gens = {
        SymOp4{{0, 2, 1, 3}, false},   // swap unbarred slots
        SymOp4{{3, 1, 2, 0}, false},   // swap barred slots
        SymOp4{{1, 0, 3, 2}, true},    // reality
    };
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t i = 0; i < ops.size(); ++i)
        for (const SymOp4& g : gens) {
          SymOp4 c = compose(g, ops[i]);
          if (std::find(ops.begin(), ops.end(), c) == ops.end()) {
            ops.push_back(c);
            grew = true;
          }
        }
    }
    return ops;
  }();
  return group;
}

inline NTensor<4> apply_sym_op(const SymOp4& op, const NTensor<4>& t) {
  const int n = t.n();
  NTensor<4> out(n);
  std::array<int, 4> idx{}, src{};
  for (idx[0] = 0; idx[0] < n; ++idx[0])
    for (idx[1] = 0; idx[1] < n; ++idx[1])
      for (idx[2] = 0; idx[2] < n; ++idx[2])
        for (idx[3] = 0; idx[3] < n; ++idx[3]) {
          for (int k = 0; k < 4; ++k) src[k] = idx[op.perm[k]];
          cplx v = t.at(src);
          out.at(idx) = op.conjugate ? std::conj(v) : v;
        }
  return out;
}

// Group average; the orthogonal projector onto the symmetry class.
inline NTensor<4> curvature_group_average(const NTensor<4>& t) {
  const auto& group = curvature_symmetry_group();
  NTensor<4> acc(t.n());
  for (const SymOp4& op : group) acc += apply_sym_op(op, t);
  acc *= cplx{1.0 / static_cast<double>(group.size()), 0.0};
  return acc;
}

inline double curvature_symmetry_residual(const NTensor<4>& t) {
  NTensor<4> avg = curvature_group_average(t);
  avg -= t;
  return avg.max_abs();
}

// Curvature-type rank-4 tensor R(a,b,l,m): slot 0 barred, slots 1 and 2
// unbarred, slot 3 barred. Symmetric under the order-8 group above.
class WebsterTensor {
 public:
  static constexpr double kTol = 1e-12;

  explicit WebsterTensor(NTensor<4> t, bool validate = true) : t_(std::move(t)) {
    require(t_.n() >= 2, "WebsterTensor: dimension must be >= 2");
    if (validate) {
      for (const cplx& z : t_.data())
        if (!is_finite(z)) throw domain_error("WebsterTensor: non-finite entry");
      double scale = std::max(t_.max_abs(), 1e-300);
      if (curvature_symmetry_residual(t_) > kTol * scale)
        throw symmetry_error("WebsterTensor: symmetry residual exceeds tolerance");
    }
  }

  int n() const { return t_.n(); }
  cplx operator()(int a, int b, int l, int m) const { return t_(a, b, l, m); }
  const NTensor<4>& raw() const { return t_; }
  double max_abs() const { return t_.max_abs(); }

 private:
  NTensor<4> t_;
};

// Projects an arbitrary rank-4 tensor onto the curvature symmetry class.
inline WebsterTensor project_webster_symmetry(const NTensor<4>& raw) {
  for (const cplx& z : raw.data())
    if (!is_finite(z)) throw domain_error("project_webster_symmetry: non-finite entry");
  return WebsterTensor(curvature_group_average(raw), false);
}

// --- convention-weighted norms and inner products --------------------------
//
// The real tensor bundle splits into conjugate blocks, so squared norms pick
// up block-count weights relative to plain component sums:
//   Hermitian one-one tensors   weight 2
//   curvature-type (rank 4)     weight 4
//   one-one derivative (rank 3) weight 4
//   curvature derivative (rank 5) weight 8

inline double component_sq_sum(const std::vector<cplx>& data) {
  std::vector<double> terms;
  terms.reserve(data.size());
  for (const cplx& z : data) terms.push_back(norm_sq(z));
  return pairwise_sum(terms);
}

template <int R>
double component_sq_sum(const NTensor<R>& t) {
  return component_sq_sum(t.data());
}

inline double norm_e_sq(const HermitianMatrix& e) { return 2.0 * e.frobenius_sq(); }
inline double norm_e(const HermitianMatrix& e) { return std::sqrt(norm_e_sq(e)); }

inline double norm_c_sq(const WebsterTensor& c) { return 4.0 * component_sq_sum(c.raw().data()); }
inline double norm_c(const WebsterTensor& c) { return std::sqrt(norm_c_sq(c)); }

inline double norm_c_sq(const NTensor<4>& c) { return 4.0 * component_sq_sum(c.data()); }
inline double norm_c(const NTensor<4>& c) { return std::sqrt(norm_c_sq(c)); }

inline double norm_grad_e_sq(const NTensor<3>& de) { return 4.0 * component_sq_sum(de.data()); }
inline double norm_grad_e(const NTensor<3>& de) { return std::sqrt(norm_grad_e_sq(de)); }

inline double norm_grad_c_sq(const NTensor<5>& dc) { return 8.0 * component_sq_sum(dc.data()); }
inline double norm_grad_c(const NTensor<5>& dc) { return std::sqrt(norm_grad_c_sq(dc)); }

// Real sesquilinear pairings with the same weights, so inner_X(a, a) equals
// norm_X_sq(a).
inline double inner_sesquilinear_re(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<double> terms;
  terms.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    terms.push_back(a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
  return pairwise_sum(terms);
}

template <int R>
double inner_sesquilinear_re(const NTensor<R>& a, const NTensor<R>& b) {
  require(a.n() == b.n(), "inner_sesquilinear_re: size mismatch");
  return inner_sesquilinear_re(a.data(), b.data());
}

inline double inner_e(const HermitianMatrix& a, const HermitianMatrix& b) {
  require(a.n() == b.n(), "inner_e: size mismatch");
  return 2.0 * inner_sesquilinear_re(a.raw().data(), b.raw().data());
}

inline double inner_c(const WebsterTensor& a, const WebsterTensor& b) {
  require(a.n() == b.n(), "inner_c: size mismatch");
  return 4.0 * inner_sesquilinear_re(a.raw().data(), b.raw().data());
}

inline double inner_c(const NTensor<4>& a, const NTensor<4>& b) {
  require(a.n() == b.n(), "inner_c: size mismatch");
  return 4.0 * inner_sesquilinear_re(a.data(), b.data());
}

// --- slack bookkeeping ------------------------------------------------------

// One evaluated inequality instance. slack = rhs - lhs; witness is a short
// JSON snippet that regenerates or identifies the sample.
struct SlackRecord {
  std::string inequality;
  int n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::string witness;
};

inline SlackRecord make_slack_record(std::string inequality, int n, double lhs, double rhs,
                                     std::string witness) {
  require_finite(lhs, "slack record lhs");
  require_finite(rhs, "slack record rhs");
  SlackRecord r;
  r.inequality = std::move(inequality);
  r.n = n;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.witness = std::move(witness);
  return r;
}

}  // namespace crgeo
