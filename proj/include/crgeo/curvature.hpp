#pragma once

#include <string>
#include <utility>
#include <vector>

#include "crgeo/core.hpp"
#include "crgeo/eigen.hpp"
#include "crgeo/sampling.hpp"
#include "crgeo/tensor.hpp"

namespace crgeo {

// Index layout reminder: a curvature entry r(a, b, l, m) carries slots
// (barred a, unbarred b, unbarred l, barred m). Hermitian matrices store
// h(a, b) = component (unbarred a, barred b), so the barred-first component
// with values (a, b) reads conj(h(a, b)).

// Ricci-type contraction over the first two slots.
inline HermitianMatrix ricci_contraction(const WebsterTensor& r) {
  const int n = r.n();
  CMatrix out(n);
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m) {
      std::vector<cplx> terms(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) terms[static_cast<std::size_t>(a)] = r(a, a, l, m);
      out(l, m) = pairwise_sum(terms);
    }
  return HermitianMatrix::hermitian_part(out);
}

inline double scalar_curvature(const WebsterTensor& r) {
  return ricci_contraction(r).trace_real();
}

// The two pure-trace building blocks of the orthogonal decomposition.
inline NTensor<4> ricci_block_tensor(const HermitianMatrix& e) {
  const int n = e.n();
  NTensor<4> t(n);
  const double w = 1.0 / (n + 2.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          cplx v{0.0, 0.0};
          if (l == m) v += std::conj(e(a, b));
          if (b == m) v += std::conj(e(a, l));
          if (a == b) v += e(l, m);
          if (a == l) v += e(b, m);
          t(a, b, l, m) = w * v;
        }
  return t;
}

inline NTensor<4> scalar_block_tensor(int n, double scalar) {
  NTensor<4> t(n);
  const double w = scalar / (static_cast<double>(n) * (n + 1.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          double v = 0.0;
          if (a == b && l == m) v += 1.0;
          if (a == l && b == m) v += 1.0;
          t(a, b, l, m) = w * v;
        }
  return t;
}

// Largest single-contraction magnitude; zero for the totally trace-free part.
inline double max_contraction_residual(const NTensor<4>& t) {
  const int n = t.n();
  double worst = 0.0;
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m) {
      std::vector<cplx> terms(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a) terms[static_cast<std::size_t>(a)] = t(a, a, l, m);
      worst = std::max(worst, std::abs(pairwise_sum(terms)));
    }
  return worst;
}

struct CurvatureDecomposition {
  WebsterTensor chern_moser;
  TracelessHermitianMatrix traceless_ricci;
  double scalar = 0.0;

  int n() const { return chern_moser.n(); }
};

// Orthogonal split of a curvature tensor into trace-free part, traceless
// Ricci block, and scalar block.
inline CurvatureDecomposition decompose(const WebsterTensor& r) {
  const int n = r.n();
  HermitianMatrix ricci = ricci_contraction(r);
  const double rho = ricci.trace_real();
  TracelessHermitianMatrix e = TracelessHermitianMatrix::project(ricci);

  NTensor<4> c = r.raw();
  c -= ricci_block_tensor(e);
  c -= scalar_block_tensor(n, rho);

  const double scale = std::max(r.max_abs(), 1e-300);
  if (max_contraction_residual(c) > 1e-10 * scale * n)
    throw invariant_error("decompose: trace-free part retains a contraction");

  return CurvatureDecomposition{WebsterTensor(std::move(c), false), std::move(e), rho};
}

inline WebsterTensor recompose(const WebsterTensor& chern_moser,
                               const TracelessHermitianMatrix& e, double scalar) {
  require(chern_moser.n() == e.n(), "recompose: size mismatch");
  require_finite(scalar, "recompose scalar");
  const double scale = std::max(chern_moser.max_abs(), 1e-300);
  if (max_contraction_residual(chern_moser.raw()) > 1e-10 * scale * chern_moser.n())
    throw domain_error("recompose: trace-free part has nonzero contraction");
  NTensor<4> t = chern_moser.raw();
  t += ricci_block_tensor(e);
  t += scalar_block_tensor(chern_moser.n(), scalar);
  return WebsterTensor(std::move(t), false);
}

inline WebsterTensor recompose(const CurvatureDecomposition& d) {
  return recompose(d.chern_moser, d.traceless_ricci, d.scalar);
}

// Constant pseudo-Hermitian sectional curvature kappa generator.
inline WebsterTensor space_form_curvature(int n, double kappa) {
  require(n >= 2, "space_form_curvature: n must be >= 2");
  require_finite(kappa, "space_form_curvature kappa");
  NTensor<4> t(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          double v = 0.0;
          if (a == b && l == m) v += 1.0;
          if (a == l && b == m) v += 1.0;
          t(a, b, l, m) = 2.0 * kappa * v;
        }
  return WebsterTensor(std::move(t), false);
}

// Random curvature-type tensor; traceless draws keep only the trace-free
// part of the decomposition.
inline WebsterTensor random_webster(int n, std::uint64_t seed, bool traceless) {
  WebsterTensor r = random_webster_symmetric(n, seed);
  if (!traceless) return r;
  return decompose(r).chern_moser;
}

// Sectional curvature of the holomorphic plane spanned by Z: quarter of the
// full contraction against (conj Z, Z, Z, conj Z), normalized by |Z|^4.
inline double pseudo_sectional_curvature(const WebsterTensor& r, const std::vector<cplx>& z) {
  const int n = r.n();
  require(static_cast<int>(z.size()) == n, "pseudo_sectional_curvature: direction size mismatch");
  double zn = 0.0;
  for (const cplx& v : z) {
    require_finite(v, "pseudo_sectional_curvature direction");
    zn += norm_sq(v);
  }
  require(zn > 0.0, "pseudo_sectional_curvature: zero direction");

  PairwiseAcc<cplx> acc;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          acc.add(r(a, b, l, m) * std::conj(z[static_cast<std::size_t>(a)]) *
                  z[static_cast<std::size_t>(b)] * z[static_cast<std::size_t>(l)] *
                  std::conj(z[static_cast<std::size_t>(m)]));
  return 0.25 * acc.total().real() / (zn * zn);
}

// --- quadratic traceless-Ricci tensor and its orthogonal split -------------

struct QuadraticRicciSplit {
  NTensor<4> full;      // F: the quadratic E-tensor
  NTensor<4> trace_free;  // T
  NTensor<4> partial;   // P, the traceless-matrix block
  NTensor<4> pure;      // Q, the scalar block
  double f = 0.0;       // F's Ricci-type scalar, equals |E|^2 / 2
  double z = 0.0;       // fourth power sum of E's eigenvalues
};

inline QuadraticRicciSplit quadratic_ricci_split(const TracelessHermitianMatrix& e) {
  const int n = e.n();
  require(n >= 2, "quadratic_ricci_split: n must be >= 2");

  NTensor<4> full(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          full(a, b, l, m) =
              std::conj(e(a, b)) * e(l, m) + std::conj(e(a, l)) * e(b, m);

  const double f = e.frobenius_sq();

  CMatrix e2 = matmul(e.raw(), e.raw());
  CMatrix e4 = matmul(e2, e2);
  std::vector<double> diag(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = e4(i, i).real();
  const double z = pairwise_sum(diag);

  CMatrix ft = e2;
  for (int i = 0; i < n; ++i) ft.data()[ft.flat({i, i})] -= cplx{f / n, 0.0};
  HermitianMatrix ftilde = HermitianMatrix::hermitian_part(ft);

  NTensor<4> partial = ricci_block_tensor(ftilde);
  // The scalar block carries f/(n(n+1)) on each delta pair.
  NTensor<4> pure = scalar_block_tensor(n, f);

  NTensor<4> trace_free = full;
  trace_free -= partial;
  trace_free -= pure;

  QuadraticRicciSplit out;
  out.full = std::move(full);
  out.trace_free = std::move(trace_free);
  out.partial = std::move(partial);
  out.pure = std::move(pure);
  out.f = f;
  out.z = z;
  return out;
}

// Scalar coupling between the traceless Ricci part and a trace-free
// curvature tensor: sum over E(g, l) c(b, l, a, g) E(b, a). Real by symmetry.
inline double coupling_inner(const TracelessHermitianMatrix& e, const WebsterTensor& c) {
  const int n = e.n();
  require(c.n() == n, "coupling_inner: size mismatch");
  PairwiseAcc<cplx> acc;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int l = 0; l < n; ++l)
        for (int g = 0; g < n; ++g)
          acc.add(e(g, l) * c(b, l, a, g) * e(b, a));
  cplx v = acc.total();
  double scale = std::max({std::abs(v), e.max_abs(), c.max_abs(), 1e-300});
  if (std::abs(v.imag()) > 1e-10 * scale)
    throw invariant_error("coupling_inner: contraction is not real");
  return v.real();
}

// --- frame changes ----------------------------------------------------------

// Components in the rotated frame: barred slots contract the unitary, the
// unbarred slots its conjugate, so Hermitian contractions transform as
// adjoint(U) M U.
inline WebsterTensor rotate_frame(const WebsterTensor& r, const CMatrix& u) {
  const int n = r.n();
  require(u.n() == n, "rotate_frame: size mismatch");
  NTensor<4> t0 = r.raw();

  auto contract_slot = [n](const NTensor<4>& t, const CMatrix& m, int slot) {
    NTensor<4> out(n);
    std::array<int, 4> idx{};
    for (idx[0] = 0; idx[0] < n; ++idx[0])
      for (idx[1] = 0; idx[1] < n; ++idx[1])
        for (idx[2] = 0; idx[2] < n; ++idx[2])
          for (idx[3] = 0; idx[3] < n; ++idx[3]) {
            cplx acc{0.0, 0.0};
            std::array<int, 4> src = idx;
            for (int p = 0; p < n; ++p) {
              src[static_cast<std::size_t>(slot)] = p;
              acc += m(p, idx[static_cast<std::size_t>(slot)]) * t.at(src);
            }
            out.at(idx) = acc;
          }
    return out;
  };

  CMatrix ubar(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ubar(i, j) = std::conj(u(i, j));

  NTensor<4> t1 = contract_slot(t0, u, 0);
  NTensor<4> t2 = contract_slot(t1, ubar, 1);
  NTensor<4> t3 = contract_slot(t2, ubar, 2);
  NTensor<4> t4 = contract_slot(t3, u, 3);
  return WebsterTensor(std::move(t4), false);
}

inline HermitianMatrix rotate_frame(const HermitianMatrix& h, const CMatrix& u) {
  return HermitianMatrix::hermitian_part(matmul(adjoint(u), matmul(h.raw(), u)));
}

// --- eigenbasis gap identity ------------------------------------------------

// In the Ricci eigenbasis, the cubic eigenvalue sum minus the curvature-
// weighted quadratic equals a sum of curvature-weighted squared eigenvalue
// gaps. Returns both sides for the caller to compare.
inline SlackRecord ricci_gap_identity_check(const WebsterTensor& r) {
  const int n = r.n();
  HermitianMatrix ricci = ricci_contraction(r);
  EigenResult eig = hermitian_eigen(ricci);
  WebsterTensor rr = rotate_frame(r, eig.unitary);

  const std::vector<double>& lam = eig.values;
  std::vector<double> cubic(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) cubic[static_cast<std::size_t>(a)] = lam[static_cast<std::size_t>(a)] * lam[static_cast<std::size_t>(a)] * lam[static_cast<std::size_t>(a)];

  PairwiseAcc<double> cross, gaps;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double eab = rr(a, a, b, b).real();
      cross.add(eab * lam[static_cast<std::size_t>(b)] * lam[static_cast<std::size_t>(a)]);
      if (a != b) gaps.add(eab * sq(lam[static_cast<std::size_t>(a)] - lam[static_cast<std::size_t>(b)]));
    }

  double lhs = 4.0 * pairwise_sum(cubic) - 4.0 * cross.total();
  double rhs = 2.0 * gaps.total();
  return make_slack_record("ricci-gap-identity", n, lhs, rhs, "{}");
}

// --- tangent bridge to the ambient Riemannian metric -----------------------

// Tangent vector with independent holomorphic, antiholomorphic, and Reeb
// components; real vectors have anti = conj(holo) and real reeb.
struct TangentVector {
  std::vector<cplx> holo;
  std::vector<cplx> anti;
  cplx reeb{0.0, 0.0};

  int n() const { return static_cast<int>(holo.size()); }
};

inline TangentVector real_tangent(const std::vector<cplx>& xi, double reeb) {
  TangentVector v;
  v.holo = xi;
  v.anti.resize(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) v.anti[i] = std::conj(xi[i]);
  v.reeb = cplx{reeb, 0.0};
  return v;
}

// Conventions frozen by the constant-curvature and Ricci bridge tests:
// g(eta_a, eta_bbar) = delta, theta(T) = 1, J eta = i eta,
// dtheta(eta_a, eta_bbar) = i delta.
inline cplx bridge_metric(const TangentVector& x, const TangentVector& y) {
  PairwiseAcc<cplx> acc;
  for (int i = 0; i < x.n(); ++i) {
    acc.add(x.holo[static_cast<std::size_t>(i)] * y.anti[static_cast<std::size_t>(i)]);
    acc.add(x.anti[static_cast<std::size_t>(i)] * y.holo[static_cast<std::size_t>(i)]);
  }
  return acc.total() + x.reeb * y.reeb;
}

inline cplx bridge_theta(const TangentVector& x) { return x.reeb; }

inline TangentVector bridge_j(const TangentVector& x) {
  TangentVector out = x;
  for (cplx& z : out.holo) z *= cplx{0.0, 1.0};
  for (cplx& z : out.anti) z *= cplx{0.0, -1.0};
  out.reeb = cplx{0.0, 0.0};
  return out;
}

inline cplx bridge_dtheta(const TangentVector& x, const TangentVector& y) {
  PairwiseAcc<cplx> acc;
  for (int i = 0; i < x.n(); ++i) {
    acc.add(x.holo[static_cast<std::size_t>(i)] * y.anti[static_cast<std::size_t>(i)]);
    acc.add(-x.anti[static_cast<std::size_t>(i)] * y.holo[static_cast<std::size_t>(i)]);
  }
  return cplx{0.0, 1.0} * acc.total();
}

// Tanaka-Webster curvature operator applied to z (torsion-free case: the
// Reeb direction is flat and the operator is type (1,1) in x, y).
inline TangentVector bridge_curvature_action(const WebsterTensor& r, const TangentVector& x,
                                             const TangentVector& y, const TangentVector& z) {
  const int n = r.n();
  TangentVector out;
  out.holo.assign(static_cast<std::size_t>(n), cplx{});
  out.anti.assign(static_cast<std::size_t>(n), cplx{});
  out.reeb = cplx{0.0, 0.0};

  CMatrix mix(n);
  for (int l = 0; l < n; ++l)
    for (int m = 0; m < n; ++m)
      mix(l, m) = x.holo[static_cast<std::size_t>(l)] * y.anti[static_cast<std::size_t>(m)] -
                  y.holo[static_cast<std::size_t>(l)] * x.anti[static_cast<std::size_t>(m)];

  for (int a = 0; a < n; ++a) {
    PairwiseAcc<cplx> holo_acc, anti_acc;
    for (int b = 0; b < n; ++b)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) {
          holo_acc.add(mix(l, m) * z.holo[static_cast<std::size_t>(b)] * r(a, b, l, m));
          anti_acc.add(-mix(l, m) * z.anti[static_cast<std::size_t>(b)] *
                       std::conj(r(a, b, m, l)));
        }
    out.holo[static_cast<std::size_t>(a)] = holo_acc.total();
    out.anti[static_cast<std::size_t>(a)] = anti_acc.total();
  }
  return out;
}

// Curvature of the ambient metric g_theta + theta (x) theta on a torsion-free
// structure, paired against w.
inline cplx webster_to_riemannian(const WebsterTensor& r, const TangentVector& x,
                                  const TangentVector& y, const TangentVector& z,
                                  const TangentVector& w) {
  const int n = r.n();
  require(x.n() == n && y.n() == n && z.n() == n && w.n() == n,
          "webster_to_riemannian: component size mismatch");

  cplx out = bridge_metric(bridge_curvature_action(r, x, y, z), w);

  TangentVector jx = bridge_j(x), jy = bridge_j(y), jz = bridge_j(z);
  out += bridge_metric(jx, z) * bridge_metric(jy, w);
  out -= bridge_metric(jy, z) * bridge_metric(jx, w);
  out += 2.0 * bridge_dtheta(x, y) * bridge_metric(jz, w);
  out += bridge_theta(x) * bridge_metric(y, z) * bridge_theta(w);
  out -= bridge_theta(y) * bridge_metric(x, z) * bridge_theta(w);
  out -= bridge_theta(z) * bridge_theta(x) * bridge_metric(y, w);
  out += bridge_theta(z) * bridge_theta(y) * bridge_metric(x, w);
  return out;
}

inline double sectional_curvature(const WebsterTensor& r, const TangentVector& x,
                                  const TangentVector& y) {
  cplx num = webster_to_riemannian(r, x, y, y, x);
  cplx gxx = bridge_metric(x, x), gyy = bridge_metric(y, y), gxy = bridge_metric(x, y);
  cplx den = gxx * gyy - gxy * gxy;
  require(std::abs(den) > 1e-12, "sectional_curvature: degenerate plane");
  return (num / den).real();
}

// Ricci tensor of the ambient metric on the complex frame, via the real
// orthonormal basis trace.
inline cplx riemannian_ricci(const WebsterTensor& r, const TangentVector& y,
                             const TangentVector& z) {
  const int n = r.n();
  PairwiseAcc<cplx> acc;
  for (int a = 0; a < n; ++a) {
    for (int variant = 0; variant < 2; ++variant) {
      std::vector<cplx> xi(static_cast<std::size_t>(n), cplx{});
      xi[static_cast<std::size_t>(a)] =
          variant == 0 ? cplx{1.0 / std::sqrt(2.0), 0.0} : cplx{0.0, 1.0 / std::sqrt(2.0)};
      TangentVector e = real_tangent(xi, 0.0);
      acc.add(webster_to_riemannian(r, e, y, z, e));
    }
  }
  TangentVector reeb = real_tangent(std::vector<cplx>(static_cast<std::size_t>(n), cplx{}), 1.0);
  acc.add(webster_to_riemannian(r, reeb, y, z, reeb));
  return acc.total();
}

// --- constant-curvature model classification --------------------------------

enum class SpaceFormModel { kSphere, kHeisenberg, kComplexBallTimesLine };

inline SpaceFormModel tanno_classify(double kappa) {
  require_finite(kappa, "tanno_classify kappa");
  if (kappa > 0.0) return SpaceFormModel::kSphere;
  if (kappa == 0.0) return SpaceFormModel::kHeisenberg;
  return SpaceFormModel::kComplexBallTimesLine;
}

inline std::string to_string(SpaceFormModel m) {
  switch (m) {
    case SpaceFormModel::kSphere:
      return "sphere";
    case SpaceFormModel::kHeisenberg:
      return "heisenberg";
    case SpaceFormModel::kComplexBallTimesLine:
      return "complex-ball-times-line";
  }
  return "unknown";
}

}  // namespace crgeo
