#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "crgeo/core.hpp"
#include "crgeo/heisenberg.hpp"
#include "crgeo/tensor.hpp"

namespace crgeo {

// A real-valued conformal factor from the closed-form catalogue, so that all
// frame derivatives are exact expression trees rather than finite differences.
struct ConformalFactor {
  std::string id;
  int n = 0;
  ExprPtr u;
};

inline std::vector<std::string> conformal_catalogue_ids() {
  return {"zero", "abs-z-sq", "re-z1", "t-sq"};
}

inline ConformalFactor conformal_catalogue(const std::string& id, int n) {
  require(n >= 1, "conformal_catalogue: n must be >= 1");
  ConformalFactor f;
  f.id = id;
  f.n = n;
  if (id == "zero") {
    f.u = expr_const(cplx{0.0, 0.0});
  } else if (id == "abs-z-sq") {
    f.u = expr_abs_z_sq(n);
  } else if (id == "re-z1") {
    f.u = expr_scale(cplx{0.5, 0.0}, expr_add(expr_z(0), expr_zbar(0)));
  } else if (id == "t-sq") {
    f.u = expr_mul(expr_t(), expr_t());
  } else {
    throw domain_error("conformal_catalogue: unknown factor id '" + id + "'");
  }
  return f;
}

struct TransformedPointData {
  HeisenbergPoint point;
  TorsionMatrix torsion;
  HermitianMatrix ricci;
  double scalar = 0.0;
  // The same quantity under the alternative displayed coefficient
  // (gradient-square weight 4(n+1) instead of 4n(n+1)); recorded as metadata,
  // never used downstream. See scalar consistency notes in the README.
  double scalar_display_variant = 0.0;
  double webster_scale = 1.0;  // e^{2u} at the point

  explicit TransformedPointData(int n) : torsion(n), ricci(n) {}
};

// Pointwise CR conformal transformation laws over the flat base (zero
// torsion, zero curvature), with all second frame derivatives u_{ab} taken
// as eta_b(eta_a u).
class ConformalTransform {
 public:
  explicit ConformalTransform(ConformalFactor factor) : f_(std::move(factor)) {
    require(static_cast<bool>(f_.u), "ConformalTransform: empty factor");
    const int n = f_.n;
    du_.resize(static_cast<std::size_t>(n));
    dub_.resize(static_cast<std::size_t>(n));
    holo_.assign(static_cast<std::size_t>(n * n), nullptr);
    mixed_.assign(static_cast<std::size_t>(n * n), nullptr);
    mixed_rev_.assign(static_cast<std::size_t>(n * n), nullptr);
    for (int a = 0; a < n; ++a) {
      du_[static_cast<std::size_t>(a)] = eta(f_.u, a);
      dub_[static_cast<std::size_t>(a)] = eta_bar(f_.u, a);
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        holo_[at(a, b)] = eta(du_[static_cast<std::size_t>(a)], b);
        mixed_[at(a, b)] = eta_bar(du_[static_cast<std::size_t>(a)], b);
        mixed_rev_[at(a, b)] = eta(dub_[static_cast<std::size_t>(b)], a);
      }
  }

  const ConformalFactor& factor() const { return f_; }

  TransformedPointData at(const HeisenbergPoint& p) const {
    const int n = f_.n;
    require(p.n() == n, "ConformalTransform: point dimension mismatch");

    cplx uval = expr_eval(f_.u, p);
    require(std::abs(uval.imag()) <= 1e-12 * std::max(1.0, std::abs(uval)),
            "ConformalTransform: factor is not real at the point");
    const double scale = std::exp(2.0 * uval.real());
    const double inv_scale = 1.0 / scale;

    std::vector<cplx> ua(static_cast<std::size_t>(n)), uab(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      ua[static_cast<std::size_t>(a)] = expr_eval(du_[static_cast<std::size_t>(a)], p);
      uab[static_cast<std::size_t>(a)] = expr_eval(dub_[static_cast<std::size_t>(a)], p);
    }

    CMatrix torsion(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cplx second = expr_eval(holo_[at(a, b)], p);
        torsion(a, b) = inv_scale * cplx{0.0, 1.0} *
                        (second - 2.0 * ua[static_cast<std::size_t>(a)] * ua[static_cast<std::size_t>(b)]);
      }

    cplx trace_mixed{0.0, 0.0};
    cplx grad_pair{0.0, 0.0};
    for (int a = 0; a < n; ++a) {
      trace_mixed += expr_eval(mixed_[at(a, a)], p) + expr_eval(mixed_rev_[at(a, a)], p);
      grad_pair += ua[static_cast<std::size_t>(a)] * uab[static_cast<std::size_t>(a)];
    }

    CMatrix ricci(n);
    cplx diag_term = trace_mixed + 4.0 * (n + 1.0) * grad_pair;
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) {
        cplx second = expr_eval(mixed_[at(l, m)], p) + expr_eval(mixed_rev_[at(l, m)], p);
        ricci(l, m) = inv_scale * (-(n + 2.0) * second - (l == m ? diag_term : cplx{0.0, 0.0}));
      }

    TransformedPointData out(n);
    out.point = p;
    out.torsion = TorsionMatrix(std::move(torsion));
    out.ricci = HermitianMatrix(std::move(ricci));
    cplx tr{0.0, 0.0};
    for (int l = 0; l < n; ++l) tr += out.ricci(l, l);
    out.scalar = tr.real();
    out.scalar_display_variant =
        (inv_scale * (-2.0 * (n + 1.0) * trace_mixed - 4.0 * (n + 1.0) * grad_pair)).real();
    out.webster_scale = scale;
    return out;
  }

 private:
  std::size_t at(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(f_.n) + static_cast<std::size_t>(b);
  }

  ConformalFactor f_;
  std::vector<ExprPtr> du_, dub_;
  std::vector<ExprPtr> holo_, mixed_, mixed_rev_;
};

inline TorsionMatrix transform_torsion(const ConformalFactor& f, const HeisenbergPoint& p) {
  return ConformalTransform(f).at(p).torsion;
}

inline std::pair<HermitianMatrix, double> transform_ricci_scalar(const ConformalFactor& f,
                                                                 const HeisenbergPoint& p) {
  TransformedPointData d = ConformalTransform(f).at(p);
  return {d.ricci, d.scalar};
}

// --- D-homothety -------------------------------------------------------------

// Pointwise field bundle carried through a constant rescaling of the contact
// form. Norms are pointwise values, volume_density the local volume factor.
struct HomothetyBundle {
  int n = 0;
  HermitianMatrix ricci;
  double scalar = 0.0;
  TorsionMatrix torsion;
  double chern_moser_norm = 0.0;
  double volume_density = 1.0;

  explicit HomothetyBundle(int dim) : n(dim), ricci(dim), torsion(dim) {}
};

inline HomothetyBundle d_homothety(const HomothetyBundle& in, double lambda) {
  require(lambda > 0.0, "d_homothety: scale must be positive");
  require(in.n >= 1, "d_homothety: empty bundle");
  const double inv = 1.0 / lambda;

  HomothetyBundle out = in;
  CMatrix r(in.n), t(in.n);
  for (int a = 0; a < in.n; ++a)
    for (int b = 0; b < in.n; ++b) {
      r(a, b) = inv * in.ricci(a, b);
      t(a, b) = inv * in.torsion(a, b);
    }
  out.ricci = HermitianMatrix(std::move(r), false);
  out.torsion = TorsionMatrix(std::move(t), false);
  out.scalar = inv * in.scalar;
  out.chern_moser_norm = inv * in.chern_moser_norm;
  out.volume_density = std::pow(lambda, in.n + 1) * in.volume_density;
  return out;
}

// Contribution of one point to the scale invariant norm functional
// integral(|C|^{n+1} dV).
inline double conformal_norm_functional_density(const HomothetyBundle& b) {
  return std::pow(b.chern_moser_norm, b.n + 1) * b.volume_density;
}

// Given a lower Ricci bound R >= c * id with c > 0, rescaled Riemannian
// horizontal Ricci positivity lambda^{-1} c - 2 > 0 holds exactly for
// lambda below this limit.
inline double homothety_positivity_limit(double c) {
  require(c > 0.0, "homothety_positivity_limit: bound must be positive");
  return 0.5 * c;
}

// --- nonconstant scalar witness ----------------------------------------------

struct NonconstantScalarReport {
  std::vector<TransformedPointData> points;
  double scalar_min = 0.0;
  double scalar_max = 0.0;
  double max_einstein_residual = 0.0;
  std::string consequence;
};

// Evaluates the transformed scalar curvature of the squared modulus factor
// at the given points, confirms it varies while the transformed Ricci stays
// pseudo-Einstein, and emits the contrapositive consequence for the torsion
// divergence (which is itself never computed here).
inline NonconstantScalarReport nonconstant_scalar_witness(int n,
                                                          const std::vector<HeisenbergPoint>& pts) {
  require(n >= 1, "nonconstant_scalar_witness: n must be >= 1");
  if (pts.size() < 2) throw inconclusive_error("nonconstant_scalar_witness: need at least two points");

  double r_min = 0.0, r_max = 0.0;
  bool first = true;
  for (const HeisenbergPoint& p : pts) {
    require(p.n() == n, "nonconstant_scalar_witness: point dimension mismatch");
    double r2 = 0.0;
    for (const cplx& z : p.z) r2 += norm_sq(z);
    r_min = first ? r2 : std::min(r_min, r2);
    r_max = first ? r2 : std::max(r_max, r2);
    first = false;
  }
  if (r_max - r_min <= 1e-12 * std::max(1.0, r_max))
    throw inconclusive_error("nonconstant_scalar_witness: points share the same |z|");

  ConformalTransform ct(conformal_catalogue("abs-z-sq", n));
  NonconstantScalarReport rep;
  for (const HeisenbergPoint& p : pts) rep.points.push_back(ct.at(p));

  rep.scalar_min = rep.points.front().scalar;
  rep.scalar_max = rep.points.front().scalar;
  double abs_scale = 0.0;
  for (const TransformedPointData& d : rep.points) {
    rep.scalar_min = std::min(rep.scalar_min, d.scalar);
    rep.scalar_max = std::max(rep.scalar_max, d.scalar);
    abs_scale = std::max(abs_scale, std::abs(d.scalar));
    double mean = d.scalar / n;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cplx e = d.ricci(a, b) - (a == b ? cplx{mean, 0.0} : cplx{0.0, 0.0});
        rep.max_einstein_residual = std::max(rep.max_einstein_residual, std::abs(e));
      }
  }

  if (rep.scalar_max - rep.scalar_min <= 1e-6 * abs_scale)
    throw invariant_error("nonconstant_scalar_witness: scalar spread below witness threshold");
  if (rep.max_einstein_residual > 1e-12 * std::max(1.0, abs_scale))
    throw invariant_error("nonconstant_scalar_witness: transformed Ricci is not pseudo-Einstein");

  rep.consequence =
      "nonconstant transformed scalar curvature with vanishing traceless Ricci: "
      "the divergence of the transformed torsion cannot vanish";
  return rep;
}

}  // namespace crgeo
