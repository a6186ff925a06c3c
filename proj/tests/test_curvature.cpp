#include <cmath>
#include <complex>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "crgeo/core.hpp"
#include "crgeo/curvature.hpp"
#include "crgeo/eigen.hpp"
#include "crgeo/rng.hpp"
#include "crgeo/sampling.hpp"
#include "crgeo/tensor.hpp"

using namespace crgeo;

namespace {

std::vector<cplx> random_direction(int n, CounterRng& rng) {
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (cplx& v : z) v = rng.complex_box();
  return z;
}

}  // namespace

TEST_CASE("space form curvature has the hand-computed entries") {
  WebsterTensor r = space_form_curvature(2, 1.0);
  CHECK(r(0, 0, 0, 0) == cplx{4.0, 0.0});
  CHECK(r(0, 0, 1, 1) == cplx{2.0, 0.0});
  CHECK(r(0, 1, 0, 1) == cplx{2.0, 0.0});
  CHECK(r(0, 1, 1, 0) == cplx{0.0, 0.0});
  CHECK(r(1, 1, 1, 1) == cplx{4.0, 0.0});

  HermitianMatrix ricci = ricci_contraction(r);
  CHECK(ricci(0, 0) == cplx{6.0, 0.0});
  CHECK(ricci(0, 1) == cplx{0.0, 0.0});
  CHECK(scalar_curvature(r) == 12.0);

  CurvatureDecomposition d = decompose(r);
  CHECK(d.scalar == 12.0);
  CHECK(d.chern_moser.max_abs() <= 1e-13);
  CHECK(d.traceless_ricci.max_abs() <= 1e-13);
}

TEST_CASE("decomposition round-trips and is orthogonal") {
  for (int n : {2, 3, 4, 5}) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      WebsterTensor r = random_webster_symmetric(n, 5000 + 100 * static_cast<std::uint64_t>(n) + seed);
      CurvatureDecomposition d = decompose(r);

      WebsterTensor back = recompose(d);
      NTensor<4> diff = back.raw();
      diff -= r.raw();
      double scale = std::max(1.0, r.max_abs());
      CHECK(diff.max_abs() <= 1e-12 * scale);

      // The three blocks are pairwise orthogonal, so raw component square
      // sums add up.
      NTensor<4> eb = ricci_block_tensor(d.traceless_ricci);
      NTensor<4> sb = scalar_block_tensor(n, d.scalar);
      double total = component_sq_sum(r.raw());
      double parts = component_sq_sum(d.chern_moser.raw()) + component_sq_sum(eb) +
                     component_sq_sum(sb);
      CHECK(std::abs(total - parts) <= 1e-10 * std::max(1.0, total));

      CHECK(std::abs(inner_sesquilinear_re(d.chern_moser.raw(), eb)) <= 1e-10 * std::max(1.0, total));
      CHECK(std::abs(inner_sesquilinear_re(d.chern_moser.raw(), sb)) <= 1e-10 * std::max(1.0, total));
      CHECK(std::abs(inner_sesquilinear_re(eb, sb)) <= 1e-10 * std::max(1.0, total));

      // The trace-free part stays inside the symmetry class.
      CHECK(curvature_symmetry_residual(d.chern_moser.raw()) <= 1e-11 * scale);
      CHECK(max_contraction_residual(d.chern_moser.raw()) <= 1e-11 * scale * n);
    }
  }
}

TEST_CASE("traceless random curvature draws are trace-free") {
  WebsterTensor c = random_webster(3, 123, true);
  CHECK(max_contraction_residual(c.raw()) <= 1e-11 * std::max(1.0, c.max_abs()));
  CurvatureDecomposition d = decompose(c);
  CHECK(std::abs(d.scalar) <= 1e-11 * std::max(1.0, c.max_abs()));
  CHECK(d.traceless_ricci.max_abs() <= 1e-11 * std::max(1.0, c.max_abs()));
}

TEST_CASE("recompose rejects a part that is not trace-free") {
  WebsterTensor r = space_form_curvature(2, 1.0);
  TracelessHermitianMatrix zero{CMatrix(2)};
  CHECK_THROWS_AS(recompose(r, zero, 0.0), domain_error);
}

TEST_CASE("quadratic split identities on a hand-computed matrix") {
  CMatrix d(2);
  d(0, 0) = cplx{1.0, 0.0};
  d(1, 1) = cplx{-1.0, 0.0};
  TracelessHermitianMatrix e{CMatrix(d)};
  QuadraticRicciSplit s = quadratic_ricci_split(e);

  CHECK(s.f == 2.0);
  CHECK(s.z == 2.0);
  CHECK(s.full(0, 0, 0, 0) == cplx{2.0, 0.0});
  CHECK(s.full(0, 0, 1, 1) == cplx{-1.0, 0.0});
  CHECK(s.full(0, 1, 0, 1) == cplx{-1.0, 0.0});
  CHECK(s.full(0, 1, 1, 0) == cplx{0.0, 0.0});

  CHECK(0.25 * norm_c_sq(s.full) == Catch::Approx(12.0).margin(1e-12));
  CHECK(0.25 * norm_c_sq(s.partial) == Catch::Approx(0.0).margin(1e-12));
  CHECK(0.25 * norm_c_sq(s.pure) == Catch::Approx(4.0 / 3.0).margin(1e-12));
  CHECK(0.25 * norm_c_sq(s.trace_free) == Catch::Approx(32.0 / 3.0).margin(1e-12));
}

TEST_CASE("quadratic split identities on random draws") {
  for (int n : {2, 3, 4, 5, 6}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      TracelessHermitianMatrix e = random_traceless_hermitian(n, 7000 + 10 * static_cast<std::uint64_t>(n) + seed);
      QuadraticRicciSplit s = quadratic_ricci_split(e);

      const double e2 = norm_e_sq(e);
      const double e4 = e2 * e2;
      CHECK(s.f == Catch::Approx(0.5 * e2).epsilon(1e-12));

      double tol = 1e-10 * std::max(1.0, e4);
      CHECK(std::abs(0.25 * norm_c_sq(s.full) - (0.5 * e4 + 2.0 * s.z)) <= tol);
      CHECK(std::abs(0.25 * norm_c_sq(s.partial) -
                     (4.0 / (n + 2.0)) * (s.z - e4 / (4.0 * n))) <= tol);
      CHECK(std::abs(0.25 * norm_c_sq(s.pure) - e4 / (2.0 * n * (n + 1.0))) <= tol);
      CHECK(std::abs(0.25 * norm_c_sq(s.trace_free) -
                     ((n * n + 3.0 * n + 3.0) / (2.0 * (n + 1.0) * (n + 2.0)) * e4 +
                      2.0 * n / (n + 2.0) * s.z)) <= tol);

      // The split reproduces the full tensor and is orthogonal.
      NTensor<4> sum = s.trace_free;
      sum += s.partial;
      sum += s.pure;
      sum -= s.full;
      CHECK(sum.max_abs() <= 1e-11 * std::max(1.0, s.full.max_abs()));

      CHECK(std::abs(inner_sesquilinear_re(s.trace_free, s.partial)) <= tol);
      CHECK(std::abs(inner_sesquilinear_re(s.trace_free, s.pure)) <= tol);
      CHECK(std::abs(inner_sesquilinear_re(s.partial, s.pure)) <= tol);

      // Fourth power sum never exceeds the squared second power sum.
      CHECK(s.z <= s.f * s.f + 1e-12 * std::max(1.0, s.f * s.f));
    }
  }
}

TEST_CASE("coupling contraction agrees between direct and split routes") {
  for (int n : {2, 3, 4}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      TracelessHermitianMatrix e = random_traceless_hermitian(n, 8000 + 10 * static_cast<std::uint64_t>(n) + seed);
      WebsterTensor c = random_webster(n, 8500 + 10 * static_cast<std::uint64_t>(n) + seed, true);

      double direct = coupling_inner(e, c);
      QuadraticRicciSplit s = quadratic_ricci_split(e);
      double via_full = 0.125 * inner_c(s.full, c.raw());
      double via_trace_free = 0.125 * inner_c(s.trace_free, c.raw());

      double scale = std::max({1.0, std::abs(direct), std::abs(via_full)});
      CHECK(std::abs(direct - via_full) <= 1e-10 * scale);
      CHECK(std::abs(direct - via_trace_free) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("pseudo sectional curvature is constant on space forms") {
  for (int n : {2, 3}) {
    for (double kappa : {1.0, -0.7}) {
      WebsterTensor r = space_form_curvature(n, kappa);
      CounterRng rng = object_stream(4242, static_cast<std::uint64_t>(n));
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<cplx> z = random_direction(n, rng);
        double k = pseudo_sectional_curvature(r, z);
        CHECK(std::abs(k - kappa) <= 1e-12 * std::max(1.0, std::abs(kappa)));
      }
    }
  }
}

TEST_CASE("frame rotation preserves decomposition invariants") {
  for (int n : {2, 3}) {
    WebsterTensor r = random_webster_symmetric(n, 9100 + static_cast<std::uint64_t>(n));
    CMatrix u = random_unitary(n, 9200 + static_cast<std::uint64_t>(n));
    WebsterTensor rr = rotate_frame(r, u);

    CurvatureDecomposition d0 = decompose(r);
    CurvatureDecomposition d1 = decompose(rr);

    double scale = std::max(1.0, r.max_abs());
    CHECK(std::abs(d0.scalar - d1.scalar) <= 1e-10 * scale);
    CHECK(std::abs(norm_e_sq(d0.traceless_ricci) - norm_e_sq(d1.traceless_ricci)) <= 1e-10 * sq(scale) * n * n);
    CHECK(std::abs(norm_c_sq(d0.chern_moser) - norm_c_sq(d1.chern_moser)) <= 1e-9 * sq(scale) * n * n * n * n);

    // Ricci transforms by conjugation.
    HermitianMatrix expected = rotate_frame(ricci_contraction(r), u);
    HermitianMatrix got = ricci_contraction(rr);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(std::abs(expected(i, j) - got(i, j)) <= 1e-10 * scale * n);

    // Sectional curvature transforms by pulling the direction back. With
    // Hermitian contractions transforming as adjoint(u) m u, a direction z
    // in the rotated frame corresponds to conj(u) z in the original frame.
    CounterRng rng = object_stream(9300, static_cast<std::uint64_t>(n));
    std::vector<cplx> z = random_direction(n, rng);
    std::vector<cplx> uz(static_cast<std::size_t>(n), cplx{});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        uz[static_cast<std::size_t>(i)] += std::conj(u(i, j)) * z[static_cast<std::size_t>(j)];
    CHECK(pseudo_sectional_curvature(rr, z) ==
          Catch::Approx(pseudo_sectional_curvature(r, uz)).margin(1e-10));
  }
}

TEST_CASE("ricci gap identity holds on random curvature tensors") {
  for (int n : {2, 3, 4, 5}) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      WebsterTensor r = random_webster_symmetric(n, 11000 + 20 * static_cast<std::uint64_t>(n) + seed);
      SlackRecord rec = ricci_gap_identity_check(r);
      double scale = std::max({1.0, std::abs(rec.lhs), std::abs(rec.rhs)});
      CHECK(std::abs(rec.slack) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("bridge metric conventions") {
  std::vector<cplx> e0{cplx{1.0 / std::sqrt(2.0), 0.0}, cplx{0.0, 0.0}};
  TangentVector x = real_tangent(e0, 0.0);
  TangentVector t = real_tangent(std::vector<cplx>(2, cplx{}), 1.0);

  CHECK(std::abs(bridge_metric(x, x) - cplx{1.0, 0.0}) <= 1e-15);
  CHECK(bridge_metric(t, t) == cplx{1.0, 0.0});
  CHECK(bridge_metric(x, t) == cplx{0.0, 0.0});
  CHECK(bridge_theta(t) == cplx{1.0, 0.0});

  TangentVector jx = bridge_j(x);
  CHECK(std::abs(bridge_metric(jx, jx) - cplx{1.0, 0.0}) <= 1e-15);
  CHECK(std::abs(bridge_metric(jx, x)) <= 1e-15);
  CHECK(std::abs(bridge_dtheta(x, jx) - cplx{1.0, 0.0}) <= 1e-15);
}

TEST_CASE("ambient sectional curvatures on space forms") {
  for (int n : {2, 3}) {
    for (double kappa : {1.0, 0.3}) {
      WebsterTensor r = space_form_curvature(n, kappa);
      CounterRng rng = object_stream(5050, static_cast<std::uint64_t>(n));

      for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> xi = random_direction(n, rng);
        double norm = 0.0;
        for (const cplx& v : xi) norm += norm_sq(v);
        for (cplx& v : xi) v /= std::sqrt(2.0 * norm);
        TangentVector x = real_tangent(xi, 0.0);
        TangentVector jx = bridge_j(x);
        TangentVector t = real_tangent(std::vector<cplx>(static_cast<std::size_t>(n), cplx{}), 1.0);

        // Holomorphic planes see 4*kappa - 3, planes containing the Reeb
        // direction see exactly 1.
        CHECK(sectional_curvature(r, x, jx) == Catch::Approx(4.0 * kappa - 3.0).margin(1e-12));
        CHECK(sectional_curvature(r, x, t) == Catch::Approx(1.0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("ambient ricci tensor relations") {
  for (int n : {2, 3}) {
    double kappa = 0.8;
    WebsterTensor r = space_form_curvature(n, kappa);
    HermitianMatrix ricci = ricci_contraction(r);

    // On the complex frame the ambient Ricci drops 2 delta from the
    // curvature contraction.
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) {
        TangentVector y, z;
        y.holo.assign(static_cast<std::size_t>(n), cplx{});
        y.anti.assign(static_cast<std::size_t>(n), cplx{});
        z = y;
        y.holo[static_cast<std::size_t>(l)] = cplx{1.0, 0.0};
        z.anti[static_cast<std::size_t>(m)] = cplx{1.0, 0.0};
        cplx expect = ricci(l, m) - (l == m ? cplx{2.0, 0.0} : cplx{0.0, 0.0});
        CHECK(std::abs(riemannian_ricci(r, y, z) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
      }

    // The Reeb direction always has ambient Ricci 2n.
    TangentVector t = real_tangent(std::vector<cplx>(static_cast<std::size_t>(n), cplx{}), 1.0);
    CHECK(std::abs(riemannian_ricci(r, t, t) - cplx{2.0 * n, 0.0}) <= 1e-12);

    // Mixed horizontal-Reeb terms vanish without torsion.
    TangentVector x = real_tangent(std::vector<cplx>{cplx{1.0, 0.0}, cplx{0.0, 0.0}}, 0.0);
    if (n == 2) CHECK(std::abs(riemannian_ricci(r, x, t)) <= 1e-12);
  }
}

TEST_CASE("curvature operator annihilates the reeb direction") {
  WebsterTensor r = random_webster_symmetric(2, 606);
  TangentVector t = real_tangent(std::vector<cplx>(2, cplx{}), 1.0);
  std::vector<cplx> e0{cplx{1.0, 0.0}, cplx{0.0, 0.0}};
  std::vector<cplx> e1{cplx{0.0, 0.0}, cplx{1.0, 0.0}};
  TangentVector x = real_tangent(e0, 0.0);
  TangentVector y = real_tangent(e1, 0.0);

  TangentVector rt = bridge_curvature_action(r, x, y, t);
  for (const cplx& v : rt.holo) CHECK(std::abs(v) <= 1e-15);
  for (const cplx& v : rt.anti) CHECK(std::abs(v) <= 1e-15);
  CHECK(std::abs(rt.reeb) <= 1e-15);

  TangentVector tx = bridge_curvature_action(r, t, y, x);
  for (const cplx& v : tx.holo) CHECK(std::abs(v) <= 1e-15);
  for (const cplx& v : tx.anti) CHECK(std::abs(v) <= 1e-15);
}

TEST_CASE("space form classification by sign") {
  CHECK(tanno_classify(2.0) == SpaceFormModel::kSphere);
  CHECK(tanno_classify(0.0) == SpaceFormModel::kHeisenberg);
  CHECK(tanno_classify(-1.0) == SpaceFormModel::kComplexBallTimesLine);
  CHECK(to_string(SpaceFormModel::kSphere) == "sphere");
  CHECK(to_string(SpaceFormModel::kHeisenberg) == "heisenberg");
  CHECK(to_string(SpaceFormModel::kComplexBallTimesLine) == "complex-ball-times-line");
}
