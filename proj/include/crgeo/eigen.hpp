#pragma once

#include <algorithm>
#include <numeric>

#include "crgeo/core.hpp"
#include "crgeo/tensor.hpp"

namespace crgeo {

struct EigenResult {
  std::vector<double> values;  // descending
  CMatrix unitary;             // columns are eigenvectors, adjoint(U) m U = diag
  int sweeps = 0;
};

namespace detail {

inline double offdiag_sq(const CMatrix& a) {
  const int n = a.n();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) s += norm_sq(a(i, j));
  return s;
}

}  // namespace detail

// Cyclic Jacobi for complex Hermitian matrices. Each rotation annihilates one
// off-diagonal entry with a phased Givens rotation; sweeps repeat until the
// off-diagonal mass drops below tol * ||m||_F.
inline EigenResult hermitian_eigen(const HermitianMatrix& m, double tol = 1e-12,
                                   int max_sweeps = 100) {
  const int n = m.n();
  require(n >= 1 && n <= 128, "hermitian_eigen: dimension out of range");
  require(tol > 0.0, "hermitian_eigen: tolerance must be positive");

  CMatrix a = m.raw();
  CMatrix u = identity_matrix(n);
  const double norm_f = std::sqrt(m.frobenius_sq());
  const double stop = tol * std::max(norm_f, 1e-300);

  int sweeps = 0;
  while (sweeps < max_sweeps && std::sqrt(detail::offdiag_sq(a)) > stop) {
    ++sweeps;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const cplx beta = a(p, q);
        const double babs = std::abs(beta);
        if (babs <= 1e-300) continue;

        const double alpha = a(p, p).real();
        const double gamma = a(q, q).real();
        const double theta = (gamma - alpha) / (2.0 * babs);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const cplx phase = beta / babs;
        const cplx s = t * c * phase;

        // A <- adjoint(R) A R with R mixing columns p and q.
        for (int k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - std::conj(s) * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = std::conj(s) * apk + c * aqk;
        }
        a(p, q) = cplx{0.0, 0.0};
        a(q, p) = cplx{0.0, 0.0};
        a(p, p) = cplx{a(p, p).real(), 0.0};
        a(q, q) = cplx{a(q, q).real(), 0.0};

        for (int k = 0; k < n; ++k) {
          const cplx ukp = u(k, p), ukq = u(k, q);
          u(k, p) = c * ukp - std::conj(s) * ukq;
          u(k, q) = s * ukp + c * ukq;
        }
      }
  }

  if (std::sqrt(detail::offdiag_sq(a)) > stop && sweeps >= max_sweeps)
    throw invariant_error("hermitian_eigen: no convergence within sweep budget");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

  EigenResult res;
  res.values.resize(static_cast<std::size_t>(n));
  res.unitary = CMatrix(n);
  for (int j = 0; j < n; ++j) {
    res.values[static_cast<std::size_t>(j)] = a(order[static_cast<std::size_t>(j)],
                                                order[static_cast<std::size_t>(j)]).real();
    for (int i = 0; i < n; ++i) res.unitary(i, j) = u(i, order[static_cast<std::size_t>(j)]);
  }
  res.sweeps = sweeps;
  return res;
}

}  // namespace crgeo
