#pragma once

#include <cstdint>

#include "crgeo/core.hpp"
#include "crgeo/rng.hpp"
#include "crgeo/tensor.hpp"

namespace crgeo {

// Draw order is part of the stream contract: entries are consumed row-major,
// real part before imaginary part, so a (seed, index) pair pins the object.

inline TracelessHermitianMatrix random_traceless_hermitian(int n, std::uint64_t seed) {
  require(n >= 2, "random_traceless_hermitian: n must be >= 2");
  CounterRng rng(seed);
  CMatrix m(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) {
        m(a, a) = cplx{rng.symmetric(), 0.0};
      } else if (a < b) {
        m(a, b) = rng.complex_box();
      } else {
        m(a, b) = std::conj(m(b, a));
      }
    }
  return TracelessHermitianMatrix::project(HermitianMatrix(std::move(m), false));
}

inline HermitianMatrix random_hermitian(int n, std::uint64_t seed) {
  require(n >= 1, "random_hermitian: n must be >= 1");
  CounterRng rng(seed);
  CMatrix m(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b)
        m(a, a) = cplx{rng.symmetric(), 0.0};
      else if (a < b)
        m(a, b) = rng.complex_box();
      else
        m(a, b) = std::conj(m(b, a));
    }
  return HermitianMatrix(std::move(m), false);
}

namespace detail {

inline NTensor<4> random_rank4(int n, CounterRng& rng) {
  NTensor<4> t(n);
  for (cplx& z : t.data()) z = rng.complex_box();
  return t;
}

}  // namespace detail

// Random curvature-type tensor: a raw complex draw pushed through the
// symmetry projector. Declared in curvature.hpp when traceless: the trace
// blocks are subtracted via the orthogonal decomposition there, so this
// header only provides the plain symmetric draw.
inline WebsterTensor random_webster_symmetric(int n, std::uint64_t seed) {
  require(n >= 2, "random_webster_symmetric: n must be >= 2");
  CounterRng rng(seed);
  NTensor<4> t = detail::random_rank4(n, rng);
  return project_webster_symmetry(t);
}

// Centered real vector, uniform components shifted to zero mean.
inline std::vector<double> random_centered_real(int m, std::uint64_t seed) {
  require(m >= 2, "random_centered_real: need at least 2 components");
  CounterRng rng(seed);
  std::vector<double> a(static_cast<std::size_t>(m));
  for (double& x : a) x = rng.symmetric();
  double mean = pairwise_sum(a) / m;
  for (double& x : a) x -= mean;
  return a;
}

// Centered complex vector.
inline std::vector<cplx> random_centered_complex(int m, std::uint64_t seed) {
  require(m >= 2, "random_centered_complex: need at least 2 components");
  CounterRng rng(seed);
  std::vector<cplx> a(static_cast<std::size_t>(m));
  for (cplx& z : a) z = rng.complex_box();
  cplx mean = pairwise_sum(a) / cplx{static_cast<double>(m), 0.0};
  for (cplx& z : a) z -= mean;
  return a;
}

// Haar-ish random unitary via modified Gram-Schmidt on a random complex
// matrix. Used for frame-change invariance tests; distribution details do
// not matter, orthonormality does.
inline CMatrix random_unitary(int n, std::uint64_t seed) {
  require(n >= 1, "random_unitary: n must be >= 1");
  CounterRng rng(seed);
  CMatrix m(n);
  for (cplx& z : m.data()) z = rng.complex_box();
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) {
      cplx dot{0.0, 0.0};
      for (int i = 0; i < n; ++i) dot += std::conj(m(i, k)) * m(i, j);
      for (int i = 0; i < n; ++i) m(i, j) -= dot * m(i, k);
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += norm_sq(m(i, j));
    nrm = std::sqrt(nrm);
    require(nrm > 1e-12, "random_unitary: degenerate draw");
    for (int i = 0; i < n; ++i) m(i, j) /= nrm;
  }
  return m;
}

}  // namespace crgeo
