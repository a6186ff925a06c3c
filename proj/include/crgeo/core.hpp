#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace crgeo {

using cplx = std::complex<double>;

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy. Callers (and the CLI) distinguish precondition failures
// (domain_error and friends, exit code 2) from violated mathematical
// invariants discovered at runtime (invariant_error, exit code 3).
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class domain_error : public error {
 public:
  using error::error;
};

class symmetry_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class grid_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class inconclusive_error : public domain_error {
 public:
  using domain_error::domain_error;
};

class invariant_error : public error {
 public:
  using error::error;
};

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw domain_error(what);
}

inline void require_finite(double x, const std::string& where) {
  if (!is_finite(x)) throw domain_error(where + ": non-finite value");
}

inline void require_finite(cplx z, const std::string& where) {
  if (!is_finite(z)) throw domain_error(where + ": non-finite value");
}

inline double sq(double x) { return x * x; }
inline double norm_sq(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

// Pairwise (cascade) summation. All reduction loops in the library funnel
// through this so results do not depend on traversal chunking.
template <typename T>
T pairwise_sum(const T* data, std::size_t count) {
  if (count == 0) return T{};
  if (count <= 8) {
    T acc = data[0];
    for (std::size_t i = 1; i < count; ++i) acc += data[i];
    return acc;
  }
  std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

// Accumulator that buffers terms and reduces pairwise on demand.
template <typename T>
class PairwiseAcc {
 public:
  void add(T value) { terms_.push_back(value); }
  T total() const { return pairwise_sum(terms_); }
  std::size_t count() const { return terms_.size(); }

 private:
  std::vector<T> terms_;
};

}  // namespace crgeo
