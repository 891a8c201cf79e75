#pragma once

// Non-increasing rearrangement and the Lorentz-space quantities built on it.

#include <algorithm>
#include <limits>
#include <numeric>
#include <type_traits>

#include "ctvs/core.hpp"

namespace ctvs {

/// Magnitudes sorted non-increasingly, together with the permutation that
/// realizes the order: magnitudes[k] == |x[permutation[k]]|. Ties keep
/// ascending source index.
struct RearrangedSequence {
  std::vector<double> magnitudes;
  IndexSet permutation;
  std::size_t source_length = 0;

  std::size_t size() const noexcept { return magnitudes.size(); }
  double top() const noexcept { return magnitudes.empty() ? 0.0 : magnitudes.front(); }
};

template <class T>
RearrangedSequence rearrange(std::span<const T> values) {
  static_assert(std::is_arithmetic_v<T> || std::is_same_v<T, Complex>,
                "rearrange expects real or complex samples");
  if (values.empty()) throw InvalidArgument("empty input");

  const std::size_t n = values.size();
  std::vector<double> mags(n);
  for (std::size_t j = 0; j < n; ++j) {
    mags[j] = std::abs(values[j]);
    if (!std::isfinite(mags[j])) throw InvalidArgument("non-finite sample at index " + std::to_string(j));
  }

  RearrangedSequence r;
  r.source_length = n;
  r.permutation.resize(n);
  std::iota(r.permutation.begin(), r.permutation.end(), std::size_t{0});
  std::stable_sort(r.permutation.begin(), r.permutation.end(),
                   [&](std::size_t a, std::size_t b) { return mags[a] > mags[b]; });
  r.magnitudes.resize(n);
  for (std::size_t k = 0; k < n; ++k) r.magnitudes[k] = mags[r.permutation[k]];
  return r;
}

inline RearrangedSequence rearrange(const Signal& x) { return rearrange(x.view()); }

inline RearrangedSequence rearrange(const std::vector<double>& v) {
  return rearrange(std::span<const double>(v));
}

/// Weak-l1 (Lorentz L^{1,inf}) quasinorm: sup_k k * x*_k.
inline double weak_l1_quasinorm(const RearrangedSequence& r) {
  double best = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    best = std::max(best, static_cast<double>(k + 1) * r.magnitudes[k]);
  return best;
}

inline double weak_l1_quasinorm(const Signal& x) { return weak_l1_quasinorm(rearrange(x)); }

/// l^p norm of the sample moduli, p >= 1 or p = infinity.
template <class T>
double lp_norm(std::span<const T> values, double p) {
  if (std::isnan(p) || p < 1.0) throw InvalidArgument("not a norm");
  double peak = 0.0;
  for (const auto& v : values) peak = std::max(peak, static_cast<double>(std::abs(v)));
  if (std::isinf(p) || peak == 0.0) return peak;
  if (p == 1.0) {
    double sum = 0.0;
    for (const auto& v : values) sum += static_cast<double>(std::abs(v));
    return sum;
  }

  // Scale by the peak so large p cannot overflow.
  double acc = 0.0;
  for (const auto& v : values) acc += std::pow(static_cast<double>(std::abs(v)) / peak, p);
  return peak * std::pow(acc, 1.0 / p);
}

inline double lp_norm(const Signal& x, double p) { return lp_norm(x.view(), p); }

}  // namespace ctvs
