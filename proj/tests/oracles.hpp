#pragma once

// Test-only reference computations, written independently of the library
// code paths they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ctvs/core.hpp"

namespace ctvs::testing {

inline CVector random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  CVector v(static_cast<Eigen::Index>(n));
  for (auto& z : v) z = Complex(normal(rng), normal(rng));
  return v;
}

inline Signal random_signal(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  return Signal(random_vector(n, rng, scale));
}

inline std::vector<std::size_t> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(p[i - 1], p[pick(rng)]);
  }
  return p;
}

inline Signal permuted(const Signal& x, const std::vector<std::size_t>& p) {
  CVector out(x.values.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[static_cast<Eigen::Index>(i)] = x.values[static_cast<Eigen::Index>(p[i])];
  return Signal(out);
}

// |x| sorted descending with a plain sort.
inline std::vector<double> sorted_moduli(const CVector& x) {
  std::vector<double> m;
  for (const auto& z : x) m.push_back(std::abs(z));
  std::sort(m.begin(), m.end(), [](double a, double b) { return a > b; });
  return m;
}

// Definition-level Frechet metric: each p_k summed from scratch.
inline double direct_frechet(const CVector& x, const CVector& y, std::size_t order) {
  const auto mags = sorted_moduli(x - y);
  double d = 0.0;
  for (std::size_t k = 1; k <= order; ++k) {
    double p = 0.0;
    for (std::size_t j = 0; j < std::min(k, mags.size()); ++j) p += mags[j];
    d += std::pow(2.0, -static_cast<double>(k)) * p / (1.0 + p);
  }
  return d;
}

// x_t = U z_t with U an N x r Gaussian factor and complex Gaussian z_t.
struct FactorModel {
  CMatrix factor;
  std::vector<Signal> samples;
};

inline FactorModel planted_factor_model(std::size_t n, std::size_t rank, std::size_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FactorModel out;
  out.factor.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rank));
  for (Eigen::Index c = 0; c < out.factor.cols(); ++c) out.factor.col(c) = random_vector(n, rng);
  for (std::size_t t = 0; t < trials; ++t) out.samples.emplace_back(out.factor * random_vector(rank, rng));
  return out;
}

// Relative residual of x after projecting onto span(basis).
inline double projection_residual(const CMatrix& basis, const CVector& x) {
  const CVector coeff = basis.colPivHouseholderQr().solve(x);
  return (x - basis * coeff).norm() / x.norm();
}

}  // namespace ctvs::testing
