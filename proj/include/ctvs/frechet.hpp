#pragma once

// Seminorm family, Frechet metric and the Kothe sequence of a measurement.
//
// The family is p_k(x) = sum_{j<=k} x*_j, the k-term partial sums of the
// non-increasing rearrangement. The metric combines it as
//   d(x, y) = sum_{k=1}^{K} 2^{-k} p_k(x - y) / (1 + p_k(x - y)).

#include <functional>

#include "ctvs/dictionary.hpp"
#include "ctvs/rearrangement.hpp"

namespace ctvs {

// Beyond 2^-64 the terms are below double resolution.
inline constexpr std::size_t kMaxMetricOrder = 64;

inline std::size_t default_metric_order(std::size_t n) {
  return std::clamp<std::size_t>(n, 1, kMaxMetricOrder);
}

/// k-term partial sum of the rearrangement; the full l1 norm once k >= N.
inline double truncation_seminorm(const RearrangedSequence& r, std::size_t k) {
  if (k == 0) throw InvalidArgument("order must be >= 1");
  const std::size_t stop = std::min(k, r.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < stop; ++j) sum += r.magnitudes[j];
  return sum;
}

inline double truncation_seminorm(const Signal& x, std::size_t k) {
  if (k == 0) throw InvalidArgument("order must be >= 1");
  return truncation_seminorm(rearrange(x), k);
}

// p_1..p_K in one pass.
inline std::vector<double> truncation_seminorms(const RearrangedSequence& r, std::size_t max_order) {
  if (max_order == 0) throw InvalidArgument("order must be >= 1");
  std::vector<double> p(max_order);
  double sum = 0.0;
  for (std::size_t k = 0; k < max_order; ++k) {
    if (k < r.size()) sum += r.magnitudes[k];
    p[k] = sum;
  }
  return p;
}

/// A countable (here: finite, order K) family of seminorms p_1 <= ... <= p_K.
class SeminormFamily {
 public:
  using Evaluator = std::function<double(const Signal&, std::size_t)>;

  SeminormFamily(std::size_t max_order, Evaluator evaluate)
      : max_order_(max_order), evaluate_(std::move(evaluate)) {
    if (max_order_ == 0) throw InvalidArgument("order must be >= 1");
  }

  static SeminormFamily truncation(std::size_t max_order) {
    return SeminormFamily(max_order, [](const Signal& x, std::size_t k) { return truncation_seminorm(x, k); });
  }

  std::size_t max_order() const noexcept { return max_order_; }

  double operator()(const Signal& x, std::size_t k) const {
    if (k == 0 || k > max_order_) throw InvalidArgument("seminorm order out of range");
    return evaluate_(x, k);
  }

 private:
  std::size_t max_order_;
  Evaluator evaluate_;
};

namespace detail {

inline double combine_seminorms(std::span<const double> p) {
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) d += std::ldexp(p[k] / (1.0 + p[k]), -static_cast<int>(k + 1));
  return d;
}

inline Signal difference(const Signal& x, const Signal& y) {
  if (x.size() != y.size()) throw InvalidArgument("dimension mismatch");
  return Signal(x.values - y.values);
}

}  // namespace detail

inline double frechet_metric(const Signal& x, const Signal& y, std::size_t max_order) {
  if (max_order == 0) throw InvalidArgument("order must be >= 1");
  const Signal diff = detail::difference(x, y);
  if (diff.size() == 0) return 0.0;
  const auto p = truncation_seminorms(rearrange(diff), max_order);
  return detail::combine_seminorms(p);
}

inline double frechet_metric(const Signal& x, const Signal& y) {
  return frechet_metric(x, y, default_metric_order(x.size()));
}

// Same combination over an arbitrary family.
inline double frechet_metric(const SeminormFamily& family, const Signal& x, const Signal& y) {
  const Signal diff = detail::difference(x, y);
  std::vector<double> p(family.max_order());
  for (std::size_t k = 1; k <= family.max_order(); ++k) p[k - 1] = family(diff, k);
  return detail::combine_seminorms(p);
}

/// Kothe matrix (rows k = 1..K, columns = rearranged atom ranks) applied to
/// the rearranged normalized correlations g_j = |<gamma_j, y>| / ||gamma_j||.
struct KotheSequence {
  Eigen::MatrixXd weights;
  RearrangedSequence sequence;

  std::size_t max_order() const noexcept { return static_cast<std::size_t>(weights.rows()); }

  // sum_j a[k][j] g*_j for 1-based k.
  double seminorm(std::size_t k) const {
    if (k == 0 || k > max_order()) throw InvalidArgument("seminorm order out of range");
    double sum = 0.0;
    const auto row = static_cast<Eigen::Index>(k - 1);
    for (std::size_t j = 0; j < sequence.size(); ++j) sum += weights(row, static_cast<Eigen::Index>(j)) * sequence.magnitudes[j];
    return sum;
  }
};

// Non-negative, non-decreasing down each column, and every column has a
// positive entry.
inline void validate_kothe_matrix(const Eigen::MatrixXd& a) {
  if (a.rows() < 1 || a.cols() < 1) throw InvalidArgument("Kothe matrix must be non-empty");
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    bool positive = false;
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
      const double w = a(k, j);
      if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("Kothe weights must be finite and non-negative");
      if (k > 0 && w < a(k - 1, j)) throw InvalidArgument("Kothe weights must be non-decreasing in k");
      positive = positive || w > 0.0;
    }
    if (!positive) throw InvalidArgument("Kothe condition violated at column " + std::to_string(j));
  }
}

// a[k][j] = 1 if j <= k else 0 (1-based). Satisfies the Kothe condition only
// when K >= N.
inline Eigen::MatrixXd truncation_kothe_matrix(std::size_t max_order, std::size_t n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(max_order), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < max_order; ++k)
    for (std::size_t j = 0; j <= k && j < n; ++j) a(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = 1.0;
  return a;
}

inline RearrangedSequence atom_correlations(const CVector& y, const Dictionary& dict) {
  if (y.size() < 1) throw InvalidArgument("empty input");
  if (static_cast<std::size_t>(y.size()) != dict.rows()) throw InvalidArgument("dimension mismatch");
  const auto& norms = dict.column_norms();
  std::vector<double> g(dict.cols());
  const CVector corr = dict.atoms().adjoint() * y;
  for (std::size_t j = 0; j < dict.cols(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (!(norms[jj] > 0.0)) throw InvalidArgument("degenerate atom " + std::to_string(j));
    g[j] = std::abs(corr[jj]) / norms[jj];
  }
  return rearrange(g);
}

inline KotheSequence kothe_from_measurement(const Measurement& y, const Dictionary& dict, std::size_t max_order) {
  if (max_order == 0) throw InvalidArgument("order must be >= 1");
  if (max_order < dict.cols())
    throw InvalidArgument("Kothe order K must be >= the number of atoms (" + std::to_string(dict.cols()) + ")");
  KotheSequence out;
  out.sequence = atom_correlations(y.values, dict);
  out.weights = truncation_kothe_matrix(max_order, dict.cols());
  return out;
}

inline KotheSequence kothe_from_measurement(const Measurement& y, const Dictionary& dict) {
  return kothe_from_measurement(y, dict, dict.cols());
}

// Override hook for a custom Kothe matrix.
inline KotheSequence with_kothe_weights(KotheSequence kothe, Eigen::MatrixXd weights) {
  validate_kothe_matrix(weights);
  if (static_cast<std::size_t>(weights.cols()) != kothe.sequence.size()) throw InvalidArgument("dimension mismatch");
  kothe.weights = std::move(weights);
  return kothe;
}

/// delta_n = d(S_n, S_{n-1}) for n = 1..N, where S_n keeps the n largest
/// atoms. The difference is a single atom of size x*_n, so every p_k equals
/// x*_n and delta_n = (1 - 2^-K) x*_n / (1 + x*_n).
inline std::vector<double> frechet_increments(const RearrangedSequence& r, std::size_t max_order) {
  if (max_order == 0) throw InvalidArgument("order must be >= 1");
  const double scale = 1.0 - std::ldexp(1.0, -static_cast<int>(std::min(max_order, kMaxMetricOrder)));
  std::vector<double> delta(r.size());
  for (std::size_t n = 0; n < r.size(); ++n) delta[n] = scale * r.magnitudes[n] / (1.0 + r.magnitudes[n]);
  return delta;
}

}  // namespace ctvs
