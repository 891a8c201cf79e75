#pragma once

// Discrete Radon measure, optimum Borel set, transition point (optimum
// dimension) and the absorbing null space.

#include <optional>
#include <string_view>

#include "ctvs/frechet.hpp"

namespace ctvs {

struct DiscreteMeasure {
  std::vector<double> masses;
  double total = 0.0;

  DiscreteMeasure() = default;
  explicit DiscreteMeasure(std::vector<double> m) : masses(std::move(m)) {
    for (std::size_t j = 0; j < masses.size(); ++j) {
      if (!std::isfinite(masses[j]) || masses[j] < 0.0)
        throw InvalidArgument("mass at index " + std::to_string(j) + " must be finite and non-negative");
      total += masses[j];
    }
  }

  std::size_t size() const noexcept { return masses.size(); }

  // By default atom k carries x*_k; with energy = true it carries (x*_k)^2.
  static DiscreteMeasure from_rearranged(const RearrangedSequence& r, bool energy = false) {
    std::vector<double> m(r.magnitudes);
    if (energy)
      for (auto& v : m) v *= v;
    return DiscreteMeasure(std::move(m));
  }

  // mu(B), summed in ascending index order.
  double mass_of(const IndexSet& set) const {
    IndexSet sorted(set);
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (std::size_t j : sorted) {
      if (j >= masses.size()) throw InvalidArgument("index " + std::to_string(j) + " out of range");
      sum += masses[j];
    }
    return sum;
  }
};

/// sup of mu(K) over finite K inside B: partial sums of the masses of B in
/// descending order, stopped once the remaining tail is below tol.
inline double inner_regularity(const DiscreteMeasure& mu, const IndexSet& set, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  std::vector<double> inside;
  inside.reserve(set.size());
  for (std::size_t j : set) {
    if (j >= mu.size()) throw InvalidArgument("index " + std::to_string(j) + " out of range");
    inside.push_back(mu.masses[j]);
  }
  std::sort(inside.begin(), inside.end(), std::greater<>());

  std::vector<double> tail(inside.size() + 1, 0.0);
  for (std::size_t i = inside.size(); i-- > 0;) tail[i] = tail[i + 1] + inside[i];

  double captured = 0.0;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    if (tail[i] < tol) break;
    captured += inside[i];
  }
  return captured;
}

/// The n indices of largest mass, ties by ascending index. Additivity makes
/// this the max-measure subset of size n.
inline IndexSet optimum_borel_set(const DiscreteMeasure& mu, std::size_t n) {
  if (n > mu.size()) throw InvalidArgument("n exceeds the number of atoms");
  IndexSet order(mu.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mu.masses[a] > mu.masses[b]; });
  order.resize(n);
  return order;
}

enum class TransitionCriterion { FrechetIncrement, TailMean };

inline std::string_view to_string(TransitionCriterion c) {
  return c == TransitionCriterion::FrechetIncrement ? "frechet-increment" : "tail-mean";
}

inline TransitionCriterion parse_criterion(std::string_view s) {
  if (s == "frechet-increment") return TransitionCriterion::FrechetIncrement;
  if (s == "tail-mean") return TransitionCriterion::TailMean;
  throw InvalidArgument("unknown criterion '" + std::string(s) + "'");
}

/// Split of the index set at the optimum dimension n: S holds the first n
/// rearranged indices, U the rest.
struct Decomposition {
  std::size_t n = 0;
  IndexSet optimum_set;
  IndexSet null_set;
  double tail_mean = 0.0;
  TransitionCriterion criterion = TransitionCriterion::FrechetIncrement;
  double epsilon = 0.0;
  std::size_t window = 1;
  bool no_transition = false;
};

inline constexpr std::size_t kDefaultWindow = 3;

// 1e-6 of the top magnitude; the smallest normal double for an all-zero input.
inline double default_epsilon(const RearrangedSequence& r) {
  const double eps = 1e-6 * r.top();
  return eps > 0.0 ? eps : std::numeric_limits<double>::min();
}

namespace detail {

inline std::vector<double> suffix_sums(const std::vector<double>& v) {
  std::vector<double> s(v.size() + 1, 0.0);
  for (std::size_t i = v.size(); i-- > 0;) s[i] = s[i + 1] + v[i];
  return s;
}

inline Decomposition split_at(const RearrangedSequence& r, std::size_t n) {
  Decomposition d;
  d.n = n;
  d.optimum_set.assign(r.permutation.begin(), r.permutation.begin() + static_cast<std::ptrdiff_t>(n));
  d.null_set.assign(r.permutation.begin() + static_cast<std::ptrdiff_t>(n), r.permutation.end());
  double tail = 0.0;
  for (std::size_t i = r.size(); i-- > n;) tail += r.magnitudes[i];
  d.tail_mean = d.null_set.empty() ? 0.0 : tail / static_cast<double>(d.null_set.size());
  return d;
}

}  // namespace detail

/// Smallest n whose tail is negligible under the chosen criterion.
///  frechet-increment: delta_m < epsilon for every m in (n, min(n + window, N)].
///  tail-mean: mean of the magnitudes beyond n is below epsilon.
/// Only n < N is searched; when nothing qualifies the result is n = N with
/// no_transition set.
inline Decomposition transition_point(const RearrangedSequence& r, TransitionCriterion criterion, double epsilon,
                                      std::size_t window, std::size_t max_order) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (window == 0) throw InvalidArgument("window must be >= 1");
  if (max_order == 0) throw InvalidArgument("order must be >= 1");
  const std::size_t size = r.size();

  std::optional<std::size_t> found;
  if (criterion == TransitionCriterion::FrechetIncrement) {
    const auto delta = frechet_increments(r, max_order);
    // run[i]: number of consecutive increments below epsilon starting at i.
    std::vector<std::size_t> run(size + 1, 0);
    for (std::size_t i = size; i-- > 0;) run[i] = delta[i] < epsilon ? run[i + 1] + 1 : 0;
    for (std::size_t n = 0; n < size && !found; ++n) {
      const std::size_t need = std::min(n + window, size) - n;
      if (run[n] >= need) found = n;
    }
  } else {
    const auto tail = detail::suffix_sums(r.magnitudes);
    for (std::size_t n = 0; n < size && !found; ++n) {
      if (tail[n] / static_cast<double>(size - n) < epsilon) found = n;
    }
  }

  Decomposition d = detail::split_at(r, found.value_or(size));
  d.no_transition = !found.has_value();
  d.criterion = criterion;
  d.epsilon = epsilon;
  d.window = window;
  return d;
}

inline Decomposition transition_point(const RearrangedSequence& r, TransitionCriterion criterion) {
  return transition_point(r, criterion, default_epsilon(r), kDefaultWindow, default_metric_order(r.size()));
}

struct CesaroResult {
  double limit = 0.0;
  std::size_t stabilized_at = 0;
  bool stabilized = false;
};

/// Banach limit approximated by the Cesaro mean C_M = (1/M) sum_{k<=M} s_k,
/// reported at the first M where |C_M - C_{M-1}| < tol has held for 10
/// consecutive steps. `term(k)` yields s_k for 1-based k.
inline CesaroResult cesaro_banach_limit(const std::function<double(std::size_t)>& term, double tol,
                                        std::size_t max_terms) {
  constexpr std::size_t kStreak = 10;
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_terms < 2) throw InvalidArgument("maxTerms must be >= 2");

  CesaroResult out;
  double mean = 0.0;
  std::size_t streak = 0;
  for (std::size_t m = 1; m <= max_terms; ++m) {
    const double s = term(m);
    if (!std::isfinite(s)) throw InvalidArgument("unbounded or non-finite term at k=" + std::to_string(m));
    const double previous = mean;
    // Running-mean update keeps constant sequences exact.
    mean += (s - mean) / static_cast<double>(m);
    out.limit = mean;
    out.stabilized_at = m;
    if (m == 1) continue;
    streak = std::abs(mean - previous) < tol ? streak + 1 : 0;
    if (streak >= kStreak) {
      out.stabilized = true;
      return out;
    }
  }
  return out;
}

inline CesaroResult cesaro_banach_limit(std::span<const double> s, double tol, std::size_t max_terms) {
  return cesaro_banach_limit([&](std::size_t k) { return s[k - 1]; }, tol, std::min(max_terms, s.size()));
}

/// Tail subspace U beyond the optimum dimension, with the Minkowski gauge of
/// A = {u supported on U : sum_{j in U} |u_j| <= epsilon}.
class AbsorbingNullSpace {
 public:
  AbsorbingNullSpace(IndexSet indices, std::size_t length, double tail_mean, double epsilon)
      : indices_(std::move(indices)), in_tail_(length, false), tail_mean_(tail_mean), epsilon_(epsilon) {
    for (std::size_t j : indices_) in_tail_[j] = true;
  }

  const IndexSet& indices() const noexcept { return indices_; }
  double tail_mean() const noexcept { return tail_mean_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t length() const noexcept { return in_tail_.size(); }
  bool contains(std::size_t j) const { return j < in_tail_.size() && in_tail_[j]; }

  // l1 seminorm restricted to U.
  double tail_seminorm(std::span<const Complex> u) const {
    if (u.size() != in_tail_.size()) throw InvalidArgument("dimension mismatch");
    double sum = 0.0;
    for (std::size_t j : indices_) sum += std::abs(u[j]);
    return sum;
  }

  double gauge(std::span<const Complex> u) const { return tail_seminorm(u) / epsilon_; }
  double gauge(const Signal& u) const { return gauge(u.view()); }

 private:
  IndexSet indices_;
  std::vector<bool> in_tail_;
  double tail_mean_;
  double epsilon_;
};

inline AbsorbingNullSpace absorbing_null_space(const RearrangedSequence& r, std::size_t n, double epsilon) {
  if (n > r.size()) throw InvalidArgument("n exceeds the signal length");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const Decomposition d = detail::split_at(r, n);
  return AbsorbingNullSpace(d.null_set, r.source_length, d.tail_mean, epsilon);
}

}  // namespace ctvs
