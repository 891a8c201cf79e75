#pragma once

// Brute-force verifiers for the optimum Borel set, best n-term approximation
// and the transition point. Each case reports MATCH or MISMATCH.

#include <bit>

#include "ctvs/homeomorphism.hpp"
#include "ctvs/io.hpp"
#include "ctvs/measure.hpp"
#include "ctvs/signals.hpp"

namespace ctvs {

struct OracleCase {
  std::string label;
  bool match = false;
  std::string detail;
};

inline constexpr std::size_t kMaxExhaustiveAtoms = 12;

/// Max mass over every size-n subset, by enumeration. Masses are summed in
/// ascending index order, the same order DiscreteMeasure::mass_of uses.
inline double exhaustive_max_mass(const std::vector<double>& masses, std::size_t n) {
  if (masses.size() > kMaxExhaustiveAtoms) throw InvalidArgument("exhaustive search too large");
  double best = -1.0;
  const std::uint32_t limit = 1u << masses.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != n) continue;
    double sum = 0.0;
    for (std::size_t j = 0; j < masses.size(); ++j)
      if (mask & (1u << j)) sum += masses[j];
    best = std::max(best, sum);
  }
  return best;
}

inline OracleCase check_borel(const std::vector<double>& masses, std::size_t n, const std::string& label) {
  const DiscreteMeasure mu(masses);
  const double greedy = mu.mass_of(optimum_borel_set(mu, n));
  const double brute = exhaustive_max_mass(masses, n);
  return {label + " n=" + std::to_string(n), greedy == brute, "mass=" + format_real(greedy) + " exhaustive=" + format_real(brute)};
}

/// The fixed example plus three seeded random measures for each N <= max_n,
/// every n in [0, N].
inline std::vector<OracleCase> oracle_borel(std::size_t max_n = kMaxExhaustiveAtoms, std::uint64_t seed = 0) {
  if (max_n > kMaxExhaustiveAtoms) throw InvalidArgument("exhaustive search too large");
  std::vector<OracleCase> out;
  const std::vector<double> example{0.5, 0.3, 0.2};
  out.push_back(check_borel(example, 2, "borel mu=[0.5,0.3,0.2]"));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  for (std::size_t size = 1; size <= max_n; ++size) {
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<double> masses(size);
      for (auto& v : masses) v = mass(rng);
      for (std::size_t n = 0; n <= size; ++n)
        out.push_back(check_borel(masses, n, "borel N=" + std::to_string(size) + " rep=" + std::to_string(rep)));
    }
  }
  return out;
}

/// Best n-term l2 error from the sorted tail, sqrt(sum_{j>n} (x*_j)^2).
inline double best_n_term_error(const Signal& x, std::size_t n) {
  std::vector<double> energy(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) energy[j] = std::norm(x.values[static_cast<Eigen::Index>(j)]);
  std::sort(energy.begin(), energy.end(), std::greater<>());
  double tail = 0.0;
  for (std::size_t j = energy.size(); j-- > n;) tail += energy[j];
  return std::sqrt(tail);
}

inline OracleCase check_besterm(const Signal& x, std::size_t n, const std::string& label) {
  const Dictionary id = make_dictionary(DictionaryKind::Identity, x.size(), x.size(), {}, 0);
  const RecoveryResult rec = omp_recover(forward(x, id, 0.0, 0), id, StopRule::at_dimension(n));
  const double omp_err = (x.values - rec.reconstruction.values).norm();
  const double closed = best_n_term_error(x, n);
  const double tol = 1e-12 * std::max(1.0, x.values.norm());
  return {label + " n=" + std::to_string(n), std::abs(omp_err - closed) <= tol,
          "omp=" + format_real(omp_err) + " closed_form=" + format_real(closed)};
}

inline std::vector<OracleCase> oracle_besterm(std::uint64_t seed = 0) {
  std::vector<OracleCase> out;
  std::vector<std::pair<std::string, Signal>> signals;
  signals.emplace_back("besterm sparse N=64 k=8", gen_sparse(64, 8, seed).signal);
  for (double alpha : {1.5, 2.0, 3.0})
    signals.emplace_back("besterm powerlaw N=64 alpha=" + format_real(alpha), gen_powerlaw(64, alpha, seed + 1).signal);
  {
    std::mt19937_64 rng(seed + 2);
    std::normal_distribution<double> normal;
    CVector v(32);
    for (auto& z : v) z = Complex(normal(rng), normal(rng));
    signals.emplace_back("besterm gaussian N=32", Signal(v));
  }
  for (const auto& [label, x] : signals)
    for (std::size_t n = 0; n <= x.size(); ++n) out.push_back(check_besterm(x, n, label));
  return out;
}

/// n found by testing every candidate directly: increments come from the
/// metric between consecutive partial objects, tail means from direct sums.
inline std::size_t exhaustive_transition(const RearrangedSequence& r, TransitionCriterion criterion, double epsilon,
                                         std::size_t window, std::size_t max_order) {
  const std::size_t size = r.size();
  if (criterion == TransitionCriterion::FrechetIncrement) {
    std::vector<double> delta(size);
    CVector partial = CVector::Zero(static_cast<Eigen::Index>(size));
    for (std::size_t i = 0; i < size; ++i) {
      Signal before(partial);
      partial[static_cast<Eigen::Index>(i)] = r.magnitudes[i];
      delta[i] = frechet_metric(Signal(partial), before, max_order);
    }
    for (std::size_t n = 0; n < size; ++n) {
      bool ok = true;
      for (std::size_t m = n + 1; m <= std::min(n + window, size); ++m) ok = ok && delta[m - 1] < epsilon;
      if (ok) return n;
    }
    return size;
  }
  for (std::size_t n = 0; n < size; ++n) {
    double tail = 0.0;
    for (std::size_t j = size; j-- > n;) tail += r.magnitudes[j];
    if (tail / static_cast<double>(size - n) < epsilon) return n;
  }
  return size;
}

inline std::vector<double> epsilon_grid(double hi, double lo, std::size_t points) {
  std::vector<double> out(points);
  const double a = std::log10(hi), b = std::log10(lo);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  return out;
}

inline OracleCase check_transition(const RearrangedSequence& r, TransitionCriterion criterion, double eps,
                                   std::size_t window, const std::string& label) {
  const std::size_t order = default_metric_order(r.size());
  const std::size_t fast = transition_point(r, criterion, eps, window, order).n;
  const std::size_t brute = exhaustive_transition(r, criterion, eps, window, order);
  return {label + " " + std::string(to_string(criterion)) + " eps=" + format_real(eps), fast == brute,
          "n=" + std::to_string(fast) + " exhaustive=" + std::to_string(brute)};
}

/// Power law alpha = 2 (N = 1024), alpha = 1.5 (N = 256) and a sparse
/// signal, each over a 20-point epsilon grid and both criteria.
inline std::vector<OracleCase> oracle_transition(std::uint64_t seed = 0, std::size_t powerlaw_n = 1024) {
  std::vector<std::pair<std::string, RearrangedSequence>> inputs;
  inputs.emplace_back("transition powerlaw alpha=2 N=" + std::to_string(powerlaw_n),
                      rearrange(gen_powerlaw(powerlaw_n, 2.0, seed).signal));
  inputs.emplace_back("transition powerlaw alpha=1.5 N=256", rearrange(gen_powerlaw(256, 1.5, seed + 1).signal));
  inputs.emplace_back("transition sparse N=128 k=10", rearrange(gen_sparse(128, 10, seed + 2).signal));
  std::vector<OracleCase> out;
  for (const auto& [label, r] : inputs)
    for (double eps : epsilon_grid(1.0, 1e-9, 20))
      for (auto criterion : {TransitionCriterion::FrechetIncrement, TransitionCriterion::TailMean})
        out.push_back(check_transition(r, criterion, eps, kDefaultWindow, label));
  return out;
}

}  // namespace ctvs
