#pragma once

// Seeded Monte-Carlo harness. Trial t uses seed seed_base + t; signal,
// dictionary, noise and training streams are derived from it, so results do
// not depend on thread count or scheduling.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include "ctvs/config.hpp"
#include "ctvs/svg.hpp"

namespace ctvs {

inline constexpr std::string_view kResultsHeader =
    "trial,method,status,N,m,k_true,n_opt,criterion,epsilon,support_match,rel_err_l2,rel_err_frechet,tail_mean,weak_l1,"
    "runtime_ms";
inline constexpr std::string_view kSummaryHeader =
    "method,trials,success_rate,mean_n_opt,mean_rel_err_l2,mean_rel_err_frechet,mean_runtime_ms";

struct TrialRow {
  std::size_t trial = 0;
  RecoveryMethod method = RecoveryMethod::Omp;
  std::string status = "ok";
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k_true = 0;
  std::size_t n_opt = 0;
  TransitionCriterion criterion = TransitionCriterion::FrechetIncrement;
  double epsilon = 0.0;
  bool support_match = false;
  double rel_err_l2 = 0.0;
  double rel_err_frechet = 0.0;
  double tail_mean = 0.0;
  double weak_l1 = 0.0;
  double runtime_ms = 0.0;

  bool ok() const noexcept { return status == "ok"; }
};

struct SummaryRow {
  RecoveryMethod method = RecoveryMethod::Omp;
  std::size_t trials = 0;
  double success_rate = 0.0;
  double mean_n_opt = 0.0;
  double mean_rel_err_l2 = 0.0;
  double mean_rel_err_frechet = 0.0;
  double mean_runtime_ms = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRow> rows;
  std::vector<SummaryRow> summary;
  // Rearranged true signal of trial 0 and its transition, for plotting.
  std::vector<double> first_magnitudes;
  std::size_t first_transition = 0;
};

namespace detail {

struct TrialSignal {
  Signal signal;
  std::optional<IndexSet> planted;  // sparse only
};

inline TrialSignal make_trial_signal(const ExperimentConfig& c, std::uint64_t seed) {
  switch (c.signal_kind) {
    case SignalKind::Sparse: {
      auto s = gen_sparse(c.n, c.k, seed);
      return {std::move(s.signal), std::move(s.support)};
    }
    case SignalKind::PowerLaw:
      return {gen_powerlaw(c.n, c.alpha, seed).signal, std::nullopt};
    case SignalKind::Chirp:
      return {std::move(ensemble_chirp(c.chirp, c.n, 1, seed, c.sample_rate).front()), std::nullopt};
  }
  throw InvalidArgument("unknown signal kind");
}

// Training ensemble sharing the trial signal's structure: the same support
// with fresh coefficients (sparse), the same moduli with fresh phases
// (power law), fresh phase jitter (chirp).
inline std::vector<Signal> make_training_set(const ExperimentConfig& c, const TrialSignal& truth, std::uint64_t seed) {
  if (c.signal_kind == SignalKind::Chirp) return ensemble_chirp(c.chirp, c.n, c.cskle_training, seed, c.sample_rate);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> magnitude(1.0, 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<Signal> out;
  out.reserve(c.cskle_training);
  for (std::size_t t = 0; t < c.cskle_training; ++t) {
    CVector x = CVector::Zero(static_cast<Eigen::Index>(c.n));
    if (truth.planted) {
      for (std::size_t j : *truth.planted) {
        const double a = magnitude(rng);
        x[static_cast<Eigen::Index>(j)] = std::polar(a, phase(rng));
      }
    } else {
      for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = std::polar(std::abs(truth.signal.values[j]), phase(rng));
    }
    out.emplace_back(std::move(x));
  }
  return out;
}

inline std::vector<bool> nonzero_pattern(const CVector& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  std::vector<bool> out(static_cast<std::size_t>(v.size()), false);
  if (peak == 0.0) return out;
  for (Eigen::Index j = 0; j < v.size(); ++j) out[static_cast<std::size_t>(j)] = std::abs(v[j]) > 1e-9 * peak;
  return out;
}

inline std::string sanitize_status(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  return "error: " + s;
}

inline std::vector<TrialRow> run_trial(const ExperimentConfig& c, std::size_t trial, std::vector<double>* magnitudes,
                                       std::size_t* transition) {
  const std::uint64_t seed = c.seed_base + trial;
  const std::size_t m = c.effective_m();
  const std::size_t order = default_metric_order(c.n);

  std::vector<TrialRow> rows;
  auto base_row = [&](RecoveryMethod method) {
    TrialRow r;
    r.trial = trial;
    r.method = method;
    r.n = c.n;
    r.m = m;
    r.criterion = c.criterion;
    return r;
  };
  auto fail_all = [&](const std::string& what) {
    for (auto method : c.methods) {
      TrialRow r = base_row(method);
      r.status = sanitize_status(what);
      r.epsilon = r.rel_err_l2 = r.rel_err_frechet = r.tail_mean = r.weak_l1 = std::numeric_limits<double>::quiet_NaN();
      rows.push_back(r);
    }
    return rows;
  };

  TrialSignal truth;
  Dictionary dict;
  Measurement y;
  std::size_t k_true = 0;
  RearrangedSequence truth_rearranged;
  try {
    truth = make_trial_signal(c, derive_seed(seed, 0));
    truth_rearranged = rearrange(truth.signal);
    const Decomposition truth_split =
        transition_point(truth_rearranged, c.criterion, c.epsilon.value_or(default_epsilon(truth_rearranged)), c.window, order);
    k_true = truth.planted ? truth.planted->size() : truth_split.n;
    if (magnitudes) *magnitudes = truth_rearranged.magnitudes;
    if (transition) *transition = truth_split.n;
    DictionarySpec spec{c.dictionary_kind, m, c.n, c.dictionary_params, derive_seed(seed, 1)};
    dict = make_dictionary(spec);
    y = forward(truth.signal, dict, c.noise_sigma, derive_seed(seed, 2));
  } catch (const std::exception& e) {
    return fail_all(e.what());
  }

  const auto truth_pattern = nonzero_pattern(truth.signal.values);
  const double truth_norm = truth.signal.values.norm();

  for (auto method : c.methods) {
    TrialRow row = base_row(method);
    row.k_true = k_true;
    const auto start = std::chrono::steady_clock::now();
    try {
      RecoveryResult rec;
      switch (method) {
        case RecoveryMethod::Omp: {
          StopRule rule = c.omp_stop.rule;
          if (c.omp_stop.dimension_from_truth) rule.dimension = std::min(k_true, std::min(m, c.n));
          rec = omp_recover(y, dict, rule);
          break;
        }
        case RecoveryMethod::Oracle: {
          IndexSet support;
          if (truth.planted) {
            support = *truth.planted;
          } else {
            const std::size_t keep = std::min(k_true, m);
            support.assign(truth_rearranged.permutation.begin(),
                           truth_rearranged.permutation.begin() + static_cast<std::ptrdiff_t>(keep));
          }
          rec = oracle_recover(y, dict, support);
          break;
        }
        case RecoveryMethod::Cskle: {
          const auto training = make_training_set(c, truth, derive_seed(seed, 3));
          const KleBasis basis = cskle_basis(training, c.cskle_center);
          const std::size_t dim = c.cskle_n.value_or(std::max<std::size_t>(1, std::min(basis.effective_rank(1e-6), m)));
          rec = cskle_recover(y, dict, basis, dim);
          break;
        }
      }
      const auto stop = std::chrono::steady_clock::now();

      const RearrangedSequence est = rearrange(rec.reconstruction);
      const double eps = c.epsilon.value_or(default_epsilon(est));
      const Decomposition split = transition_point(est, c.criterion, eps, c.window, order);
      row.n_opt = split.n;
      row.epsilon = eps;
      row.tail_mean = split.tail_mean;
      row.weak_l1 = weak_l1_quasinorm(est);
      row.support_match = nonzero_pattern(rec.reconstruction.values) == truth_pattern;
      if (truth_norm > 0.0) {
        row.rel_err_l2 = (rec.reconstruction.values - truth.signal.values).norm() / truth_norm;
        row.rel_err_frechet = frechet_metric(rec.reconstruction, truth.signal, order);
      }
      if (c.timing) row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    } catch (const std::exception& e) {
      row.status = sanitize_status(e.what());
      row.epsilon = row.rel_err_l2 = row.rel_err_frechet = row.tail_mean = row.weak_l1 =
          std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<SummaryRow> summarize(const ExperimentConfig& c, const std::vector<TrialRow>& rows) {
  std::vector<SummaryRow> out;
  for (auto method : c.methods) {
    SummaryRow s;
    s.method = method;
    std::size_t ok = 0, success = 0;
    for (const auto& r : rows) {
      if (r.method != method) continue;
      ++s.trials;
      if (!r.ok()) continue;
      ++ok;
      if (r.support_match) ++success;
      s.mean_n_opt += static_cast<double>(r.n_opt);
      s.mean_rel_err_l2 += r.rel_err_l2;
      s.mean_rel_err_frechet += r.rel_err_frechet;
      s.mean_runtime_ms += r.runtime_ms;
    }
    s.success_rate = s.trials ? static_cast<double>(success) / static_cast<double>(s.trials) : 0.0;
    const double denom = ok ? static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
    s.mean_n_opt /= denom;
    s.mean_rel_err_l2 /= denom;
    s.mean_rel_err_frechet /= denom;
    s.mean_runtime_ms /= denom;
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  std::vector<std::vector<TrialRow>> per_trial(c.trials);
  ExperimentResult result;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < c.trials; t = next++) {
      per_trial[t] = detail::run_trial(c, t, t == 0 ? &result.first_magnitudes : nullptr,
                                       t == 0 ? &result.first_transition : nullptr);
    }
  };
  const std::size_t workers = std::min(c.threads, c.trials);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  for (auto& rows : per_trial)
    for (auto& r : rows) result.rows.push_back(std::move(r));
  result.summary = detail::summarize(c, result.rows);
  return result;
}

inline void write_results_csv(std::ostream& os, const std::vector<TrialRow>& rows) {
  os << kResultsHeader << '\n';
  for (const auto& r : rows) {
    os << r.trial << ',' << to_string(r.method) << ',' << r.status << ',' << r.n << ',' << r.m << ',' << r.k_true << ','
       << (r.ok() ? std::to_string(r.n_opt) : std::string()) << ',' << to_string(r.criterion) << ','
       << format_real(r.epsilon) << ',' << (r.support_match ? 1 : 0) << ',' << format_real(r.rel_err_l2) << ','
       << format_real(r.rel_err_frechet) << ',' << format_real(r.tail_mean) << ',' << format_real(r.weak_l1) << ','
       << format_real(r.runtime_ms) << '\n';
  }
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& s : rows) {
    os << to_string(s.method) << ',' << s.trials << ',' << format_real(s.success_rate) << ',' << format_real(s.mean_n_opt)
       << ',' << format_real(s.mean_rel_err_l2) << ',' << format_real(s.mean_rel_err_frechet) << ','
       << format_real(s.mean_runtime_ms) << '\n';
  }
}

/// Writes results.csv, summary.csv and, when requested, rearranged.svg.
inline void write_experiment(const ExperimentResult& r, const std::filesystem::path& dir, bool svg) {
  std::filesystem::create_directories(dir);
  write_file((dir / "results.csv").string(), [&](std::ostream& os) { write_results_csv(os, r.rows); });
  write_file((dir / "summary.csv").string(), [&](std::ostream& os) { write_summary_csv(os, r.summary); });
  if (svg) {
    write_file((dir / "rearranged.svg").string(), [&](std::ostream& os) {
      write_rearrangement_svg(os, r.first_magnitudes, r.first_transition, "trial 0: rearranged magnitudes");
    });
  }
}

}  // namespace ctvs
