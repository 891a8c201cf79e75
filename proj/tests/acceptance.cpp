// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "ctvs/ctvs.hpp"
#include "oracles.hpp"

using namespace ctvs;
using ctvs::testing::planted_factor_model;
using ctvs::testing::random_permutation;
using ctvs::testing::random_signal;
using ctvs::testing::random_vector;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. Metric axioms on 1000 seeded pairs and triples at N = 64.
Outcome metric_suite() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  const std::size_t order = 64;
  const double bound = 1.0 - std::ldexp(1.0, -static_cast<int>(order));
  std::size_t bad_symmetry = 0, bad_triangle = 0, bad_translation = 0, bad_bound = 0;
  for (int i = 0; i < 1000; ++i) {
    const Signal x = random_signal(64, rng), y = random_signal(64, rng), z = random_signal(64, rng);
    const double dxy = frechet_metric(x, y, order);
    if (dxy != frechet_metric(y, x, order)) ++bad_symmetry;
    if (dxy > frechet_metric(x, z, order) + frechet_metric(z, y, order) + 1e-12) ++bad_triangle;
    if (std::abs(frechet_metric(Signal(x.values + z.values), Signal(y.values + z.values), order) - dxy) > 1e-12)
      ++bad_translation;
    if (!(dxy < bound)) ++bad_bound;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << "symmetry " << bad_symmetry << ", triangle " << bad_triangle << ", translation " << bad_translation << ", bound "
     << bad_bound << " violations; " << elapsed << " s";
  return {bad_symmetry + bad_triangle + bad_translation + bad_bound == 0 && elapsed < 5.0, os.str()};
}

// 2. Seminorms and weak-l1 are permutation invariant, element-exact.
Outcome rearrangement_invariance() {
  std::mt19937_64 rng(2);
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 100);
    const Signal x = random_signal(n, rng);
    const Signal px = testing::permuted(x, random_permutation(n, rng));
    const auto a = rearrange(x), b = rearrange(px);
    if (truncation_seminorms(a, n) != truncation_seminorms(b, n)) ++failures;
    if (weak_l1_quasinorm(a) != weak_l1_quasinorm(b)) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " mismatches over 1000 pairs"};
}

// 3. Both criteria return n = k on exactly sparse inputs.
Outcome exact_sparsity_transition() {
  std::size_t hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t k = 1 + seed % 16;
    const auto r = rearrange(gen_sparse(128, k, seed).signal);
    const auto f = transition_point(r, TransitionCriterion::FrechetIncrement, 1e-8, 3, default_metric_order(128));
    const auto t = transition_point(r, TransitionCriterion::TailMean, 1e-8, 3, default_metric_order(128));
    if (f.n == k && t.n == k) ++hits;
  }
  return {hits == 100, std::to_string(hits) + "/100 instances"};
}

// 4. Brute-force oracles on their default grids.
Outcome oracle_grids() {
  std::size_t total = 0, matched = 0;
  for (const auto& cases : {oracle_borel(), oracle_besterm(), oracle_transition()}) {
    for (const auto& c : cases) {
      ++total;
      if (c.match) ++matched;
    }
  }
  return {total > 0 && matched == total, std::to_string(matched) + "/" + std::to_string(total) + " cases match"};
}

// 5. OMP support recovery on Gaussian 40 x 128 with k = 5.
Outcome omp_monte_carlo() {
  const auto start = Clock::now();
  std::size_t exact = 0, accurate = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto truth = gen_sparse(128, 5, derive_seed(seed, 0));
    const auto dict = make_dictionary(DictionaryKind::Gaussian, 40, 128, {}, derive_seed(seed, 1));
    const auto rec = omp_recover(forward(truth.signal, dict, 0.0, 0), dict, StopRule::at_dimension(5));
    IndexSet found = rec.support;
    std::sort(found.begin(), found.end());
    if (found != truth.support) continue;
    ++exact;
    const double err = (rec.reconstruction.values - truth.signal.values).norm() / truth.signal.values.norm();
    worst = std::max(worst, err);
    if (err < 1e-8) ++accurate;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << "exact support " << exact << "/100, worst rel_err_l2 on successes " << worst << ", " << elapsed << " s";
  return {exact >= 95 && accurate == exact && elapsed < 10.0, os.str()};
}

// 6. Effective rank of planted rank-r ensembles and trace conservation.
Outcome cskle_rank() {
  std::size_t correct = 0;
  double worst_trace = 0.0;
  for (std::size_t r = 1; r <= 8; ++r) {
    const auto model = planted_factor_model(64, r, 200, 600 + r);
    const auto basis = cskle_basis(model.samples);
    if (basis.effective_rank(1e-6) == r) ++correct;
    const double trace = basis.covariance.trace().real();
    worst_trace = std::max(worst_trace, std::abs(basis.eigenvalues.sum() - trace) / trace);
  }
  std::ostringstream os;
  os << correct << "/8 ranks, worst trace deviation " << worst_trace;
  return {correct == 8 && worst_trace <= 1e-10, os.str()};
}

// 7. Power law alpha = 2, N = 1024: tail-mean scan and the analytic tail bound.
Outcome powerlaw_compressibility() {
  const std::size_t n = 1024;
  const auto p = gen_powerlaw(n, 2.0, 7);
  const auto r = rearrange(p.signal);
  std::size_t matched = 0;
  const auto grid = epsilon_grid(1.0, 1e-9, 20);
  for (double eps : grid)
    if (check_transition(r, TransitionCriterion::TailMean, eps, kDefaultWindow, "powerlaw").match) ++matched;

  // sum_{j > N} j^-2 by direct summation to J plus the integral remainder.
  const std::size_t far = 10'000'000;
  double tail = 0.0;
  for (std::size_t j = far; j > n; --j) tail += 1.0 / (static_cast<double>(j) * static_cast<double>(j));
  tail += 1.0 / (static_cast<double>(far) + 0.5);
  const double ratio = p.tail_bound / tail;
  std::ostringstream os;
  os << matched << "/" << grid.size() << " epsilons match, bound/tail = " << ratio;
  return {matched == grid.size() && ratio >= 0.5 && ratio <= 2.0, os.str()};
}

// 8. Cesaro approximation of the Banach limit.
Outcome banach_limit() {
  const auto alt = cesaro_banach_limit([](std::size_t k) { return k % 2 ? -1.0 : 1.0; }, 1e-3, 10000);
  const auto flat = cesaro_banach_limit([](std::size_t) { return 0.3; }, 1e-3, 10000);
  std::ostringstream os;
  os << "alternating limit " << alt.limit << " at M=" << alt.stabilized_at << ", constant limit " << format_real(flat.limit);
  return {std::abs(alt.limit) < 1e-3 && flat.stabilized && flat.limit == 0.3, os.str()};
}

// 9. Round trip through the forward map and CS-KLE inverse on signals in the
// recovered subspace.
Outcome reflexivity() {
  std::mt19937_64 rng(9);
  double worst_l2 = 0.0, worst_frechet = 0.0;
  std::size_t failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t rank = 1 + seed % 8;
    const auto model = planted_factor_model(64, rank, 100, 900 + seed);
    const auto basis = cskle_basis(model.samples);
    DictionaryParams params;
    params.dft_random_rows = true;
    const auto dict = seed % 2 ? make_dictionary(DictionaryKind::Gaussian, 16, 64, {}, seed)
                               : make_dictionary(DictionaryKind::Dft, 16, 64, params, seed);
    const Signal x(model.factor * random_vector(rank, rng));
    try {
      const auto report = reflexive_check(x, dict, CsklePipeline{basis.eigenvectors, rank});
      worst_l2 = std::max(worst_l2, report.rel_err_l2);
      worst_frechet = std::max(worst_frechet, report.rel_err_frechet);
    } catch (const std::exception&) {
      ++failures;
    }
  }
  std::ostringstream os;
  os << "worst rel_err_l2 " << worst_l2 << ", worst rel_err_frechet " << worst_frechet << ", " << failures << " failures";
  return {failures == 0 && worst_l2 < 1e-10 && worst_frechet < 1e-10, os.str()};
}

// 10. Identical configs give byte-identical results.csv.
Outcome determinism() {
  const auto cfg = parse_config(std::string(
      "signal.n = 128\nsignal.k = 5\ndictionary.m = 40\nmethods = omp, oracle, cskle\n"
      "cskle.training = 50\ntrials = 20\nseed_base = 42\n"));
  const auto base = std::filesystem::temp_directory_path() / "ctvs_acceptance";
  std::filesystem::remove_all(base);
  auto slurp = [](const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  };
  write_experiment(run_experiment(cfg), base / "a", false);
  write_experiment(run_experiment(cfg), base / "b", false);
  const std::string a = slurp(base / "a" / "results.csv");
  const std::string b = slurp(base / "b" / "results.csv");
  std::filesystem::remove_all(base);
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"metric suite", metric_suite},
      {"rearrangement invariance", rearrangement_invariance},
      {"exact-sparsity transition", exact_sparsity_transition},
      {"brute-force oracles", oracle_grids},
      {"OMP Monte-Carlo", omp_monte_carlo},
      {"CS-KLE rank identification", cskle_rank},
      {"power-law compressibility", powerlaw_compressibility},
      {"Banach/Cesaro limit", banach_limit},
      {"reflexivity", reflexivity},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
