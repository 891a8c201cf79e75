// ctvs: command-line front end for the compressible-signal toolkit.
//
//   ctvs gen        --kind sparse --n 128 --k 5 --seed 7 --out x.sig
//   ctvs sense      --signal x.sig --dict gaussian --m 40 --seed 3 --out y.meas
//   ctvs dimension  --measurement y.meas
//   ctvs recover    --measurement y.meas --method omp --stop dim:5 --out xhat.sig
//   ctvs experiment --config run.cfg --out results --svg
//   ctvs oracle     --task borel
//
// Exit codes: 0 success, 2 validation error, 1 runtime error.

#include <iostream>

#include "CLI11.hpp"
#include "ctvs/ctvs.hpp"

namespace {

using namespace ctvs;

struct Globals {
  std::uint64_t seed = 0;
  std::string out;
  bool svg = false;
};

std::string require_out(const Globals& g) {
  if (g.out.empty()) throw InvalidArgument("--out is required");
  return g.out;
}

struct GenArgs {
  std::string kind = "sparse";
  std::size_t n = 128;
  std::size_t k = 5;
  double alpha = 2.0;
  std::string chirp;
  double sample_rate = 1.0;
  std::size_t trials = 1;
  bool no_permute = false;
};

int run_gen(const GenArgs& a, const Globals& g) {
  const std::string out = require_out(g);
  Metadata meta;
  meta["kind"] = a.kind;
  meta["seed"] = std::to_string(g.seed);
  switch (parse_signal_kind(a.kind)) {
    case SignalKind::Sparse: {
      const auto s = gen_sparse(a.n, a.k, g.seed);
      meta["support"] = format_index_set(s.support);
      write_file(out, [&](std::ostream& os) { write_signal(os, s.signal, meta); });
      break;
    }
    case SignalKind::PowerLaw: {
      const auto s = gen_powerlaw(a.n, a.alpha, g.seed, !a.no_permute);
      meta["alpha"] = format_real(a.alpha);
      meta["tail_bound"] = format_real(s.tail_bound);
      write_file(out, [&](std::ostream& os) { write_signal(os, s.signal, meta); });
      break;
    }
    case SignalKind::Chirp: {
      const auto components = parse_chirp_components(a.chirp, 0);
      if (components.empty()) throw InvalidArgument("--chirp must list at least one 'amplitude,start_freq,chirp_rate'");
      meta["chirp"] = format_chirp_components(components);
      if (a.trials <= 1) {
        const Signal x = gen_chirp(components, a.n, a.sample_rate);
        write_file(out, [&](std::ostream& os) { write_signal(os, x, meta); });
      } else {
        const auto ensemble = ensemble_chirp(components, a.n, a.trials, g.seed, a.sample_rate);
        write_file(out, [&](std::ostream& os) { write_ensemble(os, ensemble, meta); });
      }
      break;
    }
  }
  return 0;
}

struct SenseArgs {
  std::string signal;
  std::string dict = "gaussian";
  std::size_t m = 0;
  int dft_sign = -1;
  bool random_rows = false;
  double gabor_width = 4.0;
  std::size_t gabor_bins = 0;
  double sigma = 0.0;
  std::uint64_t noise_seed = 0;
};

int run_sense(const SenseArgs& a, const Globals& g) {
  const std::string out = require_out(g);
  const Signal x = read_file(a.signal, [](std::istream& is) { return read_signal(is); }).signal;
  DictionarySpec spec;
  spec.kind = parse_dictionary_kind(a.dict);
  spec.n = x.size();
  spec.m = a.m == 0 ? x.size() : a.m;
  spec.params.dft_sign = a.dft_sign;
  spec.params.dft_random_rows = a.random_rows;
  spec.params.gabor_width = a.gabor_width;
  spec.params.gabor_freq_bins = a.gabor_bins;
  spec.seed = g.seed;
  const Dictionary dict = make_dictionary(spec);
  const Measurement y = forward(x, dict, a.sigma, a.noise_seed);
  write_file(out, [&](std::ostream& os) { write_measurement(os, y); });
  return 0;
}

struct DimensionArgs {
  std::string measurement;
  std::string signal;
  std::string criterion = "frechet-increment";
  std::optional<double> epsilon;
  std::size_t window = kDefaultWindow;
  std::size_t order = 0;
  bool energy = false;
};

int run_dimension(const DimensionArgs& a, const Globals& g) {
  if (a.measurement.empty() == a.signal.empty()) throw InvalidArgument("give exactly one of --measurement or --signal");
  RearrangedSequence r;
  if (!a.measurement.empty()) {
    const auto file = read_file(a.measurement, [](std::istream& is) { return read_measurement(is); });
    const Dictionary dict = make_dictionary(parse_dictionary_id(file.measurement.dictionary_ref));
    r = kothe_from_measurement(file.measurement, dict).sequence;
  } else {
    r = rearrange(read_file(a.signal, [](std::istream& is) { return read_signal(is); }).signal);
  }
  if (a.energy) {
    const auto mu = DiscreteMeasure::from_rearranged(r, true);
    r.magnitudes = mu.masses;
  }
  const auto criterion = parse_criterion(a.criterion);
  const double eps = a.epsilon.value_or(default_epsilon(r));
  const std::size_t order = a.order == 0 ? default_metric_order(r.size()) : a.order;
  const Decomposition d = transition_point(r, criterion, eps, a.window, order);
  std::cout << "n=" << d.n << " tail_mean=" << format_real(d.tail_mean) << " criterion=" << to_string(criterion) << '\n';
  if (d.no_transition) std::cerr << "warning: no transition found; signal is incompressible at this epsilon\n";
  if (g.svg) {
    const std::string path = g.out.empty() ? "rearranged.svg" : g.out;
    write_file(path, [&](std::ostream& os) { write_rearrangement_svg(os, r.magnitudes, d.n, "rearranged magnitudes"); });
  }
  return 0;
}

struct RecoverArgs {
  std::string measurement;
  std::string method = "omp";
  std::string stop;
  std::string ensemble;
  std::string support;
  bool center = false;
};

int run_recover(const RecoverArgs& a, const Globals& g) {
  const auto file = read_file(a.measurement, [](std::istream& is) { return read_measurement(is); });
  const Dictionary dict = make_dictionary(parse_dictionary_id(file.measurement.dictionary_ref));
  RecoveryResult rec;
  switch (parse_method(a.method)) {
    case RecoveryMethod::Omp: {
      const StopRule rule = a.stop.empty() ? StopRule{} : parse_stop_spec(a.stop).rule;
      rec = omp_recover(file.measurement, dict, rule);
      break;
    }
    case RecoveryMethod::Cskle: {
      if (a.ensemble.empty()) throw InvalidArgument("cskle needs --ensemble");
      const auto samples = read_file(a.ensemble, [](std::istream& is) { return read_ensemble(is); });
      const KleBasis basis = cskle_basis(samples, a.center);
      std::size_t n = std::max<std::size_t>(1, std::min(basis.effective_rank(1e-6), dict.rows()));
      if (!a.stop.empty()) {
        const StopRule rule = parse_stop_spec(a.stop).rule;
        if (!rule.dimension) throw InvalidArgument("cskle accepts only a dim:<n> stop rule");
        n = *rule.dimension;
      }
      rec = cskle_recover(file.measurement, dict, basis, n);
      break;
    }
    case RecoveryMethod::Oracle:
      rec = oracle_recover(file.measurement, dict, parse_index_set(a.support, 0));
      break;
  }
  IndexSet sorted = rec.support;
  if (rec.method != RecoveryMethod::Cskle) std::sort(sorted.begin(), sorted.end());
  std::cout << "method=" << to_string(rec.method) << " iterations=" << rec.iterations << " support=" << format_index_set(sorted)
            << " residual=" << format_real(rec.residual_norms.back()) << '\n';
  if (!g.out.empty()) {
    Metadata meta{{"method", std::string(to_string(rec.method))}, {"support", format_index_set(sorted)}};
    write_file(g.out, [&](std::ostream& os) { write_signal(os, rec.reconstruction, meta); });
  }
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const Globals& g) {
  ExperimentConfig cfg = read_file(config_path, [](std::istream& is) { return parse_config(is); });
  if (!g.out.empty()) cfg.output_dir = g.out;
  const ExperimentResult result = run_experiment(cfg);
  write_experiment(result, cfg.output_dir, g.svg);
  for (const auto& s : result.summary) {
    std::cout << to_string(s.method) << ": trials=" << s.trials << " success_rate=" << format_real(s.success_rate)
              << " mean_n_opt=" << format_real(s.mean_n_opt) << " mean_rel_err_l2=" << format_real(s.mean_rel_err_l2) << '\n';
  }
  return 0;
}

struct OracleArgs {
  std::string task;
  std::size_t n = 0;
  std::string masses;
  std::optional<std::size_t> k;
  double alpha = 2.0;
};

int run_oracle(const OracleArgs& a, const Globals& g) {
  std::vector<OracleCase> cases;
  if (a.task == "borel") {
    if (!a.masses.empty()) {
      std::vector<double> masses;
      std::string_view v = a.masses;
      std::size_t pos = 0;
      while (pos <= v.size()) {
        const std::size_t end = std::min(v.find(',', pos), v.size());
        masses.push_back(parse_real(v.substr(pos, end - pos), 0));
        pos = end + 1;
      }
      if (masses.size() > kMaxExhaustiveAtoms) throw InvalidArgument("exhaustive search too large");
      if (a.k) {
        cases.push_back(check_borel(masses, *a.k, "borel"));
      } else {
        for (std::size_t n = 0; n <= masses.size(); ++n) cases.push_back(check_borel(masses, n, "borel"));
      }
    } else {
      cases = oracle_borel(a.n == 0 ? kMaxExhaustiveAtoms : a.n, g.seed);
    }
  } else if (a.task == "besterm") {
    if (a.n != 0) {
      const Signal x = gen_powerlaw(a.n, a.alpha, g.seed).signal;
      const std::string label = "besterm powerlaw N=" + std::to_string(a.n) + " alpha=" + format_real(a.alpha);
      if (a.k) {
        cases.push_back(check_besterm(x, *a.k, label));
      } else {
        for (std::size_t n = 0; n <= x.size(); ++n) cases.push_back(check_besterm(x, n, label));
      }
    } else {
      cases = oracle_besterm(g.seed);
    }
  } else if (a.task == "transition") {
    const std::size_t n = a.n == 0 ? 1024 : a.n;
    if (a.alpha == 2.0) {
      cases = oracle_transition(g.seed, n);
    } else {
      const auto r = rearrange(gen_powerlaw(n, a.alpha, g.seed).signal);
      const std::string label = "transition powerlaw alpha=" + format_real(a.alpha) + " N=" + std::to_string(n);
      for (double eps : epsilon_grid(1.0, 1e-9, 20))
        for (auto c : {TransitionCriterion::FrechetIncrement, TransitionCriterion::TailMean})
          cases.push_back(check_transition(r, c, eps, kDefaultWindow, label));
    }
  } else {
    throw InvalidArgument("unknown oracle task '" + a.task + "' (borel, besterm, transition)");
  }

  std::size_t mismatches = 0;
  for (const auto& c : cases) {
    std::cout << (c.match ? "MATCH " : "MISMATCH ") << c.label << ' ' << c.detail << '\n';
    if (!c.match) ++mismatches;
  }
  std::cout << (cases.size() - mismatches) << '/' << cases.size() << " cases match\n";
  return mismatches == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressible-signal toolkit: optimum dimension, sparse and CS-KLE recovery"};
  app.fallthrough();
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Random seed (signal, dictionary or oracle grid)");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_flag("--svg", g.svg, "Also write an SVG chart of the rearranged magnitudes");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a test signal");
  gen_cmd->add_option("--kind", gen.kind, "sparse | powerlaw | chirp")->check(CLI::IsMember({"sparse", "powerlaw", "chirp"}));
  gen_cmd->add_option("--n", gen.n, "Signal length N");
  gen_cmd->add_option("--k", gen.k, "Sparsity (sparse)");
  gen_cmd->add_option("--alpha", gen.alpha, "Decay exponent > 1 (powerlaw)");
  gen_cmd->add_flag("--no-permute", gen.no_permute, "Keep power-law magnitudes in sorted order");
  gen_cmd->add_option("--chirp", gen.chirp, "Chirp components 'a,f,c;a,f,c' in cycles/sample (chirp)");
  gen_cmd->add_option("--sample-rate", gen.sample_rate, "Sample rate for chirp time axis");
  gen_cmd->add_option("--trials", gen.trials, "Write a phase-jittered ensemble of this many chirps");

  SenseArgs sense;
  auto* sense_cmd = app.add_subcommand("sense", "Apply a generated dictionary (and optional noise) to a signal");
  sense_cmd->add_option("--signal", sense.signal, "Input signal file")->required();
  sense_cmd->add_option("--dict", sense.dict, "gaussian | dft | gabor | identity");
  sense_cmd->add_option("--m", sense.m, "Number of measurements (0 = N)");
  sense_cmd->add_option("--dft-sign", sense.dft_sign, "DFT exponent sign, -1 analysis or +1 synthesis");
  sense_cmd->add_flag("--random-rows", sense.random_rows, "Seeded random DFT rows instead of the first m");
  sense_cmd->add_option("--gabor-width", sense.gabor_width, "Gabor window standard deviation in samples");
  sense_cmd->add_option("--gabor-bins", sense.gabor_bins, "Gabor frequency bins (0 = m)");
  sense_cmd->add_option("--sigma", sense.sigma, "Noise standard deviation per component");
  sense_cmd->add_option("--noise-seed", sense.noise_seed, "Noise seed");

  DimensionArgs dim;
  auto* dim_cmd = app.add_subcommand("dimension", "Estimate the optimum dimension n");
  dim_cmd->add_option("--measurement", dim.measurement, "Measurement file (uses its Kothe sequence)");
  dim_cmd->add_option("--signal", dim.signal, "Signal file (uses its rearrangement)");
  dim_cmd->add_option("--criterion", dim.criterion, "frechet-increment | tail-mean")
      ->check(CLI::IsMember({"frechet-increment", "tail-mean"}));
  dim_cmd->add_option("--epsilon", dim.epsilon, "Tail tolerance (default 1e-6 of the top magnitude)");
  dim_cmd->add_option("--window", dim.window, "Increment window");
  dim_cmd->add_option("--order", dim.order, "Metric order K (default min(N, 64))");
  dim_cmd->add_flag("--energy", dim.energy, "Use squared magnitudes as the measure");

  RecoverArgs rec;
  auto* rec_cmd = app.add_subcommand("recover", "Recover a signal from a measurement");
  rec_cmd->add_option("--measurement", rec.measurement, "Measurement file")->required();
  rec_cmd->add_option("--method", rec.method, "omp | cskle | oracle")->check(CLI::IsMember({"omp", "cskle", "oracle"}));
  rec_cmd->add_option("--stop", rec.stop,
                      "Stop rule: dim:<n>, res:<eps>, iter:<n>, comma separated; precedence dim > res > iter");
  rec_cmd->add_option("--ensemble", rec.ensemble, "Training ensemble file (cskle)");
  rec_cmd->add_flag("--center", rec.center, "Mean-center the CS-KLE covariance");
  rec_cmd->add_option("--support", rec.support, "Known support 'i,j,...' (oracle)");

  std::string config_path;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a config-driven Monte-Carlo experiment");
  exp_cmd->add_option("--config", config_path, "Experiment config file")->required();

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Compare library output against brute force");
  oracle_cmd->add_option("--task", oracle.task, "borel | besterm | transition")->required();
  oracle_cmd->add_option("--n", oracle.n, "Size override for the grid");
  oracle_cmd->add_option("--masses", oracle.masses, "Explicit measure 'm0,m1,...' (borel)");
  oracle_cmd->add_option("--k", oracle.k, "Single subset size / term count");
  oracle_cmd->add_option("--alpha", oracle.alpha, "Power-law exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen_cmd) return run_gen(gen, g);
    if (*sense_cmd) return run_sense(sense, g);
    if (*dim_cmd) return run_dimension(dim, g);
    if (*rec_cmd) return run_recover(rec, g);
    if (*exp_cmd) return run_experiment_cmd(config_path, g);
    if (*oracle_cmd) return run_oracle(oracle, g);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
