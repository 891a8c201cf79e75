#pragma once

// Experiment configuration: line-oriented "key = value" text, '#' comments.
// Unknown or repeated keys are rejected with the offending line number.

#include <set>

#include "ctvs/homeomorphism.hpp"
#include "ctvs/io.hpp"
#include "ctvs/measure.hpp"
#include "ctvs/signals.hpp"

namespace ctvs {

enum class SignalKind { Sparse, PowerLaw, Chirp };

inline std::string_view to_string(SignalKind k) {
  switch (k) {
    case SignalKind::Sparse: return "sparse";
    case SignalKind::PowerLaw: return "powerlaw";
    case SignalKind::Chirp: return "chirp";
  }
  return "sparse";
}

inline SignalKind parse_signal_kind(std::string_view s) {
  if (s == "sparse") return SignalKind::Sparse;
  if (s == "powerlaw") return SignalKind::PowerLaw;
  if (s == "chirp") return SignalKind::Chirp;
  throw InvalidArgument("unknown signal kind '" + std::string(s) + "'");
}

/// "dim:<n>", "res:<eps>", "iter:<n>", comma separated. In configs "dim:k"
/// means the planted sparsity (or the true signal's dimension).
struct StopSpec {
  StopRule rule;
  bool dimension_from_truth = false;

  bool operator==(const StopSpec& o) const {
    return rule.dimension == o.rule.dimension && rule.residual == o.rule.residual &&
           rule.max_iter == o.rule.max_iter && dimension_from_truth == o.dimension_from_truth;
  }
};

inline StopSpec parse_stop_spec(std::string_view text, bool allow_truth = false) {
  StopSpec out;
  text = detail::trim(text);
  if (text.empty()) throw InvalidArgument("empty stop rule");
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string_view item = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw InvalidArgument("stop rule '" + std::string(item) + "' must be kind:value");
    const std::string_view kind = item.substr(0, colon);
    const std::string value(detail::trim(item.substr(colon + 1)));
    try {
      if (kind == "dim") {
        if (allow_truth && value == "k") {
          out.dimension_from_truth = true;
        } else {
          out.rule.dimension = parse_count(value, 0);
        }
      } else if (kind == "res") {
        const double eps = parse_real(value, 0);
        if (!(eps > 0.0)) throw InvalidArgument("residual tolerance must be positive");
        out.rule.residual = eps;
      } else if (kind == "iter") {
        out.rule.max_iter = parse_count(value, 0);
      } else {
        throw InvalidArgument("unknown stop rule kind '" + std::string(kind) + "'");
      }
    } catch (const ParseError&) {
      throw InvalidArgument("bad stop rule value '" + value + "'");
    }
  }
  return out;
}

inline std::string format_stop_spec(const StopSpec& s) {
  std::vector<std::string> parts;
  if (s.dimension_from_truth) parts.emplace_back("dim:k");
  if (s.rule.dimension) parts.push_back("dim:" + std::to_string(*s.rule.dimension));
  if (s.rule.residual) parts.push_back("res:" + format_real(*s.rule.residual));
  if (s.rule.max_iter) parts.push_back("iter:" + std::to_string(*s.rule.max_iter));
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out;
}

// "a,f,c; a,f,c"
inline std::vector<ChirpComponent> parse_chirp_components(std::string_view text, std::size_t line) {
  std::vector<ChirpComponent> out;
  text = detail::trim(text);
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(';', pos), text.size());
    const std::string_view item = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    const auto c1 = item.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : item.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw ParseError(line, "chirp component must be 'amplitude,start_freq,chirp_rate'");
    out.push_back({parse_real(item.substr(0, c1), line), parse_real(item.substr(c1 + 1, c2 - c1 - 1), line),
                   parse_real(item.substr(c2 + 1), line)});
  }
  return out;
}

inline std::string format_chirp_components(const std::vector<ChirpComponent>& cs) {
  std::string out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += "; ";
    out += format_real(cs[i].amplitude) + "," + format_real(cs[i].start_freq) + "," + format_real(cs[i].chirp_rate);
  }
  return out;
}

struct ExperimentConfig {
  // signal
  SignalKind signal_kind = SignalKind::Sparse;
  std::size_t n = 128;
  std::size_t k = 5;
  double alpha = 2.0;
  std::vector<ChirpComponent> chirp;
  double sample_rate = 1.0;
  // dictionary; m = 0 means m = N. The seed is drawn per trial.
  DictionaryKind dictionary_kind = DictionaryKind::Gaussian;
  std::size_t m = 40;
  DictionaryParams dictionary_params;
  double noise_sigma = 0.0;
  // dimension estimate; epsilon unset means 1e-6 of the top magnitude
  TransitionCriterion criterion = TransitionCriterion::FrechetIncrement;
  std::optional<double> epsilon;
  std::size_t window = kDefaultWindow;
  // recovery
  std::vector<RecoveryMethod> methods{RecoveryMethod::Omp, RecoveryMethod::Oracle};
  StopSpec omp_stop{StopRule::at_residual(1e-9), false};
  std::size_t cskle_training = 200;
  std::optional<std::size_t> cskle_n;
  bool cskle_center = false;
  // harness
  std::size_t trials = 1;
  std::uint64_t seed_base = 0;
  std::string output_dir = "out";
  bool timing = false;
  std::size_t threads = 1;

  bool operator==(const ExperimentConfig&) const = default;

  std::size_t effective_m() const noexcept { return m == 0 ? n : m; }
};

inline void validate(const ExperimentConfig& c) {
  if (c.n == 0) throw InvalidArgument("signal.n must be >= 1");
  if (c.trials == 0) throw InvalidArgument("trials must be >= 1");
  if (c.window == 0) throw InvalidArgument("window must be >= 1");
  if (c.threads == 0) throw InvalidArgument("threads must be >= 1");
  if (c.methods.empty()) throw InvalidArgument("methods must name at least one method");
  if (c.epsilon && !(*c.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (c.signal_kind == SignalKind::Sparse && (c.k == 0 || c.k > c.n)) throw InvalidArgument("signal.k must satisfy 1 <= k <= N");
  if (c.signal_kind == SignalKind::PowerLaw && !(c.alpha > 1.0)) throw InvalidArgument("non-compressible tail");
  if (c.signal_kind == SignalKind::Chirp && c.chirp.empty()) throw InvalidArgument("signal.chirp must list at least one component");
  if (c.dictionary_kind == DictionaryKind::Custom) throw InvalidArgument("experiments need a generated dictionary");
  if (c.cskle_training == 0) throw InvalidArgument("cskle.training must be >= 1");
  if (c.cskle_n && *c.cskle_n == 0) throw InvalidArgument("cskle.n must be >= 1");
  if (!(c.noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be >= 0");
}

namespace detail {

inline bool parse_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ParseError(line, "expected a boolean, got '" + std::string(v) + "'");
}

template <class F>
auto at_line(std::size_t line, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ParseError(line, e.what());
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig c;
  detail::LineReader reader(is);
  std::string raw;
  std::set<std::string> seen;
  while (reader.next(raw)) {
    const std::size_t line = reader.number();
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key(detail::trim(text.substr(0, eq)));
    const std::string value(detail::trim(text.substr(eq + 1)));
    if (!seen.insert(key).second) throw ParseError(line, "duplicate key '" + key + "'");

    detail::at_line(line, [&] {
      if (key == "signal.kind") c.signal_kind = parse_signal_kind(value);
      else if (key == "signal.n") c.n = parse_count(value, line);
      else if (key == "signal.k") c.k = parse_count(value, line);
      else if (key == "signal.alpha") c.alpha = parse_real(value, line);
      else if (key == "signal.chirp") c.chirp = parse_chirp_components(value, line);
      else if (key == "signal.sample_rate") c.sample_rate = parse_real(value, line);
      else if (key == "dictionary.kind") c.dictionary_kind = parse_dictionary_kind(value);
      else if (key == "dictionary.m") c.m = parse_count(value, line);
      else if (key == "dictionary.dft_sign") c.dictionary_params.dft_sign = static_cast<int>(parse_real(value, line));
      else if (key == "dictionary.dft_random_rows") c.dictionary_params.dft_random_rows = detail::parse_bool(value, line);
      else if (key == "dictionary.gabor_width") c.dictionary_params.gabor_width = parse_real(value, line);
      else if (key == "dictionary.gabor_bins") c.dictionary_params.gabor_freq_bins = parse_count(value, line);
      else if (key == "noise_sigma") c.noise_sigma = parse_real(value, line);
      else if (key == "criterion") c.criterion = parse_criterion(value);
      else if (key == "epsilon") c.epsilon = value == "auto" ? std::nullopt : std::optional<double>(parse_real(value, line));
      else if (key == "window") c.window = parse_count(value, line);
      else if (key == "methods") {
        c.methods.clear();
        std::size_t pos = 0;
        const std::string_view v = value;
        while (pos <= v.size()) {
          const std::size_t end = std::min(v.find(',', pos), v.size());
          const auto method = parse_method(detail::trim(v.substr(pos, end - pos)));
          if (std::find(c.methods.begin(), c.methods.end(), method) != c.methods.end())
            throw ParseError(line, "method listed twice");
          c.methods.push_back(method);
          pos = end + 1;
        }
      } else if (key == "omp.stop") c.omp_stop = parse_stop_spec(value, true);
      else if (key == "cskle.training") c.cskle_training = parse_count(value, line);
      else if (key == "cskle.n") c.cskle_n = value == "auto" ? std::nullopt : std::optional<std::size_t>(parse_count(value, line));
      else if (key == "cskle.center") c.cskle_center = detail::parse_bool(value, line);
      else if (key == "trials") c.trials = parse_count(value, line);
      else if (key == "seed_base") c.seed_base = parse_count(value, line);
      else if (key == "output_dir") c.output_dir = value;
      else if (key == "timing") c.timing = detail::parse_bool(value, line);
      else if (key == "threads") c.threads = parse_count(value, line);
      else throw ParseError(line, "unknown key '" + key + "'");
      return 0;
    });
  }
  validate(c);
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "signal.kind = " << to_string(c.signal_kind) << '\n'
     << "signal.n = " << c.n << '\n'
     << "signal.k = " << c.k << '\n'
     << "signal.alpha = " << format_real(c.alpha) << '\n';
  if (!c.chirp.empty()) os << "signal.chirp = " << format_chirp_components(c.chirp) << '\n';
  os << "signal.sample_rate = " << format_real(c.sample_rate) << '\n'
     << "dictionary.kind = " << to_string(c.dictionary_kind) << '\n'
     << "dictionary.m = " << c.m << '\n'
     << "dictionary.dft_sign = " << c.dictionary_params.dft_sign << '\n'
     << "dictionary.dft_random_rows = " << (c.dictionary_params.dft_random_rows ? "true" : "false") << '\n'
     << "dictionary.gabor_width = " << format_real(c.dictionary_params.gabor_width) << '\n'
     << "dictionary.gabor_bins = " << c.dictionary_params.gabor_freq_bins << '\n'
     << "noise_sigma = " << format_real(c.noise_sigma) << '\n'
     << "criterion = " << to_string(c.criterion) << '\n'
     << "epsilon = " << (c.epsilon ? format_real(*c.epsilon) : std::string("auto")) << '\n'
     << "window = " << c.window << '\n'
     << "methods = ";
  for (std::size_t i = 0; i < c.methods.size(); ++i) os << (i ? "," : "") << to_string(c.methods[i]);
  os << '\n'
     << "omp.stop = " << format_stop_spec(c.omp_stop) << '\n'
     << "cskle.training = " << c.cskle_training << '\n'
     << "cskle.n = " << (c.cskle_n ? std::to_string(*c.cskle_n) : std::string("auto")) << '\n'
     << "cskle.center = " << (c.cskle_center ? "true" : "false") << '\n'
     << "trials = " << c.trials << '\n'
     << "seed_base = " << c.seed_base << '\n'
     << "output_dir = " << c.output_dir << '\n'
     << "timing = " << (c.timing ? "true" : "false") << '\n'
     << "threads = " << c.threads << '\n';
  return os.str();
}

}  // namespace ctvs
