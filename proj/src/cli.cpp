#include "motirr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "motirr/csv.hpp"
#include "motirr/detection.hpp"
#include "motirr/errors.hpp"
#include "motirr/resonator.hpp"
#include "motirr/welcher_weg.hpp"

namespace motirr::cli {

namespace {

namespace fs = std::filesystem;
using csv::format_double;

// ---------------------------------------------------------------------------
// Config file: `key = value` per line, '#' starts a comment. Each entry is
// turned into `--key value` and placed before the command-line arguments, so
// that with the TakeLast policy flags override file values.

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && (out.front() == '"' || out.front() == '\'') && out.back() == out.front()) {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError(path + ":" + std::to_string(line_number) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || key == "config") {
      throw ParameterError(path + ":" + std::to_string(line_number) + ": invalid key '" + key + "'");
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;
  std::vector<std::string> expanded{args.front()};
  const std::vector<std::string> from_file = read_config_file(*path);
  expanded.insert(expanded.end(), from_file.begin(), from_file.end());
  expanded.insert(expanded.end(), args.begin() + 1, args.end());
  return expanded;
}

// ---------------------------------------------------------------------------

void write_output(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  body(file);
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

/// trials.csv -> trials.summary.csv
std::string sibling_path(const std::string& path, const std::string& tag) {
  if (path.empty() || path == "-") return {};
  const fs::path p(path);
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  return (p.parent_path() / (p.stem().string() + "." + tag + ext)).string();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) values.push_back(csv::parse_double(t));
  }
  return values;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
  std::string reflectivities = join(figure_reflectivities());
  std::uint64_t n_max = 2000;
  std::uint64_t seed = 0;
  std::string out;
};

struct ProtocolOptions {
  double reflectivity = 0.999;
  std::uint64_t round_trips = 10013;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 1;
  double time_window = 1e-6;
  unsigned clicks_required = 2;
  std::string truth = "present";
  double quantum_efficiency = 0.85;
  std::uint64_t max_photons = 10'000;
  double dark_count_rate = 0.0;
  std::string silence = "break";
  std::string out;
};

struct FringeOptions {
  double p_tag = 0.5;
  std::uint64_t atoms = 100'000;
  std::size_t bins = 240;
  std::uint64_t seed = 1;
  double slit_separation = DoubleSlitGeometry{}.slit_separation;
  double slit_width = DoubleSlitGeometry{}.slit_width;
  double screen_distance = DoubleSlitGeometry{}.screen_distance;
  double gravity = DoubleSlitGeometry{}.gravity;
  double speed = VelocityGroup{}.speed_at_screen;
  double fall_time = VelocityGroup{}.fall_time;
  std::optional<double> initial_speed;
  double half_width = 0.0;
  double reflectivity = 0.999;
  std::uint64_t round_trips = 10013;
  std::uint64_t fibers = 300;
  std::string out;
};

struct FeasibilityOptions {
  double coherence_length = 3e5;
  double length = 0.04;
  double index = 1.0;
  double pulse = 250e-12;
  double observation_time = 0.1;
  double cycle_period = 0.4;
  double recovery_time = 1e-8;
  std::uint64_t fibers = 300;
  double reflectivity = 0.999;
  std::uint64_t round_trips = 10013;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_efficiency_sweep(const SweepOptions& o, std::ostream& out) {
  const std::vector<double> rs = parse_list(o.reflectivities);
  const std::vector<EfficiencyRow> rows = efficiency_sweep(rs, o.n_max);
  write_output(o.out, out, [&](std::ostream& s) { csv::write_efficiency_sweep(s, rows); });
}

void cmd_protocol_sim(const ProtocolOptions& o, std::ostream& out) {
  if (o.trials == 0) throw ParameterError("trial count must be at least 1");
  ProtocolConfig config;
  config.resonator.reflectivity = o.reflectivity;
  config.resonator.round_trips = o.round_trips;
  config.detector.quantum_efficiency = o.quantum_efficiency;
  config.detector.dark_count_rate = o.dark_count_rate;
  config.consecutive_clicks_required = o.clicks_required;
  config.time_window = o.time_window;
  config.max_photons = o.max_photons;
  config.rng_seed = o.seed;
  config.silence = o.silence == "ignore" ? SilencePolicy::ignored : SilencePolicy::breaks_streak;

  const TrialRunner runner(config);
  const bool present = o.truth == "present";
  const std::vector<TrialRecord> records = run_trials(runner, present, o.trials);
  const ProtocolSummary summary = estimate_metrics(records);

  write_output(o.out, out, [&](std::ostream& s) { csv::write_trials(s, records); });
  if (const std::string path = sibling_path(o.out, "summary"); !path.empty()) {
    write_output(path, out, [&](std::ostream& s) { csv::write_protocol_summary(s, summary); });
  }
  out << "summary trials=" << summary.trials << " misclassification=" << format_double(summary.misclassification_rate)
      << " inconclusive=" << format_double(summary.inconclusive_rate) << " energy_exchange_free_fraction="
      << (summary.energy_exchange_free_fraction ? format_double(*summary.energy_exchange_free_fraction) : "n/a")
      << " mean_absorbed=" << format_double(summary.mean_photons_absorbed)
      << " first_event_dr=" << format_double(summary.first_event_dr_rate) << '\n';
}

void cmd_fringes(const FringeOptions& o, std::ostream& out) {
  DoubleSlitGeometry geometry{o.slit_separation, o.slit_width, o.screen_distance, o.gravity};
  VelocityGroup group;
  group.speed_at_screen = o.speed;
  group.fall_time = o.fall_time;
  group.initial_speed = o.initial_speed;
  PathMonitor monitor;
  monitor.resonator.reflectivity = o.reflectivity;
  monitor.resonator.round_trips = o.round_trips;
  monitor.n_fibers = o.fibers;
  monitor.tagging_probability = o.p_tag;
  const ScreenOptions screen{o.half_width};

  const std::vector<FringePattern> patterns{
      simulate_run(geometry, group, std::nullopt, o.atoms, o.bins, o.seed, screen),
      simulate_run(geometry, group, monitor, o.atoms, o.bins, o.seed, screen),
  };
  const std::vector<VisibilityEstimate> estimates{visibility(patterns[0]), visibility(patterns[1])};

  write_output(o.out, out, [&](std::ostream& s) { csv::write_fringe_patterns(s, patterns); });
  const std::string path = sibling_path(o.out, "visibility");
  if (!path.empty()) {
    write_output(path, out, [&](std::ostream& s) { csv::write_visibility_summary(s, patterns, estimates); });
  }
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    out << "visibility mode=" << csv::to_string(patterns[i].mode)
        << " p_tag=" << format_double(patterns[i].tagging_probability) << " value=" << format_double(estimates[i].value)
        << " se=" << format_double(estimates[i].standard_error) << '\n';
  }
}

void cmd_feasibility(const FeasibilityOptions& o, std::ostream& out) {
  const PulseFeasibility pulse = pulse_feasibility(o.pulse, o.length, o.index);
  const std::uint64_t trips = max_round_trips_from_coherence(o.coherence_length, o.length);
  const CountBudget fall = count_budget(o.observation_time, o.recovery_time, o.fibers);
  const CountBudget cycle = count_budget(o.cycle_period, o.recovery_time, o.fibers);
  PathMonitor monitor;
  monitor.resonator.reflectivity = o.reflectivity;
  monitor.resonator.round_trips = o.round_trips;
  monitor.n_fibers = o.fibers;

  std::ostringstream report;
  report << "round_trip_length_m = " << format_double(o.length) << '\n'
         << "effective_index = " << format_double(o.index) << '\n'
         << "round_trip_time_s = " << format_double(pulse.round_trip_time) << '\n'
         << "pulse_duration_s = " << format_double(o.pulse) << '\n'
         << "pulse_to_round_trip_ratio = " << format_double(pulse.pulse_to_round_trip_ratio) << '\n'
         << "pulse_feasible = " << (pulse.feasible ? "true" : "false") << '\n'
         << "coherence_length_m = " << format_double(o.coherence_length) << '\n'
         << "round_trips_from_coherence = " << trips << '\n'
         << "recovery_time_s = " << format_double(o.recovery_time) << '\n'
         << "fibers = " << o.fibers << '\n'
         << "counts_per_channel_observation = " << fall.per_channel << '\n'
         << "counts_all_fibers_observation = " << fall.aggregate << '\n'
         << "counts_per_channel_cycle = " << cycle.per_channel << '\n'
         << "counts_all_fibers_cycle = " << cycle.aggregate << '\n'
         << "photon_hit_probability = " << format_double(monitor.photon_hit_probability()) << '\n'
         << "false_dr_probability = " << format_double(monitor.false_dr_probability()) << '\n';
  out << report.str();
  if (!o.out.empty() && o.out != "-") {
    write_output(o.out, out, [&](std::ostream& s) { s << report.str(); });
  }
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resonator-based energy-exchange-free detection simulator", "motirr"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  SweepOptions sweep;
  auto* s = app.add_subcommand("efficiency-sweep", "Efficiency vs. round trips for a list of reflectivities");
  s->add_option("--reflectivity", sweep.reflectivities, "Comma-separated reflectivities")->capture_default_str();
  s->add_option("--round-trips", sweep.n_max, "Largest round-trip count")->capture_default_str();
  s->add_option("--seed", sweep.seed, "Accepted for uniformity; the sweep is deterministic");
  s->add_option("--out", sweep.out, "Output CSV ('-' for stdout)");
  s->add_option("--config", config_path, "key = value config file");

  ProtocolOptions proto;
  auto* p = app.add_subcommand("protocol-sim", "Monte Carlo of the single-photon detection protocol");
  p->add_option("--reflectivity", proto.reflectivity)->capture_default_str();
  p->add_option("--round-trips", proto.round_trips)->capture_default_str();
  p->add_option("--trials", proto.trials)->capture_default_str();
  p->add_option("--seed", proto.seed)->capture_default_str();
  p->add_option("--time-window", proto.time_window, "Seconds per injected photon")->capture_default_str();
  p->add_option("--clicks-required", proto.clicks_required)->capture_default_str();
  p->add_option("--truth", proto.truth)->check(CLI::IsMember({"present", "absent"}))->capture_default_str();
  p->add_option("--quantum-efficiency", proto.quantum_efficiency)->capture_default_str();
  p->add_option("--max-photons", proto.max_photons)->capture_default_str();
  p->add_option("--dark-count-rate", proto.dark_count_rate)->capture_default_str();
  p->add_option("--silence", proto.silence, "What a window without a click does to a streak")
      ->check(CLI::IsMember({"break", "ignore"}))
      ->capture_default_str();
  p->add_option("--out", proto.out, "Per-trial CSV ('-' for stdout)");
  p->add_option("--config", config_path, "key = value config file");

  FringeOptions fr;
  auto* f = app.add_subcommand("fringes", "Monitored vs. unmonitored atom fringes");
  f->add_option("--p-tag", fr.p_tag, "Path-tagging probability per atom")->capture_default_str();
  f->add_option("--atoms", fr.atoms)->capture_default_str();
  f->add_option("--bins", fr.bins)->capture_default_str();
  f->add_option("--seed", fr.seed)->capture_default_str();
  f->add_option("--slit-separation", fr.slit_separation)->capture_default_str();
  f->add_option("--slit-width", fr.slit_width)->capture_default_str();
  f->add_option("--screen-distance", fr.screen_distance)->capture_default_str();
  f->add_option("--gravity", fr.gravity)->capture_default_str();
  f->add_option("--speed", fr.speed, "Speed at the detector plane")->capture_default_str();
  f->add_option("--fall-time", fr.fall_time)->capture_default_str();
  f->add_option("--initial-speed", fr.initial_speed, "Speed at the slits; enables the gravity correction");
  f->add_option("--half-width", fr.half_width, "Screen half-width, 0 = two envelope zeros")->capture_default_str();
  f->add_option("--reflectivity", fr.reflectivity)->capture_default_str();
  f->add_option("--round-trips", fr.round_trips)->capture_default_str();
  f->add_option("--fibers", fr.fibers)->capture_default_str();
  f->add_option("--out", fr.out, "Pattern CSV ('-' for stdout)");
  f->add_option("--config", config_path, "key = value config file");

  FeasibilityOptions fe;
  auto* q = app.add_subcommand("feasibility", "Round-trip, coherence and count-budget arithmetic");
  q->add_option("--coherence-length", fe.coherence_length)->capture_default_str();
  q->add_option("--length", fe.length, "Round-trip length in metres")->capture_default_str();
  q->add_option("--index", fe.index, "Effective refractive index")->capture_default_str();
  q->add_option("--pulse", fe.pulse, "Pulse duration in seconds")->capture_default_str();
  q->add_option("--observation-time", fe.observation_time)->capture_default_str();
  q->add_option("--cycle-period", fe.cycle_period)->capture_default_str();
  q->add_option("--recovery-time", fe.recovery_time)->capture_default_str();
  q->add_option("--fibers", fe.fibers)->capture_default_str();
  q->add_option("--reflectivity", fe.reflectivity)->capture_default_str();
  q->add_option("--round-trips", fe.round_trips)->capture_default_str();
  q->add_option("--seed", fe.seed);
  q->add_option("--out", fe.out, "Also write the report to this file");
  q->add_option("--config", config_path, "key = value config file");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (s->parsed()) cmd_efficiency_sweep(sweep, out);
    if (p->parsed()) cmd_protocol_sim(proto, out);
    if (f->parsed()) cmd_fringes(fr, out);
    if (q->parsed()) cmd_feasibility(fe, out);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidParameters;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ParameterError& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kInvalidParameters;
  } catch (const ResolutionError& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kInvalidParameters;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << '\n';
    return kContractViolation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kContractViolation;
  }
}

}  // namespace motirr::cli
