#include "motirr/welcher_weg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "motirr/errors.hpp"
#include "motirr/rng.hpp"

namespace motirr {

namespace {

constexpr double kPi = std::numbers::pi;

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

double sinc_squared(double beta) {
  if (std::abs(beta) < 1e-6) return 1.0 - beta * beta / 3.0;
  const double s = std::sin(beta) / beta;
  return s * s;
}

/// Composite Simpson over [lo, hi] with an even number of intervals.
template <typename F>
double simpson(F&& f, double lo, double hi, std::size_t intervals) {
  intervals += intervals % 2;
  const double h = (hi - lo) / static_cast<double>(intervals);
  double sum = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += f(lo + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

constexpr std::size_t kNormalizationIntervals = std::size_t{1} << 16;
constexpr std::size_t kBinIntervals = 32;

double resolve_half_width(const FringeModel& model, ScreenOptions screen) {
  if (screen.half_width == 0.0) return 2.0 * model.envelope_zero();
  if (!positive_finite(screen.half_width)) throw ParameterError("screen half-width must be positive");
  return screen.half_width;
}

std::vector<double> uniform_edges(double half_width, std::size_t bins) {
  std::vector<double> edges(bins + 1);
  const double width = 2.0 * half_width / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = -half_width + width * static_cast<double>(i);
  edges[bins] = half_width;
  return edges;
}

struct RunSetup {
  FringeModel model;
  double half_width;
  double tag_probability;
  StreamFamily family;
  TabulatedSampler coherent;
  TabulatedSampler incoherent;
};

RunSetup prepare_run(const DoubleSlitGeometry& geometry, const VelocityGroup& group,
                     const std::optional<PathMonitor>& monitor, ScreenOptions screen) {
  geometry.validate();
  group.validate();
  if (monitor) monitor->validate();
  const FringeModel model = FringeModel::from(geometry, group);
  const double w = resolve_half_width(model, screen);
  return RunSetup{
      .model = model,
      .half_width = w,
      .tag_probability = monitor ? monitor->tagging_probability : 0.0,
      .family = monitor ? StreamFamily::monitored_atom : StreamFamily::unmonitored_atom,
      .coherent = TabulatedSampler(-w, w, [&](double x) { return model.coherent(x); }),
      .incoherent = TabulatedSampler(-w, w, [&](double x) { return model.envelope(x); }),
  };
}

double draw_atom(const RunSetup& setup, std::uint64_t seed, std::uint64_t index) {
  SplitMix64 rng = substream(seed, setup.family, index);
  const double u_tag = rng.uniform();
  const double u_position = rng.uniform();
  const bool tagged = u_tag < setup.tag_probability;
  return (tagged ? setup.incoherent : setup.coherent).sample(u_position);
}

std::size_t bin_index(double x, double half_width, std::size_t bins) {
  const double scaled = (x + half_width) / (2.0 * half_width) * static_cast<double>(bins);
  if (scaled <= 0.0) return 0;
  return std::min(bins - 1, static_cast<std::size_t>(scaled));
}

FringePattern empty_pattern(const RunSetup& setup, const std::optional<PathMonitor>& monitor, std::uint64_t n_atoms,
                            std::size_t bins) {
  FringePattern pattern;
  pattern.bin_edges = uniform_edges(setup.half_width, bins);
  pattern.counts.assign(bins, 0);
  pattern.n_atoms = n_atoms;
  pattern.mode = monitor ? MonitoringMode::monitored : MonitoringMode::unmonitored;
  pattern.tagging_probability = setup.tag_probability;
  pattern.model = setup.model;
  return pattern;
}

void check_run_arguments(std::uint64_t n_atoms, std::size_t bins) {
  if (n_atoms == 0) throw ContractViolation("at least one atom is required");
  if (bins < 2) throw ContractViolation("at least two bins are required");
}

}  // namespace

void VelocityGroup::validate() const {
  if (!positive_finite(mass) || !positive_finite(speed_at_screen) || !positive_finite(fall_time) ||
      !positive_finite(cycle_period)) {
    throw ParameterError("velocity group parameters must be positive");
  }
  if (initial_speed && !positive_finite(*initial_speed)) throw ParameterError("initial speed must be positive");
}

void DoubleSlitGeometry::validate() const {
  if (!positive_finite(slit_width) || !positive_finite(slit_separation) || !(slit_width < slit_separation)) {
    throw ParameterError("slit geometry requires 0 < slit width < slit separation");
  }
  if (!positive_finite(screen_distance)) throw ParameterError("slit-to-screen distance must be positive");
  if (!(gravity >= 0.0) || !std::isfinite(gravity)) throw ParameterError("gravity must be non-negative");
}

double de_broglie_wavelength(double mass, double speed) {
  if (!positive_finite(mass) || !positive_finite(speed)) throw ParameterError("mass and speed must be positive");
  return constants::planck / (mass * speed);
}

double screen_speed(const VelocityGroup& group, const DoubleSlitGeometry& geometry) {
  if (group.initial_speed) return *group.initial_speed + geometry.gravity * group.fall_time;
  return group.speed_at_screen;
}

double gravity_correction_factor(const VelocityGroup& group, const DoubleSlitGeometry& geometry) {
  if (!group.initial_speed) return 1.0;
  return screen_speed(group, geometry) / *group.initial_speed;
}

FringeModel FringeModel::from(const DoubleSlitGeometry& geometry, const VelocityGroup& group) {
  geometry.validate();
  group.validate();
  return {de_broglie_wavelength(group.mass, screen_speed(group, geometry)), geometry.slit_separation,
          geometry.slit_width, geometry.screen_distance};
}

double FringeModel::envelope(double x) const {
  return sinc_squared(kPi * slit_width * x / (wavelength * screen_distance));
}

double FringeModel::coherent(double x) const {
  const double c = std::cos(kPi * slit_separation * x / (wavelength * screen_distance));
  return envelope(x) * c * c;
}

double fringe_intensity(double x, const DoubleSlitGeometry& geometry, const VelocityGroup& group) {
  return FringeModel::from(geometry, group).coherent(x);
}

void PathMonitor::validate() const {
  resonator.validate();
  if (n_fibers == 0) throw ParameterError("fiber count must be positive");
  if (!(tagging_probability >= 0.0 && tagging_probability <= 1.0)) {
    throw ParameterError("tagging probability must lie in [0, 1]");
  }
}

double PathMonitor::photon_hit_probability() const {
  check_reflectivity(resonator.reflectivity);
  return resonator.reflectivity * (1.0 - resonator.reflectivity);
}

double PathMonitor::false_dr_probability() const {
  return efficiency_closed_form(resonator.reflectivity, resonator.round_trips);
}

ArrivalDensity::ArrivalDensity(FringeModel model, double half_width, double tagged_fraction)
    : model_(model), half_width_(half_width), tagged_(tagged_fraction) {
  if (!positive_finite(half_width)) throw ParameterError("screen half-width must be positive");
  if (!(tagged_fraction >= 0.0 && tagged_fraction <= 1.0)) throw ParameterError("tagged fraction must lie in [0, 1]");
  coherent_norm_ = simpson([&](double x) { return model_.coherent(x); }, -half_width, half_width,
                           kNormalizationIntervals);
  incoherent_norm_ = simpson([&](double x) { return model_.envelope(x); }, -half_width, half_width,
                             kNormalizationIntervals);
}

double ArrivalDensity::operator()(double x) const {
  if (x < -half_width_ || x > half_width_) return 0.0;
  return tagged_ * incoherent(x) + (1.0 - tagged_) * coherent(x);
}

void TabulatedSampler::build(std::span<const double> values) {
  cdf_.assign(values.size(), 0.0);
  for (std::size_t i = 1; i < values.size(); ++i) {
    cdf_[i] = cdf_[i - 1] + 0.5 * (values[i - 1] + values[i]) * step_;
  }
  const double total = cdf_.back();
  if (!(total > 0.0)) throw ContractViolation("density has no mass on the screen");
  for (double& c : cdf_) c /= total;
}

double TabulatedSampler::sample(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return lo_;
  if (it == cdf_.end()) return lo_ + step_ * static_cast<double>(cdf_.size() - 1);
  const auto hi = static_cast<std::size_t>(it - cdf_.begin());
  const double c0 = cdf_[hi - 1];
  const double c1 = cdf_[hi];
  const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
  return lo_ + step_ * (static_cast<double>(hi - 1) + frac);
}

std::vector<double> FringePattern::bin_centers() const {
  std::vector<double> centers;
  centers.reserve(counts.size());
  for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) centers.push_back(0.5 * (bin_edges[i] + bin_edges[i + 1]));
  return centers;
}

FringePattern simulate_run(const DoubleSlitGeometry& geometry, const VelocityGroup& group,
                           const std::optional<PathMonitor>& monitor, std::uint64_t n_atoms, std::size_t bins,
                           std::uint64_t seed, ScreenOptions screen) {
  check_run_arguments(n_atoms, bins);
  const RunSetup setup = prepare_run(geometry, group, monitor, screen);
  FringePattern pattern = empty_pattern(setup, monitor, n_atoms, bins);
  const auto n = static_cast<std::int64_t>(n_atoms);

#pragma omp parallel
  {
    std::vector<std::uint64_t> local(bins, 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const double x = draw_atom(setup, seed, static_cast<std::uint64_t>(i));
      ++local[bin_index(x, setup.half_width, bins)];
    }
#pragma omp critical(motirr_fringe_merge)
    for (std::size_t b = 0; b < bins; ++b) pattern.counts[b] += local[b];
  }
  return pattern;
}

std::vector<double> sample_arrivals(const DoubleSlitGeometry& geometry, const VelocityGroup& group,
                                    const std::optional<PathMonitor>& monitor, std::uint64_t n_atoms,
                                    std::uint64_t seed, ScreenOptions screen) {
  check_run_arguments(n_atoms, 2);
  const RunSetup setup = prepare_run(geometry, group, monitor, screen);
  std::vector<double> positions(n_atoms);
  const auto n = static_cast<std::int64_t>(n_atoms);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    positions[static_cast<std::size_t>(i)] = draw_atom(setup, seed, static_cast<std::uint64_t>(i));
  }
  return positions;
}

namespace serial {

FringePattern simulate_run(const DoubleSlitGeometry& geometry, const VelocityGroup& group,
                           const std::optional<PathMonitor>& monitor, std::uint64_t n_atoms, std::size_t bins,
                           std::uint64_t seed, ScreenOptions screen) {
  check_run_arguments(n_atoms, bins);
  const RunSetup setup = prepare_run(geometry, group, monitor, screen);
  FringePattern pattern = empty_pattern(setup, monitor, n_atoms, bins);
  for (std::uint64_t i = 0; i < n_atoms; ++i) {
    ++pattern.counts[bin_index(draw_atom(setup, seed, i), setup.half_width, bins)];
  }
  return pattern;
}

}  // namespace serial

std::vector<double> bin_probabilities(const FringeModel& model, std::span<const double> bin_edges,
                                      double tagged_fraction) {
  if (bin_edges.size() < 3) throw ResolutionError("at least two bins are required");
  if (!std::is_sorted(bin_edges.begin(), bin_edges.end(), std::less_equal<>{}) ||
      std::adjacent_find(bin_edges.begin(), bin_edges.end()) != bin_edges.end()) {
    throw ContractViolation("bin edges must be strictly increasing");
  }
  const double half_width = std::max(std::abs(bin_edges.front()), std::abs(bin_edges.back()));
  const ArrivalDensity density(model, half_width, tagged_fraction);
  std::vector<double> mass(bin_edges.size() - 1);
  for (std::size_t i = 0; i < mass.size(); ++i) {
    mass[i] = simpson(density, bin_edges[i], bin_edges[i + 1], kBinIntervals);
  }
  return mass;
}

VisibilityEstimate visibility(const FringeModel& model, std::span<const double> bin_edges,
                              std::span<const double> weights, bool poisson_counts) {
  if (weights.size() + 1 != bin_edges.size()) throw ContractViolation("need exactly one weight per bin");
  const double period = model.fringe_period();
  if (bin_edges.front() > -0.75 * period || bin_edges.back() < 0.75 * period) {
    throw ResolutionError("screen does not cover the central fringe and its neighbouring minima");
  }

  const std::vector<double> envelope_mass = bin_probabilities(model, bin_edges, 1.0);
  const std::vector<double> coherent_mass = bin_probabilities(model, bin_edges, 0.0);

  struct Regions {
    double peak = 0.0;
    double trough = 0.0;
  };
  std::size_t peak_bins = 0, trough_bins = 0;
  auto accumulate = [&](std::span<const double> w, bool count_bins) {
    Regions r;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double c = std::abs(0.5 * (bin_edges[i] + bin_edges[i + 1]));
      if (c < 0.25 * period) {
        r.peak += w[i];
        if (count_bins) ++peak_bins;
      } else if (std::abs(c - 0.5 * period) < 0.25 * period) {
        r.trough += w[i];
        if (count_bins) ++trough_bins;
      }
    }
    return r;
  };

  const Regions envelope = accumulate(envelope_mass, true);
  if (peak_bins < 2 || trough_bins < 2) {
    throw ResolutionError("bins too coarse to resolve one fringe period");
  }
  const Regions coherent = accumulate(coherent_mass, false);
  const Regions observed = accumulate(weights, false);
  if (!(observed.peak + observed.trough > 0.0)) throw ResolutionError("no arrivals in the central fringe region");

  auto contrast = [&](const Regions& r) {
    const double hi = r.peak / envelope.peak;
    const double lo = r.trough / envelope.trough;
    return (hi - lo) / (hi + lo);
  };
  const double resolution = contrast(coherent);
  const double raw = contrast(observed) / resolution;

  double se = 0.0;
  if (poisson_counts) {
    const double a = 1.0 / envelope.peak;
    const double b = 1.0 / envelope.trough;
    const double m_hi = observed.peak;
    const double m_lo = observed.trough;
    const double denom = a * m_hi + b * m_lo;
    se = std::sqrt(4.0 * a * a * b * b * m_hi * m_lo * (m_hi + m_lo)) / (denom * denom) / resolution;
  }
  return {std::clamp(raw, 0.0, 1.0), raw, se};
}

VisibilityEstimate visibility(const FringePattern& pattern) {
  if (pattern.counts.size() + 1 != pattern.bin_edges.size()) {
    throw ContractViolation("pattern needs exactly one count per bin");
  }
  std::vector<double> weights(pattern.counts.begin(), pattern.counts.end());
  return visibility(pattern.model, pattern.bin_edges, weights, true);
}

MonitoringReport monitoring_budget(const PathMonitor& monitor, const VelocityGroup& group,
                                   std::uint64_t target_detections, const DetectorModel& detector) {
  monitor.validate();
  group.validate();
  detector.validate();
  MonitoringReport report{};
  report.photon_hit_probability = monitor.photon_hit_probability();
  report.false_dr_probability = monitor.false_dr_probability();
  report.target_detections = target_detections;
  report.minimum_cycles = target_detections;
  report.minimum_wall_clock = static_cast<double>(target_detections) * group.cycle_period;
  if (monitor.tagging_probability > 0.0) {
    report.expected_cycles = static_cast<double>(target_detections) / monitor.tagging_probability;
    report.expected_wall_clock = *report.expected_cycles * group.cycle_period;
  }
  report.counts_per_cycle = count_budget(group.fall_time, detector.recovery_time, monitor.n_fibers);
  // Per-channel reading: every count in one D_t, none obstructed.
  report.expected_false_dr_per_cycle =
      static_cast<double>(report.counts_per_cycle.per_channel) * report.false_dr_probability;
  return report;
}

}  // namespace motirr
