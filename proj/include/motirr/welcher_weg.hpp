#pragma once

// Which-path ("welcher Weg") atom interferometer: free-falling metastable
// neon passing a double slit, optional path monitoring by a co-moving
// resonator, and fringe visibility of monitored vs. unmonitored ensembles.
//
// Decoherence is binary: an atom is either fully path-tagged (arrives with
// the incoherent one-slit envelope) or untouched (coherent two-slit
// pattern). Both densities are Fraunhofer far-field patterns on a finite
// screen [-half_width, half_width] and are normalized over that support.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "motirr/constants.hpp"
#include "motirr/detection.hpp"
#include "motirr/resonator.hpp"

namespace motirr {

struct VelocityGroup {
  double mass = constants::neon20_mass;  // kg
  double speed_at_screen = 2.0;          // m/s
  double fall_time = 0.1;                // s, slit to detector
  double cycle_period = 0.4;             // s
  /// When set, the screen speed is initial_speed + g * fall_time instead of
  /// speed_at_screen.
  std::optional<double> initial_speed;

  void validate() const;
};

struct DoubleSlitGeometry {
  double slit_separation = 6e-6;  // m
  double slit_width = 2e-6;       // m
  double screen_distance = 0.85;  // m
  double gravity = constants::standard_gravity;

  void validate() const;
};

[[nodiscard]] double de_broglie_wavelength(double mass, double speed);

/// Speed at the detector plane, gravity included when an initial speed is known.
[[nodiscard]] double screen_speed(const VelocityGroup& group, const DoubleSlitGeometry& geometry);
/// v_screen / v_0, or 1 when no initial speed is given.
[[nodiscard]] double gravity_correction_factor(const VelocityGroup& group, const DoubleSlitGeometry& geometry);

/// Everything the far-field pattern depends on.
struct FringeModel {
  double wavelength;       // m, evaluated at screen speed
  double slit_separation;  // m
  double slit_width;       // m
  double screen_distance;  // m

  [[nodiscard]] static FringeModel from(const DoubleSlitGeometry& geometry, const VelocityGroup& group);

  [[nodiscard]] double fringe_period() const { return wavelength * screen_distance / slit_separation; }
  /// Position of the first zero of the single-slit envelope.
  [[nodiscard]] double envelope_zero() const { return wavelength * screen_distance / slit_width; }
  /// sinc^2 single-slit envelope, 1 at x = 0.
  [[nodiscard]] double envelope(double x) const;
  /// envelope(x) cos^2(pi d x / (lambda z)).
  [[nodiscard]] double coherent(double x) const;

  friend bool operator==(const FringeModel&, const FringeModel&) = default;
};

/// Relative two-slit intensity at screen coordinate x (1 at x = 0).
[[nodiscard]] double fringe_intensity(double x, const DoubleSlitGeometry& geometry, const VelocityGroup& group);

struct PathMonitor {
  ResonatorParams resonator{};  // R = 0.999, n = 10013 by default
  std::uint64_t n_fibers = 300;
  /// Probability that an atom's path becomes known during its transit.
  double tagging_probability = 0.0;

  void validate() const;
  /// R(1 - R): probability a photon in the cavity hits the atom.
  [[nodiscard]] double photon_hit_probability() const;
  /// Probability D_r fires with no atom present (cavity efficiency).
  [[nodiscard]] double false_dr_probability() const;
};

/// Normalized arrival density over the screen support for a given tagged
/// fraction: tagged * incoherent + (1 - tagged) * coherent.
class ArrivalDensity {
 public:
  ArrivalDensity(FringeModel model, double half_width, double tagged_fraction);

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double coherent(double x) const { return model_.coherent(x) / coherent_norm_; }
  [[nodiscard]] double incoherent(double x) const { return model_.envelope(x) / incoherent_norm_; }

  [[nodiscard]] double half_width() const { return half_width_; }
  [[nodiscard]] double tagged_fraction() const { return tagged_; }
  [[nodiscard]] const FringeModel& model() const { return model_; }

 private:
  FringeModel model_;
  double half_width_;
  double tagged_;
  double coherent_norm_;
  double incoherent_norm_;
};

enum class MonitoringMode : std::uint8_t { unmonitored, monitored };

struct FringePattern {
  std::vector<double> bin_edges;        // m, strictly increasing
  std::vector<std::uint64_t> counts;    // one per bin
  std::uint64_t n_atoms = 0;
  MonitoringMode mode = MonitoringMode::unmonitored;
  double tagging_probability = 0.0;
  FringeModel model{};

  [[nodiscard]] std::vector<double> bin_centers() const;
  friend bool operator==(const FringePattern&, const FringePattern&) = default;
};

struct ScreenOptions {
  /// Half-width of the detector; zero selects two envelope zeros.
  double half_width = 0.0;
};

/// Inverse-CDF sampler over a 2^14-point tabulation of one density.
class TabulatedSampler {
 public:
  static constexpr std::size_t kGridPoints = std::size_t{1} << 14;

  template <typename Density>
  TabulatedSampler(double lo, double hi, Density&& density);

  [[nodiscard]] double sample(double u) const;

 private:
  void build(std::span<const double> values);

  double lo_;
  double step_;
  std::vector<double> cdf_;
};

/// Histogrammed arrivals of n_atoms atoms. Without a monitor no atom is
/// tagged; with one each atom is tagged with monitor->tagging_probability.
/// Atoms are drawn in parallel on per-atom substreams; the pattern does not
/// depend on the thread count and equals serial::simulate_run.
[[nodiscard]] FringePattern simulate_run(const DoubleSlitGeometry& geometry, const VelocityGroup& group,
                                         const std::optional<PathMonitor>& monitor, std::uint64_t n_atoms,
                                         std::size_t bins, std::uint64_t seed, ScreenOptions screen = {});

/// Raw arrival positions, same streams as simulate_run.
[[nodiscard]] std::vector<double> sample_arrivals(const DoubleSlitGeometry& geometry, const VelocityGroup& group,
                                                  const std::optional<PathMonitor>& monitor,
                                                  std::uint64_t n_atoms, std::uint64_t seed,
                                                  ScreenOptions screen = {});

namespace serial {
[[nodiscard]] FringePattern simulate_run(const DoubleSlitGeometry& geometry, const VelocityGroup& group,
                                         const std::optional<PathMonitor>& monitor, std::uint64_t n_atoms,
                                         std::size_t bins, std::uint64_t seed, ScreenOptions screen = {});
}  // namespace serial

/// Probability mass of each bin under the tagged-fraction mixture.
[[nodiscard]] std::vector<double> bin_probabilities(const FringeModel& model, std::span<const double> bin_edges,
                                                    double tagged_fraction);

struct VisibilityEstimate {
  double value;           // clamped to [0, 1]
  double raw;             // unclamped estimate
  double standard_error;  // Poisson propagation; 0 for analytic inputs
};

/// Fringe contrast (I_max - I_min)/(I_max + I_min) of the central fringe
/// against its two neighbouring minima. Each region's count is divided by
/// the envelope's probability mass over the same bins, and the result is
/// divided by the contrast the fully coherent pattern would show with the
/// same binning, so bin averaging does not bias the estimate.
[[nodiscard]] VisibilityEstimate visibility(const FringePattern& pattern);
/// Same estimator over real-valued weights (analytic expected counts).
[[nodiscard]] VisibilityEstimate visibility(const FringeModel& model, std::span<const double> bin_edges,
                                            std::span<const double> weights, bool poisson_counts = false);

struct MonitoringReport {
  double photon_hit_probability;
  double false_dr_probability;
  std::uint64_t target_detections;
  std::uint64_t minimum_cycles;           // one success per cycle
  std::optional<double> expected_cycles;  // target / tagging probability
  double minimum_wall_clock;              // s
  std::optional<double> expected_wall_clock;
  CountBudget counts_per_cycle;           // over the fall time
  double expected_false_dr_per_cycle;
};

[[nodiscard]] MonitoringReport monitoring_budget(const PathMonitor& monitor, const VelocityGroup& group,
                                                 std::uint64_t target_detections = 1000,
                                                 const DetectorModel& detector = {});

// ---------------------------------------------------------------------------

template <typename Density>
TabulatedSampler::TabulatedSampler(double lo, double hi, Density&& density)
    : lo_(lo), step_((hi - lo) / static_cast<double>(kGridPoints - 1)) {
  std::vector<double> values(kGridPoints);
  for (std::size_t i = 0; i < kGridPoints; ++i) values[i] = density(lo + step_ * static_cast<double>(i));
  build(values);
}

}  // namespace motirr
