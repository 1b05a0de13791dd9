#pragma once

// Single-photon detection protocol: per-photon outcome statistics with and
// without an object in the cavity, detector imperfections, the
// "same detector N times in a row" stopping rule, and batch metrics.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "motirr/resonator.hpp"
#include "motirr/rng.hpp"

namespace motirr {

struct OutcomeDistribution {
  double p_dr = 0.0;
  double p_dt = 0.0;
  double p_absorbed = 0.0;
  double p_lost = 0.0;

  [[nodiscard]] double total() const { return p_dr + p_dt + p_absorbed + p_lost; }
  /// Throws ContractViolation unless every entry is in [0, 1] and they sum to 1 within 1e-12.
  void validate() const;
};

/// Object in the cavity: D_r with R, absorbed with R(1-R), D_t with (1-R)^2.
[[nodiscard]] OutcomeDistribution outcome_probs_object_present(double reflectivity);

/// Free round trips: D_r fires with the cavity efficiency after n trips.
[[nodiscard]] OutcomeDistribution outcome_probs_object_absent(double reflectivity, std::uint64_t n);

struct DetectorModel {
  double quantum_efficiency = 0.85;
  double recovery_time = 1e-8;    // s
  double dark_count_rate = 0.0;   // Hz, per detector

  void validate() const;
};

enum class PhotonEvent : std::uint8_t { dr_click, dt_click, absorbed, lost, undetected };

[[nodiscard]] std::string_view to_string(PhotonEvent event);
[[nodiscard]] constexpr bool is_click(PhotonEvent e) {
  return e == PhotonEvent::dr_click || e == PhotonEvent::dt_click;
}

/// Draws one photon's fate. Always consumes exactly two uniforms: one picks
/// the channel, one decides whether D_r/D_t registers the photon.
[[nodiscard]] PhotonEvent sample_photon_outcome(const OutcomeDistribution& dist, const DetectorModel& detector,
                                                SplitMix64& rng);

/// What a window without a click does to a running streak.
enum class SilencePolicy : std::uint8_t { breaks_streak, ignored };

struct ProtocolConfig {
  ResonatorParams resonator;
  DetectorModel detector;
  unsigned consecutive_clicks_required = 2;
  double time_window = 1e-6;  // s, within [1 ns, 1 ms]
  std::uint64_t max_photons = 10'000;
  std::uint64_t rng_seed = 0;
  SilencePolicy silence = SilencePolicy::breaks_streak;

  void validate() const;
};

enum class Decision : std::uint8_t { object_present, object_absent, inconclusive };

[[nodiscard]] std::string_view to_string(Decision decision);

struct TrialRecord {
  bool object_present = false;
  std::vector<PhotonEvent> photon_events;
  Decision decision = Decision::inconclusive;
  std::uint64_t photons_absorbed_by_object = 0;
  std::uint64_t photons_sent = 0;
  std::uint64_t elapsed_windows = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Incremental stopping rule: feed events until `done()`.
class StreakTracker {
 public:
  StreakTracker(unsigned required, SilencePolicy silence) : required_(required), silence_(silence) {}

  /// Returns true once a streak of the required length has completed.
  bool push(PhotonEvent event);
  [[nodiscard]] bool done() const { return done_; }
  [[nodiscard]] std::optional<PhotonEvent> winner() const { return done_ ? std::optional{last_} : std::nullopt; }

 private:
  unsigned required_;
  SilencePolicy silence_;
  unsigned streak_ = 0;
  PhotonEvent last_ = PhotonEvent::undetected;
  bool done_ = false;
};

/// Runs trials for a fixed configuration. Outcome distributions are computed
/// once at construction; each trial then costs O(photons).
class TrialRunner {
 public:
  explicit TrialRunner(ProtocolConfig config);

  [[nodiscard]] TrialRecord run(bool object_present, SplitMix64& rng) const;
  /// Trial `index` on its own substream of config.rng_seed.
  [[nodiscard]] TrialRecord run_indexed(bool object_present, std::uint64_t index) const;

  [[nodiscard]] const ProtocolConfig& config() const { return config_; }
  [[nodiscard]] const OutcomeDistribution& present() const { return present_; }
  [[nodiscard]] const OutcomeDistribution& absent() const { return absent_; }
  /// Probability of a dark click on one detector during one window.
  [[nodiscard]] double dark_click_probability() const { return dark_probability_; }

 private:
  ProtocolConfig config_;
  OutcomeDistribution present_;
  OutcomeDistribution absent_;
  double dark_probability_ = 0.0;
};

/// One-off trial; builds a TrialRunner internally.
[[nodiscard]] TrialRecord run_trial(const ProtocolConfig& config, bool object_present, SplitMix64& rng);

/// Trials first_index .. first_index+count-1, in index order, run in parallel.
[[nodiscard]] std::vector<TrialRecord> run_trials(const TrialRunner& runner, bool object_present,
                                                  std::uint64_t count, std::uint64_t first_index = 0);

namespace serial {
[[nodiscard]] std::vector<TrialRecord> run_trials(const TrialRunner& runner, bool object_present,
                                                  std::uint64_t count, std::uint64_t first_index = 0);
}  // namespace serial

struct ProtocolSummary {
  std::uint64_t trials = 0;
  double misclassification_rate = 0.0;  // conclusive and wrong, over all trials
  double inconclusive_rate = 0.0;
  double mean_photons_absorbed = 0.0;
  std::uint64_t max_photons_absorbed = 0;
  double mean_windows = 0.0;
  /// Fraction of trials whose first photon produced a D_r click.
  double first_event_dr_rate = 0.0;
  /// Correct "present" decisions with zero absorbed photons over all
  /// object-present trials; empty when the batch has no such trial.
  std::optional<double> energy_exchange_free_fraction;
  std::uint64_t object_present_trials = 0;
};

[[nodiscard]] ProtocolSummary estimate_metrics(std::span<const TrialRecord> trials);

struct CountBudget {
  std::uint64_t per_channel;
  std::uint64_t aggregate;  // per_channel * n_fibers
};

/// Detector counts that fit in an observation interval given the recovery time.
[[nodiscard]] CountBudget count_budget(double observation_time, double recovery_time, std::uint64_t n_fibers);

}  // namespace motirr
