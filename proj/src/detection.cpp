#include "motirr/detection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "motirr/errors.hpp"
#include "numeric_util.hpp"

namespace motirr {

namespace {

constexpr double kNormalizationTolerance = 1e-12;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void OutcomeDistribution::validate() const {
  if (!is_probability(p_dr) || !is_probability(p_dt) || !is_probability(p_absorbed) || !is_probability(p_lost)) {
    throw ContractViolation("outcome probabilities must each lie in [0, 1]");
  }
  if (std::abs(total() - 1.0) > kNormalizationTolerance) {
    throw ContractViolation("outcome probabilities sum to " + std::to_string(total()) + ", not 1");
  }
}

OutcomeDistribution outcome_probs_object_present(double reflectivity) {
  check_reflectivity(reflectivity);
  const double t = 1.0 - reflectivity;
  return {.p_dr = reflectivity, .p_dt = t * t, .p_absorbed = reflectivity * t, .p_lost = 0.0};
}

OutcomeDistribution outcome_probs_object_absent(double reflectivity, std::uint64_t n) {
  const double eta = efficiency_closed_form(reflectivity, n);
  return {.p_dr = eta, .p_dt = 1.0 - eta, .p_absorbed = 0.0, .p_lost = 0.0};
}

void DetectorModel::validate() const {
  if (!is_probability(quantum_efficiency)) throw ParameterError("quantum efficiency must lie in [0, 1]");
  if (!(recovery_time >= 0.0) || !std::isfinite(recovery_time)) {
    throw ParameterError("recovery time must be non-negative");
  }
  if (!(dark_count_rate >= 0.0) || !std::isfinite(dark_count_rate)) {
    throw ParameterError("dark count rate must be non-negative");
  }
}

std::string_view to_string(PhotonEvent event) {
  switch (event) {
    case PhotonEvent::dr_click: return "Dr";
    case PhotonEvent::dt_click: return "Dt";
    case PhotonEvent::absorbed: return "absorbed";
    case PhotonEvent::lost: return "lost";
    case PhotonEvent::undetected: return "undetected";
  }
  return "?";
}

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::object_present: return "present";
    case Decision::object_absent: return "absent";
    case Decision::inconclusive: return "inconclusive";
  }
  return "?";
}

PhotonEvent sample_photon_outcome(const OutcomeDistribution& dist, const DetectorModel& detector,
                                  SplitMix64& rng) {
  dist.validate();
  const double channel = rng.uniform();
  const double registered = rng.uniform();

  PhotonEvent event;
  if (channel < dist.p_dr) {
    event = PhotonEvent::dr_click;
  } else if (channel < dist.p_dr + dist.p_dt) {
    event = PhotonEvent::dt_click;
  } else if (channel < dist.p_dr + dist.p_dt + dist.p_absorbed) {
    event = PhotonEvent::absorbed;
  } else if (dist.p_lost > 0.0) {
    event = PhotonEvent::lost;
  } else {
    // Rounding slack above the last non-empty bucket.
    event = dist.p_absorbed > 0.0 ? PhotonEvent::absorbed
            : dist.p_dt > 0.0     ? PhotonEvent::dt_click
                                  : PhotonEvent::dr_click;
  }
  if (is_click(event) && !(registered < detector.quantum_efficiency)) return PhotonEvent::undetected;
  return event;
}

void ProtocolConfig::validate() const {
  resonator.validate();
  detector.validate();
  if (consecutive_clicks_required == 0) throw ParameterError("consecutive clicks required must be positive");
  if (!(time_window >= 1e-9 && time_window <= 1e-3)) {
    throw ParameterError("time window must lie in [1 ns, 1 ms]");
  }
  if (detector.recovery_time > time_window) {
    throw ParameterError("time window is shorter than the detector recovery time");
  }
  if (max_photons == 0) throw ContractViolation("photon budget must be positive");
}

bool StreakTracker::push(PhotonEvent event) {
  if (done_) return true;
  if (is_click(event)) {
    if (streak_ > 0 && event == last_) {
      ++streak_;
    } else {
      last_ = event;
      streak_ = 1;
    }
    done_ = streak_ >= required_;
  } else if (silence_ == SilencePolicy::breaks_streak) {
    streak_ = 0;
  }
  return done_;
}

TrialRunner::TrialRunner(ProtocolConfig config) : config_(std::move(config)) {
  config_.validate();
  present_ = outcome_probs_object_present(config_.resonator.reflectivity);
  absent_ = outcome_probs_object_absent(config_.resonator.reflectivity, config_.resonator.round_trips);
  // Poisson probability of at least one dark count in a window.
  dark_probability_ = -std::expm1(-config_.detector.dark_count_rate * config_.time_window);
}

TrialRecord TrialRunner::run(bool object_present, SplitMix64& rng) const {
  const OutcomeDistribution& dist = object_present ? present_ : absent_;
  StreakTracker streak(config_.consecutive_clicks_required, config_.silence);

  TrialRecord record;
  record.object_present = object_present;
  for (std::uint64_t photon = 0; photon < config_.max_photons; ++photon) {
    PhotonEvent event = sample_photon_outcome(dist, config_.detector, rng);
    if (dark_probability_ > 0.0) {
      const double dark_r = rng.uniform();
      const double dark_t = rng.uniform();
      // A dark count can only stand in for a photon that left no trace.
      if (event == PhotonEvent::undetected || event == PhotonEvent::lost) {
        if (dark_r < dark_probability_) {
          event = PhotonEvent::dr_click;
        } else if (dark_t < dark_probability_) {
          event = PhotonEvent::dt_click;
        }
      }
    }
    record.photon_events.push_back(event);
    ++record.photons_sent;
    if (event == PhotonEvent::absorbed) ++record.photons_absorbed_by_object;
    if (streak.push(event)) break;
  }
  record.elapsed_windows = record.photons_sent;

  if (const auto winner = streak.winner()) {
    record.decision = *winner == PhotonEvent::dr_click ? Decision::object_present : Decision::object_absent;
  }
  return record;
}

TrialRecord TrialRunner::run_indexed(bool object_present, std::uint64_t index) const {
  SplitMix64 rng = substream(config_.rng_seed, StreamFamily::protocol_trial, index);
  return run(object_present, rng);
}

TrialRecord run_trial(const ProtocolConfig& config, bool object_present, SplitMix64& rng) {
  return TrialRunner(config).run(object_present, rng);
}

std::vector<TrialRecord> run_trials(const TrialRunner& runner, bool object_present, std::uint64_t count,
                                    std::uint64_t first_index) {
  std::vector<TrialRecord> records(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    records[k] = runner.run_indexed(object_present, first_index + k);
  }
  return records;
}

namespace serial {

std::vector<TrialRecord> run_trials(const TrialRunner& runner, bool object_present, std::uint64_t count,
                                    std::uint64_t first_index) {
  std::vector<TrialRecord> records;
  records.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) records.push_back(runner.run_indexed(object_present, first_index + k));
  return records;
}

}  // namespace serial

ProtocolSummary estimate_metrics(std::span<const TrialRecord> trials) {
  if (trials.empty()) throw ContractViolation("cannot summarize an empty trial batch");

  ProtocolSummary s;
  s.trials = trials.size();
  std::uint64_t wrong = 0, inconclusive = 0, first_dr = 0, clean_present = 0;
  double absorbed_sum = 0.0, windows_sum = 0.0;
  for (const TrialRecord& t : trials) {
    if (t.decision == Decision::inconclusive) {
      ++inconclusive;
    } else if ((t.decision == Decision::object_present) != t.object_present) {
      ++wrong;
    }
    if (!t.photon_events.empty() && t.photon_events.front() == PhotonEvent::dr_click) ++first_dr;
    if (t.object_present) {
      ++s.object_present_trials;
      if (t.decision == Decision::object_present && t.photons_absorbed_by_object == 0) ++clean_present;
    }
    absorbed_sum += static_cast<double>(t.photons_absorbed_by_object);
    windows_sum += static_cast<double>(t.elapsed_windows);
    s.max_photons_absorbed = std::max(s.max_photons_absorbed, t.photons_absorbed_by_object);
  }
  const auto n = static_cast<double>(s.trials);
  s.misclassification_rate = static_cast<double>(wrong) / n;
  s.inconclusive_rate = static_cast<double>(inconclusive) / n;
  s.mean_photons_absorbed = absorbed_sum / n;
  s.mean_windows = windows_sum / n;
  s.first_event_dr_rate = static_cast<double>(first_dr) / n;
  if (s.object_present_trials > 0) {
    s.energy_exchange_free_fraction =
        static_cast<double>(clean_present) / static_cast<double>(s.object_present_trials);
  }
  return s;
}

CountBudget count_budget(double observation_time, double recovery_time, std::uint64_t n_fibers) {
  if (!(observation_time > 0.0) || !std::isfinite(observation_time)) {
    throw ParameterError("observation time must be positive");
  }
  if (!(recovery_time > 0.0) || !std::isfinite(recovery_time)) {
    throw ParameterError("recovery time must be positive");
  }
  if (n_fibers == 0) throw ParameterError("fiber count must be positive");
  const std::uint64_t per_channel = detail::floor_quotient(observation_time, recovery_time);
  return {per_channel, per_channel * n_fibers};
}

}  // namespace motirr
