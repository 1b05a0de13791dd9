#include "motirr/resonator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "motirr/constants.hpp"
#include "motirr/errors.hpp"
#include "numeric_util.hpp"

namespace motirr {

namespace {

constexpr double kConsistencyTolerance = 1e-6;

bool close_relative(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be positive and finite, got " + std::to_string(value));
  }
}

}  // namespace

void check_reflectivity(double reflectivity) {
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
    throw ParameterError("reflectivity must lie in [0, 1], got " + std::to_string(reflectivity));
  }
}

void check_loss(double loss) {
  if (!(loss >= 0.0 && loss < 1.0)) {
    throw ParameterError("loss per round trip must lie in [0, 1), got " + std::to_string(loss));
  }
}

void ResonatorParams::validate() const {
  check_reflectivity(reflectivity);
  check_loss(loss_per_round_trip);
  if (mode_number == 0) throw ParameterError("mode number must be a positive integer");
  if (!(effective_index >= 1.0) || !std::isfinite(effective_index)) {
    throw ParameterError("effective index must be >= 1");
  }
  if (!round_trip_length && !round_trip_time) {
    throw ParameterError("either the round-trip length or the round-trip time is required");
  }
  if (round_trip_length) require_positive(*round_trip_length, "round-trip length");
  if (round_trip_time) require_positive(*round_trip_time, "round-trip time");
  if (round_trip_length && round_trip_time) {
    const double derived = *round_trip_length * effective_index / constants::speed_of_light;
    if (!close_relative(derived, *round_trip_time, kConsistencyTolerance)) {
      throw ParameterError("round-trip time is inconsistent with L * n_eff / c");
    }
  }
  if (resonance_frequency) {
    require_positive(*resonance_frequency, "resonance frequency");
    const double t = round_trip_time ? *round_trip_time
                                     : *round_trip_length * effective_index / constants::speed_of_light;
    const double derived = 2.0 * std::numbers::pi * static_cast<double>(mode_number) / t;
    if (!close_relative(derived, *resonance_frequency, kConsistencyTolerance)) {
      throw ParameterError("resonance frequency is inconsistent with 2 pi k / T");
    }
  }
}

double ResonatorParams::resolved_round_trip_time() const {
  validate();
  if (round_trip_time) return *round_trip_time;
  return *round_trip_length * effective_index / constants::speed_of_light;
}

double ResonatorParams::resolved_round_trip_length() const {
  validate();
  if (round_trip_length) return *round_trip_length;
  return *round_trip_time * constants::speed_of_light / effective_index;
}

double ResonatorParams::resolved_resonance_frequency() const {
  if (resonance_frequency) {
    validate();
    return *resonance_frequency;
  }
  return 2.0 * std::numbers::pi * static_cast<double>(mode_number) / resolved_round_trip_time();
}

double detuning_phase(double omega, const ResonatorParams& params) {
  return (omega - params.resolved_resonance_frequency()) * params.resolved_round_trip_time();
}

DetuningState make_detuning(double omega, const ResonatorParams& params) {
  if (!(omega >= 0.0)) throw ParameterError("input frequency must be non-negative");
  return {omega, detuning_phase(omega, params)};
}

ComplexAmplitude roundtrip_amplitude(std::uint64_t i, ComplexAmplitude incident, double reflectivity,
                                     double psi, double loss) {
  check_reflectivity(reflectivity);
  check_loss(loss);
  const double root_r = std::sqrt(reflectivity);
  if (i == 0) return -incident * root_r;
  const double keep = 1.0 - loss;
  const ComplexAmplitude phase = std::polar(1.0, psi);
  const ComplexAmplitude ratio = keep * reflectivity * phase;
  return incident * (1.0 - reflectivity) * root_r * detail::integer_power(ratio, i - 1) * keep * phase;
}

std::uint64_t max_round_trips_from_coherence(double coherence_length, double round_trip_length) {
  require_positive(coherence_length, "coherence length");
  require_positive(round_trip_length, "round-trip length");
  return detail::floor_quotient(coherence_length, round_trip_length);
}

double round_trip_time(double round_trip_length, double effective_index) {
  require_positive(round_trip_length, "round-trip length");
  if (!(effective_index >= 1.0) || !std::isfinite(effective_index)) {
    throw ParameterError("effective index must be >= 1");
  }
  return round_trip_length * effective_index / constants::speed_of_light;
}

PulseFeasibility pulse_feasibility(double pulse_duration, double round_trip_length, double effective_index) {
  require_positive(pulse_duration, "pulse duration");
  const double t = round_trip_time(round_trip_length, effective_index);
  const double ratio = pulse_duration / t;
  return {t, ratio, ratio >= 1.0};
}

}  // namespace motirr
