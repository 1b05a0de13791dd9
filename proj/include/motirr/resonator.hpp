#pragma once

// Deterministic cavity model for a monolithic total-internal-reflection
// resonator (MOTIRR): round-trip amplitudes, free-round-trip efficiency,
// detuning phase and the coherence/pulse feasibility calculators.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace motirr {

/// Dimensionless optical field amplitude.
using ComplexAmplitude = std::complex<double>;

/// Cavity parameters. Timing is canonical in (round_trip_length,
/// effective_index); round_trip_time and resonance_frequency are derived
/// unless set explicitly, in which case they are checked for consistency
/// with the other supplied values at relative tolerance 1e-6.
struct ResonatorParams {
  double reflectivity = 0.999;
  std::uint64_t round_trips = 10013;
  double loss_per_round_trip = 0.0;
  /// lambda = L / mode_number; informational. Default is 1064 nm over 4 cm.
  std::uint64_t mode_number = 37594;
  std::optional<double> round_trip_length = 0.04;  // m
  double effective_index = 1.0;
  std::optional<double> round_trip_time;       // s
  std::optional<double> resonance_frequency;   // rad/s

  /// Throws ParameterError on any domain or consistency violation.
  void validate() const;

  [[nodiscard]] double resolved_round_trip_time() const;
  [[nodiscard]] double resolved_round_trip_length() const;
  /// 2 pi mode_number / T unless given explicitly.
  [[nodiscard]] double resolved_resonance_frequency() const;
};

struct DetuningState {
  double omega;  // rad/s
  double psi;    // rad, phase added per round trip
};

/// psi = (omega - omega_res) T, without range reduction.
[[nodiscard]] double detuning_phase(double omega, const ResonatorParams& params);
[[nodiscard]] DetuningState make_detuning(double omega, const ResonatorParams& params);

/// Reflectivity and loss checks shared by every amplitude operation.
void check_reflectivity(double reflectivity);
void check_loss(double loss);

/// Contribution of the i-th round trip to the reflected amplitude.
/// i = 0 is the direct reflection -A sqrt(R). For i >= 1 the light has
/// tunnelled in, circulated i times and tunnelled back out:
///   A (1-R) sqrt(R) [(1-loss) R e^{i psi}]^{i-1} (1-loss) e^{i psi}.
[[nodiscard]] ComplexAmplitude roundtrip_amplitude(std::uint64_t i, ComplexAmplitude incident,
                                                   double reflectivity, double psi,
                                                   double loss = 0.0);

/// Reflected-to-incident intensity ratio after n free round trips, computed
/// term by term from the explicit finite sum
///   1 - (1-R)/(1+R) [R^{2n} - 1 + 2 sum_{j=1..n} (1 + R^{2n-2j+1}) R^{j-1}].
/// The sum is evaluated in extended precision (enough bits to survive the
/// cancellation against 1) and rounded once to double.
[[nodiscard]] double efficiency_closed_form(double reflectivity, std::uint64_t n);

/// |sum_{i=0..n} roundtrip_amplitude(i, 1, R, psi, loss)|^2, summed in extended
/// precision. On resonance without loss this is R^{2n+1}, one factor R below
/// efficiency_closed_form; the two are kept apart on purpose.
[[nodiscard]] double efficiency_brute_force(double reflectivity, std::uint64_t n,
                                            double psi = 0.0, double loss = 0.0);

struct EfficiencyRow {
  double reflectivity;
  std::uint64_t n;
  double eta_closed_form;
  double eta_brute_force;

  friend bool operator==(const EfficiencyRow&, const EfficiencyRow&) = default;
};

/// Rows for every R in `reflectivities` (outer) and n in 0..n_max (inner).
/// Rows are evaluated in parallel; the result is identical to
/// serial::efficiency_sweep.
[[nodiscard]] std::vector<EfficiencyRow> efficiency_sweep(std::span<const double> reflectivities,
                                                          std::uint64_t n_max);

/// The reflectivities drawn as curves in the efficiency figure.
[[nodiscard]] std::vector<double> figure_reflectivities();

namespace serial {
[[nodiscard]] std::vector<EfficiencyRow> efficiency_sweep(std::span<const double> reflectivities,
                                                          std::uint64_t n_max);
}  // namespace serial

/// floor(coherence_length / L), tolerant of representation error when the
/// quotient is an integer.
[[nodiscard]] std::uint64_t max_round_trips_from_coherence(double coherence_length,
                                                           double round_trip_length);

/// T = L n_eff / c.
[[nodiscard]] double round_trip_time(double round_trip_length, double effective_index);

struct PulseFeasibility {
  double round_trip_time;   // s
  double pulse_to_round_trip_ratio;
  bool feasible;            // pulse spans at least one full round trip
};

[[nodiscard]] PulseFeasibility pulse_feasibility(double pulse_duration, double round_trip_length,
                                                 double effective_index);

}  // namespace motirr
