#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "motirr/constants.hpp"
#include "motirr/errors.hpp"
#include "motirr/resonator.hpp"

namespace motirr {
namespace {

using boost::multiprecision::cpp_rational;

constexpr double kPi = std::numbers::pi;

const std::vector<double> kIdentityGrid{0.0, 0.25, 0.5, 0.9, 0.95, 0.99, 0.995, 0.999, 1.0};

// Exact evaluation of the efficiency formula as printed, for a dyadic R.
cpp_rational exact_closed_form(double r_double, unsigned n) {
  const cpp_rational r(r_double);
  auto power = [&](unsigned e) {
    cpp_rational p = 1;
    for (unsigned k = 0; k < e; ++k) p *= r;
    return p;
  };
  cpp_rational sum = 0;
  for (unsigned j = 1; j <= n; ++j) sum += (1 + power(2 * n - 2 * j + 1)) * power(j - 1);
  const cpp_rational bracket = power(2 * n) - 1 + 2 * sum;
  return 1 - (1 - r) / (1 + r) * bracket;
}

TEST(DetuningPhase, OnResonanceIsZero) {
  const ResonatorParams params;
  EXPECT_EQ(detuning_phase(params.resolved_resonance_frequency(), params), 0.0);
}

TEST(DetuningPhase, DirectProduct) {
  ResonatorParams params;
  params.round_trip_length.reset();
  params.round_trip_time = 1e-9;
  const double omega_res = params.resolved_resonance_frequency();
  EXPECT_NEAR(detuning_phase(omega_res + 1e6, params), 1e-3, 1e-3 * 1e-6);
}

TEST(DetuningPhase, FullPeriodGivesSamePhaseFactor) {
  const ResonatorParams params;
  const double t = params.resolved_round_trip_time();
  const double omega_res = params.resolved_resonance_frequency();
  const double psi = detuning_phase(omega_res + 2.0 * kPi / t, params);
  EXPECT_NEAR(psi, 2.0 * kPi, 1e-6);
  // omega itself is only known to one ulp (~0.25 rad/s here), which maps to
  // ulp * T of phase; the bound follows from that, not from a fixed epsilon.
  const double omega = omega_res + 2.0 * kPi / t;
  const double phase_tol = 4.0 * (std::nextafter(omega, 2 * omega) - omega) * t;
  const ComplexAmplitude factor = std::polar(1.0, psi);
  EXPECT_NEAR(std::abs(factor - ComplexAmplitude{1.0, 0.0}), 0.0, phase_tol);
  EXPECT_NEAR(std::abs(roundtrip_amplitude(3, 1.0, 0.9, psi) - roundtrip_amplitude(3, 1.0, 0.9, 0.0)), 0.0,
              3 * phase_tol);
}

TEST(DetuningPhase, NegativeFrequencyRejected) { EXPECT_THROW((void)make_detuning(-1.0, ResonatorParams{}), ParameterError); }

TEST(ResonatorParams, DerivesTimingFromLength) {
  const ResonatorParams params;
  EXPECT_DOUBLE_EQ(params.resolved_round_trip_time(), 0.04 / constants::speed_of_light);
  EXPECT_DOUBLE_EQ(params.resolved_resonance_frequency(),
                   2.0 * kPi * 37594.0 / params.resolved_round_trip_time());
}

TEST(ResonatorParams, ChecksConsistencyWhenOverdetermined) {
  ResonatorParams params;
  params.round_trip_time = 0.04 / constants::speed_of_light * (1.0 + 5e-7);
  EXPECT_NO_THROW(params.validate());
  params.round_trip_time = 0.04 / constants::speed_of_light * (1.0 + 5e-6);
  EXPECT_THROW(params.validate(), ParameterError);

  ResonatorParams omega;
  omega.resonance_frequency = 1.0;
  EXPECT_THROW(omega.validate(), ParameterError);
}

TEST(ResonatorParams, RejectsOutOfDomain) {
  auto with = [](auto&& mutate) {
    ResonatorParams p;
    mutate(p);
    return p;
  };
  EXPECT_THROW(with([](ResonatorParams& p) { p.reflectivity = 1.5; }).validate(), ParameterError);
  EXPECT_THROW(with([](ResonatorParams& p) { p.reflectivity = std::nan(""); }).validate(), ParameterError);
  EXPECT_THROW(with([](ResonatorParams& p) { p.loss_per_round_trip = 1.0; }).validate(), ParameterError);
  EXPECT_THROW(with([](ResonatorParams& p) { p.effective_index = 0.9; }).validate(), ParameterError);
  EXPECT_THROW(with([](ResonatorParams& p) { p.round_trip_length.reset(); }).validate(), ParameterError);
  EXPECT_THROW(with([](ResonatorParams& p) { p.mode_number = 0; }).validate(), ParameterError);
}

TEST(RoundtripAmplitude, DirectReflection) {
  EXPECT_DOUBLE_EQ(roundtrip_amplitude(0, 1.0, 0.999, 0.0).real(), -std::sqrt(0.999));
  EXPECT_NEAR(roundtrip_amplitude(0, 1.0, 0.999, 0.0).real(), -0.9994998749, 1e-10);
}

TEST(RoundtripAmplitude, FirstRoundTrip) {
  const ComplexAmplitude b1 = roundtrip_amplitude(1, 1.0, 0.999, 0.0);
  EXPECT_NEAR(b1.real(), 9.995e-4, 1e-7);
  EXPECT_DOUBLE_EQ(b1.real(), (1.0 - 0.999) * std::sqrt(0.999));
  EXPECT_EQ(b1.imag(), 0.0);
  // With detuning B1 picks up e^{i psi} exactly.
  const ComplexAmplitude b1_detuned = roundtrip_amplitude(1, 1.0, 0.999, 0.3);
  EXPECT_NEAR(std::arg(b1_detuned), 0.3, 1e-15);
  EXPECT_NEAR(std::abs(b1_detuned), b1.real(), 1e-18);
}

TEST(RoundtripAmplitude, SecondRoundTripScalesByR) {
  const double b2 = roundtrip_amplitude(2, 1.0, 0.5, 0.0).real();
  EXPECT_NEAR(b2, 0.5 * std::sqrt(0.5) * 0.5, 1e-15);
  EXPECT_NEAR(b2, 0.1767766952966369, 1e-15);
}

TEST(RoundtripAmplitude, LossAttenuatesEachCirculation) {
  const double r = 0.9, loss = 0.1;
  const double b3 = roundtrip_amplitude(3, 1.0, r, 0.0, loss).real();
  EXPECT_NEAR(b3, (1 - r) * std::sqrt(r) * std::pow((1 - loss) * r, 2) * (1 - loss), 1e-15);
  EXPECT_THROW((void)roundtrip_amplitude(1, 1.0, 0.9, 0.0, 1.0), ParameterError);
  EXPECT_THROW((void)roundtrip_amplitude(1, 1.0, -0.1, 0.0), ParameterError);
}

TEST(RoundtripAmplitude, SignsOnResonance) {
  for (double r : kIdentityGrid) {
    EXPECT_LE(roundtrip_amplitude(0, 1.0, r, 0.0).real(), 0.0);
    for (std::uint64_t i = 1; i < 50; ++i) {
      const ComplexAmplitude b = roundtrip_amplitude(i, 1.0, r, 0.0);
      EXPECT_GE(b.real(), 0.0);
      EXPECT_EQ(b.imag(), 0.0);
    }
  }
}

TEST(RoundtripAmplitude, PartialSumsAreLinear) {
  ComplexAmplitude previous{};
  for (std::uint64_t n = 0; n < 40; ++n) {
    ComplexAmplitude sum{};
    for (std::uint64_t i = 0; i <= n; ++i) sum += roundtrip_amplitude(i, 1.0, 0.8, 0.4);
    EXPECT_EQ(sum, previous + roundtrip_amplitude(n, 1.0, 0.8, 0.4));
    previous = sum;
  }
}

TEST(EfficiencyClosedForm, ZeroRoundTripsIsOne) {
  // The bracket is R^0 - 1 + (empty sum) = 0.
  for (double r : kIdentityGrid) {
    EXPECT_EQ(exact_closed_form(r, 0), 1);
    EXPECT_EQ(efficiency_closed_form(r, 0), 1.0);
  }
}

TEST(EfficiencyClosedForm, MatchesExactRationalEvaluation) {
  for (double r : {0.25, 0.5, 0.75, 0.9, 0.95, 0.999}) {
    const cpp_rational rr(r);
    for (unsigned n = 0; n <= 40; ++n) {
      const cpp_rational exact = exact_closed_form(r, n);
      // The printed formula collapses to R^{2n} exactly.
      cpp_rational power = 1;
      for (unsigned k = 0; k < 2 * n; ++k) power *= rr;
      ASSERT_EQ(exact, power) << "R=" << r << " n=" << n;
      const double expected = static_cast<double>(exact);
      EXPECT_NEAR(efficiency_closed_form(r, n), expected, expected * 1e-15) << "R=" << r << " n=" << n;
    }
  }
}

TEST(EfficiencyClosedForm, FigureValues) {
  EXPECT_NEAR(efficiency_closed_form(0.95, 100), 3.5e-5, 0.05e-5);
  EXPECT_NEAR(efficiency_closed_form(0.995, 1000), 4.4e-5, 0.05e-5);
  EXPECT_NEAR(efficiency_closed_form(0.999, 10013), 2e-9, 0.05e-9);
  EXPECT_EQ(efficiency_closed_form(1.0, 1234), 1.0);
  EXPECT_EQ(efficiency_closed_form(0.0, 5), 0.0);
  EXPECT_THROW((void)efficiency_closed_form(1.01, 5), ParameterError);
}

TEST(EfficiencyClosedForm, IdentityGrid) {
  const std::vector<EfficiencyRow> rows = efficiency_sweep(kIdentityGrid, 2000);
  for (const EfficiencyRow& row : rows) {
    const double closed = std::pow(row.reflectivity, 2.0 * static_cast<double>(row.n));
    const double brute = std::pow(row.reflectivity, 2.0 * static_cast<double>(row.n) + 1.0);
    ASSERT_NEAR(row.eta_closed_form, closed, 1e-12) << "R=" << row.reflectivity << " n=" << row.n;
    ASSERT_NEAR(row.eta_brute_force, brute, 1e-12) << "R=" << row.reflectivity << " n=" << row.n;
  }
}

TEST(EfficiencyClosedForm, RelativeAccuracyFarBelowDoubleEpsilon) {
  // The verbatim sum cancels down to R^{2n}; the result must still carry
  // full relative precision where a double evaluation would be pure noise.
  for (double r : figure_reflectivities()) {
    for (std::uint64_t n : {0ULL, 1ULL, 10ULL, 500ULL, 1999ULL}) {
      const double expected = std::pow(r, 2.0 * static_cast<double>(n));
      EXPECT_NEAR(efficiency_closed_form(r, n), expected, expected * 1e-13) << r << " " << n;
      const double brute = std::pow(r, 2.0 * static_cast<double>(n) + 1.0);
      EXPECT_NEAR(efficiency_brute_force(r, n), brute, brute * 1e-13) << r << " " << n;
    }
  }
}

TEST(EfficiencyClosedForm, Monotone) {
  const std::vector<double> rs{0.0, 0.25, 0.5, 0.9, 0.95, 0.99, 0.995, 0.999, 1.0};
  const std::vector<EfficiencyRow> rows = efficiency_sweep(rs, 600);
  const std::size_t per_r = 601;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    for (std::size_t n = 1; n < per_r; ++n) {
      EXPECT_LE(rows[k * per_r + n].eta_closed_form, rows[k * per_r + n - 1].eta_closed_form);
    }
  }
  for (std::size_t n = 1; n < per_r; ++n) {
    for (std::size_t k = 1; k < rs.size(); ++k) {
      EXPECT_GE(rows[k * per_r + n].eta_closed_form, rows[(k - 1) * per_r + n].eta_closed_form);
    }
  }
}

TEST(EfficiencyBruteForce, Examples) {
  EXPECT_EQ(efficiency_brute_force(1.0, 77), 1.0);
  EXPECT_EQ(efficiency_brute_force(0.0, 0), 0.0);
  EXPECT_EQ(efficiency_brute_force(0.0, 9), 0.0);
  EXPECT_NEAR(efficiency_brute_force(0.95, 100), std::pow(0.95, 201), 1e-18);
  EXPECT_NEAR(efficiency_brute_force(0.95, 100), 3.3e-5, 0.05e-5);
}

TEST(EfficiencyBruteForce, AgreesWithDoubleAmplitudeSumOffResonance) {
  // Off resonance there is no deep cancellation, so a plain double sum of
  // roundtrip_amplitude is an adequate second route.
  for (double psi : {0.1, 1.0, 2.5}) {
    for (double loss : {0.0, 0.003}) {
      ComplexAmplitude sum{};
      for (std::uint64_t i = 0; i <= 300; ++i) sum += roundtrip_amplitude(i, 1.0, 0.97, psi, loss);
      EXPECT_NEAR(efficiency_brute_force(0.97, 300, psi, loss), std::norm(sum), 1e-13);
    }
  }
}

TEST(EfficiencyBruteForce, FactorRDiscrepancyWithClosedForm) {
  for (double r : {0.5, 0.9, 0.99}) {
    for (std::uint64_t n : {1ULL, 5ULL, 50ULL}) {
      EXPECT_NEAR(efficiency_brute_force(r, n) / efficiency_closed_form(r, n), r, 1e-13);
    }
  }
}

TEST(EfficiencySweep, ShapeAndBoundaries) {
  const std::vector<double> rs{0.9, 1.0};
  const std::vector<EfficiencyRow> rows = efficiency_sweep(rs, 10);
  ASSERT_EQ(rows.size(), 22U);
  EXPECT_EQ(rows[0].n, 0U);
  EXPECT_EQ(rows[0].eta_closed_form, 1.0);
  EXPECT_EQ(rows[11].reflectivity, 1.0);
  for (std::size_t i = 11; i < 22; ++i) {
    EXPECT_EQ(rows[i].eta_closed_form, 1.0);
    EXPECT_EQ(rows[i].eta_brute_force, 1.0);
  }
  EXPECT_TRUE(efficiency_sweep({}, 10).empty());
  EXPECT_THROW((void)efficiency_sweep(rs, 0), ParameterError);
}

TEST(EfficiencySweep, FigureRowAt1000) {
  const std::vector<double> rs{0.995};
  const std::vector<EfficiencyRow> rows = efficiency_sweep(rs, 1000);
  EXPECT_NEAR(rows[1000].eta_closed_form, 4.4e-5, 0.05e-5);
}

TEST(EfficiencySweep, ParallelMatchesSerialReference) {
  const std::vector<double> rs{0.3, 0.95, 0.999};
  EXPECT_EQ(efficiency_sweep(rs, 300), serial::efficiency_sweep(rs, 300));
}

TEST(Feasibility, CoherenceBudget) {
  EXPECT_EQ(max_round_trips_from_coherence(3e5, 0.04), 7'500'000U);
  EXPECT_EQ(max_round_trips_from_coherence(0.04, 0.04), 1U);
  EXPECT_EQ(max_round_trips_from_coherence(0.02, 0.04), 0U);
  EXPECT_THROW((void)max_round_trips_from_coherence(0.0, 0.04), ParameterError);
  EXPECT_THROW((void)max_round_trips_from_coherence(1.0, -1.0), ParameterError);
}

TEST(Feasibility, RoundTripTime) {
  EXPECT_NEAR(round_trip_time(0.04, 1.0), 1.334e-10, 0.001e-10);
  EXPECT_NEAR(round_trip_time(0.04, 1.5), 2.001e-10, 0.001e-10);
  EXPECT_THROW((void)round_trip_time(0.04, 0.5), ParameterError);
  EXPECT_THROW((void)round_trip_time(0.0, 1.0), ParameterError);

  for (double index : {1.0, 1.5}) {
    const PulseFeasibility f = pulse_feasibility(250e-12, 0.04, index);
    EXPECT_TRUE(f.feasible);
    EXPECT_GE(f.pulse_to_round_trip_ratio, 1.0);
  }
  EXPECT_NEAR(pulse_feasibility(250e-12, 0.04, 1.0).pulse_to_round_trip_ratio, 1.87, 0.005);
  EXPECT_FALSE(pulse_feasibility(100e-12, 0.04, 1.5).feasible);
}

}  // namespace
}  // namespace motirr
