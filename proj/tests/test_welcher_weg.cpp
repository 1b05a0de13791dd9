#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "motirr/constants.hpp"
#include "motirr/errors.hpp"
#include "motirr/welcher_weg.hpp"

namespace motirr {
namespace {

constexpr double kPi = std::numbers::pi;

// Textbook Fraunhofer two-slit intensity, written out independently.
double textbook_two_slit(double x, double wavelength, double d, double a, double z) {
  const double beta = kPi * a * x / (wavelength * z);
  const double envelope = beta == 0.0 ? 1.0 : std::pow(std::sin(beta) / beta, 2);
  return envelope * std::pow(std::cos(kPi * d * x / (wavelength * z)), 2);
}

double textbook_envelope(double x, double wavelength, double a, double z) {
  const double beta = kPi * a * x / (wavelength * z);
  return beta == 0.0 ? 1.0 : std::pow(std::sin(beta) / beta, 2);
}

PathMonitor monitor_with(double p_tag) {
  PathMonitor m;
  m.tagging_probability = p_tag;
  return m;
}

TEST(DeBroglie, NeonAtScreenSpeed) {
  EXPECT_NEAR(de_broglie_wavelength(3.321e-26, 2.0), 9.98e-9, 0.01e-9);
  EXPECT_DOUBLE_EQ(de_broglie_wavelength(constants::neon20_mass, 2.0),
                   constants::planck / (constants::neon20_mass * 2.0));
}

TEST(DeBroglie, Scaling) {
  const double m = constants::neon20_mass;
  EXPECT_NEAR(de_broglie_wavelength(m, 4.0), 0.5 * de_broglie_wavelength(m, 2.0), 1e-24);
  EXPECT_NEAR(de_broglie_wavelength(2 * m, 1.0), de_broglie_wavelength(m, 2.0), 1e-24);
  EXPECT_THROW((void)de_broglie_wavelength(0.0, 2.0), ParameterError);
  EXPECT_THROW((void)de_broglie_wavelength(m, -1.0), ParameterError);
}

TEST(FringeIntensity, CentralMaximumAndFirstZero) {
  const DoubleSlitGeometry g;
  const VelocityGroup v;
  EXPECT_EQ(fringe_intensity(0.0, g, v), 1.0);
  const double lambda = de_broglie_wavelength(v.mass, v.speed_at_screen);
  const double first_zero = lambda * g.screen_distance / (2 * g.slit_separation);
  EXPECT_NEAR(fringe_intensity(first_zero, g, v), 0.0, 1e-20);
  for (double x = -3e-3; x <= 3e-3; x += 1e-5) EXPECT_LE(fringe_intensity(x, g, v), 1.0);
}

TEST(FringeIntensity, WithoutGravityMatchesTextbook) {
  DoubleSlitGeometry g;
  g.gravity = 0.0;
  VelocityGroup v;
  v.initial_speed = 1.7;
  EXPECT_EQ(gravity_correction_factor(v, g), 1.0);
  const double lambda = constants::planck / (v.mass * 1.7);
  for (double x = -5e-3; x <= 5e-3; x += 1.37e-5) {
    EXPECT_NEAR(fringe_intensity(x, g, v),
                textbook_two_slit(x, lambda, g.slit_separation, g.slit_width, g.screen_distance), 1e-12);
  }
}

TEST(FringeIntensity, GravityCorrectionUsesScreenSpeed) {
  const DoubleSlitGeometry g;
  VelocityGroup v;
  v.initial_speed = 2.0 - g.gravity * v.fall_time;
  EXPECT_NEAR(screen_speed(v, g), 2.0, 1e-15);
  EXPECT_NEAR(gravity_correction_factor(v, g), 2.0 / 1.019, 1e-12);
  VelocityGroup plain;
  for (double x : {1e-4, 7e-4, 2.2e-3}) {
    EXPECT_NEAR(fringe_intensity(x, g, v), fringe_intensity(x, g, plain), 1e-12);
  }
}

TEST(Geometry, Validation) {
  DoubleSlitGeometry g;
  g.slit_width = g.slit_separation;
  EXPECT_THROW(g.validate(), ParameterError);
  g = {};
  g.screen_distance = 0.0;
  EXPECT_THROW(g.validate(), ParameterError);
  VelocityGroup v;
  v.fall_time = 0.0;
  EXPECT_THROW(v.validate(), ParameterError);
  PathMonitor m;
  m.tagging_probability = 1.2;
  EXPECT_THROW(m.validate(), ParameterError);
}

TEST(ArrivalDensity, IntegratesToOne) {
  const FringeModel model = FringeModel::from({}, {});
  const double w = 2 * model.envelope_zero();
  for (double tag : {0.0, 0.3, 1.0}) {
    const ArrivalDensity density(model, w, tag);
    // Split at every fringe minimum so the adaptive rule sees smooth pieces.
    double total = 0.0;
    const double step = 0.5 * model.fringe_period();
    for (double lo = -w; lo < w; lo += step) {
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(density, lo, std::min(lo + step, w), 8,
                                                                                1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-6) << "tag=" << tag;
  }
}

TEST(SimulateRun, HistogramInvariants) {
  const FringePattern p = simulate_run({}, {}, monitor_with(0.3), 20'000, 100, 11);
  EXPECT_EQ(p.counts.size(), 100U);
  EXPECT_EQ(p.bin_edges.size(), 101U);
  EXPECT_TRUE(std::is_sorted(p.bin_edges.begin(), p.bin_edges.end(), std::less_equal<>{}));
  EXPECT_EQ(std::adjacent_find(p.bin_edges.begin(), p.bin_edges.end()), p.bin_edges.end());
  std::uint64_t total = 0;
  for (auto c : p.counts) total += c;
  EXPECT_EQ(total, p.n_atoms);
  EXPECT_EQ(p.mode, MonitoringMode::monitored);
  EXPECT_EQ(p.tagging_probability, 0.3);
  EXPECT_EQ(simulate_run({}, {}, std::nullopt, 10, 10, 1).mode, MonitoringMode::unmonitored);
}

TEST(SimulateRun, Preconditions) {
  EXPECT_THROW((void)simulate_run({}, {}, std::nullopt, 0, 100, 1), ContractViolation);
  EXPECT_THROW((void)simulate_run({}, {}, std::nullopt, 10, 1, 1), ContractViolation);
}

TEST(SimulateRun, ParallelMatchesSerialReference) {
  const PathMonitor m = monitor_with(0.4);
  EXPECT_EQ(simulate_run({}, {}, m, 50'000, 240, 5), serial::simulate_run({}, {}, m, 50'000, 240, 5));
  EXPECT_EQ(simulate_run({}, {}, std::nullopt, 50'000, 240, 5),
            serial::simulate_run({}, {}, std::nullopt, 50'000, 240, 5));
}

TEST(SimulateRun, MixtureLawKolmogorovSmirnov) {
  const DoubleSlitGeometry g;
  const VelocityGroup v;
  const double lambda = de_broglie_wavelength(v.mass, v.speed_at_screen);
  const double w = 2 * lambda * g.screen_distance / g.slit_width;

  // Oracle CDF from the textbook densities on a fine trapezoid grid.
  constexpr std::size_t kGrid = 1 << 20;
  const double h = 2 * w / static_cast<double>(kGrid);
  std::vector<double> coh(kGrid + 1), inc(kGrid + 1);
  for (std::size_t i = 0; i <= kGrid; ++i) {
    const double x = -w + h * static_cast<double>(i);
    coh[i] = textbook_two_slit(x, lambda, g.slit_separation, g.slit_width, g.screen_distance);
    inc[i] = textbook_envelope(x, lambda, g.slit_width, g.screen_distance);
  }
  auto cumulative = [&](const std::vector<double>& f) {
    std::vector<double> c(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) c[i] = c[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    for (double& value : c) value /= c.back();
    return c;
  };
  const std::vector<double> cdf_coh = cumulative(coh);
  const std::vector<double> cdf_inc = cumulative(inc);

  for (double alpha : {0.0, 0.5, 1.0}) {
    const std::size_t n = 100'000;
    std::vector<double> xs = sample_arrivals(g, v, monitor_with(alpha), n, 77);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double pos = (xs[k] + w) / h;
      const auto i = std::min<std::size_t>(kGrid - 1, static_cast<std::size_t>(pos));
      const double t = pos - static_cast<double>(i);
      auto interp = [&](const std::vector<double>& c) { return c[i] + t * (c[i + 1] - c[i]); };
      const double f = alpha * interp(cdf_inc) + (1 - alpha) * interp(cdf_coh);
      ks = std::max({ks, std::abs(f - static_cast<double>(k) / n), std::abs(f - static_cast<double>(k + 1) / n)});
    }
    EXPECT_LT(ks, 1.628 / std::sqrt(static_cast<double>(n))) << "alpha=" << alpha;
  }
}

TEST(Visibility, AnalyticPatterns) {
  const FringeModel model = FringeModel::from({}, {});
  const FringePattern shape = simulate_run({}, {}, std::nullopt, 10, 240, 0);
  const std::vector<double> coherent = bin_probabilities(model, shape.bin_edges, 0.0);
  const std::vector<double> incoherent = bin_probabilities(model, shape.bin_edges, 1.0);
  EXPECT_EQ(visibility(model, shape.bin_edges, coherent).value, 1.0);
  EXPECT_EQ(visibility(model, shape.bin_edges, coherent).raw, 1.0);
  EXPECT_EQ(visibility(model, shape.bin_edges, incoherent).raw, 0.0);

  // Compound the two analytic densities by hand.
  std::vector<double> half(coherent.size());
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = 0.5 * coherent[i] + 0.5 * incoherent[i];
  EXPECT_NEAR(visibility(model, shape.bin_edges, half).value, 0.5, 2e-3);
  const std::vector<double> via_mixture = bin_probabilities(model, shape.bin_edges, 0.5);
  EXPECT_NEAR(visibility(model, shape.bin_edges, via_mixture).value, 0.5, 2e-3);

  const std::vector<double> flat(coherent.size(), 1.0);
  EXPECT_EQ(visibility(model, shape.bin_edges, flat).value, 0.0);
}

TEST(Visibility, SampledMixtures) {
  const std::vector<double> tags{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<VisibilityEstimate> estimates;
  for (double tag : tags) {
    const FringePattern p = simulate_run({}, {}, monitor_with(tag), 100'000, 240, 2024);
    estimates.push_back(visibility(p));
    const VisibilityEstimate& e = estimates.back();
    EXPECT_GT(e.standard_error, 0.0);
    EXPECT_NEAR(e.raw, 1.0 - tag, 3 * e.standard_error) << "p_tag=" << tag;
  }
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    const double tolerance =
        3 * std::hypot(estimates[i].standard_error, estimates[i - 1].standard_error);
    EXPECT_LE(estimates[i].value, estimates[i - 1].value + tolerance);
  }
}

TEST(Visibility, RequiresResolvedFringe) {
  const FringePattern coarse = simulate_run({}, {}, std::nullopt, 1000, 8, 1);
  EXPECT_THROW((void)visibility(coarse), ResolutionError);
  const FringeModel model = FringeModel::from({}, {});
  const FringePattern narrow =
      simulate_run({}, {}, std::nullopt, 1000, 100, 1, ScreenOptions{0.5 * model.fringe_period()});
  EXPECT_THROW((void)visibility(narrow), ResolutionError);
}

TEST(MonitoringBudget, ReportsOperatingPoint) {
  const PathMonitor monitor = monitor_with(0.5);
  const MonitoringReport r = monitoring_budget(monitor, VelocityGroup{});
  EXPECT_NEAR(r.photon_hit_probability, 9.99e-4, 1e-15);
  EXPECT_NEAR(r.photon_hit_probability, 0.001, 1e-5);
  EXPECT_GT(r.false_dr_probability, 1.8e-9);
  EXPECT_LT(r.false_dr_probability, 2.2e-9);
  EXPECT_EQ(r.minimum_cycles, 1000U);
  EXPECT_NEAR(r.minimum_wall_clock, 400.0, 1e-9);
  ASSERT_TRUE(r.expected_cycles.has_value());
  EXPECT_NEAR(*r.expected_cycles, 2000.0, 1e-9);
  EXPECT_EQ(r.counts_per_cycle.per_channel, 10'000'000U);
  EXPECT_NEAR(r.expected_false_dr_per_cycle, 0.02, 0.002);

  PathMonitor perfect;
  perfect.resonator.reflectivity = 1.0;
  EXPECT_EQ(monitoring_budget(perfect, VelocityGroup{}).photon_hit_probability, 0.0);
  EXPECT_FALSE(monitoring_budget(perfect, VelocityGroup{}).expected_cycles.has_value());
  EXPECT_NEAR(perfect.photon_hit_probability(), 0.0, 1e-12);
}

}  // namespace
}  // namespace motirr
