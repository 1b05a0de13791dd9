#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>

#include "big_float.hpp"
#include "motirr/errors.hpp"
#include "motirr/resonator.hpp"

namespace motirr {

namespace detail {

mpfr_prec_t cancellation_precision(double reflectivity, std::uint64_t exponent, std::uint64_t terms) {
  constexpr double kCapBits = 1100.0;  // below 2^-1074 a double result is zero anyway
  constexpr mpfr_prec_t kGuardBits = 64;
  double bits = 0.0;
  if (reflectivity > 0.0 && reflectivity < 1.0) {
    bits = std::min(kCapBits, static_cast<double>(exponent) * -std::log2(reflectivity));
  } else if (reflectivity == 0.0 && exponent > 0) {
    bits = kCapBits;
  }
  const auto term_bits = static_cast<mpfr_prec_t>(std::bit_width(terms + 1));
  return static_cast<mpfr_prec_t>(std::ceil(bits)) + kGuardBits + term_bits;
}

}  // namespace detail

namespace {

using detail::BigFloat;

double clamp_unit(double eta) {
  constexpr double kSlack = 1e-12;
  if (eta < -kSlack || eta > 1.0 + kSlack) {
    throw ContractViolation("efficiency left [0, 1] beyond numerical slack");
  }
  return std::clamp(eta, 0.0, 1.0);
}

}  // namespace

double efficiency_closed_form(double reflectivity, std::uint64_t n) {
  check_reflectivity(reflectivity);
  const mpfr_prec_t prec = detail::cancellation_precision(reflectivity, 2 * n, n);

  const BigFloat r(prec, reflectivity);
  const BigFloat one(prec, 1.0);

  // (1-R)/(1+R)
  BigFloat prefactor(prec), denom(prec);
  sub(prefactor, one, r);
  add(denom, one, r);
  div(prefactor, prefactor, denom);

  // sum_{j=1..n} (1 + R^{2n-2j+1}) R^{j-1}
  BigFloat sum(prec), low(prec, 1.0), high(prec), term(prec), r_squared(prec);
  mul(r_squared, r, r);
  if (n > 0) ui_pow(high, r, 2 * n - 1);
  for (std::uint64_t j = 1; j <= n; ++j) {
    add(term, one, high);
    mul(term, term, low);
    add(sum, sum, term);
    mul(low, low, r);
    if (!r_squared.is_zero()) div(high, high, r_squared);
  }

  // R^{2n} - 1 + 2 sum
  BigFloat bracket(prec);
  ui_pow(bracket, r, 2 * n);
  sub(bracket, bracket, one);
  add(bracket, bracket, sum);
  add(bracket, bracket, sum);

  BigFloat eta(prec);
  mul(eta, prefactor, bracket);
  sub(eta, one, eta);
  return clamp_unit(eta.to_double());
}

double efficiency_brute_force(double reflectivity, std::uint64_t n, double psi, double loss) {
  check_reflectivity(reflectivity);
  check_loss(loss);
  const mpfr_prec_t prec = detail::cancellation_precision(reflectivity, 2 * n + 1, n);

  const BigFloat r(prec, reflectivity);
  const BigFloat keep(prec, 1.0 - loss);
  BigFloat root_r(prec), cos_psi(prec), sin_psi(prec);
  sqrt(root_r, r);
  sin_cos(sin_psi, cos_psi, BigFloat(prec, psi));

  // B_0 = -sqrt(R)
  BigFloat sum_re(prec), sum_im(prec);
  mpfr_neg(sum_re.get(), root_r.get(), MPFR_RNDN);

  // B_1 = (1-R) sqrt(R) (1-loss) e^{i psi}; B_{i+1} = B_i (1-loss) R e^{i psi}
  BigFloat magnitude(prec, 1.0);
  BigFloat one_minus_r(prec);
  sub(one_minus_r, magnitude, r);
  mul(magnitude, one_minus_r, root_r);
  mul(magnitude, magnitude, keep);
  BigFloat term_re(prec), term_im(prec);
  mul(term_re, magnitude, cos_psi);
  mul(term_im, magnitude, sin_psi);

  BigFloat ratio_mag(prec), ratio_re(prec), ratio_im(prec);
  mul(ratio_mag, keep, r);
  mul(ratio_re, ratio_mag, cos_psi);
  mul(ratio_im, ratio_mag, sin_psi);

  BigFloat next_re(prec), next_im(prec), scratch(prec);
  for (std::uint64_t i = 1; i <= n; ++i) {
    add(sum_re, sum_re, term_re);
    add(sum_im, sum_im, term_im);
    if (i == n) break;
    mul(next_re, term_re, ratio_re);
    mul(scratch, term_im, ratio_im);
    sub(next_re, next_re, scratch);
    mul(next_im, term_re, ratio_im);
    mul(scratch, term_im, ratio_re);
    add(next_im, next_im, scratch);
    term_re = next_re;
    term_im = next_im;
  }

  BigFloat intensity(prec);
  mul(intensity, sum_re, sum_re);
  mul(scratch, sum_im, sum_im);
  add(intensity, intensity, scratch);
  return clamp_unit(intensity.to_double());
}

std::vector<double> figure_reflectivities() { return {0.95, 0.99, 0.995, 0.997, 0.998}; }

namespace {

void validate_sweep(std::span<const double> reflectivities, std::uint64_t n_max) {
  if (!reflectivities.empty() && n_max < 1) throw ParameterError("n_max must be at least 1");
  for (double r : reflectivities) check_reflectivity(r);
}

EfficiencyRow evaluate_row(std::span<const double> reflectivities, std::uint64_t n_max, std::size_t index) {
  const std::size_t per_r = static_cast<std::size_t>(n_max) + 1;
  const double r = reflectivities[index / per_r];
  const std::uint64_t n = index % per_r;
  return {r, n, efficiency_closed_form(r, n), efficiency_brute_force(r, n)};
}

}  // namespace

std::vector<EfficiencyRow> efficiency_sweep(std::span<const double> reflectivities, std::uint64_t n_max) {
  validate_sweep(reflectivities, n_max);
  const std::size_t rows = reflectivities.size() * (static_cast<std::size_t>(n_max) + 1);
  std::vector<EfficiencyRow> table(rows);
  const auto count = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    table[static_cast<std::size_t>(i)] = evaluate_row(reflectivities, n_max, static_cast<std::size_t>(i));
  }
  return table;
}

namespace serial {

std::vector<EfficiencyRow> efficiency_sweep(std::span<const double> reflectivities, std::uint64_t n_max) {
  validate_sweep(reflectivities, n_max);
  std::vector<EfficiencyRow> table;
  table.reserve(reflectivities.size() * (static_cast<std::size_t>(n_max) + 1));
  for (double r : reflectivities) {
    for (std::uint64_t n = 0; n <= n_max; ++n) {
      table.push_back({r, n, efficiency_closed_form(r, n), efficiency_brute_force(r, n)});
    }
  }
  return table;
}

}  // namespace serial

}  // namespace motirr
