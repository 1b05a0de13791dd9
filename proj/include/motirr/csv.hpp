#pragma once

// CSV emission for sweep tables, trial batches and fringe patterns. Numbers
// use the shortest decimal form that parses back to the same double, so
// outputs are byte-stable and lossless.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motirr/detection.hpp"
#include "motirr/resonator.hpp"
#include "motirr/welcher_weg.hpp"

namespace motirr::csv {

[[nodiscard]] std::string format_double(double value);
[[nodiscard]] double parse_double(std::string_view text);

void write_efficiency_sweep(std::ostream& out, std::span<const EfficiencyRow> rows);

/// trial_index,truth,decision,photons_sent,photons_absorbed,windows
void write_trials(std::ostream& out, std::span<const TrialRecord> trials, std::uint64_t first_index = 0);
void write_protocol_summary(std::ostream& out, const ProtocolSummary& summary);

/// mode,p_tag,n_atoms,bin_center,count; patterns are stacked in order.
void write_fringe_patterns(std::ostream& out, std::span<const FringePattern> patterns);
/// mode,p_tag,n_atoms,visibility,visibility_raw,standard_error
void write_visibility_summary(std::ostream& out, std::span<const FringePattern> patterns,
                              std::span<const VisibilityEstimate> estimates);

[[nodiscard]] std::string_view to_string(MonitoringMode mode);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; throws ContractViolation when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// Reads a plain CSV (no quoting), skipping blank lines and lines starting with '#'.
[[nodiscard]] Table read(std::istream& in);

}  // namespace motirr::csv
