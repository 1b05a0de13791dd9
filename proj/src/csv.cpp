#include "motirr/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "motirr/errors.hpp"

namespace motirr::csv {

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) throw ContractViolation("failed to format a double");
  return {buffer, end};
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ParameterError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string_view to_string(MonitoringMode mode) {
  return mode == MonitoringMode::monitored ? "monitored" : "unmonitored";
}

void write_efficiency_sweep(std::ostream& out, std::span<const EfficiencyRow> rows) {
  out << "R,n,eta_closed_form,eta_brute_force\n";
  for (const EfficiencyRow& row : rows) {
    out << format_double(row.reflectivity) << ',' << row.n << ',' << format_double(row.eta_closed_form) << ','
        << format_double(row.eta_brute_force) << '\n';
  }
}

void write_trials(std::ostream& out, std::span<const TrialRecord> trials, std::uint64_t first_index) {
  out << "trial_index,truth,decision,photons_sent,photons_absorbed,windows\n";
  std::uint64_t index = first_index;
  for (const TrialRecord& t : trials) {
    out << index++ << ',' << (t.object_present ? "present" : "absent") << ',' << to_string(t.decision) << ','
        << t.photons_sent << ',' << t.photons_absorbed_by_object << ',' << t.elapsed_windows << '\n';
  }
}

void write_protocol_summary(std::ostream& out, const ProtocolSummary& s) {
  out << "trials,misclassification_rate,inconclusive_rate,energy_exchange_free_fraction,mean_photons_absorbed,"
         "max_photons_absorbed,mean_windows,first_event_dr_rate\n";
  out << s.trials << ',' << format_double(s.misclassification_rate) << ',' << format_double(s.inconclusive_rate)
      << ',' << (s.energy_exchange_free_fraction ? format_double(*s.energy_exchange_free_fraction) : "") << ','
      << format_double(s.mean_photons_absorbed) << ',' << s.max_photons_absorbed << ','
      << format_double(s.mean_windows) << ',' << format_double(s.first_event_dr_rate) << '\n';
}

void write_fringe_patterns(std::ostream& out, std::span<const FringePattern> patterns) {
  out << "mode,p_tag,n_atoms,bin_center,count\n";
  for (const FringePattern& p : patterns) {
    const std::vector<double> centers = p.bin_centers();
    for (std::size_t i = 0; i < p.counts.size(); ++i) {
      out << to_string(p.mode) << ',' << format_double(p.tagging_probability) << ',' << p.n_atoms << ','
          << format_double(centers[i]) << ',' << p.counts[i] << '\n';
    }
  }
}

void write_visibility_summary(std::ostream& out, std::span<const FringePattern> patterns,
                              std::span<const VisibilityEstimate> estimates) {
  if (patterns.size() != estimates.size()) throw ContractViolation("one visibility estimate per pattern");
  out << "mode,p_tag,n_atoms,visibility,visibility_raw,standard_error\n";
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    out << to_string(patterns[i].mode) << ',' << format_double(patterns[i].tagging_probability) << ','
        << patterns[i].n_atoms << ',' << format_double(estimates[i].value) << ','
        << format_double(estimates[i].raw) << ',' << format_double(estimates[i].standard_error) << '\n';
  }
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ContractViolation("missing column '" + std::string(name) + "'");
}

Table read(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
  };

  Table table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      table.header = split(line);
      have_header = true;
    } else {
      table.rows.push_back(split(line));
    }
  }
  return table;
}

}  // namespace motirr::csv
