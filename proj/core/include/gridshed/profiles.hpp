#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridshed {

// Thrown on malformed input or broken type invariants. The CLI maps it to
// exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Uniform sampling grid: start instant (unix seconds, UTC), step, count.
struct TimeGrid {
  std::int64_t start_unix_s = 0;
  std::int64_t step_s = 3600;
  std::size_t count = 0;

  double step_hours() const { return static_cast<double>(step_s) / 3600.0; }
  double span_hours() const { return step_hours() * static_cast<double>(count); }

  bool operator==(const TimeGrid&) const = default;

  void validate() const;
};

/// Power samples in MW on a TimeGrid. Values are nonnegative and finite.
struct PowerSeries {
  TimeGrid grid;
  std::vector<double> values_mw;

  void validate() const;
  double max_mw() const;
};

/// Unserved power in MW. Same layout as PowerSeries but kept as a distinct
/// type so dispatch and integration signatures stay unambiguous.
struct SheddingSeries {
  TimeGrid grid;
  std::vector<double> values_mw;

  void validate() const;
  double max_mw() const;
};

/// Available capacity and predicted demand over one event window, on a
/// shared grid.
struct EventProfile {
  PowerSeries capacity;
  PowerSeries demand;

  void validate() const;
};

struct EnergyQuantity {
  double mwh = 0.0;
};

/// Column mapping for profile CSV input. When `gigawatts` is set the value
/// columns are read as GW and converted to MW.
struct CsvSchema {
  std::string timestamp_column = "timestamp";
  std::string capacity_column = "capacity_mw";
  std::string demand_column = "demand_mw";
  bool gigawatts = false;
};

// CSV ingestion. Lines starting with '#' are treated as comments.
// Timestamps must be ISO-8601 UTC, strictly increasing with uniform spacing.
EventProfile load_profile(std::istream& source, const CsvSchema& schema = {});
EventProfile load_profile_file(const std::string& path, const CsvSchema& schema = {});

// Writes the standard profile CSV (header + '#' provenance comments first).
void write_profile_csv(std::ostream& out, const EventProfile& profile,
                       const std::vector<std::string>& comments = {});

// Piecewise-constant resampling. Downsampling averages blocks of samples,
// upsampling repeats them; the time integral is preserved in both
// directions. The new step must evenly divide or be an even multiple of the
// current one.
PowerSeries resample(const PowerSeries& series, std::int64_t new_step_s);

// Adequacy shedding s(t) = max(0, L(t) - G(t)).
SheddingSeries compute_shedding(const EventProfile& profile);

// Shedding against a post-shed (served) load; served must not exceed
// predicted demand pointwise and must share the profile grid.
SheddingSeries compute_shedding(const EventProfile& profile,
                                const PowerSeries& served_demand);

// Energy-Not-Served: rectangle-rule integral of shedding, in MWh.
EnergyQuantity compute_ens(const SheddingSeries& shedding);

std::int64_t parse_iso8601_utc(const std::string& text);
std::string format_iso8601_utc(std::int64_t unix_s);

}  // namespace gridshed
