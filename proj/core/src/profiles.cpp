#include "gridshed/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gridshed {

namespace {

void check_nonnegative_finite(const std::vector<double>& values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError(std::string(what) + ": non-finite value at index " +
                            std::to_string(i));
    }
    if (values[i] < 0.0) {
      throw ValidationError(std::string(what) + ": negative value at index " +
                            std::to_string(i));
    }
  }
}

double max_of(const std::vector<double>& values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += m <= 2;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void TimeGrid::validate() const {
  if (step_s <= 0) throw ValidationError("TimeGrid: step must be positive");
  if (count < 2) throw ValidationError("TimeGrid: count must be at least 2");
}

void PowerSeries::validate() const {
  grid.validate();
  if (values_mw.size() != grid.count) {
    throw ValidationError("PowerSeries: value count " + std::to_string(values_mw.size()) +
                          " does not match grid count " + std::to_string(grid.count));
  }
  check_nonnegative_finite(values_mw, "PowerSeries");
}

double PowerSeries::max_mw() const { return max_of(values_mw); }

void SheddingSeries::validate() const {
  grid.validate();
  if (values_mw.size() != grid.count) {
    throw ValidationError("SheddingSeries: value count does not match grid count");
  }
  check_nonnegative_finite(values_mw, "SheddingSeries");
}

double SheddingSeries::max_mw() const { return max_of(values_mw); }

void EventProfile::validate() const {
  capacity.validate();
  demand.validate();
  if (!(capacity.grid == demand.grid)) {
    throw ValidationError("EventProfile: capacity and demand grids differ");
  }
}

std::int64_t parse_iso8601_utc(const std::string& text) {
  int year = 0, mon = 0, day = 0, hour = 0, min = 0, sec = 0;
  char suffix = '\0';
  const int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%c", &year, &mon, &day,
                            &hour, &min, &sec, &suffix);
  const bool ok = (n == 6 && suffix == '\0') || (n == 7 && suffix == 'Z');
  if (!ok || mon < 1 || mon > 12 || day < 1 || day > 31 || hour > 23 || min > 59 ||
      sec > 60 || hour < 0 || min < 0 || sec < 0) {
    throw ValidationError("invalid ISO-8601 UTC timestamp: '" + text + "'");
  }
  return days_from_civil(year, static_cast<unsigned>(mon), static_cast<unsigned>(day)) *
             86400 +
         hour * 3600 + min * 60 + sec;
}

std::string format_iso8601_utc(std::int64_t unix_s) {
  std::int64_t days = unix_s / 86400;
  std::int64_t rem = unix_s % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem % 3600) / 60), static_cast<long long>(rem % 60));
  return buf;
}

EventProfile load_profile(std::istream& source, const CsvSchema& schema) {
  std::string line;
  std::size_t line_no = 0;

  // header
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw ValidationError("profile CSV: missing header row");

  auto column_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ValidationError("profile CSV: missing column '" + name + "'");
  };
  const std::size_t ts_col = column_index(schema.timestamp_column);
  const std::size_t cap_col = column_index(schema.capacity_column);
  const std::size_t dem_col = column_index(schema.demand_column);
  const double to_mw = schema.gigawatts ? 1000.0 : 1.0;

  std::vector<std::int64_t> stamps;
  std::vector<double> capacity, demand;

  auto parse_value = [&](const std::string& text, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != text.size() || text.empty()) {
      throw ValidationError("profile CSV line " + std::to_string(line_no) +
                            ": unparseable " + what + " value '" + text + "'");
    }
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("profile CSV line " + std::to_string(line_no) +
                            ": negative or non-finite " + what + " value '" + text + "'");
    }
    return v;
  };

  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ValidationError("profile CSV line " + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size()) +
                            " fields, got " + std::to_string(fields.size()));
    }
    std::int64_t ts;
    try {
      ts = parse_iso8601_utc(fields[ts_col]);
    } catch (const ValidationError& e) {
      throw ValidationError("profile CSV line " + std::to_string(line_no) + ": " + e.what());
    }
    stamps.push_back(ts);
    capacity.push_back(parse_value(fields[cap_col], "capacity") * to_mw);
    demand.push_back(parse_value(fields[dem_col], "demand") * to_mw);
  }

  if (stamps.size() < 2) throw ValidationError("profile CSV: need at least 2 rows");
  const std::int64_t step = stamps[1] - stamps[0];
  if (step <= 0) throw ValidationError("profile CSV: timestamps not strictly increasing");
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    if (stamps[i] - stamps[i - 1] != step) {
      throw ValidationError("profile CSV: non-uniform timestamp spacing at row " +
                            std::to_string(i + 1));
    }
  }

  TimeGrid grid{stamps.front(), step, stamps.size()};
  EventProfile profile{PowerSeries{grid, std::move(capacity)},
                       PowerSeries{grid, std::move(demand)}};
  profile.validate();
  return profile;
}

EventProfile load_profile_file(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open profile file: " + path);
  return load_profile(in, schema);
}

void write_profile_csv(std::ostream& out, const EventProfile& profile,
                       const std::vector<std::string>& comments) {
  profile.validate();
  for (const auto& c : comments) out << "# " << c << "\n";
  out << "timestamp,capacity_mw,demand_mw\n";
  const TimeGrid& grid = profile.capacity.grid;
  char buf[64];
  for (std::size_t i = 0; i < grid.count; ++i) {
    const std::int64_t ts = grid.start_unix_s + static_cast<std::int64_t>(i) * grid.step_s;
    out << format_iso8601_utc(ts);
    std::snprintf(buf, sizeof(buf), ",%.6g,%.6g", profile.capacity.values_mw[i],
                  profile.demand.values_mw[i]);
    out << buf << "\n";
  }
}

PowerSeries resample(const PowerSeries& series, std::int64_t new_step_s) {
  series.validate();
  if (new_step_s <= 0) throw ValidationError("resample: step must be positive");
  const std::int64_t step = series.grid.step_s;
  if (new_step_s == step) return series;

  std::vector<double> out;
  if (new_step_s > step) {
    if (new_step_s % step != 0) {
      throw ValidationError("resample: new step is not a multiple of the current step");
    }
    const std::size_t factor = static_cast<std::size_t>(new_step_s / step);
    if (series.grid.count % factor != 0) {
      throw ValidationError("resample: sample count not divisible by the step ratio");
    }
    out.reserve(series.grid.count / factor);
    for (std::size_t i = 0; i < series.grid.count; i += factor) {
      double sum = 0.0;
      for (std::size_t j = 0; j < factor; ++j) sum += series.values_mw[i + j];
      out.push_back(sum / static_cast<double>(factor));
    }
  } else {
    if (step % new_step_s != 0) {
      throw ValidationError("resample: current step is not a multiple of the new step");
    }
    const std::size_t factor = static_cast<std::size_t>(step / new_step_s);
    out.reserve(series.grid.count * factor);
    for (double v : series.values_mw) {
      for (std::size_t j = 0; j < factor; ++j) out.push_back(v);
    }
  }
  PowerSeries result{TimeGrid{series.grid.start_unix_s, new_step_s, out.size()},
                     std::move(out)};
  result.validate();
  return result;
}

SheddingSeries compute_shedding(const EventProfile& profile) {
  return compute_shedding(profile, profile.demand);
}

SheddingSeries compute_shedding(const EventProfile& profile,
                                const PowerSeries& served_demand) {
  profile.validate();
  served_demand.validate();
  if (!(served_demand.grid == profile.capacity.grid)) {
    throw ValidationError("compute_shedding: served demand grid does not match profile");
  }
  SheddingSeries shedding{profile.capacity.grid, {}};
  shedding.values_mw.reserve(profile.capacity.grid.count);
  for (std::size_t i = 0; i < profile.capacity.grid.count; ++i) {
    const double served = served_demand.values_mw[i];
    if (served > profile.demand.values_mw[i]) {
      throw ValidationError("compute_shedding: served demand exceeds predicted demand at index " +
                            std::to_string(i));
    }
    shedding.values_mw.push_back(std::max(0.0, served - profile.capacity.values_mw[i]));
  }
  return shedding;
}

EnergyQuantity compute_ens(const SheddingSeries& shedding) {
  shedding.validate();
  const double dt_h = shedding.grid.step_hours();
  double sum = 0.0;
  for (double s : shedding.values_mw) sum += s * dt_h;
  return EnergyQuantity{sum};
}

}  // namespace gridshed
