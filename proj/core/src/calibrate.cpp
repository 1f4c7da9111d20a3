#include "gridshed/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "gridshed/rationing.hpp"

namespace gridshed {

namespace {

// Keeps the fitted shedding ratio strictly below the zero-ENS rationing
// level so ENS at that level is exactly zero.
constexpr double kRatioMargin = 5e-4;

double interp_knots(const std::vector<Knot>& knots, double hour) {
  if (hour <= knots.front().hour) return knots.front().level_mw;
  if (hour >= knots.back().hour) return knots.back().level_mw;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (hour <= knots[i].hour) {
      const double t = (hour - knots[i - 1].hour) / (knots[i].hour - knots[i - 1].hour);
      return knots[i - 1].level_mw + t * (knots[i].level_mw - knots[i - 1].level_mw);
    }
  }
  return knots.back().level_mw;
}

void check_knots(const std::vector<Knot>& knots, const char* what) {
  if (knots.size() < 6) {
    throw ValidationError(std::string(what) + " template needs at least 6 knots");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i].level_mw < 0.0 || !std::isfinite(knots[i].level_mw)) {
      throw ValidationError(std::string(what) + " template knot level must be nonnegative");
    }
    if (i > 0 && !(knots[i].hour > knots[i - 1].hour)) {
      throw ValidationError(std::string(what) + " template knot hours must be increasing");
    }
  }
}

struct FitSurface {
  std::vector<double> demand_mw;  // rescaled demand samples
  std::vector<double> gap_ratio;  // template shedding ratio shape q0
  double dt_h = 1.0;
  double knee = 0.20;
  double ratio_cap = 0.2995;

  // ENS of the fitted ratio q = min(cap, min(knee, a*q0) + c*(q0 - knee)+)
  // under system rationing rho.
  double ens(double a, double c, double rho) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < demand_mw.size(); ++i) {
      const double q0 = gap_ratio[i];
      const double q =
          std::min(ratio_cap, std::min(knee, a * q0) + c * std::max(0.0, q0 - knee));
      sum += std::max(0.0, q - rho) * demand_mw[i] * dt_h;
    }
    return sum;
  }

  double ratio(double a, double c, std::size_t i) const {
    const double q0 = gap_ratio[i];
    return std::min(ratio_cap, std::min(knee, a * q0) + c * std::max(0.0, q0 - knee));
  }
};

// Smallest parameter in [0, hi] whose (nondecreasing) ENS reaches the target.
double bisect_to_target(const std::function<double(double)>& value, double target,
                        double hi_limit) {
  double lo = 0.0;
  double hi = hi_limit;
  if (value(hi) < target) return hi;  // unreachable; validation will flag it
  for (int iter = 0; iter < 80; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

void CalibrationTargets::validate() const {
  if (baseline_ens_mwh <= 0.0 || ens_at_knee_mwh <= 0.0 || peak_shedding_min_mw <= 0.0 ||
      peak_demand_mw <= 0.0 || capacity_outage_mw <= 0.0 || window_hours <= 0.0) {
    throw ValidationError("CalibrationTargets: all targets must be positive");
  }
  if (!(ens_at_knee_mwh < baseline_ens_mwh)) {
    throw ValidationError("CalibrationTargets: knee ENS must be below baseline ENS");
  }
  if (!(knee_rho > 0.0 && knee_rho < zero_ens_rho && zero_ens_rho <= 1.0)) {
    throw ValidationError("CalibrationTargets: need 0 < knee_rho < zero_ens_rho <= 1");
  }
}

void ProfileTemplate::validate() const {
  grid.validate();
  check_knots(demand_knots, "demand");
  check_knots(capacity_knots, "capacity");
}

ProfileTemplate ProfileTemplate::defaults() {
  ProfileTemplate tmpl;
  // Feb 15 00:00 through Feb 18 24:00, US Central (UTC-6), hourly.
  tmpl.grid = TimeGrid{parse_iso8601_utc("2021-02-15T06:00:00Z"), 3600, 96};
  tmpl.demand_knots = {
      {0, 61000},  {5, 65500},  {8, 69000},  {11, 64000}, {14, 63000}, {18, 64500},
      {24, 60500}, {30, 63000}, {32, 63500}, {38, 61500}, {44, 62500}, {48, 59000},
      {54, 61000}, {58, 58500}, {64, 55500}, {70, 58500}, {76, 60200}, {80, 61000},
      {84, 58800}, {90, 59800}, {96, 56800}};
  tmpl.capacity_knots = {
      {0, 46360},  {4, 47804},  {8, 48507},  {12, 47113}, {20, 46743}, {28, 46003},
      {36, 46625}, {44, 48750}, {50, 49523}, {56, 47800}, {60, 43700}, {64, 39017},
      {68, 43700}, {72, 50207}, {80, 53680}, {88, 54115}, {96, 53392}};
  return tmpl;
}

EventProfile calibrate_profile(const CalibrationTargets& targets,
                               const ProfileTemplate& tmpl) {
  targets.validate();
  tmpl.validate();

  const std::size_t n = tmpl.grid.count;
  const double dt_h = tmpl.grid.step_hours();

  // Template samples. The capacity template only contributes its gap shape
  // relative to the template demand; absolute levels are re-derived below.
  std::vector<double> demand(n), gap_ratio(n);
  double template_peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double hour = static_cast<double>(i) * dt_h;
    demand[i] = interp_knots(tmpl.demand_knots, hour);
    const double cap = interp_knots(tmpl.capacity_knots, hour);
    gap_ratio[i] = demand[i] > 0.0 ? std::max(0.0, 1.0 - cap / demand[i]) : 0.0;
    template_peak = std::max(template_peak, demand[i]);
  }
  if (template_peak <= 0.0) {
    throw CalibrationError("calibration infeasible: template demand is zero",
                           {"peak_demand"});
  }
  if (!tmpl.pin_demand_peak) {
    const double scale = targets.peak_demand_mw / template_peak;
    for (double& v : demand) v *= scale;
  }

  FitSurface surface;
  surface.demand_mw = demand;
  surface.gap_ratio = gap_ratio;
  surface.dt_h = dt_h;
  surface.knee = targets.knee_rho;
  surface.ratio_cap = targets.zero_ens_rho - kRatioMargin;

  // Alternating bisection on the two gap-scaling parameters: c shapes the
  // above-knee excess (knee-ENS anchor), a the below-knee base (baseline
  // ENS). Both ENS values are nondecreasing in each parameter, and the
  // iteration count is fixed, so the fit is deterministic.
  double a = 1.0, c = 1.0;
  for (int round = 0; round < 60; ++round) {
    c = bisect_to_target(
        [&](double x) { return surface.ens(a, x, targets.knee_rho); },
        targets.ens_at_knee_mwh, 4.0);
    a = bisect_to_target(
        [&](double x) { return surface.ens(x, c, 0.0); },
        targets.baseline_ens_mwh, 4.0);
  }

  std::vector<double> capacity(n);
  for (std::size_t i = 0; i < n; ++i) {
    capacity[i] = (1.0 - surface.ratio(a, c, i)) * demand[i];
  }

  EventProfile profile{PowerSeries{tmpl.grid, std::move(capacity)},
                       PowerSeries{tmpl.grid, std::move(demand)}};
  profile.validate();

  const FixtureReport report = validate_fixture(profile, targets);
  if (!report.all_passed()) {
    std::vector<std::string> violated;
    std::string message = "calibration infeasible; violated targets:";
    for (const auto& check : report.checks) {
      if (!check.passed) {
        violated.push_back(check.name);
        message += " " + check.name;
      }
    }
    throw CalibrationError(message, std::move(violated));
  }
  return profile;
}

FixtureReport validate_fixture(const EventProfile& profile,
                               const CalibrationTargets& targets) {
  targets.validate();
  profile.validate();

  FixtureReport report;
  auto add = [&](const std::string& name, bool passed, double actual,
                 const std::string& detail) {
    report.checks.push_back(TargetCheck{name, passed, actual, detail});
  };
  std::ostringstream detail;
  auto detail_str = [&]() {
    std::string s = detail.str();
    detail.str("");
    return s;
  };

  const SheddingSeries baseline = compute_shedding(profile);
  const double ens0 = compute_ens(baseline).mwh;
  detail << "ENS(rho=0) = " << ens0 << " MWh, target " << targets.baseline_ens_mwh
         << " +/- " << targets.baseline_ens_rel_tol * 100 << "%";
  add("baseline_ens",
      std::abs(ens0 - targets.baseline_ens_mwh) <=
          targets.baseline_ens_rel_tol * targets.baseline_ens_mwh,
      ens0, detail_str());

  auto ens_at = [&](double rho) {
    return compute_ens(compute_shedding(profile, apply_rationing(profile.demand, rho))).mwh;
  };

  const double ens_knee = ens_at(targets.knee_rho);
  detail << "ENS(rho=" << targets.knee_rho << ") = " << ens_knee << " MWh, target "
         << targets.ens_at_knee_mwh << " +/- " << targets.ens_at_knee_rel_tol * 100 << "%";
  add("knee_ens",
      std::abs(ens_knee - targets.ens_at_knee_mwh) <=
          targets.ens_at_knee_rel_tol * targets.ens_at_knee_mwh,
      ens_knee, detail_str());

  detail << "knee ENS is " << (ens0 > 0 ? 100.0 * (1.0 - ens_knee / ens0) : 0.0)
         << "% below baseline, need >= 85%";
  add("knee_reduction", ens_knee <= 0.15 * ens0, ens_knee, detail_str());

  // Zero-ENS rationing level, checked as the pointwise ratio bound
  // s(t) <= zero_ens_rho * L(t) plus a nonzero ENS one grid step earlier.
  double worst_excess = -1e30;
  for (std::size_t i = 0; i < baseline.values_mw.size(); ++i) {
    worst_excess = std::max(worst_excess, baseline.values_mw[i] -
                                              targets.zero_ens_rho *
                                                  profile.demand.values_mw[i]);
  }
  const double ens_zero = ens_at(targets.zero_ens_rho);
  const double ens_below = ens_at(std::max(0.0, targets.zero_ens_rho - 0.02));
  detail << "ENS(rho=" << targets.zero_ens_rho << ") = " << ens_zero
         << " MWh, max(s - rho*L) = " << worst_excess << " MW, ENS(rho-0.02) = "
         << ens_below << " MWh";
  add("zero_ens_rho", ens_zero <= 1e-3 && worst_excess <= 1e-6 && ens_below > 0.0,
      ens_zero, detail_str());

  const double peak_shed = baseline.max_mw();
  detail << "peak shedding = " << peak_shed << " MW, need > "
         << targets.peak_shedding_min_mw;
  add("peak_shedding", peak_shed > targets.peak_shedding_min_mw, peak_shed, detail_str());

  const double peak_demand = profile.demand.max_mw();
  detail << "peak demand = " << peak_demand << " MW, target " << targets.peak_demand_mw;
  add("peak_demand",
      std::abs(peak_demand - targets.peak_demand_mw) <= 1e-6 * targets.peak_demand_mw,
      peak_demand, detail_str());

  double min_capacity = profile.capacity.values_mw.front();
  for (double g : profile.capacity.values_mw) min_capacity = std::min(min_capacity, g);
  const double outage = peak_demand - min_capacity;
  detail << "peak demand minus minimum capacity = " << outage << " MW, target "
         << targets.capacity_outage_mw << " +/- " << targets.capacity_outage_rel_tol * 100
         << "%";
  add("capacity_outage",
      std::abs(outage - targets.capacity_outage_mw) <=
          targets.capacity_outage_rel_tol * targets.capacity_outage_mw,
      outage, detail_str());

  const double span = profile.demand.grid.span_hours();
  detail << "window spans " << span << " h, target " << targets.window_hours << " +/- "
         << targets.window_tol_hours << " h";
  add("window", std::abs(span - targets.window_hours) <= targets.window_tol_hours, span,
      detail_str());

  return report;
}

bool FixtureReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const TargetCheck& c) { return c.passed; });
}

void write_fixture_sidecar(std::ostream& out, const CalibrationTargets& targets,
                           const ProfileTemplate& tmpl) {
  nlohmann::ordered_json doc;
  doc["note"] =
      "Synthetic event profile. Published aggregate anchors were fitted onto a "
      "piecewise-linear shape template; this is not measured grid data.";
  auto& t = doc["targets"];
  t["baseline_ens_mwh"] = targets.baseline_ens_mwh;
  t["baseline_ens_rel_tol"] = targets.baseline_ens_rel_tol;
  t["ens_at_knee_mwh"] = targets.ens_at_knee_mwh;
  t["ens_at_knee_rel_tol"] = targets.ens_at_knee_rel_tol;
  t["knee_rho"] = targets.knee_rho;
  t["zero_ens_rho"] = targets.zero_ens_rho;
  t["peak_shedding_min_mw"] = targets.peak_shedding_min_mw;
  t["peak_demand_mw"] = targets.peak_demand_mw;
  t["capacity_outage_mw"] = targets.capacity_outage_mw;
  t["capacity_outage_rel_tol"] = targets.capacity_outage_rel_tol;
  t["window_hours"] = targets.window_hours;
  t["window_tol_hours"] = targets.window_tol_hours;
  auto& g = doc["template"];
  g["start"] = format_iso8601_utc(tmpl.grid.start_unix_s);
  g["step_s"] = tmpl.grid.step_s;
  g["count"] = tmpl.grid.count;
  auto knots_json = [](const std::vector<Knot>& knots) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& k : knots) arr.push_back({{"hour", k.hour}, {"level_mw", k.level_mw}});
    return arr;
  };
  g["demand_knots"] = knots_json(tmpl.demand_knots);
  g["capacity_knots"] = knots_json(tmpl.capacity_knots);
  out << doc.dump(2) << "\n";
}

}  // namespace gridshed
