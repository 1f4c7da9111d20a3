#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gridshed/profiles.hpp"

namespace gridshed {

/// Published anchors the bundled synthetic event profile must reproduce,
/// with their acceptance tolerances.
struct CalibrationTargets {
  double baseline_ens_mwh = 920000.0;   // ENS at rho = 0
  double baseline_ens_rel_tol = 0.01;
  double ens_at_knee_mwh = 135000.0;    // ENS at rho = knee_rho
  double ens_at_knee_rel_tol = 0.05;
  double knee_rho = 0.20;
  double zero_ens_rho = 0.30;           // smallest rho with ENS == 0
  double peak_shedding_min_mw = 20000.0;
  double peak_demand_mw = 69000.0;
  double capacity_outage_mw = 30000.0;  // peak demand minus minimum capacity
  double capacity_outage_rel_tol = 0.15;
  double window_hours = 96.0;
  double window_tol_hours = 24.0;

  void validate() const;
};

struct Knot {
  double hour = 0.0;      // offset from the window start
  double level_mw = 0.0;
};

/// Piecewise-linear demand and capacity shapes over the event window. Knot
/// levels are free parameters; the fit rescales demand to the peak target
/// (unless pinned) and reshapes the capacity gap to hit the energy anchors.
struct ProfileTemplate {
  TimeGrid grid;
  std::vector<Knot> demand_knots;
  std::vector<Knot> capacity_knots;
  bool pin_demand_peak = false;

  // 96 hourly samples starting 2021-02-15 00:00 UTC-6, shaped after the
  // event's cold-snap demand and staged capacity outage.
  static ProfileTemplate defaults();

  void validate() const;
};

class CalibrationError : public ValidationError {
 public:
  CalibrationError(const std::string& what, std::vector<std::string> violated)
      : ValidationError(what), violated_targets(std::move(violated)) {}

  std::vector<std::string> violated_targets;
};

struct TargetCheck {
  std::string name;
  bool passed = false;
  double actual = 0.0;
  std::string detail;
};

struct FixtureReport {
  std::vector<TargetCheck> checks;
  bool all_passed() const;
};

// Deterministic fit of the template to the targets (nested bisection on two
// gap-scaling parameters; no randomness). Throws CalibrationError naming the
// violated targets when the template cannot reach them.
EventProfile calibrate_profile(const CalibrationTargets& targets,
                               const ProfileTemplate& tmpl = ProfileTemplate::defaults());

// Re-checks every target against a profile; used in CI on the bundled
// fixture file.
FixtureReport validate_fixture(const EventProfile& profile,
                               const CalibrationTargets& targets = {});

// JSON sidecar shipped next to the fixture CSV: targets, tolerances, and
// template parameters.
void write_fixture_sidecar(std::ostream& out, const CalibrationTargets& targets,
                           const ProfileTemplate& tmpl);

}  // namespace gridshed
