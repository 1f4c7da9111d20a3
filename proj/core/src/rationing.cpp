#include "gridshed/rationing.hpp"

#include <cmath>
#include <istream>
#include <sstream>

namespace gridshed {

namespace {

void check_fraction(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

void RationingPolicy::validate() const {
  check_fraction(residential_share, "residential_share");
  check_fraction(residential_fraction, "residential_fraction");
}

double system_reduction(const RationingPolicy& policy) {
  policy.validate();
  return policy.residential_share * policy.residential_fraction;
}

HouseholdCap household_cap(const RationingPolicy& policy, double baseline_kw,
                           const SurvivabilityThreshold& threshold) {
  policy.validate();
  check_fraction(threshold.minimum_fraction, "minimum_fraction");
  if (baseline_kw < 0.0 || !std::isfinite(baseline_kw)) {
    throw ValidationError("household baseline must be nonnegative and finite");
  }
  const double remaining = 1.0 - policy.residential_fraction;
  return HouseholdCap{remaining * baseline_kw, remaining < threshold.minimum_fraction};
}

PowerSeries apply_rationing(const PowerSeries& demand, double rho) {
  demand.validate();
  check_fraction(rho, "rho");
  PowerSeries rationed{demand.grid, {}};
  rationed.values_mw.reserve(demand.values_mw.size());
  for (double v : demand.values_mw) rationed.values_mw.push_back((1.0 - rho) * v);
  return rationed;
}

PowerSeries apply_rationing(const PowerSeries& demand, const RationingPolicy& policy) {
  return apply_rationing(demand, system_reduction(policy));
}

EnforcementSimulator::EnforcementSimulator(std::vector<double> baselines_kw,
                                           const RationingPolicy& policy) {
  households_.reserve(baselines_kw.size());
  for (double baseline : baselines_kw) {
    households_.push_back(Household{baseline, household_cap(policy, baseline).cap_kw});
  }
}

double EnforcementSimulator::step(std::span<const double> requested_kw) {
  if (requested_kw.size() != households_.size()) {
    throw ValidationError("enforcement step: request count does not match population");
  }
  double aggregate = 0.0;
  for (std::size_t i = 0; i < households_.size(); ++i) {
    Household& h = households_[i];
    const double request = requested_kw[i];
    if (request < 0.0 || !std::isfinite(request)) {
      throw ValidationError("enforcement step: negative request for household " +
                            std::to_string(i));
    }
    if (h.state == HouseholdState::cut_off) continue;
    if (request <= h.cap_kw) {
      aggregate += request;
      continue;
    }
    // violation: clamp and escalate; second strike disconnects
    if (h.state == HouseholdState::normal) {
      h.state = HouseholdState::warned;
      aggregate += h.cap_kw;
    } else {
      h.state = HouseholdState::cut_off;
    }
  }
  return aggregate;
}

std::vector<double> load_households(std::istream& source) {
  std::string line;
  std::vector<double> baselines;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // `id, baseline_kw`
      continue;
    }
    std::stringstream ss(line);
    std::string id, value;
    if (!std::getline(ss, id, ',') || !std::getline(ss, value)) {
      throw ValidationError("household CSV line " + std::to_string(line_no) +
                            ": expected `id, baseline_kw`");
    }
    std::size_t pos = 0;
    double baseline = 0.0;
    try {
      baseline = std::stod(value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || baseline < 0.0 || !std::isfinite(baseline)) {
      throw ValidationError("household CSV line " + std::to_string(line_no) +
                            ": bad baseline value '" + value + "'");
    }
    baselines.push_back(baseline);
  }
  return baselines;
}

}  // namespace gridshed
