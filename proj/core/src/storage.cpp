#include "gridshed/storage.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

namespace gridshed {

namespace {

constexpr double kThresholdTolMw = 1e-6;

double power_limit_of(const StorageSpec& spec) {
  return spec.power_limit_mw.value_or(std::numeric_limits<double>::infinity());
}

// Energy consumed by the threshold rule d(t) = clamp(s(t) - T, 0, P).
double threshold_usage_mwh(const std::vector<double>& shedding_mw, double dt_h,
                           double threshold_mw, double power_limit_mw) {
  double sum = 0.0;
  for (double s : shedding_mw) {
    sum += std::clamp(s - threshold_mw, 0.0, power_limit_mw) * dt_h;
  }
  return sum;
}

DispatchResult finish_dispatch(const SheddingSeries& shedding, std::vector<double> discharge,
                               std::optional<double> threshold, double energy_used) {
  DispatchResult result;
  result.discharge = PowerSeries{shedding.grid, std::move(discharge)};
  result.residual = SheddingSeries{shedding.grid, {}};
  result.residual.values_mw.reserve(shedding.values_mw.size());
  for (std::size_t i = 0; i < shedding.values_mw.size(); ++i) {
    result.residual.values_mw.push_back(
        std::max(0.0, shedding.values_mw[i] - result.discharge.values_mw[i]));
  }
  result.threshold_mw = threshold;
  result.energy_used_mwh = energy_used;
  result.peak_shave_mw = shedding.max_mw() - result.residual.max_mw();
  return result;
}

}  // namespace

void StorageSpec::validate() const {
  if (energy_capacity_mwh < 0.0 || !std::isfinite(energy_capacity_mwh)) {
    throw ValidationError("StorageSpec: energy capacity must be nonnegative");
  }
  if (power_limit_mw && !(*power_limit_mw > 0.0)) {
    throw ValidationError("StorageSpec: power limit must be positive when bounded");
  }
  if (!(initial_charge_fraction >= 0.0 && initial_charge_fraction <= 1.0)) {
    throw ValidationError("StorageSpec: initial charge fraction must lie in [0, 1]");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw ValidationError("StorageSpec: efficiency must lie in (0, 1]");
  }
}

DispatchResult dispatch_peak_shave(const SheddingSeries& shedding, const StorageSpec& spec) {
  shedding.validate();
  spec.validate();
  const double dt_h = shedding.grid.step_hours();
  const double budget = spec.available_energy_mwh();
  const double power_limit = power_limit_of(spec);
  const double peak = shedding.max_mw();

  // T_power: the power limit alone floors the residual peak.
  const double threshold_power =
      std::isinf(power_limit) ? 0.0 : std::max(0.0, peak - power_limit);

  // T_energy: smallest threshold whose usage fits the budget, by bisection.
  // `hi` is kept on the feasible side so the final dispatch never overdraws.
  double threshold_energy = 0.0;
  if (threshold_usage_mwh(shedding.values_mw, dt_h, 0.0, power_limit) > budget) {
    double lo = 0.0;
    double hi = peak;
    while (hi - lo > kThresholdTolMw) {
      const double mid = 0.5 * (lo + hi);
      if (threshold_usage_mwh(shedding.values_mw, dt_h, mid, power_limit) <= budget) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    threshold_energy = hi;
  }

  const double threshold = std::max(threshold_energy, threshold_power);
  std::vector<double> discharge;
  discharge.reserve(shedding.values_mw.size());
  for (double s : shedding.values_mw) {
    discharge.push_back(std::clamp(s - threshold, 0.0, power_limit));
  }
  const double used = threshold_usage_mwh(shedding.values_mw, dt_h, threshold, power_limit);
  return finish_dispatch(shedding, std::move(discharge), threshold, used);
}

DispatchResult dispatch_ens_offset(const SheddingSeries& shedding, const StorageSpec& spec) {
  shedding.validate();
  spec.validate();
  const double dt_h = shedding.grid.step_hours();
  const double power_limit = power_limit_of(spec);
  const std::size_t n = shedding.values_mw.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return shedding.values_mw[a] > shedding.values_mw[b];
  });

  double total_servable = 0.0;
  for (double s : shedding.values_mw) total_servable += std::min(s, power_limit) * dt_h;

  std::vector<double> discharge(n, 0.0);
  double used = 0.0;
  if (spec.available_energy_mwh() >= total_servable) {
    // budget covers everything servable; serve it without rounding residue
    for (std::size_t i = 0; i < n; ++i) {
      discharge[i] = std::min(shedding.values_mw[i], power_limit);
    }
    used = total_servable;
  } else {
    double remaining = spec.available_energy_mwh();
    for (std::size_t i : order) {
      if (remaining <= 0.0) break;
      const double want = std::min(shedding.values_mw[i], power_limit);
      const double want_energy = want * dt_h;
      if (want_energy <= remaining) {
        discharge[i] = want;
        remaining -= want_energy;
      } else {
        discharge[i] = remaining / dt_h;
        remaining = 0.0;
      }
    }
    used = spec.available_energy_mwh() - remaining;
  }
  return finish_dispatch(shedding, std::move(discharge), std::nullopt, used);
}

SizingResult size_for_zero_residual(const SheddingSeries& shedding) {
  shedding.validate();
  return SizingResult{compute_ens(shedding).mwh, shedding.max_mw()};
}

void EVFleetSegment::validate() const {
  if (count < 0) throw ValidationError("EVFleetSegment: count must be nonnegative");
  if (per_vehicle_kwh < 0.0 || !std::isfinite(per_vehicle_kwh)) {
    throw ValidationError("EVFleetSegment: per-vehicle energy must be nonnegative");
  }
  if (!(availability >= 0.0 && availability <= 1.0)) {
    throw ValidationError("EVFleetSegment: availability must lie in [0, 1]");
  }
}

StorageSpec aggregate_ev_fleet(const std::vector<EVFleetSegment>& segments) {
  double energy_mwh = 0.0;
  for (const auto& segment : segments) {
    segment.validate();
    energy_mwh += static_cast<double>(segment.count) * segment.per_vehicle_kwh *
                  segment.availability / 1000.0;
  }
  StorageSpec spec;
  spec.energy_capacity_mwh = energy_mwh;
  return spec;
}

std::vector<EVFleetSegment> load_ev_fleet(std::istream& source) {
  std::string line;
  std::vector<EVFleetSegment> segments;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // `name, count, per_vehicle_kwh, availability`
      continue;
    }
    std::stringstream ss(line);
    std::string name, count_s, energy_s, avail_s;
    if (!std::getline(ss, name, ',') || !std::getline(ss, count_s, ',') ||
        !std::getline(ss, energy_s, ',') || !std::getline(ss, avail_s)) {
      throw ValidationError("fleet CSV line " + std::to_string(line_no) +
                            ": expected `name, count, per_vehicle_kwh, availability`");
    }
    EVFleetSegment segment;
    segment.name = name;
    try {
      segment.count = std::stoll(count_s);
      segment.per_vehicle_kwh = std::stod(energy_s);
      segment.availability = std::stod(avail_s);
    } catch (const std::exception&) {
      throw ValidationError("fleet CSV line " + std::to_string(line_no) +
                            ": unparseable numeric field");
    }
    segment.validate();
    segments.push_back(std::move(segment));
  }
  return segments;
}

double storage_cost(EnergyQuantity energy, const CostModel& model) {
  if (energy.mwh < 0.0) throw ValidationError("storage_cost: energy must be nonnegative");
  if (model.unit_cost_per_kwh < 0.0) {
    throw ValidationError("storage_cost: unit cost must be nonnegative");
  }
  return energy.mwh * 1000.0 * model.unit_cost_per_kwh;
}

}  // namespace gridshed
