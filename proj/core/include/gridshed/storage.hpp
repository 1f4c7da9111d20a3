#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridshed/profiles.hpp"

namespace gridshed {

/// Storage ratings. A missing power limit means the store can discharge at
/// any rate. The event model is discharge-only: the store starts at
/// `initial_charge_fraction` and is never recharged within the window.
struct StorageSpec {
  double energy_capacity_mwh = 0.0;
  std::optional<double> power_limit_mw;  // nullopt = unbounded
  double initial_charge_fraction = 1.0;
  double efficiency = 1.0;

  // Deliverable energy over the event.
  double available_energy_mwh() const {
    return energy_capacity_mwh * initial_charge_fraction * efficiency;
  }

  void validate() const;
};

struct DispatchResult {
  PowerSeries discharge;          // d(t), MW
  SheddingSeries residual;        // r(t) = s(t) - d(t)
  std::optional<double> threshold_mw;  // set by the peak-shave dispatcher
  double energy_used_mwh = 0.0;
  double peak_shave_mw = 0.0;     // max_t s(t) - max_t r(t)
};

// Peak-shaving dispatch: minimizes the residual peak subject to the energy
// budget and power limit. The optimal policy is a threshold rule
// d(t) = clamp(s(t) - T*, 0, P) with T* = max(T_energy, T_power);
// T_energy is found by bisection to 1e-6 MW absolute.
DispatchResult dispatch_peak_shave(const SheddingSeries& shedding, const StorageSpec& spec);

// ENS-offset dispatch: maximizes absorbed unserved energy, saturating steps
// in descending order of s(t) (earlier timestamp on ties) until the budget
// runs out. ENS reduction equals min(budget, sum_t min(s, P) dt).
DispatchResult dispatch_ens_offset(const SheddingSeries& shedding, const StorageSpec& spec);

struct SizingResult {
  double energy_mwh = 0.0;
  double power_mw = 0.0;
};

// Minimal ratings for residual == 0: energy = ENS, power = peak shedding.
SizingResult size_for_zero_residual(const SheddingSeries& shedding);

struct EVFleetSegment {
  std::string name;
  long long count = 0;
  double per_vehicle_kwh = 0.0;
  double availability = 1.0;

  void validate() const;
};

// Fleet energy: sum of count * per-vehicle energy * availability, as an
// unbounded-power StorageSpec.
StorageSpec aggregate_ev_fleet(const std::vector<EVFleetSegment>& segments);

// Fleet CSV: header `name, count, per_vehicle_kwh, availability`.
std::vector<EVFleetSegment> load_ev_fleet(std::istream& source);

struct CostModel {
  double unit_cost_per_kwh = 137.0;
};

// Installed-capacity cost in dollars: energy (kWh) * unit cost.
double storage_cost(EnergyQuantity energy, const CostModel& model = {});

}  // namespace gridshed
