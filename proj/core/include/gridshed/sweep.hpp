#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gridshed/profiles.hpp"
#include "gridshed/rationing.hpp"
#include "gridshed/storage.hpp"

namespace gridshed {

enum class DispatchObjective { peak_shave, ens_offset };

struct Scenario {
  EventProfile profile;
  double rho = 0.0;  // system-level reduction fraction
  StorageSpec storage;
  DispatchObjective objective = DispatchObjective::peak_shave;
  CostModel cost;
};

struct ScenarioReport {
  double ens_mwh = 0.0;           // after rationing, before storage
  double peak_shedding_mw = 0.0;  // after rationing, before storage
  double peak_shave_mw = 0.0;
  double residual_ens_mwh = 0.0;  // after storage dispatch
  SizingResult zero_residual_size;
  double cost_usd = 0.0;          // cost of the zero-residual energy rating
};

// Fixed pipeline: ration demand, compute shedding, dispatch storage, report.
ScenarioReport evaluate(const Scenario& scenario);

struct SweepGrid {
  std::vector<double> rho_axis;
  std::vector<double> energy_axis_mwh;
  DispatchObjective objective = DispatchObjective::ens_offset;
  // Row-major: cells[i * energy_axis.size() + j] for (rho_axis[i], energy_axis[j]).
  std::vector<ScenarioReport> cells;
  // For ENS sweeps: per energy column, the smallest grid rho with zero
  // residual ENS (unset when the curve never reaches zero).
  std::vector<std::optional<double>> zero_crossing_rho;

  const ScenarioReport& at(std::size_t rho_index, std::size_t energy_index) const;
};

// One ENS curve per storage option (ens_offset objective), over rho_values.
SweepGrid sweep_ens_vs_rationing(const EventProfile& profile,
                                 const std::vector<double>& rho_values,
                                 const std::vector<StorageSpec>& storage_options);

// One peak-shave curve per rho (peak_shave objective), over energy_values.
SweepGrid sweep_peak_shave_vs_storage(const EventProfile& profile,
                                      const std::vector<double>& rho_values,
                                      const std::vector<double>& energy_values_mwh);

// Plot-ready shedding series, one per rho.
std::vector<SheddingSeries> shedding_trajectories(const EventProfile& profile,
                                                  const std::vector<double>& rho_values);

// Long-form CSV: one row per grid cell, unit-suffixed columns.
void write_sweep_csv(std::ostream& out, const SweepGrid& grid);

// JSON document mirroring SweepGrid.
void write_sweep_json(std::ostream& out, const SweepGrid& grid);

}  // namespace gridshed
