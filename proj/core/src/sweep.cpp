#include "gridshed/sweep.hpp"

#include <cstdio>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace gridshed {

namespace {

void check_axis(const std::vector<double>& axis, const char* what, double lo, double hi) {
  if (axis.empty()) throw ValidationError(std::string(what) + " axis is empty");
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!(axis[i] >= lo && axis[i] <= hi)) {
      throw ValidationError(std::string(what) + " axis value out of range");
    }
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      throw ValidationError(std::string(what) + " axis must be strictly increasing");
    }
  }
}

const char* objective_name(DispatchObjective objective) {
  return objective == DispatchObjective::peak_shave ? "peak_shave" : "ens_offset";
}

}  // namespace

const ScenarioReport& SweepGrid::at(std::size_t rho_index, std::size_t energy_index) const {
  return cells.at(rho_index * energy_axis_mwh.size() + energy_index);
}

ScenarioReport evaluate(const Scenario& scenario) {
  scenario.profile.validate();
  scenario.storage.validate();

  const PowerSeries rationed = apply_rationing(scenario.profile.demand, scenario.rho);
  const SheddingSeries shedding = compute_shedding(scenario.profile, rationed);
  const DispatchResult dispatch = scenario.objective == DispatchObjective::peak_shave
                                      ? dispatch_peak_shave(shedding, scenario.storage)
                                      : dispatch_ens_offset(shedding, scenario.storage);

  ScenarioReport report;
  report.ens_mwh = compute_ens(shedding).mwh;
  report.peak_shedding_mw = shedding.max_mw();
  report.peak_shave_mw = dispatch.peak_shave_mw;
  report.residual_ens_mwh = compute_ens(dispatch.residual).mwh;
  report.zero_residual_size = size_for_zero_residual(shedding);
  report.cost_usd = storage_cost(EnergyQuantity{report.zero_residual_size.energy_mwh},
                                 scenario.cost);
  return report;
}

SweepGrid sweep_ens_vs_rationing(const EventProfile& profile,
                                 const std::vector<double>& rho_values,
                                 const std::vector<StorageSpec>& storage_options) {
  check_axis(rho_values, "rho", 0.0, 1.0);
  if (storage_options.empty()) throw ValidationError("storage option list is empty");

  SweepGrid grid;
  grid.rho_axis = rho_values;
  grid.objective = DispatchObjective::ens_offset;
  for (const auto& option : storage_options) {
    option.validate();
    grid.energy_axis_mwh.push_back(option.energy_capacity_mwh);
  }
  grid.cells.reserve(rho_values.size() * storage_options.size());
  grid.zero_crossing_rho.assign(storage_options.size(), std::nullopt);

  for (double rho : rho_values) {
    for (std::size_t j = 0; j < storage_options.size(); ++j) {
      Scenario scenario{profile, rho, storage_options[j], DispatchObjective::ens_offset};
      ScenarioReport report = evaluate(scenario);
      if (report.residual_ens_mwh == 0.0 && !grid.zero_crossing_rho[j]) {
        grid.zero_crossing_rho[j] = rho;
      }
      grid.cells.push_back(std::move(report));
    }
  }
  return grid;
}

SweepGrid sweep_peak_shave_vs_storage(const EventProfile& profile,
                                      const std::vector<double>& rho_values,
                                      const std::vector<double>& energy_values_mwh) {
  check_axis(rho_values, "rho", 0.0, 1.0);
  check_axis(energy_values_mwh, "energy", 0.0, std::numeric_limits<double>::infinity());

  SweepGrid grid;
  grid.rho_axis = rho_values;
  grid.energy_axis_mwh = energy_values_mwh;
  grid.objective = DispatchObjective::peak_shave;
  grid.cells.reserve(rho_values.size() * energy_values_mwh.size());
  for (double rho : rho_values) {
    for (double energy : energy_values_mwh) {
      StorageSpec spec;
      spec.energy_capacity_mwh = energy;
      Scenario scenario{profile, rho, spec, DispatchObjective::peak_shave};
      grid.cells.push_back(evaluate(scenario));
    }
  }
  return grid;
}

std::vector<SheddingSeries> shedding_trajectories(const EventProfile& profile,
                                                  const std::vector<double>& rho_values) {
  check_axis(rho_values, "rho", 0.0, 1.0);
  std::vector<SheddingSeries> trajectories;
  trajectories.reserve(rho_values.size());
  for (double rho : rho_values) {
    trajectories.push_back(
        compute_shedding(profile, apply_rationing(profile.demand, rho)));
  }
  return trajectories;
}

void write_sweep_csv(std::ostream& out, const SweepGrid& grid) {
  out << "rho,energy_mwh,ens_mwh,peak_shedding_mw,peak_shave_mw,residual_ens_mwh,"
         "size_energy_mwh,size_power_mw,cost_usd\n";
  char buf[256];
  for (std::size_t i = 0; i < grid.rho_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.energy_axis_mwh.size(); ++j) {
      const ScenarioReport& r = grid.at(i, j);
      std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                    grid.rho_axis[i], grid.energy_axis_mwh[j], r.ens_mwh,
                    r.peak_shedding_mw, r.peak_shave_mw, r.residual_ens_mwh,
                    r.zero_residual_size.energy_mwh, r.zero_residual_size.power_mw,
                    r.cost_usd);
      out << buf;
    }
  }
}

void write_sweep_json(std::ostream& out, const SweepGrid& grid) {
  nlohmann::ordered_json doc;
  doc["objective"] = objective_name(grid.objective);
  doc["rho_axis"] = grid.rho_axis;
  doc["energy_axis_mwh"] = grid.energy_axis_mwh;
  auto& cells = doc["cells"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < grid.rho_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.energy_axis_mwh.size(); ++j) {
      const ScenarioReport& r = grid.at(i, j);
      cells.push_back({{"rho", grid.rho_axis[i]},
                       {"energy_mwh", grid.energy_axis_mwh[j]},
                       {"ens_mwh", r.ens_mwh},
                       {"peak_shedding_mw", r.peak_shedding_mw},
                       {"peak_shave_mw", r.peak_shave_mw},
                       {"residual_ens_mwh", r.residual_ens_mwh},
                       {"size_energy_mwh", r.zero_residual_size.energy_mwh},
                       {"size_power_mw", r.zero_residual_size.power_mw},
                       {"cost_usd", r.cost_usd}});
    }
  }
  auto& crossings = doc["zero_crossing_rho"] = nlohmann::ordered_json::array();
  for (const auto& crossing : grid.zero_crossing_rho) {
    if (crossing) {
      crossings.push_back(*crossing);
    } else {
      crossings.push_back(nullptr);
    }
  }
  out << doc.dump(2) << "\n";
}

}  // namespace gridshed
