// gridshed: capacity-adequacy and storage-dispatch toolkit CLI.
//
// Subcommands map one-to-one onto library operations: ens, ration, dispatch,
// size, evfleet, cost, sweep, calibrate, validate. Human-readable summaries
// go to stdout in GW/GWh; file outputs use MW/MWh with unit-suffixed columns.
// Exit codes: 0 success, 1 validation/data error, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridshed/calibrate.hpp"
#include "gridshed/profiles.hpp"
#include "gridshed/rationing.hpp"
#include "gridshed/storage.hpp"
#include "gridshed/sweep.hpp"

namespace {

using namespace gridshed;

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string fmt_gwh(double mwh) { return fmt(mwh / 1000.0) + " GWh"; }
std::string fmt_gw(double mw) { return fmt(mw / 1000.0) + " GW"; }

std::string fmt_dollars(double usd) {
  if (usd >= 1e9) return "$" + fmt(usd / 1e9) + "B";
  if (usd >= 1e6) return "$" + fmt(usd / 1e6) + "M";
  return "$" + fmt(usd);
}

// Shared per-subcommand inputs: profile source, unit schema, rationing
// policy (direct rho or the residential mapping, never both).
struct ProfileArgs {
  std::string profile_path;
  bool gigawatts = false;
  std::optional<double> rho;
  std::optional<double> residential_share;
  std::optional<double> residential_fraction;

  void attach(CLI::App* cmd, bool with_policy = true) {
    cmd->add_option("--profile", profile_path,
                    "Event profile CSV (default: $GRIDSHED_FIXTURE_DIR/event_fixture.csv)");
    cmd->add_flag("--gigawatts", gigawatts,
                  "Profile columns are capacity_gw/demand_gw in GW");
    if (with_policy) {
      cmd->add_option("--rho", rho, "System-level demand reduction fraction");
      cmd->add_option("--residential-share", residential_share,
                      "Residential share of system demand (policy route)");
      cmd->add_option("--residential-fraction", residential_fraction,
                      "Rationing fraction applied to the residential sector");
    }
  }

  double resolve_rho() const {
    const bool has_policy = residential_share || residential_fraction;
    if (rho && has_policy) {
      throw ValidationError("give either --rho or the residential policy pair, not both");
    }
    if (has_policy) {
      if (!residential_share || !residential_fraction) {
        throw ValidationError(
            "--residential-share and --residential-fraction must be given together");
      }
      return system_reduction(RationingPolicy{*residential_share, *residential_fraction});
    }
    return rho.value_or(0.0);
  }

  EventProfile load() const {
    std::string path = profile_path;
    if (path.empty()) {
      const char* dir = std::getenv("GRIDSHED_FIXTURE_DIR");
      if (!dir) {
        throw ValidationError(
            "no --profile given and GRIDSHED_FIXTURE_DIR is not set");
      }
      path = std::string(dir) + "/event_fixture.csv";
    }
    CsvSchema schema;
    if (gigawatts) {
      schema.capacity_column = "capacity_gw";
      schema.demand_column = "demand_gw";
      schema.gigawatts = true;
    }
    return load_profile_file(path, schema);
  }
};

StorageSpec make_storage(double energy_gwh, const std::string& power_gw,
                         double initial_charge, double efficiency) {
  StorageSpec spec;
  spec.energy_capacity_mwh = energy_gwh * 1000.0;
  if (power_gw != "unbounded") {
    try {
      spec.power_limit_mw = std::stod(power_gw) * 1000.0;
    } catch (const std::exception&) {
      throw ValidationError("bad --power-gw value '" + power_gw +
                            "' (number or 'unbounded')");
    }
  }
  spec.initial_charge_fraction = initial_charge;
  spec.efficiency = efficiency;
  spec.validate();
  return spec;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  return out;
}

void write_series_csv(std::ostream& out, const TimeGrid& grid,
                      const std::vector<std::pair<std::string, const std::vector<double>*>>& columns) {
  out << "timestamp";
  for (const auto& [name, _] : columns) out << "," << name;
  out << "\n";
  for (std::size_t i = 0; i < grid.count; ++i) {
    out << format_iso8601_utc(grid.start_unix_s + static_cast<std::int64_t>(i) * grid.step_s);
    for (const auto& [_, values] : columns) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%.6g", (*values)[i]);
      out << buf;
    }
    out << "\n";
  }
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError(std::string("bad ") + what + " list entry '" + item + "'");
    }
  }
  if (values.empty()) throw ValidationError(std::string("empty ") + what + " list");
  return values;
}

std::vector<double> linear_axis(double from, double to, double step) {
  std::vector<double> axis;
  for (int i = 0;; ++i) {
    const double v = from + i * step;
    if (v > to + 1e-12) break;
    axis.push_back(std::min(v, to));
  }
  return axis;
}

int run(int argc, char** argv) {
  CLI::App app{"Capacity-adequacy, load-rationing, and storage-dispatch toolkit"};
  app.require_subcommand(1);

  // --- ens ---------------------------------------------------------------
  auto* ens_cmd = app.add_subcommand("ens", "Energy-Not-Served for an event profile");
  auto ens_args = std::make_shared<ProfileArgs>();
  ens_args->attach(ens_cmd);
  auto ens_out = std::make_shared<std::string>();
  ens_cmd->add_option("--out", *ens_out, "Write the shedding series CSV here");
  ens_cmd->set_config("--config");
  ens_cmd->callback([ens_args, ens_out]() {
    const EventProfile profile = ens_args->load();
    const double rho = ens_args->resolve_rho();
    const SheddingSeries shedding =
        compute_shedding(profile, apply_rationing(profile.demand, rho));
    std::cout << "ENS = " << fmt_gwh(compute_ens(shedding).mwh) << "\n";
    std::cout << "peak shedding = " << fmt_gw(shedding.max_mw()) << "\n";
    if (!ens_out->empty()) {
      auto out = open_out(*ens_out);
      write_series_csv(out, shedding.grid, {{"shedding_mw", &shedding.values_mw}});
    }
  });

  // --- ration ------------------------------------------------------------
  auto* ration_cmd = app.add_subcommand("ration", "Apply a rationing policy to demand");
  auto ration_args = std::make_shared<ProfileArgs>();
  ration_args->attach(ration_cmd);
  auto ration_out = std::make_shared<std::string>();
  ration_cmd->add_option("--out", *ration_out, "Write the rationed demand CSV here");
  ration_cmd->set_config("--config");
  ration_cmd->callback([ration_args, ration_out]() {
    const EventProfile profile = ration_args->load();
    const double rho = ration_args->resolve_rho();
    const PowerSeries rationed = apply_rationing(profile.demand, rho);
    const SheddingSeries shedding = compute_shedding(profile, rationed);
    std::cout << "system reduction = " << fmt(rho * 100.0) << "%\n";
    std::cout << "ENS after rationing = " << fmt_gwh(compute_ens(shedding).mwh) << "\n";
    if (!ration_out->empty()) {
      auto out = open_out(*ration_out);
      write_series_csv(out, rationed.grid, {{"demand_mw", &rationed.values_mw}});
    }
  });

  // --- dispatch ----------------------------------------------------------
  auto* dispatch_cmd = app.add_subcommand("dispatch", "Dispatch storage against shedding");
  auto dispatch_args = std::make_shared<ProfileArgs>();
  dispatch_args->attach(dispatch_cmd);
  auto d_energy = std::make_shared<double>(0.0);
  auto d_power = std::make_shared<std::string>("unbounded");
  auto d_charge = std::make_shared<double>(1.0);
  auto d_eff = std::make_shared<double>(1.0);
  auto d_objective = std::make_shared<std::string>("peak_shave");
  auto d_out = std::make_shared<std::string>();
  dispatch_cmd->add_option("--energy-gwh", *d_energy, "Storage energy capacity (GWh)")
      ->required();
  dispatch_cmd->add_option("--power-gw", *d_power, "Power limit (GW) or 'unbounded'");
  dispatch_cmd->add_option("--initial-charge", *d_charge, "Initial charge fraction");
  dispatch_cmd->add_option("--efficiency", *d_eff, "Discharge efficiency");
  dispatch_cmd->add_option("--objective", *d_objective, "peak_shave or ens_offset")
      ->check(CLI::IsMember({"peak_shave", "ens_offset"}));
  dispatch_cmd->add_option("--out", *d_out, "Write the dispatch series CSV here");
  dispatch_cmd->set_config("--config");
  dispatch_cmd->callback([=]() {
    const EventProfile profile = dispatch_args->load();
    const double rho = dispatch_args->resolve_rho();
    const StorageSpec spec = make_storage(*d_energy, *d_power, *d_charge, *d_eff);
    const SheddingSeries shedding =
        compute_shedding(profile, apply_rationing(profile.demand, rho));
    const DispatchResult result = *d_objective == "peak_shave"
                                      ? dispatch_peak_shave(shedding, spec)
                                      : dispatch_ens_offset(shedding, spec);
    std::cout << "peak shedding = " << fmt_gw(shedding.max_mw()) << "\n";
    std::cout << "peak shave = " << fmt_gw(result.peak_shave_mw) << "\n";
    std::cout << "residual ENS = " << fmt_gwh(compute_ens(result.residual).mwh) << "\n";
    std::cout << "energy used = " << fmt_gwh(result.energy_used_mwh) << "\n";
    if (result.threshold_mw) {
      std::cout << "threshold = " << fmt_gw(*result.threshold_mw) << "\n";
    }
    if (!d_out->empty()) {
      auto out = open_out(*d_out);
      write_series_csv(out, shedding.grid,
                       {{"shedding_mw", &shedding.values_mw},
                        {"discharge_mw", &result.discharge.values_mw},
                        {"residual_mw", &result.residual.values_mw}});
    }
  });

  // --- size --------------------------------------------------------------
  auto* size_cmd = app.add_subcommand("size", "Zero-residual storage sizing");
  auto size_args = std::make_shared<ProfileArgs>();
  size_args->attach(size_cmd);
  auto size_cost = std::make_shared<double>(137.0);
  size_cmd->add_option("--unit-cost", *size_cost, "Storage cost in $/kWh");
  size_cmd->set_config("--config");
  size_cmd->callback([size_args, size_cost]() {
    const EventProfile profile = size_args->load();
    const double rho = size_args->resolve_rho();
    const SheddingSeries shedding =
        compute_shedding(profile, apply_rationing(profile.demand, rho));
    const SizingResult sizing = size_for_zero_residual(shedding);
    std::cout << "required energy = " << fmt_gwh(sizing.energy_mwh) << "\n";
    std::cout << "required power = " << fmt_gw(sizing.power_mw) << "\n";
    std::cout << "cost = "
              << fmt_dollars(storage_cost(EnergyQuantity{sizing.energy_mwh},
                                          CostModel{*size_cost}))
              << "\n";
  });

  // --- evfleet -----------------------------------------------------------
  auto* ev_cmd = app.add_subcommand("evfleet", "Aggregate an EV fleet into storage");
  auto ev_path = std::make_shared<std::string>();
  ev_cmd->add_option("--fleet", *ev_path, "Fleet CSV: name,count,per_vehicle_kwh,availability")
      ->required();
  ev_cmd->set_config("--config");
  ev_cmd->callback([ev_path]() {
    std::ifstream in(*ev_path);
    if (!in) throw ValidationError("cannot open fleet file: " + *ev_path);
    const StorageSpec spec = aggregate_ev_fleet(load_ev_fleet(in));
    std::cout << "fleet energy = " << fmt_gwh(spec.energy_capacity_mwh) << "\n";
  });

  // --- cost --------------------------------------------------------------
  auto* cost_cmd = app.add_subcommand("cost", "Storage installation cost");
  auto c_energy = std::make_shared<double>(0.0);
  auto c_unit = std::make_shared<double>(137.0);
  cost_cmd->add_option("--energy-gwh", *c_energy, "Installed energy capacity (GWh)")
      ->required();
  cost_cmd->add_option("--unit-cost", *c_unit, "Storage cost in $/kWh");
  cost_cmd->set_config("--config");
  cost_cmd->callback([c_energy, c_unit]() {
    std::cout << fmt_dollars(storage_cost(EnergyQuantity{*c_energy * 1000.0},
                                          CostModel{*c_unit}))
              << "\n";
  });

  // --- sweep -------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "Scenario grids over rho and storage size");
  auto sweep_args = std::make_shared<ProfileArgs>();
  sweep_args->attach(sweep_cmd, /*with_policy=*/false);
  auto s_mode = std::make_shared<std::string>("ens");
  auto s_rho_from = std::make_shared<double>(0.0);
  auto s_rho_to = std::make_shared<double>(0.4);
  auto s_rho_step = std::make_shared<double>(0.01);
  auto s_energies = std::make_shared<std::string>("0,135");
  auto s_out = std::make_shared<std::string>();
  auto s_format = std::make_shared<std::string>("csv");
  sweep_cmd->add_option("--mode", *s_mode, "ens (Energy-Not-Served) or shave (peak shave)")
      ->check(CLI::IsMember({"ens", "shave"}));
  sweep_cmd->add_option("--rho-from", *s_rho_from, "First rho value");
  sweep_cmd->add_option("--rho-to", *s_rho_to, "Last rho value");
  sweep_cmd->add_option("--rho-step", *s_rho_step, "Rho grid step");
  sweep_cmd->add_option("--energies-gwh", *s_energies, "Comma-separated storage sizes (GWh)");
  sweep_cmd->add_option("--out", *s_out, "Output path (stdout when omitted)");
  sweep_cmd->add_option("--format", *s_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->set_config("--config");
  sweep_cmd->callback([=]() {
    const EventProfile profile = sweep_args->load();
    if (*s_rho_step <= 0.0) throw ValidationError("--rho-step must be positive");
    const std::vector<double> rhos = linear_axis(*s_rho_from, *s_rho_to, *s_rho_step);
    std::vector<double> energies_mwh;
    for (double gwh : parse_list(*s_energies, "--energies-gwh")) {
      energies_mwh.push_back(gwh * 1000.0);
    }
    SweepGrid grid;
    if (*s_mode == "ens") {
      std::vector<StorageSpec> options;
      for (double mwh : energies_mwh) {
        StorageSpec spec;
        spec.energy_capacity_mwh = mwh;
        options.push_back(spec);
      }
      grid = sweep_ens_vs_rationing(profile, rhos, options);
      for (std::size_t j = 0; j < options.size(); ++j) {
        std::cout << "E = " << fmt_gwh(energies_mwh[j]) << ": zero ENS at rho = "
                  << (grid.zero_crossing_rho[j] ? fmt(*grid.zero_crossing_rho[j])
                                                : std::string("none on grid"))
                  << "\n";
      }
    } else {
      grid = sweep_peak_shave_vs_storage(profile, rhos, energies_mwh);
      std::cout << "computed " << grid.cells.size() << " peak-shave scenarios\n";
    }
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!s_out->empty()) {
      file = open_out(*s_out);
      out = &file;
    }
    if (*s_format == "json") {
      write_sweep_json(*out, grid);
    } else {
      write_sweep_csv(*out, grid);
    }
  });

  // --- calibrate ---------------------------------------------------------
  auto* cal_cmd = app.add_subcommand("calibrate", "Build the synthetic event fixture");
  auto cal_out = std::make_shared<std::string>("event_fixture.csv");
  auto cal_sidecar = std::make_shared<std::string>();
  cal_cmd->add_option("--out", *cal_out, "Fixture CSV output path");
  cal_cmd->add_option("--sidecar", *cal_sidecar, "JSON sidecar output path");
  cal_cmd->set_config("--config");
  cal_cmd->callback([cal_out, cal_sidecar]() {
    const CalibrationTargets targets;
    const ProfileTemplate tmpl = ProfileTemplate::defaults();
    const EventProfile profile = calibrate_profile(targets, tmpl);
    auto out = open_out(*cal_out);
    write_profile_csv(out, profile,
                      {"Synthetic 2021-02-15..18 event profile, fitted to published "
                       "aggregate anchors. Not measured grid data.",
                       "See the JSON sidecar for targets and template parameters."});
    std::cout << "wrote " << *cal_out << "\n";
    if (!cal_sidecar->empty()) {
      auto side = open_out(*cal_sidecar);
      write_fixture_sidecar(side, targets, tmpl);
      std::cout << "wrote " << *cal_sidecar << "\n";
    }
    for (const auto& check : validate_fixture(profile, targets).checks) {
      std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": "
                << check.detail << "\n";
    }
  });

  // --- validate ----------------------------------------------------------
  auto* val_cmd = app.add_subcommand("validate", "Re-check fixture targets");
  auto val_args = std::make_shared<ProfileArgs>();
  val_args->attach(val_cmd, /*with_policy=*/false);
  val_cmd->set_config("--config");
  val_cmd->callback([val_args]() {
    const FixtureReport report = validate_fixture(val_args->load());
    for (const auto& check : report.checks) {
      std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": "
                << check.detail << "\n";
    }
    if (!report.all_passed()) throw ValidationError("fixture validation failed");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gridshed::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
