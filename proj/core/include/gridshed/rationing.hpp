#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "gridshed/profiles.hpp"

namespace gridshed {

/// Load-rationing policy: the residential sector carries `residential_share`
/// of system demand and is rationed down by `residential_fraction`.
struct RationingPolicy {
  double residential_share = 1.0 / 3.0;  // f_res
  double residential_fraction = 0.0;     // r_res

  void validate() const;
};

// System-level demand reduction rho = f_res * r_res.
double system_reduction(const RationingPolicy& policy);

/// Lower bound on the per-household consumption fraction below which a
/// rationing policy no longer covers bare-minimum usage.
struct SurvivabilityThreshold {
  double minimum_fraction = 0.5;
};

struct HouseholdCap {
  double cap_kw = 0.0;
  // Set when the remaining fraction (1 - r_res) falls below the
  // survivability threshold.
  bool below_survivability = false;
};

// Per-household limit: cap = (1 - r_res) * baseline.
HouseholdCap household_cap(const RationingPolicy& policy, double baseline_kw,
                           const SurvivabilityThreshold& threshold = {});

// Uniform rationing of a demand series: L'(t) = (1 - rho) * L(t).
PowerSeries apply_rationing(const PowerSeries& demand, double rho);
PowerSeries apply_rationing(const PowerSeries& demand, const RationingPolicy& policy);

enum class HouseholdState { normal, warned, cut_off };

struct Household {
  double baseline_kw = 0.0;
  double cap_kw = 0.0;
  HouseholdState state = HouseholdState::normal;
};

/// Enforcement micro-model. A compliant household (request <= cap) is served
/// its request. A violating household is clamped to its cap and warned; a
/// second violation while warned cuts it off. Cut-off is absorbing for the
/// run and a cut-off household is served nothing.
///
/// One simulator instance must be stepped by a single thread; independent
/// instances are unrelated.
class EnforcementSimulator {
 public:
  EnforcementSimulator(std::vector<double> baselines_kw, const RationingPolicy& policy);

  // Advances one step; returns aggregate served power in kW.
  double step(std::span<const double> requested_kw);

  const std::vector<Household>& households() const { return households_; }

 private:
  std::vector<Household> households_;
};

// Household population CSV: header `id, baseline_kw`. Returns baselines in
// file order.
std::vector<double> load_households(std::istream& source);

}  // namespace gridshed
