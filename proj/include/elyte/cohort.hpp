#pragma once

#include "elyte/dates.hpp"
#include "elyte/food_catalog.hpp"
#include "elyte/patient.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace elyte {

/// Random catalog over the default feature whitelist: per-100 g amounts in
/// plausible ranges, serving sizes 50-250 g, a few unreported values.
Catalog fixture_catalog(std::size_t n_items, std::uint64_t seed);

/// next = carryover * today + (1 - carryover) * baseline
///        + gain * (intake_today - clearance) + noise, clipped to [lo, hi].
struct AnalyteDynamics {
  std::string analyte;
  std::string intake_nutrient;  // catalog feature that drives the analyte
  double carryover = 0.3;
  double gain = 0.0;
  double clearance = 0.0;
  double baseline = 0.0;
  double noise_sd = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct SynthCohortConfig {
  int n_patients = 5;
  int n_days = 120;
  std::uint64_t seed = 7;
  int lab_every_days = 1;
  int meals_per_day = 3;
  Date start = parse_date("2024-01-01");
  std::string age_band = "4-8y";
  double baseline_spread = 0.03;  // per-patient baseline offset, fraction of [lo, hi]
  double background_noise = 1.0;  // scale of the random walk on the other lab analytes
  std::vector<AnalyteDynamics> dynamics;

  void validate() const;  // throws InvalidConfig
};

/// Dynamics for sodium, potassium and BUN bounded by their observed ranges.
/// Gain and clearance are calibrated from `catalog` so a one-sd swing in
/// daily intake moves the analyte by `intake_effect` of its range; noise sd
/// is `noise_fraction` of the range.
SynthCohortConfig default_cohort_config(const Catalog& catalog, std::uint64_t seed = 7, int n_patients = 5,
                                        int n_days = 120, double noise_fraction = 0.05, double intake_effect = 0.2);

struct Cohort {
  SynthCohortConfig config;
  std::vector<PatientRecord> patients;
};

/// Deterministic per seed: meals drawn uniformly from the catalog at one
/// serving each, labs on the cadence, serum values from the dynamics.
Cohort generate_cohort(const SynthCohortConfig& config, const Catalog& catalog);

/// <dir>/<patient_id>/{profile.json,labs.csv,intake.csv}
void write_cohort(const Cohort& cohort, const std::filesystem::path& dir);

}  // namespace elyte
