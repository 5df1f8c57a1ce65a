#pragma once

// Clinical reference data: standard serum ranges, dietary reference intakes
// by age band, an example patient override set, and the observed value
// range of the predicted analytes.

#include "elyte/patient.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elyte::reference {

/// Standard serum range of every tabulated analyte (sodium, potassium,
/// chloride, phosphate, magnesium, calcium, co2, bun, creatinine).
const std::vector<MandatoryElectrolyte>& standard_ranges();
const MandatoryElectrolyte* standard_range(std::string_view analyte);

/// The analytes the forecaster predicts.
const std::vector<std::string>& predicted_analytes();

struct IntakeCell {
  std::optional<double> ai;
  std::optional<double> mi;
};

struct IntakeRow {
  std::string age_band;
  IntakeCell chloride, iron, phosphorus, potassium, sodium, protein_per_kg, water;
};

/// Dietary reference intakes. Keys: 0-6mo, 7-12mo, 1-3y, 4-8y, male-9-13y,
/// male-14-18y, female-9-13y, female-14-18y.
const std::vector<IntakeRow>& intake_table();
const IntakeRow* intake_row(std::string_view age_band);

/// Per-patient overrides recorded for the 5-year-old example patient
/// (NM -> not mandatory).
std::vector<NutrientOverride> example_patient_overrides();

/// Observed value range of the predicted analytes (hypo, mean, hyper).
struct ValueRange {
  std::string analyte;
  double hypo;
  double mean;
  double hyper;
};
const std::vector<ValueRange>& observed_ranges();
const ValueRange& observed_range(std::string_view analyte);

/// Serum analytes used as lab features for every predicted analyte.
const std::vector<std::string>& lab_feature_set();

}  // namespace elyte::reference
