#include "elyte/reference_tables.hpp"

#include "elyte/error.hpp"

namespace elyte::reference {

namespace {
constexpr std::nullopt_t ND = std::nullopt;
}

const std::vector<MandatoryElectrolyte>& standard_ranges() {
  static const std::vector<MandatoryElectrolyte> t{
      {"sodium", 135.0, 145.0, "mEq/L"},   {"potassium", 3.5, 5.0, "mEq/L"},  {"chloride", 95.0, 107.0, "mEq/L"},
      {"phosphate", 2.5, 4.5, "mg/dL"},    {"magnesium", 1.5, 2.9, "mg/dL"},  {"calcium", 8.5, 10.5, "mg/dL"},
      {"co2", 22.0, 29.0, "mEq/L"},        {"bun", 10.0, 20.0, "mg/dL"},      {"creatinine", 0.5, 1.0, "mg/dL"},
  };
  return t;
}

const MandatoryElectrolyte* standard_range(std::string_view analyte) {
  const std::string key = canonical_name(analyte);
  for (const auto& r : standard_ranges()) {
    if (r.analyte == key) return &r;
  }
  return nullptr;
}

const std::vector<std::string>& predicted_analytes() {
  static const std::vector<std::string> a{"sodium", "potassium", "bun"};
  return a;
}

const std::vector<IntakeRow>& intake_table() {
  // chloride, iron, phosphorus, potassium, sodium (mg/d); protein g/kg/d; water L/d
  static const std::vector<IntakeRow> t{
      {"0-6mo", {180, ND}, {0.27, 40}, {100, ND}, {400, ND}, {120, ND}, {1.52, ND}, {0.7, ND}},
      {"7-12mo", {570, ND}, {11, 40}, {275, ND}, {700, ND}, {370, ND}, {1.2, ND}, {0.8, ND}},
      {"1-3y", {1500, 2300}, {7, 40}, {460, 3000}, {3000, ND}, {1000, 1500}, {1.05, ND}, {1.3, ND}},
      {"4-8y", {1900, 2900}, {10, 40}, {500, 3000}, {3800, ND}, {1200, 1900}, {0.95, ND}, {1.7, ND}},
      {"male-9-13y", {2300, 3400}, {8, 40}, {1250, 4000}, {4500, ND}, {1500, 2200}, {0.95, ND}, {2.4, ND}},
      {"male-14-18y", {2300, 3600}, {11, 45}, {1250, 4000}, {4700, ND}, {1500, 2300}, {0.85, ND}, {3.3, ND}},
      {"female-9-13y", {2300, 3400}, {8, 40}, {1250, 4000}, {4500, ND}, {1500, 2200}, {0.95, ND}, {2.1, ND}},
      {"female-14-18y", {2300, 3600}, {15, 45}, {1250, 4000}, {4700, ND}, {1500, 2300}, {0.85, ND}, {2.3, ND}},
  };
  return t;
}

const IntakeRow* intake_row(std::string_view age_band) {
  for (const auto& r : intake_table()) {
    if (r.age_band == age_band) return &r;
  }
  return nullptr;
}

std::vector<NutrientOverride> example_patient_overrides() {
  const auto nm = BoundOverride::not_mandatory();
  const auto v = [](double x) { return BoundOverride::of(x); };
  return {
      {"chloride", nm, nm, "mg"},     {"iron", v(8), nm, "mg"},      {"phosphorus", nm, v(368), "mg"},
      {"potassium", nm, v(700), "mg"}, {"sodium", nm, nm, "mg"},      {"protein", v(38), nm, "g"},
      {"water", v(1.3), v(1.5), "L"},
  };
}

const std::vector<ValueRange>& observed_ranges() {
  static const std::vector<ValueRange> t{
      {"sodium", 127.0, 136.12, 145.0},
      {"potassium", 2.3, 3.86, 6.2},
      {"bun", 28.0, 79.89, 110.0},
  };
  return t;
}

const ValueRange& observed_range(std::string_view analyte) {
  const std::string key = canonical_name(analyte);
  for (const auto& r : observed_ranges()) {
    if (r.analyte == key) return r;
  }
  fail(ErrorCode::UnsupportedAnalyte, "no observed value range for '" + key + "'");
}

const std::vector<std::string>& lab_feature_set() {
  static const std::vector<std::string> f{"a_gap",  "calcium", "chloride",   "co2", "creatinine",
                                          "potassium", "sodium", "phosphorus", "bun"};
  return f;
}

}  // namespace elyte::reference
