#include "elyte/cohort.hpp"

#include "elyte/error.hpp"
#include "elyte/forest.hpp"
#include "elyte/patient_io.hpp"
#include "elyte/reference_tables.hpp"
#include "elyte/serialize.hpp"
#include "elyte/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace elyte {

namespace {

struct FixtureSpec {
  const char* id;
  double lo;
  double hi;
  double missing_rate;
};

// per 100 g
constexpr FixtureSpec kFixture[] = {
    {"chloride", 0, 900, 0.10},   {"iron", 0, 6, 0.05},         {"phosphorus", 10, 400, 0.0},
    {"potassium", 30, 600, 0.02}, {"sodium", 0, 800, 0.0},      {"protein", 0, 25, 0.0},
    {"water", 0.01, 0.09, 0.0},   {"calories", 20, 500, 0.0},   {"carbohydrate", 0, 70, 0.0},
};

// background lab values: centre and day-to-day sd
struct Background {
  const char* analyte;
  double centre;
  double sd;
};
constexpr Background kBackground[] = {
    {"a_gap", 12.0, 1.0},   {"calcium", 9.5, 0.2},     {"chloride", 101.0, 1.5},
    {"co2", 25.5, 0.8},     {"creatinine", 0.75, 0.05}, {"phosphorus", 3.5, 0.2},
};

}  // namespace

Catalog fixture_catalog(std::size_t n_items, std::uint64_t seed) {
  std::vector<NutrientDef> defs;
  for (const auto& f : kFixture) defs.push_back({f.id, f.id, canonical_unit(f.id), "per 100 g"});
  Rng rng(seed, 0xCA7A);
  std::vector<FoodItemVector> items;
  for (std::size_t i = 0; i < n_items; ++i) {
    FoodItemVector it;
    char id[16];
    std::snprintf(id, sizeof id, "F%04zu", i + 1);
    it.item_id = id;
    it.name = "fixture item " + std::to_string(i + 1);
    it.serving_size = std::round(50.0 + 200.0 * rng.uniform());
    for (const auto& f : kFixture) {
      const double v = f.lo + (f.hi - f.lo) * rng.uniform();
      const bool miss = rng.uniform() < f.missing_rate;
      it.values.push_back(miss ? 0.0 : std::round(v * 1000.0) / 1000.0);
      it.missing.push_back(miss ? 1 : 0);
    }
    items.push_back(std::move(it));
  }
  return Catalog(std::move(defs), std::move(items));
}

void SynthCohortConfig::validate() const {
  if (n_patients < 1) fail(ErrorCode::InvalidConfig, "n_patients must be >= 1");
  if (n_days < 2) fail(ErrorCode::InvalidConfig, "n_days must be >= 2");
  if (lab_every_days < 1) fail(ErrorCode::InvalidConfig, "lab_every_days must be >= 1");
  if (meals_per_day < 1) fail(ErrorCode::InvalidConfig, "meals_per_day must be >= 1");
  if (background_noise < 0.0) fail(ErrorCode::InvalidConfig, "background_noise must be >= 0");
  if (baseline_spread < 0.0) fail(ErrorCode::InvalidConfig, "baseline_spread must be >= 0");
  if (!reference::intake_row(age_band)) fail(ErrorCode::InvalidConfig, "unknown age band '" + age_band + "'");
  for (const auto& d : dynamics) {
    if (!(d.carryover > 0.0 && d.carryover < 1.0)) fail(ErrorCode::InvalidConfig, d.analyte + ": carryover must be in (0, 1)");
    if (!(d.noise_sd >= 0.0)) fail(ErrorCode::InvalidConfig, d.analyte + ": noise sd must be >= 0");
    if (!(d.lo < d.hi)) fail(ErrorCode::InvalidConfig, d.analyte + ": empty clip range");
    if (d.intake_nutrient.empty()) fail(ErrorCode::InvalidConfig, d.analyte + ": no intake nutrient");
  }
}

SynthCohortConfig default_cohort_config(const Catalog& catalog, std::uint64_t seed, int n_patients, int n_days,
                                        double noise_fraction, double intake_effect) {
  SynthCohortConfig c;
  c.seed = seed;
  c.n_patients = n_patients;
  c.n_days = n_days;
  c.background_noise = noise_fraction > 0.0 ? 1.0 : 0.0;
  const std::pair<const char*, const char*> links[] = {{"sodium", "sodium"}, {"potassium", "potassium"}, {"bun", "protein"}};
  for (const auto& [analyte, nutrient] : links) {
    const auto k = catalog.feature_index(nutrient);
    if (!k) fail(ErrorCode::InvalidConfig, std::string("catalog lacks ") + nutrient);
    double s = 0.0;
    double ss = 0.0;
    for (const auto& it : catalog.items()) {
      const double v = it.is_missing(*k) ? 0.0 : it.per_serving(*k);
      s += v;
      ss += v * v;
    }
    const double n = static_cast<double>(catalog.size());
    const double mean = s / n;
    const double sd = std::sqrt(std::max(0.0, ss / n - mean * mean));
    const double meals = c.meals_per_day;
    const auto& r = reference::observed_range(analyte);
    AnalyteDynamics d;
    d.analyte = analyte;
    d.intake_nutrient = nutrient;
    d.baseline = r.mean;
    d.lo = r.hypo;
    d.hi = r.hyper;
    d.clearance = meals * mean;
    d.gain = sd > 0.0 ? intake_effect * (r.hyper - r.hypo) / (std::sqrt(meals) * sd) : 0.0;
    d.noise_sd = noise_fraction * (r.hyper - r.hypo);
    c.dynamics.push_back(d);
  }
  return c;
}

Cohort generate_cohort(const SynthCohortConfig& config, const Catalog& catalog) {
  config.validate();
  if (catalog.size() == 0) fail(ErrorCode::EmptyCatalog, "cohort needs a non-empty catalog");
  std::vector<std::size_t> intake_k;
  for (const auto& d : config.dynamics) {
    const auto k = catalog.feature_index(d.intake_nutrient);
    if (!k) fail(ErrorCode::InvalidConfig, "catalog lacks " + d.intake_nutrient);
    intake_k.push_back(*k);
  }

  Cohort out;
  out.config = config;
  for (int p = 0; p < config.n_patients; ++p) {
    Rng rng(config.seed, 1000 + static_cast<std::uint64_t>(p));
    PatientProfile profile;
    profile.patient_id = "p" + std::to_string(p + 1);
    profile.age_band = config.age_band;
    profile.weight_kg = 20.0;
    PatientRecord rec = make_patient(profile);

    std::vector<double> baseline;
    std::vector<double> serum;
    for (const auto& d : config.dynamics) {
      const double b = d.baseline + config.baseline_spread * (d.hi - d.lo) * (2.0 * rng.uniform() - 1.0);
      baseline.push_back(b);
      serum.push_back(std::clamp(b, d.lo, d.hi));
    }
    std::vector<double> background;
    for (const auto& b : kBackground) background.push_back(b.centre);

    for (int day = 0; day < config.n_days; ++day) {
      const Date date = add_days(config.start, day);
      if (day % config.lab_every_days == 0) {
        LabReport rep;
        rep.date = date;
        for (std::size_t j = 0; j < config.dynamics.size(); ++j) rep.results[config.dynamics[j].analyte] = serum[j];
        for (std::size_t j = 0; j < std::size(kBackground); ++j) {
          if (!rep.results.count(kBackground[j].analyte)) rep.results[kBackground[j].analyte] = background[j];
        }
        rec.labs.push_back(std::move(rep));
      }

      std::vector<double> intake(config.dynamics.size(), 0.0);
      for (int m = 1; m <= config.meals_per_day; ++m) {
        const auto& item = catalog.items()[rng.below(catalog.size())];
        IntakeLogEntry e;
        e.date = date;
        e.meal_index = m;
        e.item_id = item.item_id;
        e.grams = item.serving_size;
        rec.intake_log.push_back(e);
        for (std::size_t j = 0; j < intake.size(); ++j) {
          if (!item.is_missing(intake_k[j])) intake[j] += item.per_serving(intake_k[j]);
        }
      }
      IntakeLogEntry water;
      water.date = date;
      water.meal_index = config.meals_per_day + 1;
      water.water_liters = std::round((0.3 + 0.7 * rng.uniform()) * 100.0) / 100.0;
      rec.intake_log.push_back(water);

      for (std::size_t j = 0; j < config.dynamics.size(); ++j) {
        const auto& d = config.dynamics[j];
        const double noise = d.noise_sd > 0.0 ? d.noise_sd * rng.normal() : 0.0;
        const double next = d.carryover * serum[j] + (1.0 - d.carryover) * baseline[j] +
                            d.gain * (intake[j] - d.clearance) + noise;
        serum[j] = std::clamp(next, d.lo, d.hi);
      }
      for (std::size_t j = 0; j < background.size(); ++j) {
        const auto& b = kBackground[j];
        background[j] = b.centre + 0.5 * (background[j] - b.centre) + config.background_noise * b.sd * rng.normal();
      }
    }
    out.patients.push_back(std::move(rec));
  }
  return out;
}

void write_cohort(const Cohort& cohort, const std::filesystem::path& dir) {
  for (const auto& rec : cohort.patients) {
    const auto pdir = dir / rec.id();
    std::ostringstream labs;
    write_labs_csv(labs, rec.labs);
    atomic_write(pdir / "labs.csv", labs.str());
    std::ostringstream intake;
    write_intake_csv(intake, rec.intake_log);
    atomic_write(pdir / "intake.csv", intake.str());
    atomic_write(pdir / "profile.json", to_json(rec.profile).dump(2) + "\n");
  }
}

}  // namespace elyte
