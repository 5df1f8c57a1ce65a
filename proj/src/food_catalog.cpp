#include "elyte/food_catalog.hpp"

#include "elyte/csv.hpp"
#include "elyte/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

namespace elyte {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

struct Alias {
  std::string_view id;
  std::string_view fdc_name;
};

// FDC nutrient names that do not start with the canonical id.
constexpr std::array kAliases{
    Alias{"calories", "energy"},
    Alias{"chloride", "chlorine, cl"},
    Alias{"carbohydrate", "carbohydrate, by difference"},
    Alias{"protein", "protein"},
    Alias{"water", "water"},
};

bool name_matches(std::string_view feature_id, const std::string& fdc_name_lower) {
  const std::string id = lower(feature_id);
  if (fdc_name_lower == id) return true;
  if (fdc_name_lower.rfind(id + ",", 0) == 0) return true;
  if (fdc_name_lower.rfind(id + " (", 0) == 0) return true;
  for (const auto& a : kAliases) {
    if (a.id == id && (fdc_name_lower == a.fdc_name || fdc_name_lower.rfind(std::string(a.fdc_name) + " (", 0) == 0)) {
      return true;
    }
  }
  return false;
}

enum class RawUnit { ug, mg, g, kg, mL, L, kcal, kJ, other };

RawUnit parse_raw_unit(std::string_view text) {
  const std::string u = lower(trim(text));
  if (u == "ug" || u == "µg" || u == "mcg") return RawUnit::ug;
  if (u == "mg") return RawUnit::mg;
  if (u == "g") return RawUnit::g;
  if (u == "kg") return RawUnit::kg;
  if (u == "ml") return RawUnit::mL;
  if (u == "l") return RawUnit::L;
  if (u == "kcal") return RawUnit::kcal;
  if (u == "kj") return RawUnit::kJ;
  return RawUnit::other;
}

/// Multiplier taking `from` to `to`, or nullopt when not convertible.
/// Water mass converts to volume at 1 g per mL.
std::optional<double> conversion(RawUnit from, Unit to) {
  auto mass_in_g = [](RawUnit u) -> std::optional<double> {
    switch (u) {
      case RawUnit::ug: return 1e-6;
      case RawUnit::mg: return 1e-3;
      case RawUnit::g: return 1.0;
      case RawUnit::kg: return 1e3;
      default: return std::nullopt;
    }
  };
  switch (to) {
    case Unit::mg:
      if (auto f = mass_in_g(from)) return *f * 1e3;
      return std::nullopt;
    case Unit::g:
      if (auto f = mass_in_g(from)) return *f;
      return std::nullopt;
    case Unit::L:
      if (from == RawUnit::L) return 1.0;
      if (from == RawUnit::mL) return 1e-3;
      if (auto f = mass_in_g(from)) return *f * 1e-3;
      return std::nullopt;
    case Unit::kcal:
      if (from == RawUnit::kcal) return 1.0;
      if (from == RawUnit::kJ) return 1.0 / 4.184;
      return std::nullopt;
  }
  return std::nullopt;
}

struct SourceNutrient {
  std::string fdc_id;
  std::string name;
  double factor;  // raw amount -> canonical unit
};

}  // namespace

std::string_view to_string(Unit u) noexcept {
  switch (u) {
    case Unit::mg: return "mg";
    case Unit::g: return "g";
    case Unit::L: return "L";
    case Unit::kcal: return "kcal";
  }
  return "?";
}

Unit parse_unit(std::string_view text) {
  if (text == "mg") return Unit::mg;
  if (text == "g") return Unit::g;
  if (text == "L") return Unit::L;
  if (text == "kcal") return Unit::kcal;
  fail(ErrorCode::UnitMismatch, "unknown unit '" + std::string(text) + "'");
}

Unit canonical_unit(std::string_view nutrient_id) {
  const std::string id = lower(nutrient_id);
  if (id == "protein" || id == "carbohydrate" || id == "fat" || id == "fiber") return Unit::g;
  if (id == "water") return Unit::L;
  if (id == "calories" || id == "energy") return Unit::kcal;
  return Unit::mg;
}

const std::vector<std::string>& default_feature_whitelist() {
  static const std::vector<std::string> w{"chloride", "iron",  "phosphorus", "potassium",   "sodium",
                                          "protein",  "water", "calories",   "carbohydrate"};
  return w;
}

Catalog::Catalog(std::vector<NutrientDef> nutrients, std::vector<FoodItemVector> items)
    : nutrients_(std::move(nutrients)), items_(std::move(items)) {
  for (std::size_t i = 0; i < nutrients_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (nutrients_[i].id == nutrients_[j].id) fail(ErrorCode::Validation, "duplicate nutrient id " + nutrients_[i].id);
    }
  }
  by_id_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto& item = items_[i];
    if (item.values.size() != nutrients_.size()) {
      fail(ErrorCode::DimensionMismatch, "item " + item.item_id + " has " + std::to_string(item.values.size()) +
                                             " values, catalog has " + std::to_string(nutrients_.size()));
    }
    if (item.missing.empty()) item.missing.assign(nutrients_.size(), 0);
    if (item.missing.size() != nutrients_.size()) fail(ErrorCode::DimensionMismatch, "missing-flag length mismatch");
    for (double v : item.values) {
      if (!(v >= 0.0)) fail(ErrorCode::Validation, "item " + item.item_id + " has a negative or non-finite amount");
    }
    if (!(item.serving_size > 0.0)) fail(ErrorCode::Validation, "item " + item.item_id + " has no serving size");
    if (!by_id_.emplace(item.item_id, i).second) fail(ErrorCode::Validation, "duplicate item id " + item.item_id);
  }
}

std::optional<std::size_t> Catalog::feature_index(std::string_view nutrient_id) const {
  for (std::size_t i = 0; i < nutrients_.size(); ++i) {
    if (nutrients_[i].id == nutrient_id) return i;
  }
  return std::nullopt;
}

const FoodItemVector* Catalog::find(std::string_view item_id) const {
  auto it = by_id_.find(std::string(item_id));
  return it == by_id_.end() ? nullptr : &items_[it->second];
}

std::vector<const FoodItemVector*> Catalog::search(std::string_view query, std::size_t limit) const {
  const std::string q = lower(query);
  std::vector<const FoodItemVector*> hits;
  for (const auto& item : items_) {
    if (hits.size() >= limit) break;
    if (lower(item.name).find(q) != std::string::npos || item.item_id == query) hits.push_back(&item);
  }
  return hits;
}

const FoodItemVector& item_vector(const Catalog& catalog, std::string_view item_id) {
  if (const auto* item = catalog.find(item_id)) return *item;
  fail(ErrorCode::UnknownItem, "unknown item '" + std::string(item_id) + "'");
}

Catalog ingest_fdc(const FdcFiles& files, const std::vector<std::string>& whitelist) {
  const auto nutrient_table = csv::read_file(files.nutrient);
  const auto n_id = nutrient_table.require("id", "nutrient.csv");
  const auto n_name = nutrient_table.require("name", "nutrient.csv");
  const auto n_unit = nutrient_table.require("unit_name", "nutrient.csv");

  const std::size_t p = whitelist.size();
  std::vector<NutrientDef> defs;
  defs.reserve(p);
  // per feature: candidate source nutrients, most preferred first
  std::vector<std::vector<SourceNutrient>> sources(p);
  for (std::size_t k = 0; k < p; ++k) {
    const Unit target = canonical_unit(whitelist[k]);
    NutrientDef def{lower(whitelist[k]), whitelist[k], target, "per 100 g"};
    std::vector<SourceNutrient> exact;
    std::vector<SourceNutrient> converted;
    bool saw_inconvertible = false;
    for (const auto& row : nutrient_table.rows) {
      if (!name_matches(whitelist[k], lower(trim(row[n_name])))) continue;
      const RawUnit raw = parse_raw_unit(row[n_unit]);
      const auto factor = conversion(raw, target);
      if (!factor) {
        saw_inconvertible = true;
        continue;
      }
      SourceNutrient src{trim(row[n_id]), trim(row[n_name]), *factor};
      (*factor == 1.0 ? exact : converted).push_back(std::move(src));
    }
    if (exact.empty() && converted.empty() && saw_inconvertible) {
      fail(ErrorCode::UnitMismatch, "nutrient '" + whitelist[k] + "' is reported in a unit that cannot be converted to " +
                                        std::string(to_string(target)));
    }
    if (!exact.empty()) def.name = exact.front().name;
    else if (!converted.empty()) def.name = converted.front().name;
    sources[k] = std::move(exact);
    sources[k].insert(sources[k].end(), converted.begin(), converted.end());
    defs.push_back(std::move(def));
  }

  std::map<std::string, std::pair<std::size_t, std::size_t>> source_slot;  // fdc nutrient id -> (feature, rank)
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t r = 0; r < sources[k].size(); ++r) source_slot.emplace(sources[k][r].fdc_id, std::make_pair(k, r));
  }

  const auto food_table = csv::read_file(files.food);
  const auto f_id = food_table.require("fdc_id", "food.csv");
  const auto f_desc = food_table.require("description", "food.csv");
  const auto f_serving = food_table.column("serving_size");
  const auto f_basis = food_table.column("basis");

  struct Pending {
    FoodItemVector item;
    double basis_factor = 1.0;  // raw amount -> per 100 g
    std::vector<std::size_t> rank;  // best source rank seen per feature
  };
  std::vector<Pending> pending;
  std::unordered_map<std::string, std::size_t> pending_index;
  for (const auto& row : food_table.rows) {
    Pending pend;
    pend.item.item_id = trim(row[f_id]);
    pend.item.name = trim(row[f_desc]);
    pend.item.values.assign(p, 0.0);
    pend.item.missing.assign(p, 1);
    pend.rank.assign(p, SIZE_MAX);
    if (f_serving && !trim(row[*f_serving]).empty()) {
      pend.item.serving_size = csv::to_double(row[*f_serving], "food.csv serving_size");
      if (!(pend.item.serving_size > 0.0)) fail(ErrorCode::Validation, "non-positive serving size for " + pend.item.item_id);
    }
    if (f_basis) {
      const std::string basis = lower(trim(row[*f_basis]));
      if (basis == "serving" || basis == "per serving") pend.basis_factor = 100.0 / pend.item.serving_size;
      else if (!(basis.empty() || basis == "100g" || basis == "100 g" || basis == "per 100 g")) {
        fail(ErrorCode::Parse, "food.csv: unknown basis '" + basis + "'");
      }
    }
    if (!pending_index.emplace(pend.item.item_id, pending.size()).second) {
      fail(ErrorCode::Validation, "food.csv: duplicate fdc_id " + pend.item.item_id);
    }
    pending.push_back(std::move(pend));
  }

  const auto fn_table = csv::read_file(files.food_nutrient);
  const auto fn_food = fn_table.require("fdc_id", "food_nutrient.csv");
  const auto fn_nutrient = fn_table.require("nutrient_id", "food_nutrient.csv");
  const auto fn_amount = fn_table.require("amount", "food_nutrient.csv");
  for (const auto& row : fn_table.rows) {
    auto slot = source_slot.find(trim(row[fn_nutrient]));
    if (slot == source_slot.end()) continue;
    auto food = pending_index.find(trim(row[fn_food]));
    if (food == pending_index.end()) continue;
    const auto [k, rank] = slot->second;
    auto& pend = pending[food->second];
    if (rank >= pend.rank[k]) continue;
    const double amount = csv::to_double(row[fn_amount], "food_nutrient.csv amount");
    if (amount < 0.0) fail(ErrorCode::NegativeAmount, "negative amount for food " + pend.item.item_id);
    pend.item.values[k] = amount * sources[k][rank].factor * pend.basis_factor;
    pend.item.missing[k] = 0;
    pend.rank[k] = rank;
  }

  std::vector<FoodItemVector> items;
  for (auto& pend : pending) {
    const bool any = std::any_of(pend.item.missing.begin(), pend.item.missing.end(), [](std::uint8_t m) { return m == 0; });
    if (any) items.push_back(std::move(pend.item));
  }
  if (items.empty()) fail(ErrorCode::EmptyCatalog, "no food item reports any whitelisted nutrient");
  return Catalog(std::move(defs), std::move(items));
}

}  // namespace elyte
