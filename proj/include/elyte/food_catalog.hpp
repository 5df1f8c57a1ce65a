#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace elyte {

enum class Unit { mg, g, L, kcal };

std::string_view to_string(Unit u) noexcept;
Unit parse_unit(std::string_view text);  // throws UnitMismatch

struct NutrientDef {
  std::string id;    // canonical feature name, e.g. "sodium"
  std::string name;  // display name
  Unit unit = Unit::mg;
  std::string per_basis = "per 100 g";

  bool operator==(const NutrientDef&) const = default;
};

struct FoodItemVector {
  std::string item_id;
  std::string name;
  std::vector<double> values;         // per 100 g, one per catalog nutrient
  std::vector<std::uint8_t> missing;  // 1 = nutrient not reported for this item
  double serving_size = 100.0;        // grams

  bool is_missing(std::size_t k) const { return missing[k] != 0; }
  /// Amount of feature k in one serving.
  double per_serving(std::size_t k) const { return values[k] * serving_size / 100.0; }

  bool operator==(const FoodItemVector&) const = default;
};

/// Immutable after construction; every item vector follows `nutrients()` order.
class Catalog {
public:
  Catalog() = default;
  Catalog(std::vector<NutrientDef> nutrients, std::vector<FoodItemVector> items);

  const std::vector<NutrientDef>& nutrients() const noexcept { return nutrients_; }
  const std::vector<FoodItemVector>& items() const noexcept { return items_; }
  std::size_t feature_count() const noexcept { return nutrients_.size(); }
  std::size_t size() const noexcept { return items_.size(); }

  std::optional<std::size_t> feature_index(std::string_view nutrient_id) const;
  const FoodItemVector* find(std::string_view item_id) const;
  bool contains(std::string_view item_id) const { return find(item_id) != nullptr; }

  /// Case-insensitive substring match on item name, in catalog order.
  std::vector<const FoodItemVector*> search(std::string_view query, std::size_t limit = 50) const;

private:
  std::vector<NutrientDef> nutrients_;
  std::vector<FoodItemVector> items_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// Lookup by id; throws UnknownItem.
const FoodItemVector& item_vector(const Catalog& catalog, std::string_view item_id);

/// Chloride, iron, phosphorus, potassium, sodium, protein, water, plus
/// calories and carbohydrate for display.
const std::vector<std::string>& default_feature_whitelist();

/// Canonical unit each whitelisted nutrient is stored in (sodium -> mg, water -> L, ...).
Unit canonical_unit(std::string_view nutrient_id);

struct FdcFiles {
  std::filesystem::path food;            // fdc_id, description [, serving_size, basis]
  std::filesystem::path nutrient;        // id, name, unit_name
  std::filesystem::path food_nutrient;   // fdc_id, nutrient_id, amount
};

/// Build a catalog from a FoodData Central style export. Nutrient order
/// follows `whitelist`; items with none of the whitelisted nutrients are
/// dropped; all amounts are rescaled to per 100 g.
Catalog ingest_fdc(const FdcFiles& files, const std::vector<std::string>& whitelist = default_feature_whitelist());

}  // namespace elyte
