#include "elyte/workspace.hpp"

#include "elyte/error.hpp"
#include "elyte/serialize.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace elyte {

void atomic_write(const fs::path& path, const std::string& contents) {
  static std::atomic<unsigned long> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + "." + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".tmp";

  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) fail(ErrorCode::Io, "cannot create " + tmp.string() + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < contents.size()) {
    const auto n = ::write(fd, contents.data() + done, contents.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      fs::remove(tmp, ec);
      fail(ErrorCode::Io, "cannot write " + tmp.string() + ": " + std::strerror(err));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    fs::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot flush " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot replace " + path.string());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

Json read_json(const fs::path& path) {
  const auto text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& doc) { atomic_write(path, doc.dump(2) + "\n"); }

/// Ids become file names, so keep them to a safe alphabet.
const std::string& checked_id(const std::string& id) {
  const bool ok = !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
  if (!ok) fail(ErrorCode::Validation, "invalid id '" + id + "' (letters, digits, '_' and '-' only)");
  return id;
}

}  // namespace

// ---------------------------------------------------------------------------
// config

Json to_json(const WorkspaceConfig& c) {
  Json trees = c.grid.n_trees;
  Json depth = Json::array();
  for (const auto& d : c.grid.max_depth) depth.push_back(d ? Json(*d) : Json(nullptr));
  Json mf = Json::array();
  for (const auto& m : c.grid.max_features) mf.push_back(m.label());
  return {{"schema_version", kSchemaVersion},
          {"rho", c.rho},
          {"tau_days", c.tau_days},
          {"classes", c.classes},
          {"k", c.k},
          {"top_classes", c.top_classes},
          {"window_size", c.window_size},
          {"target_offset", c.target_offset},
          {"cluster_seed", c.cluster_seed},
          {"grid",
           {{"n_trees", trees},
            {"max_depth", depth},
            {"min_samples_leaf", c.grid.min_samples_leaf},
            {"max_features", mf},
            {"seed", c.grid.seed}}},
          {"cv", {{"folds", c.cv.folds}, {"train_fraction", c.cv.train_fraction}, {"threads", c.cv.threads}}}};
}

WorkspaceConfig config_from_json(const Json& doc) {
  check_schema(doc, "config");
  WorkspaceConfig c;
  try {
    c.rho = doc.value("rho", c.rho);
    c.tau_days = doc.value("tau_days", c.tau_days);
    c.classes = doc.value("classes", c.classes);
    c.k = doc.value("k", c.k);
    c.top_classes = doc.value("top_classes", c.top_classes);
    c.window_size = doc.value("window_size", c.window_size);
    c.target_offset = doc.value("target_offset", c.target_offset);
    c.cluster_seed = doc.value("cluster_seed", c.cluster_seed);
    if (doc.contains("grid")) {
      const auto& g = doc.at("grid");
      if (g.contains("n_trees")) c.grid.n_trees = g.at("n_trees").get<std::vector<int>>();
      if (g.contains("max_depth")) {
        c.grid.max_depth.clear();
        for (const auto& d : g.at("max_depth")) {
          c.grid.max_depth.push_back(d.is_null() ? std::nullopt : std::optional<int>(d.get<int>()));
        }
      }
      if (g.contains("min_samples_leaf")) c.grid.min_samples_leaf = g.at("min_samples_leaf").get<std::vector<int>>();
      if (g.contains("max_features")) {
        c.grid.max_features.clear();
        for (const auto& m : g.at("max_features")) {
          c.grid.max_features.push_back(MaxFeatures::parse(m.is_string() ? m.get<std::string>() : m.dump()));
        }
      }
      c.grid.seed = g.value("seed", c.grid.seed);
    }
    if (doc.contains("cv")) {
      const auto& cv = doc.at("cv");
      c.cv.folds = cv.value("folds", c.cv.folds);
      c.cv.train_fraction = cv.value("train_fraction", c.cv.train_fraction);
      c.cv.threads = cv.value("threads", c.cv.threads);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("config: ") + e.what());
  }
  if (!(c.rho > 0.0 && c.rho < 1.0)) fail(ErrorCode::InvalidRho, "rho must lie in (0, 1)");
  if (c.classes < 1 || c.k < 1 || c.top_classes < 1 || c.tau_days < 1 || c.window_size < 1 || c.target_offset < 1) {
    fail(ErrorCode::InvalidConfig, "classes, k, top_classes, tau_days, window_size and target_offset must be >= 1");
  }
  return c;
}

// ---------------------------------------------------------------------------
// stores

Workspace::Workspace(fs::path root) : root_(std::move(root)) {}

WorkspaceConfig Workspace::config() const {
  const auto path = root_ / "config.json";
  if (!fs::exists(path)) return {};
  return config_from_json(read_json(path));
}

void Workspace::save_config(const WorkspaceConfig& config) const { write_json(root_ / "config.json", to_json(config)); }

bool Workspace::has_catalog() const { return fs::exists(root_ / "catalog.json"); }

Catalog Workspace::load_catalog() const {
  if (!has_catalog()) fail(ErrorCode::EmptyCatalog, "workspace has no catalog; run ingest first");
  return catalog_from_json(read_json(root_ / "catalog.json"));
}

void Workspace::save_catalog(const Catalog& catalog) const { write_json(root_ / "catalog.json", to_json(catalog)); }

bool Workspace::has_patient(const std::string& id) const {
  return fs::exists(root_ / "patients" / (checked_id(id) + ".json"));
}

PatientRecord Workspace::load_patient(const std::string& id) const {
  if (!has_patient(id)) fail(ErrorCode::UnknownPatient, "unknown patient '" + id + "'");
  return record_from_json(read_json(root_ / "patients" / (id + ".json")));
}

void Workspace::save_patient(const PatientRecord& record) const {
  write_json(root_ / "patients" / (checked_id(record.id()) + ".json"), to_json(record));
}

std::vector<std::string> Workspace::patient_ids() const {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(root_ / "patients", ec)) {
    if (e.path().extension() == ".json") ids.push_back(e.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::optional<CycleState> Workspace::load_cycle(const std::string& id) const {
  const auto path = root_ / "cycles" / (checked_id(id) + ".json");
  if (!fs::exists(path)) return std::nullopt;
  const auto doc = read_json(path);
  check_schema(doc, "cycle");
  try {
    CycleState s;
    s.date = parse_date(doc.at("date").get<std::string>());
    s.predictions = predictions_from_json(doc.at("predictions"));
    s.requirements = requirements_from_json(doc.at("requirements"));
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void Workspace::save_cycle(const std::string& id, const CycleState& state) const {
  const Json doc = {{"schema_version", kSchemaVersion},
                    {"date", format_date(state.date)},
                    {"predictions", to_json(state.predictions)},
                    {"requirements", to_json(state.requirements)}};
  write_json(root_ / "cycles" / (checked_id(id) + ".json"), doc);
}

bool Workspace::has_model(const std::string& analyte) const {
  return fs::exists(root_ / "models" / (checked_id(analyte) + ".json"));
}

ForestModel Workspace::load_model(const std::string& analyte) const {
  if (!has_model(analyte)) fail(ErrorCode::UntrainedAnalyte, "no trained model for '" + analyte + "'; run train first");
  return model_from_json(read_json(root_ / "models" / (analyte + ".json")));
}

void Workspace::save_model(const ForestModel& model) const {
  write_json(root_ / "models" / (checked_id(model.target_analyte) + ".json"), to_json(model));
}

std::map<std::string, ForestModel> Workspace::load_models() const {
  std::map<std::string, ForestModel> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(root_ / "models", ec)) {
    if (e.path().extension() != ".json") continue;
    auto m = model_from_json(read_json(e.path()));
    out.emplace(m.target_analyte, std::move(m));
  }
  return out;
}

}  // namespace elyte
