#include "elyte/http_api.hpp"

#include "elyte/error.hpp"
#include "elyte/serialize.hpp"
#include "elyte/service.hpp"

#include <httplib.h>

#include <charconv>

namespace elyte {

namespace {

constexpr const char* kJson = "application/json";

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", kJson);
}

template <class F>
httplib::Server::Handler handler(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, 200, f(req));
    } catch (const Error& e) {
      send(res, http_status(e.code()), error_json(to_string(e.code()), e.what()));
    } catch (const nlohmann::json::exception& e) {
      send(res, 400, error_json(to_string(ErrorCode::Parse), e.what()));
    } catch (const std::exception& e) {
      send(res, 500, error_json("Internal", e.what()));
    }
  };
}

Json body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("request body is not JSON: ") + e.what());
  }
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

std::optional<std::size_t> size_param(const httplib::Request& req, const char* name) {
  const auto v = param(req, name);
  if (!v) return std::nullopt;
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || p != v->data() + v->size()) fail(ErrorCode::Validation, std::string(name) + " must be a non-negative integer");
  return out;
}

std::optional<Date> date_field(const Json& j) {
  if (!j.contains("date") || j.at("date").is_null()) return std::nullopt;
  return parse_date(j.at("date").get<std::string>());
}

}  // namespace

void register_routes(httplib::Server& server, Service& service) {
  const std::string id = "/patients/([A-Za-z0-9_-]+)";

  server.Post("/patients", handler([&](const httplib::Request& req) {
                auto doc = body(req);
                if (!doc.contains("schema_version")) doc["schema_version"] = kSchemaVersion;
                return service.add_patient(profile_from_json(doc));
              }));

  server.Get(id, handler([&](const httplib::Request& req) { return service.show_patient(req.matches[1]); }));

  server.Post(id + "/meals", handler([&](const httplib::Request& req) {
                const auto doc = body(req);
                std::vector<IntakeLogEntry> entries;
                if (doc.contains("entries")) {
                  for (const auto& e : doc.at("entries")) entries.push_back(intake_entry_from_json(e));
                } else {
                  entries.push_back(intake_entry_from_json(doc));
                }
                return service.log_meals(req.matches[1], entries);
              }));

  server.Post(id + "/labs", handler([&](const httplib::Request& req) {
                return service.add_lab(req.matches[1], lab_from_json(body(req)));
              }));

  server.Post(id + "/predict", handler([&](const httplib::Request& req) {
                return service.run_cycle(req.matches[1], date_field(body(req)));
              }));

  server.Get(id + "/requirements", handler([&](const httplib::Request& req) { return service.requirements(req.matches[1]); }));

  server.Get(id + "/recommendations", handler([&](const httplib::Request& req) {
               const auto meal = size_param(req, "meal");
               if (!meal || *meal < 1) fail(ErrorCode::Validation, "query parameter meal >= 1 is required");
               const auto d = param(req, "date");
               return service.recommend(req.matches[1], static_cast<int>(*meal), size_param(req, "k"),
                                        d ? std::optional<Date>(parse_date(*d)) : std::nullopt,
                                        size_param(req, "top_classes"));
             }));

  server.Get("/catalog/search", handler([&](const httplib::Request& req) {
               return service.catalog_search(param(req, "q").value_or(""), size_param(req, "limit").value_or(20));
             }));
}

void serve(Service& service, const std::string& host, int port, const std::optional<std::filesystem::path>& static_dir) {
  httplib::Server server;
  register_routes(server, service);
  if (static_dir && !server.set_mount_point("/", static_dir->string())) {
    fail(ErrorCode::Io, "cannot serve static files from " + static_dir->string());
  }
  if (!server.listen(host, port)) fail(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace elyte
