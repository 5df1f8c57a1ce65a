#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace elyte {

class Service;

/// JSON routes:
///   POST /patients                         create from a profile
///   GET  /patients/{id}
///   POST /patients/{id}/meals              entry or {"entries": [...]}
///   POST /patients/{id}/labs
///   POST /patients/{id}/predict            {"date"?}; runs the daily cycle
///   GET  /patients/{id}/requirements
///   GET  /patients/{id}/recommendations?meal=&k=&date=&top_classes=
///   GET  /catalog/search?q=&limit=
/// Errors: 400 validation, 404 unknown patient or item, 409 DuplicateDate,
/// 422 NoFeasibleItem; body {"schema_version", "error", "message"}.
void register_routes(httplib::Server& server, Service& service);

/// Blocking server; `static_dir` (the built UI) is mounted at "/".
void serve(Service& service, const std::string& host, int port,
           const std::optional<std::filesystem::path>& static_dir = std::nullopt);

}  // namespace elyte
