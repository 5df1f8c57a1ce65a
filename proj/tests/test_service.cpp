#include "elyte/http_api.hpp"
#include "elyte/serialize.hpp"
#include "elyte/service.hpp"
#include "elyte/workspace.hpp"

#include <doctest.h>
#include <httplib.h>

#include "support.hpp"

#include <sys/wait.h>

#include <thread>

using namespace elyte;
namespace fs = std::filesystem;

namespace {

/// Small trained workspace shared by every case; copied before mutation.
const fs::path& trained_workspace() {
  static support::TempDir dir;
  static const bool ready = [] {
    Service svc(dir.path());
    WorkspaceConfig cfg;
    cfg.grid.n_trees = {8};
    cfg.grid.max_depth = {6};
    cfg.grid.min_samples_leaf = {1};
    cfg.grid.max_features = {MaxFeatures::third()};
    cfg.cv.folds = 3;
    cfg.cv.threads = 1;
    cfg.classes = 4;
    svc.workspace().save_config(cfg);
    SynthOptions o;
    o.patients = 2;
    o.days = 30;
    o.catalog_items = 60;
    svc.synth_gen(o);
    svc.train({"sodium", "potassium", "bun"});
    return true;
  }();
  (void)ready;
  return dir.path();
}

void copy_workspace(const fs::path& to) {
  fs::copy(trained_workspace(), to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

/// Serves a workspace on an ephemeral local port for the lifetime of the object.
class TestServer {
public:
  explicit TestServer(const fs::path& root) : service_(root) {
    register_routes(server_, service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

private:
  Service service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

struct Reply {
  int status = 0;
  Json body;
};

Reply reply(const httplib::Result& r) {
  REQUIRE(r);
  return {r->status, Json::parse(r->body)};
}

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliRun cli(const fs::path& ws, const std::string& args) {
  support::TempDir io;
  const auto out = io / "out";
  const auto err = io / "err";
  const std::string cmd = std::string("'") + ELYTE_CLI_PATH + "' -w '" + ws.string() + "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int rc = std::system(cmd.c_str());
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, support::read_file(out), support::read_file(err)};
}

std::string first_item_id(const fs::path& ws) { return Workspace(ws).load_catalog().items().front().item_id; }

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("status mapping") {
    CHECK(http_status(ErrorCode::UnknownPatient) == 404);
    CHECK(http_status(ErrorCode::UnknownItem) == 404);
    CHECK(http_status(ErrorCode::DuplicateDate) == 409);
    CHECK(http_status(ErrorCode::NoFeasibleItem) == 422);
    CHECK(http_status(ErrorCode::Validation) == 400);
    CHECK(http_status(ErrorCode::NegativeAmount) == 400);
    CHECK(http_status(ErrorCode::Io) == 500);
  }

  TEST_CASE("http api reads its own writes") {
    support::TempDir dir;
    copy_workspace(dir.path());
    TestServer server(dir.path());
    auto c = server.client();
    const auto item = first_item_id(dir.path());

    const Json profile = {{"patient_id", "u9"}, {"age_band", "4-8y"}, {"weight_kg", 20}, {"liked_items", {item}}};
    auto r = reply(c.Post("/patients", profile.dump(), "application/json"));
    CHECK(r.status == 200);
    CHECK(r.body.at("profile").at("patient_id") == "u9");

    r = reply(c.Get("/patients/u9"));
    CHECK(r.status == 200);
    CHECK(r.body.at("intake_log").empty());

    const Json meal = {{"date", "2024-02-01"}, {"meal_index", 1}, {"item_id", item}, {"grams", 150}};
    r = reply(c.Post("/patients/u9/meals", meal.dump(), "application/json"));
    CHECK(r.status == 200);
    const Json more = {{"entries",
                        {{{"date", "2024-02-01"}, {"meal_index", 2}, {"water_liters", 0.25}},
                         {{"date", "2024-02-01"}, {"meal_index", 2}, {"nutrients", {{"kcl", 1.5}}}}}}};
    r = reply(c.Post("/patients/u9/meals", more.dump(), "application/json"));
    CHECK(r.status == 200);

    const Json lab = {{"date", "2024-02-01"}, {"results", {{"sodium", 139}, {"potassium", 4.1}}}};
    CHECK(reply(c.Post("/patients/u9/labs", lab.dump(), "application/json")).status == 200);
    CHECK(reply(c.Post("/patients/u9/labs", lab.dump(), "application/json")).status == 200);

    r = reply(c.Get("/patients/u9"));
    CHECK(r.body.at("intake_log").size() == 3);
    CHECK(r.body.at("labs").size() == 1);
    CHECK(r.body.at("labs")[0].at("results").at("potassium") == 4.1);

    r = reply(c.Get("/catalog/search?q=&limit=3"));
    CHECK(r.status == 200);
    CHECK(r.body.at("items").size() == 3);
  }

  TEST_CASE("http error statuses") {
    support::TempDir dir;
    copy_workspace(dir.path());
    TestServer server(dir.path());
    auto c = server.client();
    const auto item = first_item_id(dir.path());

    CHECK(reply(c.Get("/patients/nobody")).status == 404);
    const auto missing = reply(c.Get("/patients/nobody/requirements"));
    CHECK(missing.status == 404);
    CHECK(missing.body.at("error") == "UnknownPatient");

    const Json dup = {{"patient_id", "p1"}, {"age_band", "4-8y"}};
    CHECK(reply(c.Post("/patients", dup.dump(), "application/json")).status == 400);
    const Json band = {{"patient_id", "u2"}, {"age_band", "adult"}};
    CHECK(reply(c.Post("/patients", band.dump(), "application/json")).status == 400);
    CHECK(reply(c.Post("/patients", "{oops", "application/json")).status == 400);

    const Json unknown_item = {{"date", "2024-02-01"}, {"item_id", "NOPE"}, {"grams", 10}};
    CHECK(reply(c.Post("/patients/p1/meals", unknown_item.dump(), "application/json")).status == 404);
    const Json negative = {{"date", "2024-02-01"}, {"item_id", item}, {"grams", -10}};
    CHECK(reply(c.Post("/patients/p1/meals", negative.dump(), "application/json")).status == 400);

    const Json lab = {{"date", "2024-01-05"}, {"results", {{"sodium", 99}}}};
    const auto conflict = reply(c.Post("/patients/p1/labs", lab.dump(), "application/json"));
    CHECK(conflict.status == 409);
    CHECK(conflict.body.at("error") == "DuplicateDate");

    CHECK(reply(c.Get("/patients/p1/recommendations")).status == 400);
    CHECK(reply(c.Get("/patients/p1/recommendations?meal=x")).status == 400);

    const Json tight = {{"patient_id", "tight"},
                        {"age_band", "4-8y"},
                        {"nutrient_overrides", {{{"nutrient", "potassium"}, {"ai", "NM"}, {"mi", 0}}}}};
    CHECK(reply(c.Post("/patients", tight.dump(), "application/json")).status == 200);
    const auto none = reply(c.Get("/patients/tight/recommendations?meal=1&date=2024-02-01&top_classes=4"));
    CHECK(none.status == 422);
    CHECK(none.body.at("error") == "NoFeasibleItem");
  }

  TEST_CASE("one optimisation per patient per day") {
    support::TempDir dir;
    copy_workspace(dir.path());
    TestServer server(dir.path());
    auto c = server.client();

    auto req = reply(c.Get("/patients/p1/requirements"));
    CHECK(req.status == 200);
    CHECK(req.body.at("cycle_date").is_null());

    const auto first = reply(c.Post("/patients/p1/predict", "", "application/json"));
    REQUIRE(first.status == 200);
    CHECK(first.body.at("reused") == false);
    CHECK(first.body.at("predictions").at("predictions").size() == 3);
    const auto again = reply(c.Post("/patients/p1/predict", "", "application/json"));
    CHECK(again.body.at("reused") == true);
    CHECK(again.body.at("requirements") == first.body.at("requirements"));

    req = reply(c.Get("/patients/p1/requirements"));
    CHECK(req.body.at("cycle_date") == first.body.at("date"));
    CHECK(req.body.at("nutrients") == first.body.at("requirements").at("nutrients"));

    const auto rec = reply(c.Get("/patients/p1/recommendations?meal=1&k=3&date=2024-01-31"));
    CHECK(rec.status == 200);
    CHECK(rec.body.at("items").size() <= 3);
  }

  TEST_CASE("cli and http give the same documents") {
    support::TempDir a, b;
    copy_workspace(a.path());
    copy_workspace(b.path());
    TestServer server(b.path());
    auto c = server.client();
    const auto item = first_item_id(a.path());

    auto same = [](const CliRun& run, const Reply& http) {
      CHECK_MESSAGE(run.exit_code == 0, run.err);
      CHECK(http.status == 200);
      CHECK(Json::parse(run.out) == http.body);
    };

    same(cli(a.path(), "patient add --id u7 --age-band 4-8y --weight 21"),
         reply(c.Post("/patients", Json({{"patient_id", "u7"}, {"age_band", "4-8y"}, {"weight_kg", 21}}).dump(),
                      "application/json")));
    same(cli(a.path(), "meal log --patient u7 --date 2024-02-01 --meal 1 --item " + item + " --grams 80"),
         reply(c.Post("/patients/u7/meals",
                      Json({{"date", "2024-02-01"}, {"meal_index", 1}, {"item_id", item}, {"grams", 80}}).dump(),
                      "application/json")));
    same(cli(a.path(), "lab add --patient u7 --date 2024-02-01 --set sodium=141 --set bun=18"),
         reply(c.Post("/patients/u7/labs",
                      Json({{"date", "2024-02-01"}, {"results", {{"sodium", 141}, {"bun", 18}}}}).dump(),
                      "application/json")));
    same(cli(a.path(), "patient show --id u7"), reply(c.Get("/patients/u7")));
    same(cli(a.path(), "optimize --patient p1"), reply(c.Post("/patients/p1/predict", "", "application/json")));
    same(cli(a.path(), "requirements --patient p1"), reply(c.Get("/patients/p1/requirements")));
    same(cli(a.path(), "recommend --patient p1 --meal 1 --k 4 --date 2024-01-31"),
         reply(c.Get("/patients/p1/recommendations?meal=1&k=4&date=2024-01-31")));

    const auto bad = cli(a.path(), "patient show --id nobody");
    CHECK(bad.exit_code == 1);
    CHECK(Json::parse(bad.err).at("error") == "UnknownPatient");
  }
}
