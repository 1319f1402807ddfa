#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"

#include "envlab/api.hpp"
#include "envlab/catalog.hpp"
#include "envlab/error.hpp"

using namespace envlab;
using nlohmann::json;

namespace {

json session_body(std::uint64_t seed, const std::string& density = "uniform01",
                  const std::string& process = "halve-or-double") {
  return {{"density", density}, {"process", process}, {"seed", seed}};
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an envlab::Error");
  return ErrorCode::malformed_spec;
}

std::filesystem::path temp_log(const char* name) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove(path);
  return path;
}

}  // namespace

TEST_CASE("sessions deal deterministically per seed") {
  Api api;
  const std::string a = api.create_session(session_body(42))["id"];
  const std::string b = api.create_session(session_body(42))["id"];
  CHECK(a != b);
  for (int i = 0; i < 20; ++i) {
    const json da = api.deal(a);
    const json db = api.deal(b);
    CHECK(da["play_index"] == i);
    CHECK(da["y"] == db["y"]);
    CHECK(da["y"].get<double>() > 0.0);
    api.decide(a, {{"play_index", i}, {"action", "switch"}});
    api.decide(b, {{"play_index", i}, {"action", "stay"}});
  }
  const std::string c = api.create_session(session_body(43))["id"];
  CHECK(api.deal(c)["y"] != api.history(a)["plays"][0]["y"]);
}

TEST_CASE("decisions reveal the play and keep running totals") {
  Api api;
  const std::string id = api.create_session(session_body(7, "rayleigh_half"))["id"];
  double user = 0.0;
  double always = 0.0;
  double optimal = 0.0;
  for (int i = 0; i < 30; ++i) {
    const json deal = api.deal(id);
    CHECK_FALSE(deal.contains("coach"));
    const std::string action = i % 3 == 0 ? "stay" : "switch";
    const json result = api.decide(id, {{"play_index", i}, {"action", action}});
    CHECK(result["y"] == deal["y"]);
    const double b = result["b"];
    CHECK(b == result["z"].get<double>() - result["y"].get<double>());
    CHECK(result["realized_gain"] == (action == "switch" ? b : 0.0));
    const BenefitReport analytic = expected_benefit(catalog_lookup("rayleigh_half"), Process::halve_or_double, deal["y"]);
    CHECK(result["recommendation"]["decision"] == std::string(to_string(analytic.decision)));
    user += action == "switch" ? b : 0.0;
    always += b;
    optimal += analytic.decision == Decision::Switch ? b : 0.0;
    const json totals = result["totals"];
    CHECK(totals["user"] == user);
    CHECK(totals["always_switch"] == always);
    CHECK(totals["never_switch"] == 0.0);
    CHECK(totals["analytic_optimal"] == optimal);
  }
  const json history = api.history(id);
  CHECK(history["plays"].size() == 30);
  CHECK(history["totals"]["user"] == user);
  CHECK(history["pending"] == false);
}

TEST_CASE("session errors") {
  Api api;
  const std::string id = api.create_session(session_body(1))["id"];
  CHECK(code_of([&] { api.decide(id, {{"play_index", 0}, {"action", "switch"}}); }) == ErrorCode::session_conflict);
  api.deal(id);
  CHECK(code_of([&] { api.deal(id); }) == ErrorCode::session_conflict);
  CHECK(code_of([&] { api.decide(id, {{"play_index", 1}, {"action", "switch"}}); }) == ErrorCode::session_conflict);
  CHECK(code_of([&] { api.decide(id, {{"play_index", 0}, {"action", "maybe"}}); }) != ErrorCode::session_conflict);
  CHECK(code_of([&] { api.deal("s999"); }) == ErrorCode::unknown_session);
  CHECK(code_of([&] { api.history("nope"); }) == ErrorCode::unknown_session);
  CHECK(code_of([&] { api.create_session(session_body(1, "improper_exp")); }) ==
        ErrorCode::improper_density_unsampleable);
  CHECK(http_status(code_of([&] { api.create_session(session_body(1, "uniform01", "sideways")); })) == 400);

  CHECK(http_status(ErrorCode::unknown_session) == 404);
  CHECK(http_status(ErrorCode::session_conflict) == 409);
  CHECK(http_status(ErrorCode::malformed_spec) == 400);
  CHECK(http_status(ErrorCode::invalid_parameter) == 400);
}

TEST_CASE("blind and coached sessions") {
  Api api;
  json blind_body = session_body(5);
  blind_body["blind"] = true;
  const std::string blind = api.create_session(blind_body)["id"];
  const json hidden = api.deal(blind);
  CHECK_FALSE(hidden.contains("y"));
  CHECK(hidden["blind"] == true);
  CHECK(api.decide(blind, {{"play_index", 0}, {"action", "switch"}}).contains("y"));

  json coach_body = session_body(5);
  coach_body["coach"] = true;
  const std::string coached = api.create_session(coach_body)["id"];
  const json deal = api.deal(coached);
  REQUIRE(deal.contains("coach"));
  const json eval = api.eval({{"density", "uniform01"}, {"process", "halve-or-double"}, {"y", deal["y"]}});
  CHECK(deal["coach"]["decision"] == eval["decision"]);
}

TEST_CASE("replaying the session log reproduces totals") {
  const auto path = temp_log("envlab_test_sessions.jsonl");
  json before;
  std::string first;
  std::string second;
  {
    Api api(path.string());
    first = api.create_session(session_body(11, "broome_continuous", "double-only"))["id"];
    second = api.create_session(session_body(12, "broome_discrete"))["id"];
    for (int i = 0; i < 25; ++i) {
      api.deal(first);
      api.decide(first, {{"play_index", i}, {"action", i % 2 ? "switch" : "stay"}});
      api.deal(second);
      api.decide(second, {{"play_index", i}, {"action", "switch"}});
    }
    api.deal(first);  // undecided plays are not logged
    before = json{{"first", api.history(first)["totals"]}, {"second", api.history(second)["totals"]}};
  }
  {
    std::ifstream in(path);
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) {
      const json record = json::parse(line);
      CHECK(record.contains("realized_gain"));
      ++lines;
    }
    CHECK(lines == 50);
  }
  {
    std::ifstream in(path);
    const auto sessions = replay_log(in);
    REQUIRE(sessions.size() == 2);
    CHECK(to_json(sessions.at(first).totals()) == before["first"]);
    CHECK(to_json(sessions.at(second).totals()) == before["second"]);
  }
  Api restored(path.string());
  CHECK(restored.history(first)["totals"] == before["first"]);
  CHECK(restored.history(second)["totals"] == before["second"]);
  CHECK(restored.history(first)["plays"].size() == 25);
  const std::string fresh = restored.create_session(session_body(13))["id"];
  CHECK(fresh != first);
  CHECK(fresh != second);
  // Play continues where the log left off.
  const json next = restored.deal(first);
  CHECK(next["play_index"] == 25);
  std::filesystem::remove(path);
}

TEST_CASE("tampered logs are rejected") {
  const auto path = temp_log("envlab_test_tampered.jsonl");
  {
    Api api(path.string());
    const std::string id = api.create_session(session_body(3))["id"];
    api.deal(id);
    api.decide(id, {{"play_index", 0}, {"action", "stay"}});
  }
  std::string line;
  std::getline(std::ifstream(path) >> std::ws, line);
  json record = json::parse(line);
  record["y"] = record["y"].get<double>() + 0.125;
  std::ofstream(path) << record.dump() << '\n';
  std::ifstream in(path);
  CHECK(code_of([&] { replay_log(in); }) == ErrorCode::malformed_spec);
  std::filesystem::remove(path);
}

TEST_CASE("concurrent sessions stay independent") {
  Api api;
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(api.create_session(session_body(100))["id"]);
  std::vector<std::thread> workers;
  for (const auto& id : ids) {
    workers.emplace_back([&api, id] {
      for (int i = 0; i < 200; ++i) {
        api.deal(id);
        api.decide(id, {{"play_index", i}, {"action", "switch"}});
      }
    });
  }
  for (auto& w : workers) w.join();
  const json reference = api.history(ids[0])["totals"];
  for (const auto& id : ids) CHECK(api.history(id)["totals"] == reference);
}

TEST_CASE("HTTP service round trip") {
  Api api;
  HttpServer server(api);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread loop([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  const auto post = [&](const std::string& path, const json& body) {
    return client.Post(path, body.dump(), "application/json");
  };

  auto catalog = client.Get("/api/catalog");
  REQUIRE(catalog);
  CHECK(catalog->status == 200);
  CHECK(json::parse(catalog->body)["densities"].size() == 8);
  CHECK(catalog->get_header_value("Access-Control-Allow-Origin") == "*");

  const json eval_body{{"density", "uniform01"}, {"process", "halve-or-double"}, {"y", 0.3}};
  auto eval = post("/api/eval", eval_body);
  REQUIRE(eval);
  CHECK(eval->status == 200);
  CHECK(json::parse(eval->body) == api.eval(eval_body));

  auto table = post("/api/table", {{"density", "rayleigh_half"}, {"process", "double-only"}, {"start", 0.5}, {"stop", 1.0}, {"count", 6}});
  REQUIRE(table);
  CHECK(table->status == 200);
  CHECK(table->body.rfind(std::string(kTableHeader) + "\n", 0) == 0);
  CHECK(table->get_header_value("Content-Type").find("text/csv") == 0);

  auto roots = post("/api/roots", {{"density", "rayleigh_half"}, {"process", "double-only"}, {"lo", 0.1}, {"hi", 2}});
  REQUIRE(roots);
  CHECK(std::abs(json::parse(roots->body)["roots"][0]["y"].get<double>() - std::sqrt(std::log(2.0))) <= 1e-6);

  auto created = post("/api/session", session_body(42));
  REQUIRE(created);
  CHECK(created->status == 200);
  const std::string id = json::parse(created->body)["id"];
  auto deal = post("/api/session/" + id + "/deal", json::object());
  REQUIRE(deal);
  const json dealt = json::parse(deal->body);
  CHECK(dealt["play_index"] == 0);
  auto again = post("/api/session/" + id + "/deal", json::object());
  REQUIRE(again);
  CHECK(again->status == 409);
  CHECK(json::parse(again->body)["error"] == "session-conflict");
  auto decided = post("/api/session/" + id + "/decide", {{"play_index", 0}, {"action", "switch"}});
  REQUIRE(decided);
  CHECK(decided->status == 200);
  const json result = json::parse(decided->body);
  CHECK(result["y"] == dealt["y"]);
  CHECK(result["totals"]["always_switch"] == result["b"]);
  auto history = client.Get("/api/session/" + id + "/history");
  REQUIRE(history);
  CHECK(json::parse(history->body)["plays"].size() == 1);

  auto missing = client.Get("/api/session/zzz/history");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto malformed = client.Post("/api/eval", "{not json", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);
  CHECK(json::parse(malformed->body).contains("error"));
  auto bad_density = post("/api/eval", {{"density", "cauchy"}, {"process", "double-only"}, {"y", 1}});
  REQUIRE(bad_density);
  CHECK(bad_density->status == 400);
  CHECK(json::parse(bad_density->body)["error"] == "unknown-name");

  Api other_api;
  HttpServer clash(other_api);
  CHECK(code_of([&] { clash.bind("127.0.0.1", port); }) == ErrorCode::address_in_use);

  server.stop();
  loop.join();
}
