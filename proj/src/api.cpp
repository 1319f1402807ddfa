#include "envlab/api.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "httplib.h"

#include "envlab/catalog.hpp"
#include "envlab/error.hpp"

namespace envlab {

using nlohmann::json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ENVLAB_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t seed = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec == std::errc{} && ptr == text.data() + text.size()) return seed;
  }
  return 1;
}

std::vector<double> make_grid(const Grid& grid) {
  if (grid.count == 0) throw Error(ErrorCode::invalid_parameter, "empty grid: count is 0");
  if (!std::isfinite(grid.start) || !std::isfinite(grid.stop) || !(grid.start > 0.0) ||
      grid.stop < grid.start) {
    throw Error(ErrorCode::invalid_parameter, "empty grid: need 0 < start <= stop");
  }
  std::vector<double> ys;
  ys.reserve(grid.count);
  if (grid.count == 1) {
    ys.push_back(grid.start);
    return ys;
  }
  const double steps = static_cast<double>(grid.count - 1);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double t = static_cast<double>(i) / steps;
    if (i + 1 == grid.count) {
      ys.push_back(grid.stop);
    } else if (grid.log_spaced) {
      ys.push_back(grid.start * std::pow(grid.stop / grid.start, t));
    } else {
      ys.push_back(grid.start + (grid.stop - grid.start) * t);
    }
  }
  return ys;
}

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return ec == std::errc{} ? std::string(buffer, ptr) : std::string("nan");
}

void write_table_csv(std::ostream& out, const DensitySpec& spec, Process process,
                     std::span<const double> ys) {
  const Density density = make_density(spec);
  out << kTableHeader << '\n';
  for (double y : ys) {
    const BenefitReport r = expected_benefit(density, process, y);
    out << spec.name << ',' << to_string(process) << ',' << format_number(r.y) << ','
        << format_number(r.numerator) << ',' << format_number(r.denominator) << ','
        << format_number(r.expected_benefit) << ',' << to_string(r.decision) << ','
        << (r.attainable ? "true" : "false") << '\n';
  }
}

json evaluate(const EvalRequest& request) {
  const Density density = make_density(request.density);
  const BenefitReport r = expected_benefit(density, request.process, request.y);
  json out{
      {"density", request.density.name},
      {"process", std::string(to_string(request.process))},
      {"y", r.y},
      {"numerator", r.numerator},
      {"denominator", r.denominator},
      {"expected_benefit", r.expected_benefit},
      {"decision", std::string(to_string(r.decision))},
      {"attainable", r.attainable},
  };
  if (request.bounds.x_l || request.bounds.x_u) {
    const StrategyResult s = strategy(density, request.process, request.bounds, request.y);
    out["strategy"] = {{"decision", std::string(to_string(s.decision))}, {"value", s.value}};
  }
  return out;
}

namespace {

[[noreturn]] void bad_request(const std::string& what) {
  throw Error(ErrorCode::malformed_spec, what);
}

double number_field(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_number()) bad_request(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

std::optional<double> optional_number(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) bad_request(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

bool optional_bool(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end()) return false;
  if (!it->is_boolean()) bad_request(std::string("'") + key + "' must be a boolean");
  return it->get<bool>();
}

void require_object(const json& body) {
  if (!body.is_object()) bad_request("request body must be a JSON object");
}

json report_json(const BenefitReport& r) {
  return {{"expected_benefit", r.expected_benefit},
          {"decision", std::string(to_string(r.decision))},
          {"attainable", r.attainable}};
}

json play_json(std::size_t index, const DecidedPlay& p) {
  return {{"play_index", index},
          {"y", p.play.y},
          {"z", p.play.z},
          {"b", p.play.b},
          {"action", std::string(to_string(p.action))},
          {"realized_gain", p.realized_gain},
          {"recommendation", report_json(p.analytic)}};
}

}  // namespace

DensitySpec density_from_request(const json& body) {
  require_object(body);
  const auto it = body.find("density");
  if (it == body.end()) bad_request("missing 'density'");
  if (it->is_object()) return density_spec_from_json(*it);
  if (!it->is_string()) bad_request("'density' must be a catalog name or a density spec");
  ParamMap params;
  if (const auto p = body.find("params"); p != body.end()) {
    if (!p->is_object()) bad_request("'params' must be an object");
    for (const auto& [key, value] : p->items()) {
      if (!value.is_number()) bad_request("parameter '" + key + "' must be a number");
      params[key] = value.get<double>();
    }
  }
  return catalog_spec(it->get<std::string>(), std::move(params));
}

Process process_from_request(const json& body) {
  require_object(body);
  const auto it = body.find("process");
  if (it == body.end() || !it->is_string()) bad_request("'process' must be a string");
  const auto process = parse_process(it->get<std::string>());
  if (!process) bad_request("unknown process '" + it->get<std::string>() + "'");
  return *process;
}

json to_json(const Totals& t) {
  return {{"user", t.user},
          {"always_switch", t.always_switch},
          {"never_switch", t.never_switch},
          {"analytic_optimal", t.analytic_optimal}};
}


json catalog_json() {
  json list = json::array();
  for (const auto& e : catalog_entries()) {
    list.push_back({{"name", std::string(e.name)},
                    {"kind", std::string(to_string(e.kind))},
                    {"proper", e.proper},
                    {"formula", std::string(e.formula)},
                    {"params", std::string(e.params)}});
  }
  return {{"densities", list}};
}

json eval_json(const json& body) {
  EvalRequest request;
  request.density = density_from_request(body);
  request.process = process_from_request(body);
  request.y = number_field(body, "y");
  if (const auto b = body.find("bounds"); b != body.end()) {
    if (!b->is_object()) bad_request("'bounds' must be an object");
    request.bounds.x_l = optional_number(*b, "x_l");
    request.bounds.x_u = optional_number(*b, "x_u");
  }
  return evaluate(request);
}

std::string table_csv(const json& body) {
  const DensitySpec spec = density_from_request(body);
  const Process process = process_from_request(body);
  Grid grid;
  grid.start = number_field(body, "start");
  grid.stop = number_field(body, "stop");
  const double count = number_field(body, "count");
  if (count < 0 || count != std::floor(count)) bad_request("'count' must be a nonnegative integer");
  grid.count = static_cast<std::size_t>(count);
  const std::string scale = body.value("scale", std::string("linear"));
  if (scale != "linear" && scale != "log") bad_request("'scale' must be linear or log");
  grid.log_spaced = scale == "log";
  std::ostringstream out;
  const auto ys = make_grid(grid);
  write_table_csv(out, spec, process, ys);
  return out.str();
}

json roots_json(const json& body) {
  const Density density = make_density(density_from_request(body));
  const Process process = process_from_request(body);
  const double tol = optional_number(body, "tol").value_or(kDefaultRootTolerance);
  const double cells = optional_number(body, "cells").value_or(static_cast<double>(kDefaultScanCells));
  if (!(cells >= 1) || cells != std::floor(cells)) bad_request("'cells' must be a positive integer");
  json list = json::array();
  for (const auto& r : find_exchange_roots(density, process, number_field(body, "lo"),
                                           number_field(body, "hi"), tol,
                                           static_cast<std::size_t>(cells))) {
    list.push_back({{"y", r.y}, {"residual", r.residual}});
  }
  return {{"roots", list}};
}

Api::Api(std::optional<std::string> session_log) : store_(std::move(session_log)) {}

json Api::catalog() const { return catalog_json(); }
json Api::eval(const json& body) const { return eval_json(body); }
std::string Api::table(const json& body) const { return table_csv(body); }
json Api::roots(const json& body) const { return roots_json(body); }

json Api::create_session(const json& body) {
  DensitySpec spec = density_from_request(body);
  const Process process = process_from_request(body);
  std::uint64_t seed = default_seed();
  if (const auto s = body.find("seed"); s != body.end()) {
    if (!s->is_number_unsigned()) bad_request("'seed' must be a nonnegative integer");
    seed = s->get<std::uint64_t>();
  }
  SessionOptions options;
  options.blind = optional_bool(body, "blind");
  options.coach = optional_bool(body, "coach");
  const std::string id = store_.create(std::move(spec), process, seed, options);
  return {{"id", id}};
}

json Api::deal(const std::string& id) {
  json out;
  store_.with_session(id, [&](Session& session) {
    const Deal d = session.deal();
    out["play_index"] = d.play_index;
    if (session.options().blind) {
      out["blind"] = true;
    } else {
      out["y"] = d.y;
    }
    if (d.coach) out["coach"] = report_json(*d.coach);
  });
  return out;
}

json Api::decide(const std::string& id, const json& body) {
  require_object(body);
  const double index = number_field(body, "play_index");
  if (index < 0 || index != std::floor(index)) bad_request("'play_index' must be a nonnegative integer");
  const auto a = body.find("action");
  if (a == body.end() || !a->is_string()) bad_request("'action' must be \"switch\" or \"stay\"");
  const auto action = parse_action(a->get<std::string>());
  if (!action) bad_request("'action' must be \"switch\" or \"stay\"");

  json out;
  store_.decide(id, static_cast<std::size_t>(index), *action,
                [&](const Session& session, const DecidedPlay& p) {
                  out = play_json(static_cast<std::size_t>(index), p);
                  out["totals"] = to_json(session.totals());
                });
  return out;
}

json Api::history(const std::string& id) {
  json out;
  store_.with_session(id, [&](Session& session) {
    json plays = json::array();
    for (std::size_t i = 0; i < session.plays().size(); ++i) {
      plays.push_back(play_json(i, session.plays()[i]));
    }
    out = {{"id", session.id()},
           {"density", to_json(session.density_spec())},
           {"process", std::string(to_string(session.process()))},
           {"seed", session.seed()},
           {"blind", session.options().blind},
           {"coach", session.options().coach},
           {"pending", session.has_pending()},
           {"plays", plays},
           {"totals", to_json(session.totals())}};
  });
  return out;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_session: return 404;
    case ErrorCode::session_conflict: return 409;
    default: return 400;
  }
}

struct HttpServer::Impl {
  explicit Impl(Api& a) : api(a) {
    // httplib's defaults add SO_REUSEPORT, which lets a second server share a
    // busy port silently instead of failing to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
  }
  Api& api;
  httplib::Server server;
};

namespace {

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& what) {
  res.status = status;
  res.set_content(json{{"error", std::string(code)}, {"message", what}}.dump(), "application/json");
}

// Wraps a handler: parses the body where needed and maps failures to 4xx.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "malformed-request", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

void send_json(httplib::Response& res, const json& body) {
  res.set_content(body.dump(), "application/json");
}

}  // namespace

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {
  auto& s = impl_->server;
  Api* a = &impl_->api;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  s.Get("/api/catalog", guarded([a](const auto&, auto& res) { send_json(res, a->catalog()); }));
  s.Post("/api/eval",
         guarded([a](const auto& req, auto& res) { send_json(res, a->eval(parse_body(req))); }));
  s.Post("/api/table", guarded([a](const auto& req, auto& res) {
           res.set_content(a->table(parse_body(req)), "text/csv");
         }));
  s.Post("/api/roots",
         guarded([a](const auto& req, auto& res) { send_json(res, a->roots(parse_body(req))); }));
  s.Post("/api/session", guarded([a](const auto& req, auto& res) {
           send_json(res, a->create_session(parse_body(req)));
         }));
  s.Post(R"(/api/session/([^/]+)/deal)", guarded([a](const auto& req, auto& res) {
           send_json(res, a->deal(req.matches[1]));
         }));
  s.Post(R"(/api/session/([^/]+)/decide)", guarded([a](const auto& req, auto& res) {
           send_json(res, a->decide(req.matches[1], parse_body(req)));
         }));
  s.Get(R"(/api/session/([^/]+)/history)", guarded([a](const auto& req, auto& res) {
          send_json(res, a->history(req.matches[1]));
        }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::address_in_use, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::address_in_use, host + ":" + std::to_string(port) + " is unavailable");
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace envlab
