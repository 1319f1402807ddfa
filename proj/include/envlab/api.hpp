#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "envlab/benefit.hpp"
#include "envlab/density_spec.hpp"
#include "envlab/error.hpp"
#include "envlab/session.hpp"

namespace envlab {

/// Seed used when none is given: ENVLAB_SEED if set and numeric, else 1.
std::uint64_t default_seed();

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
  bool log_spaced = false;
};

/// Throws invalid-parameter for an empty or ill-formed grid.
std::vector<double> make_grid(const Grid& grid);

inline constexpr std::string_view kTableHeader =
    "density,process,y,numerator,denominator,expected_benefit,decision,attainable";

/// Shortest representation that parses back to the same double.
std::string format_number(double value);

void write_table_csv(std::ostream& out, const DensitySpec& spec, Process process,
                     std::span<const double> ys);

struct EvalRequest {
  DensitySpec density;
  Process process = Process::halve_or_double;
  double y = 0.0;
  Bounds bounds;
};

/// BenefitReport fields plus density and process; a "strategy" object is added
/// when bounds are present.
nlohmann::json evaluate(const EvalRequest& request);

/// Reads {"density": name-or-spec, "params": {...}} out of a request body.
DensitySpec density_from_request(const nlohmann::json& body);
Process process_from_request(const nlohmann::json& body);

nlohmann::json to_json(const Totals& totals);

/// Stateless handlers shared by the HTTP routes and the command line.
nlohmann::json catalog_json();
nlohmann::json eval_json(const nlohmann::json& body);
std::string table_csv(const nlohmann::json& body);
nlohmann::json roots_json(const nlohmann::json& body);

/// Endpoint logic behind the HTTP routes, callable directly.
class Api {
 public:
  explicit Api(std::optional<std::string> session_log = std::nullopt);

  nlohmann::json catalog() const;
  nlohmann::json eval(const nlohmann::json& body) const;
  std::string table(const nlohmann::json& body) const;
  nlohmann::json roots(const nlohmann::json& body) const;

  nlohmann::json create_session(const nlohmann::json& body);
  nlohmann::json deal(const std::string& id);
  nlohmann::json decide(const std::string& id, const nlohmann::json& body);
  nlohmann::json history(const std::string& id);

 private:
  SessionStore store_;
};

/// HTTP status for an error code: 404 unknown session, 409 conflict, else 400.
int http_status(ErrorCode code);

/// JSON service on top of Api.
class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host:port`; port 0 picks a free port. Returns the bound port.
  /// Throws address-in-use when the address cannot be bound.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace envlab
