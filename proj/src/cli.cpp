#include "envlab/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"

#include "envlab/api.hpp"
#include "envlab/catalog.hpp"
#include "envlab/error.hpp"
#include "envlab/oracle.hpp"
#include "envlab/verify.hpp"

namespace envlab {

using nlohmann::json;

namespace {

struct DensityOptions {
  std::string density;
  std::vector<std::string> params;
  std::string process;
};

void add_density_options(CLI::App* cmd, DensityOptions& o, bool with_process = true) {
  cmd->add_option("--density", o.density,
                  "Catalog name, a density-spec JSON file, or inline JSON")
      ->required();
  cmd->add_option("--param", o.params, "Catalog parameter as key=value (repeatable)");
  if (with_process) {
    cmd->add_option("--process", o.process,
                    "halve-or-double | double-only | halve-only | allocate-first | allocate-second")
        ->required();
  }
}

DensitySpec resolve_density(const DensityOptions& o) {
  DensitySpec spec;
  if (!o.density.empty() && o.density.front() == '{') {
    spec = parse_density_spec(o.density);
  } else if (std::filesystem::is_regular_file(o.density)) {
    std::ifstream in(o.density);
    std::stringstream text;
    text << in.rdbuf();
    spec = parse_density_spec(text.str());
  } else {
    spec = catalog_spec(o.density);
  }
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::malformed_spec, "--param expects key=value, got '" + kv + "'");
    }
    if (spec.name == kPiecewiseName) {
      throw Error(ErrorCode::malformed_spec, "piecewise densities take no --param");
    }
    const std::string value = kv.substr(eq + 1);
    std::size_t used = 0;
    double number = 0.0;
    try {
      number = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw Error(ErrorCode::malformed_spec, "--param value '" + value + "' is not a number");
    }
    spec.params[kv.substr(0, eq)] = number;
  }
  return spec;
}

json request_for(const DensityOptions& o) {
  json body{{"density", to_json(resolve_density(o))}};
  if (!o.process.empty()) body["process"] = o.process;
  return body;
}

Process resolve_process(const std::string& name) {
  const auto p = parse_process(name);
  if (!p) throw Error(ErrorCode::malformed_spec, "unknown process '" + name + "'");
  return *p;
}

void print_eval_text(std::ostream& out, const json& report) {
  const auto row = [&](const char* key, const std::string& value) {
    out << std::left << std::setw(18) << key << value << '\n';
  };
  row("density", report["density"].get<std::string>());
  row("process", report["process"].get<std::string>());
  row("y", format_number(report["y"].get<double>()));
  row("numerator", format_number(report["numerator"].get<double>()));
  row("denominator", format_number(report["denominator"].get<double>()));
  row("expected_benefit", format_number(report["expected_benefit"].get<double>()));
  row("decision", report["decision"].get<std::string>());
  row("attainable", report["attainable"].get<bool>() ? "true" : "false");
  if (report.contains("strategy")) {
    row("strategy", report["strategy"]["decision"].get<std::string>() + " (" +
                        format_number(report["strategy"]["value"].get<double>()) + ")");
  }
}

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks, bool& all_pass) {
  for (const auto& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all_pass = all_pass && c.pass;
  }
}

std::pair<std::string, int> split_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::invalid_parameter, "--listen expects host:port");
  }
  int port = 0;
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_parameter, "--listen port is not a number");
  }
  return {listen.substr(0, colon), port};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-envelope game engine: expected benefit of switching, strategies and checks",
               "envlab"};
  app.require_subcommand(1);

  std::string format = "text";
  std::optional<std::uint64_t> seed;

  // catalog
  auto* catalog = app.add_subcommand("catalog", "List the named priors");
  catalog->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));

  // eval
  DensityOptions eval_density;
  double eval_y = 0.0;
  std::optional<double> x_lower;
  std::optional<double> x_upper;
  auto* eval = app.add_subcommand("eval", "Expected benefit of switching at one observation");
  add_density_options(eval, eval_density);
  eval->add_option("--y", eval_y, "Observed amount")->required();
  eval->add_option("--x-lower", x_lower, "Announced lower bound on contents");
  eval->add_option("--x-upper", x_upper, "Announced upper bound on contents");
  eval->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));

  // table
  DensityOptions table_density;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
  std::string scale = "linear";
  auto* table = app.add_subcommand("table", "CSV sweep of the expected benefit over a y grid");
  add_density_options(table, table_density);
  table->add_option("--start", start)->required();
  table->add_option("--stop", stop)->required();
  table->add_option("--count", count)->required();
  table->add_option("--scale", scale, "linear | log")->check(CLI::IsMember({"linear", "log"}));

  // roots
  DensityOptions roots_density;
  double lo = 0.0;
  double hi = 0.0;
  double tol = kDefaultRootTolerance;
  std::size_t cells = kDefaultScanCells;
  auto* roots = app.add_subcommand("roots", "Roots of the exchange condition on [lo, hi]");
  add_density_options(roots, roots_density);
  roots->add_option("--lo", lo)->required();
  roots->add_option("--hi", hi)->required();
  roots->add_option("--tol", tol, "Bisection width");
  roots->add_option("--cells", cells, "Bracketing scan resolution");
  roots->add_option("--format", format, "text | json")->check(CLI::IsMember({"text", "json"}));

  // verify
  std::string suite = "all";
  std::uint64_t mc_plays = 4'000'000;
  unsigned shards = 1;
  auto* verify = app.add_subcommand("verify", "Run the oracle suites; nonzero exit on failure");
  verify->add_option("--suite", suite, "discrete | mc | blind | all")
      ->check(CLI::IsMember({"discrete", "mc", "blind", "all"}));
  verify->add_option("--seed", seed, "Seed (default: ENVLAB_SEED or 1)");
  verify->add_option("--plays", mc_plays, "Plays per Monte-Carlo probe");
  verify->add_option("--shards", shards, "Worker threads per Monte-Carlo run");

  // simulate
  DensityOptions sim_density;
  std::uint64_t sim_plays = 100'000;
  std::optional<double> sim_y;
  std::optional<double> sim_epsilon;
  bool emit_plays = false;
  auto* simulate = app.add_subcommand("simulate", "Seeded plays of the game");
  add_density_options(simulate, sim_density);
  simulate->add_option("--n", sim_plays, "Number of plays");
  simulate->add_option("--seed", seed, "Seed (default: ENVLAB_SEED or 1)");
  simulate->add_option("--y", sim_y, "Condition on observations near y and compare");
  simulate->add_option("--epsilon", sim_epsilon, "Half-width of the window (default y/128)");
  simulate->add_option("--shards", shards, "Worker threads");
  simulate->add_flag("--emit-plays", emit_plays, "Stream every play as line-delimited JSON");

  // serve
  std::string listen = "127.0.0.1:8080";
  std::optional<std::string> log_path;
  auto* serve = app.add_subcommand("serve", "JSON service for interactive play");
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--log", log_path, "Append-only session log (JSON lines)");

  std::vector<const char*> argv{"envlab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const std::uint64_t run_seed = seed.value_or(default_seed());

    if (*catalog) {
      const json list = catalog_json();
      if (format == "json") {
        out << list.dump() << '\n';
      } else {
        for (const auto& e : list["densities"]) {
          out << std::left << std::setw(19) << e["name"].get<std::string>() << std::setw(11)
              << e["kind"].get<std::string>() << std::setw(9)
              << (e["proper"].get<bool>() ? "proper" : "improper") << e["formula"].get<std::string>();
          if (!e["params"].get<std::string>().empty()) out << "  [" << e["params"].get<std::string>() << ']';
          out << '\n';
        }
      }
      return 0;
    }

    if (*eval) {
      json body = request_for(eval_density);
      body["y"] = eval_y;
      if (x_lower || x_upper) {
        body["bounds"] = json::object();
        if (x_lower) body["bounds"]["x_l"] = *x_lower;
        if (x_upper) body["bounds"]["x_u"] = *x_upper;
      }
      const json report = eval_json(body);
      if (format == "json") {
        out << report.dump() << '\n';
      } else {
        print_eval_text(out, report);
      }
      return report["attainable"].get<bool>() ? 0 : 2;
    }

    if (*table) {
      json body = request_for(table_density);
      body["start"] = start;
      body["stop"] = stop;
      body["count"] = count;
      body["scale"] = scale;
      out << table_csv(body);
      return 0;
    }

    if (*roots) {
      json body = request_for(roots_density);
      body["lo"] = lo;
      body["hi"] = hi;
      body["tol"] = tol;
      body["cells"] = cells;
      const json found = roots_json(body);
      if (format == "json") {
        out << found.dump() << '\n';
      } else if (found["roots"].empty()) {
        out << "no roots in [" << format_number(lo) << ", " << format_number(hi) << "]\n";
      } else {
        for (const auto& r : found["roots"]) {
          out << "root " << std::setprecision(12) << r["y"].get<double>() << "  |e| "
              << std::setprecision(3) << r["residual"].get<double>() << '\n';
        }
      }
      return 0;
    }

    if (*verify) {
      bool all_pass = true;
      if (suite == "discrete" || suite == "all") print_checks(out, verify_discrete(run_seed), all_pass);
      if (suite == "blind" || suite == "all") print_checks(out, verify_blind(run_seed), all_pass);
      if (suite == "mc" || suite == "all") {
        print_checks(out, verify_mc(run_seed, mc_plays, shards), all_pass);
      }
      out << (all_pass ? "verify: pass\n" : "verify: FAIL\n");
      return all_pass ? 0 : 1;
    }

    if (*simulate) {
      const DensitySpec spec = resolve_density(sim_density);
      const Density density = make_density(spec);
      const Process process = resolve_process(sim_density.process);
      if (sim_y) {
        const McEstimate e = sim_epsilon
                                 ? mc_conditional_benefit(density, process, *sim_y, *sim_epsilon,
                                                          sim_plays, run_seed, shards)
                                 : mc_conditional_benefit_auto(density, process, *sim_y, run_seed,
                                                               std::nullopt, sim_plays, shards);
        const BenefitReport analytic = expected_benefit(density, process, *sim_y);
        json result{{"y", e.y_center},           {"epsilon", e.epsilon},
                    {"n_total", e.n_total},      {"n_conditioned", e.n_conditioned},
                    {"mean_benefit", e.mean_benefit}, {"std_error", e.std_error},
                    {"analytic", analytic.expected_benefit}};
        if (analytic.attainable) result["pass_4_sigma"] = compare(analytic, e, 4.0).pass;
        out << result.dump() << '\n';
        return 0;
      }
      if (!density.sampleable()) {
        throw Error(ErrorCode::improper_density_unsampleable,
                    "density '" + density.name() + "' cannot be simulated");
      }
      Rng rng(run_seed);
      BenefitAccumulator advantage;
      for (std::uint64_t i = 0; i < sim_plays; ++i) {
        const Play p = run_play(density, process, rng);
        advantage.add(p.b);
        if (emit_plays) {
          out << json{{"play_index", i}, {"x1", p.event.x1}, {"omega2", p.event.omega2},
                      {"omega3", p.event.omega3}, {"y", p.y}, {"z", p.z}, {"b", p.b}}
                     .dump()
              << '\n';
        }
      }
      out << json{{"plays", sim_plays},
                  {"seed", run_seed},
                  {"always_switch_total", advantage.sum},
                  {"never_switch_total", 0.0},
                  {"mean_switch_advantage", advantage.mean()},
                  {"std_error", advantage.std_error()}}
                 .dump()
          << '\n';
      return 0;
    }

    if (*serve) {
      const auto [host, port] = split_listen(listen);
      Api api(log_path);
      HttpServer server(api);
      const int bound = server.bind(host, port);
      out << "listening on http://" << host << ':' << bound << std::endl;
      server.listen();
      return 0;
    }
  } catch (const Error& e) {
    err << "envlab: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace envlab
