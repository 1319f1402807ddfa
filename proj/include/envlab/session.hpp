#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "envlab/benefit.hpp"
#include "envlab/density_spec.hpp"
#include "envlab/host.hpp"

namespace envlab {

enum class Action { Switch, Stay };

std::string_view to_string(Action a);
std::optional<Action> parse_action(std::string_view name);

struct SessionOptions {
  bool blind = false;  ///< withhold y at deal time
  bool coach = false;  ///< include the analytic recommendation at deal time
};

struct DecidedPlay {
  Play play;
  Action action = Action::Stay;
  double realized_gain = 0.0;  ///< b when switched, 0 when stayed
  BenefitReport analytic;      ///< recommendation for the observed y
};

struct Totals {
  double user = 0.0;
  double always_switch = 0.0;
  double never_switch = 0.0;
  double analytic_optimal = 0.0;  ///< switches exactly when E(B | Y = y) says Switch
};

struct Deal {
  std::size_t play_index = 0;
  double y = 0.0;
  std::optional<BenefitReport> coach;
};

/// One human playing against a seeded host. Plays are dealt from a single
/// generator, so a (density, process, seed) triple fixes the whole sequence.
class Session {
 public:
  Session(std::string id, DensitySpec spec, Process process, std::uint64_t seed,
          SessionOptions options = {});

  const std::string& id() const noexcept { return id_; }
  const DensitySpec& density_spec() const noexcept { return spec_; }
  Process process() const noexcept { return process_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const SessionOptions& options() const noexcept { return options_; }
  const std::vector<DecidedPlay>& plays() const noexcept { return plays_; }
  bool has_pending() const noexcept { return pending_.has_value(); }

  /// Throws session-conflict while a dealt play is undecided.
  Deal deal();
  /// Throws session-conflict unless `play_index` is the pending play.
  const DecidedPlay& decide(std::size_t play_index, Action action);

  /// Recomputed from the play list on every call.
  Totals totals() const;

 private:
  std::string id_;
  DensitySpec spec_;
  Density density_;
  Process process_;
  std::uint64_t seed_;
  SessionOptions options_;
  Rng rng_;
  std::optional<Play> pending_;
  std::vector<DecidedPlay> plays_;
};

/// One line of the append-only session log.
nlohmann::json log_record(const Session& session, std::size_t play_index);

/// Rebuilds sessions from a log by re-dealing each seed and re-applying the
/// recorded actions. Throws malformed-spec if a re-dealt amount differs from
/// the record.
std::map<std::string, Session> replay_log(std::istream& in);

/// Thread-safe registry. Mutations of one session are serialized; distinct
/// sessions proceed in parallel.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::string> log_path = std::nullopt);

  std::string create(DensitySpec spec, Process process, std::uint64_t seed,
                     SessionOptions options = {});

  /// Runs `fn` under the session's lock; throws unknown-session.
  void with_session(const std::string& id, const std::function<void(Session&)>& fn);

  /// Runs `fn` and appends a log record for `play_index` afterwards.
  void decide(const std::string& id, std::size_t play_index, Action action,
              const std::function<void(const Session&, const DecidedPlay&)>& fn);

  std::size_t size() const;

 private:
  struct Slot {
    std::mutex mutex;
    std::unique_ptr<Session> session;
  };
  std::shared_ptr<Slot> find(const std::string& id) const;

  mutable std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::uint64_t next_id_ = 1;

  std::mutex log_mutex_;
  std::optional<std::ofstream> log_;
};

}  // namespace envlab
