#include "envlab/session.hpp"

#include <charconv>
#include <filesystem>

#include "envlab/error.hpp"

namespace envlab {

using nlohmann::json;

std::string_view to_string(Action a) { return a == Action::Switch ? "switch" : "stay"; }

std::optional<Action> parse_action(std::string_view name) {
  if (name == "switch") return Action::Switch;
  if (name == "stay") return Action::Stay;
  return std::nullopt;
}

Session::Session(std::string id, DensitySpec spec, Process process, std::uint64_t seed,
                 SessionOptions options)
    : id_(std::move(id)),
      spec_(std::move(spec)),
      density_(make_density(spec_)),
      process_(process),
      seed_(seed),
      options_(options),
      rng_(seed) {
  if (!density_.sampleable()) {
    throw Error(ErrorCode::improper_density_unsampleable,
                "density '" + density_.name() + "' cannot deal plays");
  }
}

Deal Session::deal() {
  if (pending_) {
    throw Error(ErrorCode::session_conflict,
                "play " + std::to_string(plays_.size()) + " is still undecided");
  }
  pending_ = run_play(density_, process_, rng_);
  Deal d;
  d.play_index = plays_.size();
  d.y = pending_->y;
  if (options_.coach) d.coach = expected_benefit(density_, process_, pending_->y);
  return d;
}

const DecidedPlay& Session::decide(std::size_t play_index, Action action) {
  if (!pending_) throw Error(ErrorCode::session_conflict, "no play has been dealt");
  if (play_index != plays_.size()) {
    throw Error(ErrorCode::session_conflict,
                "pending play is " + std::to_string(plays_.size()) + ", not " +
                    std::to_string(play_index));
  }
  DecidedPlay decided;
  decided.play = *pending_;
  decided.action = action;
  decided.realized_gain = action == Action::Switch ? decided.play.b : 0.0;
  decided.analytic = expected_benefit(density_, process_, decided.play.y);
  plays_.push_back(decided);
  pending_.reset();
  return plays_.back();
}

Totals Session::totals() const {
  Totals t;
  for (const auto& p : plays_) {
    t.user += p.realized_gain;
    t.always_switch += p.play.b;
    if (p.analytic.decision == Decision::Switch) t.analytic_optimal += p.play.b;
  }
  return t;
}

json log_record(const Session& session, std::size_t play_index) {
  const DecidedPlay& p = session.plays().at(play_index);
  return json{
      {"session", session.id()},
      {"density", to_json(session.density_spec())},
      {"process", std::string(to_string(session.process()))},
      {"seed", session.seed()},
      {"blind", session.options().blind},
      {"coach", session.options().coach},
      {"play_index", play_index},
      {"action", std::string(to_string(p.action))},
      {"y", p.play.y},
      {"z", p.play.z},
      {"b", p.play.b},
      {"realized_gain", p.realized_gain},
  };
}

namespace {

[[noreturn]] void bad_log(const std::string& what) {
  throw Error(ErrorCode::malformed_spec, "session log: " + what);
}

// Applies one record to `sessions`, creating the session on first sight.
void apply_record(std::map<std::string, Session>& sessions, const json& record) {
  try {
    const auto id = record.at("session").get<std::string>();
    auto it = sessions.find(id);
    if (it == sessions.end()) {
      const auto process = parse_process(record.at("process").get<std::string>());
      if (!process) bad_log("unknown process");
      SessionOptions options;
      options.blind = record.value("blind", false);
      options.coach = record.value("coach", false);
      it = sessions
               .emplace(id, Session(id, density_spec_from_json(record.at("density")), *process,
                                    record.at("seed").get<std::uint64_t>(), options))
               .first;
    }
    Session& session = it->second;
    const auto index = record.at("play_index").get<std::size_t>();
    const auto action = parse_action(record.at("action").get<std::string>());
    if (!action) bad_log("unknown action");
    if (index != session.plays().size()) bad_log("play records out of order for " + id);
    const Deal deal = session.deal();
    if (deal.y != record.at("y").get<double>()) bad_log("re-dealt amount differs for " + id);
    session.decide(index, *action);
  } catch (const json::exception& e) {
    bad_log(e.what());
  }
}

}  // namespace

std::map<std::string, Session> replay_log(std::istream& in) {
  std::map<std::string, Session> sessions;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      bad_log(e.what());
    }
    apply_record(sessions, record);
  }
  return sessions;
}

SessionStore::SessionStore(std::optional<std::string> log_path) {
  if (!log_path) return;
  if (std::filesystem::exists(*log_path)) {
    std::ifstream in(*log_path);
    for (auto& [id, session] : replay_log(in)) {
      if (id.size() > 1 && id[0] == 's') {
        std::uint64_t n = 0;
        const auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
        if (ec == std::errc{} && ptr == id.data() + id.size()) next_id_ = std::max(next_id_, n + 1);
      }
      auto slot = std::make_shared<Slot>();
      slot->session = std::make_unique<Session>(std::move(session));
      sessions_.emplace(id, std::move(slot));
    }
  }
  log_.emplace(*log_path, std::ios::app);
  if (!*log_) throw Error(ErrorCode::invalid_parameter, "cannot open session log " + *log_path);
}

std::string SessionStore::create(DensitySpec spec, Process process, std::uint64_t seed,
                                 SessionOptions options) {
  std::lock_guard lock(registry_mutex_);
  const std::string id = "s" + std::to_string(next_id_);
  auto slot = std::make_shared<Slot>();
  slot->session = std::make_unique<Session>(id, std::move(spec), process, seed, options);
  ++next_id_;
  sessions_.emplace(id, std::move(slot));
  return id;
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(registry_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::unknown_session, "no session '" + id + "'");
  return it->second;
}

void SessionStore::with_session(const std::string& id, const std::function<void(Session&)>& fn) {
  const auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  fn(*slot->session);
}

void SessionStore::decide(const std::string& id, std::size_t play_index, Action action,
                          const std::function<void(const Session&, const DecidedPlay&)>& fn) {
  const auto slot = find(id);
  std::lock_guard lock(slot->mutex);
  const DecidedPlay& decided = slot->session->decide(play_index, action);
  if (log_) {
    std::lock_guard log_lock(log_mutex_);
    *log_ << log_record(*slot->session, play_index).dump() << '\n';
    log_->flush();
  }
  fn(*slot->session, decided);
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(registry_mutex_);
  return sessions_.size();
}

}  // namespace envlab
