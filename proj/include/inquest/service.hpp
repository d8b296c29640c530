#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>

#include <httplib.h>

#include "inquest/core.hpp"
#include "inquest/entropy.hpp"
#include "inquest/environments.hpp"
#include "inquest/metrics.hpp"
#include "inquest/runner.hpp"

namespace inquest {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::int64_t idle_timeout_s = 1800;
  std::string request_log;  // JSONL path; empty disables
  std::size_t workers = 1;  // benchmark fan-out
  std::uint64_t seed = 0;
  ImageParams image;
};

inline void from_json(const json& j, ServiceConfig& c) {
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  c.idle_timeout_s = j.value("idle_timeout_s", c.idle_timeout_s);
  c.request_log = j.value("request_log", c.request_log);
  c.workers = j.value("workers", c.workers);
  c.seed = j.value("seed", c.seed);
  if (j.contains("image")) j.at("image").get_to(c.image);
}

/// Reads `getenv` for INQUEST_HOST, INQUEST_PORT, INQUEST_IDLE_TIMEOUT_S,
/// INQUEST_REQUEST_LOG, INQUEST_WORKERS and INQUEST_SEED over the file values.
inline ServiceConfig load_service_config(const std::string& path,
                                         const std::function<const char*(const char*)>& getenv = std::getenv) {
  ServiceConfig config;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open config " + path);
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::InvalidConfig, path + " is not valid JSON");
    from_json(j.contains("service") ? j.at("service") : j, config);
  }
  auto number = [&](const char* name, auto& field) {
    if (const char* v = getenv(name)) {
      try {
        field = static_cast<std::decay_t<decltype(field)>>(std::stoll(v));
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidConfig, std::string(name) + " is not an integer");
      }
    }
  };
  if (const char* v = getenv("INQUEST_HOST")) config.host = v;
  if (const char* v = getenv("INQUEST_REQUEST_LOG")) config.request_log = v;
  number("INQUEST_PORT", config.port);
  number("INQUEST_IDLE_TIMEOUT_S", config.idle_timeout_s);
  number("INQUEST_WORKERS", config.workers);
  number("INQUEST_SEED", config.seed);
  return config;
}

/// HTTP-shaped failure raised by the session store.
struct ServiceError : Error {
  int status;
  ServiceError(int status, ErrorKind kind, const std::string& message) : Error(kind, message), status(status) {}
};

// ---------------------------------------------------------------------------
// Interactive sessions: the engine asks, a person answers.

class SessionStore {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionStore(ServiceConfig config, std::function<Clock::time_point()> now = Clock::now)
      : config_(std::move(config)), now_(std::move(now)) {}

  /// Body: {"config": {...}} or a bare config object. Returns the first question.
  json create(const json& body) {
    purge_expired();
    SessionConfig session_config;
    try {
      const auto& cj = body.contains("config") ? body.at("config") : body;
      json patched = cj;
      if (!patched.contains("image")) patched["image"] = config_.image;
      if (!patched.contains("seed")) patched["seed"] = config_.seed;
      session_config = patched.get<SessionConfig>();
      if (session_config.task != TaskKind::Image) session_config.termination = {TerminationKind::Singleton, 5};
      session_config.validate();
    } catch (const json::exception& e) {
      throw ServiceError(422, ErrorKind::InvalidConfig, e.what());
    } catch (const Error& e) {
      throw ServiceError(422, e.kind(), e.what());
    }

    auto session = std::make_shared<Session>();
    std::string id;
    {
      std::lock_guard lock(mutex_);
      id = next_id();
      session->number = counter_;
    }
    session->id = id;
    session->episode = std::make_unique<Episode>(session_config, world_for(session_config), std::nullopt);
    session->rng = make_rng(derive_seed(session_config.seed, session->number));
    session->created = session->updated = now_();
    advance(*session);
    {
      std::lock_guard lock(mutex_);
      sessions_[id] = session;
    }
    std::lock_guard lock(session->mutex);
    json out = public_step(*session);
    out["session_id"] = id;
    out["first_question"] = out["next_question"];
    return out;
  }

  /// Body: {"answer": "yes"|"no"|"cant_answer", "turn_index"?: n}.
  json answer(const std::string& id, const json& body) {
    auto session = find(id);
    std::lock_guard lock(session->mutex);
    if (session->episode->done()) throw ServiceError(409, ErrorKind::SessionClosed, "session already finished");
    if (!body.is_object() || !body.contains("answer") || !body["answer"].is_string()) {
      throw ServiceError(422, ErrorKind::InvalidData, "body needs a string 'answer'");
    }
    Answer answer;
    try {
      answer = answer_from_string(body["answer"].get<std::string>());
    } catch (const Error& e) {
      throw ServiceError(422, e.kind(), e.what());
    }
    const auto expected = session->episode->history().size();
    if (body.contains("turn_index")) {
      const auto& t = body["turn_index"];
      if (!t.is_number_integer() || t.get<std::int64_t>() != static_cast<std::int64_t>(expected)) {
        throw ServiceError(409, ErrorKind::InconsistentHistory,
                           "turn " + std::to_string(expected) + " is the one awaiting an answer");
      }
    }
    try {
      session->last = session->episode->step_with_answer(*session->pending, answer);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InconsistentHistory) throw ServiceError(422, e.kind(), e.what());
      throw;
    }
    session->updated = now_();
    advance(*session);
    return public_step(*session);
  }

  json state(const std::string& id) {
    auto session = find(id);
    std::lock_guard lock(session->mutex);
    const auto& ep = *session->episode;
    json turns = json::array();
    for (const auto& t : ep.history().turns) turns.push_back(t);
    json candidates = json::array();
    if (ep.config().task == TaskKind::Image) {
      const auto n = std::min(ep.config().feedback.k, ep.ranked().size());
      for (std::size_t i = 0; i < n; ++i) candidates.push_back(ep.ranked().entries[i].id);
    } else {
      for (const auto& c : ep.survivors()) candidates.push_back(c.id);
    }
    json out = public_step(*session);
    out["session_id"] = session->id;
    out["task"] = ep.config().task;
    out["turns"] = std::move(turns);
    out["candidates"] = std::move(candidates);
    out["entropy_bits"] = uniform_entropy(ep.candidate_count());
    out["t_max"] = ep.config().t_max;
    return out;
  }

  bool remove(const std::string& id) {
    std::lock_guard lock(mutex_);
    return sessions_.erase(id) > 0;
  }

  /// Drops sessions idle longer than the configured timeout; returns how many.
  std::size_t purge_expired() {
    const auto cutoff = now_() - std::chrono::seconds(config_.idle_timeout_s);
    std::lock_guard lock(mutex_);
    return std::erase_if(sessions_, [&](const auto& entry) {
      std::lock_guard session_lock(entry.second->mutex);
      return entry.second->updated < cutoff;
    });
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
  }

  const ServiceConfig& config() const { return config_; }

 private:
  struct Session {
    std::string id;
    std::uint64_t number = 0;
    std::unique_ptr<Episode> episode;
    OraclePolicy policy;
    Rng rng;
    std::optional<Question> pending;
    std::optional<StepResult> last;
    std::optional<std::string> final_guess;
    Clock::time_point created;
    Clock::time_point updated;
    std::mutex mutex;
  };

  std::shared_ptr<Session> find(const std::string& id) {
    purge_expired();
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, ErrorKind::UnknownTarget, "no session '" + id + "'");
    return it->second;
  }

  std::shared_ptr<const World> world_for(const SessionConfig& config) {
    // Guess Number windows depend on the seed, so they are not shared.
    if (config.task == TaskKind::GuessNumber) return std::make_shared<const World>(make_world(config));
    const auto key = json{{"task", config.task}, {"image", config.image}}.dump();
    std::lock_guard lock(mutex_);
    auto& world = worlds_[key];
    if (!world) world = std::make_shared<const World>(make_world(config));
    return world;
  }

  // Picks the next question, or settles the final guess once play is over.
  void advance(Session& s) {
    auto& ep = *s.episode;
    s.pending.reset();
    if (!ep.done()) {
      s.pending = next_question(ep, s.policy, s.rng);
      if (!s.pending) ep.abandon();
    }
    if (!ep.done()) return;
    if (ep.config().task == TaskKind::Image) {
      if (!ep.ranked().entries.empty()) s.final_guess = ep.ranked().entries.front().id;
    } else if (!ep.survivors().empty()) {
      s.final_guess = ep.survivors().front().id;
    }
  }

  static json public_step(const Session& s) {
    const auto& ep = *s.episode;
    json out = {{"turn_index", ep.history().size()},
                {"done", ep.done()},
                {"candidate_count", ep.candidate_count()},
                {"feedback", s.last ? json(s.last->feedback) : json(nullptr)}};
    if (s.pending) {
      out["next_question"] = question_text(*s.pending);
      out["next_question_structured"] = *s.pending;
      if (ep.config().task != TaskKind::Image && !std::holds_alternative<Guess>(*s.pending)) {
        out["next_question_eig"] = eig(ep.survivors(), *s.pending);
      }
    } else {
      out["next_question"] = nullptr;
    }
    if (ep.done()) out["final_guess"] = s.final_guess ? json(*s.final_guess) : json(nullptr);
    return out;
  }

  std::string next_id() {
    static thread_local std::random_device device;
    ++counter_;
    char buf[24];
    std::snprintf(buf, sizeof buf, "s%016llx",
                  static_cast<unsigned long long>(splitmix64(counter_ ^ (std::uint64_t{device()} << 32))));
    return buf;
  }

  ServiceConfig config_;
  std::function<Clock::time_point()> now_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<const World>> worlds_;
  std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Batch endpoints

/// Body: {"task", "policy"?, "targets"?, "seeds"?, "config"?, "ks"?}.
inline json benchmark_request(const json& body, const ServiceConfig& service) {
  if (!body.is_object() || !body.contains("task")) {
    throw ServiceError(422, ErrorKind::InvalidConfig, "body needs a 'task'");
  }
  try {
    json cj = body.value("config", json::object());
    cj["task"] = body.at("task");
    if (!cj.contains("image")) cj["image"] = service.image;
    if (!cj.contains("seed")) cj["seed"] = service.seed;
    const auto config = cj.get<SessionConfig>();
    config.validate();
    BenchmarkPlan plan;
    plan.targets = body.value("targets", std::vector<std::string>{});
    plan.seeds = body.value("seeds", std::vector<std::uint64_t>{config.seed});
    plan.workers = service.workers;
    const auto ks = body.value("ks", std::vector<std::size_t>{1, 5, 10});
    const auto records = run_benchmark(config, make_world(config), policy_factory(body.value("policy", "oracle")), plan);
    return {{"report", compute_report(records, ks)}};
  } catch (const json::exception& e) {
    throw ServiceError(422, ErrorKind::InvalidConfig, e.what());
  } catch (const ServiceError&) {
    throw;
  } catch (const Error& e) {
    const bool bad_input = e.kind() == ErrorKind::InvalidConfig || e.kind() == ErrorKind::UnknownTarget ||
                           e.kind() == ErrorKind::InvalidData;
    if (bad_input) throw ServiceError(422, e.kind(), e.what());
    throw;
  }
}

inline json dataset_listing(const ServiceConfig& service) {
  const auto gw = guess_who_dataset();
  json image = {{"task", TaskKind::Image},
                {"source", service.image.store_path.empty() ? "synthetic" : service.image.store_path}};
  if (service.image.store_path.empty()) image["count"] = service.image.synthetic_images;
  return {{"datasets",
           {{{"task", TaskKind::GuessNumber},
             {"range", {0, 1000}},
             {"window_length", kWindowLength}},
            {{"task", TaskKind::GuessWho},
             {"count", gw.candidates.size()},
             {"schema", gw.schema},
             {"candidates", gw.candidates}},
            image}}};
}

// ---------------------------------------------------------------------------
// HTTP surface

class Service {
 public:
  explicit Service(ServiceConfig config, std::function<SessionStore::Clock::time_point()> now = SessionStore::Clock::now)
      : store_(config, std::move(now)), config_(std::move(config)) {
    install();
  }

  bool listen() { return server_.listen(config_.host, config_.port); }
  /// Binds an ephemeral port (tests); returns it, or -1.
  int bind_any() { return server_.bind_to_any_port(config_.host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }
  SessionStore& store() { return store_; }

 private:
  using Handler = std::function<json(const httplib::Request&, httplib::Response&)>;

  static json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) throw ServiceError(422, ErrorKind::InvalidData, "body is not JSON");
    return body;
  }

  static void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  httplib::Server::Handler wrap(Handler handler) {
    return [handler = std::move(handler)](const httplib::Request& req, httplib::Response& res) {
      try {
        auto body = handler(req, res);
        if (res.status == -1 || res.status == 0) res.status = 200;
        if (res.status != 204) send(res, res.status, body);
      } catch (const ServiceError& e) {
        send(res, e.status, {{"error", to_string(e.kind())}, {"message", e.what()}});
      } catch (const Error& e) {
        send(res, 500, {{"error", to_string(e.kind())}, {"message", e.what()}});
      } catch (const std::exception& e) {
        send(res, 500, {{"error", "internal"}, {"message", e.what()}});
      }
    };
  }

  void install() {
    server_.Get("/healthz", wrap([](const auto&, auto&) { return json{{"status", "ok"}}; }));
    server_.Get("/datasets", wrap([this](const auto&, auto&) { return dataset_listing(config_); }));
    server_.Post("/sessions", wrap([this](const auto& req, auto& res) {
                   res.status = 201;
                   return store_.create(parse_body(req));
                 }));
    server_.Post(R"(/sessions/([^/]+)/answer)", wrap([this](const auto& req, auto&) {
                   return store_.answer(req.matches[1], parse_body(req));
                 }));
    server_.Get(R"(/sessions/([^/]+)/state)",
                wrap([this](const auto& req, auto&) { return store_.state(req.matches[1]); }));
    server_.Delete(R"(/sessions/([^/]+))", wrap([this](const auto& req, auto& res) {
                     if (!store_.remove(req.matches[1])) {
                       throw ServiceError(404, ErrorKind::UnknownTarget, "no session '" + std::string(req.matches[1]) + "'");
                     }
                     res.status = 204;
                     return json();
                   }));
    server_.Post("/benchmarks", wrap([this](const auto& req, auto&) {
                   return benchmark_request(parse_body(req), config_);
                 }));
    if (!config_.request_log.empty()) {
      server_.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
        const auto ts = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
        const json line = {{"ts_ms", ts}, {"method", req.method}, {"path", req.path}, {"status", res.status}};
        std::lock_guard lock(log_mutex_);
        std::ofstream(config_.request_log, std::ios::app) << line.dump() << '\n';
      });
    }
  }

  SessionStore store_;
  ServiceConfig config_;
  httplib::Server server_;
  std::mutex log_mutex_;
};

}  // namespace inquest
