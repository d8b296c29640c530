#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include "inquest/service.hpp"

using namespace inquest;

namespace {

int status_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    return e.status;
  }
  return 200;
}

// Answers every question truthfully for `target` until the session ends.
json play(SessionStore& store, const json& created, const Candidate& target) {
  json step = created;
  const auto id = created["session_id"].get<std::string>();
  while (!step["done"].get<bool>()) {
    const auto q = step["next_question_structured"].get<Question>();
    step = store.answer(id, {{"answer", to_string(truthful_answer(q, target))}, {"turn_index", step["turn_index"]}});
  }
  return step;
}

}  // namespace

TEST(SessionStore, GuessWhoPlaysToTheTarget) {
  SessionStore store({});
  const auto data = guess_who_dataset();
  for (const auto& target : data.candidates) {
    const auto created = store.create({{"config", {{"task", "guess-who"}}}});
    EXPECT_NEAR(created["next_question_eig"].get<double>(), 1.0, 1e-4);
    EXPECT_EQ(created["first_question"], created["next_question"]);
    EXPECT_EQ(created["candidate_count"], 36);
    const auto last = play(store, created, target);
    EXPECT_EQ(last["final_guess"], target.id);
    EXPECT_LE(last["turn_index"].get<std::size_t>(), 16u);
  }
}

TEST(SessionStore, GuessNumberPlaysToTheTarget) {
  SessionStore store({});
  const auto created = store.create({{"task", "guess-number"}, {"window_start", 86}});
  EXPECT_NEAR(created["next_question_eig"].get<double>(), 1.0, 1e-12);
  const auto last = play(store, created, Candidate::number(137));
  EXPECT_EQ(last["final_guess"], "137");
  EXPECT_EQ(store.state(created["session_id"])["candidates"], json::array({"137"}));
}

TEST(SessionStore, ErrorStatuses) {
  SessionStore store({});
  EXPECT_EQ(status_of([&] { store.answer("nope", {{"answer", "yes"}}); }), 404);
  EXPECT_EQ(status_of([&] { store.state("nope"); }), 404);
  EXPECT_EQ(status_of([&] { store.create({{"task", "chess"}}); }), 422);
  EXPECT_EQ(status_of([&] { store.create({{"task", "guess-who"}, {"t_max", 0}}); }), 422);

  const auto created = store.create({{"task", "guess-who"}});
  const auto id = created["session_id"].get<std::string>();
  EXPECT_EQ(status_of([&] { store.answer(id, json::object()); }), 422);
  EXPECT_EQ(status_of([&] { store.answer(id, {{"answer", "maybe"}}); }), 422);
  EXPECT_EQ(status_of([&] { store.answer(id, {{"answer", "yes"}, {"turn_index", 3}}); }), 409);
  // the same turn answered twice: the second post is stale
  store.answer(id, {{"answer", "yes"}, {"turn_index", 0}});
  EXPECT_EQ(status_of([&] { store.answer(id, {{"answer", "yes"}, {"turn_index", 0}}); }), 409);
  EXPECT_EQ(status_of([&] { store.answer(id, {{"answer", "yes"}, {"turn_index", "one"}}); }), 409);
}

TEST(SessionStore, FinishedSessionRejectsAnswers) {
  SessionStore store({});
  const auto created = store.create({{"task", "guess-who"}});
  play(store, created, guess_who_dataset().candidates[0]);
  EXPECT_EQ(status_of([&] { store.answer(created["session_id"], {{"answer", "no"}}); }), 409);
}

TEST(SessionStore, StateNeverRevealsATarget) {
  SessionStore store({});
  const auto created = store.create({{"task", "guess-who"}});
  const auto id = created["session_id"].get<std::string>();
  store.answer(id, {{"answer", "no"}});
  const auto state = store.state(id);
  EXPECT_FALSE(state.contains("target_id"));
  EXPECT_FALSE(state.contains("target"));
  EXPECT_EQ(state["turns"].size(), 1u);
  EXPECT_EQ(state["t_max"], 16);
  EXPECT_NEAR(state["entropy_bits"].get<double>(), std::log2(state["candidates"].size()), 1e-12);
  EXPECT_EQ(state.dump().find("target"), std::string::npos);
}

TEST(SessionStore, IdleSessionsArePurged) {
  auto now = SessionStore::Clock::time_point{};
  ServiceConfig config;
  config.idle_timeout_s = 60;
  SessionStore store(config, [&] { return now; });
  const auto a = store.create({{"task", "guess-who"}})["session_id"].get<std::string>();
  now += std::chrono::seconds(45);
  const auto b = store.create({{"task", "guess-who"}})["session_id"].get<std::string>();
  EXPECT_EQ(store.size(), 2u);
  now += std::chrono::seconds(30);
  EXPECT_EQ(store.purge_expired(), 1u);
  EXPECT_EQ(status_of([&] { store.state(a); }), 404);
  EXPECT_EQ(status_of([&] { store.state(b); }), 200);
  EXPECT_TRUE(store.remove(b));
  EXPECT_FALSE(store.remove(b));
}

TEST(ServiceConfig, FileThenEnvironment) {
  const auto path = std::filesystem::temp_directory_path() / "inquest_service_config.json";
  std::ofstream(path) << R"({"service": {"port": 9000, "idle_timeout_s": 5, "workers": 3}})";
  const std::map<std::string, std::string> env{{"INQUEST_PORT", "9100"}, {"INQUEST_HOST", "0.0.0.0"}};
  const auto config = load_service_config(path.string(), [&](const char* name) -> const char* {
    const auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(config.port, 9100);
  EXPECT_EQ(config.host, "0.0.0.0");
  EXPECT_EQ(config.idle_timeout_s, 5);
  EXPECT_EQ(config.workers, 3u);
  EXPECT_THROW(load_service_config("", [](const char* name) -> const char* {
                 return std::string(name) == "INQUEST_PORT" ? "eighty" : nullptr;
               }),
               Error);
  std::filesystem::remove(path);
}

TEST(Benchmarks, MatchesTheLibrary) {
  ServiceConfig service;
  service.workers = 2;
  const auto reply = benchmark_request({{"task", "guess-who"}, {"seeds", {0, 1}}}, service);
  auto config = SessionConfig::defaults_for(TaskKind::GuessWho);
  BenchmarkPlan plan;
  plan.seeds = {0, 1};
  const auto records = run_benchmark(config, make_world(config), policy_factory("oracle"), plan);
  EXPECT_EQ(reply["report"].dump(), json(compute_report(records, std::vector<std::size_t>{1, 5, 10})).dump());
  EXPECT_EQ(reply["report"]["sr"], 1.0);
  EXPECT_EQ(status_of([&] { benchmark_request({{"policy", "oracle"}}, service); }), 422);
  EXPECT_EQ(status_of([&] { benchmark_request({{"task", "guess-who"}, {"targets", {"C99"}}}, service); }), 422);
  EXPECT_EQ(status_of([&] { benchmark_request({{"task", "guess-who"}, {"policy", "psychic"}}, service); }), 422);
}

TEST(Http, RoundTrip) {
  const auto log = std::filesystem::temp_directory_path() / "inquest_requests.jsonl";
  std::filesystem::remove(log);
  ServiceConfig config;
  config.request_log = log.string();
  config.image.synthetic_images = 40;
  Service service(config);
  const int port = service.bind_any();
  ASSERT_GT(port, 0);
  std::thread thread([&] { service.listen_after_bind(); });
  service.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body)["status"], "ok");

  auto datasets = client.Get("/datasets");
  ASSERT_TRUE(datasets);
  const auto listing = json::parse(datasets->body)["datasets"];
  ASSERT_EQ(listing.size(), 3u);
  EXPECT_EQ(listing[1]["count"], 36);
  EXPECT_EQ(listing[2]["count"], 40);

  auto created = client.Post("/sessions", R"({"config": {"task": "guess-who"}})", "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  auto step = json::parse(created->body);
  const auto id = step["session_id"].get<std::string>();
  const auto target = guess_who_dataset().candidates[10];
  while (!step["done"].get<bool>()) {
    const auto q = step["next_question_structured"].get<Question>();
    auto res = client.Post("/sessions/" + id + "/answer",
                           json{{"answer", to_string(truthful_answer(q, target))}}.dump(), "application/json");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200);
    step = json::parse(res->body);
  }
  EXPECT_EQ(step["final_guess"], target.id);

  auto again = client.Post("/sessions/" + id + "/answer", R"({"answer": "yes"})", "application/json");
  EXPECT_EQ(again->status, 409);
  EXPECT_EQ(json::parse(again->body)["error"], "SessionClosed");
  EXPECT_EQ(client.Post("/sessions/" + id + "/answer", "{not json", "application/json")->status, 422);
  EXPECT_EQ(client.Get("/sessions/" + id + "/state")->status, 200);
  EXPECT_EQ(client.Delete("/sessions/" + id)->status, 204);
  EXPECT_EQ(client.Delete("/sessions/" + id)->status, 404);
  EXPECT_EQ(client.Get("/sessions/" + id + "/state")->status, 404);
  EXPECT_EQ(client.Post("/sessions", "{not json", "application/json")->status, 422);

  auto image = client.Post("/sessions", R"({"task": "image"})", "application/json");
  ASSERT_EQ(image->status, 201);
  EXPECT_TRUE(json::parse(image->body)["next_question"].is_string());

  auto bench = client.Post("/benchmarks", R"({"task": "guess-number", "config": {"window_start": 86}})",
                           "application/json");
  ASSERT_EQ(bench->status, 200);
  EXPECT_EQ(json::parse(bench->body)["report"]["episode_count"], 100);

  service.stop();
  thread.join();
  std::ifstream in(log);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = json::parse(line);
    EXPECT_TRUE(j.contains("status"));
    ++lines;
  }
  EXPECT_GT(lines, 10u);
  std::filesystem::remove(log);
}
