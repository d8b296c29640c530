#include <gtest/gtest.h>

#include <set>

#include "http_fixture.hpp"
#include "inquest/environments.hpp"
#include "inquest/policies.hpp"
#include "inquest/runner.hpp"

using namespace inquest;

namespace {

PolicyView view_of(const World& world, std::span<const Candidate> candidates, const DialogueHistory* history = nullptr) {
  return {world.task, candidates, &world.schema, history};
}

}  // namespace

TEST(Pools, NumericTemplatesAtLowerMedian) {
  const auto pool = numeric_question_pool(number_range(1, 100));
  ASSERT_EQ(pool.size(), 6u);
  EXPECT_EQ(pool[0], Question{Parity{ParityKind::Odd}});
  EXPECT_EQ(pool[1], Question{Parity{ParityKind::Even}});
  EXPECT_EQ(pool[3], Question{(NumericComparison{CompareOp::LessEqual, 50})});
  EXPECT_EQ(lower_median(number_range(1, 5)), 3);
  for (const auto& q : numeric_question_pool(number_range(7, 1))) EXPECT_EQ(eig(number_range(7, 1), q), 0.0);
}

TEST(Pools, AttributeAndKeyword) {
  const auto data = guess_who_dataset();
  EXPECT_EQ(attribute_question_pool(data.schema).size(), 2u + 5 + 4 + 2 + 2 + 4 + 6 + 2 + 5);
  const auto images = synthetic_image_dataset(5, 1);
  const auto keywords = keyword_question_pool(images.schema);
  ASSERT_EQ(keywords.size(), 40u);
  EXPECT_EQ(keywords.front(), Question{KeywordQuery{"5 o clock shadow"}});
}

TEST(Oracle, FirstGuessWhoQuestionIsOneBit) {
  const auto world = guess_who_world();
  OraclePolicy oracle;
  auto rng = make_rng(1);
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) {
    const auto q = oracle.next(view_of(world, world.candidates), rng);
    EXPECT_NEAR(eig(world.candidates, q), 1.0, 1e-4);
    seen.insert(question_text(q));
  }
  EXPECT_GT(seen.size(), 1u);  // ties are sampled, not fixed
  EXPECT_TRUE(seen.count("Is the character's gender male?") == 1);
}

TEST(Oracle, NumericWindowSplitsInHalf) {
  const auto world = guess_number_world(86);
  OraclePolicy oracle;
  auto rng = make_rng(4);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(eig(world.candidates, oracle.next(view_of(world, world.candidates), rng)), 1.0, 1e-12);
}

TEST(Oracle, GuessesAtThreshold) {
  const auto cs = number_range(10, 2);
  auto rng = make_rng(2);
  const auto pool = numeric_question_pool(cs);
  const auto q = oracle_next_question(cs, pool, OracleConfig{}, rng);
  ASSERT_TRUE(std::holds_alternative<Guess>(q));
  const auto& id = std::get<Guess>(q).candidate_id;
  EXPECT_TRUE(id == "10" || id == "11");
}

TEST(Oracle, ExhaustedPool) {
  const auto data = guess_who_dataset();
  auto rng = make_rng(2);
  const std::vector<Question> useless{AttributeQuery{"gender", "robot"}};
  try {
    oracle_next_question(data.candidates, useless, OracleConfig{}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ExhaustedPool);
  }
  EXPECT_THROW(oracle_next_question(data.candidates, std::vector<Question>{}, OracleConfig{}, rng), Error);
  EXPECT_THROW(oracle_next_question(std::vector<Candidate>{}, useless, OracleConfig{}, rng), Error);
}

TEST(Oracle, ZeroTauUniqueMaximizerIsDeterministic) {
  const auto cs = number_range(0, 10);
  const std::vector<Question> pool{NumericComparison{CompareOp::Less, 2}, NumericComparison{CompareOp::Less, 4},
                                   NumericComparison{CompareOp::Less, 5}};
  OracleConfig config;
  config.tau = 0.0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto rng = make_rng(seed);
    EXPECT_EQ(oracle_next_question(cs, pool, config, rng), pool[2]);
  }
}

TEST(OracleProperty, ChoiceWithinTauOfMaxOnEveryTurn) {
  const auto world = guess_who_world();
  const auto pool = attribute_question_pool(world.schema);
  OraclePolicy oracle;
  auto rng = make_rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto target = pick(world.candidates, rng);
    std::vector<Candidate> cs = world.candidates;
    DialogueHistory h;
    std::set<std::string> asked;
    while (cs.size() > 2) {
      const auto q = oracle.next(view_of(world, cs, &h), rng);
      double best = 0.0;
      for (const auto& p : pool) {
        if (!h.asked(p)) best = std::max(best, eig(cs, p));
      }
      ASSERT_LE(best - eig(cs, q), 1e-4);
      ASSERT_TRUE(asked.insert(question_text(q)).second) << "repeated " << question_text(q);
      const auto a = truthful_answer(q, target);
      h = append_turn(h, q, a);
      cs = tabular_filter(cs, q, a);
    }
  }
}

TEST(OracleProperty, PowerOfTwoWindowTakesExactlyK) {
  for (int k = 1; k <= 6; ++k) {
    const auto n = std::int64_t{1} << k;
    World world;
    world.task = TaskKind::GuessNumber;
    world.candidates = number_range(300, n);
    const auto shared = std::make_shared<const World>(world);
    auto config = SessionConfig::defaults_for(TaskKind::GuessNumber);
    config.window_start = 300;
    for (const auto& target : world.candidates) {
      OraclePolicy oracle;
      const auto record = run_episode(config, shared, oracle, target.id, 3);
      ASSERT_TRUE(record.success);
      ASSERT_EQ(record.turn_count, static_cast<std::size_t>(k)) << n << " " << target.id;
    }
  }
}

TEST(Replay, ScriptThenExhausted) {
  const auto world = guess_number_world(0);
  auto rng = make_rng(0);
  ReplayPolicy replay({Parity{ParityKind::Odd}, Parity{ParityKind::Even}, Guess{"3"}});
  for (int i = 0; i < 3; ++i) replay.next(view_of(world, world.candidates), rng);
  try {
    replay.next(view_of(world, world.candidates), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ExhaustedScript);
  }
  ReplayPolicy empty({});
  EXPECT_THROW(empty.next(view_of(world, world.candidates), rng), Error);
}

TEST(Replay, GoldenTranscriptReproducesRecord) {
  for (auto task : {TaskKind::GuessNumber, TaskKind::GuessWho, TaskKind::Image}) {
    auto config = SessionConfig::defaults_for(task);
    config.window_start = 86;
    config.image.synthetic_images = 50;
    const auto world = std::make_shared<const World>(make_world(config));
    OraclePolicy oracle;
    const auto target = world->candidates[7].id;
    const auto original = run_episode(config, world, oracle, target, 12);
    std::vector<Question> script;
    for (const auto& t : original.turns.turns) script.push_back(t.question);
    ReplayPolicy replay(script, "oracle");
    const auto replayed = run_episode(config, world, replay, target, 12);
    EXPECT_EQ(json(replayed).dump(), json(original).dump()) << to_string(task);
  }
}

TEST(RandomPolicy, AsksUnaskedPoolQuestions) {
  const auto world = guess_who_world();
  RandomPolicy policy;
  auto rng = make_rng(5);
  DialogueHistory h;
  h.max_turns = 100;
  for (int i = 0; i < 10; ++i) {
    const auto q = policy.next(view_of(world, world.candidates, &h), rng);
    ASSERT_FALSE(h.asked(q));
    h = append_turn(h, q, Answer::CantAnswer);
  }
}

// ---------------------------------------------------------------------------
// External questioner

TEST(ExternalQuestioner, ParsesReplyAndSendsHistory) {
  json seen;
  fixtures::JsonServer server([&](const std::string& body) {
    seen = json::parse(body);
    return R"({"question_text": "Is the person wearing glasses?"})";
  });
  const auto world = guess_who_world();
  ExternalQuestioner questioner(server.url(), 2000);
  DialogueHistory h;
  h = append_turn(h, AttributeQuery{"gender", "male"}, Answer::Yes, std::string("gender: male=18"));
  auto rng = make_rng(0);
  const auto q = questioner.next(view_of(world, world.candidates, &h), rng);
  EXPECT_EQ(q, Question{KeywordQuery{"glasses"}});
  ASSERT_EQ(seen["history"].size(), 1u);
  EXPECT_EQ(seen["history"][0]["question"], "Is the character's gender male?");
  EXPECT_EQ(seen["history"][0]["answer"], "yes");
  EXPECT_EQ(seen["history"][0]["feedback"], "gender: male=18");
}

TEST(ExternalQuestioner, SchemaParserStructuresAttributeQuestions) {
  fixtures::JsonServer server([](const std::string&) { return R"({"question_text": "Does the character wear glasses?"})"; });
  const auto world = guess_who_world();
  ExternalQuestioner questioner(server.url(), 2000, QuestionParser(world.schema));
  auto rng = make_rng(0);
  EXPECT_EQ(questioner.next(view_of(world, world.candidates), rng),
            Question{(AttributeQuery{"wears glasses", "yes"})});
}

TEST(ExternalQuestioner, EmptyReplyAndTimeout) {
  fixtures::JsonServer empty([](const std::string&) { return R"({"question_text": "  "})"; });
  const auto world = guess_who_world();
  auto rng = make_rng(0);
  ExternalQuestioner q1(empty.url(), 2000);
  try {
    q1.next(view_of(world, world.candidates), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnparseableQuestion);
  }
  fixtures::JsonServer slow([](const std::string&) { return R"({"question_text": "Is it C01?"})"; },
                            std::chrono::milliseconds(600));
  ExternalQuestioner q2(slow.url(), 150);
  try {
    q2.next(view_of(world, world.candidates), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ClientTimeout);
  }
}

TEST(ExternalQuestioner, UnparseableRepliesTakeTheSoftPenalty) {
  fixtures::JsonServer server([](const std::string&) { return R"({"question_text": ""})"; });
  auto config = SessionConfig::defaults_for(TaskKind::GuessWho);
  config.t_max = 2;
  config.reward.t_max = 2;
  const auto world = std::make_shared<const World>(guess_who_world());
  ExternalQuestioner questioner(server.url(), 2000);
  const auto record = run_episode(config, world, questioner, "C04", 0);
  EXPECT_EQ(record.step_scores, (std::vector<double>{-0.25, -0.25}));
  EXPECT_FALSE(record.success);
}
