#include <gtest/gtest.h>

#include "inquest/core.hpp"
#include "inquest/guess_who_data.hpp"
#include "inquest/rng.hpp"

using namespace inquest;

TEST(Keyword, NormalizeLowercasesAndJoins) {
  EXPECT_EQ(normalize_keyword("Blond_Hair"), "blond hair");
  EXPECT_EQ(normalize_keyword("  Wearing   Hat "), "wearing hat");
  EXPECT_EQ(normalize_keyword("5_o_Clock_Shadow"), "5 o clock shadow");
}

TEST(Schema, BinaryAndLookup) {
  const auto schema = guess_who_schema();
  EXPECT_TRUE(schema.is_binary("wears glasses"));
  EXPECT_FALSE(schema.is_binary("hair color"));
  EXPECT_TRUE(schema.has_value("hobby", "games"));
  EXPECT_FALSE(schema.has_value("hobby", "chess"));
  EXPECT_EQ(schema.find("nope"), nullptr);
  EXPECT_NO_THROW(schema.validate());
}

TEST(Schema, RejectsDuplicatesAndSingleValues) {
  AttributeSchema dup{{{"a", {"x", "y"}}, {"a", {"x", "y"}}}};
  EXPECT_THROW(dup.validate(), Error);
  AttributeSchema single{{{"a", {"x"}}}};
  EXPECT_THROW(single.validate(), Error);
}

TEST(Candidates, GuessWhoTableConformsAndIdsUnique) {
  const auto data = guess_who_dataset();
  ASSERT_EQ(data.candidates.size(), 36u);
  EXPECT_NO_THROW(validate_candidates(data.candidates, &data.schema));
  EXPECT_EQ(data.candidates.front().id, "C01");
  EXPECT_EQ(data.candidates.back().id, "C36");
}

TEST(Candidates, ValidationRejectsDuplicateIds) {
  std::vector<Candidate> cs{Candidate::number(3), Candidate::number(3)};
  EXPECT_THROW(validate_candidates(cs, nullptr), Error);
}

TEST(QuestionText, CanonicalRenderings) {
  EXPECT_EQ(question_text(AttributeQuery{"hair color", "blonde"}), "Is the character's hair color blonde?");
  EXPECT_EQ(question_text(AttributeQuery{"wears glasses", "yes"}), "Does the character wear glasses?");
  EXPECT_EQ(question_text(AttributeQuery{"wears glasses", "no"}), "Does the character not wear glasses?");
  EXPECT_EQ(question_text(AttributeQuery{"has beard", "yes"}), "Does the character have a beard?");
  EXPECT_EQ(question_text(NumericComparison{CompareOp::LessEqual, 50}),
            "Is the number less than or equal to 50?");
  EXPECT_EQ(question_text(Parity{ParityKind::Odd}), "Is the number odd?");
  EXPECT_EQ(question_text(KeywordQuery{"eyeglasses"}), "Does the target show eyeglasses?");
  EXPECT_EQ(question_text(Guess{"C04"}), "Is it C04?");
}

TEST(Answers, StringsRoundTrip) {
  for (auto a : {Answer::Yes, Answer::No, Answer::CantAnswer}) EXPECT_EQ(answer_from_string(to_string(a)), a);
  EXPECT_EQ(answer_from_string(" YES "), Answer::Yes);
  EXPECT_THROW(answer_from_string("maybe"), Error);
}

TEST(History, AppendIsPureAndBudgeted) {
  DialogueHistory h;
  h.max_turns = 2;
  const auto h1 = append_turn(h, Parity{ParityKind::Odd}, Answer::Yes);
  EXPECT_TRUE(h.empty());
  EXPECT_EQ(h1.size(), 1u);
  EXPECT_TRUE(h1.asked(Parity{ParityKind::Odd}));
  EXPECT_FALSE(h1.asked(Parity{ParityKind::Even}));
  const auto h2 = append_turn(h1, Parity{ParityKind::Even}, Answer::No);
  EXPECT_TRUE(h2.full());
  try {
    append_turn(h2, Guess{"1"}, Answer::No);
    FAIL() << "expected TurnBudgetExceeded";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TurnBudgetExceeded);
  }
}

TEST(RankedList, DescendingWithIdTieBreak) {
  const auto r = RankedList::from_scores({{"b", 0.5}, {"c", 0.9}, {"a", 0.5}, {"d", 0.1}});
  EXPECT_EQ(r.ids(), (std::vector<std::string>{"c", "a", "b", "d"}));
}

TEST(Json, QuestionRoundTripAllVariants) {
  const std::vector<Question> qs{AttributeQuery{"gender", "male"}, NumericComparison{CompareOp::Greater, -4},
                                 Parity{ParityKind::Even},        KeywordQuery{"smiling"},
                                 Guess{"C12"},                    FreeText{"is it fluffy?"}};
  for (const auto& q : qs) {
    const json j = q;
    EXPECT_EQ(j.get<Question>(), q) << j.dump();
  }
  EXPECT_THROW(json({{"type", "riddle"}}).get<Question>(), Error);
}

TEST(Json, CandidatesRoundTrip) {
  const auto data = guess_who_dataset();
  for (const auto& c : data.candidates) EXPECT_EQ(json(c).get<Candidate>(), c);
  const auto n = Candidate::number(42);
  EXPECT_EQ(json(n).get<Candidate>(), n);
  const Candidate img{"img1", ImagePayload{{{"Smiling", "yes"}}, "img1"}};
  EXPECT_EQ(json(img).get<Candidate>(), img);
}

TEST(Json, SessionConfigDefaultsAndRoundTrip) {
  const auto image = json{{"task", "image"}}.get<SessionConfig>();
  EXPECT_EQ(image.t_max, 20u);
  EXPECT_EQ(image.termination.kind, TerminationKind::RankAtMostK);
  EXPECT_EQ(image.termination.k, 5u);
  EXPECT_EQ(image.reward.t_max, 20u);

  auto config = SessionConfig::defaults_for(TaskKind::GuessNumber);
  config.window_start = 86;
  config.seed = 99;
  config.reward.kappa = 3.0;
  EXPECT_EQ(json(config).get<SessionConfig>(), config);
}

TEST(SessionConfig, ValidationRules) {
  auto c = SessionConfig::defaults_for(TaskKind::GuessWho);
  c.termination.kind = TerminationKind::RankAtMostK;
  EXPECT_THROW(c.validate(), Error);
  c = SessionConfig::defaults_for(TaskKind::GuessWho);
  c.reward.soft_penalty = -0.7;
  EXPECT_THROW(c.validate(), Error);
  c = SessionConfig::defaults_for(TaskKind::GuessWho);
  c.image.gate.d0 = 1.5;
  EXPECT_THROW(c.validate(), Error);
  c = SessionConfig::defaults_for(TaskKind::GuessWho);
  c.t_max = 10;
  EXPECT_THROW(c.validate(), Error);  // reward t_max out of sync
}

TEST(Rng, HelpersStayInRange) {
  auto rng = make_rng(5);
  for (int i = 0; i < 10000; ++i) {
    const auto v = uniform_int(rng, -3, 3);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 3);
    const auto u = uniform_real(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  auto a = make_rng(derive_seed(1, 2));
  auto b = make_rng(derive_seed(1, 2));
  EXPECT_EQ(a(), b());
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
}
