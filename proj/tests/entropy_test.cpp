#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "inquest/entropy.hpp"
#include "inquest/environments.hpp"
#include "inquest/guess_who_data.hpp"
#include "inquest/policies.hpp"
#include "inquest/rng.hpp"

using namespace inquest;

namespace {

// Reference: prior entropy minus expected posterior entropy, natural log, by enumeration.
double reference_eig(const std::vector<Candidate>& cs, const Question& q) {
  std::map<bool, std::vector<const Candidate*>> branch;
  for (const auto& c : cs) branch[*evaluate(q, c)].push_back(&c);
  const double n = static_cast<double>(cs.size());
  auto h = [](double count) {
    // uniform posterior over `count` items
    double s = 0.0;
    for (int i = 0; i < static_cast<int>(count); ++i) s -= (1.0 / count) * std::log(1.0 / count);
    return s;
  };
  double expected = 0.0;
  for (const auto& [answer, members] : branch) {
    const double k = static_cast<double>(members.size());
    expected += (k / n) * h(k);
  }
  return (h(n) - expected) / std::log(2.0);
}

}  // namespace

TEST(Entropy, UniformAndExplicitBeliefs) {
  const auto cs = number_range(0, 8);
  EXPECT_DOUBLE_EQ(entropy(Belief::uniform(cs)), 3.0);
  EXPECT_DOUBLE_EQ(uniform_entropy(8), 3.0);
  Belief skew{{"a", "b"}, {0.25, 0.75}};
  EXPECT_NEAR(entropy(skew), 0.811278124459133, 1e-12);
  Belief point{{"a", "b"}, {1.0, 0.0}};
  EXPECT_EQ(entropy(point), 0.0);
}

TEST(Entropy, ErrorsOnEmptyOrBadBelief) {
  EXPECT_THROW(entropy(Belief{}), Error);
  EXPECT_THROW(uniform_entropy(0), Error);
  Belief bad{{"a", "b"}, {0.5, 0.6}};
  EXPECT_THROW(entropy(bad), Error);
}

TEST(Eig, HandDerivedSplits) {
  EXPECT_NEAR(eig_from_counts(50, 50), 1.0, 1e-12);
  EXPECT_NEAR(eig_from_counts(99, 1), 0.0808, 1e-4);
  EXPECT_EQ(eig_from_counts(100, 0), 0.0);
  EXPECT_EQ(eig_from_counts(0, 7), 0.0);
  EXPECT_NEAR(eig_from_counts(18, 18), 1.0, 1e-12);
}

TEST(Eig, PartitionOfNumbers) {
  const auto cs = number_range(1, 100);
  const auto split = partition(cs, NumericComparison{CompareOp::LessEqual, 50});
  EXPECT_EQ(split.yes_set.size(), 50u);
  EXPECT_EQ(split.no_set.size(), 50u);
  EXPECT_DOUBLE_EQ(split.p_yes, 0.5);
  EXPECT_NEAR(eig(cs, NumericComparison{CompareOp::LessEqual, 50}), 1.0, 1e-12);
}

TEST(Eig, UnanswerableAndEmpty) {
  const auto cs = number_range(0, 4);
  try {
    eig(cs, AttributeQuery{"gender", "male"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnanswerableQuestion);
  }
  EXPECT_THROW(partition(std::vector<Candidate>{}, Parity{ParityKind::Odd}), Error);
}

TEST(Eig, GuessWhoGenderIsOneBit) {
  const auto data = guess_who_dataset();
  EXPECT_NEAR(eig(data.candidates, AttributeQuery{"gender", "male"}), 1.0, 1e-12);
  const auto table = eig_all(data.candidates, attribute_question_pool(data.schema));
  EXPECT_NEAR(table.front().eig, 1.0, 1e-12);
  for (std::size_t i = 1; i < table.size(); ++i) EXPECT_GE(table[i - 1].eig, table[i].eig);
}

TEST(Eig, MatchesEnumerationOracleOnGuessWhoPool) {
  const auto data = guess_who_dataset();
  for (const auto& q : attribute_question_pool(data.schema)) {
    EXPECT_NEAR(eig(data.candidates, q), reference_eig(data.candidates, q), 1e-12) << question_text(q);
  }
}

TEST(EigProperty, BoundedAndMatchesOracleOnRandomSets) {
  auto rng = make_rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = uniform_int(rng, 1, 60);
    const auto start = uniform_int(rng, 0, 900);
    const auto cs = number_range(start, n);
    const Question q = uniform_index(rng, 3) == 0
                           ? Question{Parity{ParityKind::Odd}}
                           : Question{NumericComparison{CompareOp::Less, uniform_int(rng, start - 5, start + n + 5)}};
    const double v = eig(cs, q);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, std::log2(static_cast<double>(n)) + 1e-12);
    ASSERT_LE(v, 1.0 + 1e-12);  // a yes/no answer carries at most one bit
    ASSERT_NEAR(v, reference_eig(cs, q), 1e-9);
  }
}
