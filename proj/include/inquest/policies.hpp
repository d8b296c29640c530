#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "inquest/core.hpp"
#include "inquest/entropy.hpp"
#include "inquest/http_json.hpp"
#include "inquest/question_parser.hpp"
#include "inquest/rng.hpp"

namespace inquest {

enum class PoolKind { Auto, AttributeValues, NumericTemplates, Keywords, Custom };

NLOHMANN_JSON_SERIALIZE_ENUM(PoolKind, {{PoolKind::Auto, "auto"},
                                        {PoolKind::AttributeValues, "attribute_values"},
                                        {PoolKind::NumericTemplates, "numeric_templates"},
                                        {PoolKind::Keywords, "keywords"},
                                        {PoolKind::Custom, "custom"}})

struct OracleConfig {
  double tau = 1e-4;
  std::size_t guess_threshold = 2;
  PoolKind pool = PoolKind::Auto;
  std::vector<Question> custom_pool;

  void validate() const {
    if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidConfig, "tau must be >= 0");
    if (guess_threshold < 1) throw Error(ErrorKind::InvalidConfig, "guess threshold must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Question pools

/// Lower middle element of the sorted values.
inline std::int64_t lower_median(std::span<const Candidate> candidates) {
  std::vector<std::int64_t> values;
  for (const auto& c : candidates) {
    const auto* n = c.as_number();
    if (n == nullptr) throw Error(ErrorKind::InvalidData, "numeric pool over non-numeric candidate " + c.id);
    values.push_back(*n);
  }
  if (values.empty()) throw Error(ErrorKind::EmptySupport, "median of an empty set");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

/// odd, even, <, <=, >, >= with comparison thresholds at the median.
inline std::vector<Question> numeric_question_pool(std::span<const Candidate> candidates) {
  const auto median = lower_median(candidates);
  return {Parity{ParityKind::Odd},
          Parity{ParityKind::Even},
          NumericComparison{CompareOp::Less, median},
          NumericComparison{CompareOp::LessEqual, median},
          NumericComparison{CompareOp::Greater, median},
          NumericComparison{CompareOp::GreaterEqual, median}};
}

/// Every single (attribute, value) question, schema order.
inline std::vector<Question> attribute_question_pool(const AttributeSchema& schema) {
  std::vector<Question> pool;
  for (const auto& spec : schema.attributes) {
    for (const auto& value : spec.values) pool.push_back(AttributeQuery{spec.name, value});
  }
  return pool;
}

/// One keyword question per yes/no attribute, named by its normalized attribute name.
inline std::vector<Question> keyword_question_pool(const AttributeSchema& schema) {
  std::vector<Question> pool;
  for (const auto& spec : schema.attributes) {
    if (schema.is_binary(spec.name)) pool.push_back(KeywordQuery{normalize_keyword(spec.name)});
  }
  return pool;
}

// ---------------------------------------------------------------------------
// Policies

/// What a questioner sees on its turn.
struct PolicyView {
  TaskKind task = TaskKind::GuessWho;
  std::span<const Candidate> candidates;
  const AttributeSchema* schema = nullptr;
  const DialogueHistory* history = nullptr;
};

inline std::vector<Question> question_pool(const PolicyView& view, const OracleConfig& config) {
  auto kind = config.pool;
  if (kind == PoolKind::Auto) {
    kind = view.task == TaskKind::GuessNumber ? PoolKind::NumericTemplates
           : view.task == TaskKind::Image     ? PoolKind::Keywords
                                              : PoolKind::AttributeValues;
  }
  switch (kind) {
    case PoolKind::NumericTemplates: return numeric_question_pool(view.candidates);
    case PoolKind::AttributeValues: return attribute_question_pool(*view.schema);
    case PoolKind::Keywords: return keyword_question_pool(*view.schema);
    case PoolKind::Custom: return config.custom_pool;
    case PoolKind::Auto: break;
  }
  return {};
}

inline std::vector<Question> unasked(std::vector<Question> pool, const DialogueHistory* history) {
  if (history == nullptr) return pool;
  std::erase_if(pool, [&](const Question& q) { return history->asked(q); });
  return pool;
}

/// Max-EIG question selection with uniform sampling among the near-optimal set.
/// At or below the guess threshold it guesses a random surviving candidate.
inline Question oracle_next_question(std::span<const Candidate> candidates, std::span<const Question> pool,
                                     const OracleConfig& config, Rng& rng) {
  config.validate();
  if (candidates.empty()) throw Error(ErrorKind::EmptySupport, "no candidates to question");
  if (candidates.size() <= config.guess_threshold) {
    return Guess{candidates[uniform_index(rng, candidates.size())].id};
  }
  if (pool.empty()) throw Error(ErrorKind::ExhaustedPool, "every pool question was already asked");
  const auto scored = eig_all(candidates, pool);
  const double best = scored.front().eig;
  if (best <= 0.0) throw Error(ErrorKind::ExhaustedPool, "no remaining question splits the candidates");
  std::vector<const Question*> near_best;
  for (const auto& s : scored) {
    if (best - s.eig <= config.tau) near_best.push_back(&s.question);
  }
  return *near_best[uniform_index(rng, near_best.size())];
}

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Question next(const PolicyView& view, Rng& rng) = 0;
};

class OraclePolicy final : public Policy {
 public:
  explicit OraclePolicy(OracleConfig config = {}) : config_(std::move(config)) { config_.validate(); }

  std::string name() const override { return "oracle"; }

  Question next(const PolicyView& view, Rng& rng) override {
    const auto pool = unasked(question_pool(view, config_), view.history);
    return oracle_next_question(view.candidates, pool, config_, rng);
  }

  const OracleConfig& config() const { return config_; }

 private:
  OracleConfig config_;
};

/// Baseline: a uniformly random unasked pool question, guessing at the threshold.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(OracleConfig config = {}) : config_(std::move(config)) { config_.validate(); }

  std::string name() const override { return "random"; }

  Question next(const PolicyView& view, Rng& rng) override {
    if (view.candidates.size() <= config_.guess_threshold && view.task != TaskKind::Image) {
      return Guess{view.candidates[uniform_index(rng, view.candidates.size())].id};
    }
    const auto pool = unasked(question_pool(view, config_), view.history);
    if (pool.empty()) throw Error(ErrorKind::ExhaustedPool, "every pool question was already asked");
    return pool[uniform_index(rng, pool.size())];
  }

 private:
  OracleConfig config_;
};

/// Emits a fixed script, then fails.
class ReplayPolicy final : public Policy {
 public:
  /// `name` lets a replay stand in for the policy that produced the script.
  explicit ReplayPolicy(std::vector<Question> script, std::string name = "replay")
      : script_(std::move(script)), name_(std::move(name)) {}

  std::string name() const override { return name_; }

  Question next(const PolicyView&, Rng&) override {
    if (cursor_ >= script_.size()) {
      throw Error(ErrorKind::ExhaustedScript, "script of " + std::to_string(script_.size()) + " questions spent");
    }
    return script_[cursor_++];
  }

 private:
  std::vector<Question> script_;
  std::string name_;
  std::size_t cursor_ = 0;
};

/// Remote questioner: POST {"history": [{question, answer, feedback}]} -> {"question_text"}.
/// Replies the rule parser cannot structure come back as FreeText.
class ExternalQuestioner final : public Policy {
 public:
  ExternalQuestioner(std::string endpoint, int timeout_ms, QuestionParser parser = {})
      : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms), parser_(std::move(parser)) {}

  std::string name() const override { return "external"; }

  Question next(const PolicyView& view, Rng&) override {
    json turns = json::array();
    if (view.history != nullptr) {
      for (const auto& t : view.history->turns) {
        turns.push_back({{"question", question_text(t.question)},
                         {"answer", t.answer},
                         {"feedback", t.feedback_text ? json(*t.feedback_text) : json(nullptr)}});
      }
    }
    const auto reply = post_json(endpoint_, json{{"history", turns}}, timeout_ms_);
    std::string text;
    if (reply.contains("question_text") && reply["question_text"].is_string()) {
      text = reply["question_text"].get<std::string>();
    }
    if (trim(text).empty()) throw Error(ErrorKind::UnparseableQuestion, "questioner sent no question");
    if (auto parsed = parser_.parse(text)) return *parsed;
    return FreeText{text};
  }

 private:
  std::string endpoint_;
  int timeout_ms_;
  QuestionParser parser_;
};

}  // namespace inquest
