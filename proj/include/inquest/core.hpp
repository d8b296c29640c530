#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "inquest/error.hpp"

namespace inquest {

using json = nlohmann::json;
using AttributeMap = std::map<std::string, std::string>;

// ---------------------------------------------------------------------------
// Text helpers shared by parsers, renderers and keyword grounding.

inline std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

/// Lowercase, underscores to spaces, whitespace collapsed. "Blond_Hair" -> "blond hair".
inline std::string normalize_keyword(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (c == '_' || std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Candidates

struct AttributeSpec {
  std::string name;
  std::vector<std::string> values;

  bool operator==(const AttributeSpec&) const = default;
};

struct AttributeSchema {
  std::vector<AttributeSpec> attributes;

  bool operator==(const AttributeSchema&) const = default;

  const AttributeSpec* find(std::string_view name) const {
    for (const auto& spec : attributes) {
      if (spec.name == name) return &spec;
    }
    return nullptr;
  }

  AttributeSpec* find(std::string_view name) {
    for (auto& spec : attributes) {
      if (spec.name == name) return &spec;
    }
    return nullptr;
  }

  bool has_value(std::string_view name, std::string_view value) const {
    const auto* spec = find(name);
    return spec != nullptr &&
           std::find(spec->values.begin(), spec->values.end(), value) != spec->values.end();
  }

  /// A yes/no attribute, e.g. "wears glasses" or CelebA "Eyeglasses".
  bool is_binary(std::string_view name) const {
    const auto* spec = find(name);
    return spec != nullptr && spec->values.size() == 2 && has_value(name, "yes") &&
           has_value(name, "no");
  }

  void validate() const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
      const auto& spec = attributes[i];
      for (std::size_t j = 0; j < i; ++j) {
        if (attributes[j].name == spec.name) {
          throw Error(ErrorKind::InvalidData, "duplicate attribute '" + spec.name + "'");
        }
      }
      auto values = spec.values;
      std::sort(values.begin(), values.end());
      if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
        throw Error(ErrorKind::InvalidData, "duplicate value in attribute '" + spec.name + "'");
      }
      if (values.size() < 2) {
        throw Error(ErrorKind::InvalidData, "attribute '" + spec.name + "' needs >= 2 values");
      }
    }
  }
};

struct ImagePayload {
  AttributeMap attributes;
  std::string embedding_ref;

  bool operator==(const ImagePayload&) const = default;
};

using CandidatePayload = std::variant<std::int64_t, AttributeMap, ImagePayload>;

struct Candidate {
  std::string id;
  CandidatePayload payload;

  bool operator==(const Candidate&) const = default;

  static Candidate number(std::int64_t value) { return {std::to_string(value), value}; }

  const std::int64_t* as_number() const { return std::get_if<std::int64_t>(&payload); }

  const AttributeMap* attributes() const {
    if (const auto* map = std::get_if<AttributeMap>(&payload)) return map;
    if (const auto* image = std::get_if<ImagePayload>(&payload)) return &image->attributes;
    return nullptr;
  }
};

/// Checks id uniqueness and, when a schema is given, one legal value per attribute.
inline void validate_candidates(std::span<const Candidate> candidates,
                                const AttributeSchema* schema = nullptr) {
  std::vector<std::string_view> ids;
  ids.reserve(candidates.size());
  for (const auto& c : candidates) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end());
  if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
    throw Error(ErrorKind::InvalidData, "duplicate candidate id '" + std::string(*dup) + "'");
  }
  if (schema == nullptr) return;
  for (const auto& c : candidates) {
    const auto* attrs = c.attributes();
    if (attrs == nullptr || attrs->size() != schema->attributes.size()) {
      throw Error(ErrorKind::InvalidData, "candidate '" + c.id + "' does not match the schema");
    }
    for (const auto& [name, value] : *attrs) {
      if (!schema->has_value(name, value)) {
        throw Error(ErrorKind::InvalidData,
                    "candidate '" + c.id + "' has illegal " + name + "=" + value);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Questions and answers

struct AttributeQuery {
  std::string attribute;
  std::string value;
  bool operator==(const AttributeQuery&) const = default;
};

enum class CompareOp { Less, LessEqual, Greater, GreaterEqual };

struct NumericComparison {
  CompareOp op;
  std::int64_t threshold;
  bool operator==(const NumericComparison&) const = default;
};

enum class ParityKind { Odd, Even };

struct Parity {
  ParityKind parity;
  bool operator==(const Parity&) const = default;
};

struct KeywordQuery {
  std::string keyword;
  bool operator==(const KeywordQuery&) const = default;
};

struct Guess {
  std::string candidate_id;
  bool operator==(const Guess&) const = default;
};

struct FreeText {
  std::string text;
  bool operator==(const FreeText&) const = default;
};

using Question =
    std::variant<AttributeQuery, NumericComparison, Parity, KeywordQuery, Guess, FreeText>;

enum class Answer { Yes, No, CantAnswer };

constexpr std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEqual: return "<=";
    case CompareOp::Greater: return ">";
    case CompareOp::GreaterEqual: return ">=";
  }
  return "?";
}

constexpr std::string_view to_string(Answer answer) {
  switch (answer) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::CantAnswer: return "cant_answer";
  }
  return "?";
}

inline Answer answer_from_string(std::string_view text) {
  const auto lowered = to_lower(trim(text));
  if (lowered == "yes") return Answer::Yes;
  if (lowered == "no") return Answer::No;
  if (lowered == "cant_answer" || lowered == "cant" || lowered == "i can't answer" ||
      lowered == "can't answer") {
    return Answer::CantAnswer;
  }
  throw Error(ErrorKind::InvalidData, "unknown answer '" + std::string(text) + "'");
}

inline CompareOp compare_op_from_string(std::string_view text) {
  if (text == "<") return CompareOp::Less;
  if (text == "<=") return CompareOp::LessEqual;
  if (text == ">") return CompareOp::Greater;
  if (text == ">=") return CompareOp::GreaterEqual;
  throw Error(ErrorKind::InvalidData, "unknown comparison '" + std::string(text) + "'");
}

/// Questions the engine can evaluate against a candidate payload.
inline bool is_structured(const Question& q) { return !std::holds_alternative<FreeText>(q); }

inline std::string attribute_question_text(const AttributeQuery& q) {
  const auto binary = q.value == "yes" || q.value == "no";
  if (binary && q.attribute.rfind("wears ", 0) == 0) {
    return (q.value == "yes" ? "Does the character wear " : "Does the character not wear ") +
           q.attribute.substr(6) + "?";
  }
  if (binary && q.attribute.rfind("has ", 0) == 0) {
    return (q.value == "yes" ? "Does the character have a " : "Does the character lack a ") +
           q.attribute.substr(4) + "?";
  }
  return "Is the character's " + q.attribute + " " + q.value + "?";
}

/// Canonical English rendering used in transcripts and service responses.
inline std::string question_text(const Question& question) {
  struct Visitor {
    std::string operator()(const AttributeQuery& q) const { return attribute_question_text(q); }
    std::string operator()(const NumericComparison& q) const {
      const auto n = std::to_string(q.threshold);
      switch (q.op) {
        case CompareOp::Less: return "Is the number less than " + n + "?";
        case CompareOp::LessEqual: return "Is the number less than or equal to " + n + "?";
        case CompareOp::Greater: return "Is the number greater than " + n + "?";
        case CompareOp::GreaterEqual: return "Is the number greater than or equal to " + n + "?";
      }
      return {};
    }
    std::string operator()(const Parity& q) const {
      return q.parity == ParityKind::Odd ? "Is the number odd?" : "Is the number even?";
    }
    std::string operator()(const KeywordQuery& q) const {
      return "Does the target show " + q.keyword + "?";
    }
    std::string operator()(const Guess& q) const { return "Is it " + q.candidate_id + "?"; }
    std::string operator()(const FreeText& q) const { return q.text; }
  };
  return std::visit(Visitor{}, question);
}

// ---------------------------------------------------------------------------
// Dialogue

struct Turn {
  Question question;
  Answer answer = Answer::CantAnswer;
  std::optional<std::string> feedback_text;

  bool operator==(const Turn&) const = default;
};

struct DialogueHistory {
  std::vector<Turn> turns;
  std::size_t max_turns = 16;

  bool operator==(const DialogueHistory&) const = default;

  std::size_t size() const { return turns.size(); }
  bool empty() const { return turns.empty(); }
  bool full() const { return turns.size() >= max_turns; }

  bool asked(const Question& q) const {
    return std::any_of(turns.begin(), turns.end(),
                       [&](const Turn& t) { return t.question == q; });
  }
};

/// Returns a new history with one more turn; the input is left untouched.
inline DialogueHistory append_turn(const DialogueHistory& history, Question question,
                                   Answer answer, std::optional<std::string> feedback = {}) {
  if (history.full()) {
    throw Error(ErrorKind::TurnBudgetExceeded,
                "history already holds " + std::to_string(history.max_turns) + " turns");
  }
  DialogueHistory next = history;
  next.turns.push_back(Turn{std::move(question), answer, std::move(feedback)});
  return next;
}

// ---------------------------------------------------------------------------
// Ranking

struct ScoredCandidate {
  std::string id;
  double score = 0.0;
  bool operator==(const ScoredCandidate&) const = default;
};

/// Descending by score; equal scores ordered by ascending id.
struct RankedList {
  std::vector<ScoredCandidate> entries;

  bool operator==(const RankedList&) const = default;
  std::size_t size() const { return entries.size(); }

  static RankedList from_scores(std::vector<ScoredCandidate> scored) {
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.id < b.id;
    });
    return RankedList{std::move(scored)};
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.id);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Session configuration

enum class TaskKind { GuessNumber, GuessWho, Image };

constexpr std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::GuessNumber: return "guess-number";
    case TaskKind::GuessWho: return "guess-who";
    case TaskKind::Image: return "image";
  }
  return "?";
}

inline TaskKind task_kind_from_string(std::string_view text) {
  if (text == "guess-number") return TaskKind::GuessNumber;
  if (text == "guess-who") return TaskKind::GuessWho;
  if (text == "image") return TaskKind::Image;
  throw Error(ErrorKind::InvalidConfig, "unknown task '" + std::string(text) + "'");
}

enum class TerminationKind { Singleton, ExplicitGuess, RankAtMostK };
enum class FeedbackKind { None, Distribution, TopK };
enum class LogBase { Natural, Base2 };
enum class WindowSampling { Evaluation, Synthesis };
enum class RankerKind { KeywordGate, Rrf, Ssm };

struct Termination {
  TerminationKind kind = TerminationKind::Singleton;
  std::size_t k = 5;
  bool operator==(const Termination&) const = default;
};

struct FeedbackMode {
  FeedbackKind kind = FeedbackKind::None;
  std::size_t k = 10;
  bool operator==(const FeedbackMode&) const = default;
};

struct RewardParams {
  double kappa = 2.0;
  double alpha = 0.7;
  std::size_t t_max = 16;
  double soft_penalty = -0.25;
  LogBase image_log_base = LogBase::Natural;

  bool operator==(const RewardParams&) const = default;

  void validate() const {
    if (!(kappa > 0.0)) throw Error(ErrorKind::InvalidConfig, "kappa must be > 0");
    if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidConfig, "alpha must be >= 0");
    if (t_max < 1) throw Error(ErrorKind::InvalidConfig, "t_max must be >= 1");
    if (!(soft_penalty > -0.5 && soft_penalty < 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "soft penalty must lie in (-0.5, 0)");
    }
  }
};

struct GateParams {
  double mu = 0.15;
  double beta = 20.0;
  double d0 = 0.9;

  bool operator==(const GateParams&) const = default;

  void validate() const {
    if (!(d0 > 0.0 && d0 < 1.0)) throw Error(ErrorKind::InvalidConfig, "d0 must lie in (0, 1)");
    if (!(beta > 0.0)) throw Error(ErrorKind::InvalidConfig, "beta must be > 0");
  }
};

struct ImageParams {
  // File-backed store; when store_path is empty a synthetic fixture is generated.
  std::string store_path;
  std::string keywords_path;
  std::string annotations_path;
  std::string embedder_endpoint;
  std::size_t synthetic_images = 100;
  std::uint64_t synthetic_seed = 7;
  bool compose_joined = true;
  RankerKind ranker = RankerKind::KeywordGate;
  GateParams gate;
  std::size_t oracle_top_n = 10;

  bool operator==(const ImageParams&) const = default;
};

struct SessionConfig {
  TaskKind task = TaskKind::GuessWho;
  std::optional<std::int64_t> window_start;
  WindowSampling window_sampling = WindowSampling::Evaluation;
  ImageParams image;
  std::size_t t_max = 16;
  Termination termination;
  FeedbackMode feedback;
  RewardParams reward;
  std::uint64_t seed = 0;
  std::string answerer_endpoint;  // empty: truthful predicate evaluation
  int client_timeout_ms = 5000;

  bool operator==(const SessionConfig&) const = default;

  static SessionConfig defaults_for(TaskKind task) {
    SessionConfig config;
    config.task = task;
    if (task == TaskKind::Image) {
      config.t_max = 20;
      config.termination = {TerminationKind::RankAtMostK, 5};
      config.feedback = {FeedbackKind::TopK, 10};
    } else {
      config.feedback = {FeedbackKind::Distribution, 0};
    }
    config.reward.t_max = config.t_max;
    return config;
  }

  void validate() const {
    if (t_max < 1) throw Error(ErrorKind::InvalidConfig, "t_max must be >= 1");
    if (termination.kind == TerminationKind::RankAtMostK && task != TaskKind::Image) {
      throw Error(ErrorKind::InvalidConfig, "rank termination applies to image tasks only");
    }
    if (task == TaskKind::Image && termination.kind != TerminationKind::RankAtMostK) {
      throw Error(ErrorKind::InvalidConfig, "image tasks terminate on target rank");
    }
    if (termination.kind == TerminationKind::RankAtMostK && termination.k < 1) {
      throw Error(ErrorKind::InvalidConfig, "rank threshold must be >= 1");
    }
    if (reward.t_max != t_max) {
      throw Error(ErrorKind::InvalidConfig, "reward t_max must equal session t_max");
    }
    reward.validate();
    image.gate.validate();
  }
};

// ---------------------------------------------------------------------------
// Episodes

struct EpisodeRecord {
  SessionConfig session_config;
  std::string policy;
  std::string target_id;
  DialogueHistory turns;
  std::vector<double> step_scores;
  bool success = false;
  std::size_t turn_count = 0;
  double trajectory_reward = 0.0;
  std::uint64_t seed = 0;
  // Image tasks: target rank before the first turn, then after every turn.
  std::optional<std::vector<std::size_t>> rank_trace;

  bool operator==(const EpisodeRecord&) const = default;
};

}  // namespace inquest

// ---------------------------------------------------------------------------
// JSON encodings

namespace nlohmann {

template <>
struct adl_serializer<inquest::Question> {
  static void to_json(json& j, const inquest::Question& question) {
    using namespace inquest;
    struct Visitor {
      json operator()(const AttributeQuery& q) const {
        return {{"type", "attribute"}, {"attribute", q.attribute}, {"value", q.value}};
      }
      json operator()(const NumericComparison& q) const {
        return {{"type", "compare"}, {"op", to_string(q.op)}, {"threshold", q.threshold}};
      }
      json operator()(const Parity& q) const {
        return {{"type", "parity"}, {"parity", q.parity == ParityKind::Odd ? "odd" : "even"}};
      }
      json operator()(const KeywordQuery& q) const {
        return {{"type", "keyword"}, {"keyword", q.keyword}};
      }
      json operator()(const Guess& q) const {
        return {{"type", "guess"}, {"candidate", q.candidate_id}};
      }
      json operator()(const FreeText& q) const { return {{"type", "free_text"}, {"text", q.text}}; }
    };
    j = std::visit(Visitor{}, question);
  }

  static void from_json(const json& j, inquest::Question& question) {
    using namespace inquest;
    const auto type = j.at("type").get<std::string>();
    if (type == "attribute") {
      question = AttributeQuery{j.at("attribute").get<std::string>(), j.at("value").get<std::string>()};
    } else if (type == "compare") {
      question = NumericComparison{compare_op_from_string(j.at("op").get<std::string>()),
                                   j.at("threshold").get<std::int64_t>()};
    } else if (type == "parity") {
      const auto p = j.at("parity").get<std::string>();
      if (p != "odd" && p != "even") throw Error(ErrorKind::InvalidData, "bad parity '" + p + "'");
      question = Parity{p == "odd" ? ParityKind::Odd : ParityKind::Even};
    } else if (type == "keyword") {
      question = KeywordQuery{j.at("keyword").get<std::string>()};
    } else if (type == "guess") {
      question = Guess{j.at("candidate").get<std::string>()};
    } else if (type == "free_text") {
      question = FreeText{j.at("text").get<std::string>()};
    } else {
      throw Error(ErrorKind::InvalidData, "unknown question type '" + type + "'");
    }
  }
};

template <typename T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& value) {
    if (value) {
      j = *value;
    } else {
      j = nullptr;
    }
  }
  static void from_json(const json& j, std::optional<T>& value) {
    if (j.is_null()) {
      value.reset();
    } else {
      value = j.get<T>();
    }
  }
};

}  // namespace nlohmann

namespace inquest {

inline void to_json(json& j, Answer answer) { j = to_string(answer); }
inline void from_json(const json& j, Answer& answer) {
  answer = answer_from_string(j.get<std::string>());
}

inline void to_json(json& j, const AttributeSpec& spec) {
  j = {{"name", spec.name}, {"values", spec.values}};
}
inline void from_json(const json& j, AttributeSpec& spec) {
  j.at("name").get_to(spec.name);
  j.at("values").get_to(spec.values);
}

inline void to_json(json& j, const AttributeSchema& schema) {
  j = {{"attributes", schema.attributes}};
}
inline void from_json(const json& j, AttributeSchema& schema) {
  j.at("attributes").get_to(schema.attributes);
}

inline void to_json(json& j, const Candidate& c) {
  j = {{"id", c.id}};
  if (const auto* n = std::get_if<std::int64_t>(&c.payload)) {
    j["number"] = *n;
  } else if (const auto* attrs = std::get_if<AttributeMap>(&c.payload)) {
    j["attributes"] = *attrs;
  } else {
    const auto& image = std::get<ImagePayload>(c.payload);
    j["attributes"] = image.attributes;
    j["embedding_ref"] = image.embedding_ref;
  }
}
inline void from_json(const json& j, Candidate& c) {
  j.at("id").get_to(c.id);
  if (j.contains("number")) {
    c.payload = j.at("number").get<std::int64_t>();
  } else if (j.contains("embedding_ref")) {
    c.payload = ImagePayload{j.at("attributes").get<AttributeMap>(),
                             j.at("embedding_ref").get<std::string>()};
  } else if (j.contains("attributes")) {
    c.payload = j.at("attributes").get<AttributeMap>();
  } else {
    throw Error(ErrorKind::InvalidData, "candidate '" + c.id + "' has no payload");
  }
}

inline void to_json(json& j, const Turn& turn) {
  j = {{"question", turn.question},
       {"text", question_text(turn.question)},
       {"answer", turn.answer},
       {"feedback", turn.feedback_text}};
}
inline void from_json(const json& j, Turn& turn) {
  j.at("question").get_to(turn.question);
  j.at("answer").get_to(turn.answer);
  if (j.contains("feedback")) j.at("feedback").get_to(turn.feedback_text);
}

inline void to_json(json& j, const DialogueHistory& history) {
  j = {{"max_turns", history.max_turns}, {"turns", history.turns}};
}
inline void from_json(const json& j, DialogueHistory& history) {
  j.at("max_turns").get_to(history.max_turns);
  j.at("turns").get_to(history.turns);
}

inline void to_json(json& j, const ScoredCandidate& s) { j = {{"id", s.id}, {"score", s.score}}; }
inline void from_json(const json& j, ScoredCandidate& s) {
  j.at("id").get_to(s.id);
  j.at("score").get_to(s.score);
}
inline void to_json(json& j, const RankedList& r) { j = r.entries; }
inline void from_json(const json& j, RankedList& r) { j.get_to(r.entries); }

NLOHMANN_JSON_SERIALIZE_ENUM(TerminationKind, {{TerminationKind::Singleton, "singleton"},
                                               {TerminationKind::ExplicitGuess, "explicit_guess"},
                                               {TerminationKind::RankAtMostK, "rank_at_most"}})
NLOHMANN_JSON_SERIALIZE_ENUM(FeedbackKind, {{FeedbackKind::None, "none"},
                                            {FeedbackKind::Distribution, "distribution"},
                                            {FeedbackKind::TopK, "top_k"}})
NLOHMANN_JSON_SERIALIZE_ENUM(LogBase, {{LogBase::Natural, "natural"}, {LogBase::Base2, "base2"}})
NLOHMANN_JSON_SERIALIZE_ENUM(WindowSampling, {{WindowSampling::Evaluation, "evaluation"},
                                              {WindowSampling::Synthesis, "synthesis"}})
NLOHMANN_JSON_SERIALIZE_ENUM(RankerKind, {{RankerKind::KeywordGate, "keyword-gate"},
                                          {RankerKind::Rrf, "rrf"},
                                          {RankerKind::Ssm, "ssm"}})

inline void to_json(json& j, TaskKind kind) { j = to_string(kind); }
inline void from_json(const json& j, TaskKind& kind) {
  kind = task_kind_from_string(j.get<std::string>());
}

inline void to_json(json& j, const Termination& t) { j = {{"kind", t.kind}, {"k", t.k}}; }
inline void from_json(const json& j, Termination& t) {
  j.at("kind").get_to(t.kind);
  t.k = j.value("k", std::size_t{5});
}

inline void to_json(json& j, const FeedbackMode& f) { j = {{"kind", f.kind}, {"k", f.k}}; }
inline void from_json(const json& j, FeedbackMode& f) {
  j.at("kind").get_to(f.kind);
  f.k = j.value("k", std::size_t{10});
}

inline void to_json(json& j, const RewardParams& r) {
  j = {{"kappa", r.kappa},
       {"alpha", r.alpha},
       {"t_max", r.t_max},
       {"soft_penalty", r.soft_penalty},
       {"image_log_base", r.image_log_base}};
}
inline void from_json(const json& j, RewardParams& r) {
  const RewardParams d;
  r.kappa = j.value("kappa", d.kappa);
  r.alpha = j.value("alpha", d.alpha);
  r.t_max = j.value("t_max", d.t_max);
  r.soft_penalty = j.value("soft_penalty", d.soft_penalty);
  r.image_log_base = j.value("image_log_base", d.image_log_base);
}

inline void to_json(json& j, const GateParams& g) {
  j = {{"mu", g.mu}, {"beta", g.beta}, {"d0", g.d0}};
}
inline void from_json(const json& j, GateParams& g) {
  const GateParams d;
  g.mu = j.value("mu", d.mu);
  g.beta = j.value("beta", d.beta);
  g.d0 = j.value("d0", d.d0);
}

inline void to_json(json& j, const ImageParams& p) {
  j = {{"store", p.store_path},
       {"keywords", p.keywords_path},
       {"annotations", p.annotations_path},
       {"embedder_endpoint", p.embedder_endpoint},
       {"synthetic_images", p.synthetic_images},
       {"synthetic_seed", p.synthetic_seed},
       {"compose_joined", p.compose_joined},
       {"ranker", p.ranker},
       {"gate", p.gate},
       {"oracle_top_n", p.oracle_top_n}};
}
inline void from_json(const json& j, ImageParams& p) {
  const ImageParams d;
  p.store_path = j.value("store", d.store_path);
  p.keywords_path = j.value("keywords", d.keywords_path);
  p.annotations_path = j.value("annotations", d.annotations_path);
  p.embedder_endpoint = j.value("embedder_endpoint", d.embedder_endpoint);
  p.synthetic_images = j.value("synthetic_images", d.synthetic_images);
  p.synthetic_seed = j.value("synthetic_seed", d.synthetic_seed);
  p.compose_joined = j.value("compose_joined", d.compose_joined);
  p.ranker = j.value("ranker", d.ranker);
  p.gate = j.value("gate", d.gate);
  p.oracle_top_n = j.value("oracle_top_n", d.oracle_top_n);
}

inline void to_json(json& j, const SessionConfig& c) {
  j = {{"task", c.task},
       {"window_start", c.window_start},
       {"window_sampling", c.window_sampling},
       {"t_max", c.t_max},
       {"termination", c.termination},
       {"feedback", c.feedback},
       {"reward", c.reward},
       {"seed", c.seed},
       {"answerer_endpoint", c.answerer_endpoint},
       {"client_timeout_ms", c.client_timeout_ms}};
  if (c.task == TaskKind::Image) j["image"] = c.image;
}

/// Missing keys fall back to the task's defaults.
inline void from_json(const json& j, SessionConfig& c) {
  const auto task = j.value("task", TaskKind::GuessWho);
  c = SessionConfig::defaults_for(task);
  if (j.contains("window_start")) j.at("window_start").get_to(c.window_start);
  c.window_sampling = j.value("window_sampling", c.window_sampling);
  if (j.contains("image")) j.at("image").get_to(c.image);
  c.t_max = j.value("t_max", c.t_max);
  if (j.contains("termination")) j.at("termination").get_to(c.termination);
  if (j.contains("feedback")) j.at("feedback").get_to(c.feedback);
  c.reward.t_max = c.t_max;
  if (j.contains("reward")) {
    j.at("reward").get_to(c.reward);
    if (!j.at("reward").contains("t_max")) c.reward.t_max = c.t_max;
  }
  c.seed = j.value("seed", c.seed);
  c.answerer_endpoint = j.value("answerer_endpoint", c.answerer_endpoint);
  c.client_timeout_ms = j.value("client_timeout_ms", c.client_timeout_ms);
}

inline void to_json(json& j, const EpisodeRecord& e) {
  j = {{"session_config", e.session_config},
       {"policy", e.policy},
       {"target_id", e.target_id},
       {"turns", e.turns},
       {"step_scores", e.step_scores},
       {"success", e.success},
       {"turn_count", e.turn_count},
       {"trajectory_reward", e.trajectory_reward},
       {"seed", e.seed},
       {"rank_trace", e.rank_trace}};
}
inline void from_json(const json& j, EpisodeRecord& e) {
  j.at("session_config").get_to(e.session_config);
  e.policy = j.value("policy", std::string{});
  j.at("target_id").get_to(e.target_id);
  j.at("turns").get_to(e.turns);
  j.at("step_scores").get_to(e.step_scores);
  j.at("success").get_to(e.success);
  j.at("turn_count").get_to(e.turn_count);
  j.at("trajectory_reward").get_to(e.trajectory_reward);
  j.at("seed").get_to(e.seed);
  if (j.contains("rank_trace")) j.at("rank_trace").get_to(e.rank_trace);
}

}  // namespace inquest
