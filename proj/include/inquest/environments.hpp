#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "inquest/core.hpp"
#include "inquest/embedding.hpp"
#include "inquest/entropy.hpp"
#include "inquest/feedback.hpp"
#include "inquest/guess_who_data.hpp"
#include "inquest/http_json.hpp"
#include "inquest/image_data.hpp"
#include "inquest/predicate.hpp"
#include "inquest/retrievers.hpp"
#include "inquest/rewards.hpp"
#include "inquest/rng.hpp"

namespace inquest {

// ---------------------------------------------------------------------------
// Answerers

inline Answer truthful_answer(const Question& question, const Candidate& target) {
  const auto truth = evaluate(question, target);
  if (!truth) return Answer::CantAnswer;
  return *truth ? Answer::Yes : Answer::No;
}

/// Exactly "yes" or "no" after lowercasing and dropping punctuation; anything else
/// is CantAnswer.
inline Answer coerce_answer(std::string_view text) {
  std::string letters;
  for (unsigned char c : text) {
    if (std::isalnum(c) || std::isspace(c)) letters.push_back(static_cast<char>(std::tolower(c)));
  }
  const auto word = trim(letters);
  if (word == "yes") return Answer::Yes;
  if (word == "no") return Answer::No;
  return Answer::CantAnswer;
}

class Answerer {
 public:
  virtual ~Answerer() = default;
  virtual Answer answer(const Question& question, const Candidate& target) const = 0;
};

class TruthfulAnswerer final : public Answerer {
 public:
  Answer answer(const Question& question, const Candidate& target) const override {
    return truthful_answer(question, target);
  }
};

/// POST {"question", "target_attributes"} -> {"answer"}.
class HttpAnswerer final : public Answerer {
 public:
  HttpAnswerer(std::string endpoint, int timeout_ms)
      : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {}

  Answer answer(const Question& question, const Candidate& target) const override {
    json attrs = json::object();
    if (const auto* map = target.attributes()) attrs = *map;
    if (const auto* n = target.as_number()) attrs = {{"number", *n}};
    const auto reply = post_json(
        endpoint_, json{{"question", question_text(question)}, {"target_attributes", attrs}}, timeout_ms_);
    if (!reply.contains("answer") || !reply["answer"].is_string()) return Answer::CantAnswer;
    return coerce_answer(reply["answer"].get<std::string>());
  }

 private:
  std::string endpoint_;
  int timeout_ms_;
};

// ---------------------------------------------------------------------------
// Data

inline constexpr std::int64_t kWindowLength = 100;

/// Start of a length-100 window inside [0, 1000]. Evaluation draws from [0, 900];
/// synthesis uses the [100, 500] range of the dialogue generator.
inline std::int64_t sample_window_start(Rng& rng, WindowSampling sampling) {
  return sampling == WindowSampling::Evaluation ? uniform_int(rng, 0, 1000 - kWindowLength)
                                                : uniform_int(rng, 100, 500);
}

inline std::vector<Candidate> number_range(std::int64_t start, std::int64_t length) {
  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(length));
  for (std::int64_t n = start; n < start + length; ++n) out.push_back(Candidate::number(n));
  return out;
}

/// Candidates file: JSONL {"id", "attributes"}; the schema lists values in first-seen order.
inline Dataset load_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidData, "cannot open candidates " + path);
  Dataset data;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto record = json::parse(line);
    Candidate c{record.at("id").get<std::string>(), record.at("attributes").get<AttributeMap>()};
    for (const auto& [name, value] : *c.attributes()) {
      auto* spec = data.schema.find(name);
      if (spec == nullptr) {
        data.schema.attributes.push_back({name, {}});
        spec = &data.schema.attributes.back();
      }
      if (std::find(spec->values.begin(), spec->values.end(), value) == spec->values.end()) {
        spec->values.push_back(value);
      }
    }
    data.candidates.push_back(std::move(c));
  }
  data.schema.validate();
  validate_candidates(data.candidates, &data.schema);
  return data;
}

/// Attribute-value entropy over log2 of the number of possible values.
inline double normalized_entropy(std::span<const Candidate> candidates, const AttributeSpec& attribute) {
  if (candidates.empty() || attribute.values.size() < 2) return 0.0;
  std::map<std::string, std::size_t> counts;
  for (const auto& c : candidates) {
    if (const auto* attrs = c.attributes()) {
      if (const auto it = attrs->find(attribute.name); it != attrs->end()) ++counts[it->second];
    }
  }
  const auto n = static_cast<double>(candidates.size());
  double h = 0.0;
  for (const auto& [value, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h / std::log2(static_cast<double>(attribute.values.size()));
}

/// Everything an episode needs that does not change between episodes.
struct World {
  TaskKind task = TaskKind::GuessWho;
  AttributeSchema schema;
  std::vector<Candidate> candidates;
  std::shared_ptr<const EmbeddingStore> store;
  std::shared_ptr<const TextEmbedder> embedder;

  const Candidate& find(std::string_view id) const {
    for (const auto& c : candidates) {
      if (c.id == id) return c;
    }
    throw Error(ErrorKind::UnknownTarget, "'" + std::string(id) + "' is not a candidate");
  }

  bool contains(std::string_view id) const {
    return std::any_of(candidates.begin(), candidates.end(), [&](const Candidate& c) { return c.id == id; });
  }
};

inline World guess_number_world(std::int64_t window_start) {
  if (window_start < 0 || window_start + kWindowLength > 1000) {
    throw Error(ErrorKind::InvalidConfig, "window must lie inside [0, 1000]");
  }
  World world;
  world.task = TaskKind::GuessNumber;
  world.candidates = number_range(window_start, kWindowLength);
  return world;
}

inline World guess_who_world() {
  auto data = guess_who_dataset();
  World world;
  world.task = TaskKind::GuessWho;
  world.schema = std::move(data.schema);
  world.candidates = std::move(data.candidates);
  return world;
}

inline World image_world(ImageDataset data, const ImageParams& params, int timeout_ms = 5000) {
  std::vector<std::string> annotated;
  for (const auto& c : data.images) annotated.push_back(c.id);
  std::sort(annotated.begin(), annotated.end());
  std::vector<std::string> stored;
  for (const auto& [id, v] : data.store.image_vectors) stored.push_back(id);
  if (annotated != stored) {
    throw Error(ErrorKind::InvalidData, "annotations and embedding store cover different ids");
  }
  World world;
  world.task = TaskKind::Image;
  world.schema = std::move(data.schema);
  world.candidates = std::move(data.images);
  auto store = std::make_shared<const EmbeddingStore>(std::move(data.store));
  if (params.embedder_endpoint.empty()) {
    world.embedder = std::make_shared<TableEmbedder>(*store, params.compose_joined);
  } else {
    world.embedder = std::make_shared<HttpEmbedder>(params.embedder_endpoint, store->dimension, timeout_ms);
  }
  world.store = std::move(store);
  return world;
}

inline ImageDataset load_image_dataset(const ImageParams& params) {
  if (params.store_path.empty()) {
    return synthetic_image_dataset(params.synthetic_images, params.synthetic_seed);
  }
  ImageDataset data;
  data.store = load_store(params.store_path);
  if (!params.keywords_path.empty()) load_keyword_table(params.keywords_path, data.store);
  data.images = load_annotations(params.annotations_path);
  std::vector<std::string> names;
  if (!data.images.empty()) {
    for (const auto& [name, value] : *data.images.front().attributes()) names.push_back(name);
  }
  data.schema = binary_schema(names);
  return data;
}

/// Builds the world a config describes. Guess Number windows come from the config
/// or, when unset, from the config seed.
inline World make_world(const SessionConfig& config) {
  switch (config.task) {
    case TaskKind::GuessNumber: {
      auto start = config.window_start;
      if (!start) {
        auto rng = make_rng(derive_seed(config.seed, 0x77696e646f77ULL));
        start = sample_window_start(rng, config.window_sampling);
      }
      return guess_number_world(*start);
    }
    case TaskKind::GuessWho: return guess_who_world();
    case TaskKind::Image:
      return image_world(load_image_dataset(config.image), config.image, config.client_timeout_ms);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown task");
}

// ---------------------------------------------------------------------------
// Episode: one live environment session

struct StepInfo {
  std::size_t candidate_count = 0;
  std::optional<std::size_t> target_rank;
  double step_score = 0.0;
  bool legal = true;
  bool success = false;
};

struct StepResult {
  Answer answer = Answer::CantAnswer;
  std::optional<std::string> feedback;
  bool done = false;
  StepInfo info;
};

/// Single-writer environment state. With a target, answers come from the
/// configured answerer; without one (interactive play), the caller supplies them.
class Episode {
 public:
  Episode(SessionConfig config, std::shared_ptr<const World> world, std::optional<std::string> target_id,
          std::shared_ptr<const Answerer> answerer = nullptr, FreeTextParser parser = nullptr)
      : config_(std::move(config)),
        world_(std::move(world)),
        answerer_(std::move(answerer)),
        parser_(std::move(parser)) {
    config_.validate();
    if (world_->task != config_.task) throw Error(ErrorKind::InvalidConfig, "world/config task mismatch");
    if (target_id) target_ = world_->find(*target_id);
    if (!answerer_) answerer_ = std::make_shared<TruthfulAnswerer>();
    history_.max_turns = config_.t_max;
    survivors_ = world_->candidates;
    if (config_.task == TaskKind::Image) {
      ranked_ = rank_current();
      if (target_) rank_trace_.push_back(target_rank(ranked_, target_->id));
    }
  }

  const SessionConfig& config() const { return config_; }
  const World& world() const { return *world_; }
  const DialogueHistory& history() const { return history_; }
  const std::vector<Candidate>& survivors() const { return survivors_; }
  const RankedList& ranked() const { return ranked_; }
  const std::vector<double>& step_scores() const { return step_scores_; }
  const std::optional<Candidate>& target() const { return target_; }
  bool done() const { return done_; }
  bool success() const { return success_; }

  std::size_t candidate_count() const {
    return config_.task == TaskKind::Image ? ranked_.size() : survivors_.size();
  }

  /// What a questioner may look at: the surviving set, or for images the
  /// annotations of the current top-N.
  std::vector<Candidate> policy_candidates() const {
    if (config_.task != TaskKind::Image) return survivors_;
    std::map<std::string_view, const Candidate*> by_id;
    for (const auto& c : world_->candidates) by_id.emplace(c.id, &c);
    std::vector<Candidate> top;
    const auto n = std::min(config_.image.oracle_top_n, ranked_.size());
    for (std::size_t i = 0; i < n; ++i) top.push_back(*by_id.at(ranked_.entries[i].id));
    return top;
  }

  StepResult step(const Question& question) {
    if (!target_) throw Error(ErrorKind::InvalidConfig, "step without a target needs an explicit answer");
    check_open();
    const auto structured = resolve(question);
    const auto answer = structured && legal(*structured) ? answerer_->answer(*structured, *target_)
                                                         : Answer::CantAnswer;
    return apply(question, answer);
  }

  StepResult step_with_answer(const Question& question, Answer answer) {
    check_open();
    return apply(question, answer);
  }

  EpisodeRecord record(std::string policy_name, std::uint64_t seed) const {
    EpisodeRecord r;
    r.session_config = config_;
    r.policy = std::move(policy_name);
    r.target_id = target_ ? target_->id : std::string{};
    r.turns = history_;
    r.step_scores = step_scores_;
    r.success = success_;
    r.turn_count = history_.size();
    r.trajectory_reward = trajectory_reward(step_scores_, success_, r.turn_count, config_.reward);
    r.seed = seed;
    if (config_.task == TaskKind::Image && target_) r.rank_trace = rank_trace_;
    return r;
  }

  /// Ends the episode without success, e.g. when the questioner has nothing left to ask.
  void abandon() { done_ = true; }

 private:
  void check_open() const {
    if (history_.full()) {
      throw Error(ErrorKind::TurnBudgetExceeded, "turn budget of " + std::to_string(config_.t_max) + " spent");
    }
    if (done_) throw Error(ErrorKind::SessionClosed, "episode already finished");
  }

  // FreeText goes through the parser when one is configured.
  std::optional<Question> resolve(const Question& question) const {
    const auto* text = std::get_if<FreeText>(&question);
    if (text == nullptr) return question;
    if (!parser_) return std::nullopt;
    auto parsed = parser_(text->text);
    if (!parsed || std::holds_alternative<FreeText>(*parsed)) return std::nullopt;
    return parsed;
  }

  bool legal(const Question& q) const {
    if (const auto* a = std::get_if<AttributeQuery>(&q)) return world_->schema.has_value(a->attribute, a->value);
    if (const auto* g = std::get_if<Guess>(&q)) return world_->contains(g->candidate_id);
    if (config_.task == TaskKind::Image) {
      if (const auto* k = std::get_if<KeywordQuery>(&q)) return !trim(k->keyword).empty();
      return false;
    }
    return std::all_of(survivors_.begin(), survivors_.end(),
                       [&](const Candidate& c) { return evaluate(q, c).has_value(); });
  }

  RankedList rank_current() const {
    const auto& store = *world_->store;
    const auto* parser = parser_ ? &parser_ : nullptr;
    switch (config_.image.ranker) {
      case RankerKind::KeywordGate:
        return rank_images(store, parse_keywords(history_, parser), config_.image.gate, *world_->embedder);
      case RankerKind::Rrf:
        return rank_rrf_sequential(store, history_, config_.image.gate, *world_->embedder, parser);
      case RankerKind::Ssm: return rank_ssm_sequential(store, history_, *world_->embedder, parser);
    }
    return {};
  }

  StepResult apply(const Question& question, Answer answer) {
    const auto structured = resolve(question);
    const bool is_legal = structured.has_value() && legal(*structured);
    StepResult result;
    result.answer = is_legal ? answer : Answer::CantAnswer;
    result.info.legal = is_legal;

    auto next_history = append_turn(history_, question, result.answer);
    if (config_.task == TaskKind::Image) {
      apply_image(next_history, result);
    } else {
      apply_tabular(structured, is_legal, result);
    }

    if (config_.feedback.kind != FeedbackKind::None) {
      result.feedback = config_.task == TaskKind::Image
                            ? render_feedback(ranked_, world_->candidates, world_->schema, config_.feedback)
                            : render_feedback(survivors_, world_->schema, config_.feedback);
      next_history.turns.back().feedback_text = result.feedback;
    }
    history_ = std::move(next_history);
    step_scores_.push_back(result.info.step_score);

    switch (config_.termination.kind) {
      case TerminationKind::Singleton:
        if (survivors_.size() == 1) finish(!target_ || survivors_.front().id == target_->id);
        break;
      case TerminationKind::ExplicitGuess:
        if (is_legal && result.answer == Answer::Yes) {
          if (const auto* g = std::get_if<Guess>(&*structured)) finish(!target_ || g->candidate_id == target_->id);
        }
        break;
      case TerminationKind::RankAtMostK:
        if (result.info.target_rank && *result.info.target_rank <= config_.termination.k) finish(true);
        break;
    }
    if (history_.full()) done_ = true;
    result.done = done_;
    result.info.success = success_;
    result.info.candidate_count = candidate_count();
    return result;
  }

  void apply_tabular(const std::optional<Question>& structured, bool is_legal, StepResult& result) {
    if (!is_legal) {
      result.info.step_score = config_.reward.soft_penalty;
      return;
    }
    auto next = tabular_filter(survivors_, *structured, result.answer);
    result.info.step_score = step_score_tabular(survivors_, *structured, config_.reward);
    survivors_ = std::move(next);
  }

  void apply_image(DialogueHistory& next_history, StepResult& result) {
    std::swap(history_, next_history);
    try {
      ranked_ = rank_current();
    } catch (...) {
      std::swap(history_, next_history);
      throw;
    }
    std::swap(history_, next_history);
    if (!target_) return;
    const auto before = rank_trace_.back();
    const auto after = target_rank(ranked_, target_->id);
    rank_trace_.push_back(after);
    result.info.target_rank = after;
    result.info.step_score =
        result.info.legal ? step_score_image(before, after, config_.reward) : config_.reward.soft_penalty;
  }

  void finish(bool success) {
    done_ = true;
    success_ = success;
  }

  SessionConfig config_;
  std::shared_ptr<const World> world_;
  std::optional<Candidate> target_;
  std::shared_ptr<const Answerer> answerer_;
  FreeTextParser parser_;
  DialogueHistory history_;
  std::vector<Candidate> survivors_;
  RankedList ranked_;
  std::vector<double> step_scores_;
  std::vector<std::size_t> rank_trace_;
  bool done_ = false;
  bool success_ = false;
};

}  // namespace inquest
