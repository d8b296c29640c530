#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "inquest/core.hpp"
#include "inquest/environments.hpp"
#include "inquest/http_json.hpp"
#include "inquest/parallel.hpp"
#include "inquest/policies.hpp"
#include "inquest/retrievers.hpp"
#include "inquest/rng.hpp"

namespace inquest {

// ---------------------------------------------------------------------------
// Paraphrasing

class Paraphraser {
 public:
  virtual ~Paraphraser() = default;
  virtual std::string paraphrase(const std::string& question) const = 0;
};

class IdentityParaphraser final : public Paraphraser {
 public:
  std::string paraphrase(const std::string& question) const override { return question; }
};

/// POST {"question"} -> {"paraphrase"}.
class HttpParaphraser final : public Paraphraser {
 public:
  HttpParaphraser(std::string endpoint, int timeout_ms) : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {}

  std::string paraphrase(const std::string& question) const override {
    json reply;
    try {
      reply = post_json(endpoint_, json{{"question", question}}, timeout_ms_);
    } catch (const Error& e) {
      throw Error(ErrorKind::ParaphraserUnavailable, std::string("paraphraser: ") + e.what());
    }
    if (!reply.contains("paraphrase") || !reply["paraphrase"].is_string()) {
      throw Error(ErrorKind::ParaphraserUnavailable, "paraphraser reply lacks 'paraphrase'");
    }
    return reply["paraphrase"].get<std::string>();
  }

 private:
  std::string endpoint_;
  int timeout_ms_;
};

// ---------------------------------------------------------------------------
// Oracle dialogue synthesis

enum class ParaphraserKind { Identity, ExternalClient };
enum class BoardKind { Resample, Fixed };

NLOHMANN_JSON_SERIALIZE_ENUM(ParaphraserKind,
                             {{ParaphraserKind::Identity, "identity"}, {ParaphraserKind::ExternalClient, "external"}})
NLOHMANN_JSON_SERIALIZE_ENUM(BoardKind, {{BoardKind::Resample, "resample"}, {BoardKind::Fixed, "fixed"}})

struct SynthConfig {
  std::size_t count = 1000;
  double tau = 1e-4;
  std::size_t t_max = 16;
  std::size_t guess_threshold = 2;
  std::uint64_t seed = 0;
  ParaphraserKind paraphraser = ParaphraserKind::Identity;
  std::string paraphraser_endpoint;
  int timeout_ms = 5000;
  BoardKind board = BoardKind::Resample;
  std::size_t board_size = 36;
  std::size_t workers = 1;

  void validate() const {
    if (count < 1) throw Error(ErrorKind::InvalidConfig, "dialogue count must be >= 1");
    if (t_max < 1) throw Error(ErrorKind::InvalidConfig, "t_max must be >= 1");
    if (guess_threshold < 1) throw Error(ErrorKind::InvalidConfig, "guess threshold must be >= 1");
    if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidConfig, "tau must be >= 0");
    if (paraphraser == ParaphraserKind::ExternalClient && paraphraser_endpoint.empty()) {
      throw Error(ErrorKind::InvalidConfig, "external paraphraser needs an endpoint");
    }
  }
};

struct SynthTurn {
  Question question;
  std::string text;  // possibly paraphrased rendering
  Answer answer = Answer::CantAnswer;

  bool operator==(const SynthTurn&) const = default;
};

struct SynthDialogue {
  std::size_t id = 0;
  TaskKind task = TaskKind::GuessWho;
  std::vector<Candidate> board;
  std::string target_id;
  std::vector<SynthTurn> turns;
  bool success = false;

  bool operator==(const SynthDialogue&) const = default;
};

inline std::unique_ptr<Paraphraser> make_paraphraser(const SynthConfig& config) {
  if (config.paraphraser == ParaphraserKind::ExternalClient) {
    return std::make_unique<HttpParaphraser>(config.paraphraser_endpoint, config.timeout_ms);
  }
  return std::make_unique<IdentityParaphraser>();
}

/// One oracle dialogue. At |C| <= K (a lone survivor included) the questioner
/// guesses a random survivor; a wrong guess eliminates it and play continues.
inline std::vector<SynthTurn> oracle_dialogue(std::vector<Candidate> candidates, const Candidate& target,
                                              const std::function<std::vector<Question>(std::span<const Candidate>)>& pool_for,
                                              const SynthConfig& config, const Paraphraser& paraphraser, Rng& rng,
                                              bool& success) {
  const OracleConfig oracle{config.tau, config.guess_threshold, PoolKind::Custom, {}};
  DialogueHistory asked;
  asked.max_turns = config.t_max;
  std::vector<SynthTurn> turns;
  success = false;
  while (turns.size() < config.t_max) {
    std::optional<Question> question;
    if (candidates.size() > config.guess_threshold) {
      try {
        const auto pool = unasked(pool_for(candidates), &asked);
        question = oracle_next_question(candidates, pool, oracle, rng);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ExhaustedPool) throw;
      }
    }
    if (!question) question = Guess{pick(candidates, rng).id};
    const auto answer = truthful_answer(*question, target);
    turns.push_back({*question, paraphraser.paraphrase(question_text(*question)), answer});
    asked.turns.push_back({*question, answer, std::nullopt});
    if (std::holds_alternative<Guess>(*question) && answer == Answer::Yes) {
      success = true;
      break;
    }
    candidates = tabular_filter(candidates, *question, answer);
  }
  return turns;
}

/// A board of `size` characters with every attribute drawn uniformly from its
/// values; rows duplicating an earlier row are redrawn.
inline std::vector<Candidate> random_board(const AttributeSchema& schema, std::size_t size, Rng& rng) {
  std::set<AttributeMap> seen;
  std::vector<Candidate> board;
  while (board.size() < size) {
    AttributeMap row;
    for (const auto& spec : schema.attributes) row[spec.name] = pick(spec.values, rng);
    if (!seen.insert(row).second) continue;
    char id[16];
    std::snprintf(id, sizeof id, "C%02zu", board.size() + 1);
    board.push_back({id, std::move(row)});
  }
  return board;
}

/// Guess Number dialogues: window start in [100, 500], length in [100, 300],
/// median-threshold template questions.
inline std::vector<SynthDialogue> synth_guess_number(const SynthConfig& config) {
  config.validate();
  const auto paraphraser = make_paraphraser(config);
  std::vector<SynthDialogue> out(config.count);
  parallel_for(config.count, config.workers, [&](std::size_t i) {
    auto rng = make_rng(derive_seed(config.seed, i));
    const auto start = uniform_int(rng, 100, 500);
    const auto length = uniform_int(rng, 100, 300);
    auto& d = out[i];
    d.id = i;
    d.task = TaskKind::GuessNumber;
    d.board = number_range(start, length);
    const auto target = pick(d.board, rng);
    d.target_id = target.id;
    d.turns = oracle_dialogue(d.board, target, [](std::span<const Candidate> c) { return numeric_question_pool(c); },
                              config, *paraphraser, rng, d.success);
  });
  return out;
}

/// Guess Who dialogues over freshly drawn boards (or the fixed 36-character table).
inline std::vector<SynthDialogue> synth_guess_who(const SynthConfig& config) {
  config.validate();
  const auto paraphraser = make_paraphraser(config);
  const auto data = guess_who_dataset();
  const auto pool = attribute_question_pool(data.schema);
  std::vector<SynthDialogue> out(config.count);
  parallel_for(config.count, config.workers, [&](std::size_t i) {
    auto rng = make_rng(derive_seed(config.seed, i));
    auto& d = out[i];
    d.id = i;
    d.task = TaskKind::GuessWho;
    d.board = config.board == BoardKind::Fixed ? data.candidates : random_board(data.schema, config.board_size, rng);
    const auto target = pick(d.board, rng);
    d.target_id = target.id;
    d.turns = oracle_dialogue(d.board, target, [&](std::span<const Candidate>) { return pool; }, config,
                              *paraphraser, rng, d.success);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Training-instance export

struct TrainingInstance {
  std::size_t dialogue_id = 0;
  std::size_t turn_index = 0;
  std::vector<std::pair<std::string, Answer>> history;  // turns before this one
  std::string next_question;
  Answer answer = Answer::CantAnswer;
};

/// n turns give n instances; instance i carries turns [0, i) as history.
inline std::vector<TrainingInstance> unfold(const SynthDialogue& dialogue) {
  std::vector<TrainingInstance> out;
  std::vector<std::pair<std::string, Answer>> history;
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const auto& turn = dialogue.turns[i];
    out.push_back({dialogue.id, i, history, turn.text, turn.answer});
    history.emplace_back(turn.text, turn.answer);
  }
  return out;
}

/// Truncates to a random prefix of 1..n rounds.
inline SynthDialogue retain_random_rounds(SynthDialogue dialogue, Rng& rng) {
  if (dialogue.turns.empty()) return dialogue;
  const auto keep = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(dialogue.turns.size())));
  dialogue.turns.resize(keep);
  return dialogue;
}

inline void to_json(json& j, const TrainingInstance& t) {
  json history = json::array();
  for (const auto& [q, a] : t.history) history.push_back({{"question", q}, {"answer", a}});
  j = {{"dialogue_id", t.dialogue_id},
       {"turn_index", t.turn_index},
       {"history", history},
       {"next_question", t.next_question},
       {"answer", t.answer}};
}

inline void to_json(json& j, const SynthTurn& t) {
  j = {{"question", t.question}, {"text", t.text}, {"answer", t.answer}};
}

inline void to_json(json& j, const SynthDialogue& d) {
  j = {{"dialogue_id", d.id}, {"task", d.task}, {"target_id", d.target_id},
       {"success", d.success}, {"turns", d.turns}};
}

/// JSONL of training instances, dialogues in id order.
inline std::string instances_jsonl(std::span<const SynthDialogue> dialogues) {
  std::string out;
  for (const auto& d : dialogues) {
    for (const auto& instance : unfold(d)) {
      out += json(instance).dump();
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Attribute dialogues from binary image annotations

struct AttributeDialogueConfig {
  std::size_t max_positive = 20;
  std::size_t max_length = 20;
  // attribute -> three phrasings; "{}" is replaced by the attribute phrase
  std::map<std::string, std::array<std::string, 3>> question_templates;
  std::vector<std::vector<std::string>> related_groups;

  static AttributeDialogueConfig defaults() {
    AttributeDialogueConfig c;
    c.related_groups = {{"Black_Hair", "Blond_Hair", "Brown_Hair", "Gray_Hair"},
                        {"Straight_Hair", "Wavy_Hair"},
                        {"Goatee", "Mustache", "No_Beard"}};
    return c;
  }

  std::array<std::string, 3> templates_for(const std::string& attribute) const {
    if (const auto it = question_templates.find(attribute); it != question_templates.end()) return it->second;
    return {"Is the person {}?", "Does the image show {}?", "Can you see {} in the picture?"};
  }

  void validate() const {
    if (max_positive > max_length) throw Error(ErrorKind::InvalidConfig, "max_positive exceeds dialogue length");
    std::set<std::string> grouped;
    for (const auto& group : related_groups) {
      for (const auto& a : group) {
        if (!grouped.insert(a).second) throw Error(ErrorKind::InvalidConfig, "'" + a + "' is in two groups");
      }
    }
  }
};

struct AttributeTurn {
  std::string attribute;
  std::string question;
  Answer answer = Answer::CantAnswer;

  bool operator==(const AttributeTurn&) const = default;
};

struct AttributeDialogue {
  std::string image_id;
  std::vector<AttributeTurn> turns;

  bool operator==(const AttributeDialogue&) const = default;
};

inline std::string fill_template(const std::string& tmpl, const std::string& phrase) {
  const auto at = tmpl.find("{}");
  if (at == std::string::npos) return tmpl;
  return tmpl.substr(0, at) + phrase + tmpl.substr(at + 2);
}

/// Images with at most max_positive positives become dialogues: shuffled positive
/// questions plus x ~ U[0, max_length - m] negatives. A negative sharing a related
/// group with a positive goes right before that positive; others land at random.
inline std::vector<AttributeDialogue> synth_attribute_dialogues(std::span<const Candidate> annotations,
                                                                const AttributeDialogueConfig& config, Rng& rng) {
  config.validate();
  std::map<std::string, std::size_t> group_of;
  for (std::size_t g = 0; g < config.related_groups.size(); ++g) {
    for (const auto& a : config.related_groups[g]) group_of[a] = g;
  }
  auto ask = [&](const std::string& attribute, Answer answer) {
    const auto templates = config.templates_for(attribute);
    return AttributeTurn{attribute, fill_template(pick(std::vector(templates.begin(), templates.end()), rng),
                                                  normalize_keyword(attribute)),
                         answer};
  };

  std::vector<AttributeDialogue> out;
  for (const auto& image : annotations) {
    const auto* attrs = image.attributes();
    if (attrs == nullptr) throw Error(ErrorKind::InvalidData, "image '" + image.id + "' has no annotations");
    std::vector<std::string> positives;
    std::vector<std::string> negatives;
    for (const auto& [name, value] : *attrs) (value == "yes" ? positives : negatives).push_back(name);
    if (positives.size() > config.max_positive) continue;

    shuffle(positives, rng);
    shuffle(negatives, rng);
    const auto room = static_cast<std::int64_t>(config.max_length - positives.size());
    const auto x = std::min<std::size_t>(static_cast<std::size_t>(uniform_int(rng, 0, room)), negatives.size());
    negatives.resize(x);

    AttributeDialogue d{image.id, {}};
    for (const auto& p : positives) d.turns.push_back(ask(p, Answer::Yes));
    for (const auto& n : negatives) {
      std::optional<std::size_t> slot;
      if (const auto g = group_of.find(n); g != group_of.end()) {
        for (std::size_t i = 0; i < d.turns.size(); ++i) {
          const auto& t = d.turns[i];
          const auto tg = group_of.find(t.attribute);
          if (t.answer == Answer::Yes && tg != group_of.end() && tg->second == g->second) {
            slot = i;
            break;
          }
        }
      }
      if (!slot) slot = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(d.turns.size())));
      d.turns.insert(d.turns.begin() + static_cast<std::ptrdiff_t>(*slot), ask(n, Answer::No));
    }
    out.push_back(std::move(d));
  }
  return out;
}

inline void to_json(json& j, const AttributeTurn& t) {
  j = {{"attribute", t.attribute}, {"question", t.question}, {"answer", t.answer}};
}

inline void to_json(json& j, const AttributeDialogue& d) { j = {{"image_id", d.image_id}, {"turns", d.turns}}; }

}  // namespace inquest
