#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "inquest/core.hpp"
#include "inquest/embedding.hpp"
#include "inquest/predicate.hpp"

namespace inquest {

// ---------------------------------------------------------------------------
// Tabular retriever

/// Keeps the candidates consistent with one answered question.
inline std::vector<Candidate> tabular_filter(std::span<const Candidate> candidates,
                                             const Question& question, Answer answer) {
  if (answer == Answer::CantAnswer) return {candidates.begin(), candidates.end()};
  const bool keep_when = answer == Answer::Yes;
  std::vector<Candidate> kept;
  for (const auto& c : candidates) {
    const auto truth = evaluate(question, c);
    if (!truth) {
      throw Error(ErrorKind::UnanswerableQuestion,
                  "'" + question_text(question) + "' is undefined for candidate " + c.id);
    }
    if (*truth == keep_when) kept.push_back(c);
  }
  if (kept.empty()) {
    throw Error(ErrorKind::InconsistentHistory,
                "answer '" + std::string(to_string(answer)) + "' to '" + question_text(question) +
                    "' eliminates every candidate");
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Keyword parsing

struct KeywordSets {
  std::vector<std::string> positives;
  std::vector<std::string> negatives;

  bool operator==(const KeywordSets&) const = default;
};

/// Turns free text into a structured question; nullopt when nothing is recognized.
using FreeTextParser = std::function<std::optional<Question>(const std::string&)>;

struct PolarKeyword {
  std::string keyword;
  bool positive = true;
};

/// The keyword a structured question asks about. Yes/no attributes render as the
/// attribute phrase ("wears glasses"), with polarity flipped for value "no";
/// other attributes render as "<value> <attribute>".
inline std::optional<PolarKeyword> question_keyword(const Question& question) {
  if (const auto* q = std::get_if<KeywordQuery>(&question)) return PolarKeyword{trim(q->keyword), true};
  if (const auto* q = std::get_if<AttributeQuery>(&question)) {
    if (q->value == "yes" || q->value == "no") {
      return PolarKeyword{normalize_keyword(q->attribute), q->value == "yes"};
    }
    return PolarKeyword{normalize_keyword(q->value + " " + q->attribute), true};
  }
  return std::nullopt;
}

/// The keyword contributed by one turn, with the answer's polarity applied.
inline std::optional<PolarKeyword> turn_keyword(const Turn& turn, const FreeTextParser* parser) {
  if (turn.answer == Answer::CantAnswer) return std::nullopt;
  Question question = turn.question;
  if (const auto* text = std::get_if<FreeText>(&turn.question)) {
    if (parser == nullptr || !*parser) {
      throw Error(ErrorKind::ParserUnavailable, "free-text turn without a parser: " + text->text);
    }
    auto parsed = (*parser)(text->text);
    if (!parsed || std::holds_alternative<FreeText>(*parsed)) return std::nullopt;
    question = std::move(*parsed);
  }
  auto keyword = question_keyword(question);
  if (!keyword || keyword->keyword.empty()) return std::nullopt;
  if (turn.answer == Answer::No) keyword->positive = !keyword->positive;
  return keyword;
}

/// Yes-answered keywords become positives, No-answered ones negatives. A keyword
/// is kept only at its first occurrence, so the two sets stay disjoint.
inline KeywordSets parse_keywords(const DialogueHistory& history,
                                  const FreeTextParser* parser = nullptr) {
  KeywordSets sets;
  std::set<std::string> seen;
  for (const auto& turn : history.turns) {
    auto keyword = turn_keyword(turn, parser);
    if (!keyword || !seen.insert(keyword->keyword).second) continue;
    (keyword->positive ? sets.positives : sets.negatives).push_back(std::move(keyword->keyword));
  }
  return sets;
}

inline std::string join_keywords(const std::vector<std::string>& keywords) {
  std::string out;
  for (const auto& k : keywords) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Keyword-conditioned image ranker

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Discount factor for one image's similarity to a negated keyword, in (d0, 1).
inline double discount_gate(double similarity, const GateParams& params) {
  return 1.0 - (1.0 - params.d0) * sigmoid(params.beta * (similarity - params.mu));
}

/// Similarity of every image (store order) to the comma-joined positives; all ones when empty.
inline std::vector<double> positive_scores(const EmbeddingStore& store, const KeywordSets& keywords,
                                           const TextEmbedder& embedder) {
  std::vector<double> scores(store.image_vectors.size(), 1.0);
  if (keywords.positives.empty()) return scores;
  const auto query = embedder.embed(join_keywords(keywords.positives));
  std::size_t i = 0;
  for (const auto& [id, v] : store.image_vectors) scores[i++] = dot(v, query);
  return scores;
}

/// Elementwise product of the gate over every negative keyword (store order).
inline std::vector<double> aggregate_discount(const EmbeddingStore& store,
                                              const KeywordSets& keywords, const GateParams& params,
                                              const TextEmbedder& embedder) {
  std::vector<double> discount(store.image_vectors.size(), 1.0);
  for (const auto& negative : keywords.negatives) {
    const auto query = embedder.embed(negative);
    std::size_t i = 0;
    for (const auto& [id, v] : store.image_vectors) discount[i++] *= discount_gate(dot(v, query), params);
  }
  return discount;
}

inline RankedList rank_images(const EmbeddingStore& store, const KeywordSets& keywords,
                              const GateParams& params, const TextEmbedder& embedder) {
  const auto positive = positive_scores(store, keywords, embedder);
  const auto discount = aggregate_discount(store, keywords, params, embedder);
  std::vector<ScoredCandidate> scored;
  scored.reserve(positive.size());
  std::size_t i = 0;
  for (const auto& [id, v] : store.image_vectors) {
    scored.push_back({id, positive[i] * discount[i]});
    ++i;
  }
  return RankedList::from_scores(std::move(scored));
}

/// 1-based position of the target.
inline std::size_t target_rank(const RankedList& ranked, std::string_view target_id) {
  for (std::size_t i = 0; i < ranked.entries.size(); ++i) {
    if (ranked.entries[i].id == target_id) return i + 1;
  }
  throw Error(ErrorKind::UnknownTarget, "'" + std::string(target_id) + "' is not ranked");
}

// ---------------------------------------------------------------------------
// Fusion baselines

inline RankedList rrf_fuse(std::span<const RankedList> lists, double k = 60.0) {
  if (lists.empty()) return {};
  std::map<std::string, double> fused;
  for (const auto& e : lists.front().entries) fused[e.id] = 0.0;
  for (const auto& list : lists) {
    if (list.size() != fused.size()) {
      throw Error(ErrorKind::MismatchedUniverse, "ranked lists differ in length");
    }
    for (std::size_t r = 0; r < list.entries.size(); ++r) {
      const auto it = fused.find(list.entries[r].id);
      if (it == fused.end()) {
        throw Error(ErrorKind::MismatchedUniverse, "'" + list.entries[r].id + "' missing from a list");
      }
      it->second += 1.0 / (k + static_cast<double>(r + 1));
    }
  }
  std::vector<ScoredCandidate> scored;
  for (auto& [id, score] : fused) scored.push_back({id, score});
  return RankedList::from_scores(std::move(scored));
}

/// Min-max scaling into [0, 1]; a constant vector maps to 0.5 everywhere.
inline std::vector<double> min_max_scale(std::span<const double> values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<double> out(values.size(), 0.5);
  if (*hi == *lo) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / (*hi - *lo);
  return out;
}

/// One sequential-score-multiplication step: running *= pos * (1 - neg).
inline std::vector<double> ssm_update(std::span<const double> running, std::span<const double> pos_sim,
                                      std::span<const double> neg_sim) {
  if (running.size() != pos_sim.size() || running.size() != neg_sim.size()) {
    throw Error(ErrorKind::MismatchedUniverse, "score vectors differ in length");
  }
  std::vector<double> next(running.size());
  for (std::size_t i = 0; i < running.size(); ++i) {
    const double p = pos_sim[i];
    const double n = neg_sim[i];
    if (!(p >= 0.0 && p <= 1.0) || !(n >= 0.0 && n <= 1.0)) {
      throw Error(ErrorKind::OutOfRangeSimilarity, "similarities must lie in [0, 1]");
    }
    next[i] = running[i] * (p * (1.0 - n));
  }
  return next;
}

/// Fuses one single-keyword ranking per answered turn with RRF.
inline RankedList rank_rrf_sequential(const EmbeddingStore& store, const DialogueHistory& history,
                                      const GateParams& params, const TextEmbedder& embedder,
                                      const FreeTextParser* parser = nullptr, double k = 60.0) {
  std::vector<RankedList> lists;
  for (const auto& turn : history.turns) {
    const auto keyword = turn_keyword(turn, parser);
    if (!keyword) continue;
    KeywordSets sets;
    (keyword->positive ? sets.positives : sets.negatives).push_back(keyword->keyword);
    lists.push_back(rank_images(store, sets, params, embedder));
  }
  if (lists.empty()) return rank_images(store, {}, params, embedder);
  return rrf_fuse(lists, k);
}

/// Multiplies per-turn min-max scaled similarity scores across turns.
inline RankedList rank_ssm_sequential(const EmbeddingStore& store, const DialogueHistory& history,
                                      const TextEmbedder& embedder,
                                      const FreeTextParser* parser = nullptr) {
  const auto n = store.image_vectors.size();
  std::vector<double> running(n, 1.0);
  const std::vector<double> ones(n, 1.0);
  const std::vector<double> zeros(n, 0.0);
  for (const auto& turn : history.turns) {
    const auto keyword = turn_keyword(turn, parser);
    if (!keyword) continue;
    const auto query = embedder.embed(keyword->keyword);
    std::vector<double> sims;
    sims.reserve(n);
    for (const auto& [id, v] : store.image_vectors) sims.push_back(dot(v, query));
    const auto scaled = min_max_scale(sims);
    running = keyword->positive ? ssm_update(running, scaled, zeros) : ssm_update(running, ones, scaled);
  }
  std::vector<ScoredCandidate> scored;
  std::size_t i = 0;
  for (const auto& [id, v] : store.image_vectors) scored.push_back({id, running[i++]});
  return RankedList::from_scores(std::move(scored));
}

}  // namespace inquest
