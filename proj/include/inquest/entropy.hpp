#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inquest/core.hpp"
#include "inquest/predicate.hpp"

namespace inquest {

struct Belief {
  std::vector<std::string> support;
  std::vector<double> probabilities;

  static Belief uniform(std::span<const Candidate> candidates) {
    Belief belief;
    for (const auto& c : candidates) belief.support.push_back(c.id);
    belief.probabilities.assign(candidates.size(),
                                candidates.empty() ? 0.0 : 1.0 / static_cast<double>(candidates.size()));
    return belief;
  }

  void validate() const {
    if (support.size() != probabilities.size()) {
      throw Error(ErrorKind::InvalidData, "belief support and probabilities differ in length");
    }
    double total = 0.0;
    for (double p : probabilities) {
      if (!(p >= 0.0)) throw Error(ErrorKind::InvalidData, "negative belief probability");
      total += p;
    }
    if (!support.empty() && std::abs(total - 1.0) > 1e-12) {
      throw Error(ErrorKind::InvalidData, "belief probabilities do not sum to 1");
    }
  }
};

/// Shannon entropy in bits, with 0 log 0 = 0.
inline double entropy(const Belief& belief) {
  if (belief.support.empty()) throw Error(ErrorKind::EmptySupport, "entropy of an empty belief");
  belief.validate();
  double h = 0.0;
  for (double p : belief.probabilities) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

inline double uniform_entropy(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::EmptySupport, "entropy of an empty candidate set");
  return std::log2(static_cast<double>(n));
}

struct Partition {
  std::vector<std::string> yes_set;
  std::vector<std::string> no_set;
  double p_yes = 0.0;
  double p_no = 0.0;
};

/// Splits candidates by the question's truth value under a uniform prior.
inline Partition partition(std::span<const Candidate> candidates, const Question& question) {
  if (candidates.empty()) throw Error(ErrorKind::EmptySupport, "partition of an empty set");
  Partition out;
  for (const auto& c : candidates) {
    const auto truth = evaluate(question, c);
    if (!truth) {
      throw Error(ErrorKind::UnanswerableQuestion,
                  "'" + question_text(question) + "' is undefined for candidate " + c.id);
    }
    (*truth ? out.yes_set : out.no_set).push_back(c.id);
  }
  const auto n = static_cast<double>(candidates.size());
  out.p_yes = static_cast<double>(out.yes_set.size()) / n;
  out.p_no = static_cast<double>(out.no_set.size()) / n;
  return out;
}

/// EIG from raw split sizes; a split with an empty side carries no information.
inline double eig_from_counts(std::size_t n_yes, std::size_t n_no) {
  if (n_yes == 0 || n_no == 0) return 0.0;
  const auto n = static_cast<double>(n_yes + n_no);
  const auto y = static_cast<double>(n_yes);
  const auto m = static_cast<double>(n_no);
  return std::log2(n) - ((y / n) * std::log2(y) + (m / n) * std::log2(m));
}

inline double eig(std::span<const Candidate> candidates, const Question& question) {
  const auto split = partition(candidates, question);
  return eig_from_counts(split.yes_set.size(), split.no_set.size());
}

struct ScoredQuestion {
  Question question;
  double eig = 0.0;
};

/// EIG of every pool question, best first; ties keep pool order.
inline std::vector<ScoredQuestion> eig_all(std::span<const Candidate> candidates,
                                           std::span<const Question> pool) {
  std::vector<ScoredQuestion> scored;
  scored.reserve(pool.size());
  for (const auto& q : pool) scored.push_back({q, eig(candidates, q)});
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredQuestion& a, const ScoredQuestion& b) { return a.eig > b.eig; });
  return scored;
}

}  // namespace inquest
