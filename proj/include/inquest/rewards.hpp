#pragma once

#include <cmath>
#include <numeric>
#include <span>

#include "inquest/core.hpp"
#include "inquest/entropy.hpp"

namespace inquest {

/// Step score for tabular data: the question's EIG over the pre-answer set, or the
/// soft penalty when the question cannot be evaluated against that set.
inline double step_score_tabular(std::span<const Candidate> candidates_before,
                                 const Question& question, const RewardParams& params) {
  if (!is_structured(question)) return params.soft_penalty;
  try {
    return eig(candidates_before, question);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::UnanswerableQuestion) return params.soft_penalty;
    throw;
  }
}

/// Change in log-rank; positive when the target moved up.
inline double step_score_image(std::size_t rank_before, std::size_t rank_after,
                               const RewardParams& params) {
  if (rank_before < 1 || rank_after < 1) throw Error(ErrorKind::InvalidData, "ranks start at 1");
  const double delta = std::log(static_cast<double>(rank_before)) -
                       std::log(static_cast<double>(rank_after));
  return params.image_log_base == LogBase::Base2 ? delta / std::log(2.0) : delta;
}

inline double step_penalty(std::size_t turns, const RewardParams& params) {
  return params.alpha * static_cast<double>(turns) / static_cast<double>(params.t_max);
}

/// kappa + mean step score - alpha * T / T_max on success, -kappa otherwise.
inline double trajectory_reward(std::span<const double> step_scores, bool success, std::size_t turns,
                                const RewardParams& params) {
  if (turns != step_scores.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(step_scores.size()) +
                                               " step scores for " + std::to_string(turns) + " turns");
  }
  if (turns > params.t_max) {
    throw Error(ErrorKind::LengthMismatch, "episode longer than t_max");
  }
  if (!success) return -params.kappa;
  if (turns < 1) throw Error(ErrorKind::LengthMismatch, "a successful episode has at least one turn");
  const double mean =
      std::accumulate(step_scores.begin(), step_scores.end(), 0.0) / static_cast<double>(turns);
  return params.kappa + mean - step_penalty(turns, params);
}

}  // namespace inquest
