#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "inquest/core.hpp"
#include "inquest/environments.hpp"

namespace inquest {

struct ReportRow {
  std::string target_id;
  std::uint64_t seed = 0;
  bool success = false;
  std::size_t turns = 0;
  double reward = 0.0;
  std::optional<std::size_t> final_rank;

  bool operator==(const ReportRow&) const = default;
};

struct BenchmarkReport {
  TaskKind task = TaskKind::GuessWho;
  std::string policy;
  double sr = 0.0;
  double mt = 0.0;
  std::optional<double> medr;
  std::optional<double> mr;
  std::map<std::size_t, double> recall_at;
  std::size_t episode_count = 0;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
};

/// Mean of the two middle values for even counts.
inline double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyBatch, "median of nothing");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// SR, MT (failures count T_max), and for image tasks MedR / MR / R@K over final target ranks.
inline BenchmarkReport compute_report(std::span<const EpisodeRecord> episodes,
                                      std::span<const std::size_t> ks = {}) {
  if (episodes.empty()) throw Error(ErrorKind::EmptyBatch, "no episodes to report");
  BenchmarkReport report;
  report.task = episodes.front().session_config.task;
  report.policy = episodes.front().policy;
  report.seed = episodes.front().seed;
  report.episode_count = episodes.size();

  std::size_t successes = 0;
  double turns = 0.0;
  std::vector<double> ranks;
  for (const auto& e : episodes) {
    if (e.session_config.task != report.task) {
      throw Error(ErrorKind::MixedTaskKinds, "batch mixes " + std::string(to_string(report.task)) + " and " +
                                                 std::string(to_string(e.session_config.task)));
    }
    ReportRow row{e.target_id, e.seed, e.success, e.success ? e.turn_count : e.session_config.t_max,
                  e.trajectory_reward, std::nullopt};
    if (e.success) ++successes;
    turns += static_cast<double>(row.turns);
    if (report.task == TaskKind::Image && e.rank_trace && !e.rank_trace->empty()) {
      row.final_rank = e.rank_trace->back();
      ranks.push_back(static_cast<double>(*row.final_rank));
    }
    report.rows.push_back(std::move(row));
  }
  const auto n = static_cast<double>(episodes.size());
  report.sr = static_cast<double>(successes) / n;
  report.mt = turns / n;
  if (report.task == TaskKind::Image && !ranks.empty()) {
    report.medr = median(ranks);
    report.mr = std::accumulate(ranks.begin(), ranks.end(), 0.0) / static_cast<double>(ranks.size());
    for (const auto k : ks) {
      const auto hits = std::count_if(ranks.begin(), ranks.end(), [&](double r) { return r <= static_cast<double>(k); });
      report.recall_at[k] = static_cast<double>(hits) / static_cast<double>(ranks.size());
    }
  }
  return report;
}

inline void to_json(json& j, const ReportRow& r) {
  j = {{"target_id", r.target_id}, {"seed", r.seed},     {"success", r.success},
       {"turns", r.turns},         {"reward", r.reward}, {"final_rank", r.final_rank}};
}

inline void to_json(json& j, const BenchmarkReport& r) {
  json recall = json::object();
  for (const auto& [k, v] : r.recall_at) recall["R@" + std::to_string(k)] = v;
  j = {{"task", r.task},
       {"policy", r.policy},
       {"sr", r.sr},
       {"mt", r.mt},
       {"medr", r.medr},
       {"mr", r.mr},
       {"recall_at", recall},
       {"episode_count", r.episode_count},
       {"seed", r.seed},
       {"rows", r.rows}};
}

inline std::string format_number(double v, int precision = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

/// Aligned-column summary, without per-episode rows.
inline std::string report_text(const BenchmarkReport& r) {
  std::vector<std::pair<std::string, std::string>> cells = {
      {"task", std::string(to_string(r.task))},
      {"policy", r.policy},
      {"episodes", std::to_string(r.episode_count)},
      {"SR", format_number(r.sr)},
      {"MT", format_number(r.mt)},
  };
  if (r.medr) cells.emplace_back("MedR", format_number(*r.medr, 1));
  if (r.mr) cells.emplace_back("MR", format_number(*r.mr, 2));
  for (const auto& [k, v] : r.recall_at) cells.emplace_back("R@" + std::to_string(k), format_number(v));
  std::string header;
  std::string values;
  for (const auto& [name, value] : cells) {
    const auto width = std::max(name.size(), value.size()) + 2;
    header += name + std::string(width - name.size(), ' ');
    values += value + std::string(width - value.size(), ' ');
  }
  return trim(header) + "\n" + trim(values) + "\n";
}

/// Normalized entropy per attribute, in schema order.
inline std::vector<std::pair<std::string, double>> ne_report(std::span<const Candidate> candidates,
                                                             const AttributeSchema& schema) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& spec : schema.attributes) out.emplace_back(spec.name, normalized_entropy(candidates, spec));
  return out;
}

}  // namespace inquest
