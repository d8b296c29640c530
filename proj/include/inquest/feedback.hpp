#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <unordered_map>

#include "inquest/core.hpp"

namespace inquest {

/// Distribution feedback over a surviving candidate set.
///
/// Attribute candidates render one "attr: value=count, ..." group per schema
/// attribute, values in schema order, groups joined by "; ". Numeric candidates
/// render the count and range. An empty set renders "no candidates remain".
inline std::string render_distribution(std::span<const Candidate> candidates,
                                       const AttributeSchema& schema) {
  if (candidates.empty()) return "no candidates remain";
  if (const auto* first = candidates.front().as_number()) {
    auto lo = *first;
    auto hi = *first;
    for (const auto& c : candidates) {
      if (const auto* n = c.as_number()) {
        lo = std::min(lo, *n);
        hi = std::max(hi, *n);
      }
    }
    return "candidates: " + std::to_string(candidates.size()) + " in [" + std::to_string(lo) +
           ", " + std::to_string(hi) + "]";
  }
  std::string out;
  for (const auto& spec : schema.attributes) {
    if (!out.empty()) out += "; ";
    out += spec.name + ":";
    for (std::size_t v = 0; v < spec.values.size(); ++v) {
      const auto& value = spec.values[v];
      const auto count = std::count_if(candidates.begin(), candidates.end(), [&](const Candidate& c) {
        const auto* attrs = c.attributes();
        if (attrs == nullptr) return false;
        const auto it = attrs->find(spec.name);
        return it != attrs->end() && it->second == value;
      });
      out += (v == 0 ? " " : ", ") + value + "=" + std::to_string(count);
    }
  }
  return out;
}

/// Top-K feedback: "1. id (summary); 2. id (summary)". The summary lists the
/// candidate's positive yes/no attributes, or attr=value pairs otherwise.
inline std::string render_top_k(const RankedList& ranked, std::span<const Candidate> candidates,
                                std::size_t k) {
  if (ranked.entries.empty()) return "no candidates remain";
  std::unordered_map<std::string_view, const Candidate*> by_id;
  for (const auto& c : candidates) by_id.emplace(c.id, &c);
  std::string out;
  const auto shown = std::min(k, ranked.entries.size());
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& entry = ranked.entries[i];
    if (i > 0) out += "; ";
    out += std::to_string(i + 1) + ". " + entry.id;
    const auto it = by_id.find(entry.id);
    if (it == by_id.end() || it->second->attributes() == nullptr) continue;
    std::string summary;
    for (const auto& [name, value] : *it->second->attributes()) {
      if (value == "no") continue;
      if (!summary.empty()) summary += ", ";
      summary += value == "yes" ? normalize_keyword(name) : name + "=" + value;
    }
    out += " (" + summary + ")";
  }
  return out;
}

/// Tabular retrieval output.
inline std::string render_feedback(std::span<const Candidate> survivors,
                                   const AttributeSchema& schema, FeedbackMode mode) {
  if (mode.kind == FeedbackKind::TopK) {
    std::vector<ScoredCandidate> order;
    for (const auto& c : survivors) order.push_back({c.id, 1.0});
    return render_top_k(RankedList{std::move(order)}, survivors, mode.k);
  }
  return render_distribution(survivors, schema);
}

/// Image retrieval output.
inline std::string render_feedback(const RankedList& ranked, std::span<const Candidate> annotated,
                                   const AttributeSchema& schema, FeedbackMode mode) {
  if (mode.kind == FeedbackKind::Distribution) return render_distribution(annotated, schema);
  return render_top_k(ranked, annotated, mode.k);
}

}  // namespace inquest
