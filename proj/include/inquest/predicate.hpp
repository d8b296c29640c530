#pragma once

#include <optional>

#include "inquest/core.hpp"

namespace inquest {

namespace detail {

// A keyword is grounded in an attribute map when it names a yes/no attribute
// ("eyeglasses", "wears glasses") or spells "<value> <attribute>" ("blonde hair color").
inline std::optional<bool> evaluate_keyword(std::string_view keyword, const AttributeMap& attrs) {
  const auto wanted = normalize_keyword(keyword);
  for (const auto& [name, value] : attrs) {
    const auto attribute = normalize_keyword(name);
    if (attribute == wanted && (value == "yes" || value == "no")) return value == "yes";
    const auto suffix = " " + attribute;
    if (wanted.size() > suffix.size() &&
        wanted.compare(wanted.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return wanted.substr(0, wanted.size() - suffix.size()) == normalize_keyword(value);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Truth value of a question for one candidate; nullopt when the predicate is undefined
/// for the candidate's payload (numeric question on a character, FreeText, missing attribute).
inline std::optional<bool> evaluate(const Question& question, const Candidate& candidate) {
  if (const auto* q = std::get_if<Guess>(&question)) return candidate.id == q->candidate_id;
  if (const auto* q = std::get_if<AttributeQuery>(&question)) {
    const auto* attrs = candidate.attributes();
    if (attrs == nullptr) return std::nullopt;
    const auto it = attrs->find(q->attribute);
    if (it == attrs->end()) return std::nullopt;
    return it->second == q->value;
  }
  if (const auto* q = std::get_if<KeywordQuery>(&question)) {
    const auto* attrs = candidate.attributes();
    if (attrs == nullptr) return std::nullopt;
    return detail::evaluate_keyword(q->keyword, *attrs);
  }
  const auto* number = candidate.as_number();
  if (number == nullptr) return std::nullopt;
  if (const auto* q = std::get_if<Parity>(&question)) {
    const bool odd = (*number % 2) != 0;
    return q->parity == ParityKind::Odd ? odd : !odd;
  }
  if (const auto* q = std::get_if<NumericComparison>(&question)) {
    switch (q->op) {
      case CompareOp::Less: return *number < q->threshold;
      case CompareOp::LessEqual: return *number <= q->threshold;
      case CompareOp::Greater: return *number > q->threshold;
      case CompareOp::GreaterEqual: return *number >= q->threshold;
    }
  }
  return std::nullopt;
}

}  // namespace inquest
