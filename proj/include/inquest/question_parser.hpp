#pragma once

#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "inquest/core.hpp"

namespace inquest {

/// Rule-based reader for yes/no questions. Recognizes the canonical renderings of
/// question_text(), numeric phrasings ("at most 40", "is it odd"), guesses
/// ("Is it C04?"), schema attribute mentions, and falls back to a keyword taken
/// from common "is the person ..." style openings.
class QuestionParser {
 public:
  QuestionParser() = default;
  explicit QuestionParser(AttributeSchema schema, std::vector<std::string> candidate_ids = {})
      : schema_(std::move(schema)), ids_(std::move(candidate_ids)) {}

  std::optional<Question> parse(std::string_view raw) const {
    auto text = to_lower(trim(raw));
    while (!text.empty() && (text.back() == '?' || text.back() == '.' || text.back() == '!')) text.pop_back();
    text = trim(text);
    if (text.empty()) return std::nullopt;

    if (auto q = parse_numeric(text)) return q;
    if (auto q = parse_guess(text)) return q;
    if (auto q = parse_attribute(text)) return q;
    return parse_keyword(text);
  }

  /// Adapter for retrievers and episodes that accept a FreeTextParser.
  auto as_function() const {
    return [parser = *this](const std::string& text) { return parser.parse(text); };
  }

 private:
  static std::optional<Question> parse_numeric(const std::string& text) {
    static const std::regex parity(R"(\b(odd|even)\b)");
    static const std::regex number(R"((-?\d+))");
    static const std::vector<std::pair<std::regex, CompareOp>> comparisons = {
        {std::regex(R"(\b(less than or equal to|smaller than or equal to|at most|no more than|no greater than)\s+(-?\d+))"),
         CompareOp::LessEqual},
        {std::regex(R"(\b(greater than or equal to|larger than or equal to|at least|no less than)\s+(-?\d+))"),
         CompareOp::GreaterEqual},
        {std::regex(R"(\b(less than|smaller than|lower than|below|under)\s+(-?\d+))"), CompareOp::Less},
        {std::regex(R"(\b(greater than|larger than|more than|higher than|above|over)\s+(-?\d+))"),
         CompareOp::Greater},
    };
    std::smatch m;
    for (const auto& [pattern, op] : comparisons) {
      if (std::regex_search(text, m, pattern)) return NumericComparison{op, std::stoll(m[2].str())};
    }
    if (std::regex_search(text, m, parity) && !std::regex_search(text, number)) {
      return Parity{m[1].str() == "odd" ? ParityKind::Odd : ParityKind::Even};
    }
    return std::nullopt;
  }

  std::optional<Question> parse_guess(const std::string& text) const {
    static const std::regex guess(
        R"(^(?:is it|is the (?:number|target|character|person|image)|is your (?:number|character)|my guess is|i guess)\s+(?:number\s+)?([a-z]*-?\d+)$)");
    std::smatch m;
    if (!std::regex_match(text, m, guess)) return std::nullopt;
    const auto id = m[1].str();
    if (ids_.empty()) return Guess{id};
    for (const auto& known : ids_) {
      if (to_lower(known) == id) return Guess{known};
    }
    return std::nullopt;
  }

  std::optional<Question> parse_attribute(const std::string& text) const {
    if (schema_.attributes.empty()) return std::nullopt;
    static const std::regex wear(R"(^does the character (not )?wear (.+)$)");
    static const std::regex have(R"(^does the character (have|lack) (?:a |an )?(.+)$)");
    static const std::regex possessive(R"(^is the character's (.+)$)");
    std::smatch m;
    if (std::regex_match(text, m, wear)) {
      const auto name = "wears " + m[2].str();
      if (schema_.is_binary(name)) return AttributeQuery{name, m[1].matched ? "no" : "yes"};
    }
    if (std::regex_match(text, m, have)) {
      const auto name = "has " + m[2].str();
      if (schema_.is_binary(name)) return AttributeQuery{name, m[1].str() == "have" ? "yes" : "no"};
    }
    if (std::regex_match(text, m, possessive)) {
      const auto rest = m[1].str();
      for (const auto& spec : schema_.attributes) {
        if (rest.rfind(spec.name + " ", 0) != 0) continue;
        const auto value = rest.substr(spec.name.size() + 1);
        if (schema_.has_value(spec.name, value)) return AttributeQuery{spec.name, value};
      }
    }
    // Free phrasing: a non-binary value mentioned as a whole word; prefer one whose
    // attribute is also mentioned, otherwise accept a value unique across the schema.
    std::optional<AttributeQuery> unique;
    std::size_t matches = 0;
    for (const auto& spec : schema_.attributes) {
      if (schema_.is_binary(spec.name)) continue;
      for (const auto& value : spec.values) {
        if (!contains_word(text, value)) continue;
        if (contains_word(text, spec.name)) return AttributeQuery{spec.name, value};
        ++matches;
        unique = AttributeQuery{spec.name, value};
      }
    }
    if (matches == 1) return *unique;
    return std::nullopt;
  }

  static std::optional<Question> parse_keyword(const std::string& text) {
    static const std::vector<std::string> openings = {
        "does the target show ", "does the image show ", "does the person have ", "does the person wear ",
        "does the target have ", "does he have ", "does she have ", "do they have ", "is the person ",
        "is the target ", "is he ", "is she ", "are they ", "is there ", "can you see ", "is it "};
    static const std::vector<std::string> fillers = {"wearing ", "a ", "an ", "the ", "any "};
    for (const auto& opening : openings) {
      if (text.rfind(opening, 0) != 0) continue;
      auto keyword = text.substr(opening.size());
      bool stripped = true;
      while (stripped) {
        stripped = false;
        for (const auto& filler : fillers) {
          if (keyword.rfind(filler, 0) == 0 && keyword.size() > filler.size()) {
            keyword = keyword.substr(filler.size());
            stripped = true;
          }
        }
      }
      keyword = trim(keyword);
      if (!keyword.empty()) return KeywordQuery{keyword};
    }
    return std::nullopt;
  }

  static bool contains_word(const std::string& text, const std::string& word) {
    std::size_t pos = text.find(word);
    while (pos != std::string::npos) {
      const bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
      const auto end = pos + word.size();
      const bool right = end == text.size() || !std::isalnum(static_cast<unsigned char>(text[end]));
      if (left && right) return true;
      pos = text.find(word, pos + 1);
    }
    return false;
  }

  AttributeSchema schema_;
  std::vector<std::string> ids_;
};

}  // namespace inquest
