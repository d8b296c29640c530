#pragma once

#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "inquest/core.hpp"

namespace inquest {

/// The 36-character Guess Who board and its 9-attribute universe.
inline AttributeSchema guess_who_schema() {
  return AttributeSchema{{
      {"gender", {"male", "female"}},
      {"hair color", {"red", "blonde", "black", "white", "brown"}},
      {"hairstyle", {"curly", "short", "long", "bald"}},
      {"wears glasses", {"no", "yes"}},
      {"has beard", {"no", "yes"}},
      {"eye color", {"amber", "brown", "green", "blue"}},
      {"hobby", {"movies", "photography", "music", "games", "reading", "sports"}},
      {"wears earrings", {"no", "yes"}},
      {"occupation", {"police", "student", "teacher", "chef", "doctor"}},
  }};
}

inline std::vector<Candidate> guess_who_characters() {
  // id, then one value per schema attribute in schema order.
  static constexpr std::array<std::array<std::string_view, 10>, 36> rows{{
      {"C01", "male", "red", "curly", "no", "no", "amber", "movies", "no", "police"},
      {"C02", "male", "blonde", "short", "no", "no", "brown", "photography", "no", "student"},
      {"C03", "male", "black", "long", "no", "yes", "brown", "music", "yes", "teacher"},
      {"C04", "female", "white", "long", "yes", "no", "amber", "games", "no", "police"},
      {"C05", "female", "brown", "short", "no", "no", "green", "reading", "yes", "student"},
      {"C06", "female", "brown", "long", "no", "no", "green", "sports", "no", "police"},
      {"C07", "female", "black", "curly", "yes", "no", "blue", "sports", "no", "chef"},
      {"C08", "female", "blonde", "short", "yes", "no", "green", "music", "yes", "chef"},
      {"C09", "female", "black", "long", "yes", "no", "blue", "reading", "yes", "teacher"},
      {"C10", "female", "white", "short", "no", "no", "amber", "music", "no", "chef"},
      {"C11", "female", "black", "short", "yes", "no", "blue", "games", "no", "chef"},
      {"C12", "male", "red", "bald", "no", "no", "blue", "reading", "no", "chef"},
      {"C13", "male", "blonde", "bald", "yes", "yes", "amber", "music", "no", "doctor"},
      {"C14", "female", "red", "curly", "yes", "no", "blue", "photography", "yes", "student"},
      {"C15", "male", "blonde", "bald", "no", "yes", "brown", "reading", "yes", "police"},
      {"C16", "female", "red", "long", "yes", "no", "brown", "music", "no", "doctor"},
      {"C17", "male", "white", "bald", "yes", "yes", "blue", "reading", "no", "teacher"},
      {"C18", "female", "white", "long", "no", "no", "green", "games", "yes", "student"},
      {"C19", "male", "white", "bald", "yes", "yes", "green", "games", "yes", "teacher"},
      {"C20", "female", "red", "short", "no", "no", "green", "reading", "yes", "doctor"},
      {"C21", "male", "white", "bald", "yes", "no", "green", "photography", "yes", "teacher"},
      {"C22", "female", "blonde", "long", "yes", "no", "amber", "movies", "no", "student"},
      {"C23", "male", "black", "short", "no", "no", "brown", "photography", "yes", "police"},
      {"C24", "female", "brown", "curly", "yes", "no", "blue", "music", "no", "doctor"},
      {"C25", "male", "blonde", "curly", "no", "yes", "blue", "movies", "yes", "police"},
      {"C26", "female", "red", "short", "no", "no", "green", "sports", "no", "doctor"},
      {"C27", "female", "brown", "curly", "no", "no", "amber", "movies", "yes", "chef"},
      {"C28", "female", "white", "short", "no", "no", "brown", "games", "yes", "chef"},
      {"C29", "male", "brown", "bald", "yes", "yes", "amber", "movies", "yes", "teacher"},
      {"C30", "female", "black", "curly", "no", "no", "amber", "sports", "no", "teacher"},
      {"C31", "male", "black", "bald", "yes", "no", "brown", "movies", "no", "police"},
      {"C32", "male", "white", "long", "yes", "yes", "blue", "photography", "yes", "teacher"},
      {"C33", "male", "brown", "curly", "yes", "yes", "amber", "photography", "yes", "student"},
      {"C34", "male", "brown", "bald", "yes", "yes", "brown", "sports", "no", "student"},
      {"C35", "male", "blonde", "long", "no", "yes", "brown", "games", "yes", "doctor"},
      {"C36", "male", "red", "curly", "no", "yes", "green", "sports", "no", "doctor"},
  }};
  const auto schema = guess_who_schema();
  std::vector<Candidate> characters;
  characters.reserve(rows.size());
  for (const auto& row : rows) {
    AttributeMap attrs;
    for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
      attrs.emplace(schema.attributes[a].name, std::string(row[a + 1]));
    }
    characters.push_back({std::string(row[0]), std::move(attrs)});
  }
  return characters;
}

struct Dataset {
  AttributeSchema schema;
  std::vector<Candidate> candidates;
};

inline Dataset guess_who_dataset() { return {guess_who_schema(), guess_who_characters()}; }

}  // namespace inquest
