#pragma once

#include <memory>
#include <string>

#include "inquest/embedding.hpp"

namespace fixtures {

inline constexpr std::size_t kOneHotAttributes = 6;

/// 64 images, one per bit pattern over 6 attributes, each attribute on its own
/// axis plus a shared background axis so that no image vector is zero.
/// Keywords "a0".."a5" are the unit axes.
inline inquest::EmbeddingStore one_hot_store() {
  inquest::EmbeddingStore store;
  store.dimension = kOneHotAttributes + 1;
  for (std::size_t pattern = 0; pattern < 64; ++pattern) {
    inquest::Vector v(store.dimension, 0.0);
    v[kOneHotAttributes] = 0.5;
    for (std::size_t a = 0; a < kOneHotAttributes; ++a) {
      if (pattern & (1u << a)) v[a] = 1.0;
    }
    char id[8];
    std::snprintf(id, sizeof id, "i%02zu", pattern);
    store.add_image(id, inquest::normalized(v));
  }
  for (std::size_t a = 0; a < kOneHotAttributes; ++a) {
    inquest::Vector axis(store.dimension, 0.0);
    axis[a] = 1.0;
    store.add_keyword("a" + std::to_string(a), axis);
  }
  return store;
}

inline bool holds(const std::string& id, std::size_t attribute) {
  return (std::stoul(id.substr(1)) & (1u << attribute)) != 0;
}

}  // namespace fixtures
