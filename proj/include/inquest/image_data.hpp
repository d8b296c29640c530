#pragma once

#include <array>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "inquest/core.hpp"
#include "inquest/embedding.hpp"
#include "inquest/rng.hpp"

namespace inquest {

inline constexpr std::array<std::string_view, 40> kCelebaAttributes{
    "5_o_Clock_Shadow", "Arched_Eyebrows", "Attractive",      "Bags_Under_Eyes",
    "Bald",             "Bangs",           "Big_Lips",        "Big_Nose",
    "Black_Hair",       "Blond_Hair",      "Blurry",          "Brown_Hair",
    "Bushy_Eyebrows",   "Chubby",          "Double_Chin",     "Eyeglasses",
    "Goatee",           "Gray_Hair",       "Heavy_Makeup",    "High_Cheekbones",
    "Male",             "Mouth_Slightly_Open", "Mustache",    "Narrow_Eyes",
    "No_Beard",         "Oval_Face",       "Pale_Skin",       "Pointy_Nose",
    "Receding_Hairline", "Rosy_Cheeks",    "Sideburns",       "Smiling",
    "Straight_Hair",    "Wavy_Hair",       "Wearing_Earrings", "Wearing_Hat",
    "Wearing_Lipstick", "Wearing_Necklace", "Wearing_Necktie", "Young"};

/// Images with binary annotations plus the embedding space they live in.
struct ImageDataset {
  AttributeSchema schema;
  std::vector<Candidate> images;  // ImagePayload, attributes valued "yes"/"no"
  EmbeddingStore store;
};

inline AttributeSchema binary_schema(std::span<const std::string> names) {
  AttributeSchema schema;
  for (const auto& name : names) schema.attributes.push_back({name, {"no", "yes"}});
  return schema;
}

/// CelebA-style fixture: each attribute owns one embedding axis, images are the
/// normalized sum of their positive axes plus Gaussian noise, and each attribute's
/// keyword (its normalized name) is the unit vector on its axis.
inline ImageDataset synthetic_image_dataset(std::size_t count, std::uint64_t seed,
                                            double noise = 0.15, std::size_t extra_dims = 24) {
  auto rng = make_rng(seed);
  std::vector<std::string> names(kCelebaAttributes.begin(), kCelebaAttributes.end());
  ImageDataset data;
  data.schema = binary_schema(names);
  data.store.dimension = names.size() + extra_dims;

  std::vector<double> prevalence(names.size());
  for (auto& p : prevalence) p = 0.05 + 0.4 * uniform_real(rng);

  const auto width = std::to_string(count).size();
  for (std::size_t i = 0; i < count; ++i) {
    auto id = std::to_string(i);
    id = "img" + std::string(width > id.size() ? width - id.size() : 0, '0') + id;
    AttributeMap attrs;
    Vector v(data.store.dimension, 0.0);
    for (std::size_t a = 0; a < names.size(); ++a) {
      const bool positive = uniform_real(rng) < prevalence[a];
      attrs.emplace(names[a], positive ? "yes" : "no");
      if (positive) v[a] += 1.0;
    }
    for (auto& x : v) x += noise * standard_normal(rng);
    data.store.add_image(id, normalized(std::move(v)));
    data.images.push_back({id, ImagePayload{std::move(attrs), id}});
  }
  for (std::size_t a = 0; a < names.size(); ++a) {
    Vector axis(data.store.dimension, 0.0);
    axis[a] = 1.0;
    data.store.add_keyword(normalize_keyword(names[a]), std::move(axis));
  }
  return data;
}

/// Annotation file: JSONL {"id", "attributes": {name: 1 | -1}}.
inline std::vector<Candidate> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidData, "cannot open annotations " + path);
  std::vector<Candidate> images;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto record = json::parse(line);
    AttributeMap attrs;
    for (const auto& [name, value] : record.at("attributes").items()) {
      const int flag = value.get<int>();
      if (flag != 1 && flag != -1) {
        throw Error(ErrorKind::InvalidData, "annotation values must be 1 or -1");
      }
      attrs.emplace(name, flag == 1 ? "yes" : "no");
    }
    const auto id = record.at("id").get<std::string>();
    images.push_back({id, ImagePayload{std::move(attrs), id}});
  }
  return images;
}

inline void write_annotations(std::span<const Candidate> images, const std::string& path) {
  std::ofstream out(path);
  for (const auto& c : images) {
    json attrs = json::object();
    for (const auto& [name, value] : *c.attributes()) attrs[name] = value == "yes" ? 1 : -1;
    out << json{{"id", c.id}, {"attributes", attrs}}.dump() << '\n';
  }
}

}  // namespace inquest
