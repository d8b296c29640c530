#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "inquest/core.hpp"
#include "inquest/http_json.hpp"

namespace inquest {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

inline Vector normalized(Vector v) {
  const double norm = std::sqrt(dot(v, v));
  if (norm == 0.0) throw Error(ErrorKind::InvalidData, "cannot normalize a zero vector");
  for (auto& x : v) x /= norm;
  return v;
}

/// Image vectors and (optionally) a keyword table in one shared embedding space.
struct EmbeddingStore {
  std::size_t dimension = 0;
  std::map<std::string, Vector> image_vectors;
  std::map<std::string, Vector> keyword_vectors;

  void check_vector(const std::string& key, const Vector& v) const {
    if (v.size() != dimension) {
      throw Error(ErrorKind::InvalidData, "vector '" + key + "' has dimension " +
                                              std::to_string(v.size()) + ", expected " +
                                              std::to_string(dimension));
    }
    if (std::abs(std::sqrt(dot(v, v)) - 1.0) > 1e-6) {
      throw Error(ErrorKind::InvalidData, "vector '" + key + "' is not unit norm");
    }
  }

  void add_image(const std::string& id, Vector v) {
    check_vector(id, v);
    image_vectors[id] = std::move(v);
  }

  void add_keyword(const std::string& keyword, Vector v) {
    check_vector(keyword, v);
    keyword_vectors[keyword] = std::move(v);
  }

  const Vector& image(const std::string& id) const {
    const auto it = image_vectors.find(id);
    if (it == image_vectors.end()) throw Error(ErrorKind::MissingEmbedding, "image '" + id + "'");
    return it->second;
  }
};

// File formats: store = header line {"dimension", "count"} followed by `count`
// JSONL records {"id", "vector"}; keyword table = JSONL {"keyword", "vector"}.

inline EmbeddingStore load_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidData, "cannot open embedding store " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::InvalidData, path + " is empty");
  const auto header = json::parse(line);
  EmbeddingStore store;
  store.dimension = header.at("dimension").get<std::size_t>();
  const auto count = header.at("count").get<std::size_t>();
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto record = json::parse(line);
    store.add_image(record.at("id").get<std::string>(), record.at("vector").get<Vector>());
  }
  if (store.image_vectors.size() != count) {
    throw Error(ErrorKind::InvalidData, path + " declares " + std::to_string(count) +
                                            " records but holds " +
                                            std::to_string(store.image_vectors.size()));
  }
  return store;
}

inline void load_keyword_table(const std::string& path, EmbeddingStore& store) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidData, "cannot open keyword table " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto record = json::parse(line);
    store.add_keyword(record.at("keyword").get<std::string>(), record.at("vector").get<Vector>());
  }
}

inline void write_store(const EmbeddingStore& store, const std::string& path) {
  std::ofstream out(path);
  out << json{{"dimension", store.dimension}, {"count", store.image_vectors.size()}}.dump() << '\n';
  for (const auto& [id, v] : store.image_vectors) out << json{{"id", id}, {"vector", v}}.dump() << '\n';
}

inline void write_keyword_table(const EmbeddingStore& store, const std::string& path) {
  std::ofstream out(path);
  for (const auto& [k, v] : store.keyword_vectors) {
    out << json{{"keyword", k}, {"vector", v}}.dump() << '\n';
  }
}

/// Maps query text to a unit vector in the store's space.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual Vector embed(const std::string& text) const = 0;
};

/// Looks texts up in the store's keyword table. With `compose` set, a comma-joined
/// query missing from the table is embedded as the normalized mean of its parts.
class TableEmbedder final : public TextEmbedder {
 public:
  TableEmbedder(const EmbeddingStore& store, bool compose) : store_(&store), compose_(compose) {}

  Vector embed(const std::string& text) const override {
    if (const auto it = store_->keyword_vectors.find(text); it != store_->keyword_vectors.end()) {
      return it->second;
    }
    if (!compose_ || text.find(", ") == std::string::npos) {
      throw Error(ErrorKind::MissingEmbedding, "keyword '" + text + "'");
    }
    Vector sum(store_->dimension, 0.0);
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find(", ", start);
      if (end == std::string::npos) end = text.size();
      const auto part = text.substr(start, end - start);
      const auto it = store_->keyword_vectors.find(part);
      if (it == store_->keyword_vectors.end()) {
        throw Error(ErrorKind::MissingEmbedding, "keyword '" + part + "'");
      }
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += it->second[i];
      start = end + 2;
    }
    return normalized(std::move(sum));
  }

 private:
  const EmbeddingStore* store_;
  bool compose_;
};

/// External embedder: POST {"texts": [..]} -> {"vectors": [[..]]}.
class HttpEmbedder final : public TextEmbedder {
 public:
  HttpEmbedder(std::string endpoint, std::size_t dimension, int timeout_ms)
      : endpoint_(std::move(endpoint)), dimension_(dimension), timeout_ms_(timeout_ms) {}

  Vector embed(const std::string& text) const override {
    const auto reply = post_json(endpoint_, json{{"texts", {text}}}, timeout_ms_);
    if (!reply.contains("vectors") || !reply["vectors"].is_array() || reply["vectors"].size() != 1) {
      throw Error(ErrorKind::ClientError, "embedder reply lacks one vector");
    }
    auto v = reply["vectors"][0].get<Vector>();
    if (v.size() != dimension_) {
      throw Error(ErrorKind::ClientError, "embedder returned dimension " + std::to_string(v.size()));
    }
    return normalized(std::move(v));
  }

 private:
  std::string endpoint_;
  std::size_t dimension_;
  int timeout_ms_;
};

}  // namespace inquest
