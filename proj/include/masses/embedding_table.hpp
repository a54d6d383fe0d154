#ifndef MASSES_EMBEDDING_TABLE_HPP
#define MASSES_EMBEDDING_TABLE_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "masses/error.hpp"

namespace masses {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

/// Token -> d-dimensional vector store. Rows live in one contiguous float
/// buffer; lookups are exact-token only.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw InvariantError("embedding dimension must be positive");
  }

  std::size_t dimension() const { return dimension_; }
  std::size_t vocabulary_size() const { return index_.size(); }

  /// Adds or replaces a row. Returns false when the token was already present.
  bool insert(std::string token, std::span<const float> vector) {
    if (vector.size() != dimension_) {
      throw InvariantError("vector for '" + token + "' has " + std::to_string(vector.size()) +
                           " components, expected " + std::to_string(dimension_));
    }
    for (float v : vector) {
      if (!std::isfinite(v)) throw InvariantError("non-finite component in vector for '" + token + "'");
    }
    auto [it, fresh] = index_.try_emplace(std::move(token), data_.size() / dimension_);
    if (fresh) {
      data_.insert(data_.end(), vector.begin(), vector.end());
    } else {
      std::copy(vector.begin(), vector.end(), data_.begin() + it->second * dimension_);
    }
    return fresh;
  }

  std::optional<std::span<const float>> find(std::string_view token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return std::span<const float>(data_.data() + it->second * dimension_, dimension_);
  }

  bool contains(std::string_view token) const { return find(token).has_value(); }

 private:
  std::size_t dimension_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

inline bool parse_positive_int(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && out > 0;
}

}  // namespace detail

/// Reads the plain-text word-vector format: an optional "V d" header line,
/// then one token followed by d reals per line. A first line made of exactly
/// two positive integers is taken as the header. Duplicate tokens keep the
/// last row and log a warning.
inline EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file: " + path);

  std::optional<EmbeddingTable> table;
  std::optional<std::size_t> header_dim;
  std::vector<float> row;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2) {
      std::size_t v = 0, d = 0;
      if (detail::parse_positive_int(fields[0], v) && detail::parse_positive_int(fields[1], d)) {
        header_dim = d;
        continue;
      }
    }
    if (fields.size() < 2) {
      throw InputError(path + ":" + std::to_string(line_no) + ": row has no vector components");
    }
    const std::size_t d = fields.size() - 1;
    if (!table) {
      if (header_dim && *header_dim != d) {
        throw InputError(path + ":" + std::to_string(line_no) + ": dimension mismatch, header says " +
                         std::to_string(*header_dim) + " but row has " + std::to_string(d));
      }
      table.emplace(d);
    } else if (d != table->dimension()) {
      throw InputError(path + ":" + std::to_string(line_no) + ": dimension mismatch, expected " +
                       std::to_string(table->dimension()) + " components, got " +
                       std::to_string(d));
    }
    row.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      const auto f = fields[k + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[k]);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(row[k])) {
        throw InputError(path + ":" + std::to_string(line_no) + ": bad component '" +
                         std::string(f) + "'");
      }
    }
    if (!table->insert(std::string(fields[0]), row)) {
      log::warn(path + ":" + std::to_string(line_no) + ": duplicate token '" +
                std::string(fields[0]) + "', keeping last occurrence");
    }
  }
  if (!table) throw InputError("embedding file has no vectors: " + path);
  return std::move(*table);
}

}  // namespace masses

#endif  // MASSES_EMBEDDING_TABLE_HPP
