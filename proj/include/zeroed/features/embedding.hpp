#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "zeroed/features/frequency.hpp"

namespace zeroed {

/// Token -> dense vector lookup. Either a table loaded from a word-vector
/// file, or a deterministic feature-hashing stand-in that covers every token.
class EmbeddingTable {
 public:
  /// Text `.vec` format: header line `count dim`, then `token v1 .. vdim`.
  /// Vectors are L2-normalized when `normalize` is set.
  static EmbeddingTable load_vec(const std::filesystem::path& path, bool normalize = true);

  /// In-memory table, stored as given.
  static EmbeddingTable from_entries(std::size_t dim,
                                     std::vector<std::pair<std::string, std::vector<float>>> entries);

  /// Each token maps to a seeded +-1 pattern scaled to unit L2 norm.
  static EmbeddingTable hashing(std::size_t dim = 64, std::uint64_t seed = 0);

  std::size_t dim() const noexcept { return dim_; }
  bool is_hashing() const noexcept { return hashing_; }
  std::size_t vocabulary_size() const noexcept { return table_.size(); }

  /// Writes the token's vector into `out` (size dim). False when out of vocabulary.
  bool lookup(std::string_view token, std::span<float> out) const;

 private:
  std::size_t dim_ = 0;
  bool hashing_ = false;
  std::uint64_t seed_ = 0;
  std::unordered_map<std::string, std::vector<float>, StringHash, std::equal_to<>> table_;
};

/// Lowercases, splits on runs of non-alphanumeric ASCII and drops stop words.
/// Bytes >= 0x80 count as word characters so UTF-8 words stay intact.
std::vector<std::string> tokenize(std::string_view value);

bool is_stop_word(std::string_view token);

struct SemanticFeature {
  std::vector<float> vec;
};

/// Mean of the in-vocabulary token vectors; zero vector when none remain.
SemanticFeature embed_value(std::string_view value, const EmbeddingTable& table);

}  // namespace zeroed
