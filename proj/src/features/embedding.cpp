#include "zeroed/features/embedding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "zeroed/core/error.hpp"
#include "zeroed/core/rng.hpp"

namespace zeroed {

namespace {

constexpr std::array<std::string_view, 50> kStopWords = {
    "a",    "about", "after", "all",   "an",   "and",  "any",   "are",  "as",    "at",
    "be",   "been",  "but",   "by",    "can",  "do",   "for",   "from", "had",   "has",
    "have", "he",    "her",   "his",   "i",    "if",   "in",    "into", "is",    "it",
    "its",  "more",  "no",    "not",   "of",   "on",   "or",    "our",  "she",   "so",
    "that", "the",   "their", "there", "they", "this", "to",    "was",  "were",  "with"};
static_assert(std::is_sorted(kStopWords.begin(), kStopWords.end()));

void normalize_in_place(std::vector<float>& v) {
  double norm = 0.0;
  for (const float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& x : v) x = static_cast<float>(x / norm);
  }
}

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

bool is_stop_word(std::string_view token) {
  return std::binary_search(kStopWords.begin(), kStopWords.end(), token);
}

EmbeddingTable EmbeddingTable::load_vec(const std::filesystem::path& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file " + path.string());
  EmbeddingTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty embedding file " + path.string());
  {
    std::istringstream header(line);
    std::size_t count = 0;
    if (!(header >> count >> t.dim_) || t.dim_ == 0) {
      throw IoError("embedding header must be `count dim`: " + path.string());
    }
    t.table_.reserve(count);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    std::vector<float> vec(t.dim_);
    for (std::size_t k = 0; k < t.dim_; ++k) {
      if (!(row >> vec[k])) {
        throw IoError("embedding line " + std::to_string(line_no) + " has fewer than " + std::to_string(t.dim_) +
                      " components");
      }
    }
    if (normalize) normalize_in_place(vec);
    t.table_.try_emplace(std::move(token), std::move(vec));
  }
  return t;
}

EmbeddingTable EmbeddingTable::from_entries(std::size_t dim,
                                            std::vector<std::pair<std::string, std::vector<float>>> entries) {
  EmbeddingTable t;
  t.dim_ = dim;
  for (auto& [token, vec] : entries) {
    if (vec.size() != dim) throw InvalidArgument("embedding vector for '" + token + "' has wrong dimension");
    t.table_.try_emplace(std::move(token), std::move(vec));
  }
  return t;
}

EmbeddingTable EmbeddingTable::hashing(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
  EmbeddingTable t;
  t.dim_ = dim;
  t.hashing_ = true;
  t.seed_ = seed;
  return t;
}

bool EmbeddingTable::lookup(std::string_view token, std::span<float> out) const {
  if (out.size() != dim_) throw ShapeError("embedding output span has wrong size");
  if (hashing_) {
    const float scale = 1.0f / std::sqrt(static_cast<float>(dim_));
    const std::uint64_t h = stable_hash(token, mix64(seed_));
    std::uint64_t bits = 0;
    for (std::size_t k = 0; k < dim_; ++k) {
      if (k % 64 == 0) bits = mix64(h + k);
      out[k] = (bits >> (k % 64)) & 1U ? scale : -scale;
    }
    return true;
  }
  const auto it = table_.find(token);
  if (it == table_.end()) return false;
  std::copy(it->second.begin(), it->second.end(), out.begin());
  return true;
}

std::vector<std::string> tokenize(std::string_view value) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !is_stop_word(current)) tokens.push_back(current);
    current.clear();
  };
  for (const char ch : value) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

SemanticFeature embed_value(std::string_view value, const EmbeddingTable& table) {
  const std::size_t d = table.dim();
  std::vector<double> sum(d, 0.0);
  std::vector<float> buf(d);
  std::size_t used = 0;
  for (const auto& token : tokenize(value)) {
    if (!table.lookup(token, buf)) continue;
    for (std::size_t k = 0; k < d; ++k) sum[k] += buf[k];
    ++used;
  }
  SemanticFeature f;
  f.vec.assign(d, 0.0f);
  if (used > 0) {
    for (std::size_t k = 0; k < d; ++k) f.vec[k] = static_cast<float>(sum[k] / static_cast<double>(used));
  }
  return f;
}

}  // namespace zeroed
