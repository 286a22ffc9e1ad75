#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tde/mat.hpp"

namespace tde {

// Deterministic hashing tokenizer standing in for an LLM tokenizer.
// Lowercases, splits alphanumeric runs, keeps every other non-space byte
// as its own token, and maps token -> fnv1a64(token) % (V-1) + 1.
// Id 0 is reserved for padding and never produced.
struct Tokenizer {
  int vocab_size = 8192;

  std::vector<int> tokenize(std::string_view text) const;
  static std::vector<std::string> split(std::string_view text);
};

// Frozen embedding table, seeded N(0, 0.02^2).
struct EmbeddingTable {
  int vocab_size = 0;
  int dim = 0;
  Mat weights; // V x d

  static EmbeddingTable seeded(int vocab, int dim, u64 seed);

  // rows gathered by id; empty sequence yields a 0 x d matrix
  Mat embed(const std::vector<int>& ids) const;
  void embed_into(const std::vector<int>& ids, Mat& out, int row0) const;
};

} // namespace tde
