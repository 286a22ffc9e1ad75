#include "tde/tokenizer.hpp"

#include <cctype>

namespace tde {

std::vector<std::string> Tokenizer::split(std::string_view text) {
  std::vector<std::string> toks;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      toks.push_back(cur);
      cur.clear();
    }
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(char(std::tolower(c)));
    } else {
      flush();
      if (!std::isspace(c))
        toks.push_back(std::string(1, char(c)));
    }
  }
  flush();
  return toks;
}

std::vector<int> Tokenizer::tokenize(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& tok : split(text))
    ids.push_back(int(fnv1a64(tok) % u64(vocab_size - 1)) + 1);
  return ids;
}

EmbeddingTable EmbeddingTable::seeded(int vocab, int dim, u64 seed) {
  EmbeddingTable t;
  t.vocab_size = vocab;
  t.dim = dim;
  Rng rng(seed);
  t.weights = Mat::randn(vocab, dim, rng, 0.02);
  return t;
}

Mat EmbeddingTable::embed(const std::vector<int>& ids) const {
  Mat out(int(ids.size()), dim);
  embed_into(ids, out, 0);
  return out;
}

void EmbeddingTable::embed_into(const std::vector<int>& ids, Mat& out,
                                int row0) const {
  for (size_t i = 0; i < ids.size(); ++i) {
    int id = ids[i];
    if (id < 0 || id >= vocab_size)
      throw ShapeError("token id out of range");
    std::memcpy(out.row(row0 + int(i)), weights.row(id),
                size_t(dim) * sizeof(Real));
  }
}

} // namespace tde
