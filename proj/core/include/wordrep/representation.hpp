#pragma once

#include <span>
#include <string>
#include <vector>

#include "wordrep/brown.hpp"
#include "wordrep/embedding.hpp"

namespace wordrep {

// What the tagger's lower layer sees for one word: either sparse indicators
// (one-hot identity, Brown path prefixes) or a dense embedding row. Features
// are a pure function of the word string.
struct WordRepresentation {
  enum class Kind { OneHot, Embedding, BrownPrefix };

  Kind kind = Kind::OneHot;
  Vocabulary vocab;                          // OneHot: identity inventory
  EmbeddingMatrix matrix;                    // Embedding
  BrownClusterMap clusters;                  // BrownPrefix
  std::vector<std::size_t> prefix_lengths;   // BrownPrefix

  static WordRepresentation one_hot(Vocabulary vocab);
  static WordRepresentation embedding(EmbeddingMatrix matrix);
  static WordRepresentation brown(BrownClusterMap clusters,
                                  std::vector<std::size_t> prefix_lengths = {
                                      kDefaultPrefixLengths.begin(),
                                      kDefaultPrefixLengths.end()});

  // Width of the dense block contributed per window slot (0 for indicators).
  std::size_t dense_dim() const {
    return kind == Kind::Embedding ? matrix.dim : 0;
  }

  // Sparse features for `word` seen at window offset `offset`.
  void append_indicators(const std::string& word, int offset,
                         std::vector<std::string>& out) const;

  // Embedding row id for `word` (unknown maps to the reserved type);
  // kNoWord for non-dense kinds.
  WordId dense_row_id(const std::string& word) const {
    return kind == Kind::Embedding ? matrix.vocab.id_or_unk(word) : kNoWord;
  }

  std::string kind_name() const;
};

}  // namespace wordrep
