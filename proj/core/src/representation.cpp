#include "wordrep/representation.hpp"

namespace wordrep {

WordRepresentation WordRepresentation::one_hot(Vocabulary vocab) {
  WordRepresentation rep;
  rep.kind = Kind::OneHot;
  rep.vocab = std::move(vocab);
  return rep;
}

WordRepresentation WordRepresentation::embedding(EmbeddingMatrix matrix) {
  WordRepresentation rep;
  rep.kind = Kind::Embedding;
  rep.matrix = std::move(matrix);
  return rep;
}

WordRepresentation WordRepresentation::brown(
    BrownClusterMap clusters, std::vector<std::size_t> prefix_lengths) {
  WordRepresentation rep;
  rep.kind = Kind::BrownPrefix;
  rep.clusters = std::move(clusters);
  rep.prefix_lengths = std::move(prefix_lengths);
  return rep;
}

void WordRepresentation::append_indicators(const std::string& word, int offset,
                                           std::vector<std::string>& out) const {
  const std::string at = "[" + std::to_string(offset) + "]";
  switch (kind) {
    case Kind::OneHot: {
      // Unknown words fire the reserved unknown indicator.
      WordId id = vocab.id_or_unk(word);
      out.push_back("rw" + at + "=" +
                    (id == kNoWord ? std::string(Vocabulary::kUnknownToken)
                                   : vocab.words[static_cast<std::size_t>(id)]));
      break;
    }
    case Kind::BrownPrefix: {
      auto it = clusters.path_of.find(word);
      if (it == clusters.path_of.end()) {
        for (std::size_t len : prefix_lengths)
          out.push_back("rb" + at + "=p" + std::to_string(len) + "=UNK");
      } else {
        for (auto& f : cluster_prefix_features(it->second, prefix_lengths))
          out.push_back("rb" + at + "=" + f);
      }
      break;
    }
    case Kind::Embedding:
      break;  // dense block only
  }
}

std::string WordRepresentation::kind_name() const {
  switch (kind) {
    case Kind::OneHot: return "onehot";
    case Kind::Embedding: return "embedding";
    case Kind::BrownPrefix: return "brown";
  }
  return "?";
}

}  // namespace wordrep
