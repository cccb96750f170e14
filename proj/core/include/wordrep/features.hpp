#pragma once

#include <string>
#include <vector>

#include "wordrep/representation.hpp"

namespace wordrep {

// Generic indicator templates applied at every offset in [min_offset,
// max_offset]. Offsets beyond the sentence emit a dedicated boundary feature.
struct FeatureTemplateSet {
  bool word = true;
  bool lower = true;
  bool prefixes = true;   // lengths 1..3
  bool suffixes = true;   // lengths 1..3
  bool shape = true;      // X/x/d character classes
  bool has_digit = true;
  bool has_hyphen = true;
  int min_offset = -2;
  int max_offset = 2;

  std::size_t offset_count() const {
    return static_cast<std::size_t>(max_offset - min_offset + 1);
  }

  static FeatureTemplateSet all() { return {}; }
  static FeatureTemplateSet none();
  // "all", "none", or a comma list of
  // word,lower,prefix,suffix,shape,digit,hyphen.
  static FeatureTemplateSet parse(const std::string& spec);
  std::string to_string() const;
};

struct PositionFeatures {
  std::vector<std::string> indicators;
  std::vector<double> dense;  // offset_count * rep.dense_dim() wide
};

// Deterministic feature vector for one token position: hand-crafted
// indicators per the template mask, representation indicators, and the
// concatenated dense block (boundary slots zero-filled).
PositionFeatures assemble_features(const std::vector<std::string>& sentence,
                                   std::size_t position,
                                   const FeatureTemplateSet& templates,
                                   const WordRepresentation& representation);

// Word ids feeding each dense slot, kNoWord for boundary slots. Empty when
// the representation has no dense block.
std::vector<WordId> dense_slot_ids(const std::vector<std::string>& sentence,
                                   std::size_t position,
                                   const FeatureTemplateSet& templates,
                                   const WordRepresentation& representation);

std::string word_shape(const std::string& token);

}  // namespace wordrep
