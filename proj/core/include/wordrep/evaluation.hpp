#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "wordrep/corpus.hpp"

namespace wordrep {

// Fraction of positions where pred equals gold. Lengths must match.
double token_accuracy(std::span<const std::string> gold,
                      std::span<const std::string> pred);
double token_accuracy(const std::vector<std::vector<std::string>>& gold,
                      const std::vector<std::vector<std::string>>& pred);

struct TagSpan {
  std::size_t sentence = 0;
  std::size_t start = 0;  // token index, inclusive
  std::size_t end = 0;    // token index, exclusive
  std::string type;
  bool operator==(const TagSpan&) const = default;
};

// Spans of one valid IOB sequence. Throws DomainError on invalid input.
std::vector<TagSpan> extract_iob_spans(std::span<const std::string> tags,
                                       std::size_t sentence_index = 0);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exact span matching; degenerate denominators follow the 0 convention.
PRF span_f1(const std::vector<std::vector<std::string>>& gold,
            const std::vector<std::vector<std::string>>& pred);

struct OovAccuracy {
  std::optional<double> value;  // absent when no position is out of vocabulary
  std::size_t oov_count = 0;
};

// Token accuracy restricted to positions whose word is outside train_vocab.
// For span tasks this compares the full IOB tag at each such position.
OovAccuracy oov_accuracy(const Sentences& sentences,
                         const std::vector<std::vector<std::string>>& gold,
                         const std::vector<std::vector<std::string>>& pred,
                         const std::unordered_set<std::string>& train_vocab);

struct LearningCurve {
  std::vector<std::size_t> partition_sizes;  // doubling, last absorbs remainder
  std::vector<std::size_t> cumulative;       // nested prefix sizes
  bool truncated = false;                    // fewer parts than requested
};

// Splits n into `parts` partitions on a doubling scale: partition i holds
// round(n 2^i / (2^parts - 1)) items. When n cannot support that many parts
// the count is reduced (with a warning); n < parts is an error.
LearningCurve partition_learning_curve(std::size_t n, std::size_t parts = 10);

}  // namespace wordrep
