#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordrep/errors.hpp"

namespace wordrep {

using WordId = std::int32_t;
inline constexpr WordId kNoWord = -1;

using Sentences = std::vector<std::vector<std::string>>;

// Word-type inventory with dense ids. The reserved unknown type is always
// present as the last entry; its count is the number of tokens dropped by the
// frequency cutoff.
struct Vocabulary {
  std::vector<std::string> words;
  std::vector<long long> counts;
  std::unordered_map<std::string, WordId> index;
  WordId unk_id = kNoWord;

  static constexpr const char* kUnknownToken = "<unk>";

  std::size_t size() const { return words.size(); }
  bool contains(const std::string& word) const { return index.count(word) > 0; }

  WordId id_or_unk(const std::string& word) const {
    auto it = index.find(word);
    return it == index.end() ? unk_id : it->second;
  }

  // Copy with one extra reserved type appended (e.g. a boundary token).
  Vocabulary with_extra_type(const std::string& token) const;
};

// Replaces every maximal run of f consecutive ASCII digits with "NUM<f>".
// Note the length rendering is itself a digit run, so the transformation is
// not idempotent on strings containing digits; apply it exactly once.
std::string normalize_digits(std::string_view token);

// Retains types with count >= min_count, ordered by descending count then
// lexicographically; appends the reserved unknown type. Occurrences of the
// literal unknown token in the corpus count toward the unknown type.
Vocabulary build_vocabulary(const Sentences& corpus, long long min_count = 1);
Vocabulary build_vocabulary(const std::vector<std::string>& tokens,
                            long long min_count = 1);

// Whitespace-tokenised plain text, one sentence per line; blank lines skipped.
Sentences read_corpus(const std::string& path, bool normalize);
void write_corpus(const Sentences& corpus, const std::string& path);

// "word<TAB>count" per line, in vocabulary order (unknown type last).
void save_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);

std::vector<std::vector<WordId>> corpus_to_ids(const Sentences& corpus,
                                               const Vocabulary& vocab);

enum class TaskKind { TokenClassification, SpanIob };

std::string task_kind_name(TaskKind kind);
TaskKind parse_task_kind(const std::string& name);

struct LabelledDataset {
  Sentences sentences;
  std::vector<std::vector<std::string>> labels;
  TaskKind task_kind = TaskKind::TokenClassification;

  std::size_t sentence_count() const { return sentences.size(); }
  std::size_t token_count() const;
};

struct ConllOptions {
  bool normalize_digits = false;
  TaskKind task_kind = TaskKind::TokenClassification;
  bool repair_spans = false;  // run repair_iob on every sentence after load
};

// Column-oriented format: whitespace/tab separated fields, one token per row,
// blank line between sentences.
LabelledDataset load_conll(const std::string& path, std::size_t token_column,
                           std::size_t label_column,
                           const ConllOptions& options = {});
void save_conll(const LabelledDataset& dataset, const std::string& path);

// Tag shape check: O, B-X or I-X with non-empty X.
bool iob_tag_wellformed(std::string_view tag);

// Sequence validity: every I-X continues a B-X/I-X run of the same type.
bool iob_sequence_valid(std::span<const std::string> tags);

// Rewrites orphan I-X tags to B-X. Throws ParseError on unknown tag shapes.
std::vector<std::string> repair_iob(std::span<const std::string> tags);

}  // namespace wordrep
