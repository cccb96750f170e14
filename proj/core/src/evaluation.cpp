#include "wordrep/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace wordrep {

double token_accuracy(std::span<const std::string> gold,
                      std::span<const std::string> pred) {
  if (gold.size() != pred.size())
    throw DomainError("token_accuracy: sequence lengths differ");
  if (gold.empty()) throw DomainError("token_accuracy: empty sequences");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (gold[i] == pred[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double token_accuracy(const std::vector<std::vector<std::string>>& gold,
                      const std::vector<std::vector<std::string>>& pred) {
  if (gold.size() != pred.size())
    throw DomainError("token_accuracy: sentence counts differ");
  std::size_t hits = 0, total = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw DomainError("token_accuracy: sequence lengths differ");
    for (std::size_t t = 0; t < gold[s].size(); ++t) {
      ++total;
      if (gold[s][t] == pred[s][t]) ++hits;
    }
  }
  if (total == 0) throw DomainError("token_accuracy: empty dataset");
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<TagSpan> extract_iob_spans(std::span<const std::string> tags,
                                       std::size_t sentence_index) {
  if (!iob_sequence_valid(tags))
    throw DomainError("extract_iob_spans: invalid IOB sequence");
  std::vector<TagSpan> spans;
  std::size_t open_start = 0;
  std::string open_type;
  auto close = [&](std::size_t end) {
    if (!open_type.empty())
      spans.push_back({sentence_index, open_start, end, open_type});
    open_type.clear();
  };
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const std::string& tag = tags[t];
    if (tag == "O") {
      close(t);
    } else if (tag[0] == 'B') {
      close(t);
      open_start = t;
      open_type = tag.substr(2);
    }
    // I-X continues the open span
  }
  close(tags.size());
  return spans;
}

PRF span_f1(const std::vector<std::vector<std::string>>& gold,
            const std::vector<std::vector<std::string>>& pred) {
  if (gold.size() != pred.size())
    throw DomainError("span_f1: sentence counts differ");
  std::vector<TagSpan> gold_spans, pred_spans;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw DomainError("span_f1: sequence lengths differ");
    auto g = extract_iob_spans(gold[s], s);
    auto p = extract_iob_spans(pred[s], s);
    gold_spans.insert(gold_spans.end(), g.begin(), g.end());
    pred_spans.insert(pred_spans.end(), p.begin(), p.end());
  }
  std::size_t matched = 0;
  for (const auto& span : pred_spans)
    if (std::find(gold_spans.begin(), gold_spans.end(), span) != gold_spans.end())
      ++matched;

  PRF out;
  out.precision = pred_spans.empty()
                      ? 0.0
                      : static_cast<double>(matched) /
                            static_cast<double>(pred_spans.size());
  out.recall = gold_spans.empty()
                   ? 0.0
                   : static_cast<double>(matched) /
                         static_cast<double>(gold_spans.size());
  out.f1 = out.precision + out.recall == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

OovAccuracy oov_accuracy(const Sentences& sentences,
                         const std::vector<std::vector<std::string>>& gold,
                         const std::vector<std::vector<std::string>>& pred,
                         const std::unordered_set<std::string>& train_vocab) {
  if (sentences.size() != gold.size() || gold.size() != pred.size())
    throw DomainError("oov_accuracy: dataset sizes differ");
  std::size_t hits = 0, total = 0;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (gold[s].size() != sentences[s].size() || pred[s].size() != sentences[s].size())
      throw DomainError("oov_accuracy: sequence lengths differ");
    for (std::size_t t = 0; t < sentences[s].size(); ++t) {
      if (train_vocab.count(sentences[s][t]) > 0) continue;
      ++total;
      if (gold[s][t] == pred[s][t]) ++hits;
    }
  }
  OovAccuracy out;
  out.oov_count = total;
  if (total > 0) out.value = static_cast<double>(hits) / static_cast<double>(total);
  return out;
}

LearningCurve partition_learning_curve(std::size_t n, std::size_t parts) {
  if (parts == 0) throw DomainError("partition_learning_curve: parts must be positive");
  if (parts > 40) throw DomainError("partition_learning_curve: at most 40 partitions");
  if (n < parts)
    throw EmptyInputError("partition_learning_curve: only " + std::to_string(n) +
                          " items for " + std::to_string(parts) + " partitions");

  LearningCurve curve;
  std::size_t used_parts = parts;
  while (used_parts > 1 && ((1ull << used_parts) - 1) > n) --used_parts;
  if (used_parts < parts) {
    curve.truncated = true;
    std::cerr << "warning: " << n << " items support only " << used_parts
              << " doubling partitions (requested " << parts << ")\n";
  }

  const double denom = static_cast<double>((1ull << used_parts) - 1);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i + 1 < used_parts; ++i) {
    const auto size = static_cast<std::size_t>(std::llround(
        static_cast<double>(n) * static_cast<double>(1ull << i) / denom));
    curve.partition_sizes.push_back(size);
    assigned += size;
  }
  curve.partition_sizes.push_back(n - assigned);  // remainder to the largest

  std::size_t cum = 0;
  for (std::size_t size : curve.partition_sizes) {
    cum += size;
    curve.cumulative.push_back(cum);
  }
  return curve;
}

}  // namespace wordrep
