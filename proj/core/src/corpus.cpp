#include "wordrep/corpus.hpp"

#include <algorithm>
#include <cctype>

#include "wordrep/io_util.hpp"

namespace wordrep {

Vocabulary Vocabulary::with_extra_type(const std::string& token) const {
  if (contains(token))
    throw DomainError("vocabulary already contains type: " + token);
  Vocabulary out = *this;
  out.index[token] = static_cast<WordId>(out.words.size());
  out.words.push_back(token);
  out.counts.push_back(0);
  return out;
}

std::string normalize_digits(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  std::size_t i = 0;
  while (i < token.size()) {
    if (std::isdigit(static_cast<unsigned char>(token[i]))) {
      std::size_t run = 0;
      while (i + run < token.size() &&
             std::isdigit(static_cast<unsigned char>(token[i + run])))
        ++run;
      out += "NUM";
      out += std::to_string(run);
      i += run;
    } else {
      out += token[i];
      ++i;
    }
  }
  return out;
}

namespace {

Vocabulary vocabulary_from_counts(
    const std::unordered_map<std::string, long long>& raw, long long min_count,
    long long total_tokens) {
  if (total_tokens == 0) throw EmptyInputError("cannot build vocabulary from an empty corpus");

  std::vector<std::pair<std::string, long long>> retained;
  long long dropped = 0;
  for (const auto& [word, count] : raw) {
    if (word == Vocabulary::kUnknownToken) {
      dropped += count;  // literal unknown tokens feed the reserved type
    } else if (count >= min_count) {
      retained.emplace_back(word, count);
    } else {
      dropped += count;
    }
  }
  std::sort(retained.begin(), retained.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  vocab.words.reserve(retained.size() + 1);
  vocab.counts.reserve(retained.size() + 1);
  for (const auto& [word, count] : retained) {
    vocab.index[word] = static_cast<WordId>(vocab.words.size());
    vocab.words.push_back(word);
    vocab.counts.push_back(count);
  }
  vocab.unk_id = static_cast<WordId>(vocab.words.size());
  vocab.index[Vocabulary::kUnknownToken] = vocab.unk_id;
  vocab.words.emplace_back(Vocabulary::kUnknownToken);
  vocab.counts.push_back(dropped);
  return vocab;
}

}  // namespace

Vocabulary build_vocabulary(const Sentences& corpus, long long min_count) {
  std::unordered_map<std::string, long long> raw;
  long long total = 0;
  for (const auto& sentence : corpus)
    for (const auto& token : sentence) {
      ++raw[token];
      ++total;
    }
  return vocabulary_from_counts(raw, min_count, total);
}

Vocabulary build_vocabulary(const std::vector<std::string>& tokens,
                            long long min_count) {
  std::unordered_map<std::string, long long> raw;
  for (const auto& token : tokens) ++raw[token];
  return vocabulary_from_counts(raw, min_count,
                                static_cast<long long>(tokens.size()));
}

Sentences read_corpus(const std::string& path, bool normalize) {
  std::ifstream in = open_input(path);
  Sentences corpus;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    if (normalize)
      for (auto& t : tokens) t = normalize_digits(t);
    corpus.push_back(std::move(tokens));
  }
  if (corpus.empty()) throw EmptyInputError("empty corpus: " + path);
  return corpus;
}

void write_corpus(const Sentences& corpus, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& sentence : corpus) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i > 0) out << ' ';
      out << sentence[i];
    }
    out << '\n';
  }
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out = open_output(path);
  for (std::size_t i = 0; i < vocab.size(); ++i)
    out << vocab.words[i] << '\t' << vocab.counts[i] << '\n';
}

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in = open_input(path);
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_whitespace(line);
    if (fields.size() != 2)
      throw ParseError("vocabulary rows need 'word count'", line_no);
    if (vocab.contains(fields[0]))
      throw ParseError("duplicate vocabulary entry '" + fields[0] + "'", line_no);
    vocab.index[fields[0]] = static_cast<WordId>(vocab.words.size());
    vocab.words.push_back(fields[0]);
    vocab.counts.push_back(parse_int(fields[1], line_no));
  }
  if (vocab.words.empty()) throw EmptyInputError("empty vocabulary file: " + path);
  auto it = vocab.index.find(Vocabulary::kUnknownToken);
  if (it == vocab.index.end()) {
    vocab.unk_id = static_cast<WordId>(vocab.words.size());
    vocab.index[Vocabulary::kUnknownToken] = vocab.unk_id;
    vocab.words.emplace_back(Vocabulary::kUnknownToken);
    vocab.counts.push_back(0);
  } else {
    vocab.unk_id = it->second;
  }
  return vocab;
}

std::vector<std::vector<WordId>> corpus_to_ids(const Sentences& corpus,
                                               const Vocabulary& vocab) {
  std::vector<std::vector<WordId>> ids;
  ids.reserve(corpus.size());
  for (const auto& sentence : corpus) {
    std::vector<WordId> row;
    row.reserve(sentence.size());
    for (const auto& token : sentence) row.push_back(vocab.id_or_unk(token));
    ids.push_back(std::move(row));
  }
  return ids;
}

std::size_t LabelledDataset::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::string task_kind_name(TaskKind kind) {
  return kind == TaskKind::SpanIob ? "span-iob" : "token-classification";
}

TaskKind parse_task_kind(const std::string& name) {
  if (name == "span-iob") return TaskKind::SpanIob;
  if (name == "token-classification") return TaskKind::TokenClassification;
  throw UsageError("unknown task kind: " + name);
}

LabelledDataset load_conll(const std::string& path, std::size_t token_column,
                           std::size_t label_column,
                           const ConllOptions& options) {
  std::ifstream in = open_input(path);
  LabelledDataset dataset;
  dataset.task_kind = options.task_kind;

  std::vector<std::string> tokens, tags;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&]() {
    if (tokens.empty()) return;
    dataset.sentences.push_back(std::move(tokens));
    dataset.labels.push_back(std::move(tags));
    tokens.clear();
    tags.clear();
  };

  const std::size_t need = std::max(token_column, label_column) + 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> fields = split_whitespace(line);
    if (fields.empty()) {
      flush();
      continue;
    }
    if (fields.size() < need)
      throw ParseError("row has " + std::to_string(fields.size()) +
                           " columns, need at least " + std::to_string(need),
                       line_no);
    std::string token = fields[token_column];
    if (options.normalize_digits) token = normalize_digits(token);
    if (options.task_kind == TaskKind::SpanIob &&
        !iob_tag_wellformed(fields[label_column]))
      throw ParseError("malformed IOB tag '" + fields[label_column] + "'",
                       line_no);
    tokens.push_back(std::move(token));
    tags.push_back(fields[label_column]);
  }
  flush();

  if (dataset.sentences.empty())
    throw EmptyInputError("no sentences in: " + path);
  if (options.repair_spans && options.task_kind == TaskKind::SpanIob)
    for (auto& sentence_tags : dataset.labels)
      sentence_tags = repair_iob(sentence_tags);
  return dataset;
}

void save_conll(const LabelledDataset& dataset, const std::string& path) {
  std::ofstream out = open_output(path);
  for (std::size_t s = 0; s < dataset.sentences.size(); ++s) {
    for (std::size_t t = 0; t < dataset.sentences[s].size(); ++t)
      out << dataset.sentences[s][t] << '\t' << dataset.labels[s][t] << '\n';
    out << '\n';
  }
}

bool iob_tag_wellformed(std::string_view tag) {
  if (tag == "O") return true;
  if (tag.size() < 3) return false;
  if (tag[0] != 'B' && tag[0] != 'I') return false;
  return tag[1] == '-';
}

bool iob_sequence_valid(std::span<const std::string> tags) {
  std::string_view open_type;  // span type currently open, empty if none
  for (const auto& tag : tags) {
    if (!iob_tag_wellformed(tag)) return false;
    if (tag == "O") {
      open_type = {};
    } else if (tag[0] == 'B') {
      open_type = std::string_view(tag).substr(2);
    } else {  // I-X
      if (open_type != std::string_view(tag).substr(2)) return false;
    }
  }
  return true;
}

std::vector<std::string> repair_iob(std::span<const std::string> tags) {
  std::vector<std::string> out;
  out.reserve(tags.size());
  std::string open_type;
  for (const auto& tag : tags) {
    if (!iob_tag_wellformed(tag))
      throw ParseError("unknown tag shape '" + tag + "'");
    if (tag == "O") {
      open_type.clear();
      out.push_back(tag);
    } else {
      std::string type(std::string_view(tag).substr(2));
      if (tag[0] == 'I' && type != open_type)
        out.push_back("B-" + type);  // orphan continuation starts a new span
      else
        out.push_back(tag);
      open_type = std::move(type);
    }
  }
  return out;
}

}  // namespace wordrep
