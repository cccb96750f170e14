#include "wordrep/embedding.hpp"

#include <cmath>

#include "wordrep/io_util.hpp"
#include "wordrep/rng.hpp"

namespace wordrep {

std::string method_name(Method method) {
  switch (method) {
    case Method::Cbow: return "cbow";
    case Method::Skipgram: return "skipgram";
    case Method::Glove: return "glove";
    case Method::Cw: return "cw";
    case Method::Brown: return "brown";
    case Method::Onehot: return "onehot";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "cbow") return Method::Cbow;
  if (name == "skipgram") return Method::Skipgram;
  if (name == "glove") return Method::Glove;
  if (name == "cw") return Method::Cw;
  if (name == "brown") return Method::Brown;
  if (name == "onehot") return Method::Onehot;
  throw UsageError("unknown representation method: " + name);
}

bool on_sweep_grid(const RepresentationConfig& config) {
  auto in = [](const auto& grid, std::size_t v) {
    for (std::size_t g : grid)
      if (g == v) return true;
    return false;
  };
  if (config.method == Method::Brown)
    return in(kGridClusters, config.cluster_count);
  if (config.method == Method::Onehot) return true;
  return in(kGridDims, config.dim) && in(kGridWindows, config.window);
}

bool EmbeddingMatrix::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<WordId> extract_context(std::span<const WordId> sentence,
                                    std::size_t position, std::size_t m,
                                    ContextMode mode) {
  if (position >= sentence.size())
    throw std::out_of_range("extract_context: position " +
                            std::to_string(position) + " in sentence of " +
                            std::to_string(sentence.size()));
  std::vector<WordId> context;
  std::size_t lo = position >= m ? position - m : 0;
  for (std::size_t i = lo; i < position; ++i) context.push_back(sentence[i]);
  if (mode == ContextMode::SurroundingK) {
    std::size_t hi = std::min(sentence.size(), position + m + 1);
    for (std::size_t i = position + 1; i < hi; ++i)
      context.push_back(sentence[i]);
  }
  return context;
}

EmbeddingMatrix init_embeddings(const Vocabulary& vocab, std::size_t dim,
                                std::uint64_t seed) {
  if (dim == 0) throw DomainError("embedding dimension must be positive");
  EmbeddingMatrix m;
  m.vocab = vocab;
  m.dim = dim;
  m.data.resize(vocab.size() * dim);
  Rng rng(seed);
  const double scale = 0.5 / static_cast<double>(dim);
  for (double& v : m.data) v = rng.uniform(-scale, scale);
  return m;
}

void save_embeddings(const EmbeddingMatrix& matrix, const std::string& path) {
  std::ofstream out = open_output(path);
  out << matrix.rows() << ' ' << matrix.dim << '\n';
  for (std::size_t w = 0; w < matrix.rows(); ++w) {
    out << matrix.vocab.words[w];
    for (double v : matrix.row(static_cast<WordId>(w)))
      out << ' ' << format_double(v);
    out << '\n';
  }
}

EmbeddingMatrix load_embeddings(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw EmptyInputError("empty embedding file: " + path);
  ++line_no;
  std::vector<std::string> header = split_whitespace(line);
  if (header.size() != 2)
    throw ParseError("embedding header must be 'vocab_size dim'", line_no);
  const auto rows = static_cast<std::size_t>(parse_int(header[0], line_no));
  const auto dim = static_cast<std::size_t>(parse_int(header[1], line_no));
  if (rows == 0 || dim == 0)
    throw ParseError("embedding header values must be positive", line_no);

  EmbeddingMatrix m;
  m.dim = dim;
  m.data.reserve(rows * dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_whitespace(line);
    if (fields.size() != dim + 1)
      throw ParseError("row has " + std::to_string(fields.size() - 1) +
                           " values, header says dim=" + std::to_string(dim),
                       line_no);
    if (m.vocab.contains(fields[0]))
      throw ParseError("duplicate word '" + fields[0] + "'", line_no);
    m.vocab.index[fields[0]] = static_cast<WordId>(m.vocab.words.size());
    m.vocab.words.push_back(fields[0]);
    m.vocab.counts.push_back(0);
    for (std::size_t k = 1; k <= dim; ++k)
      m.data.push_back(parse_double(fields[k], line_no));
  }
  if (m.vocab.words.size() != rows)
    throw ParseError("header promised " + std::to_string(rows) + " rows, found " +
                     std::to_string(m.vocab.words.size()));

  // Files from other tools may lack the reserved unknown type; give it a zero
  // row so unknown-word lookups stay well defined.
  auto it = m.vocab.index.find(Vocabulary::kUnknownToken);
  if (it == m.vocab.index.end()) {
    m.vocab.unk_id = static_cast<WordId>(m.vocab.words.size());
    m.vocab.index[Vocabulary::kUnknownToken] = m.vocab.unk_id;
    m.vocab.words.emplace_back(Vocabulary::kUnknownToken);
    m.vocab.counts.push_back(0);
    m.data.insert(m.data.end(), dim, 0.0);
  } else {
    m.vocab.unk_id = it->second;
  }
  return m;
}

void l2_normalize_rows(EmbeddingMatrix& matrix) {
  for (std::size_t w = 0; w < matrix.rows(); ++w) {
    auto row = matrix.row(static_cast<WordId>(w));
    double norm = std::sqrt(dot(row, row));
    if (norm > 0)
      for (double& v : row) v /= norm;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double na = std::sqrt(dot(a, a));
  double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace wordrep
