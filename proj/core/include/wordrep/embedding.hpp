#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wordrep/corpus.hpp"

namespace wordrep {

enum class Method { Cbow, Skipgram, Glove, Cw, Brown, Onehot };

std::string method_name(Method method);
Method parse_method(const std::string& name);

enum class ContextMode { PreviousK, SurroundingK };

struct RepresentationConfig {
  Method method = Method::Cbow;
  std::size_t dim = 50;        // d
  std::size_t window = 5;      // m
  ContextMode context_mode = ContextMode::SurroundingK;
  std::size_t cluster_count = 1000;  // b, Brown only
};

// Grids used when sweeping representations the conventional way.
inline constexpr std::array<std::size_t, 4> kGridDims{25, 50, 100, 200};
inline constexpr std::array<std::size_t, 3> kGridWindows{1, 5, 10};
inline constexpr std::array<std::size_t, 5> kGridClusters{250, 500, 1000, 2000, 4000};

// True when the config sits on the standard sweep grid above (free-form
// values are fine everywhere else in the toolkit).
bool on_sweep_grid(const RepresentationConfig& config);

// Dense |V| x d matrix, one row per word type (unknown type included).
struct EmbeddingMatrix {
  Vocabulary vocab;
  std::size_t dim = 0;
  std::vector<double> data;  // row-major

  std::span<double> row(WordId w) {
    return {data.data() + static_cast<std::size_t>(w) * dim, dim};
  }
  std::span<const double> row(WordId w) const {
    return {data.data() + static_cast<std::size_t>(w) * dim, dim};
  }
  std::size_t rows() const { return vocab.size(); }
  bool all_finite() const;
};

// Context ids for the token at `position`. Surrounding mode takes up to m ids
// each side (centre excluded); previous mode the m preceding ids. Truncated at
// sentence boundaries.
std::vector<WordId> extract_context(std::span<const WordId> sentence,
                                    std::size_t position, std::size_t m,
                                    ContextMode mode);

// Entries uniform in [-0.5/d, 0.5/d], reproducible from the seed.
EmbeddingMatrix init_embeddings(const Vocabulary& vocab, std::size_t dim,
                                std::uint64_t seed);

// Text format: header "vocab_size dim", then one "word v1 .. vd" row per word.
// Values are written with round-trip precision.
void save_embeddings(const EmbeddingMatrix& matrix, const std::string& path);
EmbeddingMatrix load_embeddings(const std::string& path);

void l2_normalize_rows(EmbeddingMatrix& matrix);

double dot(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace wordrep
