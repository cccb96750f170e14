#include "wordrep/glove.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "wordrep/io_util.hpp"
#include "wordrep/rng.hpp"

namespace wordrep {

CooccurrenceTable count_cooccurrences(
    const std::vector<std::vector<WordId>>& corpus,
    const CooccurrenceConfig& config) {
  // Symmetric counting scans every position and credits each neighbour on
  // both sides, so a same-word pair lands on the diagonal once per endpoint.
  // Asymmetric counting credits only the following window.
  auto count_range = [&](std::size_t begin, std::size_t end,
                         CooccurrenceTable& table) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto& sentence = corpus[s];
      for (std::size_t t = 0; t < sentence.size(); ++t) {
        const std::size_t lo = t >= config.window ? t - config.window : 0;
        const std::size_t hi = std::min(sentence.size(), t + config.window + 1);
        const std::size_t from = config.symmetric ? lo : t + 1;
        for (std::size_t u = from; u < hi; ++u) {
          if (u == t) continue;
          const std::size_t dist = u > t ? u - t : t - u;
          const double w =
              config.distance_weighting ? 1.0 / static_cast<double>(dist) : 1.0;
          table.entries[CooccurrenceTable::key(sentence[t], sentence[u])] += w;
        }
      }
    }
  };

  CooccurrenceTable table;
  table.window = config.window;
  table.symmetric = config.symmetric;

  const std::size_t n_threads = std::max(1, config.threads);
  if (n_threads <= 1 || corpus.size() < 2 * n_threads) {
    count_range(0, corpus.size(), table);
    return table;
  }

  std::vector<CooccurrenceTable> partial(n_threads);
  for (auto& p : partial) {
    p.window = config.window;
    p.symmetric = config.symmetric;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (corpus.size() + n_threads - 1) / n_threads;
  for (std::size_t ti = 0; ti < n_threads; ++ti)
    workers.emplace_back([&, ti] {
      count_range(ti * chunk, std::min(corpus.size(), (ti + 1) * chunk),
                  partial[ti]);
    });
  for (auto& w : workers) w.join();
  // Deterministic merge: shards summed in index order.
  for (const auto& p : partial)
    for (const auto& [k, v] : p.entries) table.entries[k] += v;
  return table;
}

void save_cooccurrences(const CooccurrenceTable& table, const std::string& path) {
  std::vector<std::uint64_t> keys;
  keys.reserve(table.entries.size());
  for (const auto& [k, v] : table.entries) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  std::ofstream out = open_output(path);
  for (std::uint64_t k : keys) {
    auto [i, j] = CooccurrenceTable::unkey(k);
    out << i << ' ' << j << ' ' << format_double(table.entries.at(k)) << '\n';
  }
}

CooccurrenceTable load_cooccurrences(const std::string& path) {
  std::ifstream in = open_input(path);
  CooccurrenceTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_whitespace(line);
    if (fields.size() != 3)
      throw ParseError("co-occurrence rows need 'i j count'", line_no);
    WordId i = static_cast<WordId>(parse_int(fields[0], line_no));
    WordId j = static_cast<WordId>(parse_int(fields[1], line_no));
    double count = parse_double(fields[2], line_no);
    if (count <= 0.0) throw ParseError("non-positive count", line_no);
    table.entries[CooccurrenceTable::key(i, j)] = count;
  }
  if (table.entries.empty())
    throw EmptyInputError("empty co-occurrence file: " + path);
  return table;
}

double glove_weight(double x, double x_max, double alpha) {
  if (x <= 0.0) throw DomainError("glove_weight: count must be positive");
  if (x >= x_max) return 1.0;
  return std::pow(x / x_max, alpha);
}

namespace {

double glove_residual(const GloveModel& model, WordId i, WordId j, double x_ij) {
  if (x_ij <= 0.0) throw DomainError("glove factor: count must be positive");
  return dot(model.main_vectors.row(i), model.context_vectors.row(j)) +
         model.main_bias[static_cast<std::size_t>(i)] +
         model.context_bias[static_cast<std::size_t>(j)] - std::log(x_ij);
}

}  // namespace

double glove_local_factor(const GloveModel& model, WordId i, WordId j,
                          double x_ij) {
  double r = glove_residual(model, i, j, x_ij);
  return glove_weight(x_ij, model.x_max, model.alpha) * r * r;
}

GloveFactorGradient glove_local_factor_gradient(const GloveModel& model,
                                                WordId i, WordId j,
                                                double x_ij) {
  double r = glove_residual(model, i, j, x_ij);
  double common = 2.0 * glove_weight(x_ij, model.x_max, model.alpha) * r;
  GloveFactorGradient grad;
  grad.main_i.resize(model.main_vectors.dim);
  grad.context_j.resize(model.main_vectors.dim);
  auto vi = model.main_vectors.row(i);
  auto vj = model.context_vectors.row(j);
  for (std::size_t k = 0; k < model.main_vectors.dim; ++k) {
    grad.main_i[k] = common * vj[k];
    grad.context_j[k] = common * vi[k];
  }
  grad.bias_i = common;
  grad.bias_j = common;
  return grad;
}

GloveModel train_glove(const CooccurrenceTable& table, const Vocabulary& vocab,
                       const GloveTrainConfig& config, TrainLog* log) {
  if (table.entries.empty()) throw EmptyInputError("train_glove: empty table");

  GloveModel model;
  model.x_max = config.x_max;
  model.alpha = config.alpha;
  model.main_vectors = init_embeddings(vocab, config.dim, config.seed);
  model.context_vectors = init_embeddings(vocab, config.dim, config.seed + 1);
  model.main_bias.assign(vocab.size(), 0.0);
  model.context_bias.assign(vocab.size(), 0.0);

  // Fixed entry order before shuffling, so training never depends on hash
  // iteration order.
  std::vector<std::uint64_t> keys;
  keys.reserve(table.entries.size());
  for (const auto& [k, v] : table.entries) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  const std::size_t dim = config.dim;
  std::vector<double> g_main(vocab.size() * dim, 0.0);
  std::vector<double> g_context(vocab.size() * dim, 0.0);
  std::vector<double> g_main_bias(vocab.size(), 0.0);
  std::vector<double> g_context_bias(vocab.size(), 0.0);

  auto train_entry = [&](std::uint64_t key) -> double {
    auto [i, j] = CooccurrenceTable::unkey(key);
    const double x = table.entries.at(key);
    const double weight = glove_weight(x, model.x_max, model.alpha);
    const double r = glove_residual(model, i, j, x);
    const double common = 2.0 * weight * r;

    auto vi = model.main_vectors.row(i);
    auto vj = model.context_vectors.row(j);
    double* gi = g_main.data() + static_cast<std::size_t>(i) * dim;
    double* gj = g_context.data() + static_cast<std::size_t>(j) * dim;
    for (std::size_t k = 0; k < dim; ++k) {
      const double di = common * vj[k];
      const double dj = common * vi[k];
      gi[k] += di * di;
      gj[k] += dj * dj;
      vi[k] -= config.eta * di / (std::sqrt(gi[k]) + config.eps);
      vj[k] -= config.eta * dj / (std::sqrt(gj[k]) + config.eps);
    }
    auto bias_step = [&](double& bias, double& acc) {
      acc += common * common;
      bias -= config.eta * common / (std::sqrt(acc) + config.eps);
    };
    bias_step(model.main_bias[static_cast<std::size_t>(i)],
              g_main_bias[static_cast<std::size_t>(i)]);
    bias_step(model.context_bias[static_cast<std::size_t>(j)],
              g_context_bias[static_cast<std::size_t>(j)]);
    return weight * r * r;
  };

  Rng shuffle_rng(config.seed + 29);
  const std::size_t n_threads = std::max(1, config.threads);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(keys);
    double loss_sum = 0.0;
    if (n_threads <= 1 || keys.size() < 4 * n_threads) {
      for (std::uint64_t k : keys) loss_sum += train_entry(k);
    } else {
      std::vector<double> partial(n_threads, 0.0);
      std::vector<std::thread> workers;
      const std::size_t chunk = (keys.size() + n_threads - 1) / n_threads;
      for (std::size_t ti = 0; ti < n_threads; ++ti)
        workers.emplace_back([&, ti] {
          const std::size_t lo = ti * chunk;
          const std::size_t hi = std::min(keys.size(), (ti + 1) * chunk);
          double local = 0.0;
          for (std::size_t e = lo; e < hi; ++e) local += train_entry(keys[e]);
          partial[ti] = local;
        });
      for (auto& w : workers) w.join();
      for (double p : partial) loss_sum += p;
    }
    if (log)
      log->epoch_loss.push_back(loss_sum / static_cast<double>(keys.size()));
  }
  return model;
}

double mean_weighted_factor(const GloveModel& model,
                            const CooccurrenceTable& table) {
  double sum = 0.0;
  for (const auto& [k, x] : table.entries) {
    auto [i, j] = CooccurrenceTable::unkey(k);
    sum += glove_local_factor(model, i, j, x);
  }
  return sum / static_cast<double>(table.entries.size());
}

EmbeddingMatrix export_glove_embeddings(const GloveModel& model) {
  EmbeddingMatrix out = model.main_vectors;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] += model.context_vectors.data[i];
  return out;
}

}  // namespace wordrep
