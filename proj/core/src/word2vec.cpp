#include "wordrep/word2vec.hpp"

#include <cmath>
#include <iostream>
#include <thread>

#include "wordrep/rng.hpp"

namespace wordrep {

namespace {

double log_sigmoid(double x) {
  // log(1/(1+e^-x)) without overflow on either tail
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

void context_mean(const EmbeddingMatrix& m, std::span<const WordId> ctx,
                  std::vector<double>& h) {
  h.assign(m.dim, 0.0);
  for (WordId c : ctx) {
    auto row = m.row(c);
    for (std::size_t k = 0; k < m.dim; ++k) h[k] += row[k];
  }
  const double inv = 1.0 / static_cast<double>(ctx.size());
  for (double& v : h) v *= inv;
}

// -log softmax over the full vocabulary of (output . h) at `target`.
double exact_softmax_loss(const W2vModel& model, std::span<const double> h,
                          WordId target) {
  const auto& out = model.output_vectors;
  double max_score = -HUGE_VAL;
  std::vector<double> scores(out.rows());
  for (std::size_t j = 0; j < out.rows(); ++j) {
    scores[j] = dot(out.row(static_cast<WordId>(j)), h);
    if (scores[j] > max_score) max_score = scores[j];
  }
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - max_score);
  double lse = max_score + std::log(sum);
  return lse - scores[static_cast<std::size_t>(target)];
}

}  // namespace

double softmax_local_factor(const W2vModel& model, WordId w,
                            std::span<const WordId> ctx) {
  if (ctx.empty()) throw DomainError("softmax_local_factor: empty context");
  if (model.mode == Method::Cbow) {
    std::vector<double> h;
    context_mean(model.input_vectors, ctx, h);
    return exact_softmax_loss(model, h, w);
  }
  // skipgram: one factor per context word, context word supplies h
  double total = 0.0;
  for (WordId c : ctx)
    total += exact_softmax_loss(model, model.input_vectors.row(c), w);
  return total;
}

double negative_sampling_loss(const W2vModel& model, WordId w,
                              std::span<const WordId> ctx,
                              std::span<const WordId> noise_draws) {
  if (ctx.empty()) throw DomainError("negative_sampling_loss: empty context");
  if (noise_draws.empty())
    throw DomainError("negative_sampling_loss: needs at least one noise draw");
  const auto& out = model.output_vectors;

  if (model.mode == Method::Cbow) {
    std::vector<double> h;
    context_mean(model.input_vectors, ctx, h);
    double loss = -log_sigmoid(dot(out.row(w), h));
    for (WordId n : noise_draws) loss -= log_sigmoid(-dot(out.row(n), h));
    return loss;
  }
  // skipgram: h is the centre's input vector, targets are the context words
  auto h = model.input_vectors.row(w);
  double loss = 0.0;
  for (WordId c : ctx) {
    loss -= log_sigmoid(dot(out.row(c), h));
    for (WordId n : noise_draws) loss -= log_sigmoid(-dot(out.row(n), h));
  }
  return loss;
}

W2vGradient negative_sampling_loss_gradient(const W2vModel& model, WordId w,
                                            std::span<const WordId> ctx,
                                            std::span<const WordId> noise_draws) {
  if (ctx.empty()) throw DomainError("negative_sampling_loss: empty context");
  if (noise_draws.empty())
    throw DomainError("negative_sampling_loss: needs at least one noise draw");
  const std::size_t dim = model.input_vectors.dim;
  W2vGradient grad;
  grad.input.assign(model.input_vectors.data.size(), 0.0);
  grad.output.assign(model.output_vectors.data.size(), 0.0);

  auto sample_grads = [&](std::span<const double> h, WordId target,
                          std::vector<double>& grad_h) {
    auto accumulate = [&](WordId s, double label) {
      auto u = model.output_vectors.row(s);
      const double g = sigmoid(dot(u, h)) - label;
      double* gu = grad.output.data() + static_cast<std::size_t>(s) * dim;
      for (std::size_t k = 0; k < dim; ++k) {
        grad_h[k] += g * u[k];
        gu[k] += g * h[k];
      }
    };
    accumulate(target, 1.0);
    for (WordId n : noise_draws) accumulate(n, 0.0);
  };

  std::vector<double> grad_h(dim, 0.0);
  if (model.mode == Method::Cbow) {
    std::vector<double> h;
    context_mean(model.input_vectors, ctx, h);
    sample_grads(h, w, grad_h);
    const double inv = 1.0 / static_cast<double>(ctx.size());
    for (WordId c : ctx) {
      double* gi = grad.input.data() + static_cast<std::size_t>(c) * dim;
      for (std::size_t k = 0; k < dim; ++k) gi[k] += grad_h[k] * inv;
    }
  } else {
    auto h = model.input_vectors.row(w);
    for (WordId c : ctx) sample_grads(h, c, grad_h);
    double* gi = grad.input.data() + static_cast<std::size_t>(w) * dim;
    for (std::size_t k = 0; k < dim; ++k) gi[k] += grad_h[k];
  }
  return grad;
}

namespace {

struct SgdScratch {
  std::vector<double> h;
  std::vector<double> grad_h;
};

// One (target, h) sampling step: updates output rows in place, adds the
// h-gradient into grad_h, returns the loss term. Follows the usual trick of
// reading output rows before writing them.
double ns_step(EmbeddingMatrix& out, std::span<const double> h, WordId target,
               std::span<const WordId> negatives, double eta,
               std::vector<double>& grad_h) {
  double loss = 0.0;
  auto upd = [&](WordId s, double label) {
    auto u = out.row(s);
    double score = dot(u, h);
    double g = sigmoid(score) - label;  // d loss / d score
    loss -= label > 0.5 ? log_sigmoid(score) : log_sigmoid(-score);
    for (std::size_t k = 0; k < h.size(); ++k) {
      grad_h[k] += g * u[k];
      u[k] -= eta * g * h[k];
    }
  };
  upd(target, 1.0);
  for (WordId n : negatives) upd(n, 0.0);
  return loss;
}

// Exact softmax step over the whole vocabulary (verification-scale only).
double softmax_step(EmbeddingMatrix& out, std::span<const double> h,
                    WordId target, double eta, std::vector<double>& grad_h) {
  const std::size_t v = out.rows();
  std::vector<double> p(v);
  double max_score = -HUGE_VAL;
  for (std::size_t j = 0; j < v; ++j) {
    p[j] = dot(out.row(static_cast<WordId>(j)), h);
    if (p[j] > max_score) max_score = p[j];
  }
  double sum = 0.0;
  for (double& s : p) {
    s = std::exp(s - max_score);
    sum += s;
  }
  double loss = -std::log(p[static_cast<std::size_t>(target)] / sum);
  for (std::size_t j = 0; j < v; ++j) {
    double g = p[j] / sum - (static_cast<WordId>(j) == target ? 1.0 : 0.0);
    auto u = out.row(static_cast<WordId>(j));
    for (std::size_t k = 0; k < h.size(); ++k) {
      grad_h[k] += g * u[k];
      u[k] -= eta * g * h[k];
    }
  }
  return loss;
}

struct EpochResult {
  double loss_sum = 0.0;
  std::size_t factor_count = 0;
};

}  // namespace

W2vModel train_w2v(const std::vector<std::vector<WordId>>& corpus,
                   const Vocabulary& vocab, const W2vTrainConfig& config,
                   TrainLog* log) {
  if (config.mode != Method::Cbow && config.mode != Method::Skipgram)
    throw UsageError("train_w2v mode must be cbow or skipgram");
  if (corpus.empty()) throw EmptyInputError("train_w2v: empty corpus");

  W2vModel model;
  model.mode = config.mode;
  model.negatives = config.negatives;
  model.noise_power = config.noise_power;
  model.input_vectors = init_embeddings(vocab, config.dim, config.seed);
  model.output_vectors = init_embeddings(vocab, config.dim, config.seed + 1);

  std::size_t total_tokens = 0;
  bool any_known = false;
  for (const auto& s : corpus) {
    total_tokens += s.size();
    for (WordId w : s) any_known = any_known || w != vocab.unk_id;
  }
  if (!any_known) {
    std::cerr << "warning: training corpus maps entirely to the unknown type; "
                 "embeddings will be degenerate\n";
    if (log) log->degenerate = true;
  }

  // Unigram^power noise distribution over types with observed counts.
  std::vector<double> noise_weights(vocab.size(), 0.0);
  double weight_total = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (vocab.counts[i] > 0)
      noise_weights[i] =
          std::pow(static_cast<double>(vocab.counts[i]), config.noise_power);
    weight_total += noise_weights[i];
  }
  if (weight_total <= 0.0) noise_weights.assign(vocab.size(), 1.0);
  DiscreteSampler noise(noise_weights);

  const std::size_t total_steps = config.epochs * total_tokens;

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto run_shard = [&](std::span<const std::size_t> shard, Rng& rng,
                       std::size_t& step, EpochResult& result) {
    SgdScratch scratch;
    std::vector<WordId> negatives;
    for (std::size_t si : shard) {
      const auto& sentence = corpus[si];
      if (sentence.empty()) continue;
      for (std::size_t t = 0; t < sentence.size(); ++t, ++step) {
        if (config.subsample_threshold > 0.0) {
          WordId w = sentence[t];
          double freq = static_cast<double>(vocab.counts[w]) /
                        static_cast<double>(std::max<std::size_t>(total_tokens, 1));
          if (freq > config.subsample_threshold) {
            double keep = std::sqrt(config.subsample_threshold / freq);
            if (rng.uniform() >= keep) continue;
          }
        }
        std::vector<WordId> ctx = extract_context(sentence, t, config.window,
                                                  ContextMode::SurroundingK);
        if (ctx.empty()) continue;
        const WordId w = sentence[t];
        const double eta = decayed_eta(config.eta0, step, total_steps);

        auto draw_negatives = [&](WordId skip) {
          negatives.clear();
          for (std::size_t k = 0; k < config.negatives; ++k) {
            WordId n = static_cast<WordId>(noise.sample(rng));
            if (n == skip) continue;  // dropped, not redrawn
            negatives.push_back(n);
          }
        };

        if (config.mode == Method::Cbow) {
          context_mean(model.input_vectors, ctx, scratch.h);
          scratch.grad_h.assign(config.dim, 0.0);
          double loss;
          if (config.negatives == 0) {
            loss = softmax_step(model.output_vectors, scratch.h, w, eta,
                                scratch.grad_h);
          } else {
            draw_negatives(w);
            loss = ns_step(model.output_vectors, scratch.h, w, negatives, eta,
                           scratch.grad_h);
          }
          const double inv = 1.0 / static_cast<double>(ctx.size());
          for (WordId c : ctx) {
            auto row = model.input_vectors.row(c);
            for (std::size_t k = 0; k < config.dim; ++k)
              row[k] -= eta * scratch.grad_h[k] * inv;
          }
          result.loss_sum += loss;
          result.factor_count += 1;
        } else {
          for (WordId c : ctx) {
            scratch.grad_h.assign(config.dim, 0.0);
            double loss;
            if (config.negatives == 0) {
              // context word supplies h, centre is the softmax target
              auto h = model.input_vectors.row(c);
              loss = softmax_step(model.output_vectors, h, w, eta,
                                  scratch.grad_h);
              auto row = model.input_vectors.row(c);
              for (std::size_t k = 0; k < config.dim; ++k)
                row[k] -= eta * scratch.grad_h[k];
            } else {
              // centre supplies h, context word is the positive target
              draw_negatives(c);
              auto h = model.input_vectors.row(w);
              loss = ns_step(model.output_vectors, h, c, negatives, eta,
                             scratch.grad_h);
              auto row = model.input_vectors.row(w);
              for (std::size_t k = 0; k < config.dim; ++k)
                row[k] -= eta * scratch.grad_h[k];
            }
            result.loss_sum += loss;
            result.factor_count += 1;
          }
        }
      }
    }
  };

  Rng shuffle_rng(config.seed + 17);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    EpochResult total;
    if (config.threads <= 1) {
      Rng rng(config.seed + 1000 + epoch);
      std::size_t step = epoch * total_tokens;
      run_shard(order, rng, step, total);
    } else {
      // Hogwild-style: shards share the matrices and tolerate lost updates.
      const std::size_t n_threads =
          std::min<std::size_t>(static_cast<std::size_t>(config.threads), order.size());
      std::vector<std::vector<std::size_t>> shards(n_threads);
      for (std::size_t i = 0; i < order.size(); ++i)
        shards[i % n_threads].push_back(order[i]);
      std::vector<EpochResult> results(n_threads);
      std::vector<std::thread> workers;
      for (std::size_t ti = 0; ti < n_threads; ++ti)
        workers.emplace_back([&, ti] {
          Rng rng(config.seed + 1000 + epoch * 131 + ti);
          std::size_t step = epoch * total_tokens;
          run_shard(shards[ti], rng, step, results[ti]);
        });
      for (auto& w : workers) w.join();
      for (const auto& r : results) {
        total.loss_sum += r.loss_sum;
        total.factor_count += r.factor_count;
      }
    }
    if (log)
      log->epoch_loss.push_back(
          total.factor_count > 0 ? total.loss_sum / static_cast<double>(total.factor_count)
                                 : 0.0);
  }
  return model;
}

}  // namespace wordrep
