#include "wordrep/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <thread>

#include "wordrep/adagrad.hpp"
#include "wordrep/evaluation.hpp"
#include "wordrep/io_util.hpp"
#include "wordrep/rng.hpp"

namespace wordrep {

namespace {

constexpr double kNegInf = -1e30;

double logsumexp(std::span<const double> values) {
  double max_v = kNegInf;
  for (double v : values) max_v = std::max(max_v, v);
  if (max_v <= kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max_v);
  return max_v + std::log(sum);
}

}  // namespace

EncodedSentence TaggerModel::encode(
    const std::vector<std::string>& sentence) const {
  EncodedSentence enc;
  enc.feature_ids.resize(sentence.size());
  if (dense_width > 0) enc.slots.resize(sentence.size());
  std::vector<std::string> indicators;
  for (std::size_t t = 0; t < sentence.size(); ++t) {
    PositionFeatures feats =
        assemble_features(sentence, t, templates, representation);
    for (const auto& name : feats.indicators) {
      auto it = feature_index.find(name);
      if (it != feature_index.end()) enc.feature_ids[t].push_back(it->second);
    }
    std::sort(enc.feature_ids[t].begin(), enc.feature_ids[t].end());
    if (dense_width > 0)
      enc.slots[t] = dense_slot_ids(sentence, t, templates, representation);
  }
  return enc;
}

EncodedSentence TaggerModel::encode(const std::vector<std::string>& sentence,
                                    const std::vector<std::string>& tags) const {
  if (tags.size() != sentence.size())
    throw DomainError("label sequence length differs from sentence length");
  EncodedSentence enc = encode(sentence);
  enc.gold.reserve(tags.size());
  for (const auto& tag : tags) {
    auto it = label_index.find(tag);
    if (it == label_index.end()) throw DomainError("unknown label: " + tag);
    enc.gold.push_back(it->second);
  }
  return enc;
}

void TaggerModel::emissions(const EncodedSentence& enc, std::size_t t,
                            std::span<double> out) const {
  const std::size_t y_count = labels.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (int f : enc.feature_ids[t]) {
    const double* w = feature_weight.data() + static_cast<std::size_t>(f) * y_count;
    for (std::size_t y = 0; y < y_count; ++y) out[y] += w[y];
  }
  if (dense_width == 0) return;
  const std::size_t d = representation.dense_dim();
  for (std::size_t slot = 0; slot < enc.slots[t].size(); ++slot) {
    const WordId wid = enc.slots[t][slot];
    if (wid == kNoWord) continue;
    auto vec = representation.matrix.row(wid);
    for (std::size_t y = 0; y < y_count; ++y) {
      const double* w = dense_weight.data() + y * dense_width + slot * d;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += w[k] * vec[k];
      out[y] += s;
    }
  }
}

double sequence_score(const TaggerModel& model, const EncodedSentence& enc,
                      std::span<const int> label_ids) {
  if (label_ids.size() != enc.length())
    throw DomainError("label sequence length differs from sentence length");
  const std::size_t n = enc.length();
  const std::size_t y_count = model.labels.size();
  std::vector<double> emis(y_count);
  double score = model.start_weight[static_cast<std::size_t>(label_ids[0])];
  for (std::size_t t = 0; t < n; ++t) {
    model.emissions(enc, t, emis);
    score += emis[static_cast<std::size_t>(label_ids[t])];
    if (t > 0) score += model.trans(label_ids[t - 1], label_ids[t]);
  }
  score += model.stop_weight[static_cast<std::size_t>(label_ids[n - 1])];
  return score;
}

double sequence_score(const TaggerModel& model,
                      const std::vector<std::string>& sentence,
                      const std::vector<std::string>& tags) {
  EncodedSentence enc = model.encode(sentence, tags);
  return sequence_score(model, enc, enc.gold);
}

namespace {

struct ForwardBackward {
  std::vector<double> emis;   // n x Y
  std::vector<double> alpha;  // n x Y
  std::vector<double> beta;   // n x Y
  double log_z = 0.0;
};

ForwardBackward run_forward_backward(const TaggerModel& model,
                                     const EncodedSentence& enc) {
  const std::size_t n = enc.length();
  const std::size_t y_count = model.labels.size();
  if (n == 0) throw DomainError("empty sentence");

  ForwardBackward fb;
  fb.emis.resize(n * y_count);
  for (std::size_t t = 0; t < n; ++t)
    model.emissions(enc, t, {fb.emis.data() + t * y_count, y_count});

  fb.alpha.assign(n * y_count, 0.0);
  std::vector<double> scratch(y_count);
  for (std::size_t y = 0; y < y_count; ++y)
    fb.alpha[y] = model.start_weight[y] + fb.emis[y];
  for (std::size_t t = 1; t < n; ++t)
    for (std::size_t y = 0; y < y_count; ++y) {
      for (std::size_t p = 0; p < y_count; ++p)
        scratch[p] = fb.alpha[(t - 1) * y_count + p] +
                     model.trans(static_cast<int>(p), static_cast<int>(y));
      fb.alpha[t * y_count + y] = fb.emis[t * y_count + y] + logsumexp(scratch);
    }

  for (std::size_t y = 0; y < y_count; ++y)
    scratch[y] = fb.alpha[(n - 1) * y_count + y] + model.stop_weight[y];
  fb.log_z = logsumexp(scratch);

  fb.beta.assign(n * y_count, 0.0);
  for (std::size_t y = 0; y < y_count; ++y)
    fb.beta[(n - 1) * y_count + y] = model.stop_weight[y];
  for (std::size_t t = n - 1; t-- > 0;)
    for (std::size_t y = 0; y < y_count; ++y) {
      for (std::size_t q = 0; q < y_count; ++q)
        scratch[q] = model.trans(static_cast<int>(y), static_cast<int>(q)) +
                     fb.emis[(t + 1) * y_count + q] +
                     fb.beta[(t + 1) * y_count + q];
      fb.beta[t * y_count + y] = logsumexp(scratch);
    }
  return fb;
}

}  // namespace

double log_partition(const TaggerModel& model, const EncodedSentence& enc) {
  return run_forward_backward(model, enc).log_z;
}

namespace {

// Transition admissibility under IOB constraints; prev == -1 means start.
bool iob_transition_ok(const std::vector<std::string>& labels, int prev, int next) {
  const std::string& to = labels[static_cast<std::size_t>(next)];
  if (to.size() < 2 || to[0] != 'I') return true;
  std::string_view type = std::string_view(to).substr(2);
  if (prev < 0) return false;
  const std::string& from = labels[static_cast<std::size_t>(prev)];
  if (from.size() < 2 || (from[0] != 'B' && from[0] != 'I')) return false;
  return std::string_view(from).substr(2) == type;
}

}  // namespace

std::vector<int> viterbi_decode(const TaggerModel& model,
                                const EncodedSentence& enc) {
  const std::size_t n = enc.length();
  const std::size_t y_count = model.labels.size();
  if (n == 0) throw DomainError("empty sentence");
  const bool constrain =
      model.constrained_decoding && model.task_kind == TaskKind::SpanIob;

  std::vector<double> emis(y_count);
  std::vector<double> best(n * y_count, kNegInf);
  std::vector<int> back(n * y_count, -1);

  model.emissions(enc, 0, emis);
  for (std::size_t y = 0; y < y_count; ++y) {
    if (constrain && !iob_transition_ok(model.labels, -1, static_cast<int>(y)))
      continue;
    best[y] = model.start_weight[y] + emis[y];
  }
  for (std::size_t t = 1; t < n; ++t) {
    model.emissions(enc, t, emis);
    for (std::size_t y = 0; y < y_count; ++y) {
      double best_score = kNegInf;
      int best_prev = -1;
      for (std::size_t p = 0; p < y_count; ++p) {
        if (best[(t - 1) * y_count + p] <= kNegInf) continue;
        if (constrain && !iob_transition_ok(model.labels, static_cast<int>(p),
                                            static_cast<int>(y)))
          continue;
        const double s = best[(t - 1) * y_count + p] +
                         model.trans(static_cast<int>(p), static_cast<int>(y));
        if (s > best_score) {  // strict: ties keep the lowest previous label
          best_score = s;
          best_prev = static_cast<int>(p);
        }
      }
      if (best_prev >= 0) {
        best[t * y_count + y] = best_score + emis[y];
        back[t * y_count + y] = best_prev;
      }
    }
  }

  double final_score = kNegInf;
  int final_label = -1;
  for (std::size_t y = 0; y < y_count; ++y) {
    if (best[(n - 1) * y_count + y] <= kNegInf) continue;
    const double s = best[(n - 1) * y_count + y] + model.stop_weight[y];
    if (s > final_score) {
      final_score = s;
      final_label = static_cast<int>(y);
    }
  }
  if (final_label < 0)
    throw DomainError("constrained decoding admits no labelling (label set "
                      "has no valid span opener)");

  std::vector<int> path(n);
  path[n - 1] = final_label;
  for (std::size_t t = n - 1; t > 0; --t)
    path[t - 1] = back[t * y_count + static_cast<std::size_t>(path[t])];
  return path;
}

std::vector<std::string> viterbi_decode(const TaggerModel& model,
                                        const std::vector<std::string>& sentence) {
  std::vector<int> ids = viterbi_decode(model, model.encode(sentence));
  std::vector<std::string> tags;
  tags.reserve(ids.size());
  for (int y : ids) tags.push_back(model.labels[static_cast<std::size_t>(y)]);
  return tags;
}

void TaggerGradient::add(const TaggerGradient& other) {
  auto add_vec = [](std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  };
  add_vec(transition, other.transition);
  add_vec(start, other.start);
  add_vec(stop, other.stop);
  add_vec(dense, other.dense);
  for (const auto& [f, vec] : other.feature) {
    auto& mine = feature[f];
    if (mine.empty()) mine.assign(vec.size(), 0.0);
    for (std::size_t i = 0; i < vec.size(); ++i) mine[i] += vec[i];
  }
  for (const auto& [w, vec] : other.embedding_rows) {
    auto& mine = embedding_rows[w];
    if (mine.empty()) mine.assign(vec.size(), 0.0);
    for (std::size_t i = 0; i < vec.size(); ++i) mine[i] += vec[i];
  }
  nll += other.nll;
}

namespace {

void sentence_gradient(const TaggerModel& model, const EncodedSentence& enc,
                       std::size_t batch_index, bool with_embedding_rows,
                       TaggerGradient& grad) {
  const std::size_t n = enc.length();
  const std::size_t y_count = model.labels.size();
  if (enc.gold.size() != n)
    throw DomainError("gradient requires labelled sentences");

  ForwardBackward fb = run_forward_backward(model, enc);
  if (!std::isfinite(fb.log_z))
    throw NumericalError("non-finite partition at batch sentence " +
                         std::to_string(batch_index));

  // gamma_t(y), model marginals
  std::vector<double> gamma(n * y_count);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t y = 0; y < y_count; ++y) {
      gamma[t * y_count + y] = std::exp(fb.alpha[t * y_count + y] +
                                        fb.beta[t * y_count + y] - fb.log_z);
      if (!std::isfinite(gamma[t * y_count + y]))
        throw NumericalError("non-finite marginal at batch sentence " +
                             std::to_string(batch_index));
    }

  for (std::size_t y = 0; y < y_count; ++y) {
    grad.start[y] += gamma[y];
    grad.stop[y] += gamma[(n - 1) * y_count + y];
  }
  grad.start[static_cast<std::size_t>(enc.gold[0])] -= 1.0;
  grad.stop[static_cast<std::size_t>(enc.gold[n - 1])] -= 1.0;

  for (std::size_t t = 0; t + 1 < n; ++t) {
    for (std::size_t p = 0; p < y_count; ++p) {
      const double base = fb.alpha[t * y_count + p] - fb.log_z;
      for (std::size_t q = 0; q < y_count; ++q) {
        const double xi = std::exp(
            base + model.trans(static_cast<int>(p), static_cast<int>(q)) +
            fb.emis[(t + 1) * y_count + q] + fb.beta[(t + 1) * y_count + q]);
        grad.transition[p * y_count + q] += xi;
      }
    }
    grad.transition[static_cast<std::size_t>(enc.gold[t]) * y_count +
                    static_cast<std::size_t>(enc.gold[t + 1])] -= 1.0;
  }

  const std::size_t d = model.representation.dense_dim();
  for (std::size_t t = 0; t < n; ++t) {
    const int gold = enc.gold[t];
    for (int f : enc.feature_ids[t]) {
      auto& vec = grad.feature[f];
      if (vec.empty()) vec.assign(y_count, 0.0);
      for (std::size_t y = 0; y < y_count; ++y) vec[y] += gamma[t * y_count + y];
      vec[static_cast<std::size_t>(gold)] -= 1.0;
    }
    if (model.dense_width == 0) continue;
    for (std::size_t slot = 0; slot < enc.slots[t].size(); ++slot) {
      const WordId wid = enc.slots[t][slot];
      if (wid == kNoWord) continue;
      auto vec = model.representation.matrix.row(wid);
      std::vector<double>* row_grad = nullptr;
      if (with_embedding_rows) {
        row_grad = &grad.embedding_rows[wid];
        if (row_grad->empty()) row_grad->assign(d, 0.0);
      }
      for (std::size_t y = 0; y < y_count; ++y) {
        const double coeff =
            gamma[t * y_count + y] - (static_cast<int>(y) == gold ? 1.0 : 0.0);
        if (coeff == 0.0) continue;
        double* dw = grad.dense.data() + y * model.dense_width + slot * d;
        const double* w =
            model.dense_weight.data() + y * model.dense_width + slot * d;
        for (std::size_t k = 0; k < d; ++k) {
          dw[k] += coeff * vec[k];
          if (row_grad) (*row_grad)[k] += coeff * w[k];
        }
      }
    }
  }

  grad.nll += fb.log_z - sequence_score(model, enc, enc.gold);
}

TaggerGradient zero_gradient(const TaggerModel& model) {
  TaggerGradient grad;
  const std::size_t y_count = model.labels.size();
  grad.transition.assign(y_count * y_count, 0.0);
  grad.start.assign(y_count, 0.0);
  grad.stop.assign(y_count, 0.0);
  grad.dense.assign(model.dense_weight.size(), 0.0);
  return grad;
}

}  // namespace

TaggerGradient crf_gradient(const TaggerModel& model,
                            std::span<const EncodedSentence> batch,
                            bool with_embedding_rows, int threads) {
  if (batch.empty()) throw DomainError("crf_gradient: empty batch");
  if (threads <= 1 || batch.size() < 2) {
    TaggerGradient grad = zero_gradient(model);
    for (std::size_t i = 0; i < batch.size(); ++i)
      sentence_gradient(model, batch[i], i, with_embedding_rows, grad);
    return grad;
  }
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(threads), batch.size());
  std::vector<TaggerGradient> partial(n_threads);
  std::vector<std::exception_ptr> errors(n_threads);
  std::vector<std::thread> workers;
  const std::size_t chunk = (batch.size() + n_threads - 1) / n_threads;
  for (std::size_t ti = 0; ti < n_threads; ++ti)
    workers.emplace_back([&, ti] {
      try {
        partial[ti] = zero_gradient(model);
        const std::size_t lo = ti * chunk;
        const std::size_t hi = std::min(batch.size(), (ti + 1) * chunk);
        for (std::size_t i = lo; i < hi; ++i)
          sentence_gradient(model, batch[i], i, with_embedding_rows, partial[ti]);
      } catch (...) {
        errors[ti] = std::current_exception();
      }
    });
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  // Deterministic reduction: shards summed in index order.
  TaggerGradient grad = std::move(partial[0]);
  for (std::size_t ti = 1; ti < n_threads; ++ti) grad.add(partial[ti]);
  return grad;
}

AdaGradState AdaGradState::for_model(const TaggerModel& model, double eta,
                                     double eps, double eta_rep, double eps_rep) {
  AdaGradState state;
  state.eta = eta;
  state.eps = eps;
  state.eta_rep = eta_rep;
  state.eps_rep = eps_rep;
  state.transition.assign(model.transition.size(), 0.0);
  state.start.assign(model.start_weight.size(), 0.0);
  state.stop.assign(model.stop_weight.size(), 0.0);
  state.feature.assign(model.feature_weight.size(), 0.0);
  state.dense.assign(model.dense_weight.size(), 0.0);
  if (model.update_representations)
    state.embedding.assign(model.representation.matrix.data.size(), 0.0);
  return state;
}

TaggerModel train_tagger(const LabelledDataset& train,
                         const LabelledDataset* dev,
                         const FeatureTemplateSet& templates,
                         const WordRepresentation& representation,
                         const TaggerTrainConfig& config, TrainLog* log) {
  if (train.sentences.empty()) throw EmptyInputError("train_tagger: empty training set");

  TaggerModel model;
  model.templates = templates;
  model.representation = representation;
  model.task_kind = train.task_kind;
  model.update_representations = config.update_representations;
  model.constrained_decoding = config.constrained_decoding;
  model.dense_width = templates.offset_count() * representation.dense_dim();

  for (const auto& tags : train.labels)
    for (const auto& tag : tags)
      if (model.label_index.emplace(tag, model.num_labels()).second)
        model.labels.push_back(tag);
  if (dev) {
    for (const auto& tags : dev->labels)
      for (const auto& tag : tags)
        if (model.label_index.emplace(tag, model.num_labels()).second) {
          std::cerr << "warning: label '" << tag
                    << "' only occurs in the development set\n";
          model.labels.push_back(tag);
        }
  }
  const std::size_t y_count = model.labels.size();
  model.transition.assign(y_count * y_count, 0.0);
  model.start_weight.assign(y_count, 0.0);
  model.stop_weight.assign(y_count, 0.0);
  model.dense_weight.assign(y_count * model.dense_width, 0.0);

  // Feature alphabet from the training set.
  for (const auto& sentence : train.sentences)
    for (std::size_t t = 0; t < sentence.size(); ++t) {
      PositionFeatures feats =
          assemble_features(sentence, t, templates, representation);
      for (auto& name : feats.indicators)
        if (model.feature_index.emplace(name, static_cast<int>(model.feature_names.size()))
                .second)
          model.feature_names.push_back(name);
    }
  model.feature_weight.assign(model.feature_names.size() * y_count, 0.0);

  std::vector<EncodedSentence> encoded;
  encoded.reserve(train.sentences.size());
  for (std::size_t s = 0; s < train.sentences.size(); ++s)
    encoded.push_back(model.encode(train.sentences[s], train.labels[s]));

  AdaGradState state = AdaGradState::for_model(model, config.eta, config.eps,
                                               config.eta_rep, config.eps_rep);
  const std::size_t n_train = encoded.size();
  const double l2_scale = config.l2 / static_cast<double>(n_train);

  std::vector<std::size_t> order(n_train);
  for (std::size_t i = 0; i < n_train; ++i) order[i] = i;
  Rng shuffle_rng(config.seed);

  std::vector<EncodedSentence> batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double nll_sum = 0.0;
    std::size_t pos = 0;
    while (pos < n_train) {
      const std::size_t batch_n = std::min(config.batch_size, n_train - pos);
      batch.clear();
      for (std::size_t i = 0; i < batch_n; ++i)
        batch.push_back(encoded[order[pos + i]]);
      pos += batch_n;

      TaggerGradient grad = crf_gradient(model, batch,
                                         config.update_representations,
                                         config.threads);
      nll_sum += grad.nll;

      if (config.l2 > 0.0) {
        const double lambda = l2_scale * static_cast<double>(batch_n);
        for (std::size_t i = 0; i < model.transition.size(); ++i)
          grad.transition[i] += lambda * model.transition[i];
        for (std::size_t i = 0; i < y_count; ++i) {
          grad.start[i] += lambda * model.start_weight[i];
          grad.stop[i] += lambda * model.stop_weight[i];
        }
        for (std::size_t i = 0; i < model.dense_weight.size(); ++i)
          grad.dense[i] += lambda * model.dense_weight[i];
        for (auto& [f, vec] : grad.feature) {
          const double* w =
              model.feature_weight.data() + static_cast<std::size_t>(f) * y_count;
          for (std::size_t y = 0; y < y_count; ++y) vec[y] += lambda * w[y];
        }
      }

      adagrad_step(model.transition, grad.transition, state.transition,
                   config.eta, config.eps);
      adagrad_step(model.start_weight, grad.start, state.start, config.eta,
                   config.eps);
      adagrad_step(model.stop_weight, grad.stop, state.stop, config.eta,
                   config.eps);
      adagrad_step(model.dense_weight, grad.dense, state.dense, config.eta,
                   config.eps);
      for (const auto& [f, vec] : grad.feature) {
        const std::size_t base = static_cast<std::size_t>(f) * y_count;
        for (std::size_t y = 0; y < y_count; ++y)
          adagrad_step(model.feature_weight[base + y], vec[y],
                       state.feature[base + y], config.eta, config.eps);
      }
      if (config.update_representations) {
        auto& matrix = model.representation.matrix;
        const std::size_t d = matrix.dim;
        for (const auto& [wid, vec] : grad.embedding_rows) {
          const std::size_t base = static_cast<std::size_t>(wid) * d;
          for (std::size_t k = 0; k < d; ++k)
            adagrad_step(matrix.data[base + k], vec[k],
                         state.embedding[base + k], config.eta_rep,
                         config.eps_rep);
        }
      }
    }
    if (log) {
      log->epoch_loss.push_back(nll_sum / static_cast<double>(n_train));
      if (dev) log->dev_metric.push_back(dataset_metric(model, *dev));
    }
  }
  return model;
}

double dataset_metric(const TaggerModel& model, const LabelledDataset& data) {
  std::vector<std::vector<std::string>> predictions;
  predictions.reserve(data.sentences.size());
  for (const auto& sentence : data.sentences)
    predictions.push_back(viterbi_decode(model, sentence));
  if (data.task_kind == TaskKind::SpanIob) {
    for (auto& tags : predictions) tags = repair_iob(tags);
    return span_f1(data.labels, predictions).f1;
  }
  return token_accuracy(data.labels, predictions);
}

namespace {

void write_matrix_block(std::ofstream& out, const EmbeddingMatrix& m) {
  out << "matrix " << m.rows() << ' ' << m.dim << '\n';
  for (std::size_t w = 0; w < m.rows(); ++w) {
    out << m.vocab.words[w];
    for (double v : m.row(static_cast<WordId>(w))) out << ' ' << format_double(v);
    out << '\n';
  }
}

EmbeddingMatrix read_matrix_block(std::ifstream& in, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("truncated checkpoint", line_no);
  ++line_no;
  auto header = split_whitespace(line);
  if (header.size() != 3 || header[0] != "matrix")
    throw ParseError("expected matrix block", line_no);
  const auto rows = static_cast<std::size_t>(parse_int(header[1], line_no));
  const auto dim = static_cast<std::size_t>(parse_int(header[2], line_no));
  EmbeddingMatrix m;
  m.dim = dim;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw ParseError("truncated matrix", line_no);
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.size() != dim + 1) throw ParseError("bad matrix row", line_no);
    m.vocab.index[fields[0]] = static_cast<WordId>(m.vocab.words.size());
    m.vocab.words.push_back(fields[0]);
    m.vocab.counts.push_back(0);
    for (std::size_t k = 1; k <= dim; ++k)
      m.data.push_back(parse_double(fields[k], line_no));
  }
  auto it = m.vocab.index.find(Vocabulary::kUnknownToken);
  m.vocab.unk_id = it == m.vocab.index.end() ? kNoWord : it->second;
  return m;
}

}  // namespace

void save_tagger(const TaggerModel& model, const std::string& path) {
  std::ofstream out = open_output(path);
  const std::size_t y_count = model.labels.size();
  out << "tagger 1\n";
  out << "task " << task_kind_name(model.task_kind) << '\n';
  out << "options update=" << (model.update_representations ? 1 : 0)
      << " constrained=" << (model.constrained_decoding ? 1 : 0) << '\n';
  out << "templates " << model.templates.to_string() << '\n';
  out << "offsets " << model.templates.min_offset << ' '
      << model.templates.max_offset << '\n';
  out << "labels " << y_count << '\n';
  for (const auto& label : model.labels) out << label << '\n';

  out << "transition\n";
  for (std::size_t p = 0; p < y_count; ++p) {
    for (std::size_t q = 0; q < y_count; ++q)
      out << (q > 0 ? " " : "") << format_double(model.transition[p * y_count + q]);
    out << '\n';
  }
  auto write_row = [&](const char* name, const std::vector<double>& v) {
    out << name;
    for (double x : v) out << ' ' << format_double(x);
    out << '\n';
  };
  write_row("start", model.start_weight);
  write_row("stop", model.stop_weight);

  out << "features " << model.feature_names.size() << '\n';
  for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
    out << model.feature_names[f];
    for (std::size_t y = 0; y < y_count; ++y)
      out << '\t' << format_double(model.feature_weight[f * y_count + y]);
    out << '\n';
  }

  out << "dense " << y_count << ' ' << model.dense_width << '\n';
  if (model.dense_width > 0)
    for (std::size_t y = 0; y < y_count; ++y) {
      for (std::size_t k = 0; k < model.dense_width; ++k)
        out << (k > 0 ? " " : "")
            << format_double(model.dense_weight[y * model.dense_width + k]);
      out << '\n';
    }

  const auto& rep = model.representation;
  out << "representation " << rep.kind_name() << '\n';
  switch (rep.kind) {
    case WordRepresentation::Kind::OneHot:
      out << "vocab " << rep.vocab.size() << '\n';
      for (std::size_t w = 0; w < rep.vocab.size(); ++w)
        out << rep.vocab.words[w] << '\t' << rep.vocab.counts[w] << '\n';
      break;
    case WordRepresentation::Kind::BrownPrefix: {
      out << "prefix_lengths";
      for (std::size_t len : rep.prefix_lengths) out << ' ' << len;
      out << '\n';
      std::vector<std::pair<std::string, std::string>> rows(
          rep.clusters.path_of.begin(), rep.clusters.path_of.end());
      std::sort(rows.begin(), rows.end());
      out << "clusters " << rows.size() << '\n';
      for (const auto& [word, bits] : rows) out << bits << '\t' << word << '\n';
      break;
    }
    case WordRepresentation::Kind::Embedding:
      write_matrix_block(out, rep.matrix);
      break;
  }
}

TaggerModel load_tagger(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError("truncated checkpoint", line_no);
    ++line_no;
    return line;
  };

  if (next_line() != "tagger 1")
    throw ParseError("not a tagger version 1 checkpoint", line_no);

  TaggerModel model;
  {
    auto fields = split_whitespace(next_line());
    if (fields.size() != 2 || fields[0] != "task")
      throw ParseError("expected task line", line_no);
    model.task_kind = parse_task_kind(fields[1]);
  }
  {
    auto fields = split_whitespace(next_line());
    if (fields.size() != 3 || fields[0] != "options")
      throw ParseError("expected options line", line_no);
    model.update_representations = fields[1] == "update=1";
    model.constrained_decoding = fields[2] == "constrained=1";
  }
  {
    auto fields = split_whitespace(next_line());
    if (fields.size() != 2 || fields[0] != "templates")
      throw ParseError("expected templates line", line_no);
    model.templates = FeatureTemplateSet::parse(fields[1]);
  }
  {
    auto fields = split_whitespace(next_line());
    if (fields.size() != 3 || fields[0] != "offsets")
      throw ParseError("expected offsets line", line_no);
    model.templates.min_offset = static_cast<int>(parse_int(fields[1], line_no));
    model.templates.max_offset = static_cast<int>(parse_int(fields[2], line_no));
  }
  std::size_t y_count = 0;
  {
    auto fields = split_whitespace(next_line());
    if (fields.size() != 2 || fields[0] != "labels")
      throw ParseError("expected labels line", line_no);
    y_count = static_cast<std::size_t>(parse_int(fields[1], line_no));
  }
  for (std::size_t y = 0; y < y_count; ++y) {
    model.labels.push_back(next_line());
    model.label_index[model.labels.back()] = static_cast<int>(y);
  }

  if (next_line() != "transition") throw ParseError("expected transition", line_no);
  model.transition.resize(y_count * y_count);
  for (std::size_t p = 0; p < y_count; ++p) {
    auto fields = split_whitespace(next_line());
    if (fields.size() != y_count) throw ParseError("bad transition row", line_no);
    for (std::size_t q = 0; q < y_count; ++q)
      model.transition[p * y_count + q] = parse_double(fields[q], line_no);
  }
  auto read_row = [&](const char* name, std::vector<double>& v) {
    auto fields = split_whitespace(next_line());
    if (fields.size() != y_count + 1 || fields[0] != name)
      throw ParseError(std::string("expected ") + name + " row", line_no);
    v.resize(y_count);
    for (std::size_t y = 0; y < y_count; ++y)
      v[y] = parse_double(fields[y + 1], line_no);
  };
  read_row("start", model.start_weight);
  read_row("stop", model.stop_weight);

  {
    auto fields = split_whitespace(next_line());
    if (fields.size() != 2 || fields[0] != "features")
      throw ParseError("expected features line", line_no);
    const auto count = static_cast<std::size_t>(parse_int(fields[1], line_no));
    model.feature_weight.resize(count * y_count);
    for (std::size_t f = 0; f < count; ++f) {
      std::string& row = next_line();
      const std::size_t tab = row.find('\t');
      if (tab == std::string::npos) throw ParseError("bad feature row", line_no);
      std::string name = row.substr(0, tab);
      auto values = split_whitespace(row.substr(tab + 1));
      if (values.size() != y_count) throw ParseError("bad feature row", line_no);
      model.feature_index[name] = static_cast<int>(f);
      model.feature_names.push_back(std::move(name));
      for (std::size_t y = 0; y < y_count; ++y)
        model.feature_weight[f * y_count + y] = parse_double(values[y], line_no);
    }
  }
  {
    auto fields = split_whitespace(next_line());
    if (fields.size() != 3 || fields[0] != "dense")
      throw ParseError("expected dense line", line_no);
    model.dense_width = static_cast<std::size_t>(parse_int(fields[2], line_no));
    model.dense_weight.resize(y_count * model.dense_width);
    if (model.dense_width > 0)
      for (std::size_t y = 0; y < y_count; ++y) {
        auto values = split_whitespace(next_line());
        if (values.size() != model.dense_width)
          throw ParseError("bad dense row", line_no);
        for (std::size_t k = 0; k < model.dense_width; ++k)
          model.dense_weight[y * model.dense_width + k] =
              parse_double(values[k], line_no);
      }
  }
  {
    auto fields = split_whitespace(next_line());
    if (fields.size() != 2 || fields[0] != "representation")
      throw ParseError("expected representation line", line_no);
    if (fields[1] == "onehot") {
      auto header = split_whitespace(next_line());
      if (header.size() != 2 || header[0] != "vocab")
        throw ParseError("expected vocab block", line_no);
      const auto count = static_cast<std::size_t>(parse_int(header[1], line_no));
      Vocabulary vocab;
      for (std::size_t w = 0; w < count; ++w) {
        auto row = split_whitespace(next_line());
        if (row.size() != 2) throw ParseError("bad vocab row", line_no);
        vocab.index[row[0]] = static_cast<WordId>(vocab.words.size());
        vocab.words.push_back(row[0]);
        vocab.counts.push_back(parse_int(row[1], line_no));
      }
      auto it = vocab.index.find(Vocabulary::kUnknownToken);
      vocab.unk_id = it == vocab.index.end() ? kNoWord : it->second;
      model.representation = WordRepresentation::one_hot(std::move(vocab));
    } else if (fields[1] == "brown") {
      auto lens = split_whitespace(next_line());
      if (lens.empty() || lens[0] != "prefix_lengths")
        throw ParseError("expected prefix_lengths", line_no);
      std::vector<std::size_t> lengths;
      for (std::size_t i = 1; i < lens.size(); ++i)
        lengths.push_back(static_cast<std::size_t>(parse_int(lens[i], line_no)));
      auto header = split_whitespace(next_line());
      if (header.size() != 2 || header[0] != "clusters")
        throw ParseError("expected clusters block", line_no);
      const auto count = static_cast<std::size_t>(parse_int(header[1], line_no));
      BrownClusterMap map;
      for (std::size_t i = 0; i < count; ++i) {
        auto row = split_whitespace(next_line());
        if (row.size() != 2) throw ParseError("bad cluster row", line_no);
        map.path_of[row[1]] = row[0];
      }
      model.representation = WordRepresentation::brown(std::move(map), lengths);
    } else if (fields[1] == "embedding") {
      model.representation =
          WordRepresentation::embedding(read_matrix_block(in, line_no));
    } else {
      throw ParseError("unknown representation kind", line_no);
    }
  }
  return model;
}

}  // namespace wordrep
