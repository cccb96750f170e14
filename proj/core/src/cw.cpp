#include "wordrep/cw.hpp"

#include <cmath>
#include <thread>

#include "wordrep/io_util.hpp"
#include "wordrep/rng.hpp"

namespace wordrep {

namespace {

double hard_tanh(double x) { return x > 1.0 ? 1.0 : (x < -1.0 ? -1.0 : x); }
double hard_tanh_slope(double x) { return (x > -1.0 && x < 1.0) ? 1.0 : 0.0; }

void check_arity(const CwNetwork& net, std::span<const WordId> window_ids) {
  if (window_ids.size() != net.arity())
    throw DomainError("window has " + std::to_string(window_ids.size()) +
                      " ids, network expects " + std::to_string(net.arity()));
}

struct Forward {
  std::vector<double> input;        // concatenated embeddings
  std::vector<double> pre;          // hidden pre-activations
  std::vector<double> activation;   // hard_tanh(pre)
  double score = 0.0;
};

Forward forward_pass(const CwNetwork& net, std::span<const WordId> window_ids) {
  Forward f;
  const std::size_t d = net.embeddings.dim;
  f.input.resize(net.input_width());
  for (std::size_t s = 0; s < window_ids.size(); ++s) {
    auto row = net.embeddings.row(window_ids[s]);
    std::copy(row.begin(), row.end(), f.input.begin() + s * d);
  }
  f.pre.resize(net.hidden);
  f.activation.resize(net.hidden);
  f.score = net.output_bias;
  for (std::size_t h = 0; h < net.hidden; ++h) {
    const double* w = net.hidden_weights.data() + h * net.input_width();
    double z = net.hidden_bias[h];
    for (std::size_t k = 0; k < f.input.size(); ++k) z += w[k] * f.input[k];
    f.pre[h] = z;
    f.activation[h] = hard_tanh(z);
    f.score += net.output_weights[h] * f.activation[h];
  }
  return f;
}

}  // namespace

double cw_score(const CwNetwork& net, std::span<const WordId> window_ids) {
  check_arity(net, window_ids);
  return forward_pass(net, window_ids).score;
}

double cw_hinge_loss(const CwNetwork& net, std::span<const WordId> window_ids,
                     WordId corrupt_id) {
  check_arity(net, window_ids);
  const std::size_t centre = net.window;
  if (window_ids[centre] == corrupt_id)
    throw ResampleNeeded("corruption equals the centre word");
  std::vector<WordId> corrupted(window_ids.begin(), window_ids.end());
  corrupted[centre] = corrupt_id;
  double margin = 1.0 - cw_score(net, window_ids) + cw_score(net, corrupted);
  return margin > 0.0 ? margin : 0.0;
}

namespace {

// Backprop d(sign * score)/d(params) for one window, accumulating embedding
// gradients per window slot. Parameters are updated by the caller.
struct CwGradients {
  std::vector<double> hidden_weights;
  std::vector<double> hidden_bias;
  std::vector<double> output_weights;
  double output_bias = 0.0;
  std::vector<double> input;  // gradient wrt the concatenated input
};

void accumulate_window(const CwNetwork& net, const Forward& f, double sign,
                       CwGradients& g) {
  g.output_bias += sign;
  for (std::size_t h = 0; h < net.hidden; ++h) {
    g.output_weights[h] += sign * f.activation[h];
    const double da = sign * net.output_weights[h] * hard_tanh_slope(f.pre[h]);
    if (da == 0.0) continue;
    g.hidden_bias[h] += da;
    double* gw = g.hidden_weights.data() + h * net.input_width();
    const double* w = net.hidden_weights.data() + h * net.input_width();
    for (std::size_t k = 0; k < f.input.size(); ++k) {
      gw[k] += da * f.input[k];
      g.input[k] += da * w[k];
    }
  }
}

}  // namespace

CwGradient cw_hinge_loss_gradient(const CwNetwork& net,
                                  std::span<const WordId> window_ids,
                                  WordId corrupt_id) {
  check_arity(net, window_ids);
  const std::size_t centre = net.window;
  if (window_ids[centre] == corrupt_id)
    throw ResampleNeeded("corruption equals the centre word");

  CwGradient out;
  out.embeddings.assign(net.embeddings.data.size(), 0.0);
  out.hidden_weights.assign(net.hidden_weights.size(), 0.0);
  out.hidden_bias.assign(net.hidden, 0.0);
  out.output_weights.assign(net.hidden, 0.0);

  Forward clean = forward_pass(net, window_ids);
  std::vector<WordId> corrupted(window_ids.begin(), window_ids.end());
  corrupted[centre] = corrupt_id;
  Forward noisy = forward_pass(net, corrupted);
  if (1.0 - clean.score + noisy.score <= 0.0) return out;

  CwGradients g;
  g.hidden_weights.assign(net.hidden_weights.size(), 0.0);
  g.hidden_bias.assign(net.hidden, 0.0);
  g.output_weights.assign(net.hidden, 0.0);
  g.input.assign(net.input_width(), 0.0);

  const std::size_t d = net.embeddings.dim;
  auto scatter = [&](std::span<const WordId> ids) {
    for (std::size_t s = 0; s < ids.size(); ++s) {
      double* row = out.embeddings.data() +
                    static_cast<std::size_t>(ids[s]) * d;
      for (std::size_t k = 0; k < d; ++k) row[k] += g.input[s * d + k];
    }
  };
  accumulate_window(net, clean, -1.0, g);
  scatter(window_ids);
  std::fill(g.input.begin(), g.input.end(), 0.0);
  accumulate_window(net, noisy, +1.0, g);
  scatter(corrupted);

  out.hidden_weights = std::move(g.hidden_weights);
  out.hidden_bias = std::move(g.hidden_bias);
  out.output_weights = std::move(g.output_weights);
  out.output_bias = g.output_bias;
  return out;
}

CwNetwork train_cw(const std::vector<std::vector<WordId>>& corpus,
                   const Vocabulary& vocab, const CwTrainConfig& config,
                   TrainLog* log) {
  std::size_t total_tokens = 0;
  for (const auto& s : corpus) total_tokens += s.size();
  if (total_tokens < 2 * config.window + 1)
    throw EmptyInputError("train_cw: corpus shorter than one window");

  CwNetwork net;
  net.window = config.window;
  net.hidden = config.hidden;
  Vocabulary extended = vocab.with_extra_type(CwNetwork::kBoundaryToken);
  net.pad_id = static_cast<WordId>(extended.size() - 1);
  net.embeddings = init_embeddings(extended, config.dim, config.seed);

  Rng init_rng(config.seed + 3);
  net.hidden_weights.resize(config.hidden * net.input_width());
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(net.input_width()));
  for (double& w : net.hidden_weights) w = init_rng.uniform(-in_scale, in_scale);
  net.hidden_bias.assign(config.hidden, 0.0);
  net.output_weights.resize(config.hidden);
  const double out_scale = 1.0 / std::sqrt(static_cast<double>(config.hidden));
  for (double& w : net.output_weights) w = init_rng.uniform(-out_scale, out_scale);
  net.output_bias = 0.0;

  const std::size_t base_vocab = vocab.size();
  const std::size_t total_steps = config.epochs * total_tokens;
  const std::size_t centre = net.window;

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto run_shard = [&](std::span<const std::size_t> shard, Rng& rng,
                       std::size_t& step, double& loss_sum,
                       std::size_t& count) {
    CwGradients grads;
    grads.hidden_weights.resize(net.hidden_weights.size());
    grads.hidden_bias.resize(net.hidden);
    grads.output_weights.resize(net.hidden);
    grads.input.resize(net.input_width());
    std::vector<WordId> window_ids(net.arity());

    for (std::size_t si : shard) {
      const auto& sentence = corpus[si];
      for (std::size_t t = 0; t < sentence.size(); ++t, ++step) {
        for (std::size_t s = 0; s < net.arity(); ++s) {
          const long long pos =
              static_cast<long long>(t) + static_cast<long long>(s) -
              static_cast<long long>(net.window);
          window_ids[s] = (pos < 0 || pos >= static_cast<long long>(sentence.size()))
                              ? net.pad_id
                              : sentence[static_cast<std::size_t>(pos)];
        }
        WordId corrupt = kNoWord;
        for (int attempt = 0; attempt < 100; ++attempt) {
          WordId cand = static_cast<WordId>(rng.uniform_index(base_vocab));
          if (cand != window_ids[centre]) {
            corrupt = cand;
            break;
          }
        }
        if (corrupt == kNoWord) continue;  // single-type corpus

        Forward clean = forward_pass(net, window_ids);
        WordId true_centre = window_ids[centre];
        window_ids[centre] = corrupt;
        Forward noisy = forward_pass(net, window_ids);
        window_ids[centre] = true_centre;

        const double margin = 1.0 - clean.score + noisy.score;
        loss_sum += margin > 0.0 ? margin : 0.0;
        count += 1;
        if (margin <= 0.0) continue;  // strict hinge: no update at the kink

        std::fill(grads.hidden_weights.begin(), grads.hidden_weights.end(), 0.0);
        std::fill(grads.hidden_bias.begin(), grads.hidden_bias.end(), 0.0);
        std::fill(grads.output_weights.begin(), grads.output_weights.end(), 0.0);
        grads.output_bias = 0.0;
        std::fill(grads.input.begin(), grads.input.end(), 0.0);

        // loss = 1 - f(w) + f(w'): clean window signs -1, corrupted +1
        accumulate_window(net, clean, -1.0, grads);
        std::vector<double> clean_input_grad = grads.input;
        std::fill(grads.input.begin(), grads.input.end(), 0.0);
        accumulate_window(net, noisy, +1.0, grads);

        const double eta = decayed_eta(config.eta0, step, total_steps);
        for (std::size_t k = 0; k < net.hidden_weights.size(); ++k)
          net.hidden_weights[k] -= eta * grads.hidden_weights[k];
        for (std::size_t h = 0; h < net.hidden; ++h) {
          net.hidden_bias[h] -= eta * grads.hidden_bias[h];
          net.output_weights[h] -= eta * grads.output_weights[h];
        }
        net.output_bias -= eta * grads.output_bias;

        const std::size_t d = net.embeddings.dim;
        for (std::size_t s = 0; s < net.arity(); ++s) {
          WordId wid = window_ids[s];
          auto row = net.embeddings.row(wid);
          for (std::size_t k = 0; k < d; ++k)
            row[k] -= eta * clean_input_grad[s * d + k];
          // corrupted window: same ids except the centre slot
          WordId nid = s == centre ? corrupt : wid;
          auto nrow = net.embeddings.row(nid);
          for (std::size_t k = 0; k < d; ++k)
            nrow[k] -= eta * grads.input[s * d + k];
        }
      }
    }
  };

  Rng shuffle_rng(config.seed + 11);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t count = 0;
    if (config.threads <= 1) {
      Rng rng(config.seed + 2000 + epoch);
      std::size_t step = epoch * total_tokens;
      run_shard(order, rng, step, loss_sum, count);
    } else {
      const std::size_t n_threads =
          std::min<std::size_t>(static_cast<std::size_t>(config.threads), order.size());
      std::vector<std::vector<std::size_t>> shards(n_threads);
      for (std::size_t i = 0; i < order.size(); ++i)
        shards[i % n_threads].push_back(order[i]);
      std::vector<double> losses(n_threads, 0.0);
      std::vector<std::size_t> counts(n_threads, 0);
      std::vector<std::thread> workers;
      for (std::size_t ti = 0; ti < n_threads; ++ti)
        workers.emplace_back([&, ti] {
          Rng rng(config.seed + 2000 + epoch * 131 + ti);
          std::size_t step = epoch * total_tokens;
          run_shard(shards[ti], rng, step, losses[ti], counts[ti]);
        });
      for (auto& w : workers) w.join();
      for (std::size_t ti = 0; ti < n_threads; ++ti) {
        loss_sum += losses[ti];
        count += counts[ti];
      }
    }
    if (log)
      log->epoch_loss.push_back(count > 0 ? loss_sum / static_cast<double>(count) : 0.0);
  }
  return net;
}

void save_cw_network(const CwNetwork& net, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "cwnet 1\n";
  out << net.embeddings.rows() << ' ' << net.embeddings.dim << ' ' << net.window
      << ' ' << net.hidden << '\n';
  for (std::size_t w = 0; w < net.embeddings.rows(); ++w) {
    out << net.embeddings.vocab.words[w];
    for (double v : net.embeddings.row(static_cast<WordId>(w)))
      out << ' ' << format_double(v);
    out << '\n';
  }
  for (std::size_t h = 0; h < net.hidden; ++h) {
    const double* w = net.hidden_weights.data() + h * net.input_width();
    for (std::size_t k = 0; k < net.input_width(); ++k)
      out << (k > 0 ? " " : "") << format_double(w[k]);
    out << ' ' << format_double(net.hidden_bias[h]) << '\n';
  }
  for (std::size_t h = 0; h < net.hidden; ++h)
    out << (h > 0 ? " " : "") << format_double(net.output_weights[h]);
  out << ' ' << format_double(net.output_bias) << '\n';
}

CwNetwork load_cw_network(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError("truncated checkpoint", line_no);
    ++line_no;
    return line;
  };

  if (next_line() != "cwnet 1")
    throw ParseError("not a cwnet version 1 checkpoint", line_no);
  auto dims = split_whitespace(next_line());
  if (dims.size() != 4) throw ParseError("bad dimension line", line_no);

  CwNetwork net;
  const auto rows = static_cast<std::size_t>(parse_int(dims[0], line_no));
  const auto dim = static_cast<std::size_t>(parse_int(dims[1], line_no));
  net.window = static_cast<std::size_t>(parse_int(dims[2], line_no));
  net.hidden = static_cast<std::size_t>(parse_int(dims[3], line_no));

  net.embeddings.dim = dim;
  net.embeddings.data.reserve(rows * dim);
  for (std::size_t r = 0; r < rows; ++r) {
    auto fields = split_whitespace(next_line());
    if (fields.size() != dim + 1) throw ParseError("bad embedding row", line_no);
    net.embeddings.vocab.index[fields[0]] =
        static_cast<WordId>(net.embeddings.vocab.words.size());
    net.embeddings.vocab.words.push_back(fields[0]);
    net.embeddings.vocab.counts.push_back(0);
    for (std::size_t k = 1; k <= dim; ++k)
      net.embeddings.data.push_back(parse_double(fields[k], line_no));
  }
  auto unk_it = net.embeddings.vocab.index.find(Vocabulary::kUnknownToken);
  net.embeddings.vocab.unk_id =
      unk_it == net.embeddings.vocab.index.end() ? kNoWord : unk_it->second;
  auto pad_it = net.embeddings.vocab.index.find(CwNetwork::kBoundaryToken);
  if (pad_it == net.embeddings.vocab.index.end())
    throw ParseError("checkpoint lacks the boundary type", line_no);
  net.pad_id = pad_it->second;

  net.hidden_weights.resize(net.hidden * net.input_width());
  net.hidden_bias.resize(net.hidden);
  for (std::size_t h = 0; h < net.hidden; ++h) {
    auto fields = split_whitespace(next_line());
    if (fields.size() != net.input_width() + 1)
      throw ParseError("bad hidden row", line_no);
    for (std::size_t k = 0; k < net.input_width(); ++k)
      net.hidden_weights[h * net.input_width() + k] = parse_double(fields[k], line_no);
    net.hidden_bias[h] = parse_double(fields.back(), line_no);
  }
  auto fields = split_whitespace(next_line());
  if (fields.size() != net.hidden + 1) throw ParseError("bad output row", line_no);
  net.output_weights.resize(net.hidden);
  for (std::size_t h = 0; h < net.hidden; ++h)
    net.output_weights[h] = parse_double(fields[h], line_no);
  net.output_bias = parse_double(fields.back(), line_no);
  return net;
}

}  // namespace wordrep
