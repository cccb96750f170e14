#include "commands.hpp"

#include <cstdlib>
#include <iostream>
#include <unordered_set>

#include "wordrep/brown.hpp"
#include "wordrep/cw.hpp"
#include "wordrep/evaluation.hpp"
#include "wordrep/glove.hpp"
#include "wordrep/io_util.hpp"
#include "wordrep/rng.hpp"
#include "wordrep/search.hpp"
#include "wordrep/tagger.hpp"
#include "wordrep/word2vec.hpp"

namespace wordrep::cli {

using nlohmann::json;

std::string expand_env(const std::string& value) {
  std::string out;
  std::size_t i = 0;
  while (i < value.size()) {
    if (value[i] == '$' && i + 1 < value.size() && value[i + 1] == '{') {
      const std::size_t close = value.find('}', i + 2);
      if (close == std::string::npos)
        throw UsageError("unterminated ${...} in path: " + value);
      const std::string name = value.substr(i + 2, close - i - 2);
      const char* env = std::getenv(name.c_str());
      if (!env) throw UsageError("environment variable not set: " + name);
      out += env;
      i = close + 1;
    } else {
      out += value[i++];
    }
  }
  return out;
}

namespace {

template <typename T>
T get_or(json& config, const std::string& key, T default_value) {
  if (!config.contains(key) || config[key].is_null())
    config[key] = std::move(default_value);
  return config[key].get<T>();
}

std::string require_string(const json& config, const std::string& key) {
  if (!config.contains(key) || !config[key].is_string() ||
      config[key].get<std::string>().empty())
    throw UsageError("config key '" + key + "' is required");
  return config[key].get<std::string>();
}

std::string require_path(const json& config, const std::string& key) {
  return expand_env(require_string(config, key));
}

std::string get_path(json& config, const std::string& key,
                     const std::string& default_value) {
  return expand_env(get_or<std::string>(config, key, default_value));
}

std::string optional_path(json& config, const std::string& key) {
  return get_path(config, key, "");
}

void write_snapshot(json& config, const std::string& primary_output) {
  const std::string path =
      get_path(config, "snapshot", primary_output + ".config.json");
  write_file(path, config.dump(2) + "\n");
}

int effective_threads(json& config) {
  const bool deterministic = get_or(config, "deterministic", true);
  const int threads = get_or(config, "threads", 1);
  return deterministic ? 1 : std::max(1, threads);
}

void log_epochs(const TrainLog& log) {
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) {
    std::cerr << "epoch " << e + 1 << " loss " << log.epoch_loss[e];
    if (e < log.dev_metric.size()) std::cerr << " dev " << log.dev_metric[e];
    std::cerr << '\n';
  }
}

// ---------------------------------------------------------------- datasets

struct DataOptions {
  std::size_t token_column = 0;
  std::size_t label_column = 1;
  TaskKind task = TaskKind::TokenClassification;
  bool normalize_digits = false;
  bool repair = true;
};

DataOptions resolve_data_options(json& config) {
  DataOptions opts;
  opts.token_column = get_or<std::size_t>(config, "token_column", 0);
  opts.label_column = get_or<std::size_t>(config, "label_column", 1);
  opts.task = parse_task_kind(
      get_or<std::string>(config, "task", "token-classification"));
  opts.normalize_digits = get_or(config, "normalize_digits", false);
  opts.repair = get_or(config, "repair_iob", true);
  return opts;
}

LabelledDataset load_dataset(const std::string& path, const DataOptions& opts) {
  ConllOptions conll;
  conll.normalize_digits = opts.normalize_digits;
  conll.task_kind = opts.task;
  conll.repair_spans = opts.repair;
  return load_conll(path, opts.token_column, opts.label_column, conll);
}

// ---------------------------------------------------------- representations

// spec: "onehot" | "brown:<cluster file>" | "embedding:<vector file>"
WordRepresentation resolve_representation(const std::string& spec, json& config,
                                          const Sentences& train_sentences) {
  if (spec == "onehot") {
    const auto min_count = get_or<long long>(config, "onehot_min_count", 1);
    return WordRepresentation::one_hot(
        build_vocabulary(train_sentences, min_count));
  }
  if (spec.rfind("brown:", 0) == 0) {
    std::vector<std::size_t> lengths = get_or<std::vector<std::size_t>>(
        config, "prefix_lengths",
        {kDefaultPrefixLengths.begin(), kDefaultPrefixLengths.end()});
    return WordRepresentation::brown(load_clusters(expand_env(spec.substr(6))),
                                     lengths);
  }
  if (spec.rfind("embedding:", 0) == 0) {
    EmbeddingMatrix matrix = load_embeddings(expand_env(spec.substr(10)));
    if (get_or(config, "normalize_embeddings", false)) l2_normalize_rows(matrix);
    return WordRepresentation::embedding(std::move(matrix));
  }
  throw UsageError("bad representation spec '" + spec +
                   "' (onehot | brown:<path> | embedding:<path>)");
}

// ------------------------------------------------------------------ reports

struct ReportRow {
  std::string method;
  std::string representation;
  std::string training_size;
  std::string metric;
  double value = 0.0;
  std::string domain;
  std::string oov_count;
};

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "method,representation,training_size,metric,value,domain,oov_count\r\n";
  for (const auto& r : rows)
    out += csv_field(r.method) + "," + csv_field(r.representation) + "," +
           r.training_size + "," + r.metric + "," + format_double(r.value) +
           "," + r.domain + "," + r.oov_count + "\r\n";
  return out;
}

std::vector<std::vector<std::string>> predict_dataset(
    const TaggerModel& model, const LabelledDataset& data) {
  std::vector<std::vector<std::string>> preds;
  preds.reserve(data.sentences.size());
  for (const auto& sentence : data.sentences)
    preds.push_back(viterbi_decode(model, sentence));
  if (data.task_kind == TaskKind::SpanIob)
    for (auto& tags : preds) tags = repair_iob(tags);
  return preds;
}

// Main metric row plus an OOV row when a training vocabulary is supplied and
// out-of-vocabulary positions exist.
void append_eval_rows(std::vector<ReportRow>& rows, const TaggerModel& model,
                      const LabelledDataset& data, const std::string& method,
                      const std::string& representation,
                      const std::string& training_size,
                      const std::string& domain,
                      const std::unordered_set<std::string>* train_vocab,
                      std::vector<ReportRow>* oov_rows) {
  auto preds = predict_dataset(model, data);
  ReportRow row;
  row.method = method;
  row.representation = representation;
  row.training_size = training_size;
  row.domain = domain;
  if (data.task_kind == TaskKind::SpanIob) {
    row.metric = "span_f1";
    row.value = span_f1(data.labels, preds).f1;
  } else {
    row.metric = "token_accuracy";
    row.value = token_accuracy(data.labels, preds);
  }
  rows.push_back(row);

  if (train_vocab && oov_rows) {
    OovAccuracy oov = oov_accuracy(data.sentences, data.labels, preds, *train_vocab);
    if (oov.value.has_value()) {
      ReportRow orow = row;
      orow.metric = "oov_token_accuracy";
      orow.value = *oov.value;
      orow.oov_count = std::to_string(oov.oov_count);
      oov_rows->push_back(orow);
    }
  }
}

std::unordered_set<std::string> vocabulary_of(const Sentences& sentences) {
  std::unordered_set<std::string> vocab;
  for (const auto& sentence : sentences)
    for (const auto& token : sentence) vocab.insert(token);
  return vocab;
}

TaggerTrainConfig tagger_config_from(json& section, std::uint64_t seed,
                                     int threads) {
  TaggerTrainConfig config;
  config.epochs = get_or<std::size_t>(section, "epochs", 10);
  config.eta = get_or(section, "eta", 0.1);
  config.eps = get_or(section, "eps", 1e-6);
  config.eta_rep = get_or(section, "eta_rep", 0.01);
  config.eps_rep = get_or(section, "eps_rep", 1e-6);
  config.l2 = get_or(section, "l2", 0.0);
  config.update_representations = get_or(section, "update_representations", false);
  config.constrained_decoding = get_or(section, "constrained_decoding", false);
  config.batch_size = get_or<std::size_t>(section, "batch_size", 1);
  config.seed = seed;
  config.threads = threads;
  return config;
}

// ----------------------------------------------------------------- commands

int cmd_preprocess(json& config) {
  const std::string input = require_path(config, "input");
  const std::string output_corpus = require_path(config, "output_corpus");
  const std::string output_vocab = get_path(config, "output_vocab", "");
  const bool normalize = get_or(config, "normalize_digits", true);
  const auto min_count = get_or<long long>(config, "min_count", 1);
  write_snapshot(config, output_corpus);

  Sentences corpus = read_corpus(input, normalize);
  write_corpus(corpus, output_corpus);
  if (!output_vocab.empty())
    save_vocabulary(build_vocabulary(corpus, min_count), output_vocab);
  std::cerr << "preprocessed " << corpus.size() << " sentences\n";
  return kExitOk;
}

int cmd_train_repr(json& config) {
  const Method method = parse_method(require_string(config, "method"));
  const std::string corpus_path = require_path(config, "corpus");
  const std::string output = require_path(config, "output");
  const bool normalize = get_or(config, "normalize_digits", false);
  const auto min_count = get_or<long long>(config, "min_count", 1);
  const auto seed = get_or<std::uint64_t>(config, "seed", 1);
  const int threads = effective_threads(config);

  Sentences corpus = read_corpus(corpus_path, normalize);
  Vocabulary vocab = build_vocabulary(corpus, min_count);
  auto ids = corpus_to_ids(corpus, vocab);
  TrainLog log;

  switch (method) {
    case Method::Cbow:
    case Method::Skipgram: {
      W2vTrainConfig train;
      train.mode = method;
      train.dim = get_or<std::size_t>(config, "dim", 50);
      train.window = get_or<std::size_t>(config, "window", 5);
      train.negatives = get_or<std::size_t>(config, "negatives", 5);
      train.epochs = get_or<std::size_t>(config, "epochs", 5);
      train.eta0 = get_or(config, "eta0", 0.025);
      train.noise_power = get_or(config, "noise_power", 0.75);
      train.subsample_threshold = get_or(config, "subsample", 0.0);
      train.seed = seed;
      train.threads = threads;
      write_snapshot(config, output);
      W2vModel model = train_w2v(ids, vocab, train, &log);
      save_embeddings(model.input_vectors, output);
      break;
    }
    case Method::Glove: {
      CooccurrenceConfig cooc;
      cooc.window = get_or<std::size_t>(config, "window", 5);
      cooc.symmetric = get_or(config, "symmetric", true);
      cooc.distance_weighting = get_or(config, "distance_weighting", false);
      cooc.threads = threads;
      GloveTrainConfig train;
      train.dim = get_or<std::size_t>(config, "dim", 50);
      train.epochs = get_or<std::size_t>(config, "epochs", 25);
      train.eta = get_or(config, "eta", 0.05);
      train.x_max = get_or(config, "x_max", 100.0);
      train.alpha = get_or(config, "alpha", 0.75);
      train.seed = seed;
      train.threads = threads;
      const std::string cooc_out = optional_path(config, "cooccurrences_out");
      write_snapshot(config, output);
      CooccurrenceTable table = count_cooccurrences(ids, cooc);
      if (!cooc_out.empty()) save_cooccurrences(table, cooc_out);
      GloveModel model = train_glove(table, vocab, train, &log);
      save_embeddings(export_glove_embeddings(model), output);
      break;
    }
    case Method::Cw: {
      CwTrainConfig train;
      train.dim = get_or<std::size_t>(config, "dim", 50);
      train.window = get_or<std::size_t>(config, "window", 2);
      train.hidden = get_or<std::size_t>(config, "hidden", 50);
      train.epochs = get_or<std::size_t>(config, "epochs", 5);
      train.eta0 = get_or(config, "eta0", 0.01);
      train.seed = seed;
      train.threads = threads;
      const std::string checkpoint = optional_path(config, "checkpoint_out");
      write_snapshot(config, output);
      CwNetwork net = train_cw(ids, vocab, train, &log);
      if (!checkpoint.empty()) save_cw_network(net, checkpoint);
      save_embeddings(net.embeddings, output);
      break;
    }
    case Method::Brown: {
      BrownConfig brown;
      const std::string strategy = get_or<std::string>(config, "strategy", "auto");
      if (strategy == "exact") brown.strategy = MergeStrategy::Exact;
      else if (strategy == "window") brown.strategy = MergeStrategy::WindowLimited;
      else if (strategy == "auto") brown.strategy = MergeStrategy::Auto;
      else throw UsageError("unknown strategy: " + strategy);
      brown.window_extra = get_or<std::size_t>(config, "window_extra", 1);
      const auto b = get_or<std::size_t>(config, "clusters", 100);
      write_snapshot(config, output);
      BigramStatistics stats = BigramStatistics::from_corpus(ids, vocab.size());
      ClusterHierarchy hierarchy = brown_cluster(stats, b, brown);
      save_clusters(hierarchy, vocab, output);
      break;
    }
    case Method::Onehot:
      throw UsageError("onehot has nothing to pre-train");
  }
  log_epochs(log);
  std::cerr << "wrote " << output << '\n';
  return kExitOk;
}

int cmd_cluster(json& config) {
  config["method"] = "brown";
  return cmd_train_repr(config);
}

int cmd_train_tagger(json& config) {
  const std::string train_path = require_path(config, "train");
  const std::string dev_path = optional_path(config, "dev");
  const std::string model_out = require_path(config, "model_out");
  DataOptions data_opts = resolve_data_options(config);
  const std::string rep_spec =
      get_or<std::string>(config, "representation", "onehot");
  json& tagger_section = config["tagger"].is_object()
                             ? config["tagger"]
                             : (config["tagger"] = json::object());
  const auto seed = get_or<std::uint64_t>(config, "seed", 1);
  const int threads = effective_threads(config);
  TaggerTrainConfig train_config =
      tagger_config_from(tagger_section, seed, threads);
  const FeatureTemplateSet templates =
      FeatureTemplateSet::parse(get_or<std::string>(config, "templates", "all"));
  write_snapshot(config, model_out);

  LabelledDataset train = load_dataset(train_path, data_opts);
  LabelledDataset dev;
  const bool has_dev = !dev_path.empty();
  if (has_dev) dev = load_dataset(dev_path, data_opts);

  WordRepresentation rep =
      resolve_representation(rep_spec, config, train.sentences);
  TrainLog log;
  TaggerModel model =
      train_tagger(train, has_dev ? &dev : nullptr, templates, rep,
                   train_config, &log);
  log_epochs(log);
  save_tagger(model, model_out);
  std::cerr << "wrote " << model_out << '\n';
  return kExitOk;
}

int cmd_evaluate(json& config) {
  const std::string model_path = require_path(config, "model");
  const std::string test_path = require_path(config, "test");
  const std::string ood_path = optional_path(config, "out_of_domain_test");
  const std::string train_path = optional_path(config, "train");
  const std::string report_out = require_path(config, "report_out");
  DataOptions data_opts = resolve_data_options(config);

  TaggerModel model = load_tagger(model_path);
  data_opts.task = model.task_kind;
  config["task"] = task_kind_name(model.task_kind);

  const std::string method = get_or<std::string>(
      config, "method_name",
      model.representation.kind_name() +
          (model.update_representations ? "+up" : ""));
  const std::string rep_name = get_or<std::string>(
      config, "representation_name", model.representation.kind_name());
  write_snapshot(config, report_out);

  LabelledDataset test = load_dataset(test_path, data_opts);

  std::unordered_set<std::string> train_vocab;
  std::string training_size;
  if (!train_path.empty()) {
    LabelledDataset train = load_dataset(train_path, data_opts);
    train_vocab = vocabulary_of(train.sentences);
    training_size = std::to_string(train.sentence_count());
  }

  std::vector<ReportRow> rows, oov_rows;
  append_eval_rows(rows, model, test, method, rep_name, training_size, "in",
                   train_vocab.empty() ? nullptr : &train_vocab, &oov_rows);
  if (!ood_path.empty()) {
    LabelledDataset ood = load_dataset(ood_path, data_opts);
    append_eval_rows(rows, model, ood, method, rep_name, training_size, "out",
                     train_vocab.empty() ? nullptr : &train_vocab, &oov_rows);
  }
  rows.insert(rows.end(), oov_rows.begin(), oov_rows.end());
  write_file(report_out, report_csv(rows));
  std::cerr << "wrote " << report_out << '\n';
  return kExitOk;
}

int cmd_learning_curve(json& config) {
  const std::string train_path = require_path(config, "train");
  const std::string test_path = require_path(config, "test");
  const std::string ood_path = optional_path(config, "out_of_domain_test");
  const std::string report_out = require_path(config, "report_out");
  const std::string oov_out =
      get_path(config, "oov_report_out", report_out + ".oov.csv");
  const std::string ood_out =
      get_path(config, "ood_report_out", report_out + ".ood.csv");
  DataOptions data_opts = resolve_data_options(config);
  const auto parts = get_or<std::size_t>(config, "parts", 10);
  const auto curve_seed = get_or<std::uint64_t>(config, "curve_seed", 7);
  const auto seed = get_or<std::uint64_t>(config, "seed", 1);
  const int threads = effective_threads(config);
  if (!config.contains("representations") || !config["representations"].is_array() ||
      config["representations"].empty())
    throw UsageError("learning-curve needs a 'representations' array");
  json& tagger_section = config["tagger"].is_object()
                             ? config["tagger"]
                             : (config["tagger"] = json::object());
  TaggerTrainConfig base_config = tagger_config_from(tagger_section, seed, threads);
  const FeatureTemplateSet templates =
      FeatureTemplateSet::parse(get_or<std::string>(config, "templates", "all"));
  for (auto& rep_spec : config["representations"]) {
    get_or<std::string>(rep_spec, "name",
                        rep_spec.value("spec", std::string("onehot")));
    get_or(rep_spec, "update_representations", false);
  }
  write_snapshot(config, report_out);

  LabelledDataset train = load_dataset(train_path, data_opts);
  LabelledDataset test = load_dataset(test_path, data_opts);
  LabelledDataset ood;
  const bool has_ood = !ood_path.empty();
  if (has_ood) ood = load_dataset(ood_path, data_opts);

  // Fixed shuffled order; cumulative training sets are prefixes of it.
  std::vector<std::size_t> order(train.sentence_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng curve_rng(curve_seed);
  curve_rng.shuffle(order);
  LearningCurve curve = partition_learning_curve(order.size(), parts);

  std::vector<ReportRow> rows, oov_rows, ood_rows;
  for (const auto& rep_spec : config["representations"]) {
    const std::string spec = rep_spec.value("spec", "onehot");
    const std::string name = rep_spec.value("name", spec);
    const bool update = rep_spec.value("update_representations", false);
    const std::string method = name + (update ? "+up" : "");

    // pre-trained artifacts load once; one-hot inventories depend on the
    // training prefix and are rebuilt per size
    const bool per_prefix = spec == "onehot";
    WordRepresentation shared_rep;
    if (!per_prefix)
      shared_rep = resolve_representation(spec, config, train.sentences);

    for (std::size_t size : curve.cumulative) {
      LabelledDataset prefix;
      prefix.task_kind = train.task_kind;
      for (std::size_t i = 0; i < size; ++i) {
        prefix.sentences.push_back(train.sentences[order[i]]);
        prefix.labels.push_back(train.labels[order[i]]);
      }
      const WordRepresentation& rep =
          per_prefix ? (shared_rep = resolve_representation(spec, config,
                                                            prefix.sentences))
                     : shared_rep;
      TaggerTrainConfig train_config = base_config;
      train_config.update_representations = update;
      TaggerModel model =
          train_tagger(prefix, nullptr, templates, rep, train_config, nullptr);

      auto prefix_vocab = vocabulary_of(prefix.sentences);
      const std::string size_str = std::to_string(size);
      append_eval_rows(rows, model, test, method, spec, size_str, "in",
                       &prefix_vocab, &oov_rows);
      if (has_ood) {
        std::vector<ReportRow> ood_oov;
        append_eval_rows(ood_rows, model, ood, method, spec, size_str, "out",
                         &prefix_vocab, &ood_oov);
        ood_rows.insert(ood_rows.end(), ood_oov.begin(), ood_oov.end());
      }
      std::cerr << "trained " << method << " on " << size << " sentences\n";
    }
  }
  write_file(report_out, report_csv(rows));
  write_file(oov_out, report_csv(oov_rows));
  if (has_ood) write_file(ood_out, report_csv(ood_rows));
  std::cerr << "wrote " << report_out << '\n';
  return kExitOk;
}

int cmd_search(json& config) {
  const std::string train_path = require_path(config, "train");
  const std::string dev_path = require_path(config, "dev");
  const std::string leaderboard_out = require_path(config, "leaderboard_out");
  const std::string best_out = get_path(config, "best_out", leaderboard_out + ".best.json");
  const std::string stage2_out =
      get_path(config, "stage2_leaderboard_out", leaderboard_out + ".stage2.csv");
  DataOptions data_opts = resolve_data_options(config);
  const bool two_stage = get_or(config, "two_stage", false);
  const bool updating = get_or(config, "updating", false);
  const auto seed = get_or<std::uint64_t>(config, "seed", 1);
  const int threads = effective_threads(config);
  if (!config.contains("space") || !config["space"].is_object())
    throw UsageError("search needs a 'space' object");
  // convention: 50 draws for fixed-representation searches, 100 when the
  // representations are updated directly
  if (!config["space"].contains("draws"))
    config["space"]["draws"] = updating ? 100 : 50;
  json& tagger_section = config["tagger"].is_object()
                             ? config["tagger"]
                             : (config["tagger"] = json::object());
  if (updating) tagger_section["update_representations"] = true;
  tagger_config_from(tagger_section, seed, threads);  // materialise defaults
  const std::string default_rep =
      get_or<std::string>(config, "representation", "onehot");
  json stage2_space_json;
  if (two_stage) {
    if (!config.contains("stage2_space") || !config["stage2_space"].is_object()) {
      config["stage2_space"] = {
          {"seed", seed + 1},
          {"dimensions",
           {{"eta_rep", {{"log_uniform", {1e-4, 1.0}}}},
            {"eps_rep", {{"log_uniform", {1e-10, 1e-2}}}}}}};
    }
    stage2_space_json = config["stage2_space"];
  }
  write_snapshot(config, leaderboard_out);

  LabelledDataset train = load_dataset(train_path, data_opts);
  LabelledDataset dev = load_dataset(dev_path, data_opts);

  // One tagger training run per hyperparameter draw, scored on dev.
  auto objective = [&](const ParamSet& params) -> double {
    json section = config["tagger"];
    for (const auto& [key, value] : params.items()) section[key] = value;
    TaggerTrainConfig run_config = tagger_config_from(section, seed, threads);
    std::string rep_spec = section.value("representation", default_rep);
    json scratch = config;  // representation options (prefix lengths etc.)
    WordRepresentation rep =
        resolve_representation(rep_spec, scratch, train.sentences);
    TaggerModel model =
        train_tagger(train, nullptr,
                     FeatureTemplateSet::parse(config.value("templates", "all")),
                     rep, run_config, nullptr);
    return dataset_metric(model, dev);
  };

  SearchSpace space = SearchSpace::from_json(config["space"]);
  SearchResult stage1 = random_search(space, objective, threads);
  write_file(leaderboard_out, leaderboard_csv(stage1));
  std::cerr << "stage 1 best dev score " << stage1.best().score << '\n';

  json best = {{"stage1", {{"params", stage1.best().params},
                           {"score", stage1.best().score}}}};
  if (two_stage) {
    SearchSpace stage2_space = SearchSpace::from_json(stage2_space_json);
    SearchResult stage2 = two_stage_updating_search(stage1.best().params,
                                                    stage2_space, objective,
                                                    threads);
    write_file(stage2_out, leaderboard_csv(stage2));
    best["stage2"] = {{"params", stage2.best().params},
                      {"score", stage2.best().score}};
    std::cerr << "stage 2 best dev score " << stage2.best().score << '\n';
  }
  write_file(best_out, best.dump(2) + "\n");
  std::cerr << "wrote " << leaderboard_out << '\n';
  return kExitOk;
}

const std::vector<std::string>& default_pair_words() {
  static const std::vector<std::string> words = {
      "monday",  "tuesday", "wednesday", "thursday", "friday",  "saturday",
      "sunday",  "france",  "germany",   "italy",    "spain",   "portugal",
      "england", "ireland", "scotland",  "poland",   "austria", "belgium",
      "denmark", "sweden",  "norway",    "finland",  "greece",  "turkey",
      "russia",  "china",   "japan",     "india",    "brazil",  "canada"};
  return words;
}

int cmd_export_pairs(json& config) {
  const std::string before_path = require_path(config, "before");
  const std::string after_path = require_path(config, "after");
  const std::string output = require_path(config, "output");
  const std::string mode = get_or<std::string>(config, "mode", "mixed");
  const auto count = get_or<std::size_t>(config, "count", 60);
  const auto seed = get_or<std::uint64_t>(config, "seed", 13);
  const std::string vocab_path = optional_path(config, "vocab");
  std::vector<std::string> requested =
      get_or<std::vector<std::string>>(config, "words", {});
  write_snapshot(config, output);

  EmbeddingMatrix before = load_embeddings(before_path);
  EmbeddingMatrix after = load_embeddings(after_path);
  if (before.dim != after.dim)
    throw DomainError("embedding dimensions differ between before and after");

  auto shared = [&](const std::string& word) {
    return before.vocab.contains(word) && after.vocab.contains(word);
  };
  std::vector<std::string> shared_words;
  for (const auto& word : before.vocab.words)
    if (word != Vocabulary::kUnknownToken && after.vocab.contains(word))
      shared_words.push_back(word);

  std::vector<std::string> selected, skipped;
  std::unordered_set<std::string> chosen;
  auto pick = [&](const std::string& word) {
    if (!shared(word)) {
      skipped.push_back(word);
      return;
    }
    if (chosen.insert(word).second) selected.push_back(word);
  };

  if (mode == "list") {
    if (requested.empty()) requested = default_pair_words();
    for (const auto& word : requested) pick(word);
  } else if (mode == "top") {
    std::vector<std::pair<long long, std::string>> ranked;
    if (!vocab_path.empty()) {
      Vocabulary vocab = load_vocabulary(vocab_path);
      for (std::size_t i = 0; i < vocab.size(); ++i)
        if (shared(vocab.words[i])) ranked.emplace_back(vocab.counts[i], vocab.words[i]);
    } else {
      for (const auto& word : shared_words)
        ranked.emplace_back(
            before.vocab.counts[static_cast<std::size_t>(
                before.vocab.index.at(word))],
            word);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (const auto& [n, word] : ranked) {
      if (selected.size() >= count) break;
      pick(word);
    }
  } else if (mode == "random" || mode == "mixed") {
    if (mode == "mixed") {
      if (requested.empty()) requested = default_pair_words();
      for (const auto& word : requested) {
        if (selected.size() >= count / 2) break;
        pick(word);
      }
    }
    std::vector<std::string> pool = shared_words;
    Rng rng(seed);
    rng.shuffle(pool);
    for (const auto& word : pool) {
      if (selected.size() >= count) break;
      if (chosen.count(word) == 0) pick(word);
    }
  } else {
    throw UsageError("unknown selection mode: " + mode);
  }

  std::ofstream out = open_output(output);
  out << "pairs " << selected.size() << ' ' << before.dim << '\n';
  for (const auto& word : selected) {
    auto b = before.row(before.vocab.index.at(word));
    auto a = after.row(after.vocab.index.at(word));
    double sq = 0.0;
    out << word;
    for (double v : b) out << ' ' << format_double(v);
    for (double v : a) out << ' ' << format_double(v);
    for (std::size_t k = 0; k < before.dim; ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
    out << ' ' << format_double(std::sqrt(sq)) << '\n';
  }
  out << "skipped " << skipped.size() << '\n';
  for (const auto& word : skipped) out << word << '\n';
  std::cerr << "wrote " << output << " (" << selected.size() << " pairs)\n";
  return kExitOk;
}

}  // namespace

int run_command(json config) {
  const std::string command = require_string(config, "command");
  if (command == "preprocess") return cmd_preprocess(config);
  if (command == "train-repr") return cmd_train_repr(config);
  if (command == "cluster") return cmd_cluster(config);
  if (command == "train-tagger") return cmd_train_tagger(config);
  if (command == "evaluate") return cmd_evaluate(config);
  if (command == "learning-curve") return cmd_learning_curve(config);
  if (command == "search") return cmd_search(config);
  if (command == "export-pairs") return cmd_export_pairs(config);
  throw UsageError("unknown command: " + command);
}

}  // namespace wordrep::cli
