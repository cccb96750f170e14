#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "wordrep/errors.hpp"
#include "wordrep/io_util.hpp"

namespace {

using nlohmann::json;

// Flag values collected as overrides; dotted keys address nested objects.
struct PendingCommand {
  std::string name;
  std::string config_path;
  json overrides = json::object();
};

void apply_override(json& config, const std::string& dotted_key,
                    const json& value) {
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string key = dotted_key.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!(*node)[key].is_object()) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

void add_string(CLI::App* cmd, PendingCommand* pending, const std::string& flag,
                const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [pending, key](const std::string& v) { pending->overrides[key] = v; },
      help);
}

void add_number(CLI::App* cmd, PendingCommand* pending, const std::string& flag,
                const std::string& key, const std::string& help) {
  cmd->add_option_function<double>(
      flag, [pending, key](double v) { apply_override(pending->overrides, key, v); },
      help);
}

void add_integer(CLI::App* cmd, PendingCommand* pending, const std::string& flag,
                 const std::string& key, const std::string& help) {
  cmd->add_option_function<long long>(
      flag,
      [pending, key](long long v) { apply_override(pending->overrides, key, v); },
      help);
}

void add_toggle(CLI::App* cmd, PendingCommand* pending, const std::string& flag,
                const std::string& key, const std::string& help) {
  cmd->add_flag_callback(
      flag, [pending, key] { apply_override(pending->overrides, key, true); },
      help);
  cmd->add_flag_callback(
      "--no-" + flag.substr(2),
      [pending, key] { apply_override(pending->overrides, key, false); },
      "disable " + flag.substr(2));
}

void add_common(CLI::App* cmd, PendingCommand* pending) {
  cmd->add_option("--config", pending->config_path,
                  "JSON config (flags override file values)");
  add_string(cmd, pending, "--snapshot", "snapshot",
             "where to write the resolved-config snapshot");
  add_integer(cmd, pending, "--seed", "seed", "random seed");
  add_integer(cmd, pending, "--threads", "threads", "worker threads");
  add_toggle(cmd, pending, "--deterministic", "deterministic",
             "force single-threaded numerics (default on)");
}

void add_data_flags(CLI::App* cmd, PendingCommand* pending) {
  add_integer(cmd, pending, "--token-column", "token_column", "token column index");
  add_integer(cmd, pending, "--label-column", "label_column", "label column index");
  add_string(cmd, pending, "--task", "task",
             "token-classification or span-iob");
  add_toggle(cmd, pending, "--normalize-digits", "normalize_digits",
             "apply digit normalization to tokens");
  add_toggle(cmd, pending, "--repair-iob", "repair_iob",
             "repair orphan I- tags on load");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wordrep: train word representations, tag sequences, run "
               "evaluation protocols"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<PendingCommand>> pendings;
  std::map<const CLI::App*, PendingCommand*> by_app;

  auto make = [&](const std::string& name, const std::string& help) {
    CLI::App* cmd = app.add_subcommand(name, help);
    pendings.push_back(std::make_unique<PendingCommand>());
    pendings.back()->name = name;
    by_app[cmd] = pendings.back().get();
    add_common(cmd, pendings.back().get());
    return std::pair<CLI::App*, PendingCommand*>(cmd, pendings.back().get());
  };

  {
    auto [cmd, p] = make("preprocess", "normalize a corpus and build its vocabulary");
    add_string(cmd, p, "--input", "input", "raw corpus, one sentence per line");
    add_string(cmd, p, "--output-corpus", "output_corpus", "normalized corpus path");
    add_string(cmd, p, "--output-vocab", "output_vocab", "vocabulary file path");
    add_toggle(cmd, p, "--normalize-digits", "normalize_digits",
               "replace digit runs with NUM<len> (default on)");
    add_integer(cmd, p, "--min-count", "min_count", "vocabulary frequency cutoff");
  }
  {
    auto [cmd, p] = make("train-repr",
                         "train cbow/skipgram/glove/cw embeddings or brown clusters");
    add_string(cmd, p, "--method", "method", "cbow|skipgram|glove|cw|brown");
    add_string(cmd, p, "--corpus", "corpus", "training corpus");
    add_string(cmd, p, "--output", "output", "embedding or cluster file");
    add_integer(cmd, p, "--dim", "dim", "embedding dimension d");
    add_integer(cmd, p, "--window", "window", "context window m");
    add_integer(cmd, p, "--negatives", "negatives", "noise draws K (0 = exact softmax)");
    add_integer(cmd, p, "--epochs", "epochs", "training epochs");
    add_number(cmd, p, "--eta0", "eta0", "initial learning rate (sgd trainers)");
    add_number(cmd, p, "--eta", "eta", "adagrad learning rate (glove)");
    add_number(cmd, p, "--noise-power", "noise_power", "unigram exponent for noise");
    add_number(cmd, p, "--subsample", "subsample", "frequent-word subsample threshold");
    add_integer(cmd, p, "--hidden", "hidden", "hidden layer size (cw)");
    add_integer(cmd, p, "--clusters", "clusters", "cluster count b (brown)");
    add_string(cmd, p, "--strategy", "strategy", "brown merge strategy auto|exact|window");
    add_integer(cmd, p, "--window-extra", "window_extra", "extra active clusters (brown window strategy)");
    add_number(cmd, p, "--x-max", "x_max", "glove weighting threshold");
    add_number(cmd, p, "--alpha", "alpha", "glove weighting exponent");
    add_toggle(cmd, p, "--symmetric", "symmetric", "symmetric co-occurrence window");
    add_toggle(cmd, p, "--distance-weighting", "distance_weighting",
               "weight co-occurrences by 1/distance");
    add_string(cmd, p, "--cooccurrences-out", "cooccurrences_out",
               "also dump the co-occurrence table");
    add_string(cmd, p, "--checkpoint-out", "checkpoint_out", "cw network checkpoint");
    add_integer(cmd, p, "--min-count", "min_count", "vocabulary frequency cutoff");
    add_toggle(cmd, p, "--normalize-digits", "normalize_digits",
               "normalize digits while reading the corpus");
  }
  {
    auto [cmd, p] = make("cluster", "run brown clustering (train-repr shorthand)");
    add_string(cmd, p, "--corpus", "corpus", "training corpus");
    add_string(cmd, p, "--output", "output", "cluster file");
    add_integer(cmd, p, "--clusters", "clusters", "cluster count b");
    add_string(cmd, p, "--strategy", "strategy", "auto|exact|window");
    add_integer(cmd, p, "--window-extra", "window_extra", "extra active clusters");
    add_integer(cmd, p, "--min-count", "min_count", "vocabulary frequency cutoff");
    add_toggle(cmd, p, "--normalize-digits", "normalize_digits",
               "normalize digits while reading the corpus");
  }
  {
    auto [cmd, p] = make("train-tagger", "train the linear-chain tagger");
    add_string(cmd, p, "--train", "train", "training data (CoNLL columns)");
    add_string(cmd, p, "--dev", "dev", "development data");
    add_string(cmd, p, "--model-out", "model_out", "model checkpoint path");
    add_data_flags(cmd, p);
    add_string(cmd, p, "--representation", "representation",
               "onehot | brown:<path> | embedding:<path>");
    add_string(cmd, p, "--templates", "templates",
               "all | none | comma list of word,lower,prefix,suffix,shape,digit,hyphen");
    cmd->add_flag_callback(
        "--update-reps",
        [p] { apply_override(p->overrides, "tagger.update_representations", true); },
        "update the word representations during training");
    add_toggle(cmd, p, "--constrained", "tagger.constrained_decoding",
               "mask invalid IOB transitions when decoding");
    add_integer(cmd, p, "--epochs", "tagger.epochs", "training epochs");
    add_number(cmd, p, "--eta", "tagger.eta", "adagrad learning rate");
    add_number(cmd, p, "--eps", "tagger.eps", "adagrad stabiliser");
    add_number(cmd, p, "--eta-rep", "tagger.eta_rep", "representation-layer learning rate");
    add_number(cmd, p, "--eps-rep", "tagger.eps_rep", "representation-layer stabiliser");
    add_number(cmd, p, "--l2", "tagger.l2", "L2 strength");
    add_integer(cmd, p, "--batch-size", "tagger.batch_size", "sentences per update");
    add_integer(cmd, p, "--onehot-min-count", "onehot_min_count",
                "one-hot vocabulary cutoff");
    add_toggle(cmd, p, "--normalize-embeddings", "normalize_embeddings",
               "L2-normalize embedding rows after loading");
  }
  {
    auto [cmd, p] = make("evaluate", "evaluate a saved tagger");
    add_string(cmd, p, "--model", "model", "tagger checkpoint");
    add_string(cmd, p, "--test", "test", "in-domain test data");
    add_string(cmd, p, "--out-of-domain-test", "out_of_domain_test",
               "out-of-domain test data");
    add_string(cmd, p, "--train", "train", "training data (for OOV accuracy)");
    add_string(cmd, p, "--report-out", "report_out", "CSV report path");
    add_data_flags(cmd, p);
    add_string(cmd, p, "--method-name", "method_name", "method column value");
    add_string(cmd, p, "--representation-name", "representation_name",
               "representation column value");
  }
  {
    auto [cmd, p] = make("learning-curve",
                         "train over doubling training-set prefixes and report");
    add_string(cmd, p, "--train", "train", "training data");
    add_string(cmd, p, "--test", "test", "in-domain test data");
    add_string(cmd, p, "--out-of-domain-test", "out_of_domain_test",
               "out-of-domain test data");
    add_string(cmd, p, "--report-out", "report_out", "CSV report path");
    add_data_flags(cmd, p);
    add_integer(cmd, p, "--parts", "parts", "number of doubling partitions");
    add_integer(cmd, p, "--curve-seed", "curve_seed", "shuffle seed for prefixes");
    add_string(cmd, p, "--templates", "templates", "feature template mask");
  }
  {
    auto [cmd, p] = make("search", "seeded random hyperparameter search");
    add_string(cmd, p, "--train", "train", "training data");
    add_string(cmd, p, "--dev", "dev", "development data (selection objective)");
    add_string(cmd, p, "--leaderboard-out", "leaderboard_out", "CSV leaderboard path");
    add_string(cmd, p, "--best-out", "best_out", "best-config JSON path");
    add_data_flags(cmd, p);
    add_toggle(cmd, p, "--two-stage", "two_stage",
               "after the fixed search, tune the representation-layer "
               "optimiser over 32 updating runs");
    add_toggle(cmd, p, "--updating", "updating",
               "search updating models directly (100 draws by default)");
    add_string(cmd, p, "--representation", "representation",
               "default representation spec");
    add_string(cmd, p, "--templates", "templates", "feature template mask");
  }
  {
    auto [cmd, p] = make("export-pairs",
                         "export before/after embedding pairs for plotting");
    add_string(cmd, p, "--before", "before", "embeddings before updating");
    add_string(cmd, p, "--after", "after", "embeddings after updating");
    add_string(cmd, p, "--output", "output", "pair file path");
    add_string(cmd, p, "--mode", "mode", "list | top | random | mixed");
    add_integer(cmd, p, "--count", "count", "number of words to export");
    add_string(cmd, p, "--vocab", "vocab", "vocabulary file (for top mode)");
    cmd->add_option_function<std::vector<std::string>>(
        "--words",
        [p](const std::vector<std::string>& words) { p->overrides["words"] = words; },
        "explicit word list");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wordrep::cli::kExitUsage;
  }

  PendingCommand* pending = by_app.at(app.get_subcommands().front());
  try {
    json config = json::object();
    if (!pending->config_path.empty()) {
      const std::string text =
          wordrep::read_file(wordrep::cli::expand_env(pending->config_path));
      config = json::parse(text);
      if (!config.is_object())
        throw wordrep::ParseError("config file must hold a JSON object");
    }
    for (const auto& [key, value] : pending->overrides.items()) {
      if (value.is_object() && config.contains(key) && config[key].is_object()) {
        for (const auto& [k2, v2] : value.items()) config[key][k2] = v2;
      } else {
        config[key] = value;
      }
    }
    config["command"] = pending->name;
    return wordrep::cli::run_command(std::move(config));
  } catch (const wordrep::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return wordrep::cli::kExitUsage;
  } catch (const wordrep::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return wordrep::cli::kExitParse;
  } catch (const wordrep::EmptyInputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return wordrep::cli::kExitParse;
  } catch (const wordrep::DomainError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return wordrep::cli::kExitParse;
  } catch (const wordrep::ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << '\n';
    return wordrep::cli::kExitProtocol;
  } catch (const wordrep::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return wordrep::cli::kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return wordrep::cli::kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return wordrep::cli::kExitInternal;
  }
}
