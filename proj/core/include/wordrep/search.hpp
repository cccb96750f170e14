#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wordrep {

// A named hyperparameter set, serialised with sorted keys.
using ParamSet = nlohmann::json;

struct SearchDimension {
  enum class Kind { Choice, Uniform, LogUniform, IntRange };

  std::string name;
  Kind kind = Kind::Choice;
  std::vector<nlohmann::json> choices;  // Choice
  double lo = 0.0, hi = 0.0;            // ranges

  static SearchDimension choice(std::string name,
                                std::vector<nlohmann::json> values);
  static SearchDimension uniform(std::string name, double lo, double hi);
  static SearchDimension log_uniform(std::string name, double lo, double hi);
  static SearchDimension int_range(std::string name, long long lo, long long hi);

  // {"choice": [...]} | {"uniform": [lo,hi]} | {"log_uniform": [lo,hi]} |
  // {"int_range": [lo,hi]}
  static SearchDimension from_json(const std::string& name,
                                   const nlohmann::json& spec);
};

struct SearchSpace {
  std::vector<SearchDimension> dimensions;
  std::size_t draws = 50;
  std::uint64_t seed = 0;

  // {"draws": 50, "seed": 1, "dimensions": {"eta": {...}, ...}}
  static SearchSpace from_json(const nlohmann::json& spec);
};

// Distinct draws in seed order. Throws ProtocolError when the space cannot
// supply enough distinct tuples.
std::vector<ParamSet> draw_param_sets(const SearchSpace& space);

struct SearchRun {
  ParamSet params;
  double score = 0.0;
  std::size_t draw_index = 0;
};

struct SearchResult {
  std::vector<SearchRun> leaderboard;  // score desc, then draw order
  const SearchRun& best() const { return leaderboard.front(); }
};

// Evaluates the objective (higher is better) on every draw. Draws are
// independent, so threads > 1 runs them concurrently without changing the
// result.
SearchResult random_search(const SearchSpace& space,
                           const std::function<double(const ParamSet&)>& objective,
                           int threads = 1);

// Stage two of the updating protocol: holds every stage-one hyperparameter
// fixed and tunes only the representation-layer optimiser pair over exactly
// 32 draws. Each candidate is best_fixed overlaid with the draw plus
// update_representations=true. Throws ProtocolError without a stage-one
// result.
SearchResult two_stage_updating_search(
    const ParamSet& best_fixed, SearchSpace adagrad_space,
    const std::function<double(const ParamSet&)>& objective, int threads = 1);

inline constexpr std::size_t kUpdatingStageDraws = 32;

std::string leaderboard_csv(const SearchResult& result);

}  // namespace wordrep
