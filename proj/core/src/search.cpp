#include "wordrep/search.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_set>

#include "wordrep/errors.hpp"
#include "wordrep/io_util.hpp"
#include "wordrep/rng.hpp"

namespace wordrep {

SearchDimension SearchDimension::choice(std::string name,
                                        std::vector<nlohmann::json> values) {
  if (values.empty()) throw DomainError("choice dimension needs values: " + name);
  SearchDimension d;
  d.name = std::move(name);
  d.kind = Kind::Choice;
  d.choices = std::move(values);
  return d;
}

SearchDimension SearchDimension::uniform(std::string name, double lo, double hi) {
  if (!(lo < hi)) throw DomainError("uniform dimension needs lo < hi: " + name);
  SearchDimension d;
  d.name = std::move(name);
  d.kind = Kind::Uniform;
  d.lo = lo;
  d.hi = hi;
  return d;
}

SearchDimension SearchDimension::log_uniform(std::string name, double lo,
                                             double hi) {
  if (!(0.0 < lo && lo < hi))
    throw DomainError("log_uniform dimension needs 0 < lo < hi: " + name);
  SearchDimension d;
  d.name = std::move(name);
  d.kind = Kind::LogUniform;
  d.lo = lo;
  d.hi = hi;
  return d;
}

SearchDimension SearchDimension::int_range(std::string name, long long lo,
                                           long long hi) {
  if (lo > hi) throw DomainError("int_range dimension needs lo <= hi: " + name);
  SearchDimension d;
  d.name = std::move(name);
  d.kind = Kind::IntRange;
  d.lo = static_cast<double>(lo);
  d.hi = static_cast<double>(hi);
  return d;
}

SearchDimension SearchDimension::from_json(const std::string& name,
                                           const nlohmann::json& spec) {
  if (!spec.is_object() || spec.size() != 1)
    throw ParseError("dimension '" + name + "' needs exactly one kind key");
  const auto& [kind, args] = *spec.items().begin();
  if (kind == "choice")
    return choice(name, std::vector<nlohmann::json>(args.begin(), args.end()));
  auto pair = [&]() -> std::pair<double, double> {
    if (!args.is_array() || args.size() != 2)
      throw ParseError("dimension '" + name + "' needs [lo, hi]");
    return {args[0].get<double>(), args[1].get<double>()};
  };
  if (kind == "uniform") {
    auto [lo, hi] = pair();
    return uniform(name, lo, hi);
  }
  if (kind == "log_uniform") {
    auto [lo, hi] = pair();
    return log_uniform(name, lo, hi);
  }
  if (kind == "int_range") {
    auto [lo, hi] = pair();
    return int_range(name, static_cast<long long>(lo), static_cast<long long>(hi));
  }
  throw ParseError("dimension '" + name + "' has unknown kind '" + kind + "'");
}

SearchSpace SearchSpace::from_json(const nlohmann::json& spec) {
  SearchSpace space;
  if (spec.contains("draws")) space.draws = spec.at("draws").get<std::size_t>();
  if (spec.contains("seed")) space.seed = spec.at("seed").get<std::uint64_t>();
  if (!spec.contains("dimensions") || !spec.at("dimensions").is_object())
    throw ParseError("search space needs a 'dimensions' object");
  for (const auto& [name, dim_spec] : spec.at("dimensions").items())
    space.dimensions.push_back(SearchDimension::from_json(name, dim_spec));
  // nlohmann objects iterate alphabetically, so this order is reproducible.
  return space;
}

namespace {

nlohmann::json sample_dimension(const SearchDimension& dim, Rng& rng) {
  switch (dim.kind) {
    case SearchDimension::Kind::Choice:
      return dim.choices[rng.uniform_index(dim.choices.size())];
    case SearchDimension::Kind::Uniform:
      return rng.uniform(dim.lo, dim.hi);
    case SearchDimension::Kind::LogUniform:
      return std::exp(rng.uniform(std::log(dim.lo), std::log(dim.hi)));
    case SearchDimension::Kind::IntRange: {
      const auto span = static_cast<std::size_t>(dim.hi - dim.lo) + 1;
      return static_cast<long long>(dim.lo) +
             static_cast<long long>(rng.uniform_index(span));
    }
  }
  throw DomainError("unreachable dimension kind");
}

}  // namespace

std::vector<ParamSet> draw_param_sets(const SearchSpace& space) {
  if (space.draws == 0) throw DomainError("search needs at least one draw");
  if (space.dimensions.empty()) throw DomainError("search space has no dimensions");

  Rng rng(space.seed);
  std::vector<ParamSet> draws;
  std::unordered_set<std::string> seen;
  const std::size_t max_attempts = space.draws * 1000;
  std::size_t attempts = 0;
  while (draws.size() < space.draws) {
    if (++attempts > max_attempts)
      throw ProtocolError("search space too small for " +
                          std::to_string(space.draws) + " distinct draws");
    ParamSet params = nlohmann::json::object();
    for (const auto& dim : space.dimensions)
      params[dim.name] = sample_dimension(dim, rng);
    if (seen.insert(params.dump()).second) draws.push_back(std::move(params));
  }
  return draws;
}

namespace {

SearchResult evaluate_draws(std::vector<ParamSet> draws,
                            const std::function<double(const ParamSet&)>& objective,
                            int threads) {
  std::vector<double> scores(draws.size(), 0.0);
  const std::size_t n_threads = std::max(1, threads);
  if (n_threads <= 1 || draws.size() < 2) {
    for (std::size_t i = 0; i < draws.size(); ++i) scores[i] = objective(draws[i]);
  } else {
    std::vector<std::exception_ptr> errors(n_threads);
    std::vector<std::thread> workers;
    for (std::size_t ti = 0; ti < std::min(n_threads, draws.size()); ++ti)
      workers.emplace_back([&, ti] {
        try {
          for (std::size_t i = ti; i < draws.size(); i += n_threads)
            scores[i] = objective(draws[i]);
        } catch (...) {
          errors[ti] = std::current_exception();
        }
      });
    for (auto& w : workers) w.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SearchResult result;
  result.leaderboard.reserve(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i)
    result.leaderboard.push_back({std::move(draws[i]), scores[i], i});
  std::stable_sort(result.leaderboard.begin(), result.leaderboard.end(),
                   [](const SearchRun& a, const SearchRun& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.draw_index < b.draw_index;
                   });
  return result;
}

}  // namespace

SearchResult random_search(const SearchSpace& space,
                           const std::function<double(const ParamSet&)>& objective,
                           int threads) {
  return evaluate_draws(draw_param_sets(space), objective, threads);
}

SearchResult two_stage_updating_search(
    const ParamSet& best_fixed, SearchSpace adagrad_space,
    const std::function<double(const ParamSet&)>& objective, int threads) {
  if (best_fixed.is_null() || !best_fixed.is_object())
    throw ProtocolError("two-stage search requires a stage-one result");
  adagrad_space.draws = kUpdatingStageDraws;
  std::vector<ParamSet> draws = draw_param_sets(adagrad_space);
  for (auto& draw : draws) {
    ParamSet merged = best_fixed;
    for (const auto& [key, value] : draw.items()) merged[key] = value;
    merged["update_representations"] = true;
    draw = std::move(merged);
  }
  return evaluate_draws(std::move(draws), objective, threads);
}

std::string leaderboard_csv(const SearchResult& result) {
  std::string out = "rank,draw,score,params\r\n";
  for (std::size_t rank = 0; rank < result.leaderboard.size(); ++rank) {
    const SearchRun& run = result.leaderboard[rank];
    out += std::to_string(rank + 1) + "," + std::to_string(run.draw_index) + "," +
           format_double(run.score) + "," + csv_field(run.params.dump()) + "\r\n";
  }
  return out;
}

}  // namespace wordrep
