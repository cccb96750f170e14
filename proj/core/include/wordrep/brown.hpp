#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordrep/corpus.hpp"

namespace wordrep {

// Unigram and within-sentence bigram counts over word ids.
struct BigramStatistics {
  std::vector<long long> unigram;
  std::unordered_map<std::uint64_t, long long> bigram;
  long long total_tokens = 0;
  long long sentence_count = 0;

  static std::uint64_t key(WordId a, WordId b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }
  long long bigram_count(WordId a, WordId b) const {
    auto it = bigram.find(key(a, b));
    return it == bigram.end() ? 0 : it->second;
  }

  static BigramStatistics from_corpus(
      const std::vector<std::vector<WordId>>& corpus, std::size_t vocab_size);
};

// Log-likelihood of the corpus under a class bigram model with ML emission
// and transition estimates: every token contributes log p(w | class), every
// within-sentence adjacent pair contributes log p(class' | class).
// assignment maps word id -> class id; observed words must be assigned
// (unobserved entries may be -1).
double class_bigram_likelihood(const BigramStatistics& stats,
                               std::span<const int> assignment);

// Average mutual information between adjacent class occurrences,
// sum_{c,c'} p(c,c') log(p(c,c') / (p(c,.) p(.,c'))), in nats.
double ami_of_assignment(const BigramStatistics& stats,
                         std::span<const int> assignment);

enum class MergeStrategy { Auto, Exact, WindowLimited };

struct BrownConfig {
  MergeStrategy strategy = MergeStrategy::Auto;
  std::size_t exact_limit = 2000;  // Auto picks Exact up to this vocab size
  std::size_t window_extra = 1;    // WindowLimited active set = b + extra
};

struct MergeRecord {
  int left;         // surviving cluster id (the smaller)
  int right;        // absorbed cluster id
  double ami_loss;  // AMI before - AMI after
  bool above_cut;   // merge performed after reaching b clusters
};

// Merge tree with per-word bit strings. Paths address the b cut clusters:
// words sharing a cluster share the path, and no cluster path is a prefix of
// another (they are leaves of the binary tree built above the cut).
struct ClusterHierarchy {
  std::size_t cluster_count = 0;     // b
  std::vector<int> assignment;       // word id -> 0..b-1, -1 for unobserved
  std::vector<std::string> paths;    // word id -> bit string, "" unobserved
  std::vector<MergeRecord> merges;   // in the order performed
};

// Greedy agglomerative clustering: repeatedly merges the pair of clusters
// whose merge loses the least AMI (ties broken by the lowest cluster-id
// pair), cuts at b clusters, then keeps merging to a single root to produce
// the bit strings. Cluster ids are the smallest word id a cluster contains.
ClusterHierarchy brown_cluster(const BigramStatistics& stats, std::size_t b,
                               const BrownConfig& config = {});

inline constexpr std::array<std::size_t, 4> kDefaultPrefixLengths{4, 6, 10, 20};

// Prefix features "p<L>=<bits>", one per requested length, truncated to the
// path length.
std::vector<std::string> cluster_prefix_features(
    std::string_view path, std::span<const std::size_t> prefix_lengths);

// Cluster file: "bitstring<TAB>word<TAB>frequency", observed words only.
void save_clusters(const ClusterHierarchy& hierarchy, const Vocabulary& vocab,
                   const std::string& path);

struct BrownClusterMap {
  std::unordered_map<std::string, std::string> path_of;
};
BrownClusterMap load_clusters(const std::string& path);

}  // namespace wordrep
