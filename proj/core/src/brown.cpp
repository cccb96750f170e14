#include "wordrep/brown.hpp"

#include <algorithm>
#include <cmath>

#include "wordrep/io_util.hpp"

namespace wordrep {

BigramStatistics BigramStatistics::from_corpus(
    const std::vector<std::vector<WordId>>& corpus, std::size_t vocab_size) {
  BigramStatistics stats;
  stats.unigram.assign(vocab_size, 0);
  for (const auto& sentence : corpus) {
    if (sentence.empty()) continue;
    ++stats.sentence_count;
    for (std::size_t t = 0; t < sentence.size(); ++t) {
      ++stats.unigram[static_cast<std::size_t>(sentence[t])];
      ++stats.total_tokens;
      if (t > 0) ++stats.bigram[key(sentence[t - 1], sentence[t])];
    }
  }
  return stats;
}

namespace {

int class_count(std::span<const int> assignment) {
  int max_class = -1;
  for (int c : assignment) max_class = std::max(max_class, c);
  return max_class + 1;
}

void require_observed_assigned(const BigramStatistics& stats,
                               std::span<const int> assignment) {
  if (assignment.size() < stats.unigram.size())
    throw DomainError("assignment shorter than the vocabulary");
  for (std::size_t w = 0; w < stats.unigram.size(); ++w)
    if (stats.unigram[w] > 0 && assignment[w] < 0)
      throw DomainError("observed word " + std::to_string(w) + " unassigned");
}

}  // namespace

double class_bigram_likelihood(const BigramStatistics& stats,
                               std::span<const int> assignment) {
  require_observed_assigned(stats, assignment);
  const int k = class_count(assignment);

  std::vector<long long> class_mass(k, 0);  // unigram mass per class
  for (std::size_t w = 0; w < stats.unigram.size(); ++w)
    if (stats.unigram[w] > 0) class_mass[assignment[w]] += stats.unigram[w];

  std::unordered_map<std::uint64_t, long long> class_bigram;
  std::vector<long long> class_left(k, 0);  // bigram events starting in class
  for (const auto& [key, count] : stats.bigram) {
    const int ca = assignment[static_cast<std::size_t>(key >> 32)];
    const int cb = assignment[static_cast<std::size_t>(key & 0xffffffffu)];
    class_bigram[BigramStatistics::key(ca, cb)] += count;
    class_left[ca] += count;
  }

  double ll = 0.0;
  for (std::size_t w = 0; w < stats.unigram.size(); ++w) {
    const long long n = stats.unigram[w];
    if (n > 0)
      ll += static_cast<double>(n) *
            std::log(static_cast<double>(n) /
                     static_cast<double>(class_mass[assignment[w]]));
  }
  for (const auto& [key, count] : class_bigram) {
    const int ca = static_cast<int>(key >> 32);
    ll += static_cast<double>(count) *
          std::log(static_cast<double>(count) /
                   static_cast<double>(class_left[ca]));
  }
  return ll;
}

double ami_of_assignment(const BigramStatistics& stats,
                         std::span<const int> assignment) {
  require_observed_assigned(stats, assignment);
  const int k = class_count(assignment);

  std::unordered_map<std::uint64_t, long long> class_bigram;
  std::vector<long long> left(k, 0), right(k, 0);
  long long total = 0;
  for (const auto& [key, count] : stats.bigram) {
    const int ca = assignment[static_cast<std::size_t>(key >> 32)];
    const int cb = assignment[static_cast<std::size_t>(key & 0xffffffffu)];
    class_bigram[BigramStatistics::key(ca, cb)] += count;
    left[ca] += count;
    right[cb] += count;
    total += count;
  }
  if (total == 0) return 0.0;

  const double t = static_cast<double>(total);
  double ami = 0.0;
  for (const auto& [key, count] : class_bigram) {
    const int ca = static_cast<int>(key >> 32);
    const int cb = static_cast<int>(key & 0xffffffffu);
    const double p = static_cast<double>(count) / t;
    ami += p * std::log(p * t * t /
                        (static_cast<double>(left[ca]) *
                         static_cast<double>(right[cb])));
  }
  return ami;
}

namespace {

// ln over non-negative integers with a memo for the common small range.
class LogTable {
 public:
  LogTable() : memo_(1 << 16, 0.0) {
    for (std::size_t i = 1; i < memo_.size(); ++i)
      memo_[i] = std::log(static_cast<double>(i));
  }
  double operator()(long long v) const {
    return v < static_cast<long long>(memo_.size())
               ? memo_[static_cast<std::size_t>(v)]
               : std::log(static_cast<double>(v));
  }

 private:
  std::vector<double> memo_;
};

// Greedy merger over an active set of clusters. Keeps a dense class-bigram
// count matrix and a pairwise merge-loss table. A merge only perturbs loss
// terms that touch the merged clusters, so surviving pairs get an O(1)
// correction; pairs involving the merged cluster are recomputed fresh.
class GreedyClusterer {
 public:
  GreedyClusterer(const BigramStatistics& stats, std::size_t capacity)
      : stats_(stats),
        cap_(capacity),
        counts_(capacity * capacity, 0),
        left_(capacity, 0),
        right_(capacity, 0),
        loss_(capacity * capacity, 0.0),
        cluster_id_(capacity, -1) {
    long long t2 = 0;
    for (const auto& [k, c] : stats.bigram) t2 += c;
    t2_ = static_cast<double>(t2);
    log_t2_ = t2 > 0 ? std::log(t2_) : 0.0;

    // Sorted word adjacency so insertions are deterministic.
    adj_out_.resize(stats.unigram.size());
    adj_in_.resize(stats.unigram.size());
    for (const auto& [key, count] : stats.bigram) {
      const auto a = static_cast<std::size_t>(key >> 32);
      const auto b = static_cast<std::size_t>(key & 0xffffffffu);
      adj_out_[a].emplace_back(static_cast<WordId>(b), count);
      adj_in_[b].emplace_back(static_cast<WordId>(a), count);
    }
    for (auto& v : adj_out_) std::sort(v.begin(), v.end());
    for (auto& v : adj_in_) std::sort(v.begin(), v.end());
    word_slot_.assign(stats.unigram.size(), -1);
  }

  std::size_t active_count() const { return active_.size(); }

  // Adds word w as a singleton cluster; counts only pairs whose other
  // endpoint is already active, so each word pair is counted exactly once.
  void insert_word(WordId w) {
    int slot = take_slot();
    cluster_id_[slot] = w;
    members_[slot] = {w};
    word_slot_[static_cast<std::size_t>(w)] = slot;

    std::vector<int> touched;  // slots whose marginals change
    auto credit = [&](int from_slot, int to_slot, long long count) {
      counts_[idx(from_slot, to_slot)] += count;
      left_[from_slot] += count;
      right_[to_slot] += count;
    };
    for (const auto& [v, count] : adj_out_[static_cast<std::size_t>(w)]) {
      int vs = word_slot_[static_cast<std::size_t>(v)];
      if (vs < 0) continue;
      credit(slot, vs, count);
      if (vs != slot) touched.push_back(vs);
    }
    for (const auto& [v, count] : adj_in_[static_cast<std::size_t>(w)]) {
      if (v == w) continue;  // self bigrams already credited above
      int vs = word_slot_[static_cast<std::size_t>(v)];
      if (vs < 0) continue;
      credit(vs, slot, count);
      if (vs != slot) touched.push_back(vs);
    }
    active_.push_back(slot);
    std::sort(active_.begin(), active_.end());

    // Pairs not touching the new counts keep their loss exactly: the new
    // cluster contributes zero terms to them until it gains shared mass.
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int a : active_) {
      if (a == slot) continue;
      loss_[idx_pair(a, slot)] = pair_loss(a, slot);
    }
    for (int t : touched)
      for (int a : active_) {
        if (a == t || a == slot) continue;
        loss_[idx_pair(a, t)] = pair_loss(a, t);
      }
  }

  // Merges the lowest-loss pair; returns the record.
  MergeRecord merge_best(bool above_cut) {
    double best_loss = HUGE_VAL;
    int best_a = -1, best_b = -1;
    for (std::size_t x = 0; x < active_.size(); ++x)
      for (std::size_t y = x + 1; y < active_.size(); ++y) {
        const int a = active_[x], b = active_[y];
        const double l = loss_[idx_pair(a, b)];
        if (l < best_loss || (l == best_loss && id_pair_less(a, b, best_a, best_b))) {
          best_loss = l;
          best_a = a;
          best_b = b;
        }
      }
    // Survivor keeps the smaller cluster id.
    int keep = best_a, drop = best_b;
    if (cluster_id_[drop] < cluster_id_[keep]) std::swap(keep, drop);
    MergeRecord record{cluster_id_[keep], cluster_id_[drop], best_loss, above_cut};
    apply_merge(keep, drop);
    return record;
  }

  std::vector<int> active_cluster_ids() const {
    std::vector<int> ids;
    for (int slot : active_) ids.push_back(cluster_id_[slot]);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  const std::vector<WordId>& members_of(int cluster_id) const {
    for (int slot : active_)
      if (cluster_id_[slot] == cluster_id) return members_[slot];
    throw DomainError("unknown cluster id");
  }

 private:
  std::size_t idx(int a, int b) const {
    return static_cast<std::size_t>(a) * cap_ + static_cast<std::size_t>(b);
  }
  std::size_t idx_pair(int a, int b) const { return a < b ? idx(a, b) : idx(b, a); }

  bool id_pair_less(int a1, int b1, int a2, int b2) const {
    if (a2 < 0) return true;
    int lo1 = std::min(cluster_id_[a1], cluster_id_[b1]);
    int hi1 = std::max(cluster_id_[a1], cluster_id_[b1]);
    int lo2 = std::min(cluster_id_[a2], cluster_id_[b2]);
    int hi2 = std::max(cluster_id_[a2], cluster_id_[b2]);
    return lo1 < lo2 || (lo1 == lo2 && hi1 < hi2);
  }

  int take_slot() {
    if (!free_slots_.empty()) {
      int s = free_slots_.back();
      free_slots_.pop_back();
      return s;
    }
    int s = next_slot_++;
    if (static_cast<std::size_t>(s) >= cap_) throw DomainError("slot capacity exceeded");
    members_.resize(std::max(members_.size(), static_cast<std::size_t>(s) + 1));
    return s;
  }

  // p log(p / (pl pr)) for one class-pair cell, all masses as raw counts.
  double term(long long n, long long l, long long r) const {
    if (n <= 0) return 0.0;
    const double p = static_cast<double>(n) / t2_;
    return p * (log_(n) + log_t2_ - log_(l) - log_(r));
  }

  // AMI lost by merging slots i and j, computed fresh in O(active).
  double pair_loss(int i, int j) const {
    const long long nl = left_[i] + left_[j];
    const long long nr = right_[i] + right_[j];
    double removed = 0.0, added = 0.0;
    for (int x : active_) {
      if (x == i || x == j) continue;
      removed += term(counts_[idx(i, x)], left_[i], right_[x]) +
                 term(counts_[idx(x, i)], left_[x], right_[i]) +
                 term(counts_[idx(j, x)], left_[j], right_[x]) +
                 term(counts_[idx(x, j)], left_[x], right_[j]);
      added += term(counts_[idx(i, x)] + counts_[idx(j, x)], nl, right_[x]) +
               term(counts_[idx(x, i)] + counts_[idx(x, j)], left_[x], nr);
    }
    removed += term(counts_[idx(i, i)], left_[i], right_[i]) +
               term(counts_[idx(i, j)], left_[i], right_[j]) +
               term(counts_[idx(j, i)], left_[j], right_[i]) +
               term(counts_[idx(j, j)], left_[j], right_[j]);
    added += term(counts_[idx(i, i)] + counts_[idx(i, j)] + counts_[idx(j, i)] +
                      counts_[idx(j, j)],
                  nl, nr);
    return removed - added;
  }

  void apply_merge(int keep, int drop) {
    // Correct surviving pair losses before mutating any counts.
    for (std::size_t x = 0; x < active_.size(); ++x)
      for (std::size_t y = x + 1; y < active_.size(); ++y) {
        const int i = active_[x], j = active_[y];
        if (i == keep || i == drop || j == keep || j == drop) continue;
        const long long nic = counts_[idx(i, keep)], nci = counts_[idx(keep, i)];
        const long long nid = counts_[idx(i, drop)], ndi = counts_[idx(drop, i)];
        const long long njc = counts_[idx(j, keep)], ncj = counts_[idx(keep, j)];
        const long long njd = counts_[idx(j, drop)], ndj = counts_[idx(drop, j)];
        if ((nic | nci | nid | ndi | njc | ncj | njd | ndj) == 0) continue;

        const long long nl = left_[i] + left_[j];
        const long long nr = right_[i] + right_[j];
        const long long lc = left_[keep], rc = right_[keep];
        const long long ld = left_[drop], rd = right_[drop];

        double delta = 0.0;
        // x = merged cluster replaces x = keep and x = drop in the scan
        delta += term(nic + nid, left_[i], rc + rd) +
                 term(nci + ndi, lc + ld, right_[i]) +
                 term(njc + njd, left_[j], rc + rd) +
                 term(ncj + ndj, lc + ld, right_[j]);
        delta -= term(nic, left_[i], rc) + term(nci, lc, right_[i]) +
                 term(njc, left_[j], rc) + term(ncj, lc, right_[j]);
        delta -= term(nid, left_[i], rd) + term(ndi, ld, right_[i]) +
                 term(njd, left_[j], rd) + term(ndj, ld, right_[j]);
        delta -= term(nic + njc + nid + njd, nl, rc + rd) +
                 term(nci + ncj + ndi + ndj, lc + ld, nr);
        delta += term(nic + njc, nl, rc) + term(nci + ncj, lc, nr);
        delta += term(nid + njd, nl, rd) + term(ndi + ndj, ld, nr);
        loss_[idx_pair(i, j)] += delta;
      }

    // Fold drop's counts into keep.
    for (int x : active_) {
      if (x == keep || x == drop) continue;
      counts_[idx(keep, x)] += counts_[idx(drop, x)];
      counts_[idx(x, keep)] += counts_[idx(x, drop)];
      counts_[idx(drop, x)] = 0;
      counts_[idx(x, drop)] = 0;
    }
    counts_[idx(keep, keep)] += counts_[idx(keep, drop)] +
                                counts_[idx(drop, keep)] +
                                counts_[idx(drop, drop)];
    counts_[idx(keep, drop)] = 0;
    counts_[idx(drop, keep)] = 0;
    counts_[idx(drop, drop)] = 0;
    left_[keep] += left_[drop];
    right_[keep] += right_[drop];
    left_[drop] = 0;
    right_[drop] = 0;

    cluster_id_[keep] = std::min(cluster_id_[keep], cluster_id_[drop]);
    cluster_id_[drop] = -1;
    for (WordId w : members_[drop]) {
      word_slot_[static_cast<std::size_t>(w)] = keep;
      members_[keep].push_back(w);
    }
    members_[drop].clear();

    active_.erase(std::find(active_.begin(), active_.end(), drop));
    free_slots_.push_back(drop);

    for (int x : active_) {
      if (x == keep) continue;
      loss_[idx_pair(x, keep)] = pair_loss(x, keep);
    }
  }

  const BigramStatistics& stats_;
  std::size_t cap_;
  double t2_ = 0.0, log_t2_ = 0.0;
  LogTable log_;

  std::vector<long long> counts_;  // cap x cap class bigram counts
  std::vector<long long> left_, right_;
  std::vector<double> loss_;
  std::vector<int> cluster_id_;
  std::vector<std::vector<WordId>> members_;
  std::vector<int> active_;  // sorted slot list
  std::vector<int> free_slots_;
  int next_slot_ = 0;

  std::vector<std::vector<std::pair<WordId, long long>>> adj_out_, adj_in_;
  std::vector<int> word_slot_;
};

}  // namespace

ClusterHierarchy brown_cluster(const BigramStatistics& stats, std::size_t b,
                               const BrownConfig& config) {
  if (b < 1) throw DomainError("brown_cluster: b must be at least 1");

  std::vector<WordId> observed;
  for (std::size_t w = 0; w < stats.unigram.size(); ++w)
    if (stats.unigram[w] > 0) observed.push_back(static_cast<WordId>(w));
  if (observed.empty()) throw EmptyInputError("brown_cluster: no observed words");
  if (b > observed.size())
    throw DomainError("brown_cluster: b exceeds the " +
                      std::to_string(observed.size()) + " observed words");

  MergeStrategy strategy = config.strategy;
  if (strategy == MergeStrategy::Auto)
    strategy = observed.size() <= config.exact_limit ? MergeStrategy::Exact
                                                     : MergeStrategy::WindowLimited;

  ClusterHierarchy hierarchy;
  hierarchy.cluster_count = b;
  hierarchy.assignment.assign(stats.unigram.size(), -1);
  hierarchy.paths.assign(stats.unigram.size(), "");

  std::size_t capacity = strategy == MergeStrategy::Exact
                             ? observed.size()
                             : std::min(observed.size(), b + config.window_extra);
  GreedyClusterer clusterer(stats, capacity);

  if (strategy == MergeStrategy::Exact) {
    for (WordId w : observed) clusterer.insert_word(w);  // word-id order
    while (clusterer.active_count() > b)
      hierarchy.merges.push_back(clusterer.merge_best(false));
  } else {
    // Most frequent words first; merge whenever the active set is full.
    std::vector<WordId> by_freq = observed;
    std::sort(by_freq.begin(), by_freq.end(), [&](WordId a, WordId b2) {
      if (stats.unigram[a] != stats.unigram[b2])
        return stats.unigram[a] > stats.unigram[b2];
      return a < b2;
    });
    for (WordId w : by_freq) {
      if (clusterer.active_count() == capacity)
        hierarchy.merges.push_back(clusterer.merge_best(false));
      clusterer.insert_word(w);
    }
    while (clusterer.active_count() > b)
      hierarchy.merges.push_back(clusterer.merge_best(false));
  }

  // Cut: dense cluster ids in ascending internal-id order.
  std::vector<int> cut_ids = clusterer.active_cluster_ids();
  for (std::size_t c = 0; c < cut_ids.size(); ++c)
    for (WordId w : clusterer.members_of(cut_ids[c]))
      hierarchy.assignment[static_cast<std::size_t>(w)] = static_cast<int>(c);

  // Keep merging to the root; these merges define the bit strings.
  while (clusterer.active_count() > 1)
    hierarchy.merges.push_back(clusterer.merge_best(true));

  // Tree over the cut clusters: internal id -> current path-building node.
  struct Node {
    int left = -1, right = -1;  // node indices, -1 = none
    int cut_cluster = -1;       // leaf payload
  };
  std::vector<Node> nodes;
  std::unordered_map<int, int> node_of_id;
  for (std::size_t c = 0; c < cut_ids.size(); ++c) {
    nodes.push_back(Node{-1, -1, static_cast<int>(c)});
    node_of_id[cut_ids[c]] = static_cast<int>(nodes.size() - 1);
  }
  for (const auto& merge : hierarchy.merges) {
    if (!merge.above_cut) continue;
    const int left_node = node_of_id.at(merge.left);
    const int right_node = node_of_id.at(merge.right);
    nodes.push_back(Node{left_node, right_node, -1});
    node_of_id[merge.left] = static_cast<int>(nodes.size() - 1);
    node_of_id.erase(merge.right);
  }

  std::vector<std::string> cluster_path(cut_ids.size(), "");
  if (!nodes.empty()) {
    struct Item {
      int node;
      std::string path;
    };
    std::vector<Item> stack{{static_cast<int>(nodes.size() - 1), ""}};
    while (!stack.empty()) {
      Item item = std::move(stack.back());
      stack.pop_back();
      const Node& node = nodes[static_cast<std::size_t>(item.node)];
      if (node.cut_cluster >= 0) {
        cluster_path[static_cast<std::size_t>(node.cut_cluster)] = item.path;
        continue;
      }
      stack.push_back({node.left, item.path + "0"});
      stack.push_back({node.right, item.path + "1"});
    }
  }
  for (WordId w : observed)
    hierarchy.paths[static_cast<std::size_t>(w)] =
        cluster_path[static_cast<std::size_t>(
            hierarchy.assignment[static_cast<std::size_t>(w)])];
  return hierarchy;
}

std::vector<std::string> cluster_prefix_features(
    std::string_view path, std::span<const std::size_t> prefix_lengths) {
  std::vector<std::string> features;
  features.reserve(prefix_lengths.size());
  for (std::size_t len : prefix_lengths) {
    std::string f = "p" + std::to_string(len) + "=";
    f += path.substr(0, std::min(len, path.size()));
    features.push_back(std::move(f));
  }
  return features;
}

void save_clusters(const ClusterHierarchy& hierarchy, const Vocabulary& vocab,
                   const std::string& path) {
  struct Row {
    std::string bits;
    std::string word;
    long long count;
  };
  std::vector<Row> rows;
  for (std::size_t w = 0; w < hierarchy.paths.size() && w < vocab.size(); ++w) {
    if (hierarchy.assignment[w] < 0) continue;
    rows.push_back({hierarchy.paths[w], vocab.words[w], vocab.counts[w]});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.bits != b.bits) return a.bits < b.bits;
    if (a.count != b.count) return a.count > b.count;
    return a.word < b.word;
  });
  std::ofstream out = open_output(path);
  for (const auto& row : rows)
    out << row.bits << '\t' << row.word << '\t' << row.count << '\n';
}

BrownClusterMap load_clusters(const std::string& path) {
  std::ifstream in = open_input(path);
  BrownClusterMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_whitespace(line);
    if (fields.size() < 2)
      throw ParseError("cluster rows need 'bits word [count]'", line_no);
    for (char c : fields[0])
      if (c != '0' && c != '1')
        throw ParseError("bit string has non-binary character", line_no);
    map.path_of[fields[1]] = fields[0];
  }
  if (map.path_of.empty()) throw EmptyInputError("empty cluster file: " + path);
  return map;
}

}  // namespace wordrep
