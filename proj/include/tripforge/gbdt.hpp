#pragma once

// Stochastic gradient boosting of binary regression trees under the binomial
// log-likelihood (MART). Trees are grown level by level with an exact greedy
// split search on squared error of the residuals; leaves take one Newton step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tripforge/features.hpp"
#include "tripforge/trip_model.hpp"

namespace tripforge {

inline constexpr double kProbaEpsilon = 1e-7;

struct GbdtConfig {
  int n_trees = 200;
  double learning_rate = 0.1;
  int max_depth = 5;
  int min_samples_leaf = 20;
  double subsample = 0.8;
  std::uint64_t seed = 0;
  // Worker threads for the split search; results do not depend on it.
  int threads = 1;

  void validate() const {
    if (n_trees < 1) throw std::invalid_argument("gbdt: n_trees must be >= 1");
    if (max_depth < 1) throw std::invalid_argument("gbdt: max_depth must be >= 1");
    if (min_samples_leaf < 1) throw std::invalid_argument("gbdt: min_samples_leaf must be >= 1");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw std::invalid_argument("gbdt: subsample must be in (0,1]");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw std::invalid_argument("gbdt: learning_rate must be in (0,1]");
  }
};

/// Flat binary tree; node 0 is the root. Internal nodes send
/// x[feature] <= threshold to `left`.
template <typename Scalar>
struct TreeNode {
  int feature = -1;
  Scalar threshold = 0;
  int left = -1;
  int right = -1;
  Scalar value = 0;

  bool is_leaf() const { return feature < 0; }
};

template <typename Scalar>
using Tree = std::vector<TreeNode<Scalar>>;

template <typename Scalar, typename Row>
Scalar tree_output(const Tree<Scalar>& tree, const Row& x) {
  int n = 0;
  while (!tree[static_cast<std::size_t>(n)].is_leaf()) {
    const auto& node = tree[static_cast<std::size_t>(n)];
    n = x(node.feature) <= node.threshold ? node.left : node.right;
  }
  return tree[static_cast<std::size_t>(n)].value;
}

template <typename Scalar>
Scalar logistic(Scalar score) {
  return Scalar(1) / (Scalar(1) + std::exp(-score));
}

template <typename Scalar>
Scalar clamp_probability(Scalar p) {
  return std::clamp(p, Scalar(kProbaEpsilon), Scalar(1 - kProbaEpsilon));
}

/// Largest |base_score| allowed: logit(1 - epsilon).
inline double max_log_odds() { return std::log((1.0 - kProbaEpsilon) / kProbaEpsilon); }

template <typename Scalar>
class GbdtModel {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GbdtModel() = default;
  GbdtModel(GbdtConfig config, Scalar base_score, int n_features, std::vector<Tree<Scalar>> trees)
      : config_(config), base_score_(base_score), n_features_(n_features), trees_(std::move(trees)) {}

  const GbdtConfig& config() const { return config_; }
  Scalar base_score() const { return base_score_; }
  Scalar learning_rate() const { return static_cast<Scalar>(config_.learning_rate); }
  int n_features() const { return n_features_; }
  const std::vector<Tree<Scalar>>& trees() const { return trees_; }

  /// base_score + learning_rate * sum of tree outputs. Throws
  /// std::invalid_argument on a dimension mismatch.
  template <typename Derived>
  Scalar predict_score(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != n_features_)
      throw std::invalid_argument("gbdt: expected " + std::to_string(n_features_) + " features, got " +
                                  std::to_string(x.size()));
    Scalar acc = 0;
    for (const auto& t : trees_) acc += tree_output(t, x);
    return base_score_ + learning_rate() * acc;
  }

  template <typename Derived>
  Scalar predict_proba(const Eigen::MatrixBase<Derived>& x) const {
    return clamp_probability(logistic(predict_score(x)));
  }

  template <typename Derived>
  int classify(const Eigen::MatrixBase<Derived>& x, Scalar threshold = Scalar(0.5)) const {
    return predict_proba(x) >= threshold ? 1 : 0;
  }

  /// Row-wise probabilities for an n x k matrix.
  template <typename Derived>
  Vector predict_proba_rows(const Eigen::MatrixBase<Derived>& x) const {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict_proba(x.row(i).transpose());
    return out;
  }

 private:
  GbdtConfig config_;
  Scalar base_score_ = 0;
  int n_features_ = 0;
  std::vector<Tree<Scalar>> trees_;
};

namespace detail {

template <typename Scalar>
struct SplitCandidate {
  Scalar gain = 0;
  Scalar threshold = 0;
  int feature = -1;
};

template <typename Scalar>
struct NodeStats {
  std::size_t count = 0;
  Scalar sum_r = 0;
  Scalar sum_h = 0;
};

// Midpoint strictly below `hi` so that lo routes left and hi routes right.
template <typename Scalar>
Scalar midpoint_threshold(Scalar lo, Scalar hi) {
  Scalar t = lo + (hi - lo) / Scalar(2);
  if (!(t < hi)) t = lo;
  return t;
}

// Squared-error reduction of splitting a node into (left, rest).
template <typename Scalar>
Scalar split_gain(Scalar left_sum, std::size_t left_n, Scalar total_sum, std::size_t total_n) {
  const Scalar right_sum = total_sum - left_sum;
  const auto right_n = total_n - left_n;
  return left_sum * left_sum / Scalar(left_n) + right_sum * right_sum / Scalar(right_n) -
         total_sum * total_sum / Scalar(total_n);
}

}  // namespace detail

/// Greedy exact search over midpoints of consecutive distinct values, for a
/// set of nodes at once. Exposed for testing.
template <typename Scalar>
class LevelSplitFinder {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit LevelSplitFinder(const Matrix& x) : n_(static_cast<std::size_t>(x.rows())) {
    const auto k = static_cast<std::size_t>(x.cols());
    order_.resize(k);
    sorted_.resize(k);
    for (std::size_t f = 0; f < k; ++f) {
      auto& idx = order_[f];
      idx.resize(n_);
      std::iota(idx.begin(), idx.end(), 0u);
      const auto col = x.col(static_cast<Eigen::Index>(f));
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return col(a) < col(b); });
      sorted_[f].resize(n_);
      for (std::size_t j = 0; j < n_; ++j) sorted_[f][j] = col(idx[j]);
    }
  }

  std::size_t features() const { return order_.size(); }

  /// node_slot[i] is the open-node slot of row i, or -1. Returns the best
  /// split per slot (feature -1 when no admissible split exists). Ties go to
  /// the lowest feature index, then the lowest threshold.
  std::vector<detail::SplitCandidate<Scalar>> find(const std::vector<int>& node_slot,
                                                   const std::vector<detail::NodeStats<Scalar>>& slots,
                                                   const std::vector<Scalar>& residual,
                                                   std::size_t min_leaf, int threads) const {
    const auto k = features();
    const auto n_slots = slots.size();
    std::vector<std::vector<detail::SplitCandidate<Scalar>>> per_feature(
        k, std::vector<detail::SplitCandidate<Scalar>>(n_slots));
    auto work = [&](std::size_t f_begin, std::size_t f_end) {
      struct Scan {
        std::size_t n = 0;
        Scalar sum = 0;
        Scalar last = 0;
      };
      std::vector<Scan> scan(n_slots);
      for (std::size_t f = f_begin; f < f_end; ++f) {
        std::fill(scan.begin(), scan.end(), Scan{});
        auto& best = per_feature[f];
        const auto& idx = order_[f];
        const auto& val = sorted_[f];
        for (std::size_t j = 0; j < n_; ++j) {
          const int s = node_slot[idx[j]];
          if (s < 0) continue;
          auto& sc = scan[static_cast<std::size_t>(s)];
          const Scalar v = val[j];
          const auto& st = slots[static_cast<std::size_t>(s)];
          if (sc.n >= min_leaf && v != sc.last && st.count - sc.n >= min_leaf) {
            const Scalar g = detail::split_gain(sc.sum, sc.n, st.sum_r, st.count);
            auto& b = best[static_cast<std::size_t>(s)];
            if (g > b.gain) b = {g, detail::midpoint_threshold(sc.last, v), static_cast<int>(f)};
          }
          ++sc.n;
          sc.sum += residual[idx[j]];
          sc.last = v;
        }
      }
    };
    const auto t = static_cast<std::size_t>(std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(k, 1))));
    if (t <= 1) {
      work(0, k);
    } else {
      std::vector<std::thread> pool;
      const auto chunk = (k + t - 1) / t;
      for (std::size_t b = 0; b < k; b += chunk) pool.emplace_back(work, b, std::min(k, b + chunk));
      for (auto& th : pool) th.join();
    }
    std::vector<detail::SplitCandidate<Scalar>> out(n_slots);
    for (std::size_t f = 0; f < k; ++f)
      for (std::size_t s = 0; s < n_slots; ++s)
        if (per_feature[f][s].gain > out[s].gain) out[s] = per_feature[f][s];
    return out;
  }

 private:
  std::size_t n_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::vector<Scalar>> sorted_;
};

/// Fits a regression tree to `residual` over the rows with in_sample[i],
/// with Newton leaf values sum(r) / sum(h).
template <typename Scalar>
Tree<Scalar> fit_tree(const LevelSplitFinder<Scalar>& finder,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x,
                      const std::vector<Scalar>& residual, const std::vector<Scalar>& hessian,
                      const std::vector<char>& in_sample, const GbdtConfig& config) {
  const auto n = residual.size();
  Tree<Scalar> tree(1);
  std::vector<int> node_of(n, -1);
  detail::NodeStats<Scalar> root;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_sample[i]) continue;
    node_of[i] = 0;
    ++root.count;
    root.sum_r += residual[i];
    root.sum_h += hessian[i];
  }
  std::vector<detail::NodeStats<Scalar>> stats{root};
  std::vector<int> open{0};
  const auto min_leaf = static_cast<std::size_t>(config.min_samples_leaf);

  for (int depth = 0; depth < config.max_depth && !open.empty(); ++depth) {
    std::vector<int> slot_of_node(tree.size(), -1);
    std::vector<detail::NodeStats<Scalar>> slot_stats;
    for (int nd : open) {
      if (stats[static_cast<std::size_t>(nd)].count < 2 * min_leaf) continue;
      slot_of_node[static_cast<std::size_t>(nd)] = static_cast<int>(slot_stats.size());
      slot_stats.push_back(stats[static_cast<std::size_t>(nd)]);
    }
    if (slot_stats.empty()) break;
    std::vector<int> node_slot(n, -1);
    for (std::size_t i = 0; i < n; ++i)
      if (node_of[i] >= 0) node_slot[i] = slot_of_node[static_cast<std::size_t>(node_of[i])];

    const auto best = finder.find(node_slot, slot_stats, residual, min_leaf, config.threads);

    std::vector<int> next_open;
    std::vector<std::pair<int, int>> children(tree.size(), {-1, -1});
    for (int nd : open) {
      const int s = slot_of_node[static_cast<std::size_t>(nd)];
      if (s < 0) continue;
      const auto& b = best[static_cast<std::size_t>(s)];
      if (b.feature < 0 || !(b.gain > 0)) continue;
      const int l = static_cast<int>(tree.size());
      tree.push_back({});
      tree.push_back({});
      stats.resize(tree.size());
      auto& node = tree[static_cast<std::size_t>(nd)];
      node.feature = b.feature;
      node.threshold = b.threshold;
      node.left = l;
      node.right = l + 1;
      children[static_cast<std::size_t>(nd)] = {l, l + 1};
      next_open.push_back(l);
      next_open.push_back(l + 1);
    }
    if (next_open.empty()) break;
    for (std::size_t i = 0; i < n; ++i) {
      const int nd = node_of[i];
      if (nd < 0) continue;
      const auto& node = tree[static_cast<std::size_t>(nd)];
      if (node.is_leaf()) continue;
      const int child = x(static_cast<Eigen::Index>(i), node.feature) <= node.threshold ? node.left : node.right;
      node_of[i] = child;
      auto& cs = stats[static_cast<std::size_t>(child)];
      ++cs.count;
      cs.sum_r += residual[i];
      cs.sum_h += hessian[i];
    }
    open = std::move(next_open);
  }

  for (std::size_t nd = 0; nd < tree.size(); ++nd) {
    auto& node = tree[nd];
    if (!node.is_leaf()) continue;
    const auto& st = stats[nd];
    node.value = st.sum_h > Scalar(1e-300) ? st.sum_r / st.sum_h : Scalar(0);
  }
  return tree;
}

/// Mean binomial deviance of scores F against 0/1 labels.
template <typename Scalar>
Scalar binomial_deviance(const std::vector<Scalar>& score, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) {
  Scalar acc = 0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    const Scalar p = clamp_probability(logistic(score[i]));
    acc += y(static_cast<Eigen::Index>(i)) > Scalar(0.5) ? -std::log(p) : -std::log(Scalar(1) - p);
  }
  return Scalar(2) * acc / Scalar(score.size());
}

struct GbdtTrace {
  std::vector<double> deviance;  // entry 0 is the base model, then one per tree
};

/// Fits the boosted model. Throws std::invalid_argument for empty input,
/// non-finite features, labels outside {0,1} or an invalid config.
template <typename Scalar>
GbdtModel<Scalar> fit_gbdt(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x,
                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, const GbdtConfig& config,
                           GbdtTrace* trace = nullptr) {
  config.validate();
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0) throw std::invalid_argument("gbdt: empty training set");
  if (y.size() != x.rows()) throw std::invalid_argument("gbdt: label count does not match rows");
  if (!x.allFinite()) throw std::invalid_argument("gbdt: non-finite feature value");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != Scalar(0) && y(i) != Scalar(1)) throw std::invalid_argument("gbdt: labels must be 0 or 1");

  const Scalar p = y.mean();
  const Scalar cap = static_cast<Scalar>(max_log_odds());
  Scalar base;
  if (p <= Scalar(0)) base = -cap;
  else if (p >= Scalar(1)) base = cap;
  else base = std::clamp(std::log(p / (Scalar(1) - p)), -cap, cap);

  std::vector<Scalar> score(n, base);
  std::vector<Scalar> residual(n), hessian(n);
  std::vector<char> in_sample(n, 1);
  std::vector<std::uint32_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0u);
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.subsample * static_cast<double>(n))));
  std::mt19937_64 rng(config.seed);
  std::vector<std::uint32_t> picked(m);

  LevelSplitFinder<Scalar> finder(x);
  const Scalar eta = static_cast<Scalar>(config.learning_rate);
  std::vector<Tree<Scalar>> trees;
  trees.reserve(static_cast<std::size_t>(config.n_trees));
  if (trace) trace->deviance.push_back(static_cast<double>(binomial_deviance(score, y)));

  for (int t = 0; t < config.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar pr = logistic(score[i]);
      residual[i] = y(static_cast<Eigen::Index>(i)) - pr;
      hessian[i] = pr * (Scalar(1) - pr);
    }
    if (m < n) {
      std::fill(in_sample.begin(), in_sample.end(), 0);
      std::sample(all_rows.begin(), all_rows.end(), picked.begin(), m, rng);
      for (auto i : picked) in_sample[i] = 1;
    }
    auto tree = fit_tree(finder, x, residual, hessian, in_sample, config);
    for (std::size_t i = 0; i < n; ++i)
      score[i] += eta * tree_output(tree, x.row(static_cast<Eigen::Index>(i)).transpose());
    trees.push_back(std::move(tree));
    if (trace) trace->deviance.push_back(static_cast<double>(binomial_deviance(score, y)));
  }
  return GbdtModel<Scalar>(config, base, static_cast<int>(x.cols()), std::move(trees));
}

// --- serialization ---------------------------------------------------------

nlohmann::json to_json(const GbdtConfig& c);
GbdtConfig gbdt_config_from_json(const nlohmann::json& j);

template <typename Scalar>
nlohmann::json tree_to_json(const Tree<Scalar>& tree, int node = 0) {
  const auto& nd = tree[static_cast<std::size_t>(node)];
  if (nd.is_leaf()) return {{"leaf", nd.value}};
  return {{"feature", nd.feature},
          {"threshold", nd.threshold},
          {"left", tree_to_json(tree, nd.left)},
          {"right", tree_to_json(tree, nd.right)}};
}

template <typename Scalar>
int tree_from_json(const nlohmann::json& j, Tree<Scalar>& out) {
  const int id = static_cast<int>(out.size());
  out.push_back({});
  if (j.contains("leaf")) {
    out[static_cast<std::size_t>(id)].value = j.at("leaf").get<Scalar>();
    return id;
  }
  const int feature = j.at("feature").get<int>();
  const auto threshold = j.at("threshold").get<Scalar>();
  const int l = tree_from_json(j.at("left"), out);
  const int r = tree_from_json(j.at("right"), out);
  auto& nd = out[static_cast<std::size_t>(id)];
  nd.feature = feature;
  nd.threshold = threshold;
  nd.left = l;
  nd.right = r;
  return id;
}

template <typename Scalar>
nlohmann::json to_json(const GbdtModel<Scalar>& model) {
  nlohmann::json j;
  j["model"] = "gbdt";
  j["config"] = to_json(model.config());
  j["base_score"] = model.base_score();
  j["n_features"] = model.n_features();
  j["trees"] = nlohmann::json::array();
  for (const auto& t : model.trees()) j["trees"].push_back(tree_to_json(t));
  return j;
}

template <typename Scalar>
GbdtModel<Scalar> gbdt_from_json(const nlohmann::json& j) {
  std::vector<Tree<Scalar>> trees;
  for (const auto& tj : j.at("trees")) {
    Tree<Scalar> t;
    tree_from_json(tj, t);
    trees.push_back(std::move(t));
  }
  return GbdtModel<Scalar>(gbdt_config_from_json(j.at("config")), j.at("base_score").get<Scalar>(),
                           j.at("n_features").get<int>(), std::move(trees));
}

// --- destination ranking ---------------------------------------------------

struct RankedDestination {
  StationId station = 0;
  double probability = 0;
};

/// Scores (origin, d) for every station d in the registry, self-loop
/// included; sorted by probability descending, ties by ascending id.
/// Throws std::out_of_range for an unknown origin.
std::vector<RankedDestination> rank_destinations(const GbdtModel<double>& model, const UserCategory& user,
                                                 Timestamp start, StationId origin,
                                                 const StationRegistry& registry, FeatureMask mask);

}  // namespace tripforge
