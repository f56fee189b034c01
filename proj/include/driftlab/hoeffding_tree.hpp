#pragma once

// VFDT-style Hoeffding tree with Naive Bayes leaves.
//
// Leaves keep Naive Bayes statistics plus, per numeric attribute and class, a
// bounded centroid sketch (at most 64 centroids) from which binary split
// thresholds are proposed. Every `grace_period` instances a leaf compares the
// two best information gains; it splits when their difference exceeds the
// Hoeffding bound for R = log2(c), or when the bound itself drops below the
// tie threshold. Nodes live in a flat arena addressed by index.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "driftlab/naive_bayes.hpp"

namespace driftlab {

/// sqrt(R^2 ln(1/delta) / (2n)).
inline double hoeffding_bound(double range, double delta, double n) {
  if (!(range > 0.0)) throw DomainError("hoeffding_bound: range must be > 0");
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("hoeffding_bound: delta must lie in (0, 1]");
  if (!(n >= 1.0)) throw DomainError("hoeffding_bound: n must be >= 1");
  return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

/// Bounded streaming histogram: sorted (value, weight) centroids; when full,
/// the two closest neighbours are merged into their weighted mean.
class CentroidSketch {
 public:
  static constexpr std::size_t kMaxCentroids = 64;

  struct Centroid {
    double value;
    double weight;
  };

  void add(double v, double w = 1.0) {
    auto it = std::lower_bound(centroids_.begin(), centroids_.end(), v,
                               [](const Centroid& c, double x) { return c.value < x; });
    if (it != centroids_.end() && it->value == v) {
      it->weight += w;
      return;
    }
    centroids_.insert(it, Centroid{v, w});
    if (centroids_.size() > kMaxCentroids) merge_closest();
  }

  const std::vector<Centroid>& centroids() const { return centroids_; }

 private:
  void merge_closest() {
    std::size_t best = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < centroids_.size(); ++i) {
      const double g = centroids_[i + 1].value - centroids_[i].value;
      if (g < gap) {
        gap = g;
        best = i;
      }
    }
    auto& a = centroids_[best];
    const auto& b = centroids_[best + 1];
    const double w = a.weight + b.weight;
    a.value = (a.value * a.weight + b.value * b.weight) / w;
    a.weight = w;
    centroids_.erase(centroids_.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  }

  std::vector<Centroid> centroids_;
};

inline double entropy(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

/// Information gain of partitioning `parent` into `children` (per-class counts).
inline double information_gain(std::span<const double> parent, const std::vector<std::vector<double>>& children) {
  double total = 0.0;
  for (const auto& ch : children) {
    for (double c : ch) total += c;
  }
  if (total <= 0.0) return 0.0;
  double weighted = 0.0;
  for (const auto& ch : children) {
    double n = 0.0;
    for (double c : ch) n += c;
    weighted += n / total * entropy(ch);
  }
  return entropy(parent) - weighted;
}

struct HoeffdingTreeParams {
  double split_confidence = 1e-7;  // delta
  double tie_threshold = 0.05;     // tau
  std::size_t grace_period = 200;  // n_min
  /// Fraction of usable attributes sampled at each split attempt; 1 disables
  /// the randomization.
  double attribute_fraction = 1.0;
  NaiveBayesParams leaf;
};

class HoeffdingTree final : public Classifier {
 public:
  static constexpr std::size_t kNoChild = static_cast<std::size_t>(-1);

  struct SplitCandidate {
    std::size_t attribute = 0;
    double threshold = 0.0;  // numeric only
    double merit = 0.0;
  };

  struct Node {
    // Leaf state.
    bool is_leaf = true;
    NaiveBayesStats stats;
    std::vector<std::vector<CentroidSketch>> sketches;  // [attribute][class]; empty for nominal
    std::vector<bool> usable;
    double weight_at_last_check = 0.0;
    // Split state.
    std::size_t split_attribute = 0;
    bool numeric_split = false;
    double threshold = 0.0;
    std::vector<std::size_t> children;
    std::size_t missing_child = 0;
    std::size_t depth = 0;
  };

  explicit HoeffdingTree(std::shared_ptr<const StreamSchema> schema, HoeffdingTreeParams params = {},
                         std::uint64_t seed = 0)
      : Classifier(std::move(schema)), params_(params), seed_(seed), rng_(seed) {
    if (!(params_.split_confidence > 0.0 && params_.split_confidence < 1.0)) {
      throw ConfigError("hoeffding tree split confidence must lie in (0, 1)");
    }
    if (params_.grace_period == 0) throw ConfigError("hoeffding tree grace period must be positive");
    if (!(params_.attribute_fraction > 0.0 && params_.attribute_fraction <= 1.0)) {
      throw ConfigError("hoeffding tree attribute fraction must lie in (0, 1]");
    }
    reset();
  }

  ClassPosterior predict(FeatureView x) const override {
    return nodes_[leaf_for(x)].stats.posterior(schema(), x, params_.leaf);
  }

  void train(FeatureView x, ClassIndex y) override {
    check_label(y);
    const std::size_t id = leaf_for(x);
    Node& leaf = nodes_[id];
    leaf.stats.add(schema(), x, y);
    for (std::size_t a = 0; a < x.size(); ++a) {
      if (x[a].is_numeric() && !leaf.sketches[a].empty()) leaf.sketches[a][y].add(x[a].value());
    }
    if (leaf.stats.total() - leaf.weight_at_last_check >= static_cast<double>(params_.grace_period)) {
      leaf.weight_at_last_check = leaf.stats.total();
      attempt_split(id);
    }
  }

  void reset() override {
    nodes_.clear();
    rng_ = Rng(seed_);
    std::vector<bool> usable(schema().attribute_count(), true);
    nodes_.push_back(make_leaf(std::move(usable), 0));
  }

  std::unique_ptr<Classifier> clone() const override { return std::make_unique<HoeffdingTree>(*this); }
  std::string_view name() const override { return "ht"; }

  /// Arena index of the leaf that `x` reaches.
  std::size_t leaf_for(FeatureView x) const {
    std::size_t id = 0;
    while (!nodes_[id].is_leaf) {
      const Node& n = nodes_[id];
      const FeatureValue& f = x[n.split_attribute];
      if (f.is_missing()) {
        id = n.children[n.missing_child];
      } else if (n.numeric_split) {
        id = n.children[f.value() <= n.threshold ? 0 : 1];
      } else {
        id = n.children[f.category()];
      }
    }
    return id;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf; }));
  }
  std::size_t split_count() const { return nodes_.size() - leaf_count(); }
  const HoeffdingTreeParams& params() const { return params_; }

  /// Best split of nominal attribute `a` at a leaf: multiway on its categories.
  static std::optional<SplitCandidate> nominal_split(const StreamSchema& schema, const Node& leaf, std::size_t a) {
    const std::size_t c = schema.class_count();
    const std::size_t card = schema.attribute(a).cardinality();
    std::vector<std::vector<double>> children(card, std::vector<double>(c, 0.0));
    std::vector<double> parent(c, 0.0);
    std::size_t non_empty = 0;
    for (std::size_t k = 0; k < card; ++k) {
      double n = 0.0;
      for (std::size_t y = 0; y < c; ++y) {
        const double v = leaf.stats.nominal_count(a, static_cast<ClassIndex>(y), card, static_cast<std::uint32_t>(k));
        children[k][y] = v;
        parent[y] += v;
        n += v;
      }
      if (n > 0.0) ++non_empty;
    }
    if (non_empty < 2) return std::nullopt;
    return SplitCandidate{a, 0.0, information_gain(parent, children)};
  }

  /// Best binary threshold of numeric attribute `a` from the leaf sketches.
  static std::optional<SplitCandidate> numeric_split(const StreamSchema& schema, const Node& leaf, std::size_t a) {
    const std::size_t c = schema.class_count();
    struct Point {
      double value;
      std::size_t cls;
      double weight;
    };
    std::vector<Point> points;
    std::vector<double> parent(c, 0.0);
    for (std::size_t y = 0; y < c; ++y) {
      for (const auto& ct : leaf.sketches[a][y].centroids()) {
        points.push_back({ct.value, y, ct.weight});
        parent[y] += ct.weight;
      }
    }
    if (points.size() < 2) return std::nullopt;
    std::sort(points.begin(), points.end(), [](const Point& p, const Point& q) {
      return p.value < q.value || (p.value == q.value && p.cls < q.cls);
    });
    std::optional<SplitCandidate> best;
    std::vector<std::vector<double>> sides(2, std::vector<double>(c, 0.0));
    sides[1] = parent;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      sides[0][points[i].cls] += points[i].weight;
      sides[1][points[i].cls] -= points[i].weight;
      if (points[i + 1].value == points[i].value) continue;
      const double gain = information_gain(parent, sides);
      if (!best || gain > best->merit) {
        best = SplitCandidate{a, 0.5 * (points[i].value + points[i + 1].value), gain};
      }
    }
    return best;
  }

 private:
  Node make_leaf(std::vector<bool> usable, std::size_t depth) const {
    Node n;
    n.stats = NaiveBayesStats(schema());
    n.sketches.resize(schema().attribute_count());
    for (std::size_t a = 0; a < schema().attribute_count(); ++a) {
      if (schema().attribute(a).is_numeric()) n.sketches[a].resize(class_count());
    }
    n.usable = std::move(usable);
    n.depth = depth;
    return n;
  }

  void attempt_split(std::size_t id) {
    const Node& leaf = nodes_[id];
    std::size_t observed = 0;
    for (double v : leaf.stats.class_counts()) observed += v > 0.0 ? 1 : 0;
    if (observed < 2) return;

    std::vector<std::size_t> candidates;
    for (std::size_t a = 0; a < leaf.usable.size(); ++a) {
      if (leaf.usable[a]) candidates.push_back(a);
    }
    if (params_.attribute_fraction < 1.0 && candidates.size() > 1) {
      const auto keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(params_.attribute_fraction * static_cast<double>(candidates.size()))));
      for (std::size_t i = 0; i < keep; ++i) {
        std::swap(candidates[i], candidates[i + rng_.below(candidates.size() - i)]);
      }
      candidates.resize(keep);
      std::sort(candidates.begin(), candidates.end());
    }

    std::optional<SplitCandidate> best;
    double second = 0.0;  // the null split has merit 0
    for (std::size_t a : candidates) {
      auto cand = schema().attribute(a).is_numeric() ? numeric_split(schema(), leaf, a) : nominal_split(schema(), leaf, a);
      if (!cand) continue;
      if (!best || cand->merit > best->merit) {
        if (best) second = std::max(second, best->merit);
        best = cand;
      } else {
        second = std::max(second, cand->merit);
      }
    }
    if (!best || !(best->merit > 0.0)) return;
    const double range = std::log2(static_cast<double>(class_count()));
    const double bound = hoeffding_bound(range, params_.split_confidence, leaf.stats.total());
    if (best->merit - second > bound || bound < params_.tie_threshold) split(id, *best);
  }

  void split(std::size_t id, const SplitCandidate& s) {
    const auto& attr = schema().attribute(s.attribute);
    std::vector<bool> usable = nodes_[id].usable;
    if (attr.is_nominal()) usable[s.attribute] = false;
    const std::size_t depth = nodes_[id].depth + 1;
    const std::size_t branches = attr.is_numeric() ? 2 : attr.cardinality();

    // Branch with the most observations receives instances missing this attribute.
    std::vector<double> mass(branches, 0.0);
    {
      const Node& leaf = nodes_[id];
      for (std::size_t y = 0; y < class_count(); ++y) {
        if (attr.is_numeric()) {
          for (const auto& ct : leaf.sketches[s.attribute][y].centroids()) mass[ct.value <= s.threshold ? 0 : 1] += ct.weight;
        } else {
          for (std::size_t k = 0; k < branches; ++k) {
            mass[k] += leaf.stats.nominal_count(s.attribute, static_cast<ClassIndex>(y), branches, static_cast<std::uint32_t>(k));
          }
        }
      }
    }

    std::vector<std::size_t> children;
    for (std::size_t k = 0; k < branches; ++k) {
      children.push_back(nodes_.size());
      nodes_.push_back(make_leaf(usable, depth));
    }
    Node& n = nodes_[id];
    n.is_leaf = false;
    n.stats = NaiveBayesStats();
    n.sketches.clear();
    n.split_attribute = s.attribute;
    n.numeric_split = attr.is_numeric();
    n.threshold = s.threshold;
    n.children = std::move(children);
    n.missing_child = static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
  }

  HoeffdingTreeParams params_;
  std::uint64_t seed_;
  Rng rng_;
  std::vector<Node> nodes_;
};

}  // namespace driftlab
