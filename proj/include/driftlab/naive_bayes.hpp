#pragma once

// Online Naive Bayes: Gaussian likelihoods for numeric attributes (Welford
// moments per class), Laplace-smoothed categorical likelihoods for nominal
// ones, Laplace-smoothed class priors. Missing values leave the statistics
// untouched and are skipped at prediction time.
//
// A single observation gives a variance at the floor. A class that has never
// seen a numeric attribute is scored on it by the marginal over all classes.

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "driftlab/classifier.hpp"

namespace driftlab {

/// Single-pass mean / sum of squared deviations.
struct RunningMoments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  /// Population variance M2/n; 0 before any observation.
  double variance() const { return count > 0.0 ? m2 / count : 0.0; }
};

struct NaiveBayesParams {
  double smoothing = 1.0;        // lambda for priors and nominal likelihoods
  double variance_floor = 1e-6;  // lower bound on Gaussian variance
};

/// Sufficient statistics of a Naive Bayes model; shared by the standalone
/// classifier and by Hoeffding-tree leaves.
class NaiveBayesStats {
 public:
  NaiveBayesStats() = default;

  explicit NaiveBayesStats(const StreamSchema& schema)
      : class_counts_(schema.class_count(), 0.0),
        numeric_(schema.attribute_count()),
        overall_(schema.attribute_count()),
        nominal_(schema.attribute_count()),
        nominal_totals_(schema.attribute_count()) {
    const std::size_t c = schema.class_count();
    for (std::size_t a = 0; a < schema.attribute_count(); ++a) {
      const auto& attr = schema.attribute(a);
      if (attr.is_numeric()) {
        numeric_[a].assign(c, RunningMoments{});
      } else {
        nominal_[a].assign(c * attr.cardinality(), 0.0);
        nominal_totals_[a].assign(c, 0.0);
      }
    }
  }

  void add(const StreamSchema& schema, FeatureView x, ClassIndex y) {
    class_counts_[y] += 1.0;
    total_ += 1.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      const auto& f = x[a];
      if (f.is_numeric()) {
        numeric_[a][y].add(f.value());
        overall_[a].add(f.value());
      } else if (f.is_nominal()) {
        nominal_[a][y * schema.attribute(a).cardinality() + f.category()] += 1.0;
        nominal_totals_[a][y] += 1.0;
      }
    }
  }

  ClassPosterior posterior(const StreamSchema& schema, FeatureView x, const NaiveBayesParams& p) const {
    const std::size_t c = class_counts_.size();
    if (total_ <= 0.0) return ClassPosterior::uniform(c);
    std::vector<double> scores(c);
    const double prior_total = total_ + p.smoothing * static_cast<double>(c);
    for (std::size_t y = 0; y < c; ++y) {
      double s = std::log((class_counts_[y] + p.smoothing) / prior_total);
      for (std::size_t a = 0; a < x.size(); ++a) {
        const auto& f = x[a];
        if (f.is_numeric()) {
          const auto& all = overall_[a];
          if (all.count <= 0.0) continue;
          const auto& m = numeric_[a][y];
          double var = p.variance_floor, mean = m.mean;
          if (m.count >= 2.0) {
            var = std::max(m.variance(), p.variance_floor);
          } else if (m.count <= 0.0) {
            var = all.count >= 2.0 ? std::max(all.variance(), p.variance_floor) : p.variance_floor;
            mean = all.mean;
          }
          const double d = f.value() - mean;
          s += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
        } else if (f.is_nominal()) {
          const std::size_t card = schema.attribute(a).cardinality();
          const double count = nominal_[a][y * card + f.category()];
          s += std::log((count + p.smoothing) / (nominal_totals_[a][y] + p.smoothing * static_cast<double>(card)));
        }
      }
      scores[y] = s;
    }
    return ClassPosterior::from_log_scores(scores);
  }

  double total() const { return total_; }
  const std::vector<double>& class_counts() const { return class_counts_; }
  const RunningMoments& moments(std::size_t attribute, ClassIndex y) const { return numeric_[attribute][y]; }
  const RunningMoments& overall_moments(std::size_t attribute) const { return overall_[attribute]; }
  /// Count of category `cat` of nominal `attribute` observed with class y.
  double nominal_count(std::size_t attribute, ClassIndex y, std::size_t cardinality, std::uint32_t cat) const {
    return nominal_[attribute][y * cardinality + cat];
  }

 private:
  std::vector<double> class_counts_;
  double total_ = 0.0;
  std::vector<std::vector<RunningMoments>> numeric_;  // [attribute][class]
  std::vector<RunningMoments> overall_;               // [attribute], all classes
  std::vector<std::vector<double>> nominal_;          // [attribute][class * card + category]
  std::vector<std::vector<double>> nominal_totals_;   // [attribute][class]
};

class NaiveBayes final : public Classifier {
 public:
  explicit NaiveBayes(std::shared_ptr<const StreamSchema> schema, NaiveBayesParams params = {})
      : Classifier(std::move(schema)), params_(params), stats_(this->schema()) {
    if (!(params_.smoothing > 0.0)) throw ConfigError("naive bayes smoothing must be > 0");
  }

  ClassPosterior predict(FeatureView x) const override { return stats_.posterior(schema(), x, params_); }

  void train(FeatureView x, ClassIndex y) override {
    check_label(y);
    stats_.add(schema(), x, y);
  }

  void reset() override { stats_ = NaiveBayesStats(schema()); }
  std::unique_ptr<Classifier> clone() const override { return std::make_unique<NaiveBayes>(*this); }
  std::string_view name() const override { return "nb"; }

  const NaiveBayesStats& stats() const { return stats_; }
  const NaiveBayesParams& params() const { return params_; }

 private:
  NaiveBayesParams params_;
  NaiveBayesStats stats_;
};

}  // namespace driftlab
