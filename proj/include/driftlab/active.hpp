#pragma once

// Stream-based label-query strategies.

#include <algorithm>
#include <memory>
#include <optional>
#include <string_view>

#include "driftlab/core.hpp"

namespace driftlab {

struct QueryDecision {
  bool query = false;
  /// The value the posterior was compared against (randomized threshold for
  /// RandVar, B for Random, query probability for Sampling).
  double threshold = 0.0;
  double max_posterior = 0.0;
};

class QueryStrategy {
 public:
  virtual ~QueryStrategy() = default;
  virtual QueryDecision decide(const ClassPosterior& posterior) = 0;
  /// Current uncertainty threshold, for strategies that maintain one.
  virtual std::optional<double> threshold() const { return std::nullopt; }
  virtual std::string_view name() const = 0;
};

/// Queries with fixed probability B.
class RandomQuery final : public QueryStrategy {
 public:
  RandomQuery(double budget, std::uint64_t seed) : budget_(budget), rng_(seed) {
    if (!(budget >= 0.0 && budget <= 1.0)) throw ConfigError("random query probability must lie in [0, 1]");
  }

  QueryDecision decide(const ClassPosterior& posterior) override {
    return {rng_.bernoulli(budget_), budget_, posterior.max_prob()};
  }
  std::string_view name() const override { return "random"; }

 private:
  double budget_;
  Rng rng_;
};

/// Selective sampling on the top-two margin: P(query) = delta / (delta + margin).
class SamplingQuery final : public QueryStrategy {
 public:
  SamplingQuery(double delta, std::uint64_t seed) : delta_(delta), rng_(seed) {
    if (!(delta > 0.0)) throw ConfigError("sampling delta must be > 0");
  }

  static double query_probability(double margin, double delta) { return delta / (delta + margin); }

  QueryDecision decide(const ClassPosterior& posterior) override {
    const double p = query_probability(posterior.margin(), delta_);
    return {rng_.uniform() < p, p, posterior.max_prob()};
  }
  std::string_view name() const override { return "sampling"; }

 private:
  double delta_;
  Rng rng_;
};

struct ThresholdParams {
  double step = 0.01;   // s
  double sigma = 1.0;   // randomization stddev; 0 disables it
  double initial = 1.0;
};

/// Variable uncertainty with randomization: query when max posterior <= theta * eta,
/// eta ~ N(1, sigma); theta shrinks by (1 - s) after a query, grows by (1 + s)
/// otherwise, and is kept inside [1/c, 1].
class RandVarQuery final : public QueryStrategy {
 public:
  RandVarQuery(ThresholdParams params, std::uint64_t seed) : params_(params), theta_(params.initial), rng_(seed) {
    if (!(params.step > 0.0 && params.step <= 1.0)) throw ConfigError("threshold step must lie in (0, 1]");
    if (!(params.sigma >= 0.0)) throw ConfigError("randomization sigma must be >= 0");
  }

  QueryDecision decide(const ClassPosterior& posterior) override {
    const double eta = rng_.normal(1.0, params_.sigma);
    const double randomized = theta_ * eta;
    const double top = posterior.max_prob();
    const bool query = top <= randomized;
    theta_ *= query ? 1.0 - params_.step : 1.0 + params_.step;
    theta_ = std::clamp(theta_, 1.0 / static_cast<double>(posterior.class_count()), 1.0);
    return {query, randomized, top};
  }

  std::optional<double> threshold() const override { return theta_; }
  std::string_view name() const override { return "randvar"; }
  const ThresholdParams& params() const { return params_; }

 private:
  ThresholdParams params_;
  double theta_;
  Rng rng_;
};

}  // namespace driftlab
