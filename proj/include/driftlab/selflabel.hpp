#pragma once

// Self-labeling strategies: decide whether the classifier may train on its own
// prediction. Blind strategies (Fixed, Uni, RandUni, InvUnc) control their
// confidence threshold without a drift signal; informed ones (cDDM, cEDDM,
// WinErr) derive it from a detector's continuous output. All comparisons are
// inclusive: self-label iff max posterior >= threshold.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "driftlab/core.hpp"

namespace driftlab {

/// Read-only view of the signals a self-labeling strategy may consult.
class FeedbackSource {
 public:
  virtual ~FeedbackSource() = default;
  virtual double theta() const = 0;
  virtual double ddm_epsilon() const = 0;
  virtual double eddm_zeta() const = 0;
  virtual double window_epsilon() const = 0;
};

/// Snapshot of feedback values taken before a self-labeling decision.
struct Feedback final : FeedbackSource {
  double theta_value = 1.0;
  double epsilon_value = 0.0;
  double zeta_value = 1.0;
  double window_epsilon_value = 0.0;

  Feedback() = default;
  Feedback(double theta, double epsilon, double zeta, double window_epsilon)
      : theta_value(theta), epsilon_value(epsilon), zeta_value(zeta), window_epsilon_value(window_epsilon) {}

  double theta() const override { return theta_value; }
  double ddm_epsilon() const override { return epsilon_value; }
  double eddm_zeta() const override { return zeta_value; }
  double window_epsilon() const override { return window_epsilon_value; }
};

// Threshold functions ------------------------------------------------------

/// InvUnc: 1 - theta + 1/c.
inline double inverted_uncertainty_threshold(double theta, std::size_t c) {
  return 1.0 - theta + 1.0 / static_cast<double>(c);
}

/// cDDM / WinErr: tanh(2 (epsilon + 1/c)).
inline double error_threshold(double epsilon, std::size_t c) {
  return std::tanh(2.0 * (epsilon + 1.0 / static_cast<double>(c)));
}

/// cEDDM: the linear map with f(0.9) = 1 and f(1) = 1/c.
inline double similarity_threshold(double zeta, std::size_t c) {
  return 1.0 - 10.0 * (zeta - 0.9) * (1.0 - 1.0 / static_cast<double>(c));
}

// Strategies ----------------------------------------------------------------

struct SelfLabelDecision {
  bool accept = false;
  double threshold = 0.0;
};

class SelfLabelStrategy {
 public:
  virtual ~SelfLabelStrategy() = default;
  virtual SelfLabelDecision decide(const ClassPosterior& posterior, const FeedbackSource& feedback) = 0;
  /// Current confidence threshold gamma for strategies that keep one.
  virtual std::optional<double> gamma() const { return std::nullopt; }
  virtual std::string_view name() const = 0;
};

class FixedSelfLabel final : public SelfLabelStrategy {
 public:
  explicit FixedSelfLabel(double gamma = 0.95) : gamma_(gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("fixed self-labeling threshold must lie in (0, 1]");
  }

  static bool accepts(const ClassPosterior& posterior, double gamma) { return posterior.max_prob() >= gamma; }

  SelfLabelDecision decide(const ClassPosterior& posterior, const FeedbackSource&) override {
    return {accepts(posterior, gamma_), gamma_};
  }
  std::optional<double> gamma() const override { return gamma_; }
  std::string_view name() const override { return "fixed"; }

 private:
  double gamma_;
};

struct UniParams {
  double step = 0.01;
  double sigma = 1.0;  // RandUni only
  double initial = 1.0;
};

/// Uni (sigma unused) and RandUni: accept when max posterior >= gamma * eta,
/// eta ~ N(1, sigma); gamma grows by (1 + s) after acceptance, shrinks by
/// (1 - s) otherwise, clamped to [1/c, 1].
class UniSelfLabel final : public SelfLabelStrategy {
 public:
  UniSelfLabel(UniParams params, bool randomized, std::uint64_t seed = 0)
      : params_(params), gamma_(params.initial), randomized_(randomized), rng_(seed) {
    if (!(params.step > 0.0 && params.step <= 1.0)) throw ConfigError("threshold step must lie in (0, 1]");
    if (!(params.sigma >= 0.0)) throw ConfigError("randomization sigma must be >= 0");
  }

  SelfLabelDecision decide(const ClassPosterior& posterior, const FeedbackSource&) override {
    const double threshold = randomized_ ? gamma_ * rng_.normal(1.0, params_.sigma) : gamma_;
    const bool accept = posterior.max_prob() >= threshold;
    gamma_ *= accept ? 1.0 + params_.step : 1.0 - params_.step;
    gamma_ = std::clamp(gamma_, 1.0 / static_cast<double>(posterior.class_count()), 1.0);
    return {accept, threshold};
  }

  std::optional<double> gamma() const override { return gamma_; }
  std::string_view name() const override { return randomized_ ? "randuni" : "uni"; }

 private:
  UniParams params_;
  double gamma_;
  bool randomized_;
  Rng rng_;
};

class InvUncSelfLabel final : public SelfLabelStrategy {
 public:
  SelfLabelDecision decide(const ClassPosterior& posterior, const FeedbackSource& feedback) override {
    const double t = inverted_uncertainty_threshold(feedback.theta(), posterior.class_count());
    return {posterior.max_prob() >= t, t};
  }
  std::string_view name() const override { return "invunc"; }
};

class CddmSelfLabel final : public SelfLabelStrategy {
 public:
  SelfLabelDecision decide(const ClassPosterior& posterior, const FeedbackSource& feedback) override {
    const double t = error_threshold(feedback.ddm_epsilon(), posterior.class_count());
    return {posterior.max_prob() >= t, t};
  }
  std::string_view name() const override { return "cddm"; }
};

class CeddmSelfLabel final : public SelfLabelStrategy {
 public:
  SelfLabelDecision decide(const ClassPosterior& posterior, const FeedbackSource& feedback) override {
    const double t = similarity_threshold(feedback.eddm_zeta(), posterior.class_count());
    return {posterior.max_prob() >= t, t};
  }
  std::string_view name() const override { return "ceddm"; }
};

class WinErrSelfLabel final : public SelfLabelStrategy {
 public:
  SelfLabelDecision decide(const ClassPosterior& posterior, const FeedbackSource& feedback) override {
    const double t = error_threshold(feedback.window_epsilon(), posterior.class_count());
    return {posterior.max_prob() >= t, t};
  }
  std::string_view name() const override { return "winerr"; }
};

}  // namespace driftlab
