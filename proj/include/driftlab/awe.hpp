#pragma once

// Accuracy-weighted ensemble over chunks of labeled instances. Each full chunk
// yields a new member trained on it; all members are then re-weighted by their
// accuracy on that chunk, and the weakest is dropped once the committee exceeds
// its capacity. Members are not updated between chunk boundaries.

#include <memory>
#include <utility>
#include <vector>

#include "driftlab/classifier.hpp"

namespace driftlab {

struct AweParams {
  std::size_t chunk_size = 500;
  std::size_t max_members = 10;
};

class AccuracyWeightedEnsemble final : public Classifier {
 public:
  struct Member {
    std::unique_ptr<Classifier> model;
    double weight = 0.0;
  };

  /// `prototype` is cloned and reset to build each new member.
  AccuracyWeightedEnsemble(std::unique_ptr<Classifier> prototype, AweParams params = {})
      : Classifier(prototype ? prototype->schema_ptr() : nullptr), prototype_(std::move(prototype)), params_(params) {
    if (params_.chunk_size == 0) throw ConfigError("AWE chunk size must be positive");
    if (params_.max_members == 0) throw ConfigError("AWE needs room for at least one member");
    prototype_->reset();
  }

  AccuracyWeightedEnsemble(const AccuracyWeightedEnsemble& other)
      : Classifier(other), prototype_(other.prototype_->clone()), params_(other.params_), chunk_(other.chunk_) {
    for (const auto& m : other.members_) members_.push_back({m.model->clone(), m.weight});
  }

  ClassPosterior predict(FeatureView x) const override {
    const std::size_t c = class_count();
    std::vector<double> acc(c, 0.0);
    double total = 0.0;
    for (const auto& m : members_) {
      if (m.weight <= 0.0) continue;
      const auto p = m.model->predict(x);
      for (std::size_t y = 0; y < c; ++y) acc[y] += m.weight * p[y];
      total += m.weight;
    }
    if (total <= 0.0) return ClassPosterior::uniform(c);
    return ClassPosterior::from_weights(std::move(acc));
  }

  void train(FeatureView x, ClassIndex y) override {
    check_label(y);
    chunk_.push_back({std::vector<FeatureValue>(x.begin(), x.end()), y});
    if (chunk_.size() >= params_.chunk_size) close_chunk();
  }

  void reset() override {
    members_.clear();
    chunk_.clear();
  }

  std::unique_ptr<Classifier> clone() const override { return std::make_unique<AccuracyWeightedEnsemble>(*this); }
  std::string_view name() const override { return "awe"; }

  /// Adds a member with a fixed weight (used for composing ensembles directly).
  void add_member(std::unique_ptr<Classifier> model, double weight) {
    members_.push_back({std::move(model), weight});
  }

  const std::vector<Member>& members() const { return members_; }
  std::size_t buffered() const { return chunk_.size(); }
  const AweParams& params() const { return params_; }

 private:
  struct Labeled {
    std::vector<FeatureValue> features;
    ClassIndex label;
  };

  double accuracy_on_chunk(const Classifier& model) const {
    std::size_t hits = 0;
    for (const auto& s : chunk_) hits += model.predict(s.features).predicted() == s.label ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(chunk_.size());
  }

  void close_chunk() {
    auto fresh = prototype_->clone();
    fresh->reset();
    for (const auto& s : chunk_) fresh->train(s.features, s.label);
    members_.push_back({std::move(fresh), 0.0});
    for (auto& m : members_) m.weight = accuracy_on_chunk(*m.model);
    if (members_.size() > params_.max_members) {
      std::size_t worst = 0;
      for (std::size_t i = 1; i < members_.size(); ++i) {
        if (members_[i].weight < members_[worst].weight) worst = i;
      }
      members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    chunk_.clear();
  }

  std::unique_ptr<Classifier> prototype_;
  AweParams params_;
  std::vector<Member> members_;
  std::vector<Labeled> chunk_;
};

}  // namespace driftlab
