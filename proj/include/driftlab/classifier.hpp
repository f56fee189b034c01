#pragma once

#include <memory>
#include <string_view>

#include "driftlab/core.hpp"

namespace driftlab {

/// Incremental classifier contract. predict() never mutates state and returns
/// the uniform distribution before any training.
class Classifier {
 public:
  explicit Classifier(std::shared_ptr<const StreamSchema> schema) : schema_(std::move(schema)) {
    if (!schema_) throw ConfigError("classifier requires a schema");
  }
  virtual ~Classifier() = default;

  virtual ClassPosterior predict(FeatureView x) const = 0;
  virtual void train(FeatureView x, ClassIndex y) = 0;
  virtual void reset() = 0;
  virtual std::unique_ptr<Classifier> clone() const = 0;
  virtual std::string_view name() const = 0;

  const StreamSchema& schema() const { return *schema_; }
  const std::shared_ptr<const StreamSchema>& schema_ptr() const { return schema_; }
  std::size_t class_count() const { return schema_->class_count(); }

 protected:
  Classifier(const Classifier&) = default;
  Classifier& operator=(const Classifier&) = default;

  void check_label(ClassIndex y) const {
    if (y >= class_count()) {
      throw LabelOutOfRange("label " + std::to_string(y) + " outside [0, " + std::to_string(class_count()) + ")");
    }
  }

 private:
  std::shared_ptr<const StreamSchema> schema_;
};

}  // namespace driftlab
