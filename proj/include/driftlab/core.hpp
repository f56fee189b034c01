#pragma once

// Core data model shared by every driftlab component: feature values, stream
// schemas, instances, class posteriors, the error hierarchy and the seeded
// random source used by all randomized strategies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace driftlab {

using ClassIndex = std::uint32_t;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DRIFTLAB_DEFINE_ERROR(Name)       \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

DRIFTLAB_DEFINE_ERROR(SchemaMismatch)
DRIFTLAB_DEFINE_ERROR(UnknownClass)
DRIFTLAB_DEFINE_ERROR(MalformedHeader)
DRIFTLAB_DEFINE_ERROR(SparseNotSupported)
DRIFTLAB_DEFINE_ERROR(UnknownNominalValue)
DRIFTLAB_DEFINE_ERROR(InvalidProfile)
DRIFTLAB_DEFINE_ERROR(LabelOutOfRange)
DRIFTLAB_DEFINE_ERROR(DomainError)
DRIFTLAB_DEFINE_ERROR(ConfigError)
DRIFTLAB_DEFINE_ERROR(EmptyStream)
DRIFTLAB_DEFINE_ERROR(IoError)

#undef DRIFTLAB_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Feature values

/// One attribute value: numeric, nominal (category index) or missing.
class FeatureValue {
 public:
  enum class Kind : std::uint8_t { Missing, Numeric, Nominal };

  constexpr FeatureValue() = default;

  static constexpr FeatureValue numeric(double v) { return FeatureValue(Kind::Numeric, v, 0); }
  static constexpr FeatureValue nominal(std::uint32_t category) {
    return FeatureValue(Kind::Nominal, 0.0, category);
  }
  static constexpr FeatureValue missing() { return FeatureValue(); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_missing() const { return kind_ == Kind::Missing; }
  constexpr bool is_numeric() const { return kind_ == Kind::Numeric; }
  constexpr bool is_nominal() const { return kind_ == Kind::Nominal; }

  constexpr double value() const { return value_; }
  constexpr std::uint32_t category() const { return category_; }

  friend constexpr bool operator==(const FeatureValue& a, const FeatureValue& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::Missing: return true;
      case Kind::Numeric: return a.value_ == b.value_;
      case Kind::Nominal: return a.category_ == b.category_;
    }
    return false;
  }

 private:
  constexpr FeatureValue(Kind k, double v, std::uint32_t c) : kind_(k), value_(v), category_(c) {}

  Kind kind_ = Kind::Missing;
  double value_ = 0.0;
  std::uint32_t category_ = 0;
};

using FeatureView = std::span<const FeatureValue>;

// ---------------------------------------------------------------------------
// Schema

struct Attribute {
  enum class Kind : std::uint8_t { Numeric, Nominal };

  std::string name;
  Kind kind = Kind::Numeric;
  /// Category labels for nominal attributes; empty for numeric ones.
  std::vector<std::string> categories;

  static Attribute numeric(std::string name) { return {std::move(name), Kind::Numeric, {}}; }
  static Attribute nominal(std::string name, std::vector<std::string> categories) {
    return {std::move(name), Kind::Nominal, std::move(categories)};
  }

  bool is_numeric() const { return kind == Kind::Numeric; }
  bool is_nominal() const { return kind == Kind::Nominal; }
  std::size_t cardinality() const { return categories.size(); }

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Immutable description of a stream: ordered attributes and class names.
class StreamSchema {
 public:
  StreamSchema() = default;

  StreamSchema(std::vector<Attribute> attributes, std::vector<std::string> class_names,
               std::string class_attribute = "class")
      : attributes_(std::move(attributes)),
        class_names_(std::move(class_names)),
        class_attribute_(std::move(class_attribute)) {
    if (class_names_.size() < 2) {
      throw SchemaMismatch("a stream needs at least two classes, got " +
                           std::to_string(class_names_.size()));
    }
    std::unordered_set<std::string> seen;
    for (const auto& a : attributes_) {
      if (!seen.insert(a.name).second) throw SchemaMismatch("duplicate attribute name '" + a.name + "'");
      if (a.is_nominal() && a.categories.empty()) {
        throw SchemaMismatch("nominal attribute '" + a.name + "' declares no categories");
      }
    }
  }

  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute& attribute(std::size_t i) const { return attributes_.at(i); }
  std::size_t attribute_count() const { return attributes_.size(); }

  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t class_count() const { return class_names_.size(); }
  const std::string& class_attribute() const { return class_attribute_; }

  std::optional<ClassIndex> class_index(std::string_view name) const {
    for (std::size_t i = 0; i < class_names_.size(); ++i) {
      if (class_names_[i] == name) return static_cast<ClassIndex>(i);
    }
    return std::nullopt;
  }

  friend bool operator==(const StreamSchema&, const StreamSchema&) = default;

 private:
  std::vector<Attribute> attributes_;
  std::vector<std::string> class_names_;
  std::string class_attribute_ = "class";
};

// ---------------------------------------------------------------------------
// Instances

struct Instance {
  std::vector<FeatureValue> features;
  std::optional<ClassIndex> label;

  FeatureView view() const { return features; }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Throws SchemaMismatch / LabelOutOfRange when `x` does not conform to `schema`.
inline void validate(const StreamSchema& schema, const Instance& x) {
  if (x.features.size() != schema.attribute_count()) {
    throw SchemaMismatch("instance has " + std::to_string(x.features.size()) +
                         " features, schema declares " + std::to_string(schema.attribute_count()));
  }
  for (std::size_t i = 0; i < x.features.size(); ++i) {
    const auto& f = x.features[i];
    const auto& a = schema.attribute(i);
    if (f.is_missing()) continue;
    if (f.is_numeric() != a.is_numeric()) {
      throw SchemaMismatch("feature kind differs from schema at attribute '" + a.name + "'");
    }
    if (f.is_nominal() && f.category() >= a.cardinality()) {
      throw SchemaMismatch("nominal index out of range at attribute '" + a.name + "'");
    }
  }
  if (x.label && *x.label >= schema.class_count()) {
    throw LabelOutOfRange("label " + std::to_string(*x.label) + " outside [0, " +
                          std::to_string(schema.class_count()) + ")");
  }
}

// ---------------------------------------------------------------------------
// Posterior

/// Normalized distribution over c classes.
class ClassPosterior {
 public:
  ClassPosterior() = default;

  static ClassPosterior uniform(std::size_t class_count) {
    return ClassPosterior(std::vector<double>(class_count, 1.0 / static_cast<double>(class_count)));
  }

  /// Normalizes nonnegative weights; all-zero (or empty mass) yields uniform.
  static ClassPosterior from_weights(std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0) || !std::isfinite(total)) return uniform(weights.size());
    for (double& w : weights) w /= total;
    return ClassPosterior(std::move(weights));
  }

  /// Normalizes log-scores with max subtraction; -inf entries get probability 0.
  static ClassPosterior from_log_scores(std::span<const double> scores) {
    double top = -std::numeric_limits<double>::infinity();
    for (double s : scores) top = std::max(top, s);
    if (!std::isfinite(top)) return uniform(scores.size());
    std::vector<double> w(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) w[i] = std::exp(scores[i] - top);
    return from_weights(std::move(w));
  }

  std::size_t class_count() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// Index of the largest entry, lowest index on ties.
  ClassIndex predicted() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs_.size(); ++i) {
      if (probs_[i] > probs_[best]) best = i;
    }
    return static_cast<ClassIndex>(best);
  }

  double max_prob() const { return probs_.empty() ? 0.0 : probs_[predicted()]; }

  /// p(best) - p(second best); 0 for a single class.
  double margin() const {
    if (probs_.size() < 2) return 0.0;
    double first = -1.0, second = -1.0;
    for (double p : probs_) {
      if (p > first) {
        second = first;
        first = p;
      } else if (p > second) {
        second = p;
      }
    }
    return first - second;
  }

  friend bool operator==(const ClassPosterior&, const ClassPosterior&) = default;

 private:
  explicit ClassPosterior(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

// ---------------------------------------------------------------------------
// Randomness

/// Seeded generator with platform-independent uniform and normal draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

  bool bernoulli(double p) { return uniform() < p; }

  /// One Normal(mean, stddev) variate; Box-Muller without caching, so each call
  /// advances the engine by exactly two words.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; derives independent sub-seeds from one run seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace driftlab
