#pragma once

// Synthetic drifting streams. A DriftProfile places change points on the
// instance axis; a concept family turns a concept index into a labeled
// distribution. Sudden drift switches concepts at the change point, gradual
// drift mixes old/new concepts with a linearly ramping new-concept probability,
// incremental drift interpolates concept parameters, recurring drift cycles a
// fixed list of concepts.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "driftlab/core.hpp"

namespace driftlab {

enum class DriftKind { Sudden, Gradual, Incremental, Recurring };

inline std::string_view to_string(DriftKind k) {
  switch (k) {
    case DriftKind::Sudden: return "sudden";
    case DriftKind::Gradual: return "gradual";
    case DriftKind::Incremental: return "incremental";
    case DriftKind::Recurring: return "recurring";
  }
  return "?";
}

inline DriftKind parse_drift_kind(std::string_view s) {
  if (s == "sudden") return DriftKind::Sudden;
  if (s == "gradual") return DriftKind::Gradual;
  if (s == "incremental") return DriftKind::Incremental;
  if (s == "recurring") return DriftKind::Recurring;
  throw InvalidProfile("unknown drift kind '" + std::string(s) + "'");
}

struct DriftProfile {
  DriftKind kind = DriftKind::Sudden;
  std::vector<std::size_t> change_points;
  std::size_t transition_width = 0;
  /// Length of the concept cycle for Recurring profiles.
  std::size_t recurring_concepts = 2;

  /// Throws InvalidProfile unless the profile is consistent for a stream of length n.
  void validate(std::size_t n) const {
    if ((transition_width == 0) != (kind == DriftKind::Sudden)) {
      throw InvalidProfile(kind == DriftKind::Sudden ? "sudden drift requires transition width 0"
                                                     : "non-sudden drift requires a positive transition width");
    }
    for (std::size_t i = 0; i < change_points.size(); ++i) {
      if (change_points[i] >= n) {
        throw InvalidProfile("change point " + std::to_string(change_points[i]) + " is not below n=" + std::to_string(n));
      }
      if (i > 0 && change_points[i] <= change_points[i - 1]) {
        throw InvalidProfile("change points must be strictly increasing");
      }
      if (i > 0 && change_points[i] < change_points[i - 1] + transition_width) {
        throw InvalidProfile("transition windows overlap");
      }
    }
    if (kind == DriftKind::Recurring && recurring_concepts < 2) {
      throw InvalidProfile("recurring drift needs at least two concepts");
    }
  }

  /// Concept used in segment `k` (segment 0 precedes the first change point).
  std::size_t concept_of_segment(std::size_t k) const {
    return kind == DriftKind::Recurring ? k % recurring_concepts : k;
  }

  /// Number of change points at or before t.
  std::size_t segment_at(std::size_t t) const {
    return static_cast<std::size_t>(std::upper_bound(change_points.begin(), change_points.end(), t) -
                                    change_points.begin());
  }

  /// Weight of the newest concept at instance t: 0 before any change point,
  /// (t - cp) / width inside a transition window, 1 otherwise.
  double new_concept_probability(std::size_t t) const {
    const std::size_t k = segment_at(t);
    if (k == 0) return 0.0;
    const std::size_t cp = change_points[k - 1];
    if (transition_width == 0 || t >= cp + transition_width) return 1.0;
    return static_cast<double>(t - cp) / static_cast<double>(transition_width);
  }
};

enum class ConceptFamily { GaussianClusters, RotatingHyperplane, SeaThresholds };

inline std::string_view to_string(ConceptFamily f) {
  switch (f) {
    case ConceptFamily::GaussianClusters: return "gaussian-clusters";
    case ConceptFamily::RotatingHyperplane: return "rotating-hyperplane";
    case ConceptFamily::SeaThresholds: return "sea-like-thresholds";
  }
  return "?";
}

inline ConceptFamily parse_concept_family(std::string_view s) {
  if (s == "gaussian-clusters") return ConceptFamily::GaussianClusters;
  if (s == "rotating-hyperplane") return ConceptFamily::RotatingHyperplane;
  if (s == "sea-like-thresholds") return ConceptFamily::SeaThresholds;
  throw InvalidProfile("unknown concept family '" + std::string(s) + "'");
}

struct GeneratorOptions {
  std::size_t dims = 2;          // gaussian-clusters, rotating-hyperplane
  std::size_t classes = 2;       // gaussian-clusters only
  double spread = 0.2;           // per-dimension stddev of gaussian clusters
  double min_separation = 1.0;   // minimum distance between cluster means
  double label_noise = 0.0;      // probability of replacing the label uniformly
};

struct GeneratedStream {
  StreamSchema schema;
  std::vector<Instance> instances;
  /// Concept each instance was drawn from (incremental: the target concept once
  /// its window has started).
  std::vector<std::uint32_t> concept_ids;
};

namespace detail {

inline std::vector<double> concept_parameters(ConceptFamily family, const GeneratorOptions& opt,
                                              std::size_t concept_id, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x10000 + concept_id));
  switch (family) {
    case ConceptFamily::GaussianClusters: {
      // Class means in [-1, 1]^d, redrawn until pairwise separated.
      const std::size_t c = opt.classes, d = opt.dims;
      std::vector<double> best;
      double best_gap = -1.0;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<double> means(c * d);
        for (double& m : means) m = rng.uniform(-1.0, 1.0);
        double gap = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < c; ++a) {
          for (std::size_t b = a + 1; b < c; ++b) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              const double diff = means[a * d + j] - means[b * d + j];
              d2 += diff * diff;
            }
            gap = std::min(gap, std::sqrt(d2));
          }
        }
        if (gap > best_gap) {
          best_gap = gap;
          best = std::move(means);
        }
        if (best_gap >= opt.min_separation) break;
      }
      return best;
    }
    case ConceptFamily::RotatingHyperplane: {
      std::vector<double> w(opt.dims);
      for (double& v : w) v = rng.uniform(-1.0, 1.0);
      return w;
    }
    case ConceptFamily::SeaThresholds: {
      static constexpr double thresholds[] = {8.0, 9.0, 7.0, 9.5};
      return {thresholds[concept_id % 4]};
    }
  }
  return {};
}

inline StreamSchema family_schema(ConceptFamily family, const GeneratorOptions& opt) {
  std::vector<Attribute> attrs;
  const std::size_t dims = family == ConceptFamily::SeaThresholds ? 3 : opt.dims;
  for (std::size_t j = 0; j < dims; ++j) attrs.push_back(Attribute::numeric("x" + std::to_string(j)));
  const std::size_t c = family == ConceptFamily::GaussianClusters ? opt.classes : 2;
  std::vector<std::string> names;
  for (std::size_t y = 0; y < c; ++y) names.push_back("c" + std::to_string(y));
  return StreamSchema(std::move(attrs), std::move(names));
}

inline Instance draw_instance(ConceptFamily family, const GeneratorOptions& opt,
                              const std::vector<double>& params, Rng& rng) {
  Instance x;
  ClassIndex y = 0;
  switch (family) {
    case ConceptFamily::GaussianClusters: {
      y = static_cast<ClassIndex>(rng.below(opt.classes));
      for (std::size_t j = 0; j < opt.dims; ++j) {
        x.features.push_back(FeatureValue::numeric(rng.normal(params[y * opt.dims + j], opt.spread)));
      }
      break;
    }
    case ConceptFamily::RotatingHyperplane: {
      double dot = 0.0, total = 0.0;
      for (std::size_t j = 0; j < opt.dims; ++j) {
        const double v = rng.uniform();
        x.features.push_back(FeatureValue::numeric(v));
        dot += params[j] * v;
        total += params[j];
      }
      y = dot >= 0.5 * total ? 1 : 0;
      break;
    }
    case ConceptFamily::SeaThresholds: {
      for (int j = 0; j < 3; ++j) x.features.push_back(FeatureValue::numeric(rng.uniform(0.0, 10.0)));
      y = x.features[0].value() + x.features[1].value() <= params[0] ? 0 : 1;
      break;
    }
  }
  const std::size_t c = family == ConceptFamily::GaussianClusters ? opt.classes : 2;
  if (opt.label_noise > 0.0 && rng.bernoulli(opt.label_noise)) y = static_cast<ClassIndex>(rng.below(c));
  x.label = y;
  return x;
}

}  // namespace detail

/// Deterministic drifting stream of n instances for a fixed (profile, family, seed).
inline GeneratedStream gen_drift_stream(const DriftProfile& profile, ConceptFamily family, std::size_t n,
                                        std::uint64_t seed, const GeneratorOptions& opt = {}) {
  if (n == 0) throw InvalidProfile("stream length must be positive");
  profile.validate(n);
  if (family == ConceptFamily::GaussianClusters && (opt.classes < 2 || opt.dims < 1)) {
    throw InvalidProfile("gaussian-clusters needs >= 2 classes and >= 1 dimension");
  }
  if (family == ConceptFamily::RotatingHyperplane && opt.dims < 1) {
    throw InvalidProfile("rotating-hyperplane needs >= 1 dimension");
  }

  GeneratedStream out{detail::family_schema(family, opt), {}, {}};
  out.instances.reserve(n);
  out.concept_ids.reserve(n);

  std::vector<std::vector<double>> cache;
  auto params_for = [&](std::size_t concept_id) -> const std::vector<double>& {
    while (cache.size() <= concept_id) cache.push_back(detail::concept_parameters(family, opt, cache.size(), seed));
    return cache[concept_id];
  };

  Rng rng(mix_seed(seed, 0));
  std::vector<double> mixed;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t k = profile.segment_at(t);
    const std::size_t to = profile.concept_of_segment(k);
    const std::size_t from = k == 0 ? to : profile.concept_of_segment(k - 1);
    const double alpha = profile.new_concept_probability(t);
    std::size_t used = to;
    const std::vector<double>* params = nullptr;
    if (alpha >= 1.0 || k == 0) {
      params = &params_for(to);
    } else if (profile.kind == DriftKind::Incremental) {
      params_for(std::max(from, to));  // fill the cache before taking references
      const auto& a = params_for(from);
      const auto& b = params_for(to);
      mixed.resize(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) mixed[i] = (1.0 - alpha) * a[i] + alpha * b[i];
      params = &mixed;
    } else {
      used = rng.bernoulli(alpha) ? to : from;
      params = &params_for(used);
    }
    out.instances.push_back(detail::draw_instance(family, opt, *params, rng));
    out.concept_ids.push_back(static_cast<std::uint32_t>(used));
  }
  return out;
}

}  // namespace driftlab
