#include <gtest/gtest.h>

#include <sstream>

#include "driftlab/generators.hpp"
#include "driftlab/io.hpp"

using namespace driftlab;

namespace {

std::string dump(const GeneratedStream& g) {
  std::ostringstream out;
  write_csv(out, g.schema, g.instances);
  return out.str();
}

DriftProfile sudden_at(std::size_t cp) {
  DriftProfile p;
  p.change_points = {cp};
  return p;
}

}  // namespace

TEST(Generators, SuddenSwitchesExactlyAtChangePoint) {
  for (auto family : {ConceptFamily::GaussianClusters, ConceptFamily::RotatingHyperplane, ConceptFamily::SeaThresholds}) {
    auto g = gen_drift_stream(sudden_at(5000), family, 10000, 11);
    ASSERT_EQ(g.instances.size(), 10000u);
    for (std::size_t t = 0; t < 10000; ++t) ASSERT_EQ(g.concept_ids[t], t < 5000 ? 0u : 1u) << "t=" << t;
  }
}

TEST(Generators, SuddenChangesTheLabelingFunction) {
  auto g = gen_drift_stream(sudden_at(5000), ConceptFamily::GaussianClusters, 10000, 3);
  auto h = gen_drift_stream({}, ConceptFamily::GaussianClusters, 10000, 3);
  // With no change point the second half keeps concept 0, so the drifted stream must differ there.
  EXPECT_EQ(h.concept_ids.back(), 0u);
  std::size_t differing = 0;
  for (std::size_t t = 5000; t < 10000; ++t) differing += g.instances[t].features != h.instances[t].features;
  EXPECT_GT(differing, 4000u);
}

TEST(Generators, GradualRampHitsHalfAtMidpoint) {
  DriftProfile p;
  p.kind = DriftKind::Gradual;
  p.change_points = {4000};
  p.transition_width = 2000;
  EXPECT_DOUBLE_EQ(p.new_concept_probability(5000), 0.5);
  EXPECT_DOUBLE_EQ(p.new_concept_probability(3999), 0.0);
  EXPECT_DOUBLE_EQ(p.new_concept_probability(4000), 0.0);
  EXPECT_DOUBLE_EQ(p.new_concept_probability(6000), 1.0);

  // Empirical frequency of the new concept in a narrow band around the midpoint, pooled over seeds.
  std::size_t hits = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto g = gen_drift_stream(p, ConceptFamily::SeaThresholds, 10000, seed);
    for (std::size_t t = 4900; t < 5100; ++t) {
      hits += g.concept_ids[t] == 1u;
      ++total;
    }
    for (std::size_t t = 0; t < 4000; ++t) ASSERT_EQ(g.concept_ids[t], 0u);
    for (std::size_t t = 6000; t < 10000; ++t) ASSERT_EQ(g.concept_ids[t], 1u);
  }
  EXPECT_NEAR(static_cast<double>(hits) / total, 0.5, 0.03);
}

TEST(Generators, IncrementalInterpolatesParameters) {
  DriftProfile p;
  p.kind = DriftKind::Incremental;
  p.change_points = {1000};
  p.transition_width = 1000;
  auto g = gen_drift_stream(p, ConceptFamily::GaussianClusters, 3000, 9);
  EXPECT_EQ(g.concept_ids[500], 0u);
  EXPECT_EQ(g.concept_ids[1500], 1u);
  EXPECT_EQ(g.concept_ids[2500], 1u);
}

TEST(Generators, RecurringCyclesThroughConcepts) {
  DriftProfile p;
  p.kind = DriftKind::Recurring;
  p.change_points = {100, 200, 300, 400};
  p.transition_width = 1;
  p.recurring_concepts = 2;
  auto g = gen_drift_stream(p, ConceptFamily::GaussianClusters, 500, 4);
  EXPECT_EQ(g.concept_ids[50], 0u);
  EXPECT_EQ(g.concept_ids[150], 1u);
  EXPECT_EQ(g.concept_ids[250], 0u);
  EXPECT_EQ(g.concept_ids[350], 1u);
  EXPECT_EQ(g.concept_ids[450], 0u);

  // Recurrence reuses the exact concept: cluster-conditional means in segments 0 and 2 agree.
  auto mean_of = [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    std::size_t k = 0;
    for (std::size_t t = lo + 5; t < hi; ++t) {
      if (g.instances[t].label == ClassIndex{0}) {
        s += g.instances[t].features[0].value();
        ++k;
      }
    }
    return s / k;
  };
  EXPECT_NEAR(mean_of(0, 100), mean_of(200, 300), 0.15);
}

TEST(Generators, Deterministic) {
  DriftProfile p;
  p.kind = DriftKind::Gradual;
  p.change_points = {300, 700};
  p.transition_width = 100;
  for (auto family : {ConceptFamily::GaussianClusters, ConceptFamily::RotatingHyperplane, ConceptFamily::SeaThresholds}) {
    EXPECT_EQ(dump(gen_drift_stream(p, family, 1000, 77)), dump(gen_drift_stream(p, family, 1000, 77)));
    EXPECT_NE(dump(gen_drift_stream(p, family, 1000, 77)), dump(gen_drift_stream(p, family, 1000, 78)));
  }
}

TEST(Generators, InstancesSatisfySchema) {
  GeneratorOptions opt;
  opt.dims = 5;
  opt.classes = 4;
  opt.label_noise = 0.1;
  auto g = gen_drift_stream(sudden_at(500), ConceptFamily::GaussianClusters, 1000, 2, opt);
  EXPECT_EQ(g.schema.attribute_count(), 5u);
  EXPECT_EQ(g.schema.class_count(), 4u);
  for (const auto& x : g.instances) EXPECT_NO_THROW(validate(g.schema, x));
}

TEST(Generators, ProfileErrors) {
  auto bad = sudden_at(10000);
  EXPECT_THROW(gen_drift_stream(bad, ConceptFamily::GaussianClusters, 10000, 1), InvalidProfile);
  DriftProfile non_monotone;
  non_monotone.change_points = {500, 200};
  EXPECT_THROW(gen_drift_stream(non_monotone, ConceptFamily::GaussianClusters, 1000, 1), InvalidProfile);
  DriftProfile wide_sudden = sudden_at(500);
  wide_sudden.transition_width = 100;
  EXPECT_THROW(wide_sudden.validate(1000), InvalidProfile);
  DriftProfile overlap;
  overlap.kind = DriftKind::Gradual;
  overlap.change_points = {100, 150};
  overlap.transition_width = 100;
  EXPECT_THROW(overlap.validate(1000), InvalidProfile);
  EXPECT_THROW(gen_drift_stream({}, ConceptFamily::GaussianClusters, 0, 1), InvalidProfile);
  EXPECT_THROW(parse_drift_kind("abrupt-ish"), InvalidProfile);
  EXPECT_EQ(parse_concept_family("sea-like-thresholds"), ConceptFamily::SeaThresholds);
}
