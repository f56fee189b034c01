#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "driftlab/selflabel.hpp"

using namespace driftlab;

namespace {

ClassPosterior with_max(double top, std::size_t c = 2) {
  std::vector<double> w(c, (1.0 - top) / static_cast<double>(c - 1));
  w[0] = top;
  return ClassPosterior::from_weights(w);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Records which feedback fields a strategy reads.
struct ProbeFeedback final : FeedbackSource {
  mutable int theta_reads = 0, epsilon_reads = 0, zeta_reads = 0, window_reads = 0;
  double theta() const override {
    ++theta_reads;
    return 0.8;
  }
  double ddm_epsilon() const override {
    ++epsilon_reads;
    return 0.1;
  }
  double eddm_zeta() const override {
    ++zeta_reads;
    return 0.95;
  }
  double window_epsilon() const override {
    ++window_reads;
    return 0.2;
  }
};

}  // namespace

TEST(FixedSelfLabel, InclusiveThreshold) {
  const Feedback fb;
  FixedSelfLabel fixed;
  EXPECT_TRUE(fixed.decide(with_max(0.97), fb).accept);
  EXPECT_TRUE(FixedSelfLabel::accepts(with_max(0.95), 0.95));
  EXPECT_FALSE(fixed.decide(ClassPosterior::uniform(2), fb).accept);
  EXPECT_FALSE(fixed.decide(with_max(0.9499), fb).accept);
  EXPECT_THROW(FixedSelfLabel(0.0), ConfigError);
}

TEST(UniSelfLabel, StepArithmetic) {
  const Feedback fb;
  UniSelfLabel up({.step = 0.01, .sigma = 1.0, .initial = 0.9}, false);
  EXPECT_TRUE(up.decide(with_max(0.95), fb).accept);
  EXPECT_NEAR(*up.gamma(), 0.909, 1e-15);
  UniSelfLabel down({.step = 0.01, .sigma = 1.0, .initial = 0.9}, false);
  EXPECT_FALSE(down.decide(with_max(0.5), fb).accept);
  EXPECT_NEAR(*down.gamma(), 0.891, 1e-15);
}

TEST(UniSelfLabel, ConfidentStreamMatchesStepSimulation) {
  const Feedback fb;
  Rng rng(4);
  UniSelfLabel uni({}, false);
  double gamma = 1.0;
  int accepted_below_one = 0;
  for (int t = 0; t < 5000; ++t) {
    const double top = rng.bernoulli(0.5) ? 1.0 : 0.99 + 0.01 * rng.uniform();
    const bool want = top >= gamma;
    gamma = std::clamp(gamma * (want ? 1.01 : 0.99), 0.5, 1.0);
    const auto d = uni.decide(with_max(top), fb);
    ASSERT_EQ(d.accept, want);
    ASSERT_DOUBLE_EQ(*uni.gamma(), gamma);
    if (t > 100 && d.accept && top < 1.0) ++accepted_below_one;
  }
  EXPECT_GT(accepted_below_one, 0);

  // Only fully confident predictions: gamma sits at the clamp and every one passes.
  UniSelfLabel saturated({}, false);
  for (int t = 0; t < 1000; ++t) {
    ASSERT_TRUE(saturated.decide(with_max(1.0), fb).accept);
    ASSERT_EQ(*saturated.gamma(), 1.0);
  }
  EXPECT_FALSE(saturated.decide(with_max(0.9999), fb).accept);
}

TEST(UniSelfLabel, GammaClampedToClassFloor) {
  const Feedback fb;
  UniSelfLabel uni({.step = 0.1}, false);
  for (int t = 0; t < 200; ++t) uni.decide(ClassPosterior::uniform(4), fb);
  EXPECT_GE(*uni.gamma(), 0.25);
  for (int t = 0; t < 200; ++t) uni.decide(with_max(1.0, 4), fb);
  EXPECT_LE(*uni.gamma(), 1.0);
}

TEST(RandUniSelfLabel, ZeroSigmaEqualsUni) {
  const Feedback fb;
  UniSelfLabel uni({.sigma = 0.0}, false), rnd({.sigma = 0.0}, true, 77);
  Rng rng(6);
  for (int t = 0; t < 3000; ++t) {
    const auto p = with_max(0.5 + 0.5 * rng.uniform());
    const auto a = uni.decide(p, fb), b = rnd.decide(p, fb);
    ASSERT_EQ(a.accept, b.accept);
    ASSERT_EQ(*uni.gamma(), *rnd.gamma());
  }
}

TEST(RandUniSelfLabel, NegativeDrawAccepts) {
  const Feedback fb;
  UniSelfLabel rnd({.step = 0.01, .sigma = 50.0}, true, 3);
  int negative = 0;
  for (int t = 0; t < 2000; ++t) {
    const auto d = rnd.decide(ClassPosterior::uniform(2), fb);
    if (d.threshold < 0.0) {
      ++negative;
      EXPECT_TRUE(d.accept);
    }
  }
  EXPECT_GT(negative, 500);
}

TEST(RandUniSelfLabel, AcceptanceMatchesGaussianClosedForm) {
  const Feedback fb;
  for (double top : {0.9, 0.5, 0.99}) {
    // Accept iff top >= 0.9 * eta, eta ~ N(1, 1).
    const double expected = normal_cdf(top / 0.9 - 1.0);
    int hits = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
      UniSelfLabel rnd({.step = 0.01, .sigma = 1.0, .initial = 0.9}, true, static_cast<std::uint64_t>(i) * 7919 + 1);
      hits += rnd.decide(with_max(top), fb).accept ? 1 : 0;
    }
    EXPECT_NEAR(static_cast<double>(hits) / n, expected, 0.01) << "top " << top;
  }
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
}

TEST(InvUnc, ThresholdArithmetic) {
  EXPECT_DOUBLE_EQ(inverted_uncertainty_threshold(1.0, 2), 0.5);
  EXPECT_DOUBLE_EQ(inverted_uncertainty_threshold(0.5, 2), 1.0);
  EXPECT_DOUBLE_EQ(inverted_uncertainty_threshold(0.75, 4), 0.5);
  InvUncSelfLabel inv;
  EXPECT_TRUE(inv.decide(ClassPosterior::uniform(2), Feedback(1.0, 0, 1, 0)).accept);
  EXPECT_FALSE(inv.decide(with_max(0.999), Feedback(0.5, 0, 1, 0)).accept);
  EXPECT_TRUE(inv.decide(with_max(1.0), Feedback(0.5, 0, 1, 0)).accept);
}

TEST(ErrorThreshold, TanhValues) {
  EXPECT_NEAR(error_threshold(0.0, 2), 0.7615941559557649, 1e-15);
  EXPECT_NEAR(error_threshold(0.5, 2), 0.9640275800758169, 1e-15);
  EXPECT_NEAR(error_threshold(1.0, 2), 0.9950547536867305, 1e-15);
  for (double e = 0.0; e <= 2.0; e += 0.01) {
    for (std::size_t c : {2u, 3u, 10u}) {
      const double t = error_threshold(e, c);
      EXPECT_LT(t, 1.0);
      EXPECT_GE(t, std::tanh(2.0 / static_cast<double>(c)) - 1e-15);
      EXPECT_GT(t, 1.0 / static_cast<double>(c));
      EXPECT_GT(error_threshold(e + 0.01, c), t);
    }
  }
}

TEST(CeddmThreshold, LinearMap) {
  EXPECT_DOUBLE_EQ(similarity_threshold(0.9, 2), 1.0);
  EXPECT_DOUBLE_EQ(similarity_threshold(0.9, 7), 1.0);
  EXPECT_NEAR(similarity_threshold(1.0, 2), 0.5, 1e-15);
  EXPECT_NEAR(similarity_threshold(1.0, 5), 0.2, 1e-15);
  EXPECT_NEAR(similarity_threshold(0.95, 2), 0.75, 1e-15);
  for (double z = 0.9; z < 0.999; z += 0.001) EXPECT_LT(similarity_threshold(z + 0.001, 3), similarity_threshold(z, 3));
}

TEST(WinErr, SharesConditionWithCddm) {
  CddmSelfLabel cddm;
  WinErrSelfLabel winerr;
  Rng rng(12);
  for (int t = 0; t < 2000; ++t) {
    const double e = 2.0 * rng.uniform();
    const std::size_t c = 2 + rng.below(4);
    std::vector<double> w(c);
    for (double& v : w) v = rng.uniform();
    const auto p = ClassPosterior::from_weights(w);
    const auto a = cddm.decide(p, Feedback(1, e, 1, 0));
    const auto b = winerr.decide(p, Feedback(1, 0, 1, e));
    ASSERT_EQ(a.accept, b.accept);
    ASSERT_EQ(a.threshold, b.threshold);
  }
  // Empty window and a window of errors.
  EXPECT_NEAR(winerr.decide(with_max(0.8), Feedback()).threshold, 0.76159, 1e-5);
  EXPECT_NEAR(winerr.decide(with_max(0.8), Feedback(1, 0, 1, 1.0)).threshold, 0.99505, 1e-5);
}

TEST(SelfLabel, InvUncAntiMonotoneInTheta) {
  for (double th = 0.5; th < 1.0; th += 0.01) {
    EXPECT_GT(inverted_uncertainty_threshold(th, 2), inverted_uncertainty_threshold(th + 0.01, 2));
  }
}

TEST(SelfLabel, DecisionsMonotoneInMaxPosterior) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Feedback fb(0.5 + 0.5 * rng.uniform(), rng.uniform(), 0.9 + 0.1 * rng.uniform(), rng.uniform());
    const double lo = 0.5 + 0.5 * rng.uniform();
    const double hi = lo + (1.0 - lo) * rng.uniform();
    std::vector<std::pair<std::unique_ptr<SelfLabelStrategy>, std::unique_ptr<SelfLabelStrategy>>> pairs;
    pairs.emplace_back(std::make_unique<FixedSelfLabel>(), std::make_unique<FixedSelfLabel>());
    pairs.emplace_back(std::make_unique<UniSelfLabel>(UniParams{}, false), std::make_unique<UniSelfLabel>(UniParams{}, false));
    pairs.emplace_back(std::make_unique<UniSelfLabel>(UniParams{}, true, trial),
                       std::make_unique<UniSelfLabel>(UniParams{}, true, trial));
    pairs.emplace_back(std::make_unique<InvUncSelfLabel>(), std::make_unique<InvUncSelfLabel>());
    pairs.emplace_back(std::make_unique<CddmSelfLabel>(), std::make_unique<CddmSelfLabel>());
    pairs.emplace_back(std::make_unique<CeddmSelfLabel>(), std::make_unique<CeddmSelfLabel>());
    pairs.emplace_back(std::make_unique<WinErrSelfLabel>(), std::make_unique<WinErrSelfLabel>());
    for (auto& [a, b] : pairs) {
      if (a->decide(with_max(lo), fb).accept) {
        EXPECT_TRUE(b->decide(with_max(hi), fb).accept) << a->name();
      }
    }
  }
}

TEST(SelfLabel, BlindAndInformedReadOnlyTheirFeedback) {
  const auto p = with_max(0.9);
  {
    ProbeFeedback probe;
    FixedSelfLabel fixed;
    UniSelfLabel uni({}, false), rnd({}, true, 1);
    for (int i = 0; i < 10; ++i) {
      fixed.decide(p, probe);
      uni.decide(p, probe);
      rnd.decide(p, probe);
    }
    EXPECT_EQ(probe.theta_reads + probe.epsilon_reads + probe.zeta_reads + probe.window_reads, 0);
  }
  auto reads = [&](SelfLabelStrategy& s) {
    ProbeFeedback probe;
    s.decide(p, probe);
    EXPECT_FALSE(s.gamma().has_value()) << s.name();
    return std::array<int, 4>{probe.theta_reads, probe.epsilon_reads, probe.zeta_reads, probe.window_reads};
  };
  InvUncSelfLabel inv;
  CddmSelfLabel cddm;
  CeddmSelfLabel ceddm;
  WinErrSelfLabel winerr;
  EXPECT_EQ(reads(inv), (std::array<int, 4>{1, 0, 0, 0}));
  EXPECT_EQ(reads(cddm), (std::array<int, 4>{0, 1, 0, 0}));
  EXPECT_EQ(reads(ceddm), (std::array<int, 4>{0, 0, 1, 0}));
  EXPECT_EQ(reads(winerr), (std::array<int, 4>{0, 0, 0, 1}));
}
