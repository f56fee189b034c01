// Runs ALRV alone and ALRV + WinErr over a stream with one sudden drift and
// prints the windowed accuracy every 2000 instances.

#include <cstdio>
#include <memory>

#include "driftlab/generators.hpp"
#include "driftlab/hybrid.hpp"

int main() {
  using namespace driftlab;

  DriftProfile profile;
  profile.change_points = {10000};
  const auto stream = gen_drift_stream(profile, ConceptFamily::GaussianClusters, 20000, 7, {.dims = 4, .classes = 3});
  const auto schema = std::make_shared<const StreamSchema>(stream.schema);

  for (auto sl : {SelfLabelKind::None, SelfLabelKind::WinErr}) {
    HybridConfig cfg;
    cfg.learner.kind = LearnerKind::HoeffdingTree;
    cfg.active = ActiveKind::RandVar;
    cfg.self_label = sl;
    cfg.budget = 0.05;
    cfg.seed = 3;

    HybridLearner loop(cfg, schema);
    std::printf("%s\n", sl == SelfLabelKind::None ? "ALRV" : "ALRV + WinErr");
    const auto result = run_stream(
        loop, stream.instances,
        [](const StepRecord& r) {
          if (r.seen % 2000 == 0)
            std::printf("  %6zu  acc %.3f  spend %.4f\n", r.seen, r.windowed_accuracy,
                        static_cast<double>(r.labeled) / static_cast<double>(r.seen));
        },
        false);
    const auto& s = result.summary;
    std::printf("  global accuracy %.4f, %zu queried, %zu self-labeled\n\n", s.global_accuracy, s.queried,
                s.self_labeled);
  }
}
