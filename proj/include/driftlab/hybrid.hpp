#pragma once

// Hybrid active learning + self-labeling loop.
//
// For every instance, in order:
//   1. predict with the current learner;
//   2. score the prediction prequentially against the hidden label;
//   3. count the instance as seen;
//   4. if spend < B and the query strategy fires: reveal the label (the only
//      way to spend budget), feed the drift detectors, train on (x, y);
//   5. otherwise, if the self-labeling strategy accepts: train on (x, y_hat);
//   6. otherwise skip.
//
// The learner only ever sees the label through GroundTruth::reveal(); the
// evaluator only sees whether a prediction matched.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftlab/active.hpp"
#include "driftlab/awe.hpp"
#include "driftlab/drift.hpp"
#include "driftlab/hoeffding_tree.hpp"
#include "driftlab/naive_bayes.hpp"
#include "driftlab/prequential.hpp"
#include "driftlab/selflabel.hpp"

namespace driftlab {

enum class LearnerKind { NaiveBayes, HoeffdingTree, Awe };
enum class ActiveKind { Random, Sampling, RandVar };
enum class SelfLabelKind { None, Fixed, Uni, RandUni, InvUnc, Cddm, Ceddm, WinErr };
enum class Action { Queried, SelfLabeled, Skipped };

inline std::string_view to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::NaiveBayes: return "nb";
    case LearnerKind::HoeffdingTree: return "ht";
    case LearnerKind::Awe: return "awe";
  }
  return "?";
}
inline std::string_view to_string(ActiveKind k) {
  switch (k) {
    case ActiveKind::Random: return "random";
    case ActiveKind::Sampling: return "sampling";
    case ActiveKind::RandVar: return "randvar";
  }
  return "?";
}
inline std::string_view to_string(SelfLabelKind k) {
  switch (k) {
    case SelfLabelKind::None: return "none";
    case SelfLabelKind::Fixed: return "fixed";
    case SelfLabelKind::Uni: return "uni";
    case SelfLabelKind::RandUni: return "randuni";
    case SelfLabelKind::InvUnc: return "invunc";
    case SelfLabelKind::Cddm: return "cddm";
    case SelfLabelKind::Ceddm: return "ceddm";
    case SelfLabelKind::WinErr: return "winerr";
  }
  return "?";
}
inline std::string_view to_string(Action a) {
  switch (a) {
    case Action::Queried: return "queried";
    case Action::SelfLabeled: return "self_labeled";
    case Action::Skipped: return "skipped";
  }
  return "?";
}

inline LearnerKind parse_learner_kind(std::string_view s) {
  for (auto k : {LearnerKind::NaiveBayes, LearnerKind::HoeffdingTree, LearnerKind::Awe}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown learner '" + std::string(s) + "' (expected nb|ht|awe)");
}
inline ActiveKind parse_active_kind(std::string_view s) {
  for (auto k : {ActiveKind::Random, ActiveKind::Sampling, ActiveKind::RandVar}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown active strategy '" + std::string(s) + "' (expected random|sampling|randvar)");
}
inline SelfLabelKind parse_self_label_kind(std::string_view s) {
  for (auto k : {SelfLabelKind::None, SelfLabelKind::Fixed, SelfLabelKind::Uni, SelfLabelKind::RandUni,
                 SelfLabelKind::InvUnc, SelfLabelKind::Cddm, SelfLabelKind::Ceddm, SelfLabelKind::WinErr}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown self-labeling strategy '" + std::string(s) +
                    "' (expected none|fixed|uni|randuni|invunc|cddm|ceddm|winerr)");
}

inline constexpr SelfLabelKind kAllSelfLabelKinds[] = {
    SelfLabelKind::None,  SelfLabelKind::Fixed, SelfLabelKind::Uni,   SelfLabelKind::RandUni,
    SelfLabelKind::InvUnc, SelfLabelKind::Cddm, SelfLabelKind::Ceddm, SelfLabelKind::WinErr};
inline constexpr ActiveKind kAllActiveKinds[] = {ActiveKind::Random, ActiveKind::Sampling, ActiveKind::RandVar};
inline constexpr LearnerKind kAllLearnerKinds[] = {LearnerKind::NaiveBayes, LearnerKind::HoeffdingTree,
                                                   LearnerKind::Awe};

struct LearnerConfig {
  LearnerKind kind = LearnerKind::NaiveBayes;
  NaiveBayesParams nb;
  HoeffdingTreeParams ht;
  AweParams awe;
  LearnerKind awe_member = LearnerKind::NaiveBayes;
};

struct HybridConfig {
  LearnerConfig learner;
  ActiveKind active = ActiveKind::RandVar;
  ThresholdParams randvar;
  /// Selective-sampling delta; defaults to the budget when unset.
  std::optional<double> sampling_delta;
  SelfLabelKind self_label = SelfLabelKind::None;
  double fixed_gamma = 0.95;
  UniParams uni;
  double budget = 0.1;
  std::uint64_t seed = 1;
  std::size_t window = 1000;       // prequential omega
  std::size_t error_window = 100;  // WinErr w
  DdmParams ddm;
  EddmParams eddm;

  void validate() const {
    if (!(budget >= 0.0 && budget <= 1.0)) throw ConfigError("budget must lie in [0, 1]");
    if (window == 0) throw ConfigError("window must be positive");
    if (error_window == 0) throw ConfigError("error window must be positive");
    if (self_label == SelfLabelKind::InvUnc && active != ActiveKind::RandVar) {
      throw ConfigError("self-labeling strategy invunc reads the RandVar threshold and requires --al randvar");
    }
    if (learner.kind == LearnerKind::Awe && learner.awe_member == LearnerKind::Awe) {
      throw ConfigError("AWE members cannot themselves be AWE ensembles");
    }
  }
};

inline std::unique_ptr<Classifier> make_learner(const LearnerConfig& cfg, std::shared_ptr<const StreamSchema> schema,
                                                std::uint64_t seed) {
  switch (cfg.kind) {
    case LearnerKind::NaiveBayes: return std::make_unique<NaiveBayes>(std::move(schema), cfg.nb);
    case LearnerKind::HoeffdingTree: return std::make_unique<HoeffdingTree>(std::move(schema), cfg.ht, seed);
    case LearnerKind::Awe: {
      LearnerConfig member = cfg;
      member.kind = cfg.awe_member;
      if (member.kind == LearnerKind::Awe) throw ConfigError("AWE members cannot themselves be AWE ensembles");
      return std::make_unique<AccuracyWeightedEnsemble>(make_learner(member, std::move(schema), seed), cfg.awe);
    }
  }
  throw ConfigError("unknown learner kind");
}

inline std::unique_ptr<QueryStrategy> make_query_strategy(const HybridConfig& cfg, std::uint64_t seed) {
  switch (cfg.active) {
    case ActiveKind::Random: return std::make_unique<RandomQuery>(cfg.budget, seed);
    case ActiveKind::Sampling: {
      const double delta = cfg.sampling_delta.value_or(cfg.budget > 0.0 ? cfg.budget : 0.01);
      return std::make_unique<SamplingQuery>(delta, seed);
    }
    case ActiveKind::RandVar: return std::make_unique<RandVarQuery>(cfg.randvar, seed);
  }
  throw ConfigError("unknown active strategy");
}

inline std::unique_ptr<SelfLabelStrategy> make_self_label_strategy(const HybridConfig& cfg, std::uint64_t seed) {
  switch (cfg.self_label) {
    case SelfLabelKind::None: return nullptr;
    case SelfLabelKind::Fixed: return std::make_unique<FixedSelfLabel>(cfg.fixed_gamma);
    case SelfLabelKind::Uni: return std::make_unique<UniSelfLabel>(cfg.uni, false, seed);
    case SelfLabelKind::RandUni: return std::make_unique<UniSelfLabel>(cfg.uni, true, seed);
    case SelfLabelKind::InvUnc: return std::make_unique<InvUncSelfLabel>();
    case SelfLabelKind::Cddm: return std::make_unique<CddmSelfLabel>();
    case SelfLabelKind::Ceddm: return std::make_unique<CeddmSelfLabel>();
    case SelfLabelKind::WinErr: return std::make_unique<WinErrSelfLabel>();
  }
  throw ConfigError("unknown self-labeling strategy");
}

/// Labeling budget B and spend b_hat = labeled / seen.
class BudgetState {
 public:
  explicit BudgetState(double budget = 0.0) : budget_(budget) {}

  double budget() const { return budget_; }
  std::size_t labeled() const { return labeled_; }
  std::size_t seen() const { return seen_; }
  double spend() const { return seen_ == 0 ? 0.0 : static_cast<double>(labeled_) / static_cast<double>(seen_); }
  bool can_query() const { return spend() < budget_; }

  void observe() { ++seen_; }

 private:
  friend class GroundTruth;
  void charge() { ++labeled_; }

  double budget_;
  std::size_t labeled_ = 0;
  std::size_t seen_ = 0;
};

/// The hidden true label of the current instance. Evaluation may only ask
/// whether a prediction matches; learning must pay to reveal it.
class GroundTruth {
 public:
  explicit GroundTruth(ClassIndex label) : label_(label) {}

  bool matches(ClassIndex predicted) const { return predicted == label_; }

  ClassIndex reveal(BudgetState& budget) const {
    budget.charge();
    return label_;
  }

 private:
  ClassIndex label_;
};

struct StepRecord {
  std::size_t index = 0;
  ClassIndex predicted = 0;
  bool correct = false;
  std::optional<ClassIndex> revealed;
  Action action = Action::Skipped;
  double max_posterior = 0.0;
  std::optional<double> theta;                 // active threshold after this step
  std::optional<double> query_threshold;       // value compared by the query strategy
  std::optional<double> self_label_threshold;  // value compared by the self-labeling strategy
  std::optional<double> gamma;                 // Uni/RandUni confidence threshold after this step
  double epsilon = 0.0;
  double zeta = 1.0;
  double window_epsilon = 0.0;
  double windowed_accuracy = 1.0;
  std::size_t labeled = 0;
  std::size_t seen = 0;
};

struct RunSummary {
  std::size_t instances = 0;
  std::size_t correct = 0;
  double global_accuracy = 0.0;
  double final_spend = 0.0;
  std::size_t labeled = 0;
  std::size_t queried = 0;
  std::size_t self_labeled = 0;
  std::size_t skipped = 0;
  double mean_windowed_accuracy = 0.0;
  std::size_t ddm_changes = 0;
  std::size_t eddm_changes = 0;
};

class HybridLearner {
 public:
  HybridLearner(const HybridConfig& config, std::shared_ptr<const StreamSchema> schema)
      : HybridLearner(config, schema, make_learner(config.learner, schema, mix_seed(config.seed, 1)),
                      make_query_strategy(config, mix_seed(config.seed, 2)),
                      make_self_label_strategy(config, mix_seed(config.seed, 3))) {}

  /// Assembles a loop from explicit components (the config supplies B, windows
  /// and detector settings).
  HybridLearner(const HybridConfig& config, std::shared_ptr<const StreamSchema> schema,
                std::unique_ptr<Classifier> learner, std::unique_ptr<QueryStrategy> query,
                std::unique_ptr<SelfLabelStrategy> self_label)
      : config_(config),
        schema_(std::move(schema)),
        learner_(std::move(learner)),
        query_(std::move(query)),
        self_label_(std::move(self_label)),
        ddm_(config.ddm),
        eddm_(config.eddm),
        window_error_(config.error_window),
        prequential_(config.window),
        budget_(config.budget) {
    config_.validate();
    if (!schema_ || !learner_ || !query_) throw ConfigError("hybrid loop needs a schema, a learner and a query strategy");
    if (learner_->class_count() != schema_->class_count()) {
      throw ConfigError("learner class count differs from the stream schema");
    }
  }

  StepRecord process_instance(const Instance& x) {
    if (!x.label) throw SchemaMismatch("instance " + std::to_string(step_) + " carries no ground-truth label");
    if (x.features.size() != schema_->attribute_count()) {
      throw SchemaMismatch("instance " + std::to_string(step_) + " has " + std::to_string(x.features.size()) +
                           " features, schema declares " + std::to_string(schema_->attribute_count()));
    }
    if (*x.label >= schema_->class_count()) throw LabelOutOfRange("instance label outside the schema's classes");
    const GroundTruth truth(*x.label);
    const FeatureView features = x.view();

    StepRecord rec;
    rec.index = step_++;

    const ClassPosterior posterior = learner_->predict(features);
    const ClassIndex predicted = posterior.predicted();
    rec.predicted = predicted;
    rec.max_posterior = posterior.max_prob();

    rec.correct = truth.matches(predicted);
    prequential_.update(!rec.correct);
    correct_ += rec.correct ? 1 : 0;
    windowed_accuracy_sum_ += prequential_.accuracy();

    budget_.observe();

    bool queried = false;
    if (budget_.can_query()) {
      const QueryDecision d = query_->decide(posterior);
      rec.query_threshold = d.threshold;
      if (d.query) {
        const ClassIndex y = truth.reveal(budget_);
        rec.revealed = y;
        const bool error = y != predicted;
        ddm_.update(error);
        eddm_.update(error);
        window_error_.update(error);
        learner_->train(features, y);
        rec.action = Action::Queried;
        ++queried_;
        queried = true;
      }
    }
    if (!queried) {
      const Feedback fb = feedback();
      if (self_label_) {
        const SelfLabelDecision d = self_label_->decide(posterior, fb);
        rec.self_label_threshold = d.threshold;
        if (d.accept) {
          learner_->train(features, predicted);
          rec.action = Action::SelfLabeled;
          ++self_labeled_;
        }
      }
      if (rec.action == Action::Skipped) ++skipped_;
    }

    rec.theta = query_->threshold();
    if (self_label_) rec.gamma = self_label_->gamma();
    rec.epsilon = ddm_.epsilon();
    rec.zeta = eddm_.zeta();
    rec.window_epsilon = window_error_.epsilon();
    rec.windowed_accuracy = prequential_.accuracy();
    rec.labeled = budget_.labeled();
    rec.seen = budget_.seen();
    return rec;
  }

  /// Current feedback snapshot (theta defaults to 1 without a RandVar threshold).
  Feedback feedback() const {
    return Feedback(query_->threshold().value_or(1.0), ddm_.epsilon(), eddm_.zeta(), window_error_.epsilon());
  }

  RunSummary summary() const {
    RunSummary s;
    s.instances = step_;
    s.correct = correct_;
    s.global_accuracy = step_ == 0 ? 0.0 : static_cast<double>(correct_) / static_cast<double>(step_);
    s.final_spend = budget_.spend();
    s.labeled = budget_.labeled();
    s.queried = queried_;
    s.self_labeled = self_labeled_;
    s.skipped = skipped_;
    s.mean_windowed_accuracy = step_ == 0 ? 0.0 : windowed_accuracy_sum_ / static_cast<double>(step_);
    s.ddm_changes = ddm_.changes();
    s.eddm_changes = eddm_.changes();
    return s;
  }

  const HybridConfig& config() const { return config_; }
  const BudgetState& budget() const { return budget_; }
  const Classifier& learner() const { return *learner_; }
  const Ddm& ddm() const { return ddm_; }
  const Eddm& eddm() const { return eddm_; }
  const WindowedError& window_error() const { return window_error_; }
  const PrequentialWindow& prequential() const { return prequential_; }

 private:
  HybridConfig config_;
  std::shared_ptr<const StreamSchema> schema_;
  std::unique_ptr<Classifier> learner_;
  std::unique_ptr<QueryStrategy> query_;
  std::unique_ptr<SelfLabelStrategy> self_label_;
  Ddm ddm_;
  Eddm eddm_;
  WindowedError window_error_;
  PrequentialWindow prequential_;
  BudgetState budget_;
  std::size_t step_ = 0;
  std::size_t correct_ = 0;
  std::size_t queried_ = 0;
  std::size_t self_labeled_ = 0;
  std::size_t skipped_ = 0;
  double windowed_accuracy_sum_ = 0.0;
};

struct RunResult {
  std::vector<StepRecord> records;
  RunSummary summary;
};

using StepObserver = std::function<void(const StepRecord&)>;

/// Folds process_instance over `source`. Records are kept unless `keep_records`
/// is false; `observer` (when set) sees every record as it is produced.
inline RunResult run_stream(HybridLearner& loop, std::span<const Instance> source, const StepObserver& observer = {},
                            bool keep_records = true) {
  if (source.empty()) throw EmptyStream("cannot run on an empty stream");
  RunResult out;
  if (keep_records) out.records.reserve(source.size());
  for (const auto& x : source) {
    StepRecord rec = loop.process_instance(x);
    if (observer) observer(rec);
    if (keep_records) out.records.push_back(std::move(rec));
  }
  out.summary = loop.summary();
  return out;
}

inline RunResult run_stream(std::span<const Instance> source, std::shared_ptr<const StreamSchema> schema,
                            const HybridConfig& config, const StepObserver& observer = {}, bool keep_records = true) {
  if (source.empty()) throw EmptyStream("cannot run on an empty stream");
  HybridLearner loop(config, std::move(schema));
  return run_stream(loop, source, observer, keep_records);
}

}  // namespace driftlab
