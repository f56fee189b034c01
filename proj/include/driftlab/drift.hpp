#pragma once

// Error-rate drift detectors with continuous read-outs.
//
//  * Ddm   tracks the running error rate p and its binomial std s; the
//          continuous output is epsilon = p + s.
//  * Eddm  tracks the mean p' and std s' of distances between errors; the
//          continuous output is zeta = (p' + 2s') / max(p' + 2s'), clamped
//          to [0.9, 1].
//  * WindowedError keeps the last w outcomes; its output mirrors epsilon over
//          the window.
//
// A Change level resets the detector's own statistics and nothing else.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "driftlab/core.hpp"

namespace driftlab {

enum class DriftLevel { Stable, Warning, Change };

inline std::string_view to_string(DriftLevel l) {
  switch (l) {
    case DriftLevel::Stable: return "stable";
    case DriftLevel::Warning: return "warning";
    case DriftLevel::Change: return "change";
  }
  return "?";
}

struct DdmParams {
  std::size_t min_instances = 30;
  double warning_level = 2.0;
  double change_level = 3.0;
};

class Ddm {
 public:
  explicit Ddm(DdmParams params = {}) : params_(params) {}

  /// Level implied by the current (p, s) against the recorded minima.
  static DriftLevel classify(double p, double s, double p_min, double s_min, const DdmParams& params = {}) {
    if (p + s > p_min + params.change_level * s_min) return DriftLevel::Change;
    if (p + s > p_min + params.warning_level * s_min) return DriftLevel::Warning;
    return DriftLevel::Stable;
  }

  DriftLevel update(bool is_error) {
    n_ += 1;
    p_ += ((is_error ? 1.0 : 0.0) - p_) / static_cast<double>(n_);
    s_ = std::sqrt(p_ * (1.0 - p_) / static_cast<double>(n_));
    if (n_ < params_.min_instances) {
      level_ = DriftLevel::Stable;
      return level_;
    }
    if (p_ + s_ < p_min_ + s_min_) {
      p_min_ = p_;
      s_min_ = s_;
    }
    level_ = classify(p_, s_, p_min_, s_min_, params_);
    if (level_ == DriftLevel::Change) {
      ++changes_;
      restart();
    }
    return level_;
  }

  /// p + s of the current statistics (0 before the first update).
  double epsilon() const { return p_ + s_; }

  DriftLevel level() const { return level_; }
  std::size_t n() const { return n_; }
  double p() const { return p_; }
  double s() const { return s_; }
  double p_min() const { return p_min_; }
  double s_min() const { return s_min_; }
  std::size_t changes() const { return changes_; }

  void reset() {
    restart();
    level_ = DriftLevel::Stable;
    changes_ = 0;
  }

 private:
  void restart() {
    n_ = 0;
    p_ = 0.0;
    s_ = 0.0;
    p_min_ = std::numeric_limits<double>::infinity();
    s_min_ = std::numeric_limits<double>::infinity();
  }

  DdmParams params_;
  std::size_t n_ = 0;
  double p_ = 0.0;
  double s_ = 0.0;
  double p_min_ = std::numeric_limits<double>::infinity();
  double s_min_ = std::numeric_limits<double>::infinity();
  DriftLevel level_ = DriftLevel::Stable;
  std::size_t changes_ = 0;
};

struct EddmParams {
  std::size_t min_errors = 30;
  double warning_ratio = 0.95;
  double change_ratio = 0.90;
};

class Eddm {
 public:
  explicit Eddm(EddmParams params = {}) : params_(params) {}

  DriftLevel update(bool is_error) {
    ++distance_;
    if (!is_error) return level_;
    const double d = static_cast<double>(distance_);
    distance_ = 0;
    errors_ += 1;
    const double old_mean = mean_;
    mean_ += (d - mean_) / static_cast<double>(errors_);
    m2_ += (d - mean_) * (d - old_mean);
    std_ = std::sqrt(m2_ / static_cast<double>(errors_));
    const double spread = mean_ + 2.0 * std_;
    if (spread > max_spread_) {
      max_spread_ = spread;
      mean_max_ = mean_;
      std_max_ = std_;
    }
    if (errors_ < params_.min_errors || !(max_spread_ > 0.0)) {
      level_ = DriftLevel::Stable;
      return level_;
    }
    zeta_ = spread / max_spread_;
    if (zeta_ < params_.change_ratio) {
      level_ = DriftLevel::Change;
      ++changes_;
      restart();
    } else if (zeta_ < params_.warning_ratio) {
      level_ = DriftLevel::Warning;
    } else {
      level_ = DriftLevel::Stable;
    }
    return level_;
  }

  /// Last computed similarity ratio (1 until first computable, held across a reset).
  double raw_zeta() const { return zeta_; }
  /// Similarity clamped to [0.9, 1].
  double zeta() const { return std::clamp(zeta_, 0.9, 1.0); }

  DriftLevel level() const { return level_; }
  std::size_t errors() const { return errors_; }
  double mean_distance() const { return mean_; }
  double std_distance() const { return std_; }
  double max_mean() const { return mean_max_; }
  double max_std() const { return std_max_; }
  std::size_t changes() const { return changes_; }

  void reset() {
    restart();
    zeta_ = 1.0;
    level_ = DriftLevel::Stable;
    changes_ = 0;
  }

 private:
  void restart() {
    distance_ = 0;
    errors_ = 0;
    mean_ = m2_ = std_ = 0.0;
    max_spread_ = mean_max_ = std_max_ = 0.0;
  }

  EddmParams params_;
  std::uint64_t distance_ = 0;
  std::size_t errors_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double std_ = 0.0;
  double max_spread_ = 0.0;
  double mean_max_ = 0.0;
  double std_max_ = 0.0;
  double zeta_ = 1.0;
  DriftLevel level_ = DriftLevel::Stable;
  std::size_t changes_ = 0;
};

/// Error rate over the last w outcomes.
class WindowedError {
 public:
  explicit WindowedError(std::size_t window = 100) : buffer_(window, 0) {
    if (window == 0) throw ConfigError("error window must be positive");
  }

  void update(bool is_error) {
    const std::uint8_t v = is_error ? 1 : 0;
    if (count_ == buffer_.size()) errors_ -= buffer_[head_];
    else ++count_;
    buffer_[head_] = v;
    errors_ += v;
    head_ = (head_ + 1) % buffer_.size();
  }

  std::size_t window() const { return buffer_.size(); }
  std::size_t size() const { return count_; }
  std::size_t errors() const { return errors_; }

  double mean() const { return count_ == 0 ? 0.0 : static_cast<double>(errors_) / static_cast<double>(count_); }
  double stddev() const {
    if (count_ == 0) return 0.0;
    const double p = mean();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(count_));
  }
  double epsilon() const { return mean() + stddev(); }

  void reset() {
    std::fill(buffer_.begin(), buffer_.end(), 0);
    head_ = count_ = errors_ = 0;
  }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::size_t errors_ = 0;
};

}  // namespace driftlab
