#pragma once

#include <cstdint>
#include <vector>

#include "driftlab/core.hpp"

namespace driftlab {

/// Sliding-window prequential error: mean 0/1 loss over the last omega outcomes.
class PrequentialWindow {
 public:
  explicit PrequentialWindow(std::size_t omega = 1000) : buffer_(omega, 0) {
    if (omega == 0) throw ConfigError("prequential window must be positive");
  }

  void update(bool loss) {
    const std::uint8_t v = loss ? 1 : 0;
    if (count_ == buffer_.size()) sum_ -= buffer_[head_];
    else ++count_;
    buffer_[head_] = v;
    sum_ += v;
    head_ = (head_ + 1) % buffer_.size();
  }

  /// Windowed mean loss p_e; 0 for an empty window.
  double value() const { return count_ == 0 ? 0.0 : static_cast<double>(sum_) / static_cast<double>(count_); }
  double accuracy() const { return 1.0 - value(); }

  std::size_t omega() const { return buffer_.size(); }
  std::size_t size() const { return count_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::size_t sum_ = 0;
};

}  // namespace driftlab
