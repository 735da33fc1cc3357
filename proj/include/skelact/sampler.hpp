#pragma once

/// \file sampler.hpp
/// \brief Flexible-interval sampling: the training-time stride split and the
/// bounded streaming queue used at inference.

#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "skelact/keypoints.hpp"

namespace skelact {

struct IntervalConfig {
    std::size_t interval = 1;
    std::size_t min_len = 2;

    /// Throws ConfigError unless interval >= 1 and min_len >= 1.
    void validate() const;
};

/// Splits a clip into `interval` stride-k subsequences: output j holds input
/// indices j, j+k, j+2k, ... Subsequences shorter than min_len are dropped;
/// ragged tails are kept. Each output carries `label`.
///
/// Throws EmptyResult when nothing survives the min_len filter.
std::vector<SampleSequence> split_by_interval(const std::vector<KeypointVector>& vectors,
                                              const IntervalConfig& cfg,
                                              const std::optional<ActionLabel>& label = {});

/// Bounded FIFO of normalized frames. Once full, every push evicts the oldest
/// entry.
class StreamWindow {
public:
    /// Throws ConfigError if capacity == 0, interval == 0 or interval > capacity.
    StreamWindow(std::size_t capacity, std::size_t interval);

    void push(const KeypointVector& v);

    /// Buffer positions 1, 1+interval, 1+2*interval, ... (1-based) when the
    /// buffer is full, otherwise nothing. Does not modify the buffer.
    std::optional<SampleSequence> emit() const;

    bool full() const { return buffer_.size() == capacity_; }
    std::size_t size() const { return buffer_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t interval() const { return interval_; }
    const std::deque<KeypointVector>& buffer() const { return buffer_; }

    /// Length of every emitted sequence: ceil(capacity / interval).
    std::size_t emitted_length() const { return (capacity_ + interval_ - 1) / interval_; }

private:
    std::size_t capacity_;
    std::size_t interval_;
    std::deque<KeypointVector> buffer_;
};

} // namespace skelact
