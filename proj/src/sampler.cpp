#include "skelact/sampler.hpp"

#include <string>

#include "skelact/error.hpp"

namespace skelact {

void IntervalConfig::validate() const
{
    if (interval < 1)
        throw ConfigError("interval must be >= 1");
    if (min_len < 1)
        throw ConfigError("min_len must be >= 1");
}

std::vector<SampleSequence> split_by_interval(const std::vector<KeypointVector>& vectors,
                                              const IntervalConfig& cfg,
                                              const std::optional<ActionLabel>& label)
{
    cfg.validate();
    std::vector<SampleSequence> out;
    const std::size_t k = cfg.interval;
    for (std::size_t j = 0; j < k && j < vectors.size(); ++j) {
        SampleSequence seq;
        seq.label = label;
        seq.vectors.reserve(vectors.size() / k + 1);
        for (std::size_t i = j; i < vectors.size(); i += k)
            seq.vectors.push_back(vectors[i]);
        if (seq.vectors.size() >= cfg.min_len)
            out.push_back(std::move(seq));
    }
    if (out.empty()) {
        throw EmptyResult("interval " + std::to_string(k) + " leaves no subsequence of at least " +
                          std::to_string(cfg.min_len) + " frames in a clip of " +
                          std::to_string(vectors.size()) +
                          " frames; short clips need a small interval (2 or 3 for clips under "
                          "10 frames)");
    }
    return out;
}

StreamWindow::StreamWindow(std::size_t capacity, std::size_t interval)
    : capacity_(capacity), interval_(interval)
{
    if (capacity == 0)
        throw ConfigError("window capacity must be >= 1");
    if (interval == 0)
        throw ConfigError("window interval must be >= 1");
    if (interval > capacity)
        throw ConfigError("window interval " + std::to_string(interval) +
                          " exceeds capacity " + std::to_string(capacity));
}

void StreamWindow::push(const KeypointVector& v)
{
    buffer_.push_back(v);
    if (buffer_.size() > capacity_)
        buffer_.pop_front();
}

std::optional<SampleSequence> StreamWindow::emit() const
{
    if (!full())
        return std::nullopt;
    SampleSequence seq;
    seq.vectors.reserve(emitted_length());
    for (std::size_t i = 0; i < buffer_.size(); i += interval_)
        seq.vectors.push_back(buffer_[i]);
    return seq;
}

} // namespace skelact
