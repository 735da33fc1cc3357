#pragma once

/// \file inference.hpp
/// \brief Window classification, streaming prediction and video-level
/// aggregation.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "skelact/grunet.hpp"
#include "skelact/keypoints.hpp"
#include "skelact/model.hpp"
#include "skelact/sampler.hpp"

namespace skelact {

struct WindowPrediction {
    ActionLabel label;
    Vec probabilities;
    std::size_t window_end_index = 0;
};

/// Labels treated as static during video aggregation.
class StaticSet {
public:
    StaticSet() = default;
    /// Names not present in `labels` are ignored, so the set is always a subset
    /// of the active label map.
    StaticSet(const std::vector<std::string>& names, const LabelMap& labels);

    /// {stand, sit, others} restricted to `labels`.
    static StaticSet default_for(const LabelMap& labels);

    bool contains(std::string_view name) const { return names_.count(std::string(name)) > 0; }
    const std::set<std::string>& names() const { return names_; }

private:
    std::set<std::string> names_;
};

enum class Aggregation {
    /// Longest consecutive run of one dynamic label; earlier run wins ties.
    LongestRun,
    /// Most frequent dynamic label; smallest class index wins ties.
    TotalCount,
    /// Highest mean probability over all windows, static labels included.
    MeanProbability,
};

Aggregation parse_aggregation(std::string_view name);

/// Index of the largest entry; the smallest index wins ties.
std::size_t argmax(const Vec& v);

/// Eval-mode forward + softmax + argmax. Throws DimensionMismatch.
WindowPrediction classify_window(const GruNetwork& net, const LabelMap& labels,
                                 const SampleSequence& seq, std::size_t window_end_index = 0);

/// Throws Error on an empty prediction list.
ActionLabel aggregate_video(const std::vector<WindowPrediction>& predictions,
                            const StaticSet& statics,
                            Aggregation mode = Aggregation::LongestRun);

struct StreamConfig {
    std::size_t capacity = 50;
    std::size_t interval = 10;
    /// Emit on the push that fills the window and every emit_stride pushes after.
    std::size_t emit_stride = 1;
};

/// One frame feed. Holds a reference to a shared, read-only model.
class StreamClassifier {
public:
    /// Throws ConfigError on an invalid window configuration or emit_stride == 0.
    StreamClassifier(const Model& model, const StreamConfig& cfg);

    /// normalize -> push -> (emit -> classify) when the window is full and an
    /// emission is due. Returns nothing until the window first fills.
    std::optional<WindowPrediction> step(const PoseFrame& frame);

    std::size_t frames_seen() const { return frames_seen_; }
    const StreamWindow& window() const { return window_; }

private:
    const Model& model_;
    StreamWindow window_;
    std::size_t emit_stride_;
    std::size_t frames_seen_ = 0;
    std::size_t pushes_since_full_ = 0;
};

/// Window predictions for one clip using the model's training-time
/// interval split: every stride-k subsequence is one window.
std::vector<WindowPrediction> predict_clip_windows(const Model& model,
                                                   const std::vector<PoseFrame>& frames,
                                                   const IntervalConfig& interval);

/// predict_clip_windows followed by aggregate_video.
ActionLabel predict_clip(const Model& model, const std::vector<PoseFrame>& frames,
                         const IntervalConfig& interval, const StaticSet& statics,
                         Aggregation mode = Aggregation::LongestRun);

} // namespace skelact
