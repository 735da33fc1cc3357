#include "skelact/inference.hpp"

#include <map>

#include "skelact/error.hpp"
#include "skelact/normalize.hpp"

namespace skelact {

StaticSet::StaticSet(const std::vector<std::string>& names, const LabelMap& labels)
{
    for (const auto& n : names)
        if (labels.contains(n))
            names_.insert(n);
}

StaticSet StaticSet::default_for(const LabelMap& labels)
{
    return StaticSet({"stand", "sit", "others"}, labels);
}

Aggregation parse_aggregation(std::string_view name)
{
    if (name == "longest-run")
        return Aggregation::LongestRun;
    if (name == "total-count")
        return Aggregation::TotalCount;
    if (name == "mean-probability")
        return Aggregation::MeanProbability;
    throw ConfigError("unknown aggregation '" + std::string(name) +
                      "' (expected longest-run, total-count or mean-probability)");
}

std::size_t argmax(const Vec& v)
{
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v[i] > v[static_cast<Eigen::Index>(best)])
            best = static_cast<std::size_t>(i);
    return best;
}

WindowPrediction classify_window(const GruNetwork& net, const LabelMap& labels,
                                 const SampleSequence& seq, std::size_t window_end_index)
{
    if (labels.size() != net.dims.num_classes)
        throw DimensionMismatch("label map has " + std::to_string(labels.size()) +
                                " classes, network has " + std::to_string(net.dims.num_classes));
    const auto res = forward(net, seq, Mode::Eval, 0);
    WindowPrediction p;
    p.probabilities = softmax(res.logits);
    p.label = make_label(labels, argmax(p.probabilities));
    p.window_end_index = window_end_index;
    return p;
}

ActionLabel aggregate_video(const std::vector<WindowPrediction>& predictions,
                            const StaticSet& statics, Aggregation mode)
{
    if (predictions.empty())
        throw Error("cannot aggregate an empty list of window predictions");

    if (mode == Aggregation::MeanProbability) {
        Vec sum = Vec::Zero(predictions.front().probabilities.size());
        for (const auto& p : predictions)
            sum += p.probabilities;
        const auto best = argmax(sum);
        for (const auto& p : predictions)
            if (p.label.index == best)
                return p.label;
        // The mean winner was never an argmax; report the closest observed label.
        std::size_t pick = 0;
        for (std::size_t i = 1; i < predictions.size(); ++i)
            if (predictions[i].probabilities[static_cast<Eigen::Index>(best)] >
                predictions[pick].probabilities[static_cast<Eigen::Index>(best)])
                pick = i;
        return predictions[pick].label;
    }

    std::optional<ActionLabel> best;
    std::size_t best_score = 0;
    if (mode == Aggregation::LongestRun) {
        std::size_t i = 0;
        while (i < predictions.size()) {
            std::size_t j = i;
            while (j < predictions.size() && predictions[j].label.index == predictions[i].label.index)
                ++j;
            const auto& lbl = predictions[i].label;
            if (!statics.contains(lbl.name) && j - i > best_score) {
                best = lbl;
                best_score = j - i;
            }
            i = j;
        }
    } else {
        std::map<std::size_t, std::size_t> counts;
        std::map<std::size_t, ActionLabel> seen;
        for (const auto& p : predictions)
            if (!statics.contains(p.label.name)) {
                ++counts[p.label.index];
                seen.emplace(p.label.index, p.label);
            }
        for (const auto& [idx, n] : counts)
            if (n > best_score) {
                best = seen.at(idx);
                best_score = n;
            }
    }
    if (best)
        return *best;

    // Only static labels: most frequent, smallest index on ties.
    std::map<std::size_t, std::size_t> counts;
    std::map<std::size_t, ActionLabel> seen;
    for (const auto& p : predictions) {
        ++counts[p.label.index];
        seen.emplace(p.label.index, p.label);
    }
    for (const auto& [idx, n] : counts)
        if (n > best_score) {
            best = seen.at(idx);
            best_score = n;
        }
    return *best;
}

StreamClassifier::StreamClassifier(const Model& model, const StreamConfig& cfg)
    : model_(model), window_(cfg.capacity, cfg.interval), emit_stride_(cfg.emit_stride)
{
    if (emit_stride_ == 0)
        throw ConfigError("emit stride must be >= 1");
}

std::optional<WindowPrediction> StreamClassifier::step(const PoseFrame& frame)
{
    window_.push(normalize_frame(frame, model_.preprocessing.normalization).vector);
    const std::size_t index = frames_seen_++;
    if (!window_.full())
        return std::nullopt;
    const bool due = pushes_since_full_ % emit_stride_ == 0;
    ++pushes_since_full_;
    if (!due)
        return std::nullopt;
    return classify_window(model_.net, model_.labels, *window_.emit(), index);
}

std::vector<WindowPrediction> predict_clip_windows(const Model& model,
                                                   const std::vector<PoseFrame>& frames,
                                                   const IntervalConfig& interval)
{
    const auto vectors = normalize_sequence(frames, model.preprocessing.normalization);
    const auto windows = split_by_interval(vectors, interval);
    std::vector<WindowPrediction> out;
    out.reserve(windows.size());
    for (std::size_t j = 0; j < windows.size(); ++j) {
        // Window j ends at the last frame index congruent to j modulo k.
        const std::size_t end = j + (windows[j].length() - 1) * interval.interval;
        out.push_back(classify_window(model.net, model.labels, windows[j], end));
    }
    return out;
}

ActionLabel predict_clip(const Model& model, const std::vector<PoseFrame>& frames,
                         const IntervalConfig& interval, const StaticSet& statics,
                         Aggregation mode)
{
    return aggregate_video(predict_clip_windows(model, frames, interval), statics, mode);
}

} // namespace skelact
