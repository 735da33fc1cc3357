// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "../gradient_oracle.hpp"
#include "../test_util.hpp"
#include "skelact/datasetio.hpp"
#include "skelact/inference.hpp"
#include "skelact/normalize.hpp"
#include "skelact/sampler.hpp"
#include "skelact/trainer.hpp"

namespace {

using namespace skelact;
using Clock = std::chrono::steady_clock;

// Pinned thresholds.
constexpr double kFullMinAccuracy = 0.95;
constexpr double kNormGainMin = 0.05;
constexpr double kAblationMaxSeconds = 600.0;
constexpr double kGradMaxRelError = 1e-4;
constexpr double kGradMaxSeconds = 30.0;
constexpr int kGradSeeds = 20;
constexpr double kTranslationTol = 1e-9;
constexpr double kZeroMeanTol = 1e-12;
constexpr int kRandomFrames = 10000;
constexpr double kInitialLossRelTol = 0.10;
constexpr std::size_t kOverfitClips = 10;
constexpr std::size_t kOverfitEpochs = 200;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome ablation_ordering()
{
    const auto t0 = Clock::now();
    const auto rows = run_ablation(generate_synthetic({}), TrainConfig{});
    const double secs = seconds_since(t0);
    const double dense = rows.at(0).test_accuracy;
    const double sampling = rows.at(1).test_accuracy;
    const double full = rows.at(2).test_accuracy;
    const bool ok = full >= sampling && sampling >= dense && full >= kFullMinAccuracy &&
                    full - sampling >= kNormGainMin && secs <= kAblationMaxSeconds;
    return {ok, "full " + fmt("%.4f", full) + ", sampling-only " + fmt("%.4f", sampling) +
                    ", dense " + fmt("%.4f", dense) + ", " + fmt("%.0f s", secs)};
}

Outcome augmentation_count()
{
    const auto ds = generate_synthetic({});
    const auto seqs = build_sequences(ds, {4, 2}, Normalization::Centroid);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.hidden_dim = 4;
    const auto res = train(ds, cfg);
    const bool ok = seqs.size() == 4 * ds.clips.size() &&
                    res.train_sequences == 4 * res.split.train.clips.size();
    return {ok, std::to_string(ds.clips.size()) + " clips -> " + std::to_string(seqs.size()) +
                    " sequences; train split " + std::to_string(res.split.train.clips.size()) +
                    " -> " + std::to_string(res.train_sequences)};
}

Outcome gradient_check()
{
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int s = 1; s <= kGradSeeds; ++s)
        worst = std::max(worst, testing::gradient_check_for_seed(static_cast<std::uint64_t>(s)).max_rel_error);
    const double secs = seconds_since(t0);
    return {worst <= kGradMaxRelError && secs <= kGradMaxSeconds,
            "max relative error " + fmt("%.2e", worst) + " over " + std::to_string(kGradSeeds) +
                " seeds, " + fmt("%.1f s", secs)};
}

Outcome sampling_examples()
{
    // Frame t carries the value t (1-based).
    std::vector<KeypointVector> frames;
    for (int t = 1; t <= 10; ++t)
        frames.push_back(testing::tagged_vector(t));
    const auto subs = split_by_interval(frames, {2, 2});
    const std::vector<std::vector<double>> want_split{{1, 3, 5, 7, 9}, {2, 4, 6, 8, 10}};
    bool ok = subs.size() == want_split.size();
    for (std::size_t j = 0; ok && j < subs.size(); ++j) {
        ok = subs[j].vectors.size() == want_split[j].size();
        for (std::size_t i = 0; ok && i < want_split[j].size(); ++i)
            ok = subs[j].vectors[i].values[0] == want_split[j][i];
    }

    StreamWindow w(50, 10);
    for (int t = 1; t <= 50; ++t)
        w.push(testing::tagged_vector(t));
    const auto emitted = w.emit();
    const std::vector<double> want_emit{1, 11, 21, 31, 41};
    bool emit_ok = emitted.has_value() && emitted->vectors.size() == want_emit.size();
    for (std::size_t i = 0; emit_ok && i < want_emit.size(); ++i)
        emit_ok = emitted->vectors[i].values[0] == want_emit[i];

    return {ok && emit_ok, std::string("interval split ") + (ok ? "exact" : "MISMATCH") +
                               ", window emit " + (emit_ok ? "exact" : "MISMATCH")};
}

Outcome normalization_invariants()
{
    std::mt19937_64 rng(2024);
    double worst_translation = 0.0, worst_mean = 0.0;
    bool in_range = true;
    int checked = 0;
    for (int n = 0; n < kRandomFrames; ++n) {
        const double w = 100.0 + 1900.0 * unit_uniform(rng);
        const double h = 100.0 + 1900.0 * unit_uniform(rng);
        const auto frame = testing::random_frame(rng, w, h, 0.8);
        if (count_valid(frame) == 0)
            continue;
        ++checked;
        const auto a = normalize_frame(frame).vector;

        // Shift inside the image: the bounding box of valid joints moves by (dx, dy).
        double min_x = w, max_x = 0, min_y = h, max_y = 0;
        for (const auto& kp : frame.keypoints())
            if (kp.valid) {
                min_x = std::min(min_x, kp.x);
                max_x = std::max(max_x, kp.x);
                min_y = std::min(min_y, kp.y);
                max_y = std::max(max_y, kp.y);
            }
        const double dx = -min_x + (w - (max_x - min_x)) * unit_uniform(rng);
        const double dy = -min_y + (h - (max_y - min_y)) * unit_uniform(rng);
        PoseFrame::Joints moved = frame.keypoints();
        for (auto& kp : moved)
            if (kp.valid)
                kp = Keypoint::at(kp.x + dx, kp.y + dy);
        const auto b = normalize_frame(PoseFrame(moved, w, h)).vector;

        double sx = 0, sy = 0;
        for (std::size_t k = 0; k < kNumJoints; ++k) {
            worst_translation = std::max({worst_translation, std::abs(a.values[2 * k] - b.values[2 * k]),
                                          std::abs(a.values[2 * k + 1] - b.values[2 * k + 1])});
            in_range = in_range && std::abs(a.values[2 * k]) < 1.0 && std::abs(a.values[2 * k + 1]) < 1.0;
            if (frame.keypoints()[k].valid) {
                sx += a.values[2 * k];
                sy += a.values[2 * k + 1];
            }
        }
        const double nv = static_cast<double>(count_valid(frame));
        worst_mean = std::max({worst_mean, std::abs(sx / nv), std::abs(sy / nv)});
    }
    const bool ok = worst_translation <= kTranslationTol && worst_mean <= kZeroMeanTol && in_range;
    return {ok, std::to_string(checked) + " frames, translation " + fmt("%.2e", worst_translation) +
                    ", mean " + fmt("%.2e", worst_mean) + ", range " +
                    (in_range ? "open (-1,1)" : "VIOLATED")};
}

// Offline oracle: every end index t >= capacity-1 classifies frames
// t-capacity+1..t, normalized one by one, sampled every interval-th frame.
bool stream_matches_offline(const Model& model, const std::vector<PoseFrame>& frames,
                            std::size_t capacity, std::size_t interval, std::size_t& compared)
{
    StreamClassifier stream(model, {capacity, interval, 1});
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const auto got = stream.step(frames[t]);
        if (t + 1 < capacity) {
            if (got)
                return false;
            continue;
        }
        SampleSequence seq;
        for (std::size_t i = t + 1 - capacity; i <= t; i += interval)
            seq.vectors.push_back(normalize_frame(frames[i], model.preprocessing.normalization).vector);
        const auto want = classify_window(model.net, model.labels, seq, t);
        if (!got || got->label.index != want.label.index || got->window_end_index != t ||
            got->probabilities != want.probabilities)
            return false;
        ++compared;
    }
    return true;
}

Outcome streaming_equivalence()
{
    const auto ds = generate_synthetic({});
    TrainConfig cfg;
    cfg.epochs = 3;
    const auto model = train(ds, cfg).model;

    SyntheticConfig long_cfg;
    long_cfg.clips_per_class = 2;
    long_cfg.frames_per_clip = 120;
    long_cfg.seed = 99;
    const auto long_clips = generate_synthetic(long_cfg);

    std::size_t compared = 0, clips = 0;
    bool ok = true;
    for (const auto& c : ds.clips) {
        ok = ok && stream_matches_offline(model, c.frames, 20, 4, compared);
        ++clips;
    }
    for (const auto& c : long_clips.clips) {
        ok = ok && stream_matches_offline(model, c.frames, 50, 10, compared);
        ++clips;
    }
    return {ok && compared > 0, std::to_string(compared) + " window predictions over " +
                                     std::to_string(clips) + " clips"};
}

Outcome overfit_check()
{
    auto small = generate_synthetic({});
    small.clips.resize(kOverfitClips);
    TrainConfig cfg;
    cfg.epochs = kOverfitEpochs;
    cfg.fractions = {1.0, 0.0, 0.0};
    cfg.dropout_rates = {0.0, 0.0, 0.0, 0.0};
    cfg.batch_size = 4;
    const auto res = train(small, cfg);
    EvalOptions opts;
    opts.interval = cfg.interval;
    const double clip_acc = evaluate(res.model, res.split.train, opts).accuracy;
    const double window_acc = res.history.epochs.back().train_accuracy;

    TrainConfig balanced;
    balanced.epochs = 1;
    const auto initial = *train(generate_synthetic({}), balanced).history.initial_loss;
    const double ln4 = std::log(4.0);
    const bool loss_ok = std::abs(initial - ln4) <= kInitialLossRelTol * ln4;

    return {clip_acc == 1.0 && window_acc == 1.0 && loss_ok,
            "clip accuracy " + fmt("%.4f", clip_acc) + ", window accuracy " + fmt("%.4f", window_acc) +
                ", initial loss " + fmt("%.4f", initial) + " vs ln 4 = " + fmt("%.4f", ln4)};
}

Outcome falling_scenario()
{
    const auto labels = LabelMap::sth_default();
    const std::vector<std::string> names{"stand", "stand", "stand", "stand", "fall",
                                         "fall",  "fall",  "others", "sit",  "others"};
    std::vector<WindowPrediction> preds;
    for (std::size_t i = 0; i < names.size(); ++i) {
        WindowPrediction p;
        p.label = make_label(labels, names[i]);
        p.probabilities = Vec::Zero(static_cast<Eigen::Index>(labels.size()));
        p.probabilities[static_cast<Eigen::Index>(p.label.index)] = 1.0;
        p.window_end_index = i;
        preds.push_back(p);
    }
    const auto got = aggregate_video(preds, StaticSet::default_for(labels)).name;
    return {got == "fall", "aggregated label " + got};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 ablation ordering", ablation_ordering},
        {"2 augmentation count", augmentation_count},
        {"3 gradient check", gradient_check},
        {"4 sampling examples", sampling_examples},
        {"5 normalization invariants", normalization_invariants},
        {"6 streaming equivalence", streaming_equivalence},
        {"7 overfit and initial loss", overfit_check},
        {"8 falling scenario aggregation", falling_scenario},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
