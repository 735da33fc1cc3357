#pragma once

/// \file trainer.hpp
/// \brief Clip-level dataset splitting, the mini-batch training loop,
/// clip-level evaluation and the three-configuration ablation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skelact/datasetio.hpp"
#include "skelact/inference.hpp"
#include "skelact/metrics.hpp"
#include "skelact/model.hpp"
#include "skelact/optimizer.hpp"

namespace skelact {

struct DatasetSplit {
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Splits at clip level, stratified by class. Each class is shuffled with
/// `seed` and divided by largest-remainder rounding of n * fraction (ties go
/// to the earlier partition). Throws TooFewClips when a class has fewer clips
/// than there are partitions with a positive fraction, ConfigError on bad
/// fractions.
DatasetSplit split_dataset(const Dataset& dataset, const std::array<double, 3>& fractions,
                           std::uint64_t seed);

/// Largest-remainder apportionment of n items over the given fractions.
std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& fractions);

struct TrainConfig {
    std::size_t epochs = 60;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::size_t batch_size = 16;
    IntervalConfig interval{4, 2};
    Normalization normalization = Normalization::Centroid;
    std::array<double, kNumDropouts> dropout_rates{0.2, 0.2, 0.2, 0.2};
    std::size_t hidden_dim = 64;
    std::uint64_t seed = 7;
    std::array<double, 3> fractions{0.7, 0.15, 0.15};
    /// Scale each sample's loss by n / (C * n_class) over the training sequences.
    bool class_weights = false;

    /// Throws ConfigError.
    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    /// Clip-level accuracy on the validation split; empty when there is none.
    std::optional<double> val_accuracy;
};

struct TrainHistory {
    /// Mean eval-mode loss of the initialized network over the training
    /// sequences, measured before the first update.
    std::optional<double> initial_loss;
    std::vector<EpochRecord> epochs;
    /// Epoch whose parameters were returned; empty when no epoch ran.
    std::optional<std::size_t> best_epoch;
};

/// One JSON object per line: epoch, train_loss, train_accuracy, val_accuracy.
std::string history_to_jsonl(const TrainHistory& history);

struct TrainResult {
    Model model;
    TrainHistory history;
    DatasetSplit split;
    /// Number of interval-sampled training sequences.
    std::size_t train_sequences = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Normalized, interval-split training sequences of a set of clips.
/// Propagates EmptyResult from the sampler.
std::vector<SampleSequence> build_sequences(const Dataset& clips, const IntervalConfig& interval,
                                            Normalization normalization);

/// Splits the dataset, trains with per-sample BPTT and batch-averaged
/// gradients, and returns the parameters of the epoch with the best
/// validation accuracy (earlier epoch on ties; the last epoch when there is
/// no validation split). Deterministic under cfg.seed.
TrainResult train(const Dataset& dataset, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

struct EvalOptions {
    IntervalConfig interval{4, 2};
    std::optional<StaticSet> statics; // default: StaticSet::default_for(labels)
    Aggregation aggregation = Aggregation::LongestRun;
};

/// Clip-level predictions via video aggregation. Clips whose label is not in
/// the model's label map raise UnknownLabel.
MetricsReport evaluate(const Model& model, const Dataset& dataset, const EvalOptions& opts);

struct AblationRow {
    std::string name;
    std::size_t interval = 1;
    Normalization normalization = Normalization::Centroid;
    double test_accuracy = 0.0;
    double val_accuracy = 0.0;
    std::size_t train_sequences = 0;
};

/// The three compared configurations trained with one shared code path:
/// dense-baseline (interval 1, scale-only), sampling-only (cfg interval,
/// scale-only) and sampling+norm (cfg interval, centroid).
std::vector<AblationRow> run_ablation(const Dataset& dataset, const TrainConfig& base);

std::string format_ablation_table(const std::vector<AblationRow>& rows);

} // namespace skelact
