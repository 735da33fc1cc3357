#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "skelact/datasetio.hpp"
#include "skelact/error.hpp"
#include "skelact/trainer.hpp"

namespace skelact {
namespace {

Dataset small_dataset(std::size_t per_class, std::size_t frames = 40)
{
    SyntheticConfig cfg;
    cfg.clips_per_class = per_class;
    cfg.frames_per_clip = frames;
    return generate_synthetic(cfg);
}

std::set<std::string> ids(const Dataset& d)
{
    std::set<std::string> out;
    for (const auto& c : d.clips)
        out.insert(c.clip_id);
    return out;
}

TrainConfig quick_config()
{
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.hidden_dim = 8;
    cfg.batch_size = 8;
    return cfg;
}

TEST(Apportion, LargestRemainder)
{
    // 7.0 / 1.5 / 1.5: remainder tie goes to the earlier partition.
    EXPECT_EQ(apportion(10, {0.7, 0.15, 0.15}), (std::array<std::size_t, 3>{7, 2, 1}));
    EXPECT_EQ(apportion(50, {0.7, 0.15, 0.15}), (std::array<std::size_t, 3>{35, 8, 7}));
    EXPECT_EQ(apportion(5, {1.0, 0.0, 0.0}), (std::array<std::size_t, 3>{5, 0, 0}));
}

TEST(SplitDataset, StratifiedSizesAndNoLeakage)
{
    const auto ds = small_dataset(10);
    const auto split = split_dataset(ds, {0.7, 0.15, 0.15}, 3);
    EXPECT_EQ(split.train.clips.size(), 28u);
    EXPECT_EQ(split.val.clips.size(), 8u);
    EXPECT_EQ(split.test.clips.size(), 4u);

    const auto tr = ids(split.train), va = ids(split.val), te = ids(split.test);
    for (const auto& id : va) {
        EXPECT_EQ(tr.count(id), 0u);
        EXPECT_EQ(te.count(id), 0u);
    }
    for (const auto& id : te)
        EXPECT_EQ(tr.count(id), 0u);
    EXPECT_EQ(tr.size() + va.size() + te.size(), ds.clips.size());

    for (const auto& name : ds.label_map.names()) {
        std::size_t n = 0;
        for (const auto& c : split.train.clips)
            n += c.label_name == name;
        EXPECT_EQ(n, 7u) << name;
    }
}

TEST(SplitDataset, DeterministicUnderSeed)
{
    const auto ds = small_dataset(10);
    const auto a = split_dataset(ds, {0.7, 0.15, 0.15}, 11);
    const auto b = split_dataset(ds, {0.7, 0.15, 0.15}, 11);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.val, b.val);
    EXPECT_EQ(a.test, b.test);
    const auto c = split_dataset(ds, {0.7, 0.15, 0.15}, 12);
    EXPECT_NE(ids(a.test), ids(c.test));
}

TEST(SplitDataset, AllTrain)
{
    const auto ds = small_dataset(3);
    const auto split = split_dataset(ds, {1.0, 0.0, 0.0}, 1);
    EXPECT_EQ(split.train.clips.size(), ds.clips.size());
    EXPECT_TRUE(split.val.clips.empty());
    EXPECT_TRUE(split.test.clips.empty());
}

TEST(SplitDataset, TooFewClips)
{
    const auto ds = small_dataset(2);
    EXPECT_THROW(split_dataset(ds, {0.7, 0.15, 0.15}, 1), TooFewClips);
    EXPECT_THROW(split_dataset(ds, {0.7, 0.2, 0.2}, 1), ConfigError);
}

TEST(BuildSequences, IntervalMultipliesClipCount)
{
    const auto ds = small_dataset(3);
    for (std::size_t k : {1u, 2u, 4u, 5u}) {
        const auto seqs = build_sequences(ds, {k, 2}, Normalization::Centroid);
        EXPECT_EQ(seqs.size(), k * ds.clips.size()) << "k=" << k;
        for (const auto& s : seqs)
            EXPECT_EQ(s.length(), 40u / k);
    }
}

TEST(Train, ZeroEpochsReturnsInitialization)
{
    const auto ds = small_dataset(4);
    auto cfg = quick_config();
    cfg.epochs = 0;
    auto result = train(ds, cfg);
    EXPECT_TRUE(result.history.epochs.empty());
    EXPECT_FALSE(result.history.best_epoch.has_value());

    auto init = init_params({kVectorSize, cfg.hidden_dim, 4}, cfg.seed, cfg.dropout_rates);
    auto got = result.model.net.params.tensors();
    auto want = init.params.tensors();
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        EXPECT_TRUE(std::equal(got[i].data.begin(), got[i].data.end(), want[i].data.begin()))
            << got[i].name;
}

TEST(Train, BitForBitDeterministic)
{
    const auto ds = small_dataset(4);
    const auto cfg = quick_config();
    auto a = train(ds, cfg);
    auto b = train(ds, cfg);
    EXPECT_EQ(model_to_json(a.model), model_to_json(b.model));
    EXPECT_EQ(history_to_jsonl(a.history), history_to_jsonl(b.history));
}

TEST(Train, HistoryPrefixStableWhenEpochsDouble)
{
    const auto ds = small_dataset(4);
    auto cfg = quick_config();
    cfg.epochs = 2;
    const auto short_run = train(ds, cfg).history;
    cfg.epochs = 4;
    const auto long_run = train(ds, cfg).history;
    ASSERT_EQ(short_run.epochs.size(), 2u);
    ASSERT_EQ(long_run.epochs.size(), 4u);
    for (std::size_t e = 0; e < 2; ++e) {
        EXPECT_EQ(short_run.epochs[e].train_loss, long_run.epochs[e].train_loss);
        EXPECT_EQ(short_run.epochs[e].train_accuracy, long_run.epochs[e].train_accuracy);
        EXPECT_EQ(short_run.epochs[e].val_accuracy, long_run.epochs[e].val_accuracy);
    }
}

TEST(Train, SequenceCountAndHistoryShape)
{
    const auto ds = small_dataset(5);
    auto cfg = quick_config();
    auto result = train(ds, cfg);
    EXPECT_EQ(result.train_sequences, 4 * result.split.train.clips.size());
    EXPECT_EQ(result.history.epochs.size(), cfg.epochs);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        EXPECT_EQ(result.history.epochs[e].epoch, e);
        EXPECT_TRUE(result.history.epochs[e].val_accuracy.has_value());
    }
    ASSERT_TRUE(result.history.best_epoch.has_value());
    // Best epoch: highest validation accuracy, earliest on ties.
    double best = -1.0;
    std::size_t best_e = 0;
    for (const auto& r : result.history.epochs)
        if (*r.val_accuracy > best) {
            best = *r.val_accuracy;
            best_e = r.epoch;
        }
    EXPECT_EQ(*result.history.best_epoch, best_e);
}

TEST(Train, InitialLossNearChanceOnBalancedData)
{
    const auto ds = small_dataset(8);
    auto cfg = quick_config();
    cfg.epochs = 1;
    cfg.hidden_dim = 64;
    const auto h = train(ds, cfg).history;
    ASSERT_TRUE(h.initial_loss.has_value());
    EXPECT_NEAR(*h.initial_loss, std::log(4.0), 0.1 * std::log(4.0));
}

TEST(Train, EmptyResultWhenIntervalTooLarge)
{
    const auto ds = small_dataset(3, 3);
    auto cfg = quick_config();
    cfg.interval = {4, 2};
    EXPECT_THROW(train(ds, cfg), EmptyResult);
}

TEST(Train, OverfitsTenClips)
{
    auto ds = small_dataset(3);
    ds.clips.resize(10);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.fractions = {1.0, 0.0, 0.0};
    // Memorization check: regularization off, smaller batches for more updates.
    cfg.dropout_rates = {0.0, 0.0, 0.0, 0.0};
    cfg.batch_size = 4;
    const auto result = train(ds, cfg);
    EXPECT_EQ(result.history.epochs.back().train_accuracy, 1.0);
    EXPECT_EQ(result.history.best_epoch, std::optional<std::size_t>(199));

    EvalOptions opts;
    opts.interval = cfg.interval;
    const auto a = evaluate(result.model, result.split.train, opts);
    EXPECT_EQ(a.accuracy, 1.0);
    const auto b = evaluate(result.model, result.split.train, opts);
    EXPECT_EQ(a.confusion.counts(), b.confusion.counts());
}

TEST(TrainConfig, Validation)
{
    TrainConfig cfg;
    cfg.batch_size = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.fractions = {0.5, 0.5, 0.5};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = TrainConfig{};
    cfg.dropout_rates[0] = 1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(HistoryJsonl, OneLinePerEpoch)
{
    TrainHistory h;
    h.epochs.push_back({0, 1.5, 0.25, 0.5});
    h.epochs.push_back({1, 1.0, 0.5, std::nullopt});
    const auto text = history_to_jsonl(h);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    EXPECT_NE(text.find("null"), std::string::npos);
}

} // namespace
} // namespace skelact
