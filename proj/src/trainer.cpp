#include "skelact/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "skelact/error.hpp"
#include "skelact/normalize.hpp"

namespace skelact {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
{
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

enum SeedStream : std::uint64_t { kSplitStream = 1, kShuffleStream = 2, kDropoutStream = 3 };

void check_fractions(const std::array<double, 3>& f)
{
    double sum = 0.0;
    for (double v : f) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ConfigError("split fractions must lie in [0, 1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1");
}

Dataset subset(const Dataset& ds, std::vector<std::size_t> indices)
{
    std::sort(indices.begin(), indices.end());
    Dataset out;
    out.label_map = ds.label_map;
    out.clips.reserve(indices.size());
    for (auto i : indices)
        out.clips.push_back(ds.clips[i]);
    return out;
}

} // namespace

std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& fractions)
{
    constexpr double tol = 1e-9;
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double quota = static_cast<double>(n) * fractions[i];
        counts[i] = static_cast<std::size_t>(std::floor(quota + tol));
        remainder[i] = std::max(0.0, quota - static_cast<double>(counts[i]));
        assigned += counts[i];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainder[a] > remainder[b] + tol;
    });
    for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
        if (fractions[order[k]] <= 0.0)
            continue;
        ++counts[order[k]];
        ++assigned;
    }
    while (assigned > n) {
        // Only reachable through rounding slack; take from the largest bucket.
        auto it = std::max_element(counts.begin(), counts.end());
        --*it;
        --assigned;
    }
    return counts;
}

DatasetSplit split_dataset(const Dataset& dataset, const std::array<double, 3>& fractions,
                           std::uint64_t seed)
{
    check_fractions(fractions);
    if (dataset.clips.empty())
        throw ConfigError("cannot split an empty dataset");

    const auto partitions = static_cast<std::size_t>(
        std::count_if(fractions.begin(), fractions.end(), [](double f) { return f > 0.0; }));

    std::vector<std::vector<std::size_t>> by_class(dataset.label_map.size());
    for (std::size_t i = 0; i < dataset.clips.size(); ++i)
        by_class[dataset.label_index(dataset.clips[i])].push_back(i);

    std::mt19937_64 rng(mix_seed(seed, kSplitStream));
    std::array<std::vector<std::size_t>, 3> parts;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto& members = by_class[c];
        if (members.empty())
            continue;
        if (members.size() < partitions)
            throw TooFewClips("class '" + dataset.label_map.name_of(c) + "' has " +
                              std::to_string(members.size()) + " clip(s) but the split needs " +
                              std::to_string(partitions));
        // Fisher-Yates with our own uniform draw keeps the permutation stable
        // across standard library implementations.
        for (std::size_t i = members.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i));
            std::swap(members[i - 1], members[std::min(j, i - 1)]);
        }
        const auto counts = apportion(members.size(), fractions);
        std::size_t pos = 0;
        for (std::size_t p = 0; p < 3; ++p)
            for (std::size_t k = 0; k < counts[p]; ++k)
                parts[p].push_back(members[pos++]);
    }
    return {subset(dataset, parts[0]), subset(dataset, parts[1]), subset(dataset, parts[2])};
}

void TrainConfig::validate() const
{
    if (!(learning_rate > 0.0))
        throw ConfigError("learning rate must be positive");
    if (batch_size == 0)
        throw ConfigError("batch size must be >= 1");
    if (hidden_dim == 0)
        throw ConfigError("hidden dimension must be >= 1");
    interval.validate();
    for (double p : dropout_rates)
        if (!(p >= 0.0 && p < 1.0))
            throw ConfigError("dropout rates must lie in [0, 1)");
    check_fractions(fractions);
}

std::string history_to_jsonl(const TrainHistory& history)
{
    std::ostringstream os;
    for (const auto& r : history.epochs) {
        nlohmann::json j;
        j["epoch"] = r.epoch;
        j["train_loss"] = r.train_loss;
        j["train_accuracy"] = r.train_accuracy;
        j["val_accuracy"] = r.val_accuracy ? nlohmann::json(*r.val_accuracy) : nlohmann::json();
        os << j.dump() << '\n';
    }
    return os.str();
}

std::vector<SampleSequence> build_sequences(const Dataset& clips, const IntervalConfig& interval,
                                            Normalization normalization)
{
    std::vector<SampleSequence> out;
    for (const auto& clip : clips.clips) {
        const auto label = make_label(clips.label_map, clip.label_name);
        auto seqs = split_by_interval(normalize_sequence(clip.frames, normalization), interval, label);
        for (auto& s : seqs)
            out.push_back(std::move(s));
    }
    return out;
}

TrainResult train(const Dataset& dataset, const TrainConfig& cfg, const EpochCallback& on_epoch)
{
    cfg.validate();
    dataset.validate();
    if (dataset.label_map.size() < 2)
        throw ConfigError("training needs at least 2 classes");

    TrainResult result;
    result.split = split_dataset(dataset, cfg.fractions, cfg.seed);
    if (result.split.train.clips.empty())
        throw ConfigError("the training split is empty");

    const auto sequences = build_sequences(result.split.train, cfg.interval, cfg.normalization);
    result.train_sequences = sequences.size();

    const NetworkDims dims{kVectorSize, cfg.hidden_dim, dataset.label_map.size()};
    Model& model = result.model;
    model.net = init_params(dims, cfg.seed, cfg.dropout_rates);
    model.labels = dataset.label_map;
    model.preprocessing = {cfg.normalization, cfg.interval};
    model.split = SplitInfo{cfg.fractions, cfg.seed};
    if (cfg.epochs == 0)
        return result;

    std::vector<double> weight(dims.num_classes, 1.0);
    if (cfg.class_weights) {
        std::vector<std::size_t> per_class(dims.num_classes, 0);
        for (const auto& s : sequences)
            ++per_class[s.label->index];
        for (std::size_t c = 0; c < dims.num_classes; ++c)
            weight[c] = per_class[c] == 0
                            ? 0.0
                            : static_cast<double>(sequences.size()) /
                                  static_cast<double>(dims.num_classes * per_class[c]);
    }

    auto optimizer = make_optimizer(cfg.optimizer, dims, cfg.learning_rate);
    GruNetwork& net = model.net;
    GruNetwork best_net = net;
    std::optional<double> best_val;
    const EvalOptions eval_opts{cfg.interval, std::nullopt, Aggregation::LongestRun};
    ParameterSet grads = ParameterSet::zeros(dims);

    double initial = 0.0;
    for (const auto& seq : sequences) {
        const auto logits = forward(net, seq, Mode::Eval, 0).logits;
        initial += softmax_cross_entropy(logits, seq.label->index).loss;
    }
    result.history.initial_loss = initial / static_cast<double>(sequences.size());

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::mt19937_64 rng(mix_seed(cfg.seed, kShuffleStream, epoch));
        std::vector<std::size_t> order(sequences.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }
        // Bucket by exact length, then batch within buckets.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return sequences[a].length() < sequences[b].length();
        });
        std::vector<std::vector<std::size_t>> batches;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (batches.empty() || batches.back().size() == cfg.batch_size ||
                sequences[batches.back().front()].length() != sequences[order[i]].length())
                batches.emplace_back();
            batches.back().push_back(order[i]);
        }
        for (std::size_t i = batches.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i));
            std::swap(batches[i - 1], batches[std::min(j, i - 1)]);
        }

        double loss_sum = 0.0;
        std::size_t correct = 0;
        std::size_t sample_counter = 0;
        for (const auto& batch : batches) {
            grads.set_zero();
            for (auto idx : batch) {
                const auto& seq = sequences[idx];
                const auto label = seq.label->index;
                const auto fwd = forward(net, seq, Mode::Train,
                                         mix_seed(cfg.seed, kDropoutStream,
                                                  epoch * sequences.size() + sample_counter++));
                auto ce = softmax_cross_entropy(fwd.logits, label);
                loss_sum += ce.loss;
                if (argmax(fwd.logits) == label)
                    ++correct;
                ce.dlogits *= weight[label];
                grads += backward(net, fwd.cache, ce.dlogits);
            }
            grads *= 1.0 / static_cast<double>(batch.size());
            optimizer->step(net.params, grads);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(sequences.size());
        rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(sequences.size());
        if (!result.split.val.clips.empty())
            rec.val_accuracy = evaluate(model, result.split.val, eval_opts).accuracy;

        if (!rec.val_accuracy) {
            result.history.best_epoch = epoch;
        } else if (!best_val || *rec.val_accuracy > *best_val) {
            best_val = rec.val_accuracy;
            best_net = net;
            result.history.best_epoch = epoch;
        }
        result.history.epochs.push_back(rec);
        if (on_epoch)
            on_epoch(rec);
    }
    if (best_val)
        net = best_net;
    return result;
}

MetricsReport evaluate(const Model& model, const Dataset& dataset, const EvalOptions& opts)
{
    const StaticSet statics = opts.statics ? *opts.statics : StaticSet::default_for(model.labels);
    ConfusionMatrix cm(model.labels);
    for (const auto& clip : dataset.clips) {
        const auto truth = model.labels.index_of(clip.label_name);
        const auto pred = predict_clip(model, clip.frames, opts.interval, statics, opts.aggregation);
        cm.add(truth, pred.index);
    }
    return make_report(std::move(cm));
}

std::vector<AblationRow> run_ablation(const Dataset& dataset, const TrainConfig& base)
{
    struct Variant {
        const char* name;
        std::size_t interval;
        Normalization normalization;
    };
    const std::array<Variant, 3> variants{{
        {"dense-baseline", 1, Normalization::ScaleOnly},
        {"sampling-only", base.interval.interval, Normalization::ScaleOnly},
        {"sampling+norm", base.interval.interval, Normalization::Centroid},
    }};

    std::vector<AblationRow> rows;
    for (const auto& v : variants) {
        TrainConfig cfg = base;
        cfg.interval.interval = v.interval;
        cfg.normalization = v.normalization;
        const auto res = train(dataset, cfg);

        AblationRow row;
        row.name = v.name;
        row.interval = v.interval;
        row.normalization = v.normalization;
        row.train_sequences = res.train_sequences;
        const EvalOptions opts{cfg.interval, std::nullopt, Aggregation::LongestRun};
        if (!res.split.test.clips.empty())
            row.test_accuracy = evaluate(res.model, res.split.test, opts).accuracy;
        if (res.history.best_epoch && res.history.epochs[*res.history.best_epoch].val_accuracy)
            row.val_accuracy = *res.history.epochs[*res.history.best_epoch].val_accuracy;
        rows.push_back(row);
    }
    return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows)
{
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %8s %-11s %10s %10s %9s\n", "config", "interval",
                  "norm", "train_seqs", "val_acc", "test_acc");
    os << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-16s %8zu %-11s %10zu %10.4f %9.4f\n", r.name.c_str(),
                      r.interval,
                      r.normalization == Normalization::Centroid ? "centroid" : "scale_only",
                      r.train_sequences, r.val_accuracy, r.test_accuracy);
        os << line;
    }
    return os.str();
}

} // namespace skelact
