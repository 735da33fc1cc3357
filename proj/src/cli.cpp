#include "skelact/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "skelact/datasetio.hpp"
#include "skelact/error.hpp"
#include "skelact/inference.hpp"
#include "skelact/metrics.hpp"
#include "skelact/trainer.hpp"

namespace skelact {

namespace {

/// --clips-per-class -> SKELACT_CLIPS_PER_CLASS
std::string env_name(const std::string& flag)
{
    std::string out = "SKELACT_";
    for (char c : flag)
        out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

template <typename T>
CLI::Option* add_flag_option(CLI::App* app, const std::string& name, T& value,
                             const std::string& help)
{
    return app->add_option("--" + name, value, help)->envname(env_name(name));
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::array<double, 3> parse_fractions(const std::string& s)
{
    const auto parts = split_list(s);
    if (parts.size() != 3)
        throw ConfigError("--split expects three comma-separated fractions");
    std::array<double, 3> f{};
    for (std::size_t i = 0; i < 3; ++i)
        f[i] = std::stod(parts[i]);
    return f;
}

std::vector<std::string> resolve_classes(const std::string& list)
{
    const auto& known = synthetic_motion_classes();
    if (!list.empty() && std::all_of(list.begin(), list.end(), ::isdigit)) {
        const auto n = static_cast<std::size_t>(std::stoul(list));
        if (n < 1 || n > known.size())
            throw ConfigError("--classes must be between 1 and " + std::to_string(known.size()));
        return {known.begin(), known.begin() + static_cast<std::ptrdiff_t>(n)};
    }
    return split_list(list);
}

const Clip& pick_clip(const Dataset& ds, const std::string& clip_id)
{
    if (ds.clips.empty())
        throw SchemaError("dataset has no clips");
    if (clip_id.empty())
        return ds.clips.front();
    for (const auto& c : ds.clips)
        if (c.clip_id == clip_id)
            return c;
    throw Error("no clip with id '" + clip_id + "'");
}

StaticSet resolve_statics(const std::string& list, const LabelMap& labels)
{
    if (list.empty())
        return StaticSet::default_for(labels);
    if (list == "none")
        return StaticSet({}, labels);
    return StaticSet(split_list(list), labels);
}

nlohmann::json probabilities_json(const Vec& p)
{
    auto arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.size(); ++i)
        arr.push_back(p[i]);
    return arr;
}

struct SynthArgs {
    std::string out;
    std::string classes = "wave,walk,stand,fall";
    std::size_t clips_per_class = 50;
    std::size_t frames = 40;
    double noise = 2.0;
    std::uint64_t seed = 7;
};

struct TrainArgs {
    std::string data;
    std::string out_model;
    std::string history;
    std::size_t epochs = 60;
    std::size_t interval = 4;
    std::size_t min_len = 2;
    double lr = 1e-3;
    std::size_t batch = 16;
    std::size_t hidden = 64;
    double dropout = 0.2;
    std::string optimizer = "adam";
    std::string split = "0.7,0.15,0.15";
    std::uint64_t seed = 7;
    bool no_norm = false;
    bool dense_baseline = false;
    bool class_weights = false;
};

struct EvalArgs {
    std::string data;
    std::string model;
    std::string out_report;
    std::size_t interval = 0;
    std::string split = "all";
    std::string aggregation = "longest-run";
    std::string statics;
};

struct InferArgs {
    std::string model;
    std::string clip;
    std::string clip_id;
    std::size_t interval = 0;
    std::string aggregation = "longest-run";
    std::string statics;
};

struct StreamArgs {
    std::string model;
    std::string data;
    std::string clip_id;
    std::size_t capacity = 50;
    std::size_t interval = 10;
    std::size_t emit_stride = 1;
    std::string aggregation = "longest-run";
    std::string statics;
};

struct AblateArgs {
    std::string data;
    std::uint64_t seed = 7;
    std::size_t epochs = 60;
    std::size_t interval = 4;
    double lr = 1e-3;
    std::size_t batch = 16;
    std::size_t hidden = 64;
};

int cmd_synth(const SynthArgs& a, std::ostream& out)
{
    SyntheticConfig cfg;
    cfg.classes = resolve_classes(a.classes);
    cfg.clips_per_class = a.clips_per_class;
    cfg.frames_per_clip = a.frames;
    cfg.noise_sigma = a.noise;
    cfg.seed = a.seed;
    const auto ds = generate_synthetic(cfg);
    save_dataset(ds, a.out);
    out << ds.clips.size() << " clips written to " << a.out << "\n";
    return 0;
}

int cmd_train(const TrainArgs& a, bool interval_given, std::ostream& out)
{
    if (a.dense_baseline && interval_given && a.interval != 1)
        throw ConfigError("--dense-baseline fixes the interval at 1; drop --interval " +
                          std::to_string(a.interval));
    TrainConfig cfg;
    cfg.epochs = a.epochs;
    cfg.learning_rate = a.lr;
    cfg.batch_size = a.batch;
    cfg.hidden_dim = a.hidden;
    cfg.dropout_rates.fill(a.dropout);
    cfg.optimizer = parse_optimizer(a.optimizer);
    cfg.interval = {a.dense_baseline ? 1 : a.interval, a.min_len};
    cfg.normalization = a.no_norm ? Normalization::ScaleOnly : Normalization::Centroid;
    cfg.fractions = parse_fractions(a.split);
    cfg.seed = a.seed;
    cfg.class_weights = a.class_weights;
    cfg.validate();

    const auto ds = load_dataset(a.data);
    const auto res = train(ds, cfg, [&out](const EpochRecord& r) {
        out << "epoch " << r.epoch << " loss " << std::fixed << std::setprecision(4)
            << r.train_loss << " train_acc " << r.train_accuracy;
        if (r.val_accuracy)
            out << " val_acc " << *r.val_accuracy;
        out << std::defaultfloat << "\n";
    });

    save_model(res.model, a.out_model);
    const std::string history_path = a.history.empty() ? a.out_model + ".history.jsonl" : a.history;
    write_text_file(history_path, history_to_jsonl(res.history));

    out << "training sequences: " << res.train_sequences << "\n";
    if (res.history.initial_loss)
        out << "initial loss: " << std::fixed << std::setprecision(4) << *res.history.initial_loss
            << std::defaultfloat << "\n";
    if (res.history.best_epoch) {
        const auto& best = res.history.epochs[*res.history.best_epoch];
        out << "best epoch: " << best.epoch;
        if (best.val_accuracy)
            out << " val accuracy: " << std::fixed << std::setprecision(4) << *best.val_accuracy
                << std::defaultfloat;
        out << "\n";
    }
    out << "model written to " << a.out_model << "\n";
    return 0;
}

int cmd_eval(const EvalArgs& a, std::ostream& out)
{
    const auto model = load_model(a.model);
    const auto ds = load_dataset(a.data);

    Dataset target;
    if (a.split == "all") {
        target = ds;
    } else {
        if (!model.split)
            throw ConfigError("model file carries no split information; use --split all");
        const auto parts = split_dataset(ds, model.split->fractions, model.split->seed);
        if (a.split == "train")
            target = parts.train;
        else if (a.split == "val")
            target = parts.val;
        else if (a.split == "test")
            target = parts.test;
        else
            throw ConfigError("--split must be one of all, train, val, test");
    }

    EvalOptions opts;
    opts.interval = model.preprocessing.interval;
    if (a.interval > 0)
        opts.interval.interval = a.interval;
    opts.statics = resolve_statics(a.statics, model.labels);
    opts.aggregation = parse_aggregation(a.aggregation);
    const auto report = evaluate(model, target, opts);

    if (!a.out_report.empty()) {
        write_text_file(a.out_report + ".json", to_json(report));
        write_text_file(a.out_report + ".csv", to_csv(report.confusion));
    }
    out << "clips: " << report.confusion.total() << "\n";
    out << "accuracy: " << std::fixed << std::setprecision(4) << report.accuracy << "\n";
    for (std::size_t i = 0; i < report.per_class.size(); ++i) {
        out << "  " << model.labels.name_of(i) << ": ";
        if (report.per_class[i])
            out << *report.per_class[i] << "\n";
        else
            out << "n/a\n";
    }
    out << std::defaultfloat;
    return 0;
}

int cmd_infer(const InferArgs& a, std::ostream& out)
{
    const auto model = load_model(a.model);
    const auto ds = load_dataset(a.clip);
    const auto& clip = pick_clip(ds, a.clip_id);
    IntervalConfig interval = model.preprocessing.interval;
    if (a.interval > 0)
        interval.interval = a.interval;
    const auto label = predict_clip(model, clip.frames, interval,
                                    resolve_statics(a.statics, model.labels),
                                    parse_aggregation(a.aggregation));
    out << label.name << "\n";
    return 0;
}

int cmd_stream(const StreamArgs& a, std::ostream& out)
{
    const auto model = load_model(a.model);
    const auto ds = load_dataset(a.data);
    const auto& clip = pick_clip(ds, a.clip_id);
    StreamClassifier stream(model, {a.capacity, a.interval, a.emit_stride});

    std::vector<WindowPrediction> preds;
    for (const auto& frame : clip.frames) {
        if (auto p = stream.step(frame)) {
            nlohmann::json rec;
            rec["frame_index"] = p->window_end_index;
            rec["label"] = p->label.name;
            rec["probabilities"] = probabilities_json(p->probabilities);
            out << rec.dump() << "\n";
            preds.push_back(std::move(*p));
        }
    }
    nlohmann::json final_rec;
    final_rec["clip_id"] = clip.clip_id;
    final_rec["windows"] = preds.size();
    if (preds.empty())
        final_rec["video_label"] = nullptr;
    else
        final_rec["video_label"] = aggregate_video(preds, resolve_statics(a.statics, model.labels),
                                                   parse_aggregation(a.aggregation))
                                       .name;
    out << final_rec.dump() << "\n";
    return 0;
}

int cmd_ablate(const AblateArgs& a, std::ostream& out)
{
    TrainConfig cfg;
    cfg.seed = a.seed;
    cfg.epochs = a.epochs;
    cfg.interval.interval = a.interval;
    cfg.learning_rate = a.lr;
    cfg.batch_size = a.batch;
    cfg.hidden_dim = a.hidden;
    cfg.validate();
    const auto ds = load_dataset(a.data);
    out << format_ablation_table(run_ablation(ds, cfg));
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Skeleton-sequence action recognition with a three-layer GRU"};
    app.name("skelact");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.footer("Every flag can also be set through SKELACT_<FLAG> (e.g. SKELACT_EPOCHS); "
               "command-line flags take precedence.");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate the deterministic synthetic dataset");
    add_flag_option(s, "out", synth.out, "Output dataset file")->required();
    add_flag_option(s, "classes", synth.classes,
                    "Comma-separated motion classes, or a count of the default ones");
    add_flag_option(s, "clips-per-class", synth.clips_per_class, "Clips per class")
        ->check(CLI::PositiveNumber);
    add_flag_option(s, "frames", synth.frames, "Frames per clip")->check(CLI::PositiveNumber);
    add_flag_option(s, "noise", synth.noise, "Gaussian keypoint jitter (pixels)")
        ->check(CLI::NonNegativeNumber);
    add_flag_option(s, "seed", synth.seed, "Random seed");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train a GRU classifier");
    add_flag_option(t, "data", tr.data, "Dataset file")->required()->check(CLI::ExistingFile);
    add_flag_option(t, "out-model", tr.out_model, "Output model file")->required();
    add_flag_option(t, "history", tr.history,
                    "Per-epoch history (JSON lines); default <out-model>.history.jsonl");
    add_flag_option(t, "epochs", tr.epochs, "Training epochs");
    auto* interval_opt =
        add_flag_option(t, "interval", tr.interval, "Sampling interval k")->check(CLI::PositiveNumber);
    add_flag_option(t, "min-len", tr.min_len, "Shortest kept subsequence")
        ->check(CLI::PositiveNumber);
    add_flag_option(t, "lr", tr.lr, "Learning rate")->check(CLI::PositiveNumber);
    add_flag_option(t, "batch", tr.batch, "Mini-batch size")->check(CLI::PositiveNumber);
    add_flag_option(t, "hidden", tr.hidden, "GRU hidden size")->check(CLI::PositiveNumber);
    add_flag_option(t, "dropout", tr.dropout, "Rate for all four dropout layers")
        ->check(CLI::Range(0.0, 0.999));
    add_flag_option(t, "optimizer", tr.optimizer, "adam or sgd")
        ->check(CLI::IsMember({"adam", "sgd"}));
    add_flag_option(t, "split", tr.split, "Train/val/test clip fractions");
    add_flag_option(t, "seed", tr.seed, "Random seed");
    t->add_flag("--no-norm", tr.no_norm, "Divide by image size only (no centroid re-origin)")
        ->envname("SKELACT_NO_NORM");
    t->add_flag("--dense-baseline", tr.dense_baseline, "Dense sampling baseline (interval 1)")
        ->envname("SKELACT_DENSE_BASELINE");
    t->add_flag("--class-weights", tr.class_weights, "Inverse-frequency class weighting")
        ->envname("SKELACT_CLASS_WEIGHTS");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Evaluate a model on a dataset");
    add_flag_option(e, "data", ev.data, "Dataset file")->required()->check(CLI::ExistingFile);
    add_flag_option(e, "model", ev.model, "Model file")->required()->check(CLI::ExistingFile);
    add_flag_option(e, "interval", ev.interval, "Window interval (0 = the model's own)");
    add_flag_option(e, "out-report", ev.out_report,
                    "Report path prefix; writes <prefix>.json and <prefix>.csv");
    add_flag_option(e, "split", ev.split, "Clips to evaluate: all, train, val or test")
        ->check(CLI::IsMember({"all", "train", "val", "test"}));
    add_flag_option(e, "aggregation", ev.aggregation,
                    "longest-run, total-count or mean-probability")
        ->check(CLI::IsMember({"longest-run", "total-count", "mean-probability"}));
    add_flag_option(e, "static", ev.statics,
                    "Comma-separated static labels; empty = stand,sit,others; 'none' = no statics");

    InferArgs in;
    auto* i = app.add_subcommand("infer", "Print the aggregated label of one clip");
    add_flag_option(i, "model", in.model, "Model file")->required()->check(CLI::ExistingFile);
    add_flag_option(i, "clip", in.clip, "Dataset file holding the clip")
        ->required()
        ->check(CLI::ExistingFile);
    add_flag_option(i, "clip-id", in.clip_id, "Clip to use (default: the first)");
    add_flag_option(i, "interval", in.interval, "Window interval (0 = the model's own)");
    add_flag_option(i, "aggregation", in.aggregation,
                    "longest-run, total-count or mean-probability")
        ->check(CLI::IsMember({"longest-run", "total-count", "mean-probability"}));
    add_flag_option(i, "static", in.statics, "Comma-separated static labels");

    StreamArgs st;
    auto* sr = app.add_subcommand("stream", "Replay a clip frame by frame through the window");
    add_flag_option(sr, "model", st.model, "Model file")->required()->check(CLI::ExistingFile);
    add_flag_option(sr, "data", st.data, "Dataset file")->required()->check(CLI::ExistingFile);
    add_flag_option(sr, "clip-id", st.clip_id, "Clip to replay (default: the first)");
    add_flag_option(sr, "capacity", st.capacity, "Window capacity")->check(CLI::PositiveNumber);
    add_flag_option(sr, "interval", st.interval, "Window interval")->check(CLI::PositiveNumber);
    add_flag_option(sr, "emit-stride", st.emit_stride, "Pushes between emissions once full")
        ->check(CLI::PositiveNumber);
    add_flag_option(sr, "aggregation", st.aggregation,
                    "longest-run, total-count or mean-probability")
        ->check(CLI::IsMember({"longest-run", "total-count", "mean-probability"}));
    add_flag_option(sr, "static", st.statics, "Comma-separated static labels");

    AblateArgs ab;
    auto* a = app.add_subcommand("ablate", "Train and compare the three configurations");
    add_flag_option(a, "data", ab.data, "Dataset file")->required()->check(CLI::ExistingFile);
    add_flag_option(a, "seed", ab.seed, "Random seed");
    add_flag_option(a, "epochs", ab.epochs, "Training epochs");
    add_flag_option(a, "interval", ab.interval, "Sampling interval of the sampled configurations")
        ->check(CLI::PositiveNumber);
    add_flag_option(a, "lr", ab.lr, "Learning rate")->check(CLI::PositiveNumber);
    add_flag_option(a, "batch", ab.batch, "Mini-batch size")->check(CLI::PositiveNumber);
    add_flag_option(a, "hidden", ab.hidden, "GRU hidden size")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& pe) {
        return app.exit(pe, out, err);
    }

    try {
        if (*s)
            return cmd_synth(synth, out);
        if (*t)
            return cmd_train(tr, interval_opt->count() > 0, out);
        if (*e)
            return cmd_eval(ev, out);
        if (*i)
            return cmd_infer(in, out);
        if (*sr)
            return cmd_stream(st, out);
        if (*a)
            return cmd_ablate(ab, out);
    } catch (const EmptyResult& ex) {
        err << "skelact: error: " << ex.what() << "; lower --interval or use longer clips\n";
        return 1;
    } catch (const ConfigError& ex) {
        err << "skelact: usage error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        err << "skelact: error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace skelact
