#include "skelact/datasetio.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "skelact/error.hpp"

namespace skelact {

using nlohmann::json;

namespace {

std::string clip_context(const std::string& clip_id)
{
    return "clip '" + clip_id + "'";
}

const json& require(const json& obj, const char* key, const std::string& context)
{
    if (!obj.is_object())
        throw SchemaError(context + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(context + ": missing field '" + key + "'");
    return *it;
}

double require_number(const json& obj, const char* key, const std::string& context)
{
    const auto& v = require(obj, key, context);
    if (!v.is_number())
        throw SchemaError(context + ": field '" + key + "' must be a number");
    return v.get<double>();
}

json parse_json(const std::string& text, const char* what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed ") + what + " JSON: " + e.what());
    }
}

void check_version(const json& root, int expected, const char* what)
{
    const auto& v = require(root, "format_version", what);
    if (!v.is_number_integer())
        throw SchemaError(std::string(what) + ": format_version must be an integer");
    if (v.get<int>() != expected)
        throw VersionError(std::string(what) + " format_version " + std::to_string(v.get<int>()) +
                           " is not supported (expected " + std::to_string(expected) + ")");
}

LabelMap parse_label_map(const json& root, const char* what)
{
    const auto& lm = require(root, "label_map", what);
    if (!lm.is_array())
        throw SchemaError(std::string(what) + ": label_map must be an array of strings");
    std::vector<std::string> names;
    for (const auto& n : lm) {
        if (!n.is_string())
            throw SchemaError(std::string(what) + ": label_map must be an array of strings");
        names.push_back(n.get<std::string>());
    }
    return LabelMap(std::move(names));
}

Keypoint parse_keypoint(const json& e, const std::string& context)
{
    if (!e.is_array() || (e.size() != 2 && e.size() != 3))
        throw SchemaError(context + ": keypoint must be [x, y] or [x, y, valid]");
    if (!e[0].is_number() || !e[1].is_number())
        throw SchemaError(context + ": keypoint coordinates must be numbers");
    const double x = e[0].get<double>();
    const double y = e[1].get<double>();
    bool valid = !(x == 0.0 && y == 0.0);
    if (e.size() == 3) {
        if (e[2].is_boolean())
            valid = e[2].get<bool>();
        else if (e[2].is_number_integer() && (e[2].get<int>() == 0 || e[2].get<int>() == 1))
            valid = e[2].get<int>() == 1;
        else
            throw SchemaError(context + ": validity flag must be a boolean or 0/1");
    }
    return valid ? Keypoint::at(x, y) : Keypoint::missing();
}

} // namespace

void Dataset::validate() const
{
    std::set<std::string> ids;
    for (const auto& c : clips) {
        const auto ctx = clip_context(c.clip_id);
        if (!ids.insert(c.clip_id).second)
            throw SchemaError(ctx + ": duplicate clip_id");
        if (!label_map.contains(c.label_name))
            throw SchemaError(ctx + ": label '" + c.label_name + "' is not in the label map");
        if (!(c.width > 0.0) || !(c.height > 0.0))
            throw SchemaError(ctx + ": width and height must be positive");
        if (c.frames.empty())
            throw SchemaError(ctx + ": clip has no frames");
        for (std::size_t f = 0; f < c.frames.size(); ++f)
            if (c.frames[f].width() != c.width || c.frames[f].height() != c.height)
                throw SchemaError(ctx + ", frame " + std::to_string(f) +
                                  ": frame dimensions differ from the clip's");
    }
}

Dataset parse_dataset(const std::string& text)
{
    const json root = parse_json(text, "dataset");
    if (!root.is_object())
        throw SchemaError("dataset: top level must be an object");
    check_version(root, kDatasetFormatVersion, "dataset");

    Dataset ds;
    ds.label_map = parse_label_map(root, "dataset");
    const auto& clips = require(root, "clips", "dataset");
    if (!clips.is_array())
        throw SchemaError("dataset: clips must be an array");

    for (std::size_t ci = 0; ci < clips.size(); ++ci) {
        const auto& jc = clips[ci];
        std::string ctx = "clip #" + std::to_string(ci);
        const auto& id = require(jc, "clip_id", ctx);
        if (!id.is_string())
            throw SchemaError(ctx + ": clip_id must be a string");
        Clip clip;
        clip.clip_id = id.get<std::string>();
        ctx = clip_context(clip.clip_id);

        const auto& label = require(jc, "label_name", ctx);
        if (!label.is_string())
            throw SchemaError(ctx + ": label_name must be a string");
        clip.label_name = label.get<std::string>();
        clip.width = require_number(jc, "width", ctx);
        clip.height = require_number(jc, "height", ctx);
        if (!(clip.width > 0.0) || !(clip.height > 0.0))
            throw SchemaError(ctx + ": width and height must be positive");

        const auto& frames = require(jc, "frames", ctx);
        if (!frames.is_array())
            throw SchemaError(ctx + ": frames must be an array");
        clip.frames.reserve(frames.size());
        for (std::size_t fi = 0; fi < frames.size(); ++fi) {
            const auto fctx = ctx + ", frame " + std::to_string(fi);
            const auto& jf = frames[fi];
            if (!jf.is_array() || jf.size() != kNumJoints)
                throw SchemaError(fctx + ": expected " + std::to_string(kNumJoints) +
                                  " keypoints, found " +
                                  (jf.is_array() ? std::to_string(jf.size()) : "a non-array"));
            PoseFrame::Joints joints;
            for (std::size_t k = 0; k < kNumJoints; ++k)
                joints[k] = parse_keypoint(jf[k], fctx + ", keypoint " + std::to_string(k));
            clip.frames.emplace_back(joints, clip.width, clip.height);
        }
        ds.clips.push_back(std::move(clip));
    }
    ds.validate();
    return ds;
}

std::string dataset_to_json(const Dataset& dataset)
{
    json root;
    root["format_version"] = kDatasetFormatVersion;
    root["label_map"] = dataset.label_map.names();
    json clips = json::array();
    for (const auto& c : dataset.clips) {
        json jc;
        jc["clip_id"] = c.clip_id;
        jc["label_name"] = c.label_name;
        jc["width"] = c.width;
        jc["height"] = c.height;
        json frames = json::array();
        for (const auto& f : c.frames) {
            json jf = json::array();
            for (const auto& kp : f.keypoints())
                jf.push_back(json::array({kp.x, kp.y, kp.valid}));
            frames.push_back(std::move(jf));
        }
        jc["frames"] = std::move(frames);
        clips.push_back(std::move(jc));
    }
    root["clips"] = std::move(clips);
    return root.dump() + "\n";
}

Dataset load_dataset(const std::filesystem::path& path)
{
    return parse_dataset(read_text_file(path));
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path)
{
    write_text_file(path, dataset_to_json(dataset));
}

std::string model_to_json(const Model& model)
{
    model.net.validate();
    json root;
    root["format_version"] = kModelFormatVersion;
    root["dims"] = {{"input", model.net.dims.input_dim},
                    {"hidden", model.net.dims.hidden_dim},
                    {"classes", model.net.dims.num_classes},
                    {"layers", kNumGruLayers}};
    root["label_map"] = model.labels.names();
    root["dropout_rates"] = model.net.dropout_rates;
    root["preprocessing"] = {
        {"normalization",
         model.preprocessing.normalization == Normalization::Centroid ? "centroid" : "scale_only"},
        {"interval", model.preprocessing.interval.interval},
        {"min_len", model.preprocessing.interval.min_len}};
    if (model.split)
        root["split"] = {{"fractions", model.split->fractions}, {"seed", model.split->seed}};

    json tensors = json::array();
    auto params = model.net.params;
    for (const auto& t : params.tensors()) {
        json values = json::array();
        for (std::size_t r = 0; r < t.rows; ++r)
            for (std::size_t c = 0; c < t.cols; ++c)
                values.push_back(t.at(r, c));
        tensors.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols},
                           {"values", std::move(values)}});
    }
    root["tensors"] = std::move(tensors);
    return root.dump() + "\n";
}

Model parse_model(const std::string& text)
{
    const json root = parse_json(text, "model");
    if (!root.is_object())
        throw SchemaError("model: top level must be an object");
    check_version(root, kModelFormatVersion, "model");

    try {
        Model m;
        const auto& dims = require(root, "dims", "model");
        m.net.dims.input_dim = require(dims, "input", "model dims").get<std::size_t>();
        m.net.dims.hidden_dim = require(dims, "hidden", "model dims").get<std::size_t>();
        m.net.dims.num_classes = require(dims, "classes", "model dims").get<std::size_t>();
        if (require(dims, "layers", "model dims").get<std::size_t>() != kNumGruLayers)
            throw SchemaError("model: only " + std::to_string(kNumGruLayers) +
                              "-layer networks are supported");
        if (m.net.dims.input_dim != kVectorSize)
            throw SchemaError("model: input dimension must be " + std::to_string(kVectorSize));

        m.labels = parse_label_map(root, "model");
        if (m.labels.size() != m.net.dims.num_classes)
            throw SchemaError("model: label_map size does not match the class count");

        const auto& rates = require(root, "dropout_rates", "model");
        if (!rates.is_array() || rates.size() != kNumDropouts)
            throw SchemaError("model: dropout_rates must hold " + std::to_string(kNumDropouts) +
                              " numbers");
        for (std::size_t i = 0; i < kNumDropouts; ++i)
            m.net.dropout_rates[i] = rates[i].get<double>();

        const auto& pre = require(root, "preprocessing", "model");
        const auto norm = require(pre, "normalization", "model preprocessing").get<std::string>();
        if (norm == "centroid")
            m.preprocessing.normalization = Normalization::Centroid;
        else if (norm == "scale_only")
            m.preprocessing.normalization = Normalization::ScaleOnly;
        else
            throw SchemaError("model: unknown normalization '" + norm + "'");
        m.preprocessing.interval.interval =
            require(pre, "interval", "model preprocessing").get<std::size_t>();
        m.preprocessing.interval.min_len =
            require(pre, "min_len", "model preprocessing").get<std::size_t>();
        m.preprocessing.interval.validate();

        if (auto it = root.find("split"); it != root.end()) {
            SplitInfo s;
            s.fractions = require(*it, "fractions", "model split").get<std::array<double, 3>>();
            s.seed = require(*it, "seed", "model split").get<std::uint64_t>();
            m.split = s;
        }

        m.net.params = ParameterSet::zeros(m.net.dims);
        auto views = m.net.params.tensors();
        const auto& tensors = require(root, "tensors", "model");
        if (!tensors.is_array() || tensors.size() != views.size())
            throw SchemaError("model: expected " + std::to_string(views.size()) + " tensors");
        for (std::size_t i = 0; i < views.size(); ++i) {
            const auto& jt = tensors[i];
            const auto& v = views[i];
            const auto name = require(jt, "name", "model tensor").get<std::string>();
            if (name != v.name)
                throw SchemaError("model: tensor #" + std::to_string(i) + " is '" + name +
                                  "', expected '" + v.name + "'");
            if (require(jt, "rows", v.name).get<std::size_t>() != v.rows ||
                require(jt, "cols", v.name).get<std::size_t>() != v.cols)
                throw SchemaError("model: tensor '" + v.name + "' has the wrong shape");
            const auto& values = require(jt, "values", v.name);
            if (!values.is_array() || values.size() != v.rows * v.cols)
                throw SchemaError("model: tensor '" + v.name + "' has " +
                                  std::to_string(values.size()) + " values, expected " +
                                  std::to_string(v.rows * v.cols));
            for (std::size_t r = 0; r < v.rows; ++r)
                for (std::size_t c = 0; c < v.cols; ++c) {
                    const auto& e = values[r * v.cols + c];
                    if (!e.is_number())
                        throw SchemaError("model: tensor '" + v.name + "' holds a non-number");
                    v.at(r, c) = e.get<double>();
                }
        }
        m.net.validate();
        return m;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model: ") + e.what());
    } catch (const DimensionMismatch& e) {
        throw SchemaError(std::string("model: ") + e.what());
    } catch (const ConfigError& e) {
        throw SchemaError(std::string("model: ") + e.what());
    }
}

void save_model(const Model& model, const std::filesystem::path& path)
{
    write_text_file(path, model_to_json(model));
}

Model load_model(const std::filesystem::path& path)
{
    return parse_model(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out)
        throw Error("failed writing '" + path.string() + "'");
}

} // namespace skelact
