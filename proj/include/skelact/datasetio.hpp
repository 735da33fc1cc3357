#pragma once

/// \file datasetio.hpp
/// \brief Dataset and model files (JSON), plus the deterministic synthetic
/// skeleton-motion generator.
///
/// Dataset file:
///
///     {
///       "format_version": 1,
///       "label_map": ["wave", "walk", ...],
///       "clips": [
///         {"clip_id": "...", "label_name": "wave", "width": 640, "height": 480,
///          "frames": [[[x, y, valid], ... 18 entries], ...]}
///       ]
///     }
///
/// `valid` may be a boolean or 0/1. A two-element [x, y] entry has no flag;
/// it is valid unless it is exactly (0,0).
///
/// Model file: see save_model().

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "skelact/keypoints.hpp"
#include "skelact/model.hpp"

namespace skelact {

constexpr int kDatasetFormatVersion = 1;
constexpr int kModelFormatVersion = 1;

struct Clip {
    std::string clip_id;
    std::string label_name;
    double width = 0.0;
    double height = 0.0;
    std::vector<PoseFrame> frames;

    friend bool operator==(const Clip&, const Clip&) = default;
};

struct Dataset {
    LabelMap label_map;
    std::vector<Clip> clips;

    /// Throws SchemaError naming the offending clip.
    void validate() const;
    std::size_t label_index(const Clip& clip) const { return label_map.index_of(clip.label_name); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Throws ParseError (malformed JSON) or SchemaError (with clip id and frame index).
Dataset parse_dataset(const std::string& text);
Dataset load_dataset(const std::filesystem::path& path);
std::string dataset_to_json(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Canonical JSON (sorted keys, shortest round-trip doubles), so save, load,
/// save is byte-identical and every parameter round-trips bit-exactly.
/// Tensors are stored in ParameterSet::tensors() order, values row-major.
std::string model_to_json(const Model& model);
/// Throws ParseError, VersionError or SchemaError; never returns a partial model.
Model parse_model(const std::string& text);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

struct SyntheticConfig {
    /// Subset of {wave, walk, stand, fall}, in label-map order.
    std::vector<std::string> classes{"wave", "walk", "stand", "fall"};
    std::size_t clips_per_class = 50;
    std::size_t frames_per_clip = 40;
    double noise_sigma = 2.0;
    std::uint64_t seed = 7;
    double width = 640.0;
    double height = 480.0;
};

/// Names the generator knows how to animate.
const std::vector<std::string>& synthetic_motion_classes();

/// Pure function of its config. Every clip gets a random global translation
/// keeping the whole motion inside the canvas, and Gaussian jitter on every
/// coordinate. Throws ConfigError on bad parameters.
Dataset generate_synthetic(const SyntheticConfig& cfg);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace skelact
