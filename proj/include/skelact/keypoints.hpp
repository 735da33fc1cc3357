#pragma once

/// \file keypoints.hpp
/// \brief Per-frame keypoint data model, label maps and labeled sequences.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skelact {

constexpr std::size_t kNumJoints = 18;
constexpr std::size_t kVectorSize = 2 * kNumJoints;

/// COCO-18 joint order (OpenPose convention). Indices are stable and are the
/// layout of every KeypointVector: entry 2*i is x of joint i, 2*i+1 is y.
enum class Joint : std::size_t {
    Nose = 0,
    Neck = 1,
    RightShoulder = 2,
    RightElbow = 3,
    RightWrist = 4,
    LeftShoulder = 5,
    LeftElbow = 6,
    LeftWrist = 7,
    RightHip = 8,
    RightKnee = 9,
    RightAnkle = 10,
    LeftHip = 11,
    LeftKnee = 12,
    LeftAnkle = 13,
    RightEye = 14,
    LeftEye = 15,
    RightEar = 16,
    LeftEar = 17,
};

constexpr std::size_t index_of(Joint j) { return static_cast<std::size_t>(j); }

std::string_view joint_name(Joint j);

/// One joint. Invalid joints carry the (0,0) sentinel.
struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    bool valid = false;

    static Keypoint at(double x, double y) { return {x, y, true}; }
    static Keypoint missing() { return {}; }

    friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

/// A single person's 18 keypoints plus the dimensions of the source image.
class PoseFrame {
public:
    using Joints = std::array<Keypoint, kNumJoints>;

    /// Throws SchemaError if width/height are not positive. Invalid keypoints
    /// are forced onto the (0,0) sentinel.
    PoseFrame(const Joints& keypoints, double width, double height);

    const Joints& keypoints() const { return keypoints_; }
    const Keypoint& operator[](std::size_t i) const { return keypoints_[i]; }
    const Keypoint& operator[](Joint j) const { return keypoints_[index_of(j)]; }
    double width() const { return width_; }
    double height() const { return height_; }

    friend bool operator==(const PoseFrame&, const PoseFrame&) = default;

private:
    Joints keypoints_;
    double width_;
    double height_;
};

/// Flat [x0, y0, x1, y1, ..., x17, y17] vector.
struct KeypointVector {
    std::array<double, kVectorSize> values{};

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    static constexpr std::size_t size() { return kVectorSize; }

    friend bool operator==(const KeypointVector&, const KeypointVector&) = default;
};

/// Ordered set of class names. Index <-> name is a bijection.
class LabelMap {
public:
    LabelMap() = default;
    /// Throws SchemaError on empty or duplicate names.
    explicit LabelMap(std::vector<std::string> names);

    /// wave, walk, stand, fall, kick, sit, others.
    static LabelMap sth_default();

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    /// Throws UnknownLabel.
    std::size_t index_of(std::string_view name) const;
    const std::string& name_of(std::size_t index) const;
    bool contains(std::string_view name) const;

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
    std::vector<std::string> names_;
};

struct ActionLabel {
    std::size_t index = 0;
    std::string name;

    friend bool operator==(const ActionLabel&, const ActionLabel&) = default;
};

ActionLabel make_label(const LabelMap& map, std::size_t index);
ActionLabel make_label(const LabelMap& map, std::string_view name);

struct SampleSequence {
    std::vector<KeypointVector> vectors;
    std::optional<ActionLabel> label;

    std::size_t length() const { return vectors.size(); }
};

std::size_t count_valid(const PoseFrame& frame);

/// Raw coordinates in joint order; invalid joints contribute (0,0).
KeypointVector flatten(const PoseFrame& frame);

} // namespace skelact
