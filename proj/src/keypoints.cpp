#include "skelact/keypoints.hpp"

#include <algorithm>
#include <unordered_set>

#include "skelact/error.hpp"

namespace skelact {

std::string_view joint_name(Joint j)
{
    static constexpr std::array<std::string_view, kNumJoints> names = {
        "nose",       "neck",      "right_shoulder", "right_elbow", "right_wrist", "left_shoulder",
        "left_elbow", "left_wrist", "right_hip",     "right_knee",  "right_ankle", "left_hip",
        "left_knee",  "left_ankle", "right_eye",     "left_eye",    "right_ear",   "left_ear",
    };
    return names.at(index_of(j));
}

PoseFrame::PoseFrame(const Joints& keypoints, double width, double height)
    : keypoints_(keypoints), width_(width), height_(height)
{
    if (!(width > 0.0) || !(height > 0.0))
        throw SchemaError("frame width and height must be positive");
    for (auto& kp : keypoints_) {
        if (!kp.valid)
            kp = Keypoint::missing();
    }
}

LabelMap::LabelMap(std::vector<std::string> names) : names_(std::move(names))
{
    if (names_.empty())
        throw SchemaError("label map is empty");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty())
            throw SchemaError("label map contains an empty class name");
        if (!seen.insert(n).second)
            throw SchemaError("label map contains duplicate class '" + n + "'");
    }
}

LabelMap LabelMap::sth_default()
{
    return LabelMap({"wave", "walk", "stand", "fall", "kick", "sit", "others"});
}

std::size_t LabelMap::index_of(std::string_view name) const
{
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
        throw UnknownLabel("unknown label '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

const std::string& LabelMap::name_of(std::size_t index) const
{
    if (index >= names_.size())
        throw UnknownLabel("label index " + std::to_string(index) + " out of range for " +
                           std::to_string(names_.size()) + " classes");
    return names_[index];
}

bool LabelMap::contains(std::string_view name) const
{
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

ActionLabel make_label(const LabelMap& map, std::size_t index)
{
    return {index, map.name_of(index)};
}

ActionLabel make_label(const LabelMap& map, std::string_view name)
{
    return {map.index_of(name), std::string(name)};
}

std::size_t count_valid(const PoseFrame& frame)
{
    const auto& kps = frame.keypoints();
    return static_cast<std::size_t>(
        std::count_if(kps.begin(), kps.end(), [](const Keypoint& k) { return k.valid; }));
}

KeypointVector flatten(const PoseFrame& frame)
{
    KeypointVector out;
    for (std::size_t i = 0; i < kNumJoints; ++i) {
        const auto& kp = frame[i];
        out[2 * i] = kp.valid ? kp.x : 0.0;
        out[2 * i + 1] = kp.valid ? kp.y : 0.0;
    }
    return out;
}

} // namespace skelact
