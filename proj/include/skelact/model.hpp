#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "skelact/grunet.hpp"
#include "skelact/keypoints.hpp"
#include "skelact/normalize.hpp"
#include "skelact/sampler.hpp"

namespace skelact {

/// How raw frames were turned into training sequences. Inference must apply
/// the same preprocessing.
struct Preprocessing {
    Normalization normalization = Normalization::Centroid;
    IntervalConfig interval{4, 2};
};

/// Clip-level partition used during training, so a model can be evaluated on
/// exactly the clips it was (or was not) trained on.
struct SplitInfo {
    std::array<double, 3> fractions{0.7, 0.15, 0.15};
    std::uint64_t seed = 7;
};

/// A trained network together with everything needed to run it.
struct Model {
    GruNetwork net;
    LabelMap labels;
    Preprocessing preprocessing;
    std::optional<SplitInfo> split;
};

} // namespace skelact
