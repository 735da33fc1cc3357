#pragma once

#include <vector>

#include "skelact/keypoints.hpp"

namespace skelact {

/// Mean position of the valid keypoints of a frame, in pixels.
struct Centroid {
    double x_bar = 0.0;
    double y_bar = 0.0;
};

enum class Normalization {
    /// Re-origin at the valid-keypoint centroid, then divide by image size.
    Centroid,
    /// Divide by image size only (the no-globalization ablation).
    ScaleOnly,
};

struct NormalizedFrame {
    KeypointVector vector;
    /// Set when the frame had no valid keypoints; the vector is then all zeros.
    bool degenerate = false;
};

/// Throws ZeroValidKeypoints when no keypoint is valid.
Centroid centroid(const PoseFrame& frame);

/// Valid joints map to ((x - x_bar) / w, (y - y_bar) / h); invalid joints
/// emit (0,0). Never throws.
NormalizedFrame normalize_frame(const PoseFrame& frame,
                                Normalization mode = Normalization::Centroid);

std::vector<KeypointVector> normalize_sequence(const std::vector<PoseFrame>& frames,
                                               Normalization mode = Normalization::Centroid);

} // namespace skelact
