#include "skelact/normalize.hpp"

#include "skelact/error.hpp"

namespace skelact {

Centroid centroid(const PoseFrame& frame)
{
    double sx = 0.0;
    double sy = 0.0;
    std::size_t n = 0;
    for (const auto& kp : frame.keypoints()) {
        if (!kp.valid)
            continue;
        sx += kp.x;
        sy += kp.y;
        ++n;
    }
    if (n == 0)
        throw ZeroValidKeypoints("frame has no valid keypoints");
    return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

NormalizedFrame normalize_frame(const PoseFrame& frame, Normalization mode)
{
    NormalizedFrame out;
    if (count_valid(frame) == 0) {
        out.degenerate = true;
        return out;
    }

    Centroid origin;
    if (mode == Normalization::Centroid)
        origin = centroid(frame);

    for (std::size_t i = 0; i < kNumJoints; ++i) {
        const auto& kp = frame[i];
        if (!kp.valid)
            continue;
        out.vector[2 * i] = (kp.x - origin.x_bar) / frame.width();
        out.vector[2 * i + 1] = (kp.y - origin.y_bar) / frame.height();
    }
    return out;
}

std::vector<KeypointVector> normalize_sequence(const std::vector<PoseFrame>& frames,
                                               Normalization mode)
{
    std::vector<KeypointVector> out;
    out.reserve(frames.size());
    for (const auto& f : frames)
        out.push_back(normalize_frame(f, mode).vector);
    return out;
}

} // namespace skelact
