#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "skelact/datasetio.hpp"
#include "skelact/error.hpp"

namespace skelact {

namespace {

struct Point {
    double x;
    double y;
};

using Pose = std::array<Point, kNumJoints>;

// Standing person facing the camera, origin at mid-hip, y pointing down.
// The person's right side appears on the image left.
Pose canonical_pose()
{
    Pose p{};
    auto set = [&p](Joint j, double x, double y) { p[index_of(j)] = {x, y}; };
    set(Joint::Nose, 0, -150);
    set(Joint::Neck, 0, -120);
    set(Joint::RightShoulder, -30, -118);
    set(Joint::RightElbow, -38, -80);
    set(Joint::RightWrist, -42, -45);
    set(Joint::LeftShoulder, 30, -118);
    set(Joint::LeftElbow, 38, -80);
    set(Joint::LeftWrist, 42, -45);
    set(Joint::RightHip, -15, 0);
    set(Joint::RightKnee, -17, 45);
    set(Joint::RightAnkle, -18, 90);
    set(Joint::LeftHip, 15, 0);
    set(Joint::LeftKnee, 17, 45);
    set(Joint::LeftAnkle, 18, 90);
    set(Joint::RightEye, -6, -156);
    set(Joint::LeftEye, 6, -156);
    set(Joint::RightEar, -12, -152);
    set(Joint::LeftEar, 12, -152);
    return p;
}

Point& at(Pose& p, Joint j) { return p[index_of(j)]; }

double smoothstep(double v)
{
    v = std::clamp(v, 0.0, 1.0);
    return v * v * (3.0 - 2.0 * v);
}

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return lo + (hi - lo) * unit_uniform(rng);
}

/// One clip's motion as a function of the frame index, before translation and noise.
class Motion {
public:
    virtual ~Motion() = default;
    virtual Pose at_frame(std::size_t t) const = 0;
};

class StandMotion final : public Motion {
public:
    Pose at_frame(std::size_t) const override { return canonical_pose(); }
};

// Right arm raised to the side; the forearm swings about the elbow.
class WaveMotion final : public Motion {
public:
    explicit WaveMotion(std::mt19937_64& rng)
        : period_(uniform(rng, 10.0, 18.0)), phase_(uniform(rng, 0.0, 2.0 * std::numbers::pi)),
          amplitude_(uniform(rng, 0.5, 0.8))
    {
    }

    Pose at_frame(std::size_t t) const override
    {
        Pose p = canonical_pose();
        const Point shoulder = at(p, Joint::RightShoulder);
        Point& elbow = at(p, Joint::RightElbow);
        Point& wrist = at(p, Joint::RightWrist);
        elbow = {shoulder.x - 36.0, shoulder.y - 8.0};
        const double theta =
            amplitude_ * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period_ + phase_);
        constexpr double forearm = 36.0;
        wrist = {elbow.x + forearm * std::sin(theta), elbow.y - forearm * std::cos(theta)};
        return p;
    }

private:
    double period_;
    double phase_;
    double amplitude_;
};

// Whole-body translation along x with a leg/arm gait cycle.
class WalkMotion final : public Motion {
public:
    explicit WalkMotion(std::mt19937_64& rng)
        : direction_(unit_uniform(rng) < 0.5 ? -1.0 : 1.0), speed_(uniform(rng, 2.0, 3.0)),
          period_(uniform(rng, 12.0, 20.0)), phase_(uniform(rng, 0.0, 2.0 * std::numbers::pi))
    {
    }

    Pose at_frame(std::size_t t) const override
    {
        Pose p = canonical_pose();
        const double s =
            std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period_ + phase_);
        constexpr double stride = 22.0;
        constexpr double lift = 14.0;
        constexpr double arm_swing = 12.0;

        at(p, Joint::LeftAnkle).x += direction_ * stride * s;
        at(p, Joint::RightAnkle).x -= direction_ * stride * s;
        at(p, Joint::LeftKnee).x += direction_ * 0.5 * stride * s;
        at(p, Joint::RightKnee).x -= direction_ * 0.5 * stride * s;
        at(p, Joint::LeftKnee).y -= lift * std::max(0.0, s);
        at(p, Joint::RightKnee).y -= lift * std::max(0.0, -s);
        at(p, Joint::LeftAnkle).y -= 0.6 * lift * std::max(0.0, s);
        at(p, Joint::RightAnkle).y -= 0.6 * lift * std::max(0.0, -s);
        at(p, Joint::LeftWrist).x -= direction_ * arm_swing * s;
        at(p, Joint::RightWrist).x += direction_ * arm_swing * s;
        at(p, Joint::LeftElbow).x -= direction_ * 0.5 * arm_swing * s;
        at(p, Joint::RightElbow).x += direction_ * 0.5 * arm_swing * s;

        const double shift = direction_ * speed_ * static_cast<double>(t);
        const double bob = 3.0 * std::abs(s);
        for (auto& pt : p) {
            pt.x += shift;
            pt.y += bob;
        }
        return p;
    }

private:
    double direction_;
    double speed_;
    double period_;
    double phase_;
};

// Body rotates about the feet towards the floor while the whole skeleton drops.
class FallMotion final : public Motion {
public:
    FallMotion(std::mt19937_64& rng, std::size_t frames)
        : frames_(frames), direction_(unit_uniform(rng) < 0.5 ? -1.0 : 1.0),
          onset_(uniform(rng, 0.1, 0.35)), duration_(uniform(rng, 0.3, 0.5)),
          max_angle_(uniform(rng, 70.0, 85.0) * std::numbers::pi / 180.0),
          drop_(uniform(rng, 30.0, 50.0))
    {
    }

    Pose at_frame(std::size_t t) const override
    {
        Pose p = canonical_pose();
        const double u =
            frames_ > 1 ? static_cast<double>(t) / static_cast<double>(frames_ - 1) : 0.0;
        const double progress = smoothstep((u - onset_) / duration_);
        const double angle = direction_ * max_angle_ * progress;
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        const Point pivot{0.0, 90.0};
        for (auto& pt : p) {
            const double dx = pt.x - pivot.x;
            const double dy = pt.y - pivot.y;
            pt = {pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy + drop_ * progress};
        }
        return p;
    }

private:
    std::size_t frames_;
    double direction_;
    double onset_;
    double duration_;
    double max_angle_;
    double drop_;
};

std::unique_ptr<Motion> make_motion(const std::string& cls, std::mt19937_64& rng,
                                    std::size_t frames)
{
    if (cls == "wave")
        return std::make_unique<WaveMotion>(rng);
    if (cls == "walk")
        return std::make_unique<WalkMotion>(rng);
    if (cls == "stand")
        return std::make_unique<StandMotion>();
    if (cls == "fall")
        return std::make_unique<FallMotion>(rng, frames);
    throw ConfigError("synthetic generator has no motion for class '" + cls + "'");
}

double round_milli(double v)
{
    return std::round(v * 1000.0) / 1000.0;
}

} // namespace

const std::vector<std::string>& synthetic_motion_classes()
{
    static const std::vector<std::string> names{"wave", "walk", "stand", "fall"};
    return names;
}

Dataset generate_synthetic(const SyntheticConfig& cfg)
{
    if (cfg.classes.empty())
        throw ConfigError("synthetic dataset needs at least one class");
    if (cfg.clips_per_class == 0 || cfg.frames_per_clip == 0)
        throw ConfigError("clips per class and frames per clip must be positive");
    if (!(cfg.noise_sigma >= 0.0))
        throw ConfigError("noise sigma must be >= 0");
    if (!(cfg.width > 0.0) || !(cfg.height > 0.0))
        throw ConfigError("canvas width and height must be positive");

    Dataset ds;
    ds.label_map = LabelMap(cfg.classes);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    constexpr double margin = 4.0;

    for (std::size_t c = 0; c < cfg.clips_per_class; ++c) {
        for (const auto& cls : cfg.classes) {
            auto motion = make_motion(cls, rng, cfg.frames_per_clip);
            std::vector<Pose> poses;
            poses.reserve(cfg.frames_per_clip);
            double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
            for (std::size_t t = 0; t < cfg.frames_per_clip; ++t) {
                poses.push_back(motion->at_frame(t));
                for (const auto& pt : poses.back()) {
                    min_x = std::min(min_x, pt.x);
                    max_x = std::max(max_x, pt.x);
                    min_y = std::min(min_y, pt.y);
                    max_y = std::max(max_y, pt.y);
                }
            }

            // Random placement keeping the whole trajectory on the canvas.
            const double lo_x = margin - min_x;
            const double hi_x = cfg.width - margin - max_x;
            const double lo_y = margin - min_y;
            const double hi_y = cfg.height - margin - max_y;
            const double off_x = hi_x > lo_x ? uniform(rng, lo_x, hi_x) : 0.5 * (lo_x + hi_x);
            const double off_y = hi_y > lo_y ? uniform(rng, lo_y, hi_y) : 0.5 * (lo_y + hi_y);

            Clip clip;
            clip.clip_id = cls + "_" + std::to_string(c);
            clip.label_name = cls;
            clip.width = cfg.width;
            clip.height = cfg.height;
            clip.frames.reserve(poses.size());
            for (const auto& pose : poses) {
                PoseFrame::Joints joints;
                for (std::size_t k = 0; k < kNumJoints; ++k) {
                    double x = pose[k].x + off_x;
                    double y = pose[k].y + off_y;
                    if (cfg.noise_sigma > 0.0) {
                        x += cfg.noise_sigma * noise(rng);
                        y += cfg.noise_sigma * noise(rng);
                    }
                    x = round_milli(std::clamp(x, 0.0, cfg.width));
                    y = round_milli(std::clamp(y, 0.0, cfg.height));
                    joints[k] = Keypoint::at(x, y);
                }
                clip.frames.emplace_back(joints, cfg.width, cfg.height);
            }
            ds.clips.push_back(std::move(clip));
        }
    }
    return ds;
}

} // namespace skelact
