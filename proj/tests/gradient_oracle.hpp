#pragma once

// Central finite-difference oracle for the network gradients. Test-only: it
// calls forward() and the loss, never backward().

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "skelact/grunet.hpp"

namespace skelact::testing {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_tensor;
    std::size_t parameters_checked = 0;
};

/// Central differences at eps = 1e-5 on an O(1) loss carry roundoff of about
/// 1e-16 / 1e-5 = 1e-11, so the denominator is floored at 1e-6: entries below
/// the floor are held to an absolute error of 1e-10 at the 1e-4 threshold.
constexpr double kRelativeErrorFloor = 1e-6;

inline double relative_error(double analytic, double numeric)
{
    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), kRelativeErrorFloor});
    return std::abs(analytic - numeric) / denom;
}

/// Loss is evaluated in train mode with a fixed dropout seed, so both routes
/// see identical dropout masks.
inline GradCheckResult finite_difference_check(GruNetwork net, const SampleSequence& seq,
                                               std::size_t label, std::uint64_t dropout_seed,
                                               double eps = 1e-5)
{
    auto loss_of = [&](const GruNetwork& n) {
        return softmax_cross_entropy(forward(n, seq, Mode::Train, dropout_seed).logits, label).loss;
    };

    const auto fwd = forward(net, seq, Mode::Train, dropout_seed);
    const auto ce = softmax_cross_entropy(fwd.logits, label);
    auto analytic = backward(net, fwd.cache, ce.dlogits);

    GradCheckResult res;
    auto params = net.params.tensors();
    auto grads = analytic.tensors();
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t].data.size(); ++i) {
            double& w = params[t].data[i];
            const double saved = w;
            w = saved + eps;
            const double plus = loss_of(net);
            w = saved - eps;
            const double minus = loss_of(net);
            w = saved;
            const double numeric = (plus - minus) / (2.0 * eps);
            const double err = relative_error(grads[t].data[i], numeric);
            if (err > res.max_rel_error) {
                res.max_rel_error = err;
                res.worst_tensor = params[t].name;
            }
            ++res.parameters_checked;
        }
    }
    return res;
}

/// The hidden-3, length-4, 3-class configuration with random weights,
/// random biases, dropout active and random inputs, all derived from `seed`.
inline GradCheckResult gradient_check_for_seed(std::uint64_t seed)
{
    auto net = init_params({kVectorSize, 3, 3}, seed, {0.2, 0.2, 0.2, 0.2});
    std::mt19937_64 rng(seed * 7919 + 1);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& t : net.params.tensors())
        if (t.name.find(".b") != std::string::npos)
            for (double& v : t.data)
                v = u(rng);

    SampleSequence seq;
    for (int s = 0; s < 4; ++s) {
        KeypointVector v;
        for (auto& x : v.values)
            x = u(rng);
        seq.vectors.push_back(v);
    }
    const auto label = static_cast<std::size_t>(rng() % 3);
    return finite_difference_check(net, seq, label, seed + 12345);
}

} // namespace skelact::testing
