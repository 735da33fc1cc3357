#include <gtest/gtest.h>

#include <cmath>

#include "skelact/error.hpp"
#include "skelact/optimizer.hpp"

namespace skelact {
namespace {

const NetworkDims kTiny{kVectorSize, 2, 2};

ParameterSet filled(double v)
{
    auto ps = ParameterSet::zeros(kTiny);
    for (auto& t : ps.tensors())
        std::fill(t.data.begin(), t.data.end(), v);
    return ps;
}

TEST(Sgd, StepsAgainstGradient)
{
    auto params = filled(1.0);
    auto grads = filled(0.5);
    Sgd(0.1).step(params, grads);
    for (const auto& t : params.tensors())
        for (double v : t.data)
            EXPECT_DOUBLE_EQ(v, 0.95);
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign)
{
    auto params = filled(1.0);
    auto grads = filled(-3.0);
    Adam adam(kTiny, 0.01);
    adam.step(params, grads);
    // m_hat = g, v_hat = g^2 after bias correction: update = lr * g / (|g| + eps).
    const double expect = 1.0 + 0.01 * 3.0 / (3.0 + 1e-8);
    for (const auto& t : params.tensors())
        for (double v : t.data)
            EXPECT_NEAR(v, expect, 1e-15);
    EXPECT_EQ(adam.steps_taken(), 1u);
}

TEST(Adam, MinimizesQuadratic)
{
    auto params = filled(2.0);
    Adam adam(kTiny, 0.05);
    for (int i = 0; i < 2000; ++i) {
        auto grads = params; // gradient of 0.5 * ||p||^2
        adam.step(params, grads);
    }
    for (const auto& t : params.tensors())
        for (double v : t.data)
            EXPECT_NEAR(v, 0.0, 1e-2);
}

TEST(Optimizer, ParseNames)
{
    EXPECT_EQ(parse_optimizer("adam"), OptimizerKind::Adam);
    EXPECT_EQ(parse_optimizer("sgd"), OptimizerKind::Sgd);
    EXPECT_THROW(parse_optimizer("rmsprop"), ConfigError);
    EXPECT_EQ(to_string(OptimizerKind::Sgd), "sgd");
}

} // namespace
} // namespace skelact
