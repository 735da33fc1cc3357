#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "skelact/grunet.hpp"

namespace skelact {

enum class OptimizerKind { Adam, Sgd };

OptimizerKind parse_optimizer(std::string_view name);
std::string_view to_string(OptimizerKind kind);

class Optimizer {
public:
    virtual ~Optimizer() = default;
    /// params -= update(grads). Shapes must match.
    virtual void step(ParameterSet& params, ParameterSet& grads) = 0;
};

class Sgd final : public Optimizer {
public:
    explicit Sgd(double learning_rate) : lr_(learning_rate) {}
    void step(ParameterSet& params, ParameterSet& grads) override;

private:
    double lr_;
};

class Adam final : public Optimizer {
public:
    Adam(const NetworkDims& dims, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
         double epsilon = 1e-8);
    void step(ParameterSet& params, ParameterSet& grads) override;

    std::uint64_t steps_taken() const { return t_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::uint64_t t_ = 0;
    ParameterSet m_;
    ParameterSet v_;
};

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, const NetworkDims& dims,
                                          double learning_rate);

} // namespace skelact
