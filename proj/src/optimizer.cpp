#include "skelact/optimizer.hpp"

#include <cmath>
#include <string>

#include "skelact/error.hpp"

namespace skelact {

OptimizerKind parse_optimizer(std::string_view name)
{
    if (name == "adam")
        return OptimizerKind::Adam;
    if (name == "sgd")
        return OptimizerKind::Sgd;
    throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected adam or sgd)");
}

std::string_view to_string(OptimizerKind kind)
{
    return kind == OptimizerKind::Adam ? "adam" : "sgd";
}

void Sgd::step(ParameterSet& params, ParameterSet& grads)
{
    auto p = params.tensors();
    auto g = grads.tensors();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p[i].data.size(); ++j)
            p[i].data[j] -= lr_ * g[i].data[j];
}

Adam::Adam(const NetworkDims& dims, double learning_rate, double beta1, double beta2,
           double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon),
      m_(ParameterSet::zeros(dims)), v_(ParameterSet::zeros(dims))
{
}

void Adam::step(ParameterSet& params, ParameterSet& grads)
{
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    auto p = params.tensors();
    auto g = grads.tensors();
    auto m = m_.tensors();
    auto v = v_.tensors();
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p[i].data.size(); ++j) {
            const double gj = g[i].data[j];
            double& mj = m[i].data[j];
            double& vj = v[i].data[j];
            mj = beta1_ * mj + (1.0 - beta1_) * gj;
            vj = beta2_ * vj + (1.0 - beta2_) * gj * gj;
            const double m_hat = mj / bc1;
            const double v_hat = vj / bc2;
            p[i].data[j] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
        }
    }
}

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, const NetworkDims& dims,
                                          double learning_rate)
{
    if (kind == OptimizerKind::Sgd)
        return std::make_unique<Sgd>(learning_rate);
    return std::make_unique<Adam>(dims, learning_rate);
}

} // namespace skelact
