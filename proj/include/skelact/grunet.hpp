#pragma once

/// \file grunet.hpp
/// \brief Three stacked GRU layers with dropout and a dense softmax head,
/// trained with cross-entropy through full backpropagation through time.
///
/// Cell (per layer, per timestep):
///
///     r  = sigmoid(W_r x + U_r h_prev + b_r)
///     z  = sigmoid(W_z x + U_z h_prev + b_z)
///     hc = tanh(W_h x + U_h (r * h_prev) + b_h)
///     h  = (1 - z) * h_prev + z * hc
///
/// Dropout slots: 0 on the network input, 1 and 2 on the outputs of GRU
/// layers 0 and 1, 3 on the top-layer state read by the head. Inverted
/// dropout, train mode only. The head reads the final timestep.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "skelact/keypoints.hpp"

namespace skelact {

constexpr std::size_t kNumGruLayers = 3;
constexpr std::size_t kNumDropouts = 4;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct NetworkDims {
    std::size_t input_dim = kVectorSize;
    std::size_t hidden_dim = 64;
    std::size_t num_classes = 4;

    friend bool operator==(const NetworkDims&, const NetworkDims&) = default;
};

struct GruLayerParams {
    Mat w_r, w_z, w_h; // hidden x input
    Mat u_r, u_z, u_h; // hidden x hidden
    Vec b_r, b_z, b_h;

    static GruLayerParams zeros(std::size_t input_dim, std::size_t hidden_dim);
    std::size_t input_dim() const { return static_cast<std::size_t>(w_r.cols()); }
    std::size_t hidden_dim() const { return static_cast<std::size_t>(w_r.rows()); }
};

/// Mutable view of one parameter tensor. `data` is Eigen's column-major storage.
struct TensorView {
    std::string name;
    std::size_t rows;
    std::size_t cols;
    std::span<double> data;

    double& at(std::size_t r, std::size_t c) const { return data[c * rows + r]; }
};

/// Every trainable tensor of the network. Also used for gradients and
/// optimizer moments, which share the exact same shapes.
struct ParameterSet {
    std::array<GruLayerParams, kNumGruLayers> layers;
    Mat head_w; // classes x hidden
    Vec head_b;

    static ParameterSet zeros(const NetworkDims& dims);

    /// Fixed order: for each layer l, "layer<l>.W_r", W_z, W_h, U_r, U_z, U_h,
    /// b_r, b_z, b_h; then "head.W", "head.b".
    std::vector<TensorView> tensors();
    std::size_t parameter_count() const;

    void set_zero();
    ParameterSet& operator+=(const ParameterSet& other);
    ParameterSet& operator*=(double s);
};

struct GruNetwork {
    NetworkDims dims;
    ParameterSet params;
    std::array<double, kNumDropouts> dropout_rates{0.2, 0.2, 0.2, 0.2};

    /// Throws DimensionMismatch / ConfigError on any inconsistency.
    void validate() const;
};

enum class Mode { Train, Eval };

/// Per-timestep activations of one layer.
struct StepActivations {
    Vec x;      // layer input after dropout
    Vec h_prev;
    Vec r;
    Vec z;
    Vec hc;
    Vec h;
};

struct ForwardCache {
    NetworkDims dims;
    std::size_t length = 0;
    /// steps[l][t]
    std::array<std::vector<StepActivations>, kNumGruLayers> steps;
    /// Inverted-dropout multipliers (0 or 1/(1-p)) for slots 0..2, per timestep.
    std::array<std::vector<Vec>, kNumGruLayers> masks;
    Vec head_mask;
    Vec head_input;
};

struct ForwardResult {
    Vec logits;
    ForwardCache cache;
};

struct LossResult {
    double loss = 0.0;
    Vec dlogits;
};

/// Throws DimensionMismatch.
Vec gru_cell_forward(const GruLayerParams& params, const Vec& x, const Vec& h_prev);

/// Throws DimensionMismatch on an empty sequence or wrong vector size.
ForwardResult forward(const GruNetwork& net, const SampleSequence& seq, Mode mode,
                      std::uint64_t rng_seed);

/// Max-subtracted softmax.
Vec softmax(const Vec& logits);

/// loss = -log softmax(logits)[label]; dlogits = softmax(logits) - onehot(label).
LossResult softmax_cross_entropy(const Vec& logits, std::size_t label);

/// Gradients of the loss for every tensor given dL/dlogits. Throws StaleCache
/// if the cache was produced by a network of different shape.
ParameterSet backward(const GruNetwork& net, const ForwardCache& cache, const Vec& dlogits);

/// Weights ~ U(-s, s), s = sqrt(6 / (fan_in + fan_out)) per matrix; biases 0.
GruNetwork init_params(const NetworkDims& dims, std::uint64_t seed,
                       const std::array<double, kNumDropouts>& dropout_rates = {0.2, 0.2, 0.2,
                                                                                0.2});

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
template <typename Rng>
double unit_uniform(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace skelact
