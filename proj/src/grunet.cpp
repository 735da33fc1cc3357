#include "skelact/grunet.hpp"

#include <cmath>
#include <random>

#include "skelact/error.hpp"

namespace skelact {

namespace {

Vec sigmoid(const Vec& a)
{
    return a.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

std::string shape_of(const Mat& m)
{
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_shape(const Mat& m, Eigen::Index rows, Eigen::Index cols, const std::string& what)
{
    if (m.rows() != rows || m.cols() != cols)
        throw DimensionMismatch(what + " has shape " + shape_of(m) + ", expected " +
                                std::to_string(rows) + "x" + std::to_string(cols));
}

void check_size(const Vec& v, Eigen::Index n, const std::string& what)
{
    if (v.size() != n)
        throw DimensionMismatch(what + " has size " + std::to_string(v.size()) + ", expected " +
                                std::to_string(n));
}

void check_layer(const GruLayerParams& p, Eigen::Index in, Eigen::Index hid, const std::string& tag)
{
    check_shape(p.w_r, hid, in, tag + ".W_r");
    check_shape(p.w_z, hid, in, tag + ".W_z");
    check_shape(p.w_h, hid, in, tag + ".W_h");
    check_shape(p.u_r, hid, hid, tag + ".U_r");
    check_shape(p.u_z, hid, hid, tag + ".U_z");
    check_shape(p.u_h, hid, hid, tag + ".U_h");
    check_size(p.b_r, hid, tag + ".b_r");
    check_size(p.b_z, hid, tag + ".b_z");
    check_size(p.b_h, hid, tag + ".b_h");
}

StepActivations cell_step(const GruLayerParams& p, const Vec& x, const Vec& h_prev)
{
    StepActivations s;
    s.x = x;
    s.h_prev = h_prev;
    s.r = sigmoid(p.w_r * x + p.u_r * h_prev + p.b_r);
    s.z = sigmoid(p.w_z * x + p.u_z * h_prev + p.b_z);
    Vec a_h = p.w_h * x + p.u_h * s.r.cwiseProduct(h_prev) + p.b_h;
    s.hc = a_h.array().tanh().matrix();
    s.h = (Vec::Ones(s.z.size()) - s.z).cwiseProduct(h_prev) + s.z.cwiseProduct(s.hc);
    return s;
}

Vec dropout_mask(std::size_t n, double rate, Mode mode, std::mt19937_64& rng)
{
    if (mode == Mode::Eval || rate <= 0.0)
        return Vec::Ones(static_cast<Eigen::Index>(n));
    const double keep_scale = 1.0 / (1.0 - rate);
    Vec m(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m[i] = unit_uniform(rng) < rate ? 0.0 : keep_scale;
    return m;
}

template <typename Fn>
void for_each_layer_tensor(GruLayerParams& p, Fn&& fn)
{
    fn("W_r", p.w_r);
    fn("W_z", p.w_z);
    fn("W_h", p.w_h);
    fn("U_r", p.u_r);
    fn("U_z", p.u_z);
    fn("U_h", p.u_h);
    fn("b_r", p.b_r);
    fn("b_z", p.b_z);
    fn("b_h", p.b_h);
}

} // namespace

GruLayerParams GruLayerParams::zeros(std::size_t input_dim, std::size_t hidden_dim)
{
    const auto in = static_cast<Eigen::Index>(input_dim);
    const auto hid = static_cast<Eigen::Index>(hidden_dim);
    GruLayerParams p;
    p.w_r = Mat::Zero(hid, in);
    p.w_z = Mat::Zero(hid, in);
    p.w_h = Mat::Zero(hid, in);
    p.u_r = Mat::Zero(hid, hid);
    p.u_z = Mat::Zero(hid, hid);
    p.u_h = Mat::Zero(hid, hid);
    p.b_r = Vec::Zero(hid);
    p.b_z = Vec::Zero(hid);
    p.b_h = Vec::Zero(hid);
    return p;
}

ParameterSet ParameterSet::zeros(const NetworkDims& dims)
{
    ParameterSet ps;
    for (std::size_t l = 0; l < kNumGruLayers; ++l)
        ps.layers[l] = GruLayerParams::zeros(l == 0 ? dims.input_dim : dims.hidden_dim,
                                             dims.hidden_dim);
    ps.head_w = Mat::Zero(static_cast<Eigen::Index>(dims.num_classes),
                          static_cast<Eigen::Index>(dims.hidden_dim));
    ps.head_b = Vec::Zero(static_cast<Eigen::Index>(dims.num_classes));
    return ps;
}

std::vector<TensorView> ParameterSet::tensors()
{
    std::vector<TensorView> out;
    auto add = [&out](std::string name, auto& t) {
        out.push_back({std::move(name), static_cast<std::size_t>(t.rows()),
                       static_cast<std::size_t>(t.cols()),
                       std::span<double>(t.data(), static_cast<std::size_t>(t.size()))});
    };
    for (std::size_t l = 0; l < kNumGruLayers; ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        for_each_layer_tensor(layers[l], [&](const char* n, auto& t) { add(prefix + n, t); });
    }
    add("head.W", head_w);
    add("head.b", head_b);
    return out;
}

std::size_t ParameterSet::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& t : const_cast<ParameterSet*>(this)->tensors())
        n += t.data.size();
    return n;
}

void ParameterSet::set_zero()
{
    for (auto& t : tensors())
        std::fill(t.data.begin(), t.data.end(), 0.0);
}

ParameterSet& ParameterSet::operator+=(const ParameterSet& other)
{
    auto mine = tensors();
    auto theirs = const_cast<ParameterSet&>(other).tensors();
    if (mine.size() != theirs.size())
        throw DimensionMismatch("parameter sets differ in tensor count");
    for (std::size_t i = 0; i < mine.size(); ++i) {
        if (mine[i].data.size() != theirs[i].data.size())
            throw DimensionMismatch("parameter sets differ in shape of " + mine[i].name);
        for (std::size_t j = 0; j < mine[i].data.size(); ++j)
            mine[i].data[j] += theirs[i].data[j];
    }
    return *this;
}

ParameterSet& ParameterSet::operator*=(double s)
{
    for (auto& t : tensors())
        for (double& v : t.data)
            v *= s;
    return *this;
}

void GruNetwork::validate() const
{
    if (dims.input_dim == 0 || dims.hidden_dim == 0 || dims.num_classes == 0)
        throw DimensionMismatch("network dimensions must be positive");
    const auto in = static_cast<Eigen::Index>(dims.input_dim);
    const auto hid = static_cast<Eigen::Index>(dims.hidden_dim);
    const auto cls = static_cast<Eigen::Index>(dims.num_classes);
    for (std::size_t l = 0; l < kNumGruLayers; ++l)
        check_layer(params.layers[l], l == 0 ? in : hid, hid, "layer" + std::to_string(l));
    check_shape(params.head_w, cls, hid, "head.W");
    check_size(params.head_b, cls, "head.b");
    for (double p : dropout_rates)
        if (!(p >= 0.0 && p < 1.0))
            throw DimensionMismatch("dropout rates must lie in [0, 1)");
}

Vec gru_cell_forward(const GruLayerParams& params, const Vec& x, const Vec& h_prev)
{
    const auto hid = static_cast<Eigen::Index>(params.hidden_dim());
    check_layer(params, static_cast<Eigen::Index>(params.input_dim()), hid, "cell");
    check_size(x, static_cast<Eigen::Index>(params.input_dim()), "cell input");
    check_size(h_prev, hid, "previous hidden state");
    return cell_step(params, x, h_prev).h;
}

ForwardResult forward(const GruNetwork& net, const SampleSequence& seq, Mode mode,
                      std::uint64_t rng_seed)
{
    if (seq.vectors.empty())
        throw DimensionMismatch("cannot run the network on an empty sequence");
    if (net.dims.input_dim != kVectorSize)
        throw DimensionMismatch("network input dimension " + std::to_string(net.dims.input_dim) +
                                " does not match keypoint vectors of size " +
                                std::to_string(kVectorSize));

    const std::size_t T = seq.vectors.size();
    const auto hid = static_cast<Eigen::Index>(net.dims.hidden_dim);
    std::mt19937_64 rng(rng_seed);

    ForwardResult res;
    ForwardCache& cache = res.cache;
    cache.dims = net.dims;
    cache.length = T;

    // Layer inputs for the current layer, one per timestep.
    std::vector<Vec> inputs(T);
    for (std::size_t t = 0; t < T; ++t)
        inputs[t] = Eigen::Map<const Vec>(seq.vectors[t].values.data(),
                                          static_cast<Eigen::Index>(kVectorSize));

    for (std::size_t l = 0; l < kNumGruLayers; ++l) {
        const auto& p = net.params.layers[l];
        auto& masks = cache.masks[l];
        masks.resize(T);
        for (std::size_t t = 0; t < T; ++t) {
            masks[t] = dropout_mask(static_cast<std::size_t>(inputs[t].size()),
                                    net.dropout_rates[l], mode, rng);
            inputs[t] = inputs[t].cwiseProduct(masks[t]);
        }
        auto& steps = cache.steps[l];
        steps.reserve(T);
        Vec h = Vec::Zero(hid);
        for (std::size_t t = 0; t < T; ++t) {
            steps.push_back(cell_step(p, inputs[t], h));
            h = steps.back().h;
        }
        for (std::size_t t = 0; t < T; ++t)
            inputs[t] = steps[t].h;
    }

    cache.head_mask = dropout_mask(net.dims.hidden_dim, net.dropout_rates[3], mode, rng);
    cache.head_input = cache.steps[kNumGruLayers - 1].back().h.cwiseProduct(cache.head_mask);
    res.logits = net.params.head_w * cache.head_input + net.params.head_b;
    return res;
}

Vec softmax(const Vec& logits)
{
    const double m = logits.maxCoeff();
    Vec e = (logits.array() - m).exp().matrix();
    return e / e.sum();
}

LossResult softmax_cross_entropy(const Vec& logits, std::size_t label)
{
    if (label >= static_cast<std::size_t>(logits.size()))
        throw UnknownLabel("label index " + std::to_string(label) + " out of range for " +
                           std::to_string(logits.size()) + " logits");
    const double m = logits.maxCoeff();
    const Vec shifted = (logits.array() - m).matrix();
    const double log_sum = std::log(shifted.array().exp().sum());
    const auto idx = static_cast<Eigen::Index>(label);

    LossResult out;
    out.loss = log_sum - shifted[idx];
    out.dlogits = (shifted.array() - log_sum).exp().matrix();
    out.dlogits[idx] -= 1.0;
    return out;
}

ParameterSet backward(const GruNetwork& net, const ForwardCache& cache, const Vec& dlogits)
{
    if (!(cache.dims == net.dims) || cache.length == 0 ||
        cache.steps[0].size() != cache.length)
        throw StaleCache("forward cache does not match the network dimensions");
    check_size(dlogits, static_cast<Eigen::Index>(net.dims.num_classes), "dlogits");

    const std::size_t T = cache.length;
    const auto hid = static_cast<Eigen::Index>(net.dims.hidden_dim);
    ParameterSet g = ParameterSet::zeros(net.dims);

    g.head_w = dlogits * cache.head_input.transpose();
    g.head_b = dlogits;

    // dL/dh for the output of the current layer at each timestep (after that
    // layer's own recurrence is unrolled, before adding dh_next).
    std::vector<Vec> dout(T, Vec::Zero(hid));
    dout[T - 1] = (net.params.head_w.transpose() * dlogits).cwiseProduct(cache.head_mask);

    for (std::size_t li = kNumGruLayers; li-- > 0;) {
        const auto& p = net.params.layers[li];
        auto& gl = g.layers[li];
        const auto& steps = cache.steps[li];
        const auto in = p.w_r.cols();
        std::vector<Vec> dx(T, Vec::Zero(in));

        Vec dh_next = Vec::Zero(hid);
        for (std::size_t t = T; t-- > 0;) {
            const auto& s = steps[t];
            const Vec dh = dout[t] + dh_next;

            const Vec dhc = dh.cwiseProduct(s.z);
            const Vec dz = dh.cwiseProduct(s.hc - s.h_prev);
            Vec dh_prev = dh.cwiseProduct(Vec::Ones(hid) - s.z);

            const Vec da_h = dhc.cwiseProduct((1.0 - s.hc.array().square()).matrix());
            const Vec rh = s.r.cwiseProduct(s.h_prev);
            gl.w_h.noalias() += da_h * s.x.transpose();
            gl.u_h.noalias() += da_h * rh.transpose();
            gl.b_h += da_h;

            const Vec drh = p.u_h.transpose() * da_h;
            const Vec dr = drh.cwiseProduct(s.h_prev);
            dh_prev += drh.cwiseProduct(s.r);

            const Vec da_z = dz.cwiseProduct((s.z.array() * (1.0 - s.z.array())).matrix());
            const Vec da_r = dr.cwiseProduct((s.r.array() * (1.0 - s.r.array())).matrix());
            gl.w_z.noalias() += da_z * s.x.transpose();
            gl.u_z.noalias() += da_z * s.h_prev.transpose();
            gl.b_z += da_z;
            gl.w_r.noalias() += da_r * s.x.transpose();
            gl.u_r.noalias() += da_r * s.h_prev.transpose();
            gl.b_r += da_r;

            dh_prev.noalias() += p.u_z.transpose() * da_z;
            dh_prev.noalias() += p.u_r.transpose() * da_r;
            dh_next = dh_prev;

            dx[t].noalias() = p.w_r.transpose() * da_r;
            dx[t].noalias() += p.w_z.transpose() * da_z;
            dx[t].noalias() += p.w_h.transpose() * da_h;
        }

        if (li > 0) {
            // Through this layer's input dropout into the layer below.
            for (std::size_t t = 0; t < T; ++t)
                dout[t] = dx[t].cwiseProduct(cache.masks[li][t]);
        }
    }
    return g;
}

GruNetwork init_params(const NetworkDims& dims, std::uint64_t seed,
                       const std::array<double, kNumDropouts>& dropout_rates)
{
    GruNetwork net;
    net.dims = dims;
    net.dropout_rates = dropout_rates;
    net.params = ParameterSet::zeros(dims);
    std::mt19937_64 rng(seed);
    for (auto& t : net.params.tensors()) {
        if (t.name.find(".b") != std::string::npos)
            continue; // biases stay zero
        const double s = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
        for (double& v : t.data)
            v = (2.0 * unit_uniform(rng) - 1.0) * s;
    }
    net.validate();
    return net;
}

} // namespace skelact
