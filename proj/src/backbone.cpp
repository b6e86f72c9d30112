#include "orient/backbone.hpp"

#include "orient/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace orient {

namespace {

void check_same_shape(const Gradients& a, const Gradients& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::invalid_input, "gradient layer count mismatch");
    for (std::size_t l = 0; l < a.size(); ++l) {
        if (a[l].weights.size() != b[l].weights.size() || a[l].biases.size() != b[l].biases.size()) {
            throw Error(ErrorKind::invalid_input, "gradient shape mismatch at layer " + std::to_string(l));
        }
    }
}

// activations[0] is the input; activations[l + 1] is layer l's output (post-ReLU for hidden layers).
using Activations = std::vector<std::vector<double>>;

Activations forward_trace(const ModelState& model, std::span<const double> input) {
    if (input.size() != model.input_size()) {
        throw Error(ErrorKind::invalid_input, "input has " + std::to_string(input.size()) +
                                                  " values, network expects " +
                                                  std::to_string(model.input_size()));
    }
    Activations acts;
    acts.reserve(model.num_layers() + 1);
    acts.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        const LayerParams& layer = model.layer(l);
        const std::vector<double>& in = acts.back();
        std::vector<double> out(layer.outputs);
        const bool hidden = l + 1 < model.num_layers();
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double* row = layer.weights.data() + o * layer.inputs;
            double sum = 0.0;
            for (std::size_t i = 0; i < layer.inputs; ++i) sum += row[i] * in[i];
            sum += layer.biases[o];
            out[o] = hidden ? std::max(sum, 0.0) : sum;
        }
        acts.push_back(std::move(out));
    }
    return acts;
}

// deltas[l] is dL/d(pre-activation of layer l).
std::vector<std::vector<double>> backward_deltas(const ModelState& model, const Activations& acts,
                                                 std::span<const double> output_gradient) {
    const std::size_t layers = model.num_layers();
    if (output_gradient.size() != model.output_size()) {
        throw Error(ErrorKind::invalid_input, "output gradient has " +
                                                  std::to_string(output_gradient.size()) +
                                                  " values, network produces " +
                                                  std::to_string(model.output_size()));
    }
    std::vector<std::vector<double>> deltas(layers);
    deltas[layers - 1].assign(output_gradient.begin(), output_gradient.end());
    for (std::size_t l = layers - 1; l > 0; --l) {
        const LayerParams& layer = model.layer(l);
        const std::vector<double>& below = acts[l];
        std::vector<double> d(layer.inputs, 0.0);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double g = deltas[l][o];
            const double* row = layer.weights.data() + o * layer.inputs;
            for (std::size_t i = 0; i < layer.inputs; ++i) d[i] += row[i] * g;
        }
        for (std::size_t i = 0; i < layer.inputs; ++i) {
            if (!(below[i] > 0.0)) d[i] = 0.0;
        }
        deltas[l - 1] = std::move(d);
    }
    return deltas;
}

// Per-sample intermediate state for the batched kernels.
struct SampleWork {
    Activations acts;
    std::vector<std::vector<double>> deltas;
    double loss = 0.0;
    bool skipped = false;
};

SampleWork run_sample(const ModelState& model, const Sample& sample, const HeadSetup& setup) {
    SampleWork w;
    w.acts = forward_trace(model, sample.features);
    LossValue lv;
    try {
        lv = head_loss(setup, w.acts.back(), sample.angle);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate_prediction) throw;
        w.skipped = true;
        return w;
    }
    w.loss = lv.value;
    w.deltas = backward_deltas(model, w.acts, lv.gradient);
    return w;
}

void check_indices(const Dataset& data, std::span<const std::size_t> indices) {
    for (std::size_t idx : indices) {
        if (idx >= data.size()) throw Error(ErrorKind::invalid_input, "sample index out of range");
    }
}

}  // namespace

void validate(const NetworkSpec& spec) {
    if (spec.layer_sizes.size() < 2) {
        throw Error(ErrorKind::invalid_config, "network needs at least an input and an output layer");
    }
    for (std::size_t s : spec.layer_sizes) {
        if (s < 1) throw Error(ErrorKind::invalid_config, "layer sizes must be at least 1");
    }
    if (!(spec.init_std >= 0.0) || !std::isfinite(spec.init_std)) {
        throw Error(ErrorKind::invalid_config, "init_std must be finite and nonnegative");
    }
}

Gradients zero_like(const NetworkSpec& spec) {
    Gradients g;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        LayerParams p;
        p.inputs = spec.layer_sizes[l];
        p.outputs = spec.layer_sizes[l + 1];
        p.weights.assign(p.inputs * p.outputs, 0.0);
        p.biases.assign(p.outputs, 0.0);
        g.push_back(std::move(p));
    }
    return g;
}

ModelState::ModelState(NetworkSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    params_ = zero_like(spec_);
    velocity_ = zero_like(spec_);
}

std::size_t ModelState::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.weights.size() + p.biases.size();
    return n;
}

ModelState init_model(const NetworkSpec& spec, std::uint64_t seed) {
    ModelState model(spec);
    if (spec.init_std == 0.0) return model;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, spec.init_std);
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        for (double& w : model.weights(l)) w = gauss(rng);
    }
    return model;
}

std::vector<double> forward(const ModelState& model, std::span<const double> input) {
    return std::move(forward_trace(model, input).back());
}

Gradients backward(const ModelState& model, std::span<const double> input,
                   std::span<const double> output_gradient) {
    const Activations acts = forward_trace(model, input);
    const auto deltas = backward_deltas(model, acts, output_gradient);
    Gradients g = zero_like(model.spec());
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        LayerParams& gl = g[l];
        for (std::size_t o = 0; o < gl.outputs; ++o) {
            const double d = deltas[l][o];
            gl.biases[o] = d;
            double* row = gl.weights.data() + o * gl.inputs;
            for (std::size_t i = 0; i < gl.inputs; ++i) row[i] = d * acts[l][i];
        }
    }
    return g;
}

void validate(const TrainConfig& config) {
    if (config.batch_size < 1) throw Error(ErrorKind::invalid_config, "batch size must be at least 1");
    if (!(config.momentum >= 0.0 && config.momentum < 1.0)) {
        throw Error(ErrorKind::invalid_config, "momentum must lie in [0, 1)");
    }
    if (!(config.weight_decay >= 0.0)) throw Error(ErrorKind::invalid_config, "weight decay must be >= 0");
    if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
        throw Error(ErrorKind::invalid_config, "learning rate must be positive");
    }
    if (config.lr_drop && !(config.lr_drop->factor > 0.0)) {
        throw Error(ErrorKind::invalid_config, "learning-rate drop factor must be positive");
    }
    if (config.max_grad_norm && !(*config.max_grad_norm > 0.0)) {
        throw Error(ErrorKind::invalid_config, "max gradient norm must be positive");
    }
}

double learning_rate_at(const TrainConfig& config, std::size_t iteration) noexcept {
    if (config.lr_drop && iteration >= config.lr_drop->at_iteration) {
        return config.learning_rate * config.lr_drop->factor;
    }
    return config.learning_rate;
}

void sgd_step(ModelState& model, const Gradients& grads, double learning_rate, double momentum,
              double weight_decay) {
    check_same_shape(model.params_, grads);
    auto update = [&](std::vector<double>& param, std::vector<double>& vel, const std::vector<double>& g) {
        for (std::size_t i = 0; i < param.size(); ++i) {
            vel[i] = momentum * vel[i] + g[i] + weight_decay * param[i];
            param[i] -= learning_rate * vel[i];
        }
    };
    for (std::size_t l = 0; l < grads.size(); ++l) {
        update(model.params_[l].weights, model.velocity_[l].weights, grads[l].weights);
        update(model.params_[l].biases, model.velocity_[l].biases, grads[l].biases);
    }
}

void sgd_step(ModelState& model, const Gradients& grads, const TrainConfig& config) {
    sgd_step(model, grads, config.learning_rate, config.momentum, config.weight_decay);
}

const char* to_string(Head head) noexcept {
    switch (head) {
        case Head::circle_huber: return "circle-huber";
        case Head::circle_angular: return "circle-angular";
        case Head::discrete_meanshift: return "discrete-meanshift";
    }
    return "unknown";
}

Head parse_head(const std::string& name) {
    if (name == "circle-huber" || name == "approach1") return Head::circle_huber;
    if (name == "circle-angular" || name == "approach2") return Head::circle_angular;
    if (name == "discrete-meanshift" || name == "approach3") return Head::discrete_meanshift;
    throw Error(ErrorKind::invalid_config, "unknown head '" + name +
                                               "' (expected circle-huber, circle-angular or discrete-meanshift)");
}

std::size_t HeadSetup::output_size() const {
    if (head == Head::discrete_meanshift) {
        if (!scheme) throw Error(ErrorKind::invalid_config, "discrete-meanshift head needs a discretization");
        return scheme->size();
    }
    return 2;
}

void validate(const HeadSetup& setup) {
    if (setup.head == Head::discrete_meanshift && !setup.scheme) {
        throw Error(ErrorKind::invalid_config, "discrete-meanshift head needs a discretization");
    }
    if (!(setup.huber_delta > 0.0)) throw Error(ErrorKind::invalid_config, "huber delta must be positive");
}

LossValue head_loss(const HeadSetup& setup, std::span<const double> output, Angle truth) {
    if (output.size() != setup.output_size()) {
        throw Error(ErrorKind::invalid_input, "network output size does not match the head");
    }
    switch (setup.head) {
        case Head::circle_huber:
            return huber_loss({output[0], output[1]}, encode_regression_target(truth), setup.huber_delta);
        case Head::circle_angular:
            return angular_loss({output[0], output[1]}, encode_regression_target(truth));
        case Head::discrete_meanshift:
            return multitask_softmax_loss(output, assign_labels(truth, *setup.scheme), *setup.scheme);
    }
    throw Error(ErrorKind::invalid_config, "unknown head");
}

Angle head_decode(const HeadSetup& setup, std::span<const double> output,
                  const MeanShiftConfig& meanshift) {
    if (output.size() != setup.output_size()) {
        throw Error(ErrorKind::invalid_input, "network output size does not match the head");
    }
    if (setup.head == Head::discrete_meanshift) {
        const auto votes = votes_from_softmax(softmax_votes(output, *setup.scheme), *setup.scheme);
        return decode_meanshift(votes, meanshift);
    }
    return decode_atan2({output[0], output[1]});
}

BatchResult batch_gradient(const ModelState& model, const Dataset& data,
                           std::span<const std::size_t> indices, const HeadSetup& setup) {
    validate(setup);
    check_indices(data, indices);
    const auto n = static_cast<long>(indices.size());
    std::vector<SampleWork> work(indices.size());
    detail::ExceptionSlot failure;
#pragma omp parallel for schedule(static)
    for (long s = 0; s < n; ++s) {
        failure.run([&] { work[s] = run_sample(model, data.samples[indices[s]], setup); });
    }
    failure.rethrow();

    BatchResult result;
    result.gradient = zero_like(model.spec());
    for (const auto& w : work) {
        if (w.skipped) {
            ++result.skipped;
        } else {
            ++result.used;
            result.mean_loss += w.loss;
        }
    }
    if (result.used == 0) return result;
    const double scale = 1.0 / static_cast<double>(result.used);

    // Rows are independent; each entry sums samples in batch order.
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        LayerParams& gl = result.gradient[l];
        const auto rows = static_cast<long>(gl.outputs);
#pragma omp parallel for schedule(static)
        for (long o = 0; o < rows; ++o) {
            double* row = gl.weights.data() + o * gl.inputs;
            for (const auto& w : work) {
                if (w.skipped) continue;
                const double d = w.deltas[l][o];
                const double* a = w.acts[l].data();
                gl.biases[o] += d;
                for (std::size_t i = 0; i < gl.inputs; ++i) row[i] += d * a[i];
            }
            gl.biases[o] *= scale;
            for (std::size_t i = 0; i < gl.inputs; ++i) row[i] *= scale;
        }
    }
    result.mean_loss *= scale;
    return result;
}

Predictions predict(const ModelState& model, const Dataset& data, const HeadSetup& setup,
                    const MeanShiftConfig& meanshift) {
    validate(setup);
    validate(meanshift);
    Predictions out(data.size());
    const auto n = static_cast<long>(data.size());
    detail::ExceptionSlot failure;
#pragma omp parallel for schedule(dynamic, 8)
    for (long s = 0; s < n; ++s) {
        failure.run([&] {
            const auto y = forward(model, data.samples[s].features);
            try {
                out[s] = head_decode(setup, y, meanshift);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::degenerate_prediction &&
                    e.kind() != ErrorKind::convergence_failure) {
                    throw;
                }
            }
        });
    }
    failure.rethrow();
    return out;
}

namespace reference {

BatchResult batch_gradient_serial(const ModelState& model, const Dataset& data,
                                  std::span<const std::size_t> indices, const HeadSetup& setup) {
    validate(setup);
    check_indices(data, indices);
    BatchResult result;
    result.gradient = zero_like(model.spec());
    for (std::size_t idx : indices) {
        const Sample& sample = data.samples[idx];
        const auto y = forward(model, sample.features);
        LossValue lv;
        try {
            lv = head_loss(setup, y, sample.angle);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate_prediction) throw;
            ++result.skipped;
            continue;
        }
        ++result.used;
        result.mean_loss += lv.value;
        const Gradients g = backward(model, sample.features, lv.gradient);
        for (std::size_t l = 0; l < g.size(); ++l) {
            for (std::size_t i = 0; i < g[l].weights.size(); ++i) result.gradient[l].weights[i] += g[l].weights[i];
            for (std::size_t i = 0; i < g[l].biases.size(); ++i) result.gradient[l].biases[i] += g[l].biases[i];
        }
    }
    if (result.used == 0) return result;
    const double scale = 1.0 / static_cast<double>(result.used);
    for (auto& gl : result.gradient) {
        for (double& v : gl.weights) v *= scale;
        for (double& v : gl.biases) v *= scale;
    }
    result.mean_loss *= scale;
    return result;
}

Predictions predict_serial(const ModelState& model, const Dataset& data, const HeadSetup& setup,
                           const MeanShiftConfig& meanshift) {
    validate(setup);
    validate(meanshift);
    Predictions out;
    out.reserve(data.size());
    for (const auto& sample : data.samples) {
        const auto y = forward(model, sample.features);
        try {
            out.emplace_back(head_decode(setup, y, meanshift));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate_prediction && e.kind() != ErrorKind::convergence_failure) {
                throw;
            }
            out.emplace_back(std::nullopt);
        }
    }
    return out;
}

}  // namespace reference

namespace {

bool all_finite(const Gradients& g) {
    for (const auto& l : g) {
        for (double v : l.weights) if (!std::isfinite(v)) return false;
        for (double v : l.biases) if (!std::isfinite(v)) return false;
    }
    return true;
}

void clip_gradient(Gradients& g, double max_norm) {
    double sq = 0.0;
    for (const auto& l : g) {
        for (double v : l.weights) sq += v * v;
        for (double v : l.biases) sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (norm <= max_norm) return;
    const double s = max_norm / norm;
    for (auto& l : g) {
        for (double& v : l.weights) v *= s;
        for (double& v : l.biases) v *= s;
    }
}

}  // namespace

TrainResult train(ModelState model, const Dataset& data, const HeadSetup& setup,
                  const TrainConfig& config) {
    validate(config);
    validate(setup);
    if (data.empty()) throw Error(ErrorKind::invalid_input, "cannot train on an empty dataset");
    if (data.dim != model.input_size()) {
        throw Error(ErrorKind::invalid_input, "dataset has " + std::to_string(data.dim) +
                                                  " features, network expects " +
                                                  std::to_string(model.input_size()));
    }
    if (setup.output_size() != model.output_size()) {
        throw Error(ErrorKind::invalid_config, "network output size does not match the head");
    }

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t cursor = 0;

    TrainLog log;
    log.loss.reserve(config.iterations);
    std::vector<std::size_t> batch(config.batch_size);
    for (std::size_t it = 0; it < config.iterations; ++it) {
        for (auto& idx : batch) {
            if (cursor == order.size()) {
                std::shuffle(order.begin(), order.end(), rng);
                cursor = 0;
            }
            idx = order[cursor++];
        }
        BatchResult br = batch_gradient(model, data, batch, setup);
        const double lr = learning_rate_at(config, it);
        log.loss.push_back(br.mean_loss);
        log.skipped.push_back(br.skipped);
        log.learning_rate.push_back(lr);
        log.total_skipped += br.skipped;
        if (br.used == 0) continue;
        if (!std::isfinite(br.mean_loss) || !all_finite(br.gradient)) throw DivergenceError(it);
        if (config.max_grad_norm) clip_gradient(br.gradient, *config.max_grad_norm);
        sgd_step(model, br.gradient, lr, config.momentum, config.weight_decay);
        if (!all_finite(model.parameters())) throw DivergenceError(it);
    }
    return TrainResult{std::move(model), std::move(log)};
}

}  // namespace orient
