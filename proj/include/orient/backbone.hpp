#pragma once

#include "orient/data.hpp"
#include "orient/decoder.hpp"
#include "orient/encoding.hpp"
#include "orient/losses.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace orient {

inline constexpr double kDefaultInitStd = 1e-4;

enum class Activation { relu };

struct NetworkSpec {
    std::vector<std::size_t> layer_sizes;  // input, hidden..., output
    Activation activation = Activation::relu;
    double init_std = kDefaultInitStd;
};

void validate(const NetworkSpec& spec);

// One affine layer; weights are row-major (outputs x inputs).
struct LayerParams {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;
};

using Gradients = std::vector<LayerParams>;

/// Zero-valued parameter set with the network's shapes.
Gradients zero_like(const NetworkSpec& spec);

class ModelState {
public:
    explicit ModelState(NetworkSpec spec);

    const NetworkSpec& spec() const noexcept { return spec_; }
    std::size_t num_layers() const noexcept { return params_.size(); }
    std::size_t input_size() const noexcept { return spec_.layer_sizes.front(); }
    std::size_t output_size() const noexcept { return spec_.layer_sizes.back(); }
    std::size_t parameter_count() const noexcept;

    const LayerParams& layer(std::size_t l) const { return params_.at(l); }
    std::span<double> weights(std::size_t l) { return params_.at(l).weights; }
    std::span<double> biases(std::size_t l) { return params_.at(l).biases; }

    const Gradients& parameters() const noexcept { return params_; }
    const Gradients& velocity() const noexcept { return velocity_; }

    friend void sgd_step(ModelState&, const Gradients&, double, double, double);

private:
    NetworkSpec spec_;
    Gradients params_;
    Gradients velocity_;
};

/// Weights ~ N(0, init_std^2) from a seeded mt19937_64, biases zero.
ModelState init_model(const NetworkSpec& spec, std::uint64_t seed);

/// Affine + ReLU for hidden layers, plain affine output.
std::vector<double> forward(const ModelState& model, std::span<const double> input);

/// Reverse-mode parameter gradients of <output_gradient, forward(input)>.
Gradients backward(const ModelState& model, std::span<const double> input,
                   std::span<const double> output_gradient);

struct LrDrop {
    std::size_t at_iteration = 0;
    double factor = 0.1;
};

struct TrainConfig {
    std::size_t batch_size = 32;
    double momentum = 0.9;
    double weight_decay = 0.0005;
    double learning_rate = 1e-3;
    std::size_t iterations = 2000;
    std::optional<LrDrop> lr_drop;
    std::optional<double> max_grad_norm;  // off unless set
    std::uint64_t seed = 1;
};

void validate(const TrainConfig& config);

/// Learning rate in effect at `iteration` after any drop.
double learning_rate_at(const TrainConfig& config, std::size_t iteration) noexcept;

/// v <- momentum*v + grad + weight_decay*param; param <- param - lr*v.
void sgd_step(ModelState& model, const Gradients& grads, double learning_rate, double momentum,
              double weight_decay);
void sgd_step(ModelState& model, const Gradients& grads, const TrainConfig& config);

// ---- prediction heads -------------------------------------------------------

enum class Head { circle_huber, circle_angular, discrete_meanshift };

const char* to_string(Head head) noexcept;
Head parse_head(const std::string& name);

struct HeadSetup {
    Head head = Head::discrete_meanshift;
    std::optional<DiscretizationScheme> scheme;  // required for discrete_meanshift
    double huber_delta = kDefaultHuberDelta;

    std::size_t output_size() const;
};

void validate(const HeadSetup& setup);

/// Loss and gradient of the head's objective at the raw network output.
LossValue head_loss(const HeadSetup& setup, std::span<const double> output, Angle truth);

/// Decodes a raw network output to an orientation.
Angle head_decode(const HeadSetup& setup, std::span<const double> output,
                  const MeanShiftConfig& meanshift);

// ---- batched kernels --------------------------------------------------------

struct BatchResult {
    double mean_loss = 0.0;  // over samples that were not skipped
    std::size_t used = 0;
    std::size_t skipped = 0;  // degenerate predictions under the angular loss
    Gradients gradient;       // mean over used samples
};

/// Mean loss and parameter gradient over dataset[indices]. Samples run in parallel;
/// the reduction sums in index order, so results do not depend on the thread count.
BatchResult batch_gradient(const ModelState& model, const Dataset& data,
                           std::span<const std::size_t> indices, const HeadSetup& setup);

// Decoded orientation per sample, or nullopt when the output was undecodable.
using Predictions = std::vector<std::optional<Angle>>;

/// forward + head_decode over the dataset, in parallel.
Predictions predict(const ModelState& model, const Dataset& data, const HeadSetup& setup,
                    const MeanShiftConfig& meanshift);

namespace reference {

BatchResult batch_gradient_serial(const ModelState& model, const Dataset& data,
                                  std::span<const std::size_t> indices, const HeadSetup& setup);
Predictions predict_serial(const ModelState& model, const Dataset& data, const HeadSetup& setup,
                           const MeanShiftConfig& meanshift);

}  // namespace reference

// ---- training ---------------------------------------------------------------

struct TrainLog {
    std::vector<double> loss;          // mean minibatch loss per iteration
    std::vector<std::size_t> skipped;  // skipped samples per iteration
    std::vector<double> learning_rate;
    std::size_t total_skipped = 0;
};

struct TrainResult {
    ModelState model;
    TrainLog log;
};

/// Minibatch SGD with seeded reshuffling each epoch. Bit-reproducible for fixed inputs.
/// Throws invalid_input on an empty dataset and DivergenceError on a non-finite loss.
TrainResult train(ModelState model, const Dataset& data, const HeadSetup& setup,
                  const TrainConfig& config);

}  // namespace orient
