#include "orient/losses.hpp"

#include "orient/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace orient {

namespace {

void check_logit_shape(std::span<const double> logits, const DiscretizationScheme& scheme) {
    if (logits.size() != scheme.size()) {
        throw Error(ErrorKind::invalid_input,
                    "expected " + std::to_string(scheme.size()) + " logits, got " +
                        std::to_string(logits.size()));
    }
}

// Writes softmax(logits) into out and returns log-sum-exp.
double softmax_into(std::span<const double> logits, std::span<double> out) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        out[k] = std::exp(logits[k] - peak);
        total += out[k];
    }
    for (double& p : out) p /= total;
    return peak + std::log(total);
}

}  // namespace

LossValue huber_loss(PlanarPoint pred, PlanarPoint target, double delta) {
    if (!(delta > 0.0)) {
        throw Error(ErrorKind::invalid_input, "huber delta must be positive");
    }
    LossValue out;
    out.gradient.resize(2);
    const double residual[2] = {pred.x - target.x, pred.y - target.y};
    for (int c = 0; c < 2; ++c) {
        const double r = residual[c];
        if (std::fabs(r) <= delta) {
            out.value += 0.5 * r * r;
            out.gradient[c] = r;
        } else {
            out.value += delta * (std::fabs(r) - 0.5 * delta);
            out.gradient[c] = r > 0.0 ? delta : -delta;
        }
    }
    return out;
}

LossValue angular_loss(PlanarPoint pred, PlanarPoint target) {
    const double sq = pred.squared_norm();
    if (!(sq > kNormEpsilon)) {
        throw Error(ErrorKind::degenerate_prediction,
                    "angular loss undefined for a prediction at the origin");
    }
    const double norm = std::sqrt(sq);
    const double dot = target.x * pred.x + target.y * pred.y;
    LossValue out;
    out.value = 1.0 - dot / norm;
    out.gradient = {
        (dot * pred.x / norm - target.x * norm) / sq,
        (dot * pred.y / norm - target.y * norm) / sq,
    };
    return out;
}

LossValue multitask_softmax_loss(std::span<const double> logits, const MultiTaskLabel& label,
                                 const DiscretizationScheme& scheme) {
    check_logit_shape(logits, scheme);
    const std::size_t n = scheme.n_classes();
    if (label.labels.size() != scheme.n_tasks()) {
        throw Error(ErrorKind::invalid_label, "label has " + std::to_string(label.labels.size()) +
                                                  " tasks, scheme has " +
                                                  std::to_string(scheme.n_tasks()));
    }
    LossValue out;
    out.gradient.resize(logits.size());
    for (std::size_t m = 0; m < scheme.n_tasks(); ++m) {
        const std::size_t target = label.labels[m];
        if (target >= n) {
            throw Error(ErrorKind::invalid_label,
                        "label " + std::to_string(target) + " out of range for task " +
                            std::to_string(m));
        }
        const auto task_logits = logits.subspan(m * n, n);
        const auto task_grad = std::span<double>(out.gradient).subspan(m * n, n);
        const double lse = softmax_into(task_logits, task_grad);
        out.value += lse - task_logits[target];
        task_grad[target] -= 1.0;
    }
    return out;
}

SoftmaxVotes softmax_votes(std::span<const double> logits, const DiscretizationScheme& scheme) {
    check_logit_shape(logits, scheme);
    SoftmaxVotes out{scheme.n_tasks(), scheme.n_classes(), std::vector<double>(logits.size())};
    const std::size_t n = scheme.n_classes();
    for (std::size_t m = 0; m < scheme.n_tasks(); ++m) {
        softmax_into(logits.subspan(m * n, n), std::span<double>(out.probs).subspan(m * n, n));
    }
    return out;
}

}  // namespace orient
