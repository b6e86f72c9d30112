#pragma once

#include "orient/circmath.hpp"
#include "orient/encoding.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace orient {

inline constexpr double kDefaultHuberDelta = 1.0;

// Loss value plus its gradient with respect to the prediction (same arity).
struct LossValue {
    double value = 0.0;
    std::vector<double> gradient;
};

// Per-task softmax probabilities, task-major: probs[m * n_classes + k].
struct SoftmaxVotes {
    std::size_t n_tasks = 0;
    std::size_t n_classes = 0;
    std::vector<double> probs;

    std::span<const double> task(std::size_t m) const {
        return std::span<const double>(probs).subspan(m * n_classes, n_classes);
    }
};

/// Smooth-L1 summed over x and y: h(r) = r^2/2 for |r| <= delta, else delta(|r| - delta/2).
LossValue huber_loss(PlanarPoint pred, PlanarPoint target, double delta = kDefaultHuberDelta);

/// 1 - cos of the angle between pred and the unit target. Depends only on the
/// direction of pred; throws degenerate_prediction when |pred|^2 <= 1e-12.
LossValue angular_loss(PlanarPoint pred, PlanarPoint target);

/// Sum over tasks of softmax cross-entropy. logits are task-major, n_tasks * n_classes long.
/// Gradient is softmax minus one-hot per task.
LossValue multitask_softmax_loss(std::span<const double> logits, const MultiTaskLabel& label,
                                 const DiscretizationScheme& scheme);

/// Max-subtracted softmax applied to each task independently.
SoftmaxVotes softmax_votes(std::span<const double> logits, const DiscretizationScheme& scheme);

}  // namespace orient
