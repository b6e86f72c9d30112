#include "orient/decoder.hpp"

#include "orient/error.hpp"
#include "parallel.hpp"

#include <cmath>
#include <string>

namespace orient {

namespace {

constexpr double kDensityTieRelative = 1e-12;

void check_has_mass(const VoteSet& votes) {
    for (double p : votes.probabilities) {
        if (p > 0.0) return;
    }
    throw Error(ErrorKind::empty_votes, "all vote probabilities are zero");
}

}  // namespace

void validate(const VoteSet& votes) {
    if (votes.orientations.size() != votes.probabilities.size()) {
        throw Error(ErrorKind::invalid_input, "vote orientations and probabilities differ in length");
    }
    for (std::size_t i = 0; i < votes.size(); ++i) {
        if (!std::isfinite(votes.orientations[i])) {
            throw Error(ErrorKind::invalid_input, "vote orientation " + std::to_string(i) + " is not finite");
        }
        const double p = votes.probabilities[i];
        if (!std::isfinite(p) || p < 0.0) {
            throw Error(ErrorKind::invalid_input, "vote probability " + std::to_string(i) +
                                                      " must be finite and nonnegative");
        }
    }
}

void validate(const MeanShiftConfig& config) {
    Concentration{config.nu};
    if (!(config.tolerance > 0.0)) {
        throw Error(ErrorKind::invalid_config, "mean-shift tolerance must be positive");
    }
    if (config.max_iterations < 1) {
        throw Error(ErrorKind::invalid_config, "mean-shift needs at least one iteration");
    }
}

Angle decode_atan2(PlanarPoint pred) {
    if (!(pred.squared_norm() > kNormEpsilon)) {
        throw Error(ErrorKind::degenerate_prediction, "prediction too close to the origin to decode");
    }
    return from_vector(pred);
}

double density_at(double theta_degrees, const VoteSet& votes, const VonMisesKernel& kernel) {
    double total = 0.0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        if (votes.probabilities[i] == 0.0) continue;
        total += votes.probabilities[i] * kernel(theta_degrees - votes.orientations[i]);
    }
    return total;
}

double density_at(Angle theta, const VoteSet& votes, Concentration nu) {
    return density_at(theta.degrees(), votes, VonMisesKernel(nu));
}

ModeCandidate mean_shift_from(double start_degrees, const VoteSet& votes,
                              const VonMisesKernel& kernel, const MeanShiftConfig& config) {
    std::vector<SinCos> dirs;
    dirs.reserve(votes.size());
    for (double o : votes.orientations) dirs.push_back(sincos_degrees(o));

    ModeCandidate c;
    c.start = canonicalize(start_degrees).degrees();
    double theta = c.start;
    for (std::size_t it = 0; it < config.max_iterations; ++it) {
        const SinCos here = sincos_degrees(theta);
        double sx = 0.0;
        double sy = 0.0;
        for (std::size_t i = 0; i < votes.size(); ++i) {
            const double p = votes.probabilities[i];
            if (p == 0.0) continue;
            // cos(theta - theta_i) by the angle-difference identity
            const double w = p * kernel.from_cosine(here.cos * dirs[i].cos + here.sin * dirs[i].sin);
            sx += w * dirs[i].cos;
            sy += w * dirs[i].sin;
        }
        c.iterations = it + 1;
        // Zero resultant: the weighted votes cancel, no direction to move in.
        if (!(sx * sx + sy * sy > 0.0)) {
            c.converged = true;
            break;
        }
        const Angle next = canonicalize(std::atan2(sy, sx) * kRadToDeg);
        const double step = angular_distance(next, canonicalize(theta));
        theta = next.degrees();
        if (step < config.tolerance) {
            c.converged = true;
            break;
        }
    }
    c.mode = theta;
    c.density = density_at(theta, votes, kernel);
    return c;
}

std::vector<ModeCandidate> meanshift_modes(const VoteSet& votes, const MeanShiftConfig& config) {
    validate(votes);
    validate(config);
    const VonMisesKernel kernel{Concentration{config.nu}};
    const auto n = static_cast<long>(votes.size());
    std::vector<ModeCandidate> out(votes.size());
    detail::ExceptionSlot failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) {
        failure.run([&] { out[i] = mean_shift_from(votes.orientations[i], votes, kernel, config); });
    }
    failure.rethrow();
    return out;
}

Angle select_mode(const std::vector<ModeCandidate>& candidates) {
    const ModeCandidate* best = nullptr;
    const ModeCandidate* best_any = nullptr;
    for (const auto& c : candidates) {
        if (best_any == nullptr || c.density > best_any->density) best_any = &c;
        if (!c.converged) continue;
        if (best == nullptr) {
            best = &c;
            continue;
        }
        const double tie = kDensityTieRelative * best->density;
        if (c.density > best->density + tie) {
            best = &c;
        } else if (c.density >= best->density - tie && c.mode < best->mode) {
            best = &c;
        }
    }
    if (best == nullptr) {
        if (best_any == nullptr) throw Error(ErrorKind::empty_votes, "no mean-shift candidates");
        throw ConvergenceFailure(best_any->mode, best_any->density);
    }
    return canonicalize(best->mode);
}

Angle decode_meanshift(const VoteSet& votes, const MeanShiftConfig& config) {
    validate(votes);
    check_has_mass(votes);
    return select_mode(meanshift_modes(votes, config));
}

VoteSet votes_from_softmax(const SoftmaxVotes& softmax, const DiscretizationScheme& scheme) {
    if (softmax.n_tasks != scheme.n_tasks() || softmax.n_classes != scheme.n_classes() ||
        softmax.probs.size() != scheme.size()) {
        throw Error(ErrorKind::invalid_config, "softmax shape does not match the discretization");
    }
    VoteSet votes;
    votes.orientations.reserve(scheme.size());
    votes.probabilities = softmax.probs;
    for (std::size_t m = 0; m < scheme.n_tasks(); ++m) {
        for (std::size_t k = 0; k < scheme.n_classes(); ++k) {
            votes.orientations.push_back(scheme.orientation(m, k).degrees());
        }
    }
    return votes;
}

VoteSet votes_from_label(const MultiTaskLabel& label, const DiscretizationScheme& scheme) {
    if (label.labels.size() != scheme.n_tasks()) {
        throw Error(ErrorKind::invalid_label, "label task count does not match the discretization");
    }
    SoftmaxVotes onehot{scheme.n_tasks(), scheme.n_classes(), std::vector<double>(scheme.size(), 0.0)};
    for (std::size_t m = 0; m < scheme.n_tasks(); ++m) {
        if (label.labels[m] >= scheme.n_classes()) {
            throw Error(ErrorKind::invalid_label, "label out of range for task " + std::to_string(m));
        }
        onehot.probs[m * scheme.n_classes() + label.labels[m]] = 1.0;
    }
    return votes_from_softmax(onehot, scheme);
}

namespace reference {

std::vector<ModeCandidate> meanshift_modes_serial(const VoteSet& votes,
                                                  const MeanShiftConfig& config) {
    validate(votes);
    validate(config);
    const VonMisesKernel kernel{Concentration{config.nu}};
    std::vector<ModeCandidate> out;
    out.reserve(votes.size());
    for (double start : votes.orientations) {
        out.push_back(mean_shift_from(start, votes, kernel, config));
    }
    return out;
}

Angle decode_meanshift_serial(const VoteSet& votes, const MeanShiftConfig& config) {
    validate(votes);
    check_has_mass(votes);
    return select_mode(meanshift_modes_serial(votes, config));
}

}  // namespace reference

}  // namespace orient
