#pragma once

#include "orient/circmath.hpp"
#include "orient/encoding.hpp"
#include "orient/losses.hpp"

#include <cstddef>
#include <vector>

namespace orient {

inline constexpr double kDefaultConcentration = 4.0;
inline constexpr double kDefaultMeanShiftTolerance = 1e-6;  // degrees
inline constexpr std::size_t kDefaultMeanShiftIterations = 1000;

// Weighted discrete orientations. With softmax votes, each task contributes mass 1.
struct VoteSet {
    std::vector<double> orientations;  // degrees
    std::vector<double> probabilities;

    std::size_t size() const noexcept { return orientations.size(); }
};

/// Lengths equal, orientations finite, probabilities finite and >= 0. Throws invalid_input.
void validate(const VoteSet& votes);

struct MeanShiftConfig {
    double nu = kDefaultConcentration;
    double tolerance = kDefaultMeanShiftTolerance;
    std::size_t max_iterations = kDefaultMeanShiftIterations;
};

void validate(const MeanShiftConfig& config);

// Result of one mean-shift run from a single start.
struct ModeCandidate {
    double start = 0.0;    // degrees
    double mode = 0.0;     // degrees, canonical
    double density = 0.0;  // density_at(mode)
    std::size_t iterations = 0;
    bool converged = false;
};

/// atan2 decoding for the regression heads; throws degenerate_prediction near the origin.
Angle decode_atan2(PlanarPoint pred);

/// sum_i p_i k_nu(theta - theta_i), unnormalized.
double density_at(Angle theta, const VoteSet& votes, Concentration nu);
double density_at(double theta_degrees, const VoteSet& votes, const VonMisesKernel& kernel);

/// Runs circular mean-shift from `start` until a step is below tolerance.
ModeCandidate mean_shift_from(double start_degrees, const VoteSet& votes,
                              const VonMisesKernel& kernel, const MeanShiftConfig& config);

/// Mean-shift from every vote orientation, in vote order. Starts run in parallel.
std::vector<ModeCandidate> meanshift_modes(const VoteSet& votes, const MeanShiftConfig& config);

/// Highest-density converged candidate; equal densities go to the smallest angle.
/// Throws convergence_failure (carrying the best iterate) if nothing converged.
Angle select_mode(const std::vector<ModeCandidate>& candidates);

/// Global argmax of the von-Mises KDE over the votes.
/// Throws empty_votes when no probability is positive.
Angle decode_meanshift(const VoteSet& votes, const MeanShiftConfig& config = {});

/// Places each task's probabilities on the scheme's discrete orientations, task-major.
VoteSet votes_from_softmax(const SoftmaxVotes& softmax, const DiscretizationScheme& scheme);

/// One-hot votes for a label (probability 1 on each task's labelled class).
VoteSet votes_from_label(const MultiTaskLabel& label, const DiscretizationScheme& scheme);

namespace reference {

// Serial counterparts of the parallel kernels, kept for equivalence testing.
std::vector<ModeCandidate> meanshift_modes_serial(const VoteSet& votes,
                                                  const MeanShiftConfig& config);
Angle decode_meanshift_serial(const VoteSet& votes, const MeanShiftConfig& config = {});

}  // namespace reference

}  // namespace orient
