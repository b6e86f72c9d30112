#pragma once

#include "orient/circmath.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace orient {

struct Sample {
    std::vector<double> features;
    Angle angle;
};

// Fixed-dimension labelled feature vectors. Image features are row-major, side x side.
struct Dataset {
    std::size_t dim = 0;
    std::vector<Sample> samples;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
};

enum class SynthShape { wedge, ellipse_with_notch };

const char* to_string(SynthShape shape) noexcept;
SynthShape parse_synth_shape(const std::string& name);

// Image convention: x to the right, y up, and the shape's front points along
// (sin theta, cos theta). theta = 0 points at the top edge, 90 at the right edge,
// so a left-right flip maps theta to 360 - theta.
struct SynthSpec {
    std::size_t image_side = 32;
    SynthShape shape = SynthShape::wedge;
    double noise_std = 0.05;
    std::size_t count = 720;
    std::uint64_t seed = 1;
    bool stratified = false;     // one angle per 360/count-degree bin, in bin order
    bool mean_subtract = true;   // subtract the per-pixel dataset mean
};

void validate(const SynthSpec& spec);

/// Noise-free render of a single shape at `theta`, pixel coverage in [0, 1].
std::vector<double> render_shape(SynthShape shape, std::size_t side, Angle theta);

/// Renders `count` oriented shapes with Gaussian pixel noise, deterministic in the seed.
Dataset generate_synthetic(const SynthSpec& spec);

/// Subtracts the per-feature mean in place; returns the mean that was removed.
std::vector<double> subtract_mean(Dataset& dataset);

/// Appends left-right flipped copies with theta -> 360 - theta. Requires square images.
Dataset mirror_augment(const Dataset& dataset);

/// Only the flipped copies, in input order.
Dataset mirror(const Dataset& dataset);

// Text format:
//   # orient-dataset v1 features=<dim>
//   <angle>,<f_0>,...,<f_dim-1>      one line per sample
// Numbers use shortest round-trip formatting, so save/load is lossless.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace orient
