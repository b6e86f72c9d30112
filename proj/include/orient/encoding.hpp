#pragma once

#include "orient/circmath.hpp"

#include <cstddef>
#include <vector>

namespace orient {

inline constexpr std::size_t kMaxDiscreteOrientations = 3600;

// M staggered N-class grids. Task m, class k sits at m*G/M + k*G with G = 360/N,
// so the union of all tasks is a uniform lattice of N*M orientations.
class DiscretizationScheme {
public:
    DiscretizationScheme(std::size_t n_classes, std::size_t n_tasks);

    std::size_t n_classes() const noexcept { return n_classes_; }
    std::size_t n_tasks() const noexcept { return n_tasks_; }
    std::size_t size() const noexcept { return n_classes_ * n_tasks_; }
    double gap() const noexcept { return 360.0 / static_cast<double>(n_classes_); }
    double spacing() const noexcept { return 360.0 / static_cast<double>(size()); }

    Angle orientation(std::size_t task, std::size_t cls) const;

    friend bool operator==(const DiscretizationScheme&, const DiscretizationScheme&) = default;

private:
    std::size_t n_classes_;
    std::size_t n_tasks_;
};

/// Validates bounds (N >= 2, M >= 1, N*M <= 3600); throws invalid_config.
DiscretizationScheme build_scheme(std::size_t n_classes, std::size_t n_tasks);

// One class index per task.
struct MultiTaskLabel {
    std::vector<std::size_t> labels;
};

/// Nearest orientation per task; equidistant ties go to the smaller class index.
MultiTaskLabel assign_labels(Angle theta, const DiscretizationScheme& scheme);

inline PlanarPoint encode_regression_target(Angle theta) noexcept { return to_unit_vector(theta); }

}  // namespace orient
