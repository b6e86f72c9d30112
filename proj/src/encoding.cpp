#include "orient/encoding.hpp"

#include "orient/error.hpp"

#include <cmath>
#include <string>

namespace orient {

DiscretizationScheme::DiscretizationScheme(std::size_t n_classes, std::size_t n_tasks)
    : n_classes_(n_classes), n_tasks_(n_tasks) {
    if (n_classes < 2 || n_tasks < 1 || n_classes * n_tasks > kMaxDiscreteOrientations) {
        throw Error(ErrorKind::invalid_config,
                    "discretization needs N >= 2, M >= 1 and N*M <= 3600 (got N=" +
                        std::to_string(n_classes) + ", M=" + std::to_string(n_tasks) + ")");
    }
}

Angle DiscretizationScheme::orientation(std::size_t task, std::size_t cls) const {
    if (task >= n_tasks_ || cls >= n_classes_) {
        throw Error(ErrorKind::invalid_input, "task/class index out of range");
    }
    // m*G/M + k*G == (m + k*M) * 360 / (N*M); the lattice form keeps spacing exact.
    const double index = static_cast<double>(task + cls * n_tasks_);
    return canonicalize(index * 360.0 / static_cast<double>(size()));
}

DiscretizationScheme build_scheme(std::size_t n_classes, std::size_t n_tasks) {
    return DiscretizationScheme(n_classes, n_tasks);
}

MultiTaskLabel assign_labels(Angle theta, const DiscretizationScheme& scheme) {
    const std::size_t n = scheme.n_classes();
    const double gap = scheme.gap();
    MultiTaskLabel out;
    out.labels.reserve(scheme.n_tasks());
    for (std::size_t m = 0; m < scheme.n_tasks(); ++m) {
        const Angle offset = scheme.orientation(m, 0);
        const double rel = canonicalize(theta.degrees() - offset.degrees()).degrees();
        // theta lies between class `below` and the next one around the circle.
        const auto below = static_cast<std::size_t>(std::floor(rel / gap)) % n;
        const std::size_t above = (below + 1) % n;
        const double d_below = angular_distance(theta, scheme.orientation(m, below));
        const double d_above = angular_distance(theta, scheme.orientation(m, above));
        std::size_t label;
        if (d_below < d_above) {
            label = below;
        } else if (d_above < d_below) {
            label = above;
        } else {
            label = below < above ? below : above;
        }
        out.labels.push_back(label);
    }
    return out;
}

}  // namespace orient
