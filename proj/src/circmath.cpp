#include "orient/circmath.hpp"

#include "orient/error.hpp"

#include <cmath>
#include <string>

namespace orient {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::invalid_config: return "invalid-config";
        case ErrorKind::invalid_label: return "invalid-label";
        case ErrorKind::degenerate_vector: return "degenerate-vector";
        case ErrorKind::degenerate_prediction: return "degenerate-prediction";
        case ErrorKind::empty_votes: return "empty-votes";
        case ErrorKind::empty_dataset: return "empty-dataset";
        case ErrorKind::convergence_failure: return "convergence-failure";
        case ErrorKind::divergence: return "divergence";
        case ErrorKind::parse_error: return "parse-error";
        case ErrorKind::format_error: return "format-error";
        case ErrorKind::io_error: return "io-error";
    }
    return "unknown";
}

Concentration::Concentration(double nu) : nu_(nu) {
    if (!(nu >= 0.0 && nu <= kMaxConcentration)) {
        throw Error(ErrorKind::invalid_input,
                    "concentration must lie in [0, 500], got " + std::to_string(nu));
    }
}

Angle canonicalize(double raw) {
    if (!std::isfinite(raw)) {
        throw Error(ErrorKind::invalid_input, "angle must be finite");
    }
    double d = std::fmod(raw, 360.0);
    if (d < 0.0) d += 360.0;
    // -1e-17 + 360 rounds to 360
    if (d >= 360.0) d = 0.0;
    return Angle(d);
}

double angular_distance(Angle a, Angle b) noexcept {
    const double d = std::fabs(a.degrees() - b.degrees());
    return d > 180.0 ? 360.0 - d : d;
}

double signed_difference(Angle a, Angle b) noexcept {
    double d = b.degrees() - a.degrees();
    if (d > 180.0) d -= 360.0;
    if (d <= -180.0) d += 360.0;
    return d;
}

SinCos sincos_degrees(double degrees) noexcept {
    // Reduce to [-45, 45] around the nearest quadrant, then rotate.
    const double quadrant = std::nearbyint(degrees / 90.0);
    const double r = (degrees - 90.0 * quadrant) * kDegToRad;
    const double s = std::sin(r);
    const double c = std::cos(r);
    long q = static_cast<long>(std::fmod(quadrant, 4.0));
    if (q < 0) q += 4;
    switch (q) {
        case 0: return {s, c};
        case 1: return {c, -s};
        case 2: return {-s, -c};
        default: return {-c, s};
    }
}

PlanarPoint to_unit_vector(Angle a) noexcept {
    const auto [s, c] = sincos_degrees(a.degrees());
    return {c, s};
}

Angle from_vector(PlanarPoint p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw Error(ErrorKind::invalid_input, "vector components must be finite");
    }
    if (!(p.squared_norm() > kNormEpsilon)) {
        throw Error(ErrorKind::degenerate_vector, "vector too close to the origin for atan2");
    }
    return canonicalize(std::atan2(p.y, p.x) * kRadToDeg);
}

namespace {

constexpr double kSeriesLimit = 15.0;

void check_bessel_domain(double nu) {
    if (!(nu >= 0.0 && nu <= kMaxConcentration)) {
        throw Error(ErrorKind::invalid_input,
                    "bessel_i0 argument must lie in [0, 500], got " + std::to_string(nu));
    }
}

// sum_k (nu/2)^{2k} / (k!)^2, Kahan-compensated
double i0_series(double nu) {
    const double q = 0.25 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double carry = 0.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        const double y = term - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        if (term < sum * 1e-18) break;
    }
    return sum;
}

// exp(-nu) I0(nu) ~ 1/sqrt(2 pi nu) * sum_k ((2k-1)!!)^2 / (k! (8 nu)^k)
double i0_scaled_asymptotic(double nu) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * odd * odd / (8.0 * k * nu);
        if (next >= term) break;  // series is asymptotic; stop at the smallest term
        term = next;
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum / std::sqrt(2.0 * kPi * nu);
}

}  // namespace

double bessel_i0(double nu) {
    check_bessel_domain(nu);
    if (nu <= kSeriesLimit) return i0_series(nu);
    return i0_scaled_asymptotic(nu) * std::exp(nu);
}

double bessel_i0_scaled(double nu) {
    check_bessel_domain(nu);
    if (nu <= kSeriesLimit) return i0_series(nu) * std::exp(-nu);
    return i0_scaled_asymptotic(nu);
}

VonMisesKernel::VonMisesKernel(Concentration nu)
    : nu_(nu.value()), scale_(1.0 / (2.0 * kPi * bessel_i0_scaled(nu.value()))) {}

double VonMisesKernel::operator()(double theta_degrees) const noexcept {
    return scale_ * std::exp(nu_ * (sincos_degrees(theta_degrees).cos - 1.0));
}

double VonMisesKernel::from_cosine(double cos_theta) const noexcept {
    return scale_ * std::exp(nu_ * (cos_theta - 1.0));
}

double von_mises_kernel(double theta_degrees, Concentration nu) noexcept {
    return VonMisesKernel(nu)(theta_degrees);
}

}  // namespace orient
