#pragma once

// Circular geometry and directional statistics. All public angles are in degrees.

namespace orient {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;
inline constexpr double kNormEpsilon = 1e-12;  // minimum squared norm for atan2 decoding
inline constexpr double kMaxConcentration = 500.0;

// Orientation in [0, 360) degrees. Only constructible through canonicalize().
class Angle {
public:
    Angle() = default;

    double degrees() const noexcept { return degrees_; }
    double radians() const noexcept { return degrees_ * kDegToRad; }

    friend bool operator==(Angle, Angle) = default;

private:
    friend Angle canonicalize(double raw);
    explicit Angle(double d) : degrees_(d) {}

    double degrees_ = 0.0;
};

struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;

    double squared_norm() const noexcept { return x * x + y * y; }
    friend bool operator==(const PlanarPoint&, const PlanarPoint&) = default;
};

// Von-Mises concentration; nu = 0 is the uniform kernel.
class Concentration {
public:
    explicit Concentration(double nu);
    double value() const noexcept { return nu_; }

private:
    double nu_;
};

/// Reduces a finite angle modulo 360 into [0, 360). Throws invalid_input on NaN/inf.
Angle canonicalize(double raw);

/// Shortest arc between two orientations, in [0, 180].
double angular_distance(Angle a, Angle b) noexcept;

/// Signed shortest arc b - a in (-180, 180].
double signed_difference(Angle a, Angle b) noexcept;

struct SinCos {
    double sin;
    double cos;
};

/// sin/cos of an angle given in degrees, exact at multiples of 90.
SinCos sincos_degrees(double degrees) noexcept;

PlanarPoint to_unit_vector(Angle a) noexcept;

/// atan2 of the vector, canonicalized. Throws degenerate_vector when |p|^2 <= 1e-12.
Angle from_vector(PlanarPoint p);

/// Modified Bessel function of the first kind, order 0, for nu in [0, 500].
double bessel_i0(double nu);

/// exp(-nu) * I0(nu); finite over the whole domain.
double bessel_i0_scaled(double nu);

/// exp(nu cos theta) / (2 pi I0(nu)), theta in degrees.
double von_mises_kernel(double theta_degrees, Concentration nu) noexcept;

}  // namespace orient

namespace orient {

// von_mises_kernel with the normalizer precomputed, for repeated evaluation.
class VonMisesKernel {
public:
    explicit VonMisesKernel(Concentration nu);

    double operator()(double theta_degrees) const noexcept;
    /// Kernel value given cos(theta) directly.
    double from_cosine(double cos_theta) const noexcept;
    double concentration() const noexcept { return nu_; }

private:
    double nu_;
    double scale_;  // 1 / (2 pi exp(-nu) I0(nu))
};

}  // namespace orient
