#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypslit {

using Point = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorKind {
    PointOutsideDomain,
    ChartInversionFailure,
    BadOrdering,
    NoSolution,
    CalibrationDiverged,
    EmptyStrip,
    ConstraintViolation,
    CurveExitsDomain,
    Unreachable,
    CertificateFailed,
    WitnessInvalid,
    TrajectoryExitsDomain,
    CorridorNotFound,
    MarginTooTight,
    ConfigError,
    DomainInvalid,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorKind::ChartInversionFailure: return "ChartInversionFailure";
    case ErrorKind::BadOrdering: return "BadOrdering";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::CalibrationDiverged: return "CalibrationDiverged";
    case ErrorKind::EmptyStrip: return "EmptyStrip";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::CurveExitsDomain: return "CurveExitsDomain";
    case ErrorKind::Unreachable: return "Unreachable";
    case ErrorKind::CertificateFailed: return "CertificateFailed";
    case ErrorKind::WitnessInvalid: return "WitnessInvalid";
    case ErrorKind::TrajectoryExitsDomain: return "TrajectoryExitsDomain";
    case ErrorKind::CorridorNotFound: return "CorridorNotFound";
    case ErrorKind::MarginTooTight: return "MarginTooTight";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::DomainInvalid: return "DomainInvalid";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline bool finite(Point z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Sampled piecewise-linear path with strictly increasing parameters.
struct Curve {
    std::vector<double> params;
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
};

/// Hyperbolic distance in the right half-plane {Re > 0}, curvature -4.
///   k = artanh |(z-w)/(z+conj w)|, evaluated in the cancellation-free form
///   log((|z+conj w| + |z-w|) / (2 sqrt(Re z Re w))).
inline double halfplane_distance(Point z, Point w) {
    const double rz = z.real(), rw = w.real();
    if (rz > 0 && rw > 0) {
        const double s = std::abs(z + std::conj(w));
        const double d = std::abs(z - w);
        const double v = std::log((s + d) / (2.0 * std::sqrt(rz) * std::sqrt(rw)));
        return v > 0 ? v : 0.0;
    }
    double x = std::abs((z - w) / (z + std::conj(w)));
    x = std::clamp(x, 0.0, 1.0 - 1e-16);
    return 0.5 * std::log((1 + x) / (1 - x));
}

/// halfplane_distance(exp(L1), exp(L2)) without forming the exponentials;
/// the metric is invariant under positive scaling.
inline double halfplane_distance_log(Point L1, Point L2) {
    const double s = std::max(L1.real(), L2.real());
    const double gap = std::abs(L1.real() - L2.real());
    if (gap < 600) return halfplane_distance(std::exp(L1 - s), std::exp(L2 - s));
    return 0.5 * gap - 0.5 * (std::log(std::cos(L1.imag())) + std::log(std::cos(L2.imag())));
}

/// Metric density of {Re > 0} at u for tangent v.
inline double halfplane_density(Point u, Point v) { return std::abs(v) / (2.0 * u.real()); }

/// Geodesic of {Re > 0} through u1 and u2, parameterized by hyperbolic arc
/// length from u1. Circles are handled through their ideal endpoints i*eta1,
/// i*eta2, which keeps far-apart samples accurate.
struct HalfPlaneGeodesic {
    Point u1, u2;
    double total = 0;
    bool horizontal = false;
    double eta1 = 0, eta2 = 0, rho1 = 1, sign = 1;

    HalfPlaneGeodesic(Point a, Point b) : u1(a), u2(b) {
        total = halfplane_distance(a, b);
        const double scale = std::max(std::abs(a), std::abs(b));
        if (std::abs(a.imag() - b.imag()) <= 1e-15 * scale) {
            horizontal = true;
            sign = b.real() >= a.real() ? 1.0 : -1.0;
            return;
        }
        const double c = (std::norm(a) - std::norm(b)) / (2.0 * (a.imag() - b.imag()));
        const double r = std::abs(a - Point(0, c));
        eta2 = c + r;
        eta1 = (2.0 * a.imag() * c - std::norm(a)) / (c + r);
        if (c < 0) {
            eta1 = c - r;
            eta2 = (2.0 * a.imag() * c - std::norm(a)) / (c - r);
        }
        rho1 = rho_of(a);
        sign = rho_of(b) >= rho1 ? 1.0 : -1.0;
    }

    double rho_of(Point u) const {
        Point m = Point(0, 1) * (u - Point(0, eta1)) / (Point(0, eta2) - u);
        return std::max(m.real(), 1e-300);
    }

    Point at(double s) const {
        if (s <= 0 || total <= 0) return u1;
        if (s >= total) return u2;
        if (horizontal) return Point(u1.real() * std::exp(2.0 * sign * s), u1.imag());
        const double rho = rho1 * std::exp(2.0 * sign * s);
        const double w = eta2 - eta1;
        if (rho <= 1.0) return Point(0, eta1) + Point(0, rho) * w / Point(rho, 1.0);
        return Point(0, eta2) + w / Point(rho, 1.0);
    }
};

inline Point halfplane_geodesic_point(Point u1, Point u2, double s) {
    return HalfPlaneGeodesic(u1, u2).at(s);
}

/// k_H(1, e^{i beta}) = artanh(tan(beta/2)).
inline double halfplane_angle_distance(double beta) {
    double x = std::tan(0.5 * std::abs(beta));
    x = std::clamp(x, 0.0, 1.0 - 1e-16);
    return std::atanh(x);
}

/// Inverse of halfplane_angle_distance: beta = 2 arctan(tanh R).
inline double halfplane_angle_for_radius(double R) { return 2.0 * std::atan(std::tanh(R)); }

/// Distance in {Re > 0} from u to the ray [r0, +inf) (r0 > 0), or to the whole
/// positive axis when r0 <= 0.
inline double halfplane_distance_to_ray(Point u, double r0) {
    double rho = std::abs(u);
    if (r0 <= 0 || rho >= r0) return halfplane_angle_distance(std::arg(u));
    return halfplane_distance(u, Point(r0, 0));
}

}  // namespace hypslit
