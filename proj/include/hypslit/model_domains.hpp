#pragma once

#include <boost/math/tools/roots.hpp>

#include <cstdint>
#include <string>
#include <variant>

#include "hypslit/geometry.hpp"

namespace hypslit {

struct Disk {};
struct HalfPlane {};
struct Strip {
    double a = 0;
    double R = 1;
};
struct SemiStrip {
    double a = 0;
    double R = 1;
    double M = 0;
};
struct Koebe {
    Point p{0, 0};
};
/// V(beta, r0) = {rho e^{i theta}: rho > r0, |theta| < beta}, placed as
/// origin + e^{i axisRotation} V(beta, r0).
struct HSector {
    double beta = kPi / 4;
    double r0 = 0;
    Point origin{0, 0};
    double axisRotation = 0;
};
/// Omega_{a,b,R}: the plane minus {Re z in {a, a+R}, Im z <= b}.
struct TwoSlit {
    double a = -kPi;
    double b = -1;
    double R = 2 * kPi;
};

using ModelDomain = std::variant<Disk, HalfPlane, Strip, SemiStrip, Koebe, HSector, TwoSlit>;

inline std::string model_name(const ModelDomain& d) {
    static const char* names[] = {"disk", "halfplane", "strip", "semistrip", "koebe", "hsector", "twoslit"};
    return names[d.index()];
}

inline void validate(const ModelDomain& dom) {
    auto bad = [](const std::string& m) { throw Error(ErrorKind::DomainInvalid, m); };
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Strip> || std::is_same_v<T, SemiStrip> || std::is_same_v<T, TwoSlit>) {
                if (!(d.R > 0) || !std::isfinite(d.R)) bad("width must be positive");
            }
            if constexpr (std::is_same_v<T, HSector>) {
                if (!(d.beta > 0 && d.beta < kPi)) bad("sector angle must lie in (0, pi)");
                if (!(d.r0 >= 0)) bad("sector radius must be nonnegative");
                if (d.r0 == 0 && d.beta >= kPi) bad("sector angle too wide");
            }
        },
        dom);
}

inline bool contains(const ModelDomain& dom, Point z) {
    if (!finite(z)) return false;
    return std::visit(
        [&](const auto& d) -> bool {
            using T = std::decay_t<decltype(d)>;
            const double x = z.real(), y = z.imag();
            if constexpr (std::is_same_v<T, Disk>) return std::norm(z) < 1.0;
            else if constexpr (std::is_same_v<T, HalfPlane>) return x > 0;
            else if constexpr (std::is_same_v<T, Strip>) return x > d.a && x < d.a + d.R;
            else if constexpr (std::is_same_v<T, SemiStrip>) return x > d.a && x < d.a + d.R && y > d.M;
            else if constexpr (std::is_same_v<T, Koebe>) return !(x == d.p.real() && y <= d.p.imag());
            else if constexpr (std::is_same_v<T, HSector>) {
                Point zeta = (z - d.origin) * std::polar(1.0, -d.axisRotation);
                if (zeta == Point(0, 0)) return false;
                return std::abs(std::arg(zeta)) < d.beta && std::abs(zeta) > d.r0;
            } else {
                return !((x == d.a || x == d.a + d.R) && y <= d.b);
            }
        },
        dom);
}

/// Image of a two-slit preimage: w in {|Im w| < pi} and the derivative dz/dw.
struct ChartValue {
    Point w;
    Point deriv;
};

namespace detail {

inline void require_inside(const ModelDomain& dom, Point z) {
    if (!contains(dom, z)) throw Error(ErrorKind::PointOutsideDomain, "point not in " + model_name(dom));
}

// w + e^w - t, solved in {|Im w| < pi} by continuation from w = 0 (t = 1).
inline Point solve_w_plus_exp(Point t) {
    auto outside = [](Point w) { return !(std::abs(w.imag()) < kPi) || !finite(w); };
    auto newton = [&](Point w, Point target, double tol, int maxIter, bool& ok) {
        ok = false;
        for (int it = 0; it < maxIter; ++it) {
            Point e = std::exp(w);
            Point g = w + e - target;
            if (std::abs(g) <= tol) {
                ok = true;
                return w;
            }
            Point step = g / (1.0 + e);
            double lam = 1.0;
            Point cand = w - step;
            int halvings = 0;
            while (outside(cand) && halvings < 60) {
                lam *= 0.5;
                cand = w - lam * step;
                ++halvings;
            }
            if (outside(cand)) return w;
            w = cand;
        }
        Point g = w + std::exp(w) - target;
        ok = std::abs(g) <= tol;
        return w;
    };

    std::vector<Point> nodes{Point(1, 0)};
    if (std::abs(t.imag()) < kPi) {
        nodes.push_back(t);
    } else {
        const double X = std::max(t.real(), 1.0);
        nodes.push_back(Point(X, 0));
        nodes.push_back(Point(X, t.imag()));
        nodes.push_back(t);
    }

    Point w(0, 0);
    int totalSteps = 0;
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const Point A = nodes[k - 1], B = nodes[k];
        const double len = std::abs(B - A);
        double pos = 0;
        double h = std::min(len, 0.5 * std::max(1.0, std::abs(A)));
        while (pos < len) {
            if (++totalSteps > 20000) throw Error(ErrorKind::ChartInversionFailure, "continuation budget exhausted");
            const double next = std::min(len, pos + h);
            const Point target = len > 0 ? A + (B - A) * (next / len) : B;
            const bool last = (k + 1 == nodes.size()) && next >= len;
            const double tol = (last ? 1e-14 : 1e-9) * (1.0 + std::abs(target));
            bool ok = false;
            Point cand = newton(w, target, tol, 200, ok);
            if (ok) {
                w = cand;
                pos = next;
                h *= 2.0;
            } else {
                h *= 0.5;
                if (h < 1e-15 * (1.0 + std::abs(target)))
                    throw Error(ErrorKind::ChartInversionFailure, "continuation step underflow");
            }
        }
    }
    // Final polish, keeping whichever iterate has the smaller residual.
    for (int i = 0; i < 3; ++i) {
        Point e = std::exp(w);
        Point cand = w - (w + e - t) / (1.0 + e);
        if (outside(cand)) break;
        if (std::abs(cand + std::exp(cand) - t) >= std::abs(w + e - t)) break;
        w = cand;
    }
    return w;
}

inline Point twoslit_normalize(const TwoSlit& d, Point z) {
    return (z - Point(d.a + 0.5 * d.R, d.b + d.R / (2 * kPi))) * (2 * kPi / d.R);
}

}  // namespace detail

/// F(w) = (R/2pi) i (w + e^w) + (a + R/2) + i (b + R/2pi).
inline Point twoslit_forward(const TwoSlit& d, Point w) {
    const Point I(0, 1);
    return (d.R / (2 * kPi)) * I * (w + std::exp(w)) + Point(d.a + 0.5 * d.R, d.b + d.R / (2 * kPi));
}

inline Point twoslit_forward_derivative(const TwoSlit& d, Point w) {
    return (d.R / (2 * kPi)) * Point(0, 1) * (1.0 + std::exp(w));
}

inline ChartValue invert_twoslit_chart(const TwoSlit& d, Point zeta) {
    validate(d);
    detail::require_inside(d, zeta);
    const Point zn = detail::twoslit_normalize(d, zeta);
    const Point t = Point(0, -1) * zn;
    Point w = detail::solve_w_plus_exp(t);
    const Point back = twoslit_forward(d, w);
    if (!(std::abs(w.imag()) < kPi) || std::abs(back - zeta) > 1e-12 * (1.0 + std::abs(zeta)) * std::max(1.0, d.R))
        throw Error(ErrorKind::ChartInversionFailure, "residual too large");
    return {w, twoslit_forward_derivative(d, w)};
}

/// Conformal chart onto {Re > 0}: u = chart(z) and du/dz.
struct HalfPlaneChart {
    Point u;
    Point du;
};

inline HalfPlaneChart to_halfplane(const ModelDomain& dom, Point z) {
    detail::require_inside(dom, z);
    const Point I(0, 1);
    return std::visit(
        [&](const auto& d) -> HalfPlaneChart {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return {(1.0 + z) / (1.0 - z), 2.0 / ((1.0 - z) * (1.0 - z))};
            } else if constexpr (std::is_same_v<T, HalfPlane>) {
                return {z, Point(1, 0)};
            } else if constexpr (std::is_same_v<T, Strip>) {
                const Point u = std::exp(-I * kPi * (z - (d.a + 0.5 * d.R)) / d.R);
                return {u, -I * (kPi / d.R) * u};
            } else if constexpr (std::is_same_v<T, SemiStrip>) {
                const Point zeta = (z - Point(d.a + 0.5 * d.R, d.M)) * (kPi / d.R);
                return {-I * std::sin(zeta), -I * std::cos(zeta) * (kPi / d.R)};
            } else if constexpr (std::is_same_v<T, Koebe>) {
                const Point u = std::sqrt(-I * (z - d.p));
                return {u, -I / (2.0 * u)};
            } else if constexpr (std::is_same_v<T, HSector>) {
                const Point rot = std::polar(1.0, -d.axisRotation);
                const Point zeta = (z - d.origin) * rot;
                const double k = kPi / (2 * d.beta);
                if (d.r0 == 0) {
                    const Point u = std::exp(k * std::log(zeta));
                    return {u, k * u / zeta * rot};
                }
                const Point tau = k * I * (std::log(zeta) - std::log(d.r0));
                return {-I * std::sin(tau), k * std::cos(tau) / zeta * rot};
            } else {
                const ChartValue cv = invert_twoslit_chart(d, z);
                const Point u = std::exp(0.5 * cv.w);
                return {u, 0.5 * u / cv.deriv};
            }
        },
        dom);
}

/// L = log u for the half-plane chart u, and dL/dz = u'/u. Strips and
/// sectors are evaluated without forming u, which overflows far out.
struct LogChart {
    Point L;
    Point dL;
};

namespace detail {

// log(-i sin tau) and its tau-derivative cot tau, for Im tau > 0.
inline std::pair<Point, Point> log_minus_i_sin(Point tau) {
    const Point I(0, 1);
    if (!(tau.imag() > 0)) {
        const Point u = -I * std::sin(tau);
        return {std::log(u), std::cos(tau) / std::sin(tau)};
    }
    const Point q = std::exp(2.0 * I * tau);
    return {-I * tau - std::log(2.0) + std::log(1.0 - q), I * (q + 1.0) / (q - 1.0)};
}

}  // namespace detail

inline LogChart log_chart(const ModelDomain& dom, Point z) {
    detail::require_inside(dom, z);
    const Point I(0, 1);
    return std::visit(
        [&](const auto& d) -> LogChart {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Strip>) {
                return {-I * kPi * (z - (d.a + 0.5 * d.R)) / d.R, -I * kPi / d.R};
            } else if constexpr (std::is_same_v<T, SemiStrip>) {
                const Point zeta = (z - Point(d.a + 0.5 * d.R, d.M)) * (kPi / d.R);
                const auto [L, cot] = detail::log_minus_i_sin(zeta);
                return {L, cot * (kPi / d.R)};
            } else if constexpr (std::is_same_v<T, Koebe>) {
                return {0.5 * std::log(-I * (z - d.p)), 0.5 / (z - d.p)};
            } else if constexpr (std::is_same_v<T, HSector>) {
                const Point rot = std::polar(1.0, -d.axisRotation);
                const Point zeta = (z - d.origin) * rot;
                const double k = kPi / (2 * d.beta);
                if (d.r0 == 0) return {k * std::log(zeta), k / zeta * rot};
                const Point tau = k * I * (std::log(zeta) - std::log(d.r0));
                const auto [L, cot] = detail::log_minus_i_sin(tau);
                return {L, cot * k * I / zeta * rot};
            } else if constexpr (std::is_same_v<T, TwoSlit>) {
                const ChartValue cv = invert_twoslit_chart(d, z);
                return {0.5 * cv.w, 0.5 / cv.deriv};
            } else {
                const HalfPlaneChart c = to_halfplane(dom, z);
                return {std::log(c.u), c.du / c.u};
            }
        },
        dom);
}

inline Point from_halfplane(const ModelDomain& dom, Point u) {
    const Point I(0, 1);
    return std::visit(
        [&](const auto& d) -> Point {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Disk>) {
                return (u - 1.0) / (u + 1.0);
            } else if constexpr (std::is_same_v<T, HalfPlane>) {
                return u;
            } else if constexpr (std::is_same_v<T, Strip>) {
                return (d.a + 0.5 * d.R) + I * (d.R / kPi) * std::log(u);
            } else if constexpr (std::is_same_v<T, SemiStrip>) {
                const Point zeta = std::asin(I * u);
                return Point(d.a + 0.5 * d.R, d.M) + zeta * (d.R / kPi);
            } else if constexpr (std::is_same_v<T, Koebe>) {
                return d.p + I * u * u;
            } else if constexpr (std::is_same_v<T, HSector>) {
                const double k = kPi / (2 * d.beta);
                Point zeta;
                if (d.r0 == 0) {
                    zeta = std::exp(std::log(u) / k);
                } else {
                    const Point tau = std::asin(I * u);
                    zeta = d.r0 * std::exp(-I * tau / k);
                }
                return d.origin + zeta * std::polar(1.0, d.axisRotation);
            } else {
                return twoslit_forward(d, 2.0 * std::log(u));
            }
        },
        dom);
}

/// Inverse of log_chart.
inline Point from_halfplane_log(const ModelDomain& dom, Point L) {
    const Point I(0, 1);
    if (const auto* d = std::get_if<Strip>(&dom)) return (d->a + 0.5 * d->R) + I * (d->R / kPi) * L;
    if (const auto* d = std::get_if<SemiStrip>(&dom); d && L.real() > 300)
        return Point(d->a + 0.5 * d->R, d->M) + I * (L + std::log(2.0)) * (d->R / kPi);
    return from_halfplane(dom, std::exp(L));
}

inline double metric_density(const ModelDomain& dom, Point z, Point v) {
    validate(dom);
    const LogChart c = log_chart(dom, z);
    return std::abs(c.dL) * std::abs(v) / (2.0 * std::cos(c.L.imag()));
}

inline double distance(const ModelDomain& dom, Point z, Point w) {
    validate(dom);
    if (z == w) {
        detail::require_inside(dom, z);
        return 0.0;
    }
    return halfplane_distance_log(log_chart(dom, z).L, log_chart(dom, w).L);
}

namespace detail {

// Geodesic in rescaled half-plane coordinates; points map back through log_chart.
struct ScaledGeodesic {
    HalfPlaneGeodesic g;
    double shift;
};

inline ScaledGeodesic scaled_geodesic(const ModelDomain& dom, Point z, Point w) {
    const Point L1 = log_chart(dom, z).L, L2 = log_chart(dom, w).L;
    const double s = std::max(L1.real(), L2.real());
    return {HalfPlaneGeodesic(std::exp(L1 - s), std::exp(L2 - s)), s};
}

}  // namespace detail

/// n samples on the geodesic from z to w, parameterized by hyperbolic arc length.
inline Curve geodesic_segment(const ModelDomain& dom, Point z, Point w, int n) {
    validate(dom);
    if (n < 2) throw Error(ErrorKind::ConfigError, "geodesic needs at least two samples");
    const auto sg = detail::scaled_geodesic(dom, z, w);
    Curve c;
    c.params.resize(n);
    c.points.resize(n);
    for (int k = 0; k < n; ++k) {
        const double s = sg.g.total * k / (n - 1);
        c.params[k] = s;
        c.points[k] = (k == 0) ? z : (k == n - 1) ? w : from_halfplane_log(dom, std::log(sg.g.at(s)) + sg.shift);
    }
    return c;
}

/// Point at arc length s along the geodesic from z to w.
inline Point geodesic_point(const ModelDomain& dom, Point z, Point w, double s) {
    const auto sg = detail::scaled_geodesic(dom, z, w);
    return from_halfplane_log(dom, std::log(sg.g.at(s)) + sg.shift);
}

// ---------------------------------------------------------------- sectors

enum class SectorKind { HalfPlaneSector, StripCorridor, KoebeSector };

struct SectorShape {
    SectorKind kind = SectorKind::HalfPlaneSector;
    double beta = 0;        // wedge half-angle in domain coordinates
    double r0 = 0;          // r0 (half-plane) or t0 (Koebe); unused for strips
    Point discCenter{0, 0};
    double discRadius = 0;  // hyperbolic amplitude R
    double a = 0, R = 1;    // strip corridor
    Point p{0, 0};          // Koebe base point
};

/// S_H([r0, inf), R) = V(beta, r0) u D(r0, R), k_H(1, e^{i beta}) = R.
inline SectorShape make_halfplane_sector(double R, double r0) {
    SectorShape s;
    s.kind = SectorKind::HalfPlaneSector;
    s.discRadius = R;
    s.beta = halfplane_angle_for_radius(R);
    s.r0 = r0;
    s.discCenter = Point(r0, 0);
    return s;
}

/// Hyperbolic delta-neighbourhood of the bisectrix of the strip (a, a+R).
inline SectorShape make_strip_corridor(double a, double R, double delta) {
    SectorShape s;
    s.kind = SectorKind::StripCorridor;
    s.a = a;
    s.R = R;
    s.discRadius = delta;
    s.beta = halfplane_angle_for_radius(delta);
    s.discCenter = Point(a + 0.5 * R, 0);
    return s;
}

/// S_{K_p}({p + it: t >= t0}, R).
inline SectorShape make_koebe_sector(Point p, double t0, double R) {
    SectorShape s;
    s.kind = SectorKind::KoebeSector;
    s.p = p;
    s.r0 = t0;
    s.discRadius = R;
    s.beta = 2.0 * halfplane_angle_for_radius(R);
    s.discCenter = p + Point(0, t0);
    return s;
}

inline double strip_sector_halfwidth(double R, double delta) {
    return R * halfplane_angle_for_radius(delta) / kPi;
}

inline bool sector_membership(const SectorShape& s, Point z) {
    if (!finite(z)) return false;
    switch (s.kind) {
    case SectorKind::HalfPlaneSector: {
        if (!(z.real() > 0)) return false;
        if (std::abs(z) > s.r0 && std::abs(std::arg(z)) < s.beta) return true;
        return s.r0 > 0 && halfplane_distance(z, Point(s.r0, 0)) < s.discRadius;
    }
    case SectorKind::StripCorridor: {
        if (!(z.real() > s.a && z.real() < s.a + s.R)) return false;
        return std::abs(z.real() - (s.a + 0.5 * s.R)) < strip_sector_halfwidth(s.R, s.discRadius);
    }
    case SectorKind::KoebeSector: {
        const Koebe K{s.p};
        if (!contains(K, z)) return false;
        const Point zeta = Point(0, -1) * (z - s.p);
        if (std::abs(zeta) > s.r0 && std::abs(std::arg(zeta)) < s.beta) return true;
        return distance(K, z, s.discCenter) < s.discRadius;
    }
    }
    return false;
}

// ------------------------------------------------------------ strip facts

inline double crossing_separation(const Strip& strip, double M1, double M2) {
    if (!(M2 > M1)) throw Error(ErrorKind::BadOrdering, "crossing levels must satisfy M2 > M1");
    return kPi * (M2 - M1) / (2.0 * strip.R);
}

inline Point orthogonal_projection_strip(const Strip& strip, Point z) {
    detail::require_inside(strip, z);
    return Point(strip.a + 0.5 * strip.R, z.imag());
}

struct CorridorConstants {
    double N = 0;
    double beta = 0;
    double p = 0;
    double rhoMinus = 0;
    double rhoPlus = 0;
};

/// Roots rho_- <= rho_+ of rho^2 - (1+p) sin(beta) rho + p.
inline std::pair<double, double> corridor_roots(double beta, double p) {
    const double b = (1.0 + p) * std::sin(beta);
    const double disc = b * b - 4.0 * p;
    if (disc < 0) return {NAN, NAN};
    const double sq = std::sqrt(disc);
    const double plus = 0.5 * (b + sq);
    return {p / plus, plus};
}

inline CorridorConstants corridor_constants(double delta, double N0) {
    if (!(delta > 0) || !(N0 > 0)) throw Error(ErrorKind::ConfigError, "corridor constants need delta > 0, N0 > 0");
    CorridorConstants out;
    out.beta = halfplane_angle_for_radius(delta);
    const double cb = std::cos(out.beta);
    const double pmin = (1.0 + cb) / std::max(1.0 - cb, 1e-300);
    auto gap = [&](double logp) {
        auto [m, pl] = corridor_roots(out.beta, std::exp(logp));
        if (!(m > 0)) return -N0;
        return std::log(pl / m) / kPi - N0;
    };
    double lo = std::log(pmin), hi = lo + 1.0;
    int guard = 0;
    while (gap(hi) <= 0) {
        hi = lo + 2.0 * (hi - lo);
        if (++guard > 200 || !std::isfinite(hi)) throw Error(ErrorKind::NoSolution, "corridor equation has no root");
    }
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(gap, lo, hi, tol, iters);
    const double logp = 0.5 * (a + b);
    out.p = std::exp(logp);
    auto [m, pl] = corridor_roots(out.beta, out.p);
    out.rhoMinus = m;
    out.rhoPlus = pl;
    out.N = logp / kPi;
    if (!(out.N > N0)) out.N = std::nextafter(N0, kInf);
    return out;
}

}  // namespace hypslit
