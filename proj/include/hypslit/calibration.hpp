#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "hypslit/model_domains.hpp"

namespace hypslit {

struct ConstantsLedger {
    double c = 2;
    double D = 0;
    double E = 0;
    double cPrime = 1;
    double eps = 0;
    double Cbig = 2;
    double delta = 0.1;
    double N0 = 0;
    double N = 0;
    double N1 = 0;
    double N2 = 0;
    double chi = 0;
    double Dmeasured = 0;
};

struct ShadowingEstimate {
    double A = 1;
    double B = 0;
    double deltaHat = 0;
    double curveToGeodesic = 0;  // max over curves of sup_{curve} dist(., geodesic)
    double geodesicToCurve = 0;  // max over curves of sup_{geodesic} dist(., curve)
    std::size_t sampleCount = 0;
    std::size_t acceptedCount = 0;
    Curve worstCase;             // disk coordinates
};

namespace detail {

inline const Strip& unit_strip() {
    static const Strip s{0, 1};
    return s;
}
inline const TwoSlit& unit_twoslit() {
    static const TwoSlit t{0, 0, 1};
    return t;
}

/// kappa_strip / kappa_twoslit on the strip (0,1) and Omega_{0,0,1}.
inline double depth_ratio(Point z) {
    return metric_density(unit_strip(), z, 1.0) / metric_density(unit_twoslit(), z, 1.0);
}

/// sup_x of f(x) on (lo, hi): dyadic grid refined until stable to 1%, then a
/// golden-section polish around the best node.
template <class F>
double grid_sup(F&& f, double lo, double hi, double* argmax = nullptr) {
    int n = 16;
    double prev = -kInf, best = -kInf, bestX = lo;
    for (int round = 0; round < 8; ++round) {
        best = -kInf;
        for (int i = 0; i <= n; ++i) {
            const double x = lo + (hi - lo) * i / n;
            const double v = f(x);
            if (v > best) {
                best = v;
                bestX = x;
            }
        }
        if (round > 0 && std::abs(best - prev) <= 0.01 * std::abs(best)) break;
        prev = best;
        n *= 2;
    }
    const double step = (hi - lo) / n;
    double a = std::max(lo, bestX - step), b = std::min(hi, bestX + step);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * (1 + std::abs(a)); ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    const double polished = std::max(f1, f2);
    if (polished > best) {
        best = polished;
        bestX = f1 > f2 ? x1 : x2;
    }
    if (argmax) *argmax = bestX;
    return best;
}

}  // namespace detail

/// sup over x of kappa_S / kappa_{Omega_{0,0,1}} on the line Im z = -depth.
inline double depth_ratio_sup(double depth) {
    // symmetric about the bisectrix, so (0, 1/2] suffices
    return detail::grid_sup([&](double x) { return detail::depth_ratio(Point(x, -depth)); }, 1e-3, 0.5);
}

/// Least D (bisection-resolved) with kappa_S <= c kappa_{Omega_{0,0,1}} on {Im z <= -D}.
inline double calibrate_depth_constant(double c) {
    if (!(c > 1)) throw Error(ErrorKind::ConfigError, "depth calibration needs c > 1");
    auto worst = [](double D) {
        double m = 0;
        for (double off : {0.0, 0.25, 0.5, 1.0, 2.0}) m = std::max(m, depth_ratio_sup(D + off));
        return m;
    };
    if (worst(0.0) <= c) return 0.0;
    double lo = 0.0, hi = 0.125;
    while (worst(hi) > c) {
        lo = hi;
        hi *= 2;
        if (hi > 64) throw Error(ErrorKind::CalibrationDiverged, "depth ratio never falls below c");
    }
    while (hi - lo > 1e-4 * std::max(hi, 1e-2)) {
        const double mid = 0.5 * (lo + hi);
        (worst(mid) > c ? lo : hi) = mid;
    }
    return hi;
}

/// kappa_{semistrip (0,1) x (0,inf)} / kappa_{strip (0,1)}.
inline double semistrip_ratio(Point z) {
    static const SemiStrip s{0, 1, 0};
    return metric_density(s, z, 1.0) / metric_density(detail::unit_strip(), z, 1.0);
}

inline double semistrip_ratio_sup(double E) {
    double prev = -kInf, best = -kInf;
    for (int ny = 8; ny <= 512; ny *= 2) {
        best = -kInf;
        for (int j = 0; j <= ny; ++j) {
            const double y = E + 4.0 * j * j / double(ny) / ny;  // clustered near the floor
            best = std::max(best, detail::grid_sup([&](double x) { return semistrip_ratio(Point(x, y)); }, 1e-3, 0.5));
        }
        if (std::abs(best - prev) <= 0.01 * best) break;
        prev = best;
    }
    return std::max(best, 1.0);
}

inline constexpr double kSemistripPad = 1.02;
inline constexpr double kShadowPad = 1.1;

inline double calibrate_semistrip_constant(double E) {
    if (!(E > 0)) throw Error(ErrorKind::ConfigError, "semistrip calibration needs E > 0");
    const double s = semistrip_ratio_sup(E);
    if (!std::isfinite(s)) throw Error(ErrorKind::CalibrationDiverged, "semistrip ratio unbounded");
    return kSemistripPad * s;
}

// ------------------------------------------------------------- shadowing

namespace detail {

struct ShadowCurve {
    std::vector<Point> base;    // points on the positive axis of H (the geodesic)
    std::vector<Point> jitter;  // unit-disc jitter direction * magnitude in [0.2, 1]
};

inline Point jitter_point(Point rho, Point jit, double r) {
    // hyperbolic displacement by r * |jit| from rho, in the direction of jit
    const double m = std::abs(jit);
    if (m == 0 || r == 0) return rho;
    const Point y = std::tanh(r * m) * (jit / m);
    return rho * (1.0 + y) / (1.0 - y);
}

inline double dist_to_axis_segment(Point u, double r0, double r1) {
    const double m = std::abs(u);
    if (m >= r0 && m <= r1) return halfplane_angle_distance(std::arg(u));
    return std::min(halfplane_distance(u, r0), halfplane_distance(u, r1));
}

inline std::vector<Point> densify(const std::vector<Point>& pts, int sub) {
    std::vector<Point> out;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        HalfPlaneGeodesic g(pts[i], pts[i + 1]);
        for (int k = 0; k < sub; ++k) out.push_back(g.at(g.total * k / sub));
    }
    out.push_back(pts.back());
    return out;
}

inline bool is_quasi_geodesic(const std::vector<Point>& pts, double A, double B) {
    const std::size_t n = pts.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + halfplane_distance(pts[i - 1], pts[i]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 2; j < n; ++j) {
            const double len = cum[j] - cum[i];
            if (len > A * halfplane_distance(pts[i], pts[j]) + B + 1e-12 * (1 + len)) return false;
        }
    return true;
}

}  // namespace detail

/// Empirical shadowing constant for (A,B)-quasi-geodesics of the disk, measured on
/// a seeded family of jittered piecewise-geodesic curves. Each curve is scanned along
/// a fixed ladder of jitter radii up to its first (A,B) violation, so the estimate
/// is monotone in A and B for a fixed seed.
inline ShadowingEstimate calibrate_shadowing(double A, double B, std::size_t samples, std::uint64_t seed = 20240601) {
    if (!(A >= 1) || !(B >= 0) || samples < 1) throw Error(ErrorKind::ConfigError, "shadowing needs A >= 1, B >= 0");
    ShadowingEstimate est;
    est.A = A;
    est.B = B;
    est.sampleCount = samples;
    constexpr int kSub = 6;
    std::vector<double> ladder{0.0};
    for (int k = 0; k < 48; ++k) ladder.push_back(0.01 * std::pow(400.0, k / 47.0));

    std::vector<Point> worstPts;
    for (std::size_t s = 0; s < samples; ++s) {
        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (s + 1)));
        std::uniform_int_distribution<int> nDist(3, 12);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const int n = nDist(rng);
        const double L = 0.5 + 5.5 * U(rng);
        std::vector<double> tt(n);
        tt[0] = 0;
        tt[n - 1] = 1;
        for (int i = 1; i < n - 1; ++i) tt[i] = U(rng);
        std::sort(tt.begin() + 1, tt.end() - 1);
        detail::ShadowCurve sc;
        for (int i = 0; i < n; ++i) {
            sc.base.push_back(Point(std::exp(2.0 * L * tt[i]), 0));
            const double mag = (i == 0 || i == n - 1) ? 0.0 : 0.2 + 0.8 * U(rng);
            sc.jitter.push_back(std::polar(mag, 2 * kPi * U(rng)));
        }
        const double r0 = sc.base.front().real(), r1 = sc.base.back().real();
        for (double r : ladder) {
            std::vector<Point> pts(n);
            for (int i = 0; i < n; ++i) pts[i] = detail::jitter_point(sc.base[i], sc.jitter[i], r);
            const auto dense = detail::densify(pts, kSub);
            if (!detail::is_quasi_geodesic(dense, A, B)) break;
            ++est.acceptedCount;
            if (r == 0) continue;
            double d1 = 0;
            for (const Point& p : pts) d1 = std::max(d1, detail::dist_to_axis_segment(p, r0, r1));
            const auto fine = detail::densify(pts, 4 * kSub);
            double d2 = 0;
            const HalfPlaneGeodesic g(r0, r1);
            for (int k = 0; k <= 96; ++k) {
                const Point q = g.at(g.total * k / 96);
                double m = kInf;
                for (const Point& f : fine) m = std::min(m, halfplane_distance(q, f));
                d2 = std::max(d2, m);
            }
            est.curveToGeodesic = std::max(est.curveToGeodesic, d1);
            est.geodesicToCurve = std::max(est.geodesicToCurve, d2);
            if (std::max(d1, d2) > est.deltaHat) {
                est.deltaHat = std::max(d1, d2);
                worstPts = pts;
            }
        }
    }
    if (!worstPts.empty()) {
        double cum = 0;
        for (std::size_t i = 0; i < worstPts.size(); ++i) {
            if (i > 0) cum += halfplane_distance(worstPts[i - 1], worstPts[i]);
            est.worstCase.params.push_back(cum);
            est.worstCase.points.push_back(from_halfplane(Disk{}, worstPts[i]));
        }
    }
    return est;
}

// ---------------------------------------------------------------- ledger

struct LedgerOptions {
    double Dfloor = 0.5;
    std::size_t shadowSamples = 200;
    std::uint64_t seed = 20240601;
};

inline double ledger_threshold(double Cbig, double eps) { return 4.0 * (Cbig + 1.0) * eps / kPi; }

inline void finish_ledger(ConstantsLedger& L) {
    const double thr = ledger_threshold(L.Cbig, L.eps);
    if (L.N0 <= thr) L.N0 = 1.01 * thr;
    L.N = corridor_constants(L.delta, L.N0).N;
    L.N1 = L.N0 - 4.0 * L.eps / kPi;
    L.N2 = 0.5 * L.N0 - 2.0 * (L.Cbig + 1.0) * L.eps / kPi;
    L.chi = 1.0 - std::exp(-2.0 * (L.eps + L.delta));
}

inline ConstantsLedger build_ledger(double c, double E_fraction, double delta, double N0,
                                    const LedgerOptions& opt = {}) {
    if (!(c > 1) || !(E_fraction > 0 && E_fraction < 1) || !(delta > 0))
        throw Error(ErrorKind::ConfigError, "ledger needs c > 1, E_fraction in (0,1), delta > 0");
    ConstantsLedger L;
    L.c = c;
    L.delta = delta;
    L.Dmeasured = calibrate_depth_constant(c);
    L.D = std::max(L.Dmeasured, opt.Dfloor);
    L.E = E_fraction * L.D;
    L.cPrime = calibrate_semistrip_constant(L.E);
    L.eps = kShadowPad * calibrate_shadowing(c * L.cPrime, 0.0, opt.shadowSamples, opt.seed).deltaHat;
    L.Cbig = std::max(c, L.cPrime);
    L.N0 = N0;
    finish_ledger(L);
    return L;
}

/// Names of violated ledger invariants (empty when the ledger is consistent).
inline std::vector<std::string> ledger_violations(const ConstantsLedger& L) {
    std::vector<std::string> bad;
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1 + std::abs(a) + std::abs(b)); };
    if (!(L.c > 1)) bad.push_back("c > 1");
    if (!(L.E > 0 && L.E < L.D)) bad.push_back("0 < E < D");
    if (!(L.eps > 0)) bad.push_back("eps > 0");
    if (!(L.Cbig > 1) || !near(L.Cbig, std::max(L.c, L.cPrime))) bad.push_back("Cbig = max(c, c')");
    if (!(L.N0 > ledger_threshold(L.Cbig, L.eps))) bad.push_back("N0 > 4(C+1)eps/pi");
    if (!(L.N > L.N0)) bad.push_back("N > N0");
    if (!near(L.N1, L.N0 - 4 * L.eps / kPi)) bad.push_back("N1");
    if (!near(L.N2, 0.5 * L.N0 - 2 * (L.Cbig + 1) * L.eps / kPi) || !(L.N2 > 0)) bad.push_back("N2");
    if (!near(L.chi, 1 - std::exp(-2 * (L.eps + L.delta))) || !(L.chi > 0 && L.chi < 1)) bad.push_back("chi");
    return bad;
}

// --------------------------------------------------------- serialization

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string serialize_ledger(const ConstantsLedger& L) {
    std::ostringstream os;
    auto kv = [&](const char* k, double v) { os << k << " = " << format_double(v) << "\n"; };
    kv("c", L.c);
    kv("D", L.D);
    kv("D_measured", L.Dmeasured);
    kv("E", L.E);
    kv("c_prime", L.cPrime);
    kv("eps", L.eps);
    kv("C", L.Cbig);
    kv("delta", L.delta);
    kv("N0", L.N0);
    kv("N", L.N);
    kv("N1", L.N1);
    kv("N2", L.N2);
    kv("chi", L.chi);
    return os.str();
}

/// Parses `key = value` lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    int lineNo = 0;
    while (std::getline(is, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineNo) + ": expected key = value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

inline double parse_number(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorKind::ConfigError, "bad number for " + key + ": '" + s + "'");
    }
    if (used != s.size()) throw Error(ErrorKind::ConfigError, "bad number for " + key + ": '" + s + "'");
    return v;
}

inline ConstantsLedger deserialize_ledger(const std::string& text) {
    const auto kv = parse_key_values(text);
    auto get = [&](const char* k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw Error(ErrorKind::ConfigError, std::string("ledger missing key ") + k);
        return parse_number(k, it->second);
    };
    ConstantsLedger L;
    L.c = get("c");
    L.D = get("D");
    L.Dmeasured = kv.count("D_measured") ? get("D_measured") : L.D;
    L.E = get("E");
    L.cPrime = get("c_prime");
    L.eps = get("eps");
    L.Cbig = get("C");
    L.delta = get("delta");
    L.N0 = get("N0");
    L.N = get("N");
    L.N1 = get("N1");
    L.N2 = get("N2");
    L.chi = get("chi");
    return L;
}

}  // namespace hypslit
