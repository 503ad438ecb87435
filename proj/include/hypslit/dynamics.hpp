#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "hypslit/distance_engine.hpp"

namespace hypslit {

enum class Verdict { NonTangentialCertified, TangentialEvidence, OscillationCertified, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::NonTangentialCertified: return "NonTangentialCertified";
    case Verdict::TangentialEvidence: return "TangentialEvidence";
    case Verdict::OscillationCertified: return "OscillationCertified";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

// ----------------------------------------------------------------- witnesses

/// U with a geodesic ray: HalfPlane -> [rayStart, inf); Koebe{p} ->
/// {p + it : t >= rayStart}; Strip -> its bisectrix (rayStart unused).
struct SectorWitness {
    ModelDomain U = HalfPlane{};
    double rayStart = 1;
    double R = 1;
    double R0 = 0.5;
};

inline SectorShape witness_shape(const SectorWitness& W, double radius) {
    if (std::holds_alternative<HalfPlane>(W.U)) return make_halfplane_sector(radius, W.rayStart);
    if (const auto* k = std::get_if<Koebe>(&W.U)) return make_koebe_sector(k->p, W.rayStart, radius);
    if (const auto* s = std::get_if<Strip>(&W.U)) return make_strip_corridor(s->a, s->R, radius);
    throw Error(ErrorKind::WitnessInvalid, "witness model must be a half-plane, Koebe domain or strip");
}

inline void check_witness_numbers(const SectorWitness& W) {
    if (!(W.R0 > 0)) throw Error(ErrorKind::WitnessInvalid, "R0 must be positive");
    if (!(W.R > W.R0)) throw Error(ErrorKind::WitnessInvalid, "R > R0 fails");
    if (!(W.rayStart > 0) && !std::holds_alternative<Strip>(W.U)) throw Error(ErrorKind::WitnessInvalid, "ray start must be positive");
    witness_shape(W, W.R);
}

namespace detail {

/// Does the slit meet the Koebe sector (wedge minus disc) u (hyperbolic disc)?
inline bool slit_meets_koebe_sector(const DownwardSlit& s, Point p, double t0, double R) {
    const double beta = 2.0 * halfplane_angle_for_radius(R);
    const double dx = s.x - p.real();
    const double T = s.top - p.imag();
    // wedge part: points with angle from the upward vertical below beta
    // are those with height above tb; keep those outside the closed disc |.| <= t0.
    const double tb = dx == 0 ? 0.0 : std::abs(dx) / std::tan(beta);
    if (T > tb) {
        if (dx * dx + T * T > t0 * t0 || dx * dx + tb * tb > t0 * t0) return true;
    }
    // disc part, in the chart u = sqrt(-i (z - p)): Euclidean disc centre m, radius r
    const double c = std::sqrt(t0);
    const double m = c * std::cosh(2.0 * R), r = c * std::sinh(2.0 * R);
    // slit image: u = s - i dx/(2s) with s^2 - dx^2/(4 s^2) <= T
    const double q = std::sqrt(T * T + dx * dx);
    const double s2 = T >= 0 ? 0.5 * (T + q) : 0.5 * dx * dx / (q - T);
    if (!(s2 > 0)) return false;
    const double smax = std::sqrt(s2);
    auto f = [&](double sv) { return (sv - m) * (sv - m) + dx * dx / (4.0 * sv * sv) - r * r; };
    double smin;
    if (dx == 0) {
        smin = m;
    } else {
        double lo = 1e-300, hi = std::max(m, 1.0) * 4 + std::cbrt(dx * dx);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (2.0 * (mid - m) - dx * dx / (2.0 * mid * mid * mid) < 0) lo = mid;
            else hi = mid;
        }
        smin = 0.5 * (lo + hi);
    }
    return f(std::min(smin, smax)) < 0;
}

}  // namespace detail

/// Exact test that the witness sector of radius R avoids every slit.
inline bool witness_sector_inside(const SlitDomain& omega, const SectorWitness& W) {
    const auto* k = std::get_if<Koebe>(&W.U);
    if (!k) return false;
    for (const auto& s : omega.slits()) {
        if (s.x == k->p.real() && s.top <= k->p.imag()) continue;  // U's own slit
        if (detail::slit_meets_koebe_sector(s, k->p, W.rayStart, W.R)) return false;
    }
    return true;
}

struct ClassifierResult {
    Verdict verdict = Verdict::Inconclusive;
    bool sectorInside = false;
    std::size_t tailStart = 0;  // all samples from here on lie in S_U(gamma, R0)
    std::string reason;
};

namespace detail {

inline ClassifierResult finish_classification(const SectorWitness& W, const std::vector<Point>& seq, bool inside) {
    ClassifierResult out;
    out.sectorInside = inside;
    const SectorShape S0 = witness_shape(W, W.R0);
    std::size_t tail = seq.size();
    while (tail > 0 && sector_membership(S0, seq[tail - 1])) --tail;
    out.tailStart = tail;
    if (!inside) {
        out.reason = "sector of radius R is not inside the domain";
    } else if (seq.empty() || tail > seq.size() / 2) {
        out.reason = "tail in the R0-sector is shorter than half the sequence";
    } else {
        out.verdict = Verdict::NonTangentialCertified;
        out.reason = "sector inside; tail from index " + std::to_string(tail);
    }
    return out;
}

}  // namespace detail

inline ClassifierResult classify_nontangential(const SlitDomain& omega, const SectorWitness& W, const std::vector<Point>& seq) {
    check_witness_numbers(W);
    if (!model_contains_slit_domain(W.U, omega)) throw Error(ErrorKind::WitnessInvalid, "U does not contain the domain");
    for (const auto& z : seq)
        if (!omega.contains(z)) throw Error(ErrorKind::PointOutsideDomain, "sequence point lies on a slit");
    return detail::finish_classification(W, seq, witness_sector_inside(omega, W));
}

/// Model-level classifier where the domain equals the witness model.
inline ClassifierResult classify_nontangential(const ModelDomain& delta, const SectorWitness& W, const std::vector<Point>& seq) {
    check_witness_numbers(W);
    if (delta.index() != W.U.index()) throw Error(ErrorKind::WitnessInvalid, "U must equal the model domain");
    for (const auto& z : seq)
        if (!contains(delta, z)) throw Error(ErrorKind::PointOutsideDomain, "sequence point outside the domain");
    return detail::finish_classification(W, seq, true);
}

/// Witness for a wedge p + iN + iV(beta, 0) inside omega, p the tip of a slit:
/// Koebe sector of half-angle beta/2, ray start raised until it fits.
inline std::optional<SectorWitness> koebe_witness_from_wedge(const SlitDomain& omega, Point p, double N, double beta,
                                                            double maxStart = kInf) {
    if (!sector_containment(omega, p, beta, N)) return std::nullopt;
    SectorWitness W;
    W.U = Koebe{p};
    if (!model_contains_slit_domain(W.U, omega)) return std::nullopt;
    W.R = halfplane_angle_distance(0.25 * beta);
    W.R0 = 0.5 * W.R;
    double t0 = std::max({N, 1e-12 * (1.0 + std::abs(p)), 1e-300});
    for (int i = 0; i < 400 && t0 <= maxStart; ++i, t0 *= 2) {
        W.rayStart = t0;
        if (witness_sector_inside(omega, W)) return W;
    }
    return std::nullopt;
}

// -------------------------------------------------------------- trajectories

inline void check_trajectory(const SlitDomain& omega, Point w0) {
    if (!omega.contains(w0)) throw Error(ErrorKind::TrajectoryExitsDomain, "start point lies on a slit");
    // upward translates of a domain point never meet a downward slit
}

inline double liminf_ratio(const SlitDomain& omega, Point w0, double tMax, std::size_t samples) {
    check_trajectory(omega, w0);
    if (!(tMax > 0) || samples < 2) throw Error(ErrorKind::ConfigError, "need tMax > 0 and at least two samples");
    double best = kInf;
    for (std::size_t k = samples / 2 + 1; k <= samples; ++k) {
        const double t = tMax * static_cast<double>(k) / static_cast<double>(samples);
        best = std::min(best, boundary_distance_raw(omega, w0 + Point(0, t)) / t);
    }
    return best;
}

struct Crossing {
    double t = 0;
    int box = -1;
    int side = 0;  // +1: geodesic moves to the right of the trajectory, -1: to the left
};

/// Sign changes of Re(Gamma) - Re(w0) along the curve.
inline std::vector<Crossing> trajectory_crossings(const Curve& G, Point w0, const std::vector<GoodBox>& boxes) {
    std::vector<Crossing> out;
    int last = 0;
    for (std::size_t i = 0; i < G.size(); ++i) {
        const double d = G.points[i].real() - w0.real();
        const int sg = d > 0 ? 1 : d < 0 ? -1 : 0;
        if (sg == 0) continue;
        if (last != 0 && sg != last) {
            std::size_t j = i - 1;
            while (j > 0 && G.points[j].real() == w0.real()) --j;
            const Point a = G.points[j], b = G.points[i];
            const double s = (w0.real() - a.real()) / (b.real() - a.real());
            Crossing c;
            const Point x = a + s * (b - a);
            c.t = x.imag() - w0.imag();
            c.side = sg;
            for (std::size_t k = 0; k < boxes.size(); ++k)
                if (boxes[k].in_column(x) && x.imag() < boxes[k].top() && x.imag() > boxes[k].reported_bottom()) c.box = static_cast<int>(k);
            out.push_back(c);
        }
        last = sg;
    }
    return out;
}

/// Split segments so that each piece has integral length <= step.
inline Curve resample_curve(const SlitDomain& omega, const Curve& G, double step) {
    Curve out;
    out.points.push_back(G.points.front());
    out.params.push_back(0);
    double acc = 0;
    for (std::size_t i = 1; i < G.size(); ++i) {
        const Point a = G.points[i - 1], b = G.points[i];
        const double L = qh_segment_length(omega, a, b);
        const int pieces = std::max(1, static_cast<int>(std::ceil(L / step)));
        for (int k = 1; k <= pieces; ++k) {
            const Point p = a + (static_cast<double>(k) / pieces) * (b - a);
            acc += L / pieces;
            if (p == out.points.back()) continue;
            out.points.push_back(p);
            out.params.push_back(acc);
        }
    }
    return out;
}

struct SlopeRow {
    double t = 0;
    BoundPair dist;
    double slack = 0;
    double deltaRatio = 0;
    bool crossing = false;
};

struct SlopeOptions {
    int budget = 0;
    double topFactor = 4.0;         // Gamma ends at w0 + i topFactor * max(tGrid)
    double windowTop = kInf;        // verdicts only use t below this height
    std::optional<Verdict> externalVerdict;  // e.g. from the oscillation experiment
    GridSpec grid{};
};

struct SlopeReport {
    std::vector<SlopeRow> rows;
    std::vector<Crossing> crossings;
    Curve gamma;
    QGCertificate cert;
    Verdict verdict = Verdict::Inconclusive;
    std::string verdictRecord;
    std::size_t tailStart = 0;
    double truncation = 0;  // Gamma's end height above w0
};

/// Levels used for the tangential-evidence rule: boxes containing the sample
/// when the engine has a ledger, otherwise octaves of t.
inline std::vector<int> slope_levels(const DistanceEngine& eng, Point w0, const std::vector<double>& tGrid) {
    std::vector<int> lv(tGrid.size(), -1);
    const auto& boxes = eng.boxes();
    for (std::size_t i = 0; i < tGrid.size(); ++i) {
        const Point z = w0 + Point(0, tGrid[i]);
        if (!boxes.empty()) {
            double bestTop = kInf;
            for (std::size_t k = 0; k < boxes.size(); ++k)
                if (boxes[k].contains(z) && boxes[k].top() < bestTop) {
                    bestTop = boxes[k].top();
                    lv[i] = static_cast<int>(k);
                }
        } else {
            lv[i] = static_cast<int>(std::floor(std::log2(std::max(tGrid[i], 1e-300))));
        }
    }
    return lv;
}

inline SlopeReport slope_scan(const DistanceEngine& eng, Point w0, std::vector<double> tGrid, const SlopeOptions& opt = {}) {
    const SlitDomain& omega = eng.omega();
    check_trajectory(omega, w0);
    if (tGrid.empty()) throw Error(ErrorKind::ConfigError, "empty t grid");
    std::sort(tGrid.begin(), tGrid.end());
    if (!(tGrid.front() > 0)) throw Error(ErrorKind::ConfigError, "t grid must be positive");
    SlopeReport rep;
    const double tTop = opt.topFactor * tGrid.back();
    rep.truncation = tTop;
    GridSpec g = opt.grid;
    if (!g.window.valid()) {
        const double below = std::max(boundary_distance_raw(omega, w0), 1e-9 * tTop);
        g.window = Rect{w0.real() - 0.5 * tTop, w0.imag() - below, w0.real() + 0.5 * tTop, w0.imag() + tTop};
    }
    const GeodesicResult geo = approx_geodesic(eng, w0, w0 + Point(0, tTop), g);
    rep.cert = geo.cert;
    rep.gamma = resample_curve(omega, geo.curve, 0.5);
    rep.crossings = trajectory_crossings(rep.gamma, w0, eng.boxes());
    const SetDistanceOracle oracle(eng, rep.gamma);
    double prevT = 0;
    for (double t : tGrid) {
        SlopeRow row;
        row.t = t;
        const Point z = w0 + Point(0, t);
        const SetDistance sd = oracle.query(z, opt.budget);
        row.dist = sd.bounds;
        row.slack = sd.slack;
        row.deltaRatio = boundary_distance_raw(omega, z) / t;
        for (const auto& c : rep.crossings)
            if (c.t > prevT && c.t <= t) row.crossing = true;
        prevT = t;
        rep.rows.push_back(row);
    }

    std::vector<std::size_t> inWin;
    for (std::size_t i = 0; i < tGrid.size(); ++i)
        if (w0.imag() + tGrid[i] < opt.windowTop) inWin.push_back(i);

    if (opt.externalVerdict) {
        rep.verdict = *opt.externalVerdict;
        rep.verdictRecord = "external experiment";
        return rep;
    }
    // Non-tangential: bounded distances on the tail plus a sector witness.
    {
        std::vector<Point> seq;
        double worst = 0;
        for (std::size_t i : inWin) seq.push_back(w0 + Point(0, tGrid[i]));
        for (std::size_t k = inWin.size() / 2; k < inWin.size(); ++k) worst = std::max(worst, rep.rows[inWin[k]].dist.hi);
        if (seq.size() >= 2 && std::isfinite(worst)) {
            std::vector<Point> tips;
            for (const auto& s : omega.slits()) tips.emplace_back(s.x, s.top);
            std::stable_sort(tips.begin(), tips.end(), [&](Point a, Point b) {
                return std::abs(a.real() - w0.real()) < std::abs(b.real() - w0.real());
            });
            if (tips.size() > 6) tips.resize(6);
            const double maxStart = std::isfinite(opt.windowTop) ? opt.windowTop : tTop;
            for (const Point p : tips) {
                for (double beta : {kPi / 2, kPi / 4, kPi / 8, 1.0 / 16, 1.0 / 64, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
                    double N = 0;
                    while (!sector_containment(omega, p, beta, N) && N < maxStart) N = N == 0 ? 1e-9 * (1 + std::abs(p)) : 2 * N;
                    if (N >= maxStart) continue;
                    const auto W = koebe_witness_from_wedge(omega, p, N, beta, maxStart - p.imag());
                    if (!W) continue;
                    const ClassifierResult cr = classify_nontangential(omega, *W, seq);
                    if (cr.verdict == Verdict::NonTangentialCertified) {
                        rep.verdict = cr.verdict;
                        rep.tailStart = inWin[cr.tailStart];
                        char buf[256];
                        std::snprintf(buf, sizeof buf, "koebe witness p=(%.17g,%.17g) t0=%.17g R=%.17g R0=%.17g; tail distHi <= %.17g",
                                      p.real(), p.imag(), W->rayStart, W->R, W->R0, worst);
                        rep.verdictRecord = buf;
                        return rep;
                    }
                }
            }
        }
    }
    // Tangential evidence: per-level maxima of distLo increasing over >= 3 levels.
    {
        std::vector<double> tw;
        for (std::size_t i : inWin) tw.push_back(tGrid[i]);
        const auto lv = slope_levels(eng, w0, tw);
        std::vector<double> maxima;
        std::optional<int> cur;
        for (std::size_t k = 0; k < inWin.size(); ++k) {
            if (lv[k] < 0 && !eng.boxes().empty()) continue;
            const double v = rep.rows[inWin[k]].dist.lo;
            if (!cur || lv[k] != *cur) {
                maxima.push_back(v);
                cur = lv[k];
            } else {
                maxima.back() = std::max(maxima.back(), v);
            }
        }
        std::size_t run = maxima.empty() ? 0 : 1;
        for (std::size_t k = maxima.size(); k-- > 1;) {
            if (maxima[k] > maxima[k - 1]) ++run;
            else break;
        }
        if (run >= 3) {
            rep.verdict = Verdict::TangentialEvidence;
            rep.verdictRecord = "distLo level maxima increase over the last " + std::to_string(run) + " levels";
            return rep;
        }
    }
    rep.verdictRecord = "no rule applied";
    return rep;
}

// ------------------------------------------------------------- experiments

struct CorridorRecord {
    int j = 0;
    bool found = false;
    double r = 0, y = 0;
    Rect bplus{};
    int side = 0, expectedSide = 0;
    double span = 0;          // Im-extent of the B+ run of Gamma inside the box
    bool tallEnough = false;  // Gamma crosses the box over more than N R_j
    int box = -1;
};

struct LevelCertificate {
    int j = 0;
    double y = 0;
    double lo = 0, sampleMin = 0, slack = 0, hi = 0;
    bool passed = false;
};

struct OscillationLedger {
    std::vector<CorridorRecord> levels;
    std::vector<Crossing> crossings;
    std::vector<LevelCertificate> certificates;
    double beta1 = 0, betaFinal = 0;
    double corridorBound = 0;  // (1/C) (1/2) log((1 - chi) tan0 / tan1)
    bool sidesAlternate = false;
    QGCertificate cert;
    Curve gamma;
    double tMax = 0;
    Verdict verdict = Verdict::Inconclusive;
    std::string note;
};

struct ExperimentOptions {
    int budget = 0;
    double topFactor = 4.0;
    double resampleStep = 1.0;
    GridSpec grid{};
};

namespace detail {

inline const GoodBox* find_box(const std::vector<GoodBox>& boxes, double left, double right, int* idx = nullptr) {
    for (std::size_t k = 0; k < boxes.size(); ++k)
        if (boxes[k].a == left && boxes[k].a + boxes[k].R == right) {
            if (idx) *idx = static_cast<int>(k);
            return &boxes[k];
        }
    return nullptr;
}

/// Longest run of Gamma inside box and B+ (half-width chi R / 2 about the bisectrix).
inline CorridorRecord locate_corridor(const Curve& G, const GoodBox& B, double chi, double N, double N1) {
    CorridorRecord rec;
    const double c = B.bisectrix(), hw = 0.5 * chi * B.R;
    double bestSpan = -1, bestLo = 0, bestHi = 0, sideSum = 0;
    double runLo = 0, runHi = 0, runSide = 0;
    bool inRun = false;
    double ymin = kInf, ymax = -kInf;
    auto close = [&]() {
        if (inRun && runHi - runLo > bestSpan) {
            bestSpan = runHi - runLo;
            bestLo = runLo;
            bestHi = runHi;
            sideSum = runSide;
        }
        inRun = false;
    };
    for (const auto& p : G.points) {
        if (B.contains(p)) {
            ymin = std::min(ymin, p.imag());
            ymax = std::max(ymax, p.imag());
        }
        if (B.contains(p) && std::abs(p.real() - c) <= hw) {
            if (!inRun) {
                inRun = true;
                runLo = runHi = p.imag();
                runSide = 0;
            }
            runLo = std::min(runLo, p.imag());
            runHi = std::max(runHi, p.imag());
            runSide += p.real();
        } else {
            close();
        }
    }
    close();
    rec.span = std::max(bestSpan, 0.0);
    rec.tallEnough = ymax - ymin > N * B.R;
    if (bestSpan >= N1 * B.R) {
        rec.found = true;
        const double mid = 0.5 * (bestLo + bestHi);
        rec.r = mid - 0.5 * N1 * B.R;
        rec.y = mid;
        rec.bplus = Rect{c - hw, rec.r, c + hw, rec.r + N1 * B.R};
        rec.side = c > 0 ? 1 : -1;
        (void)sideSum;
    }
    return rec;
}

}  // namespace detail

inline OscillationLedger oscillation_experiment(const DistanceEngine& eng, const OscillatingReport& build, const ExperimentOptions& opt = {}) {
    if (!eng.ledger()) throw Error(ErrorKind::ConfigError, "oscillation experiment needs a ledger");
    if (build.levels.size() < 4) throw Error(ErrorKind::ConfigError, "oscillation experiment needs at least four teeth");
    const ConstantsLedger& L = *eng.ledger();
    const SlitDomain& omega = eng.omega();
    OscillationLedger out;
    const double t0 = build.tan0, t1 = build.tan1, C = L.Cbig;
    out.beta1 = std::log((L.chi * t0 + t1) / t1);
    out.betaFinal = std::min(out.beta1 / C, kPi * L.N2 / (2.0 * C));
    out.corridorBound = 0.5 * std::log((1.0 - L.chi) * t0 / t1) / C;

    const double tMax = opt.topFactor * build.levels.back().b;
    out.tMax = tMax;
    GridSpec g = opt.grid;
    if (!g.window.valid()) g.window = Rect{-0.5 * tMax, -build.levels.front().R, 0.5 * tMax, tMax};
    const GeodesicResult geo = approx_geodesic(eng, Point(0, 0), Point(0, tMax), g);
    out.cert = geo.cert;
    out.gamma = resample_curve(omega, geo.curve, opt.resampleStep);

    const auto& boxes = eng.boxes();
    std::vector<Crossing> allCross = trajectory_crossings(out.gamma, Point(0, 0), boxes);
    int lastSide = 0;
    out.sidesAlternate = true;
    for (const auto& lv : build.levels) {
        int idx = -1;
        const GoodBox* B = detail::find_box(boxes, lv.leftX, lv.rightX, &idx);
        CorridorRecord rec;
        rec.j = lv.j;
        rec.expectedSide = lv.j % 2 == 0 ? 1 : -1;
        if (B) {
            rec = detail::locate_corridor(out.gamma, *B, L.chi, L.N, L.N1);
            rec.j = lv.j;
            rec.expectedSide = lv.j % 2 == 0 ? 1 : -1;
            rec.box = idx;
        }
        if (!rec.found || rec.side != rec.expectedSide || (lastSide != 0 && rec.side == lastSide)) out.sidesAlternate = false;
        if (rec.found) lastSide = rec.side;
        out.levels.push_back(rec);
    }
    if (std::none_of(out.levels.begin(), out.levels.end(), [](const auto& r) { return r.found; }))
        throw Error(ErrorKind::CorridorNotFound, "approximate geodesic never runs along a box bisectrix");

    // crossings between consecutive corridors found on opposite sides
    for (std::size_t k = 1; k < out.levels.size(); ++k) {
        const auto &a = out.levels[k - 1], &b = out.levels[k];
        if (!a.found || !b.found || a.side == b.side) continue;
        for (const auto& c : allCross)
            if (c.t > a.y && c.t < b.y) {
                out.crossings.push_back(c);
                break;
            }
    }

    const SetDistanceOracle oracle(eng, out.gamma);
    bool allPass = true;
    for (const auto& rec : out.levels) {
        if (rec.j % 2 != 0) continue;
        LevelCertificate lc;
        lc.j = rec.j;
        if (!rec.found) {
            allPass = false;
            out.certificates.push_back(lc);
            continue;
        }
        lc.y = rec.y;
        const SetDistance sd = oracle.query(Point(0, rec.y), opt.budget, out.betaFinal / 20.0);
        lc.lo = sd.bounds.lo;
        lc.hi = sd.bounds.hi;
        lc.sampleMin = sd.sampleMin;
        lc.slack = sd.slack;
        lc.passed = lc.lo >= out.betaFinal - lc.slack && lc.slack < 0.5 * out.betaFinal;
        if (lc.slack >= 0.5 * out.betaFinal)
            throw Error(ErrorKind::MarginTooTight, "numerical slack exceeds half the target bound at level " + std::to_string(rec.j));
        allPass = allPass && lc.passed;
        out.certificates.push_back(lc);
    }
    const bool haveEven = !out.certificates.empty();
    if (out.sidesAlternate && out.crossings.size() >= 2 && allPass && haveEven) out.verdict = Verdict::OscillationCertified;
    out.note = "crossing times are located by continuity of the approximate geodesic";
    return out;
}

struct TangentialLevel {
    int j = 0;
    CorridorRecord corridor;
    double y = 0;
    double lo = 0, slack = 0, hi = 0;
    double modelBound = 0;  // min((1/C)(1/2)log((1-chi)R/(2a)), pi N2_j/(2C))
    double paperBound = 0;  // same with (chi R + 2a)/(2a) in the logarithm
};

struct TangentialReport {
    std::vector<TangentialLevel> levels;
    bool zAlphaContained = false;
    std::size_t zAlphaSamples = 0, zAlphaFailures = 0;
    bool strictlyIncreasing = false, finalDoubles = false;
    QGCertificate cert;
    Curve gamma;
    double tMax = 0;
    Verdict verdict = Verdict::Inconclusive;
};

/// n random points of Z_alpha below height ymax, all checked for membership.
/// Every other draw sits exactly on a slit abscissa, where a violation would show.
inline std::pair<std::size_t, std::size_t> sample_parabola(const SlitDomain& omega, double alpha, double ymax, std::size_t n,
                                                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto& s = omega.slits();
    auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + U(rng) * (std::log(hi) - std::log(lo))); };
    std::size_t bad = 0, used = 0;
    for (std::size_t draw = 0; used < n && draw < 100 * n; ++draw) {
        Point z;
        if (draw % 2 == 1) {
            const auto& sl = s[std::min(s.size() - 1, static_cast<std::size_t>(U(rng) * s.size()))];
            const double floor = std::max(std::pow(std::abs(sl.x), alpha), 1e-3);
            if (!(floor < ymax)) continue;
            z = Point(sl.x, log_uniform(floor, ymax));
        } else {
            const double y = log_uniform(1e-3, ymax);
            z = Point((2 * U(rng) - 1) * std::pow(y, 1.0 / alpha), y);
        }
        if (!(std::pow(std::abs(z.real()), alpha) < z.imag())) continue;
        ++used;
        if (!omega.contains(z)) ++bad;
    }
    return {used, bad};
}

inline TangentialReport tangential_experiment(const DistanceEngine& eng, const ParabolicReport& build, const ExperimentOptions& opt = {},
                                              std::uint64_t seed = 20240601) {
    if (!eng.ledger()) throw Error(ErrorKind::ConfigError, "tangential experiment needs a ledger");
    if (build.levels.size() < 5) throw Error(ErrorKind::ConfigError, "tangential experiment needs at least four levels");
    const SlitDomain& omega = eng.omega();
    TangentialReport out;
    out.zAlphaContained = build.zAlphaContained;
    std::tie(out.zAlphaSamples, out.zAlphaFailures) = sample_parabola(omega, build.alpha, build.levels.back().b, 1000, seed);
    if (!out.zAlphaContained || out.zAlphaFailures > 0) throw Error(ErrorKind::ConstraintViolation, "parabola region not contained");

    // Gamma is truncated above the predicted top corridor; the top channel
    // is far too tall to mesh all the way to b_J.
    const LevelInfo& top = build.levels.back();
    const GoodBox* BJ = detail::find_box(eng.boxes(), top.leftX, top.rightX);
    if (!BJ) throw Error(ErrorKind::CorridorNotFound, "no good box for the top level");
    const double tMax = opt.topFactor * (BJ->reported_bottom() + build.ledgers.back().N1 * top.R);
    out.tMax = tMax;
    GridSpec g = opt.grid;
    const Point w0(0, 1);
    if (!g.window.valid()) g.window = Rect{-0.5 * tMax, 0.5, 0.5 * tMax, tMax};
    const GeodesicResult geo = approx_geodesic(eng, w0, Point(0, tMax), g);
    out.cert = geo.cert;
    out.gamma = resample_curve(omega, geo.curve, opt.resampleStep);
    const SetDistanceOracle oracle(eng, out.gamma);

    for (std::size_t j = 1; j < build.levels.size(); ++j) {
        const LevelInfo& lv = build.levels[j];
        const ConstantsLedger& Lj = build.ledgers[j];
        const double C = Lj.Cbig;
        TangentialLevel tl;
        tl.j = lv.j;
        tl.modelBound = std::min(0.5 * std::log((1 - Lj.chi) * lv.R / (2 * lv.a)) / C, kPi * Lj.N2 / (2 * C));
        tl.paperBound = std::min(0.5 * std::log((Lj.chi * lv.R + 2 * lv.a) / (2 * lv.a)) / C, kPi * Lj.N2 / (2 * C));
        int idx = -1;
        const GoodBox* B = detail::find_box(eng.boxes(), lv.leftX, lv.rightX, &idx);
        if (B) {
            tl.corridor = detail::locate_corridor(out.gamma, *B, Lj.chi, Lj.N, Lj.N1);
            tl.corridor.j = lv.j;
            tl.corridor.box = idx;
        }
        if (tl.corridor.found) {
            tl.y = tl.corridor.y;
            const SetDistance sd = oracle.query(Point(0, tl.y), opt.budget, 0.01);
            tl.lo = sd.bounds.lo;
            tl.hi = sd.bounds.hi;
            tl.slack = sd.slack;
        }
        out.levels.push_back(tl);
    }
    out.strictlyIncreasing = true;
    for (std::size_t k = 0; k < out.levels.size(); ++k) {
        if (!out.levels[k].corridor.found) out.strictlyIncreasing = false;
        if (k > 0 && !(out.levels[k].lo > out.levels[k - 1].lo)) out.strictlyIncreasing = false;
    }
    out.finalDoubles = !out.levels.empty() && out.levels.back().lo >= 2.0 * out.levels.front().lo && out.levels.front().lo > 0;
    if (out.strictlyIncreasing && out.finalDoubles) out.verdict = Verdict::TangentialEvidence;
    return out;
}

}  // namespace hypslit
