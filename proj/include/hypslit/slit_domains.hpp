#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hypslit/calibration.hpp"
#include "hypslit/model_domains.hpp"

namespace hypslit {

/// {Re z = x, Im z <= top}
struct DownwardSlit {
    double x = 0;
    double top = 0;
};

/// The plane minus finitely many downward vertical slits, kept sorted by x.
class SlitDomain {
public:
    SlitDomain() = default;
    explicit SlitDomain(std::vector<DownwardSlit> slits) : slits_(std::move(slits)) {
        if (slits_.empty()) throw Error(ErrorKind::DomainInvalid, "a slit domain needs at least one slit");
        for (const auto& s : slits_)
            if (!std::isfinite(s.x) || !std::isfinite(s.top)) throw Error(ErrorKind::DomainInvalid, "slit data must be finite");
        std::sort(slits_.begin(), slits_.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
        for (std::size_t i = 1; i < slits_.size(); ++i)
            if (slits_[i].x == slits_[i - 1].x) throw Error(ErrorKind::DomainInvalid, "slit abscissas must be distinct");
    }

    const std::vector<DownwardSlit>& slits() const { return slits_; }
    std::size_t size() const { return slits_.size(); }

    bool contains(Point z) const {
        if (!finite(z)) return false;
        for (const auto& s : slits_)
            if (z.real() == s.x && z.imag() <= s.top) return false;
        return true;
    }

    // Every vertical translate upward stays inside, whatever the slits are.
    bool starlike_at_infinity() const { return true; }

    double max_top() const {
        double m = -kInf;
        for (const auto& s : slits_) m = std::max(m, s.top);
        return m;
    }

private:
    std::vector<DownwardSlit> slits_;
};

inline double slit_distance(const DownwardSlit& s, Point z) {
    if (z.imag() <= s.top) return std::abs(z.real() - s.x);
    return std::abs(z - Point(s.x, s.top));
}

/// Unchecked variant used on hot paths; zero on the boundary.
inline double boundary_distance_raw(const SlitDomain& omega, Point z) {
    double d = kInf;
    for (const auto& s : omega.slits()) d = std::min(d, slit_distance(s, z));
    return d;
}

inline double boundary_distance(const SlitDomain& omega, Point z) {
    if (!omega.contains(z)) throw Error(ErrorKind::PointOutsideDomain, "point lies on a slit");
    return boundary_distance_raw(omega, z);
}

/// True when the closed segment [p, q] meets some slit.
inline bool segment_hits_slit(const SlitDomain& omega, Point p, Point q) {
    const double x0 = std::min(p.real(), q.real()), x1 = std::max(p.real(), q.real());
    for (const auto& s : omega.slits()) {
        if (s.x < x0 || s.x > x1) continue;
        if (x0 == x1) {
            if (std::min(p.imag(), q.imag()) <= s.top) return true;
            continue;
        }
        const double t = (s.x - p.real()) / (q.real() - p.real());
        const double y = p.imag() + t * (q.imag() - p.imag());
        if (y <= s.top) return true;
    }
    return false;
}

inline bool model_contains_slit_domain(const ModelDomain& U, const SlitDomain& omega) {
    // Omega is contained in U iff U's complement lies inside Omega's complement.
    if (const auto* k = std::get_if<Koebe>(&U)) {
        for (const auto& s : omega.slits())
            if (s.x == k->p.real() && s.top >= k->p.imag()) return true;
        return false;
    }
    if (const auto* t = std::get_if<TwoSlit>(&U)) {
        bool left = false, right = false;
        for (const auto& s : omega.slits()) {
            if (s.x == t->a && s.top >= t->b) left = true;
            // a + R is rounded; allow a few ulps of the operands
            const double tol = 4 * std::numeric_limits<double>::epsilon() * (std::abs(t->a) + t->R);
            if (std::abs(s.x - (t->a + t->R)) <= tol && s.top >= t->b) right = true;
        }
        return left && right;
    }
    return false;
}

inline std::vector<ModelDomain> enclosing_models(const SlitDomain& omega) {
    std::vector<ModelDomain> out;
    const auto& s = omega.slits();
    for (const auto& sl : s) out.emplace_back(Koebe{Point(sl.x, sl.top)});
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        out.emplace_back(TwoSlit{s[i].x, std::min(s[i].top, s[i + 1].top), s[i + 1].x - s[i].x});
    return out;
}

/// Smallest M with the semistrip {a < Re < a+R, Im > M} inside omega.
inline double inscribed_semistrip(const SlitDomain& omega, double a, double R) {
    if (!(R > 0) || !std::isfinite(a) || !std::isfinite(R)) throw Error(ErrorKind::EmptyStrip, "strip must have positive finite width");
    double M = -kInf;
    for (const auto& s : omega.slits())
        if (s.x > a && s.x < a + R) M = std::max(M, s.top);
    return M;
}

// ---------------------------------------------------------------- good boxes

struct GoodBox {
    double a = 0, R = 1, M = -kInf, b = 0;
    ConstantsLedger ledger;
    std::size_t left = 0, right = 0;  // slit indices of the walls
    double scanFloor = -kInf;         // reporting floor for open-bottom boxes

    bool open_bottom() const { return !std::isfinite(M); }
    double bottom() const { return open_bottom() ? -kInf : M + R * ledger.E; }
    double reported_bottom() const { return open_bottom() ? scanFloor : bottom(); }
    double top() const { return b - R * ledger.D; }
    double height() const { return top() - bottom(); }
    double bisectrix() const { return a + 0.5 * R; }
    Strip strip() const { return Strip{a, R}; }
    TwoSlit twoslit() const { return TwoSlit{a, b, R}; }

    bool contains(Point z) const {
        return z.real() > a && z.real() < a + R && z.imag() > bottom() && z.imag() < top();
    }
    bool in_column(Point z) const { return z.real() > a && z.real() < a + R; }
};

/// Wall pairs (i, k) whose interior slits all end strictly below both walls.
inline std::vector<std::pair<std::size_t, std::size_t>> slit_wells(const SlitDomain& omega) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const auto& s = omega.slits();
    for (std::size_t i = 0; i < s.size(); ++i) {
        double inner = -kInf;
        for (std::size_t k = i + 1; k < s.size(); ++k) {
            if (inner < std::min(s[i].top, s[k].top)) out.emplace_back(i, k);
            inner = std::max(inner, s[k].top);
            if (inner >= s[i].top) break;
        }
    }
    return out;
}

inline std::vector<GoodBox> detect_good_boxes(const SlitDomain& omega, const ConstantsLedger& ledger,
                                              double scanFloor = -kInf) {
    std::vector<GoodBox> out;
    const auto& s = omega.slits();
    for (auto [i, k] : slit_wells(omega)) {
        GoodBox B;
        B.a = s[i].x;
        B.R = s[k].x - s[i].x;
        B.b = std::min(s[i].top, s[k].top);
        B.M = inscribed_semistrip(omega, B.a, B.R);
        B.ledger = ledger;
        B.left = i;
        B.right = k;
        if (!(B.b - B.M > 2.0 * B.R * ledger.D)) continue;
        B.scanFloor = std::isfinite(scanFloor) ? scanFloor : B.top() - 4.0 * B.R;
        out.push_back(B);
    }
    return out;
}

// ------------------------------------------------------------------ wedges

/// Does the open wedge p + iN + iV(beta, 0) avoid every slit?  Moving down a
/// slit only increases the angle seen from the apex, so the tip decides.
inline bool sector_containment(const SlitDomain& omega, Point p, double beta, double N) {
    if (!(beta > 0 && beta < kPi)) throw Error(ErrorKind::ConfigError, "wedge angle must lie in (0, pi)");
    const Point q = p + Point(0, N);
    const double scale = 1e-12;
    for (const auto& s : omega.slits()) {
        const double dx = std::abs(s.x - q.real());
        const double dy = s.top - q.imag();
        if (dx == 0 && dy <= 0) continue;  // below the apex, which the open wedge excludes
        const double phi = std::atan2(dx, dy);  // angle from the upward vertical
        if (phi < beta * (1.0 - scale)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- builders

struct CombBuildParams {
    int teeth = 4;
    double c = 2.0, E_fraction = 0.5, delta = 0.1, N0 = 8.0;
    double alpha0 = 0, alpha1 = 0;   // 0 selects the automatic choice
    double alpha = 2.0, beta = 0.7;  // parabolic build
    double R0 = 0;                   // 0 selects the automatic choice
    double bGrowthSlack = 1.05;
    double t1Margin = 1.25;          // corridor bound margin for the automatic alpha1
};

struct LevelInfo {
    int j = 0;
    double a = 0, R = 0, b = 0;
    double leftX = 0, rightX = 0;
    double heightOverWidth = 0;  // (b_j - b_{j-1} - R_j (D+E)) / R_j
    double margin = 0;           // | a_j - R_j/2 | - chi R_j / 2
    double Nj = 0;               // parabolic: corridor constant of the level ledger
    bool boxDetected = false;
};

struct OscillatingReport {
    double tan0 = 0, tan1 = 0, growth = 0;
    std::vector<LevelInfo> levels;
    bool aIncreasing = false, rMinusAIncreasing = false, sectorContained = false, allBoxes = false;
    bool allTall = false;
};

struct OscillatingComb {
    SlitDomain omega;
    OscillatingReport report;
    ConstantsLedger ledger;
};

/// Smallest corridor bound (1/2) log((1-chi) tan0 / tan1) we aim for when
/// alpha1 is chosen automatically.
inline double auto_tan1(const ConstantsLedger& L, double tan0, double margin) {
    const double target = margin * kPi * std::max(L.N2, 0.0) / 2.0;
    const double K = std::max(target, 0.5 * std::log(2.0));
    return (1.0 - L.chi) * tan0 * std::exp(-2.0 * K);
}

inline OscillatingComb build_oscillating_comb(const CombBuildParams& P, const ConstantsLedger& L) {
    if (P.teeth < 1) throw Error(ErrorKind::ConfigError, "need at least one tooth");
    if (!(P.bGrowthSlack >= 1)) throw Error(ErrorKind::ConfigError, "bGrowthSlack must be >= 1");
    if (!ledger_violations(L).empty()) throw Error(ErrorKind::ConfigError, "ledger is inconsistent");
    OscillatingComb out;
    out.ledger = L;
    auto& rep = out.report;
    const double cap = std::min(1.0 / (8.0 * L.D), 1.0 / (8.0 * L.N));
    const double t0 = P.alpha0 > 0 ? std::tan(P.alpha0) : cap;
    if (!(t0 > 0 && t0 <= cap * (1 + 1e-15)))
        throw Error(ErrorKind::ConstraintViolation, "tan alpha0 <= min(1/(8D), 1/(8N)) fails");
    const double t1 = P.alpha1 > 0 ? std::tan(P.alpha1) : auto_tan1(L, t0, P.t1Margin);
    if (!(t1 > 0 && t1 < (1.0 - L.chi) * t0))
        throw Error(ErrorKind::ConstraintViolation, "tan alpha1 < (1 - chi) tan alpha0 fails");
    rep.tan0 = t0;
    rep.tan1 = t1;
    const double g = std::max({(2 * t0 - t1) / t1, t1 / (2 * t0 - t1), 4.0});
    rep.growth = P.bGrowthSlack * g;
    if (!(rep.growth > g)) throw Error(ErrorKind::ConstraintViolation, "b_j growth must be strict; raise bGrowthSlack above 1");

    std::vector<DownwardSlit> slits;
    double bprev = 0;
    for (int j = 1; j <= P.teeth; ++j) {
        LevelInfo lv;
        lv.j = j;
        lv.b = j == 1 ? 1.0 : rep.growth * bprev;
        lv.R = 2.0 * lv.b * t0;
        lv.a = (j % 2 == 0) ? lv.b * t1 : lv.b * (2 * t0 - t1);
        lv.leftX = -lv.a;
        lv.rightX = -lv.a + lv.R;
        lv.heightOverWidth = (lv.b - bprev - lv.R * (L.D + L.E)) / lv.R;
        lv.margin = std::abs(lv.a - 0.5 * lv.R) - 0.5 * L.chi * lv.R;
        slits.push_back({lv.leftX, lv.b});
        slits.push_back({lv.rightX, lv.b});
        rep.levels.push_back(lv);
        bprev = lv.b;
    }
    out.omega = SlitDomain(slits);

    rep.aIncreasing = rep.rMinusAIncreasing = true;
    for (std::size_t i = 1; i < rep.levels.size(); ++i) {
        const auto &p = rep.levels[i - 1], &q = rep.levels[i];
        if (!(q.a > p.a)) rep.aIncreasing = false;
        if (!(q.R - q.a > p.R - p.a)) rep.rMinusAIncreasing = false;
    }
    rep.sectorContained = sector_containment(out.omega, Point(0, 0), std::atan(t1), 0.0);
    const auto boxes = detect_good_boxes(out.omega, L);
    rep.allBoxes = rep.allTall = true;
    for (auto& lv : rep.levels) {
        for (const auto& B : boxes)
            if (B.a == lv.leftX && B.a + B.R == lv.rightX) lv.boxDetected = true;
        rep.allBoxes = rep.allBoxes && lv.boxDetected;
        rep.allTall = rep.allTall && lv.heightOverWidth > L.N;
    }
    return out;
}

struct ParabolicReport {
    double alpha = 0, beta = 0;
    std::vector<LevelInfo> levels;  // index 0 is the base level
    std::vector<ConstantsLedger> ledgers;
    bool zAlphaContained = false, ratiosAboveN = false, trajectoryClear = false;
};

struct ParabolicComb {
    SlitDomain omega;
    ParabolicReport report;
};

/// Increasing per-level corridor targets N_j^0 = j * max(N0, 2D), j >= 1.
inline std::vector<ConstantsLedger> parabolic_level_ledgers(const ConstantsLedger& base, int levels) {
    std::vector<ConstantsLedger> out;
    const double step = std::max(base.N0, 2.0 * base.D * 1.01);
    for (int j = 0; j <= levels; ++j) {
        ConstantsLedger L = base;
        L.N0 = std::max(1, j) * step;
        finish_ledger(L);
        out.push_back(L);
    }
    return out;
}

inline ParabolicComb build_parabolic_comb(const CombBuildParams& P, const std::vector<ConstantsLedger>& ledgers) {
    const double al = P.alpha, be = P.beta;
    if (!(al > 1)) throw Error(ErrorKind::ConstraintViolation, "alpha > 1 fails");
    if (!(be > 1.0 / al && be < 1.0)) throw Error(ErrorKind::ConstraintViolation, "beta in (1/alpha, 1) fails");
    if (P.teeth < 1 || ledgers.size() < static_cast<std::size_t>(P.teeth) + 1)
        throw Error(ErrorKind::ConfigError, "need one ledger per level, base level included");
    const double slack = std::max(P.bGrowthSlack, 1.0 + 1e-9);
    double R0 = P.R0 > 0 ? P.R0 : slack * std::pow(2.0, 1.0 / (1.0 - be));
    if (!(std::pow(R0, be - 1.0) < 0.5)) throw Error(ErrorKind::ConstraintViolation, "R0^(beta-1) < 1/2 fails");

    ParabolicComb out;
    auto& rep = out.report;
    rep.alpha = al;
    rep.beta = be;
    rep.ledgers = ledgers;
    std::vector<DownwardSlit> slits;
    double Rprev = 0, bprev = 0;
    for (int j = 0; j <= P.teeth; ++j) {
        const ConstantsLedger& L = ledgers[j];
        LevelInfo lv;
        lv.j = j;
        lv.Nj = L.N;
        if (j == 0) {
            lv.R = R0;
        } else {
            // Smallest admissible width: growth, tall boxes, and a positive gap
            // between the axis and the near edge of the corridor band.
            const double need = std::max({std::pow(Rprev, be * al), std::pow(L.N + 1.0, 1.0 / (al * be - 1.0)),
                                          std::pow(2.0 / (1.0 - L.chi), 1.0 / (1.0 - be))});
            lv.R = slack * need;
            if (!(lv.R > std::pow(Rprev, be * al))) throw Error(ErrorKind::ConstraintViolation, "R_j > R_{j-1}^(beta alpha) fails");
            if (!(std::pow(lv.R, al * be - 1.0) > L.N + 1.0)) throw Error(ErrorKind::ConstraintViolation, "R_j^(alpha beta - 1) > N_j + 1 fails");
        }
        lv.a = std::pow(lv.R, be);
        lv.b = std::pow(lv.a, al);
        lv.leftX = -lv.a;
        lv.rightX = -lv.a + lv.R;
        lv.heightOverWidth = (lv.b - bprev) / lv.R;
        lv.margin = 0.5 * (1.0 - L.chi) * lv.R - lv.a;
        slits.push_back({lv.leftX, lv.b});
        slits.push_back({lv.rightX, lv.b});
        rep.levels.push_back(lv);
        Rprev = lv.R;
        bprev = lv.b;
    }
    out.omega = SlitDomain(slits);

    // Z_alpha = {|Re z|^alpha < Im z}: a slit meets it iff |x|^alpha < top.
    rep.zAlphaContained = true;
    for (const auto& s : out.omega.slits())
        if (std::pow(std::abs(s.x), al) < s.top) rep.zAlphaContained = false;
    rep.ratiosAboveN = rep.trajectoryClear = true;
    for (std::size_t j = 1; j < rep.levels.size(); ++j) {
        if (!(rep.levels[j].heightOverWidth > rep.levels[j].Nj)) rep.ratiosAboveN = false;
        if (!(rep.levels[j].margin > 0)) rep.trajectoryClear = false;
    }
    return out;
}

}  // namespace hypslit
