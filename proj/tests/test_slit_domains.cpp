#include <gtest/gtest.h>

#include "hypslit/slit_domains.hpp"
#include "oracles.hpp"

using namespace hypslit;

namespace {

const ConstantsLedger& ledger() {
    static const ConstantsLedger L = build_ledger(2, 0.5, 0.1, 8);
    return L;
}

OscillatingComb comb(int teeth) {
    CombBuildParams P;
    P.teeth = teeth;
    return build_oscillating_comb(P, ledger());
}

double brute_boundary_distance(const SlitDomain& omega, Point z) {
    double best = kInf;
    for (const auto& s : omega.slits()) {
        best = std::min(best, std::abs(z - Point(s.x, s.top)));
        const double hi = std::min(s.top, z.imag() + 10), lo = z.imag() - 10;
        for (int k = 0; k <= 25000 && lo < hi; ++k) best = std::min(best, std::abs(z - Point(s.x, lo + (hi - lo) * k / 25000.0)));
    }
    return best;
}

}  // namespace

TEST(SlitDomain, Basics) {
    EXPECT_THROW(SlitDomain(std::vector<DownwardSlit>{}), Error);
    EXPECT_THROW(SlitDomain({{0, 1}, {0, 2}}), Error);
    const SlitDomain o({{2, 0}, {-1, 3}});
    EXPECT_EQ(o.slits().front().x, -1);
    EXPECT_FALSE(o.contains(Point(2, -5)));
    EXPECT_TRUE(o.contains(Point(2, 0.1)));
    EXPECT_TRUE(o.starlike_at_infinity());
}

TEST(BoundaryDistance, Examples) {
    const SlitDomain o({{0, 0}});
    EXPECT_DOUBLE_EQ(boundary_distance(o, Point(1, 1)), std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(boundary_distance(o, Point(1, -1)), 1.0);
    EXPECT_DOUBLE_EQ(boundary_distance(o, Point(0, 3)), 3.0);
    EXPECT_THROW(boundary_distance(o, Point(0, -1)), Error);
}

TEST(BoundaryDistance, MatchesSampledBoundary) {
    const auto c = comb(2);
    const double b1 = c.report.levels[0].b, b2 = c.report.levels[1].b;
    const Point z(0, 0.5 * (b1 + b2));
    EXPECT_NEAR(boundary_distance(c.omega, z), brute_boundary_distance(c.omega, z), 1e-6);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> x(-2 * c.report.levels[1].R, 2 * c.report.levels[1].R), y(-1, 2 * b2);
    for (int i = 0; i < 30; ++i) {
        const Point w(x(rng), y(rng));
        EXPECT_NEAR(boundary_distance(c.omega, w), brute_boundary_distance(c.omega, w), 1e-6);
    }
}

TEST(BoundaryDistance, Lipschitz) {
    const auto c = comb(3);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> x(-30, 30), y(-10, 60);
    for (int i = 0; i < 1000; ++i) {
        const Point z(x(rng), y(rng)), w(x(rng), y(rng));
        EXPECT_LE(std::abs(boundary_distance_raw(c.omega, z) - boundary_distance_raw(c.omega, w)), std::abs(z - w) + 1e-12);
    }
}

TEST(EnclosingModels, Counts) {
    const SlitDomain one({{1, 2}});
    const auto m1 = enclosing_models(one);
    ASSERT_EQ(m1.size(), 1u);
    EXPECT_EQ(std::get<Koebe>(m1[0]).p, Point(1, 2));
    const SlitDomain two({{0, 0}, {1, 0}});
    bool self = false;
    for (const auto& m : enclosing_models(two))
        if (const auto* t = std::get_if<TwoSlit>(&m)) self = self || (t->a == 0 && t->b == 0 && t->R == 1);
    EXPECT_TRUE(self);
    const auto c = comb(3);
    const auto ms = enclosing_models(c.omega);
    int koebe = 0, twoslit = 0;
    for (const auto& m : ms) (std::holds_alternative<Koebe>(m) ? koebe : twoslit)++;
    EXPECT_EQ(koebe, 6);
    EXPECT_EQ(twoslit, 5);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> x(-40, 40), y(-20, 100);
    for (const auto& m : ms) {
        EXPECT_TRUE(model_contains_slit_domain(m, c.omega));
        for (int i = 0; i < 1000; ++i) {
            Point z(x(rng), y(rng));
            if (i % 4 == 0) z = Point(c.omega.slits()[i % 6].x, c.omega.slits()[i % 6].top + 1e-9 + y(rng));
            if (c.omega.contains(z)) EXPECT_TRUE(contains(m, z)) << model_name(m) << " " << z;
        }
    }
}

TEST(InscribedSemistrip, Examples) {
    const SlitDomain o({{0, 0}, {1, 5}, {3, 2}});
    EXPECT_EQ(inscribed_semistrip(o, 3.5, 1), -kInf);
    EXPECT_EQ(inscribed_semistrip(o, 0.5, 1), 5);
    EXPECT_EQ(inscribed_semistrip(o, -1, 5), 5);
    EXPECT_THROW(inscribed_semistrip(o, 0, 0), Error);
    const auto c = comb(4);
    for (std::size_t j = 1; j < c.report.levels.size(); ++j) {
        const auto& lv = c.report.levels[j];
        const double M = inscribed_semistrip(c.omega, lv.leftX, lv.R);
        double scan = -kInf;
        for (const auto& s : c.omega.slits())
            if (s.x > lv.leftX && s.x < lv.rightX) scan = std::max(scan, s.top);
        EXPECT_EQ(M, scan);
        EXPECT_LE(M, c.report.levels[j - 1].b);
    }
}

TEST(GoodBoxes, OneBoxPerToothLevel) {
    const auto c = comb(4);
    const auto boxes = detect_good_boxes(c.omega, ledger());
    for (const auto& lv : c.report.levels) {
        int n = 0;
        for (const auto& B : boxes) n += (B.a == lv.leftX && B.a + B.R == lv.rightX);
        EXPECT_EQ(n, 1) << "level " << lv.j;
        EXPECT_TRUE(lv.boxDetected);
    }
    const auto& L = ledger();
    for (const auto& B : boxes) {
        EXPECT_GT(B.b - B.M, 2 * B.R * L.D);
        EXPECT_LE(inscribed_semistrip(c.omega, B.a, B.R), B.M);
    }
}

TEST(GoodBoxes, MetricComparisonInsideBoxes) {
    const auto c = comb(4);
    const auto& L = ledger();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0, 1);
    for (const auto& B : detect_good_boxes(c.omega, L)) {
        const double lo = B.reported_bottom(), hi = B.top();
        for (int i = 0; i < 100; ++i) {
            const Point z(B.a + B.R * (0.001 + 0.998 * U(rng)), lo + (hi - lo) * U(rng));
            EXPECT_LE(oracle::density(B.strip(), z), L.c * oracle::density(B.twoslit(), z) * (1 + 1e-9)) << z;
        }
    }
}

TEST(GoodBoxes, RejectionAndOpenBottoms) {
    ConstantsLedger L = ledger();
    const SlitDomain single({{0, 0}});
    EXPECT_TRUE(detect_good_boxes(single, L).empty());
    // the outer well has an inner slit too high for b - M > 2 R D
    const SlitDomain o({{0, 0}, {0.5, -0.2}, {1, 0}});
    const auto boxes = detect_good_boxes(o, L);
    for (const auto& B : boxes) {
        EXPECT_FALSE(B.a == 0 && B.R == 1);
        EXPECT_TRUE(B.open_bottom());
        EXPECT_TRUE(std::isfinite(B.reported_bottom()));
    }
    EXPECT_EQ(boxes.size(), 2u);
}

TEST(SectorContainment, Examples) {
    const SlitDomain k({{0, 0}});
    EXPECT_TRUE(sector_containment(k, 0, kPi / 2, 0));
    const auto c = comb(4);
    EXPECT_TRUE(sector_containment(c.omega, 0, std::atan(c.report.tan1), 0));
    // wedge with apex below a nearby tip clips it, raising the apex frees it
    const SlitDomain t({{1, 1}});
    const double beta = std::atan(1.0) + 1e-6;
    EXPECT_FALSE(sector_containment(t, 0, beta, 0));
    EXPECT_TRUE(sector_containment(t, 0, beta, 1.1));
    EXPECT_THROW(sector_containment(t, 0, 0, 0), Error);
}

TEST(OscillatingComb, ReportFlags) {
    const auto c = comb(4);
    const auto& r = c.report;
    EXPECT_TRUE(r.sectorContained);
    EXPECT_TRUE(r.aIncreasing);
    EXPECT_TRUE(r.rMinusAIncreasing);
    EXPECT_TRUE(r.allBoxes);
    EXPECT_TRUE(r.allTall);
    EXPECT_EQ(c.omega.size(), 8u);
    const auto& L = ledger();
    EXPECT_LE(r.tan0, std::min(1 / (8 * L.D), 1 / (8 * L.N)) * (1 + 1e-15));
    EXPECT_LT(r.tan1, (1 - L.chi) * r.tan0);
    for (const auto& lv : r.levels) {
        EXPECT_GT(lv.heightOverWidth, L.N);
        const double lhs = std::abs(lv.a - 0.5 * lv.R) - 0.5 * L.chi * lv.R;
        EXPECT_NEAR(lhs, lv.b * ((1 - L.chi) * r.tan0 - r.tan1), 1e-9 * lv.b);
        EXPECT_GT(lhs, 0);
        EXPECT_NEAR(lv.R, 2 * lv.b * r.tan0, 1e-12 * lv.R);
        // bisectrix sits on the side (-1)^j
        EXPECT_GT((lv.rightX + lv.leftX) * (lv.j % 2 ? -1 : 1), 0);
    }
}

TEST(OscillatingComb, ConstraintViolations) {
    CombBuildParams P;
    P.alpha0 = 1.0;
    EXPECT_THROW(build_oscillating_comb(P, ledger()), Error);
    CombBuildParams Q;
    Q.alpha0 = 0.01;
    Q.alpha1 = 0.01;
    try {
        build_oscillating_comb(Q, ledger());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConstraintViolation);
    }
}

TEST(ParabolicComb, ReportAndParabola) {
    CombBuildParams P;
    P.alpha = 2;
    P.beta = 0.7;
    const auto Ls = parabolic_level_ledgers(ledger(), 4);
    for (std::size_t j = 1; j < Ls.size(); ++j) {
        EXPECT_GT(Ls[j].N0, Ls[j - 1].N0 * (j == 1 ? 0.99 : 1.0));
        EXPECT_TRUE(ledger_violations(Ls[j]).empty());
    }
    const auto pc = build_parabolic_comb(P, Ls);
    EXPECT_TRUE(pc.report.zAlphaContained);
    EXPECT_TRUE(pc.report.ratiosAboveN);
    for (std::size_t j = 1; j < pc.report.levels.size(); ++j) {
        const auto &lv = pc.report.levels[j], &pv = pc.report.levels[j - 1];
        EXPECT_GT((lv.b - pv.b) / lv.R, lv.Nj);
        EXPECT_NEAR(lv.a, std::pow(lv.R, 0.7), 1e-9 * lv.a);
        EXPECT_GT(lv.R, std::pow(pv.R, 1.4));
    }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    const double ymax = pc.report.levels.back().b;
    int inside = 0;
    for (int i = 0; i < 1000; ++i) {
        Point z;
        if (i % 2) {
            const auto& s = pc.omega.slits()[i % pc.omega.size()];
            z = Point(s.x, s.x * s.x * (1 + 1e-12) + U(rng) * ymax);
        } else {
            const double y = ymax * U(rng);
            z = Point((2 * U(rng) - 1) * std::sqrt(y), y);
        }
        if (!(z.real() * z.real() < z.imag())) continue;
        ++inside;
        EXPECT_TRUE(pc.omega.contains(z)) << z;
    }
    EXPECT_GT(inside, 900);
    CombBuildParams bad = P;
    bad.beta = 0.4;
    EXPECT_THROW(build_parabolic_comb(bad, Ls), Error);
}
