#include <gtest/gtest.h>

#include <random>

#include "hypslit/distance_engine.hpp"
#include "oracles.hpp"

using namespace hypslit;

namespace {

const ConstantsLedger& ledger() {
    static const ConstantsLedger L = build_ledger(2, 0.5, 0.1, 8);
    return L;
}

// exact distances through the closed-form uniformizations
double k_koebe(double p, Point z, Point w) {
    const Point I(0, 1);
    return oracle::k_halfplane(std::sqrt(-I * (z - p)), std::sqrt(-I * (w - p)));
}

double k_twoslit(const TwoSlit& t, Point z, Point w) {
    const auto a = oracle::twoslit_preimage(t, z), b = oracle::twoslit_preimage(t, w);
    if (!a || !b) return NAN;
    return oracle::k_halfplane(std::exp(0.5 * a->first), std::exp(0.5 * b->first));
}

Point random_point(std::mt19937_64& rng, double x0, double x1, double y0, double y1) {
    std::uniform_real_distribution<double> x(x0, x1), y(y0, y1);
    return Point(x(rng), y(rng));
}

Curve polyline(std::vector<Point> pts) {
    Curve c;
    c.points = std::move(pts);
    for (std::size_t i = 0; i < c.points.size(); ++i) c.params.push_back(double(i));
    return c;
}

Curve segment(Point a, Point b, int n) {
    std::vector<Point> pts;
    for (int i = 0; i <= n; ++i) pts.push_back(a + (b - a) * (double(i) / n));
    return polyline(pts);
}

}  // namespace

TEST(LengthBounds, EnvelopeRatioIsFour) {
    const SlitDomain omega({{0, 0}, {1, 0}});
    const BoundPair b = hyperbolic_length_bounds(omega, segment(Point(0.5, -8), Point(0.5, -5), 4));
    EXPECT_DOUBLE_EQ(b.hi / b.lo, 4.0);
    // on the bisectrix delta = 1/2, so the integral is 2 * length
    EXPECT_NEAR(b.hi, 6.0, 1e-9);
    const BoundPair c = hyperbolic_length_bounds(omega, segment(Point(0.5, -8), Point(0.5, -5), 4), true);
    EXPECT_DOUBLE_EQ(c.hi / c.lo, 2.0);
}

TEST(LengthBounds, ChartLengthInsideInterval) {
    const TwoSlit T{0, 0, 1};
    const SlitDomain omega({{0, 0}, {1, 0}});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0, 2 * kPi), len(0.01, 0.3);
    int done = 0;
    while (done < 100) {
        const Point a = random_point(rng, -1.5, 2.5, -2, 2);
        const Point b = a + std::polar(len(rng), ang(rng));
        if (!omega.contains(a) || !omega.contains(b) || segment_hits_slit(omega, a, b)) continue;
        const double exact = oracle::integrate([&](double t) { return oracle::density(T, a + t * (b - a)); }, 0, 1, 32) * std::abs(b - a);
        const BoundPair bp = hyperbolic_length_bounds(omega, segment(a, b, 1));
        EXPECT_LE(bp.lo, exact * (1 + 1e-9)) << a << " " << b;
        EXPECT_GE(bp.hi, exact * (1 - 1e-9)) << a << " " << b;
        ++done;
    }
}

TEST(LengthBounds, CurveOnSlitThrows) {
    const SlitDomain omega({{0, 0}});
    try {
        hyperbolic_length_bounds(omega, segment(Point(-1, -1), Point(0, -1), 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CurveExitsDomain);
    }
}

TEST(ShortestPath, VerticalLineFarFromSlits) {
    const SlitDomain omega({{0, 0}, {1, 0}});
    const Point z(0.5, 2), w(0.5, 9);
    // delta on x = 1/2 above the tips is the distance to a tip
    const double exact = oracle::integrate([&](double y) { return 1.0 / std::hypot(0.5, y); }, 2, 9, 64);
    const ShortestPath sp = quasihyperbolic_shortest_path(omega, z, w, GridSpec{});
    EXPECT_NEAR(sp.q / exact, 1.0, 0.02);
    EXPECT_GE(sp.q, exact * (1 - 1e-9));
}

TEST(ShortestPath, Symmetric) {
    const SlitDomain omega({{0, 0}, {1, 1}, {2.5, -0.5}});
    std::mt19937_64 rng(5);
    for (int i = 0; i < 6; ++i) {
        const Point z = random_point(rng, -1, 3.5, -3, 2), w = random_point(rng, -1, 3.5, -3, 2);
        GridSpec g;
        g.window = auto_window(omega, z, w);
        EXPECT_EQ(quasihyperbolic_shortest_path(omega, z, w, g).q, quasihyperbolic_shortest_path(omega, w, z, g).q);
    }
}

TEST(ShortestPath, EnvelopeAgainstExactTwoSlit) {
    const TwoSlit T{0, 0, 1};
    const SlitDomain omega({{0, 0}, {1, 0}});
    std::mt19937_64 rng(8);
    for (int i = 0; i < 12; ++i) {
        const Point z = random_point(rng, -1, 2, -3, 2), w = random_point(rng, -1, 2, -3, 2);
        if (!omega.contains(z) || !omega.contains(w)) continue;
        const double k = k_twoslit(T, z, w);
        const ShortestPath sp = quasihyperbolic_shortest_path(omega, z, w, GridSpec{});
        EXPECT_LE(k, sp.q * (1 + 1e-9));
        EXPECT_LE(sp.q, 4 * k * (1 + grid_direction_slack(16)) + 1e-9);
    }
}

TEST(ShortestPath, Errors) {
    const SlitDomain omega({{0, 0}});
    EXPECT_THROW(quasihyperbolic_shortest_path(omega, Point(0, -1), Point(1, 1), GridSpec{}), Error);
    GridSpec g;
    g.connectivity = 6;
    EXPECT_THROW(quasihyperbolic_shortest_path(omega, Point(-1, -1), Point(1, 1), g), Error);
}

TEST(BoundDistance, SoundOnKoebe) {
    const SlitDomain omega({{0.3, 0.7}});
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const Point z = random_point(rng, -4, 4, -4, 4), w = random_point(rng, -4, 4, -4, 4);
        if (!omega.contains(z) || !omega.contains(w)) continue;
        const double k = k_koebe(0.3, z - Point(0, 0.7), w - Point(0, 0.7));
        const BoundPair b = bound_distance(omega, z, w, 0);
        EXPECT_LE(b.lo, k + 1e-9 * (1 + k));
        EXPECT_GE(b.hi, k - 1e-9 * (1 + k));
        EXPECT_NEAR(b.hi - b.lo, 0, 1e-9 * (1 + k));
    }
}

TEST(BoundDistance, SoundOnTwoSlit) {
    const TwoSlit T{-1, 2, 3};
    const SlitDomain omega({{-1, 2}, {2, 2}});
    std::mt19937_64 rng(2);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const Point z = random_point(rng, -4, 5, -6, 5), w = random_point(rng, -4, 5, -6, 5);
        if (!omega.contains(z) || !omega.contains(w)) continue;
        const double k = k_twoslit(T, z, w);
        ASSERT_TRUE(std::isfinite(k));
        const BoundPair b = bound_distance(omega, z, w, 0);
        EXPECT_LE(b.lo, k + 1e-9 * (1 + k)) << z << w;
        EXPECT_GE(b.hi, k - 1e-9 * (1 + k)) << z << w;
        ++checked;
    }
    EXPECT_GT(checked, 900);
}

TEST(BoundDistance, UnequalTopsEnclosedByModels) {
    // the two-slit domain at the lower top contains omega, so its distance is a lower bound
    const SlitDomain omega({{0, 0}, {1, 1}});
    const DistanceEngine eng(omega);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 40; ++i) {
        const Point z = random_point(rng, -1, 2, -3, 2), w = random_point(rng, -1, 2, -3, 2);
        if (!omega.contains(z) || !omega.contains(w)) continue;
        const BoundPair b = eng.bound(z, w, 1);
        EXPECT_LE(b.lo, b.hi);
        EXPECT_GE(b.lo, k_twoslit(TwoSlit{0, 0, 1}, z, w) - 1e-9);
        EXPECT_GE(b.lo, k_koebe(1, z - Point(0, 1), w - Point(0, 1)) - 1e-9);
        EXPECT_GE(b.lo, k_koebe(0, z, w) - 1e-9);
    }
}

TEST(BoundDistance, MonotoneRefinement) {
    const SlitDomain omega({{0, 0}, {1, 1.5}, {2, 0.5}});
    const DistanceEngine eng(omega);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 5; ++i) {
        const Point z = random_point(rng, -0.5, 2.5, -2, 2), w = random_point(rng, -0.5, 2.5, -2, 2);
        if (!omega.contains(z) || !omega.contains(w)) continue;
        BoundPair prev = eng.bound(z, w, 0);
        for (int budget = 1; budget <= 3; ++budget) {
            const BoundPair b = eng.bound(z, w, budget);
            EXPECT_LE(b.hi, prev.hi);
            EXPECT_GE(b.lo, prev.lo);
            EXPECT_LE(b.lo, b.hi);
            prev = b;
        }
        EXPECT_LT(prev.hi, 4.5 * prev.lo);
    }
}

TEST(BoundDistance, GoodBoxSandwich) {
    CombBuildParams P;
    P.teeth = 4;
    const OscillatingComb c = build_oscillating_comb(P, ledger());
    const DistanceEngine eng(c.omega, ledger());
    ASSERT_FALSE(eng.boxes().empty());
    const GoodBox& bx = eng.boxes().front();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.05, 0.95), v(0.05, 0.95);
    const double bottom = bx.open_bottom() ? bx.top() - 4 * bx.R : bx.bottom();
    for (int i = 0; i < 20; ++i) {
        const Point z(bx.a + bx.R * u(rng), bottom + (bx.top() - bottom) * v(rng));
        const Point w(bx.a + bx.R * u(rng), bottom + (bx.top() - bottom) * v(rng));
        const double ks = distance(bx.strip(), z, w);
        const BoundPair b = eng.bound(z, w, 0);
        EXPECT_GE(b.lo, ks / ledger().Cbig * (1 - 1e-12));
        EXPECT_LE(b.hi, ks * ledger().Cbig * (1 + 1e-12));
    }
}

TEST(BoundDistance, WindowMustContainPoints) {
    GridSpec g;
    g.window = Rect{-1, -1, 1, 1};
    const DistanceEngine eng(SlitDomain({{0, 0}, {0.5, 1}}), std::nullopt, g);
    try {
        eng.bound(Point(-0.5, 0.5), Point(3, 0), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
    EXPECT_THROW(eng.bound(Point(0, -1), Point(0.2, 0.2), 0), Error);
}

TEST(ApproxGeodesic, CertificateVerifies) {
    const SlitDomain omega({{0, 0}, {1, 1}, {2, 0}});
    const DistanceEngine eng(omega);
    const GeodesicResult g = approx_geodesic(eng, Point(-0.5, -1), Point(2.5, 2), GridSpec{});
    EXPECT_TRUE(verify_certificate(g.cert));
    EXPECT_LE(g.cert.A, 4.5);
    EXPECT_GE(g.cert.A, 1.0);
    EXPECT_LE(g.cert.maxSlack, 1e-9);
    const std::size_t m = std::min<std::size_t>(g.curve.points.size(), 160);
    EXPECT_EQ(g.cert.checkedPairs, m * (m - 1) / 2);
    for (const auto& p : g.curve.points) EXPECT_TRUE(omega.contains(p));
    for (std::size_t i = 1; i < g.curve.params.size(); ++i) EXPECT_GT(g.curve.params[i], g.curve.params[i - 1]);
    // a tampered pair is caught
    QGCertificate bad = g.cert;
    bad.pairs.front().length = bad.A * bad.pairs.front().klo + bad.B + 1;
    EXPECT_FALSE(verify_certificate(bad));
}

TEST(ApproxGeodesic, ReversedEndpointsGiveReversedCurve) {
    const SlitDomain omega({{0, 0}, {1, 1}});
    const DistanceEngine eng(omega);
    const Point z(-0.5, -1), w(1.5, 2);
    GridSpec g;
    g.window = auto_window(omega, z, w);
    const GeodesicResult a = approx_geodesic(eng, z, w, g), b = approx_geodesic(eng, w, z, g);
    ASSERT_EQ(a.curve.points.size(), b.curve.points.size());
    for (std::size_t i = 0; i < a.curve.points.size(); ++i) EXPECT_EQ(a.curve.points[i], b.curve.points[b.curve.points.size() - 1 - i]);
    EXPECT_EQ(a.curve.points.front(), z);
    EXPECT_EQ(b.curve.points.front(), w);
}

TEST(ApproxGeodesic, FollowsSymmetryAxis) {
    // on the axis of a symmetric model domain the exact geodesic is the axis itself
    const SlitDomain two({{0, 0}, {1, 0}});
    const GeodesicResult a = approx_geodesic(DistanceEngine(two), Point(0.5, -6), Point(0.5, -1), GridSpec{});
    for (const auto& p : a.curve.points) EXPECT_LE(std::abs(p.real() - 0.5), 0.25 * boundary_distance(two, p)) << p;
    const SlitDomain one({{0, 0}});
    const GeodesicResult b = approx_geodesic(DistanceEngine(one), Point(0, 0.5), Point(0, 8), GridSpec{});
    for (const auto& p : b.curve.points) EXPECT_LE(std::abs(p.real()), 0.25 * boundary_distance(one, p)) << p;
}

TEST(ApproxGeodesic, WedgeRayIsQuasiGeodesic) {
    CombBuildParams P;
    P.teeth = 3;
    const OscillatingComb c = build_oscillating_comb(P, ledger());
    const DistanceEngine eng(c.omega, ledger());
    const GeodesicResult g = approx_geodesic(eng, Point(0, 0.5), Point(0, 40), GridSpec{});
    EXPECT_TRUE(verify_certificate(g.cert));
    EXPECT_LE(g.cert.A, 4.5);
}

TEST(SetDistance, PointOnTarget) {
    const SlitDomain omega({{0, 0}, {1, 0}});
    const Curve target = segment(Point(0.5, -5), Point(0.5, -1), 40);
    const BoundPair b = distance_to_set(omega, Point(0.5, -3), target, 0);
    EXPECT_EQ(b.lo, 0.0);
    EXPECT_LE(b.hi, 1e-9);
}

TEST(SetDistance, StripBisectrix) {
    // slits reaching far up: near y = 0 the domain is the strip to machine precision
    const SlitDomain omega({{0, 1e3}, {1, 1e3}});
    const Strip S{0, 1};
    const DistanceEngine eng(omega);
    std::vector<Point> pts;
    for (int i = 0; i <= 400; ++i) pts.push_back(Point(0.5, -10 + 20.0 * i / 400));
    const SetDistanceOracle target(eng, polyline(pts));
    for (double x : {0.05, 0.2, 0.4, 0.7, 0.93}) {
        const Point z(x, 0.3);
        const Point p = orthogonal_projection_strip(S, z);
        const double ref = distance(S, z, p);
        const SetDistance d = target.query(z);
        EXPECT_LE(d.bounds.lo, ref * (1 + 1e-9));
        EXPECT_NEAR(d.bounds.lo / ref, 1.0, 0.01) << x;
        EXPECT_NEAR(d.bounds.hi / ref, 1.0, 0.01) << x;
    }
}

TEST(SetDistance, HalfPlaneRay) {
    // z -> i z^2 maps the quadrant-free chart of one slit to the half-plane ray [1, inf)
    const SlitDomain omega({{0, 0}});
    const DistanceEngine eng(omega);
    std::vector<Point> pts;
    for (int i = 0; i <= 600; ++i) pts.push_back(Point(0, std::exp(12.0 * i / 600)));
    const SetDistanceOracle target(eng, polyline(pts));
    for (double th : {-1.2, -0.6, 0.3, 1.0}) {
        for (double rho : {1.5, 4.0}) {
            // half-plane point rho e^{i th}, pulled back to omega
            const Point u = std::polar(rho, th);
            const Point z = Point(0, 1) * u * u;
            const double ref = oracle::k_halfplane(std::polar(1.0, th), 1.0);
            const SetDistance d = target.query(z);
            EXPECT_NEAR(d.bounds.lo / ref, 1.0, 0.01) << th << " " << rho;
            EXPECT_NEAR(d.bounds.hi / ref, 1.0, 0.01) << th << " " << rho;
        }
    }
}
