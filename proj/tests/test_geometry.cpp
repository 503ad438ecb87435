#include <gtest/gtest.h>

#include <random>

#include "hypslit/geometry.hpp"

using namespace hypslit;

namespace {

// cosh(2k) = 1 + |z-w|^2 / (2 Re z Re w) for curvature -4.
double acosh_form(Point z, Point w) {
    return 0.5 * std::acosh(1.0 + std::norm(z - w) / (2.0 * z.real() * w.real()));
}

template <class F>
double simpson(F&& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

}  // namespace

TEST(HalfPlane, KnownValue) { EXPECT_NEAR(halfplane_distance(1.0, 2.0), 0.5 * std::log(2.0), 1e-15); }

TEST(HalfPlane, AgreesWithAcoshForm) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lx(-6, 6), y(-20, 20);
    for (int i = 0; i < 1000; ++i) {
        const Point z(std::exp(lx(rng)), y(rng)), w(std::exp(lx(rng)), y(rng));
        const double k = acosh_form(z, w);
        EXPECT_NEAR(halfplane_distance(z, w), k, 1e-9 * (1 + k));
    }
}

TEST(HalfPlane, LogFormIsScaleInvariant) {
    const Point L1(3.0, 0.4), L2(-2.0, -1.1);
    const double ref = halfplane_distance(std::exp(L1), std::exp(L2));
    EXPECT_NEAR(halfplane_distance_log(L1, L2), ref, 1e-12);
    EXPECT_NEAR(halfplane_distance_log(L1 + 500.0, L2 + 500.0), ref, 1e-12);
    // far apart: 0.5 gap + boundary terms, vs acosh form after rescaling
    const Point A(0, 0.3), B(800, -0.2);
    const double far = halfplane_distance_log(A, B);
    EXPECT_NEAR(far, 400 - 0.5 * (std::log(std::cos(0.3)) + std::log(std::cos(0.2))), 1e-9);
}

TEST(HalfPlane, DensityIsHomogeneous) {
    EXPECT_DOUBLE_EQ(halfplane_density(2.0, 1.0), 0.25);
    EXPECT_DOUBLE_EQ(halfplane_density(Point(2, 5), Point(0, 3)), 0.75);
}

TEST(HalfPlaneGeodesic, ArcLengthParameterization) {
    const Point a(0.3, -1), b(4, 2.5);
    const HalfPlaneGeodesic g(a, b);
    EXPECT_NEAR(g.total, acosh_form(a, b), 1e-12);
    for (double s : {0.1, 0.5, 1.0, g.total - 0.01}) {
        const Point p = g.at(s);
        EXPECT_NEAR(acosh_form(a, p), s, 1e-9);
        EXPECT_NEAR(acosh_form(p, b), g.total - s, 1e-9);
    }
    EXPECT_EQ(g.at(0), a);
    EXPECT_EQ(g.at(g.total), b);
}

TEST(HalfPlaneGeodesic, HorizontalCase) {
    const HalfPlaneGeodesic g(Point(1, 2), Point(4, 2));
    EXPECT_TRUE(g.horizontal);
    EXPECT_NEAR(std::abs(g.at(0.5 * std::log(2.0)) - Point(2, 2)), 0, 1e-12);
}

TEST(HalfPlane, RayLengthClosedForm) {
    // length of {rho e^{i b}: rho in [r0, r1]} equals log(r1/r0) / (2 cos b)
    for (double b : {0.0, 0.4, 1.2}) {
        const double r0 = 0.5, r1 = 7.0;
        const double len = simpson([&](double r) { return halfplane_density(std::polar(r, b), std::polar(1.0, b)); }, r0, r1);
        EXPECT_NEAR(len, std::log(r1 / r0) / (2 * std::cos(b)), 1e-8);
    }
}

TEST(HalfPlane, AngleDistance) {
    for (double b : {0.1, 0.7, 1.4}) {
        EXPECT_NEAR(halfplane_angle_distance(b), acosh_form(1.0, std::polar(1.0, b)), 1e-12);
        EXPECT_NEAR(halfplane_angle_for_radius(halfplane_angle_distance(b)), b, 1e-12);
    }
}

TEST(HalfPlane, DistanceToRayMatchesBruteMinimum) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(-1.5, 1.5), lr(-3, 3);
    for (int i = 0; i < 200; ++i) {
        const Point u = std::polar(std::exp(lr(rng)), th(rng));
        double brute = kInf;
        for (int k = 0; k <= 6000; ++k) brute = std::min(brute, acosh_form(u, std::exp(-0.5 + 12.0 * k / 6000)));
        EXPECT_NEAR(halfplane_distance_to_ray(u, std::exp(-0.5)), brute, 2e-3);
    }
}

TEST(Errors, KindIsKept) {
    const Error e(ErrorKind::BadOrdering, "x");
    EXPECT_EQ(e.kind(), ErrorKind::BadOrdering);
    EXPECT_NE(std::string(e.what()).find("BadOrdering"), std::string::npos);
}

TEST(HalfPlane, RayComparisons) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> lr(-4, 4), ang(-1.5, 1.5);
    for (int i = 0; i < 500; ++i) {
        const double r0 = std::exp(lr(rng)), r1 = std::exp(lr(rng)), b = ang(rng), b1 = ang(rng);
        // leaving the axis costs at least (1/2) log(1/cos b)
        EXPECT_GE(halfplane_distance(r0, std::polar(r1, b)) - halfplane_distance(r0, r1), 0.5 * std::log(1 / std::cos(b)) - 1e-12);
        // radial projection onto the axis never increases distance
        EXPECT_GE(halfplane_distance(std::polar(r0, b), std::polar(r1, b1)), halfplane_distance(r0, r1) - 1e-12);
        // dilations are isometries
        EXPECT_NEAR(halfplane_distance(std::polar(r0, b), std::polar(r0, b1)), halfplane_distance(std::polar(1.0, b), std::polar(1.0, b1)), 1e-12);
    }
}

TEST(HalfPlane, RadialMinimumAtMatchingModulus) {
    const double r0 = 2.5, a = 0.7, b = -0.4;
    double prev = kInf;
    for (int g = -40; g <= 40; ++g) {
        const double v = halfplane_distance(std::polar(r0 * std::exp(0.1 * g), a), std::polar(r0, b));
        if (g <= 0) EXPECT_LT(v, prev);
        else EXPECT_GT(v, prev);
        prev = v;
    }
}
