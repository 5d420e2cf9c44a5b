#include "revorbit/error.hpp"
#include "revorbit/geometry.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace revorbit;
using namespace revorbit::testing;

TEST(ConstantCurvature, SphereFamily) {
    const auto s = unit_sphere();
    EXPECT_EQ(s->surface_class(), SurfaceClass::Spherical);
    EXPECT_NEAR(s->domain().lo, 0.0, 1e-15);
    EXPECT_NEAR(s->domain().hi, kPi, 1e-15);
    EXPECT_TRUE(s->pole_at_lo());
    EXPECT_TRUE(s->pole_at_hi());
    ASSERT_TRUE(s->b_squared());
    EXPECT_DOUBLE_EQ(*s->b_squared(), 1.0);
    for (double u : s->interior_grid(50)) {
        EXPECT_NEAR(gaussian_curvature(*s, u), 1.0, 1e-12);
        EXPECT_NEAR(h_function(*s, u), 1.0, 1e-14);
    }
}

TEST(ConstantCurvature, PlaneIsParaboloidal) {
    const auto s = plane();
    EXPECT_EQ(s->surface_class(), SurfaceClass::Paraboloidal);
    EXPECT_EQ(s->domain().lo, 0.0);
    EXPECT_EQ(s->domain().hi_kind, EndKind::Infinite);
    EXPECT_DOUBLE_EQ(*s->b_squared(), 1.0);
    EXPECT_EQ(gaussian_curvature(*s, 3.0), 0.0);
}

TEST(ConstantCurvature, BSquaredFormulas) {
    EXPECT_DOUBLE_EQ(*make_constant_curvature(1.0, 0.0, 0.5).b_squared(), 0.25);
    EXPECT_DOUBLE_EQ(*make_constant_curvature(4.0, 0.0, 0.5).b_squared(), 1.0);
    EXPECT_DOUBLE_EQ(*make_constant_curvature(0.0, 0.5, 1.0).b_squared(), 0.25);
    // f = cosh u: h = -cosh² + sinh² = -1 = 4 K C1 C2.
    const Surface catenoid = make_constant_curvature(-1.0, 0.5, 0.5);
    EXPECT_DOUBLE_EQ(*catenoid.b_squared(), -1.0);
    EXPECT_EQ(catenoid.surface_class(), SurfaceClass::Hyperboloidal);
    EXPECT_NEAR(catenoid.domain().hi, std::asinh(1.0), 1e-12);
    EXPECT_NEAR(catenoid.domain().lo, -std::asinh(1.0), 1e-12);
    EXPECT_NEAR(h_function(catenoid, 0.3), -1.0, 1e-14);
}

TEST(ConstantCurvature, SlopeClipping) {
    // f = 2 sin u has |f'| <= 1 only where |cos u| <= 1/2.
    const Surface s = make_constant_curvature(1.0, 0.0, 2.0);
    EXPECT_NEAR(s.domain().lo, kPi / 3, 1e-12);
    EXPECT_NEAR(s.domain().hi, 2 * kPi / 3, 1e-12);
    EXPECT_EQ(s.domain().lo_kind, EndKind::Open);
    EXPECT_FALSE(s.domain().contains(kPi / 3));
}

TEST(ConstantCurvature, Rejections) {
    EXPECT_THROW(make_constant_curvature(0.0, 2.0, 0.0), InvalidSurface);
    EXPECT_THROW(make_constant_curvature(0.0, 0.0, -1.0), InvalidSurface);
    EXPECT_THROW(make_constant_curvature(1.0, 0.0, 0.0), InvalidSurface);
    EXPECT_THROW(make_constant_curvature(-1.0, -1.0, -1.0), InvalidSurface);
}

TEST(Torus, HFunctionAndCurvature) {
    const auto s = torus();
    EXPECT_EQ(s->surface_class(), SurfaceClass::Toroidal);
    EXPECT_FALSE(s->b_squared());
    for (double u : {0.1, 1.0, 2.5, 4.0, 6.0}) {
        // f = 2 + cos u
        EXPECT_NEAR(h_function(*s, u), 1.0 + 2.0 * std::cos(u), 1e-14);
        EXPECT_NEAR(h_derivative(*s, u), -2.0 * std::sin(u), 1e-14);
        EXPECT_NEAR(gaussian_curvature(*s, u), std::cos(u) / (2.0 + std::cos(u)), 1e-14);
    }
    EXPECT_THROW(make_torus(1.0, 2.0), InvalidSurface);
}

TEST(Theta, DerivativeIsInverseSquareOfF) {
    for (const auto& s : {unit_sphere(), half_sphere(), torus(), pseudosphere()}) {
        for (double u : s->interior_grid(7)) {
            const double fd = central([&](double x) { return theta(*s, x); }, u, 1e-5);
            const double f = s->f(u);
            EXPECT_NEAR(fd, 1.0 / (f * f), 1e-6 * (1.0 + fd)) << s->label() << " u=" << u;
        }
    }
}

TEST(Theta, SphereClosedForm) {
    const auto s = unit_sphere();
    EXPECT_NEAR(theta(*s, 1.0), -std::cos(1.0) / std::sin(1.0), 1e-15);
    EXPECT_NEAR(theta(*s, kPi / 2), 0.0, 1e-15);
}

TEST(Theta, InverseRoundTrip) {
    for (const auto& s : {unit_sphere(), plane(), half_sphere(), torus()}) {
        for (double u : s->interior_grid(9)) {
            EXPECT_NEAR(theta_inverse(*s, theta(*s, u)), u, 1e-9 * (1.0 + std::abs(u))) << s->label();
        }
    }
    // Θ = -1/u on the plane never reaches positive values.
    EXPECT_THROW(theta_inverse(*plane(), 0.5), RangeError);
}

TEST(Embedding, SphereHasUnitRadius) {
    const auto s = unit_sphere();
    for (double u : {0.2, 1.0, 2.0, 3.0}) {
        const EmbeddedPoint p = embed(*s, u, 0.7 * u);
        // g(u) = 1 - cos u centres the sphere at z = 1.
        EXPECT_NEAR(std::hypot(p.x, p.y, p.z - 1.0), 1.0, 1e-10);
    }
}

TEST(Embedding, TorusSatisfiesImplicitEquation) {
    const auto s = torus();
    for (double u : {0.3, 1.9, 3.5, 5.9}) {
        const EmbeddedPoint p = embed(*s, u, 1.0);
        const double rho = std::hypot(p.x, p.y);
        EXPECT_NEAR((rho - 2.0) * (rho - 2.0) + p.z * p.z, 1.0, 1e-12);
    }
}

TEST(Embedding, SteepProfileIsNotEmbeddable) {
    const Surface steep(parse_profile("2*u"), Interval{0.1, 1.0}, SurfaceClass::Hyperboloidal, std::nullopt,
                        ThetaSpec{0.5, 0.0}, 0.1, "steep");
    EXPECT_THROW(profile_g(steep, 0.5), NonEmbeddable);
}

TEST(Custom, SinePinsSphere) {
    const Surface s = make_custom("sin(u)", 0.0, kPi);
    EXPECT_EQ(s.surface_class(), SurfaceClass::Spherical);
    ASSERT_TRUE(s.b_squared());
    EXPECT_NEAR(*s.b_squared(), 1.0, 1e-12);
}

TEST(Custom, ClipsAtSlopeBoundary) {
    const Surface s = make_custom("u^2", 0.1, 2.0, {.theta_ref = 0.3});
    EXPECT_NEAR(s.domain().hi, 0.5, 1e-12);
    EXPECT_EQ(s.domain().hi_kind, EndKind::Open);
    EXPECT_EQ(s.domain().lo, 0.1);
    EXPECT_FALSE(s.b_squared());
}

TEST(Custom, PseudosphereIsDegenerate) {
    const auto s = pseudosphere();
    EXPECT_EQ(s->domain().lo_kind, EndKind::Infinite);
    EXPECT_EQ(s->domain().hi, 0.0);
    ASSERT_TRUE(s->b_squared());
    EXPECT_NEAR(*s->b_squared(), 0.0, 1e-15);
    EXPECT_FALSE(s->theta_closed_form());
}

TEST(Custom, Rejections) {
    EXPECT_THROW(make_custom("u-5", 0.0, 1.0), InvalidSurface);
    EXPECT_THROW(make_custom("1", 2.0, 1.0), InvalidSurface);
    EXPECT_THROW(make_custom("1+", 0.0, 1.0), ParseError);
    EXPECT_THROW(make_custom("1", 0.0, 1.0, {.theta_ref = 5.0}), InvalidSurface);
}

TEST(HConstancy, FlagsTorusAndIsSeeded) {
    const auto t = torus();
    const HConstancy a = h_constancy(*t, 512, 512, 1e-9, 3);
    const HConstancy b = h_constancy(*t, 512, 512, 1e-9, 3);
    EXPECT_FALSE(a.constant);
    EXPECT_NEAR(a.spread, 4.0, 1e-3);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_TRUE(h_constancy(*unit_sphere()).constant);
}

TEST(HConstancy, PerturbationDetected) {
    const Surface s = make_custom("sin(u) + 1e-6*sin(u)^3", 0.0, kPi);
    EXPECT_FALSE(h_constancy(s).constant);
}

TEST(Regularity, PolesAndOutsidePoints) {
    const auto s = unit_sphere();
    EXPECT_THROW(s->require_regular(0.0), SingularPoint);
    EXPECT_THROW(s->require_regular(4.0), DomainError);
    EXPECT_NO_THROW(s->require_regular(1.0));
    EXPECT_THROW(theta(*s, 0.0), SingularPoint);
}

TEST(Regularity, GridStaysInside) {
    for (const auto& s : {unit_sphere(), plane(), pseudosphere(), torus()}) {
        for (double u : s->interior_grid(64)) EXPECT_TRUE(s->domain().interior(u)) << s->label();
    }
}

} // namespace
