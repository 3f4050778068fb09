#include <doctest.h>

#include <cmath>

#include "glots/geom.hpp"
#include "glots/rng.hpp"

using namespace glots;

namespace {

constexpr double kPi = 3.14159265358979323846;

Polygon4 square(double x0, double y0, double side) {
    return {{{{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}}}};
}

RotatedBox random_box(Rng& rng) {
    RotatedBox b;
    b.cx = rng.uniform(-100.0, 100.0);
    b.cy = rng.uniform(-100.0, 100.0);
    b.w = rng.uniform(2.0, 60.0);
    b.h = rng.uniform(1.0, b.w);
    b.theta = rng.uniform(-kPi / 2, kPi / 2);
    return canonicalize(b);
}

// independent oracle: principal sqrt of a symmetric PSD 2x2 matrix via
// explicit eigendecomposition (rotation angle form)
void sqrt_eig_oracle(double xx, double xy, double yy, double& rxx, double& rxy, double& ryy) {
    const double ang = 0.5 * std::atan2(2.0 * xy, xx - yy);
    const double c = std::cos(ang), s = std::sin(ang);
    const double l1 = c * c * xx + 2 * c * s * xy + s * s * yy;
    const double l2 = s * s * xx - 2 * c * s * xy + c * c * yy;
    const double q1 = std::sqrt(std::max(l1, 0.0)), q2 = std::sqrt(std::max(l2, 0.0));
    rxx = q1 * c * c + q2 * s * s;
    rxy = (q1 - q2) * c * s;
    ryy = q1 * s * s + q2 * c * c;
}

double wasserstein_oracle(const Gaussian2& g1, const Gaussian2& g2) {
    const double dx = g1.mx - g2.mx, dy = g1.my - g2.my;
    double hxx, hxy, hyy;
    sqrt_eig_oracle(g1.sxx, g1.sxy, g1.syy, hxx, hxy, hyy);
    const double txx = hxx * g2.sxx + hxy * g2.sxy;
    const double txy = hxx * g2.sxy + hxy * g2.syy;
    const double tyx = hxy * g2.sxx + hyy * g2.sxy;
    const double tyy = hxy * g2.sxy + hyy * g2.syy;
    const double axx = txx * hxx + txy * hxy;
    const double axy = txx * hxy + txy * hyy;
    const double ayy = tyx * hxy + tyy * hyy;
    double qxx, qxy, qyy;
    sqrt_eig_oracle(axx, axy, ayy, qxx, qxy, qyy);
    const double d2 = dx * dx + dy * dy + g1.sxx + g1.syy + g2.sxx + g2.syy - 2.0 * (qxx + qyy);
    return std::sqrt(std::max(d2, 0.0));
}

// brute-force oracle: best enclosing rectangle over 360 sampled angles
double min_area_sweep(const Polygon4& poly) {
    double best = 1e300;
    for (int k = 0; k < 360; ++k) {
        const double ang = k * kPi / 360.0;
        const double c = std::cos(ang), s = std::sin(ang);
        double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
        for (const Point& p : poly.v) {
            const double rx = c * p.x + s * p.y;
            const double ry = -s * p.x + c * p.y;
            minx = std::min(minx, rx);
            maxx = std::max(maxx, rx);
            miny = std::min(miny, ry);
            maxy = std::max(maxy, ry);
        }
        best = std::min(best, (maxx - minx) * (maxy - miny));
    }
    return best;
}

}  // namespace

TEST_CASE("min_area_rotated_box: axis-aligned unit square") {
    const RotatedBox b = min_area_rotated_box(square(0, 0, 1));
    CHECK(b.cx == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(b.cy == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(b.w == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.h == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::fabs(b.theta) < 1e-9);
}

TEST_CASE("min_area_rotated_box: square rotated 30 degrees") {
    RotatedBox in;
    in.cx = 0.5;
    in.cy = 0.5;
    in.w = 1;
    in.h = 1;
    in.theta = kPi / 6;
    const RotatedBox b = min_area_rotated_box(box_to_polygon(in));
    CHECK(b.cx == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(b.cy == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(b.w == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.h == doctest::Approx(1.0).epsilon(1e-9));
    // square ties canonicalize theta into [-pi/4, pi/4)
    CHECK(b.theta == doctest::Approx(kPi / 6).epsilon(1e-9));
}

TEST_CASE("min_area_rotated_box: degenerate polygon") {
    Polygon4 flat{{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}}};
    CHECK_THROWS_AS(min_area_rotated_box(flat), DegenerateGeometry);
}

TEST_CASE("min_area_rotated_box: never beats the angle-sweep oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        // random convex quad from a random box's corners, mildly perturbed outward
        const RotatedBox b = random_box(rng);
        Polygon4 p = box_to_polygon(b);
        const RotatedBox r = min_area_rotated_box(p);
        const double area = r.w * r.h;
        const double oracle = min_area_sweep(p);
        CHECK(area <= oracle + 1e-6 * std::max(1.0, oracle));
        // result contains all vertices
        const double c = std::cos(r.theta), s = std::sin(r.theta);
        for (const Point& v : p.v) {
            const double lx = c * (v.x - r.cx) + s * (v.y - r.cy);
            const double ly = -s * (v.x - r.cx) + c * (v.y - r.cy);
            CHECK(std::fabs(lx) <= r.w / 2 + 1e-6);
            CHECK(std::fabs(ly) <= r.h / 2 + 1e-6);
        }
    }
}

TEST_CASE("box round-trips through its corner polygon") {
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const RotatedBox b = random_box(rng);
        const RotatedBox r = min_area_rotated_box(box_to_polygon(b));
        CHECK(r.cx == doctest::Approx(b.cx).epsilon(1e-6));
        CHECK(r.cy == doctest::Approx(b.cy).epsilon(1e-6));
        CHECK(r.w == doctest::Approx(b.w).epsilon(1e-6));
        CHECK(r.h == doctest::Approx(b.h).epsilon(1e-6));
    }
}

TEST_CASE("box_to_gaussian paper variant") {
    RotatedBox b;
    b.w = 2;
    b.h = 2;
    Gaussian2 g = box_to_gaussian(b);
    CHECK(g.sxx == doctest::Approx(1.0));
    CHECK(g.syy == doctest::Approx(1.0));
    CHECK(g.sxy == doctest::Approx(0.0));

    b.w = 4;
    b.h = 2;
    g = box_to_gaussian(b);
    CHECK(g.sxx == doctest::Approx(2.0));
    CHECK(g.syy == doctest::Approx(1.0));

    b.theta = kPi / 4;
    g = box_to_gaussian(b);
    CHECK(g.sxx == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(g.sxy == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(g.syy == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("box_to_gaussian squared variant") {
    RotatedBox b;
    b.w = 4;
    b.h = 2;
    const Gaussian2 g = box_to_gaussian(b, GaussianVariant::kSquared);
    CHECK(g.sxx == doctest::Approx(4.0));
    CHECK(g.syy == doctest::Approx(1.0));
}

TEST_CASE("wasserstein_distance basics") {
    Gaussian2 a;
    a.sxx = a.syy = 1.0;
    Gaussian2 b = a;
    CHECK(wasserstein_distance(a, b) == doctest::Approx(0.0).epsilon(1e-12));

    b.mx = 3.0;
    CHECK(wasserstein_distance(a, b) == doctest::Approx(3.0).epsilon(1e-12));

    Gaussian2 c, d;
    c.sxx = 2.0;
    c.syy = 1.0;
    d.sxx = 1.0;
    d.syy = 2.0;
    CHECK(wasserstein_distance(c, d) ==
          doctest::Approx(wasserstein_oracle(c, d)).epsilon(1e-8));
}

TEST_CASE("wasserstein_distance rejects non-PSD covariance") {
    Gaussian2 a;
    a.sxx = a.syy = 1.0;
    Gaussian2 bad;
    bad.sxx = 1.0;
    bad.syy = -1.0;
    CHECK_THROWS_AS(wasserstein_distance(a, bad), DegenerateGeometry);
}

TEST_CASE("wasserstein properties over random pairs") {
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const RotatedBox b1 = random_box(rng), b2 = random_box(rng);
        const Gaussian2 g1 = box_to_gaussian(b1), g2 = box_to_gaussian(b2);
        const double d12 = wasserstein_distance(g1, g2);
        const double d21 = wasserstein_distance(g2, g1);
        CHECK(d12 >= 0.0);
        CHECK(std::fabs(d12 - d21) < 1e-9);
        CHECK(std::fabs(d12 - wasserstein_oracle(g1, g2)) < 1e-8);
        CHECK(wasserstein_distance(g1, g1) < 1e-9);

        // rigid-motion pair invariance
        const double phi = rng.uniform(-kPi, kPi);
        const double tx = rng.uniform(-50, 50), ty = rng.uniform(-50, 50);
        auto moved = [&](const RotatedBox& b) {
            RotatedBox m = b;
            const double c = std::cos(phi), s = std::sin(phi);
            m.cx = c * b.cx - s * b.cy + tx;
            m.cy = s * b.cx + c * b.cy + ty;
            m.theta = b.theta + phi;
            return canonicalize(m);
        };
        const double dm = wasserstein_distance(box_to_gaussian(moved(b1)), box_to_gaussian(moved(b2)));
        CHECK(std::fabs(dm - d12) < 1e-7);
    }
}

TEST_CASE("identical shapes reduce to center distance") {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const RotatedBox b1 = random_box(rng);
        RotatedBox b2 = b1;
        b2.cx += rng.uniform(-40, 40);
        b2.cy += rng.uniform(-40, 40);
        const double d = wasserstein_distance(box_to_gaussian(b1), box_to_gaussian(b2));
        const double center = std::hypot(b1.cx - b2.cx, b1.cy - b2.cy);
        CHECK(std::fabs(d - center) < 1e-9);
    }
}

TEST_CASE("positional_score") {
    RotatedBox b1;
    b1.w = 2;
    b1.h = 2;
    CHECK(positional_score(b1, b1, 1.0) == 1.0);

    RotatedBox b2 = b1;
    b2.cx = 3.0;
    // d = 3, f = Tr(I)^(1/4) = 2^(1/4)
    const double expected = 1.0 - 3.0 / std::pow(2.0, 0.25);
    CHECK(positional_score(b1, b2, 1.0) == doctest::Approx(expected).epsilon(1e-9));

    // disjoint same-shape pair: IoU is 0 but the positional score still ranks
    RotatedBox a;
    a.w = 40;
    a.h = 12;
    RotatedBox b = a;
    b.cx = 60;
    CHECK(polygon_iou(box_to_polygon(a), box_to_polygon(b)) == doctest::Approx(0.0));
    CHECK(positional_score(a, b, 1.0) > 0.0 - 1e12);  // finite
    CHECK(positional_score(a, b, 0.05) > 0.0);        // exceeds the IoU of 0
}

TEST_CASE("positional_score never exceeds 1") {
    Rng rng(33);
    for (int trial = 0; trial < 500; ++trial) {
        const RotatedBox b1 = random_box(rng), b2 = random_box(rng);
        CHECK(positional_score(b1, b2, rng.uniform(0.1, 3.0)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("polygon_iou") {
    CHECK(polygon_iou(square(0, 0, 1), square(0, 0, 1)) == doctest::Approx(1.0));
    CHECK(polygon_iou(square(0, 0, 1), square(5, 5, 1)) == doctest::Approx(0.0));
    CHECK(polygon_iou(square(0, 0, 1), square(0.5, 0, 1)) == doctest::Approx(1.0 / 3).epsilon(1e-9));
    CHECK_THROWS_AS(polygon_iou(square(0, 0, 1), Polygon4{{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}}}),
                    DegenerateGeometry);
}

TEST_CASE("polygon_iou symmetric and bounded") {
    Rng rng(44);
    for (int trial = 0; trial < 300; ++trial) {
        const Polygon4 p1 = box_to_polygon(random_box(rng));
        const Polygon4 p2 = box_to_polygon(random_box(rng));
        const double i12 = polygon_iou(p1, p2);
        const double i21 = polygon_iou(p2, p1);
        CHECK(i12 >= 0.0);
        CHECK(i12 <= 1.0);
        CHECK(i12 == doctest::Approx(i21).epsilon(1e-9));
    }
}

TEST_CASE("sqrt_psd_2x2 agrees with the eigendecomposition oracle") {
    Rng rng(91);
    for (int trial = 0; trial < 500; ++trial) {
        // random PSD: A = L L^T
        const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3), c = rng.uniform(0.01, 3);
        const double xx = a * a + b * b, xy = b * c, yy = c * c;
        double r1, r2, r3, o1, o2, o3;
        sqrt_psd_2x2(xx, xy, yy, r1, r2, r3);
        sqrt_eig_oracle(xx, xy, yy, o1, o2, o3);
        CHECK(r1 == doctest::Approx(o1).epsilon(1e-8));
        CHECK(r2 == doctest::Approx(o2).epsilon(1e-8));
        CHECK(r3 == doctest::Approx(o3).epsilon(1e-8));
    }
}
