#pragma once

#include <array>
#include <cmath>

#include "glots/errors.hpp"

namespace glots {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Quadrilateral text region, vertices in consistent winding order.
struct Polygon4 {
    std::array<Point, 4> v;
};

// (cx, cy, w, h, theta) with w >= h and theta in [-pi/2, pi/2).
struct RotatedBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
    double theta = 0.0;
};

// Gaussian with 2-vector mean and symmetric positive-definite covariance.
struct Gaussian2 {
    double mx = 0.0;
    double my = 0.0;
    // covariance entries: [sxx sxy; sxy syy]
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
};

enum class GaussianVariant {
    kPaper,    // sigma = R diag(w/2, h/2) R^T
    kSquared,  // sigma = R diag((w/2)^2, (h/2)^2) R^T
};

double polygon_area(const Polygon4& p);

// Canonicalize in place: enforce w >= h, theta in [-pi/2, pi/2);
// when w == h, theta in [-pi/4, pi/4).
RotatedBox canonicalize(RotatedBox b);

Polygon4 box_to_polygon(const RotatedBox& b);

// Minimum-area rotated rectangle enclosing the polygon's convex hull
// (rotating calipers over hull edges).
RotatedBox min_area_rotated_box(const Polygon4& poly);

Gaussian2 box_to_gaussian(const RotatedBox& b, GaussianVariant variant = GaussianVariant::kPaper);

// 2-Wasserstein distance between Gaussians:
// d^2 = |mu1-mu2|^2 + Tr(s1 + s2 - 2 (s1^1/2 s2 s1^1/2)^1/2)
double wasserstein_distance(const Gaussian2& g1, const Gaussian2& g2);

// 1 - alpha * d / (Tr(s1 s2))^(1/4). May be negative for distant boxes.
double positional_score(const RotatedBox& b1, const RotatedBox& b2, double alpha,
                        GaussianVariant variant = GaussianVariant::kPaper);

// Intersection-over-union of two convex quads (Sutherland-Hodgman clipping).
double polygon_iou(const Polygon4& p1, const Polygon4& p2);

// Principal square root of a symmetric PSD 2x2 matrix [xx xy; xy yy].
// Closed form with eigendecomposition fallback near-singular cases.
void sqrt_psd_2x2(double xx, double xy, double yy, double& rxx, double& rxy, double& ryy);

}  // namespace glots
