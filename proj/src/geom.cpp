#include "glots/geom.hpp"

#include <algorithm>
#include <vector>

namespace glots {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kAreaEps = 1e-12;

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double shoelace(const std::vector<Point>& pts) {
    double s = 0.0;
    const size_t n = pts.size();
    for (size_t i = 0; i < n; ++i) {
        const Point& p = pts[i];
        const Point& q = pts[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

// Andrew monotone chain; returns CCW hull without the duplicated endpoint.
std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    const size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Point> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double wrap_half_pi(double t) {
    // into [-pi/2, pi/2)
    t = std::fmod(t + kPi / 2, kPi);
    if (t < 0) t += kPi;
    return t - kPi / 2;
}
}  // namespace

double polygon_area(const Polygon4& p) {
    std::vector<Point> pts(p.v.begin(), p.v.end());
    return std::fabs(shoelace(pts));
}

RotatedBox canonicalize(RotatedBox b) {
    if (b.w < b.h) {
        std::swap(b.w, b.h);
        b.theta += kPi / 2;
    }
    b.theta = wrap_half_pi(b.theta);
    if (std::fabs(b.w - b.h) < 1e-9) {
        while (b.theta >= kPi / 4) b.theta -= kPi / 2;
        while (b.theta < -kPi / 4) b.theta += kPi / 2;
    }
    return b;
}

Polygon4 box_to_polygon(const RotatedBox& b) {
    const double c = std::cos(b.theta), s = std::sin(b.theta);
    const double hw = b.w / 2, hh = b.h / 2;
    const double dx[4] = {-hw, hw, hw, -hw};
    const double dy[4] = {-hh, -hh, hh, hh};
    Polygon4 p;
    for (int i = 0; i < 4; ++i) {
        p.v[i].x = b.cx + c * dx[i] - s * dy[i];
        p.v[i].y = b.cy + s * dx[i] + c * dy[i];
    }
    return p;
}

RotatedBox min_area_rotated_box(const Polygon4& poly) {
    std::vector<Point> pts(poly.v.begin(), poly.v.end());
    std::vector<Point> hull = convex_hull(pts);
    if (hull.size() < 3 || std::fabs(shoelace(hull)) < kAreaEps)
        throw DegenerateGeometry("min_area_rotated_box: polygon has no area");

    double best_area = std::numeric_limits<double>::infinity();
    RotatedBox best;
    const size_t n = hull.size();
    for (size_t i = 0; i < n; ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % n];
        const double ang = std::atan2(b.y - a.y, b.x - a.x);
        const double c = std::cos(ang), s = std::sin(ang);
        double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
        for (const Point& p : hull) {
            const double rx = c * p.x + s * p.y;
            const double ry = -s * p.x + c * p.y;
            minx = std::min(minx, rx);
            maxx = std::max(maxx, rx);
            miny = std::min(miny, ry);
            maxy = std::max(maxy, ry);
        }
        const double area = (maxx - minx) * (maxy - miny);
        if (area < best_area) {
            best_area = area;
            const double mx = (minx + maxx) / 2, my = (miny + maxy) / 2;
            best.cx = c * mx - s * my;
            best.cy = s * mx + c * my;
            best.w = maxx - minx;
            best.h = maxy - miny;
            best.theta = ang;
        }
    }
    return canonicalize(best);
}

Gaussian2 box_to_gaussian(const RotatedBox& b, GaussianVariant variant) {
    const double c = std::cos(b.theta), s = std::sin(b.theta);
    double sw = b.w / 2, sh = b.h / 2;
    if (variant == GaussianVariant::kSquared) {
        sw *= sw;
        sh *= sh;
    }
    Gaussian2 g;
    g.mx = b.cx;
    g.my = b.cy;
    g.sxx = sw * c * c + sh * s * s;
    g.syy = sw * s * s + sh * c * c;
    g.sxy = (sw - sh) * c * s;
    return g;
}

void sqrt_psd_2x2(double xx, double xy, double yy, double& rxx, double& rxy, double& ryy) {
    const double tr = xx + yy;
    const double det = xx * yy - xy * xy;
    const double s = std::sqrt(std::max(det, 0.0));
    const double denom2 = tr + 2.0 * s;
    if (denom2 > 1e-300) {
        const double denom = std::sqrt(denom2);
        rxx = (xx + s) / denom;
        rxy = xy / denom;
        ryy = (yy + s) / denom;
        return;
    }
    // eigendecomposition fallback (matrix nearly zero or indefinite)
    const double diff = xx - yy;
    const double disc = std::sqrt(diff * diff + 4.0 * xy * xy);
    const double l1 = std::max((tr + disc) / 2, 0.0);
    const double l2 = std::max((tr - disc) / 2, 0.0);
    double vx, vy;
    if (std::fabs(xy) > 1e-300) {
        vx = l1 - yy;
        vy = xy;
    } else if (xx >= yy) {
        vx = 1.0;
        vy = 0.0;
    } else {
        vx = 0.0;
        vy = 1.0;
    }
    const double norm = std::hypot(vx, vy);
    vx /= norm;
    vy /= norm;
    const double q1 = std::sqrt(l1), q2 = std::sqrt(l2);
    rxx = q1 * vx * vx + q2 * vy * vy;
    rxy = (q1 - q2) * vx * vy;
    ryy = q1 * vy * vy + q2 * vx * vx;
}

double wasserstein_distance(const Gaussian2& g1, const Gaussian2& g2) {
    auto check = [](const Gaussian2& g) {
        if (g.sxx <= 0.0 || g.syy <= 0.0 || g.sxx * g.syy - g.sxy * g.sxy < -1e-12)
            throw DegenerateGeometry("wasserstein_distance: covariance not positive definite");
    };
    check(g1);
    check(g2);

    const double dx = g1.mx - g2.mx, dy = g1.my - g2.my;
    const double loc = dx * dx + dy * dy;

    double hxx, hxy, hyy;
    sqrt_psd_2x2(g1.sxx, g1.sxy, g1.syy, hxx, hxy, hyy);
    // A = s1^1/2 * s2 * s1^1/2
    const double txx = hxx * g2.sxx + hxy * g2.sxy;
    const double txy = hxx * g2.sxy + hxy * g2.syy;
    const double tyx = hxy * g2.sxx + hyy * g2.sxy;
    const double tyy = hxy * g2.sxy + hyy * g2.syy;
    const double axx = txx * hxx + txy * hxy;
    const double axy = txx * hxy + txy * hyy;
    const double ayy = tyx * hxy + tyy * hyy;

    double qxx, qxy, qyy;
    sqrt_psd_2x2(axx, 0.5 * (axy + axy), ayy, qxx, qxy, qyy);
    (void)qxy;

    double d2 = loc + (g1.sxx + g1.syy) + (g2.sxx + g2.syy) - 2.0 * (qxx + qyy);
    if (d2 < -1e-9) throw DegenerateGeometry("wasserstein_distance: negative squared distance");
    // cancellation in the trace term leaves |d2| noise up to ~1e-9 for
    // coincident gaussians; snap it to an exact zero either way
    if (d2 <= 1e-9) d2 = 0.0;
    return std::sqrt(d2);
}

double positional_score(const RotatedBox& b1, const RotatedBox& b2, double alpha,
                        GaussianVariant variant) {
    if (b1.cx == b2.cx && b1.cy == b2.cy && b1.w == b2.w && b1.h == b2.h && b1.theta == b2.theta)
        return 1.0;
    const Gaussian2 g1 = box_to_gaussian(b1, variant);
    const Gaussian2 g2 = box_to_gaussian(b2, variant);
    const double d = wasserstein_distance(g1, g2);
    const double tr12 = g1.sxx * g2.sxx + 2.0 * g1.sxy * g2.sxy + g1.syy * g2.syy;
    const double f = std::pow(tr12, 0.25);
    return 1.0 - alpha * d / f;
}

double polygon_iou(const Polygon4& p1, const Polygon4& p2) {
    auto to_ccw = [](const Polygon4& p) {
        std::vector<Point> pts(p.v.begin(), p.v.end());
        if (shoelace(pts) < 0) std::reverse(pts.begin(), pts.end());
        return pts;
    };
    std::vector<Point> subject = to_ccw(p1);
    std::vector<Point> clip = to_ccw(p2);
    const double a1 = std::fabs(shoelace(subject));
    const double a2 = std::fabs(shoelace(clip));
    if (a1 < kAreaEps || a2 < kAreaEps)
        throw DegenerateGeometry("polygon_iou: degenerate polygon");

    // Sutherland-Hodgman: clip the subject against each CCW edge of clip.
    std::vector<Point> poly = subject;
    const size_t m = clip.size();
    for (size_t e = 0; e < m && !poly.empty(); ++e) {
        const Point& ca = clip[e];
        const Point& cb = clip[(e + 1) % m];
        std::vector<Point> out;
        const size_t n = poly.size();
        for (size_t i = 0; i < n; ++i) {
            const Point& cur = poly[i];
            const Point& nxt = poly[(i + 1) % n];
            const double dc = cross(ca, cb, cur);
            const double dn = cross(ca, cb, nxt);
            const bool cur_in = dc >= 0;
            const bool nxt_in = dn >= 0;
            if (cur_in) out.push_back(cur);
            if (cur_in != nxt_in) {
                const double t = dc / (dc - dn);
                out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
            }
        }
        poly.swap(out);
    }
    double inter = poly.size() >= 3 ? std::fabs(shoelace(poly)) : 0.0;
    const double uni = a1 + a2 - inter;
    double iou = inter / uni;
    return std::clamp(iou, 0.0, 1.0);
}

}  // namespace glots
