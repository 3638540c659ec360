#include "epd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace epd {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }

ExtremePoints ExtremePoints::from_array(const std::array<double, 8>& a) {
    return {{a[0], a[1]}, {a[2], a[3]}, {a[4], a[5]}, {a[6], a[7]}};
}

std::array<double, 8> ExtremePoints::to_array() const {
    return {left.x, left.y, top.x, top.y, right.x, right.y, bottom.x, bottom.y};
}

bool ExtremePoints::ordered() const {
    return left.x <= right.x && top.y <= bottom.y;
}

bool ExtremePoints::canonical() const {
    const double min_x = std::min({left.x, top.x, right.x, bottom.x});
    const double max_x = std::max({left.x, top.x, right.x, bottom.x});
    const double min_y = std::min({left.y, top.y, right.y, bottom.y});
    const double max_y = std::max({left.y, top.y, right.y, bottom.y});
    return left.x == min_x && top.y == min_y && right.x == max_x && bottom.y == max_y;
}

bool ExtremePoints::finite() const {
    for (double v : to_array()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

ExtremePoints ExtremePoints::translated(double dx, double dy) const {
    return affine(1.0, dx, dy);
}

ExtremePoints ExtremePoints::affine(double s, double dx, double dy) const {
    auto map = [&](Point p) { return Point{s * p.x + dx, s * p.y + dy}; };
    return {map(left), map(top), map(right), map(bottom)};
}

AxisAlignedBox enclosing_box(const ExtremePoints& e) {
    return {e.left.x, e.top.y, e.right.x, e.bottom.y};
}

double rect_iou(const AxisAlignedBox& a, const AxisAlignedBox& b) {
    if (a.area() == 0.0 && b.area() == 0.0) {
        const bool same = a.x_min == b.x_min && a.y_min == b.y_min &&
                          a.x_max == b.x_max && a.y_max == b.y_max;
        return same ? 1.0 : 0.0;
    }
    const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    if (w <= 0.0) return 0.0;
    const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (h <= 0.0) return 0.0;
    const double inter = w * h;
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

QuadEdges edge_vectors(const ExtremePoints& e) {
    QuadEdges q;
    q.e[0] = e.top - e.left;
    q.e[1] = e.right - e.top;
    q.e[2] = e.bottom - e.right;
    q.e[3] = e.left - e.bottom;
    return q;
}

namespace {

// Below this length an edge is treated as collapsed for similarity purposes.
constexpr double kDegenerateEdge = 1e-8;

}  // namespace

double cos_sim(const ExtremePoints& gt, const ExtremePoints& pred) {
    const QuadEdges g = edge_vectors(gt);
    const QuadEdges p = edge_vectors(pred);
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double ng = norm(g.e[i]);
        const double np = norm(p.e[i]);
        const bool dg = ng < kDegenerateEdge;
        const bool dp = np < kDegenerateEdge;
        if (dg && dp) {
            sum += 1.0;  // both collapsed: perfectly agreeing
        } else if (dg || dp) {
            sum += 0.0;  // one collapsed: no direction to agree with
        } else if (g.e[i].x == p.e[i].x && g.e[i].y == p.e[i].y) {
            sum += 1.0;  // keeps the identity case exact despite sqrt rounding
        } else {
            sum += dot(g.e[i], p.e[i]) / (ng * np);
        }
    }
    return std::clamp(sum / 4.0, -1.0, 1.0);
}

EiouBreakdown eiou(const ExtremePoints& gt, const ExtremePoints& pred) {
    EiouBreakdown out;
    out.rect_iou = rect_iou(enclosing_box(gt), enclosing_box(pred));
    out.cos_sim = cos_sim(gt, pred);
    out.eiou = 0.5 * (out.rect_iou + 0.5 * (1.0 + out.cos_sim));
    return out;
}

namespace {

using Poly = std::vector<Point>;

double shoelace(const Poly& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

Poly quad_vertices(const ExtremePoints& e) {
    return {e.left, e.top, e.right, e.bottom};
}

// Clip `subject` against the half-plane left of the directed line a->b
// (positive-orientation convention: inside means cross(b-a, p-a) >= 0).
Poly clip_halfplane(const Poly& subject, Point a, Point b) {
    Poly out;
    const std::size_t n = subject.size();
    if (n == 0) return out;
    const Vec2 dir = b - a;
    auto side = [&](const Point& p) { return cross(dir, p - a); };
    for (std::size_t i = 0; i < n; ++i) {
        const Point& cur = subject[i];
        const Point& nxt = subject[(i + 1) % n];
        const double sc = side(cur);
        const double sn = side(nxt);
        if (sc >= 0.0) out.push_back(cur);
        if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
            const double t = sc / (sc - sn);
            out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
        }
    }
    return out;
}

}  // namespace

double quad_iou_exact(const ExtremePoints& a, const ExtremePoints& b) {
    Poly pa = quad_vertices(a);
    Poly pb = quad_vertices(b);
    double area_a = shoelace(pa);
    double area_b = shoelace(pb);
    if (std::abs(area_a) <= 1e-12 || std::abs(area_b) <= 1e-12) {
        throw std::invalid_argument("quad_iou_exact: degenerate quadrilateral");
    }
    if (area_a < 0.0) {
        std::reverse(pa.begin(), pa.end());
        area_a = -area_a;
    }
    if (area_b < 0.0) {
        std::reverse(pb.begin(), pb.end());
        area_b = -area_b;
    }
    Poly inter = pa;
    for (std::size_t i = 0; i < pb.size() && !inter.empty(); ++i) {
        inter = clip_halfplane(inter, pb[i], pb[(i + 1) % pb.size()]);
    }
    if (inter.size() < 3) return 0.0;
    const double area_i = std::abs(shoelace(inter));
    const double uni = area_a + area_b - area_i;
    return std::clamp(area_i / uni, 0.0, 1.0);
}

}  // namespace epd
