#pragma once

// Core geometry for extreme-point detections: points, enclosing boxes,
// quadrilateral edge vectors, and the EIoU similarity that couples
// enclosing-box IoU with edge-direction agreement.

#include <array>
#include <cstddef>

namespace epd {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 v);

// Image coordinates, y grows downward.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

struct AxisAlignedBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    Point center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
    bool ordered() const { return x_min <= x_max && y_min <= y_max; }
};

// The four extreme points of an object: leftmost, topmost, rightmost,
// bottommost. Flattened order is (x_l, y_l, x_t, y_t, x_r, y_r, x_b, y_b).
struct ExtremePoints {
    Point left;
    Point top;
    Point right;
    Point bottom;

    static ExtremePoints from_array(const std::array<double, 8>& a);
    std::array<double, 8> to_array() const;

    // Weak ordering required by decoded predictions: left is not right of
    // right, top is not below bottom.
    bool ordered() const;
    // Full extremal property: each named coordinate attains the min/max of
    // the corresponding coordinate over all four points.
    bool canonical() const;
    bool finite() const;

    ExtremePoints translated(double dx, double dy) const;
    // s * E + t, applied per coordinate.
    ExtremePoints affine(double s, double dx, double dy) const;
};

// Directed side vectors of the quadrilateral left->top->right->bottom->left.
struct QuadEdges {
    std::array<Vec2, 4> e{};  // e[0]=t-l, e[1]=r-t, e[2]=b-r, e[3]=l-b
};

struct EiouBreakdown {
    double rect_iou = 0.0;
    double cos_sim = 0.0;
    double eiou = 0.0;
};

// Tightest axis-aligned box spanned by the named coordinates.
AxisAlignedBox enclosing_box(const ExtremePoints& e);

// Intersection-over-union of two axis-aligned boxes. Zero when the
// intersection has non-positive width or height. Two zero-area boxes
// compare as 1 when identical, 0 otherwise.
double rect_iou(const AxisAlignedBox& a, const AxisAlignedBox& b);

QuadEdges edge_vectors(const ExtremePoints& e);

// Mean cosine similarity over the four corresponding edge pairs.
// A pair where both edges are shorter than 1e-8 contributes 1; a pair where
// exactly one is degenerate contributes 0. Result clamped to [-1, 1].
double cos_sim(const ExtremePoints& gt, const ExtremePoints& pred);

// EIoU = (rect_iou + (1 + cos_sim) / 2) / 2, packaged with its ingredients.
EiouBreakdown eiou(const ExtremePoints& gt, const ExtremePoints& pred);

// Exact IoU of two convex quadrilaterals (Sutherland-Hodgman clipping +
// shoelace area). Throws std::invalid_argument when either quadrilateral is
// degenerate (|area| <= 1e-12). Used as the geometric reference that the
// enclosing-box EIoU is compared against in tests.
double quad_iou_exact(const ExtremePoints& a, const ExtremePoints& b);

// Regression target: offsets from a pixel location to the four extremes,
// (x_p - x_l, y_p - y_l, x_p - x_t, ..., y_p - y_b).
struct DisplacementVector {
    std::array<double, 8> d{};
};

}  // namespace epd
