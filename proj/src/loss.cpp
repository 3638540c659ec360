#include "epd/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace epd {

namespace {

struct Overlap {
    double w = 0.0;  // intersection extents; negative when disjoint per axis
    double h = 0.0;
    bool positive() const { return w > 0.0 && h > 0.0; }
};

Overlap intersection_extents(const AxisAlignedBox& a, const AxisAlignedBox& b) {
    Overlap o;
    o.w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    o.h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    return o;
}

void require_valid_gt(const AxisAlignedBox& gt_box) {
    if (gt_box.area() <= 0.0) {
        throw std::invalid_argument("eiou_loss: gt enclosing box has zero area");
    }
}

// Derivative of min(fixed, x) / max(fixed, x) with respect to x; ties get
// the averaged one-sided value 0.5.
double dmin_dx(double fixed, double x) {
    if (x < fixed) return 1.0;
    if (x > fixed) return 0.0;
    return 0.5;
}

double dmax_dx(double fixed, double x) {
    if (x > fixed) return 1.0;
    if (x < fixed) return 0.0;
    return 0.5;
}

}  // namespace

LossValue eiou_loss(const ExtremePoints& gt, const ExtremePoints& pred) {
    const AxisAlignedBox gb = enclosing_box(gt);
    const AxisAlignedBox pb = enclosing_box(pred);
    require_valid_gt(gb);

    const Overlap o = intersection_extents(gb, pb);
    const double cs = cos_sim(gt, pred);

    LossValue out;
    out.overlap_branch = o.positive();
    if (out.overlap_branch) {
        const double inter = o.w * o.h;
        const double uni = gb.area() + pb.area() - inter;
        out.value = -std::log(inter / uni) + (1.0 - cs);
    } else {
        out.value = 1.0 - cs;
    }
    return out;
}

void check_grad_preconditions(const ExtremePoints& gt, const ExtremePoints& pred) {
    const AxisAlignedBox gb = enclosing_box(gt);
    const AxisAlignedBox pb = enclosing_box(pred);
    require_valid_gt(gb);

    const Overlap o = intersection_extents(gb, pb);
    if (std::abs(o.w * o.h) < 1e-6) {
        throw std::domain_error(
            "eiou_loss_grad: intersection area too close to the branch boundary");
    }

    const QuadEdges ge = edge_vectors(gt);
    const QuadEdges pe = edge_vectors(pred);
    for (std::size_t i = 0; i < 4; ++i) {
        if (norm(ge.e[i]) < 1e-6 || norm(pe.e[i]) < 1e-6) {
            throw std::domain_error("eiou_loss_grad: near-degenerate quadrilateral edge");
        }
    }
}

LossGradient eiou_loss_grad(const ExtremePoints& gt, const ExtremePoints& pred) {
    check_grad_preconditions(gt, pred);
    const AxisAlignedBox gb = enclosing_box(gt);
    const AxisAlignedBox pb = enclosing_box(pred);
    const Overlap o = intersection_extents(gb, pb);
    const QuadEdges ge = edge_vectors(gt);
    const QuadEdges pe = edge_vectors(pred);

    LossGradient grad;

    // Cosine penalty: d(1 - mean cos)/d(pred). For each edge pair,
    // u_i = d cos_i / d(pred edge i); point gradients follow from the
    // edge-to-point incidence of the cycle l->t->r->b->l.
    Vec2 u[4];
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 g = ge.e[i];
        const Vec2 p = pe.e[i];
        const double ng = norm(g);
        const double np = norm(p);
        const double d = dot(g, p);
        const double inv = 1.0 / (ng * np);
        u[i] = inv * (g - (d / (np * np)) * p);
    }
    const Vec2 dl = 0.25 * (u[0] - u[3]);
    const Vec2 dt = 0.25 * (u[1] - u[0]);
    const Vec2 dr = 0.25 * (u[2] - u[1]);
    const Vec2 db = 0.25 * (u[3] - u[2]);
    grad.d[0] = dl.x;
    grad.d[1] = dl.y;
    grad.d[2] = dt.x;
    grad.d[3] = dt.y;
    grad.d[4] = dr.x;
    grad.d[5] = dr.y;
    grad.d[6] = db.x;
    grad.d[7] = db.y;

    if (o.positive()) {
        // -ln(i/u) = ln(u) - ln(i), differentiated through the four named
        // box coordinates of pred: x_l (0), y_t (3), x_r (4), y_b (7).
        const double inter = o.w * o.h;
        const double uni = gb.area() + pb.area() - inter;
        const double wp = pb.width();
        const double hp = pb.height();

        const double di_dxl = -dmax_dx(gb.x_min, pb.x_min) * o.h;
        const double di_dxr = dmin_dx(gb.x_max, pb.x_max) * o.h;
        const double di_dyt = -dmax_dx(gb.y_min, pb.y_min) * o.w;
        const double di_dyb = dmin_dx(gb.y_max, pb.y_max) * o.w;

        const double da_dxl = -hp;
        const double da_dxr = hp;
        const double da_dyt = -wp;
        const double da_dyb = wp;

        grad.d[0] += (da_dxl - di_dxl) / uni - di_dxl / inter;
        grad.d[3] += (da_dyt - di_dyt) / uni - di_dyt / inter;
        grad.d[4] += (da_dxr - di_dxr) / uni - di_dxr / inter;
        grad.d[7] += (da_dyb - di_dyb) / uni - di_dyb / inter;
    }
    return grad;
}

double smooth_l1(const DisplacementVector& pred, const DisplacementVector& target,
                 double beta) {
    if (beta <= 0.0) {
        throw std::invalid_argument("smooth_l1: beta must be positive");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        const double d = std::abs(pred.d[i] - target.d[i]);
        sum += d < beta ? 0.5 * d * d / beta : d - 0.5 * beta;
    }
    return sum;
}

}  // namespace epd
