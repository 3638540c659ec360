#pragma once

// Regression loss on extreme-point sets: enclosing-box IoU log-penalty plus
// an edge-direction cosine penalty, with an analytic gradient for the
// prediction side.

#include <array>

#include "epd/geometry.hpp"

namespace epd {

struct LossValue {
    double value = 0.0;
    // True when the enclosing boxes intersect with positive width and
    // height, i.e. the -ln(iou) term is live.
    bool overlap_branch = false;
};

// Loss = -ln(rect_iou) + (1 - cos_sim) when the enclosing boxes overlap,
// 1 - cos_sim otherwise. Throws std::invalid_argument when the gt enclosing
// box has zero area.
LossValue eiou_loss(const ExtremePoints& gt, const ExtremePoints& pred);

// d(loss)/d(pred), flattened (x_l, y_l, x_t, y_t, x_r, y_r, x_b, y_b).
struct LossGradient {
    std::array<double, 8> d{};
};

// Analytic gradient of eiou_loss with respect to the eight prediction
// coordinates. At exact min/max ties the subgradient convention 0.5 is used
// (average of the one-sided derivatives), which is what central differences
// converge to. Throws std::invalid_argument on a zero-area gt box and
// std::domain_error when the configuration is too close to a
// non-differentiable boundary: |w*h| < 1e-6 for the intersection extents, or
// any quadrilateral edge shorter than 1e-6.
LossGradient eiou_loss_grad(const ExtremePoints& gt, const ExtremePoints& pred);

// The precondition sweep of eiou_loss_grad alone: throws exactly like it,
// computes nothing else. Lets batch callers validate before entering a
// parallel region.
void check_grad_preconditions(const ExtremePoints& gt, const ExtremePoints& pred);

// Elementwise smooth-L1 between two displacement vectors, summed over the 8
// components: 0.5*d^2/beta for |d| < beta, |d| - 0.5*beta otherwise.
double smooth_l1(const DisplacementVector& pred, const DisplacementVector& target,
                 double beta = 1.0);

}  // namespace epd
