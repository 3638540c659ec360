#pragma once

// Training-target assignment: a multi-level grid of locations, each either
// negative or matched to one ground-truth instance with an 8-D displacement
// target. Positive locations come from a box-clipped center region whose
// radius adapts to the instance's aspect ratio.

#include <cstdint>
#include <optional>
#include <vector>

#include "epd/geometry.hpp"

namespace epd {

struct GroundTruthInstance {
    std::int64_t instance_id = 0;
    int category = 0;
    AxisAlignedBox box;
    ExtremePoints extremes;
};

struct DynamicRadius {
    double rx = 0.0;
    double ry = 0.0;
};

// Aspect-adaptive sampling radii: f = clamp(w/h, 1/1.3, 1.3); wide boxes
// (f > 1) stretch the x radius to 1.5*f, tall boxes stretch the y radius to
// 1.5/f, square boxes keep (1.5, 1.5). Throws std::invalid_argument when
// w <= 0 or h <= 0.
DynamicRadius dynamic_radius(double w, double h);

// Center region of gt_box expanded by stride-scaled dynamic radii, then
// clipped to gt_box. Throws std::invalid_argument on non-positive stride or
// a gt_box without positive extent.
AxisAlignedBox positive_area(const AxisAlignedBox& gt_box, double stride);

// Offsets from a grid location to the four extremes.
DisplacementVector encode(Point location, const ExtremePoints& e);

// Inverse of encode. Throws std::invalid_argument when the decoded points
// violate left.x <= right.x or top.y <= bottom.y.
ExtremePoints decode(Point location, const DisplacementVector& d);

struct LevelSpec {
    double stride = 0.0;
    double min_extent = 0.0;  // exclusive lower bound on max |displacement|
    double max_extent = 0.0;  // inclusive upper bound (infinity on the last level)
};

// Regression ranges per level: upper bound 8*stride, except the last level
// which is unbounded. For strides {8,16,32,64,128} this yields
// (0,64], (64,128], (128,256], (256,512], (512,inf).
std::vector<LevelSpec> level_specs(const std::vector<double>& strides);

struct AssignmentTarget {
    int level = 0;
    double stride = 0.0;
    Point location;
    bool positive = false;
    std::int64_t instance_id = -1;  // matched gt; -1 when negative
    std::optional<DisplacementVector> displacement;
    // Similarity target for the quality head; left empty at assignment time
    // and filled once a prediction exists.
    std::optional<double> eiou_target;
};

// One target per grid location on every level, ordered by level then
// row-major within the level (grid at cell centers stride/2 + i*stride,
// restricted to centers inside the image). A location is positive for a gt
// when it lies in the gt's positive_area at that stride and the max absolute
// displacement component falls in the level's range; among multiple
// candidates the smallest box area wins, with instance_id as the tie-break.
// Throws std::invalid_argument on non-positive image dims or a stride list
// that is not positive and strictly increasing.
std::vector<AssignmentTarget> assign(const std::vector<GroundTruthInstance>& gts,
                                     double image_width, double image_height,
                                     const std::vector<double>& strides);

}  // namespace epd
