#include "epd/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace epd {

DynamicRadius dynamic_radius(double w, double h) {
    if (w <= 0.0 || h <= 0.0) {
        throw std::invalid_argument("dynamic_radius: box extents must be positive");
    }
    const double f = std::clamp(w / h, 1.0 / 1.3, 1.3);
    if (f > 1.0) return {1.5 * f, 1.5};
    if (f < 1.0) return {1.5, 1.5 / f};
    return {1.5, 1.5};
}

AxisAlignedBox positive_area(const AxisAlignedBox& gt_box, double stride) {
    if (stride <= 0.0) {
        throw std::invalid_argument("positive_area: stride must be positive");
    }
    const DynamicRadius r = dynamic_radius(gt_box.width(), gt_box.height());
    const Point c = gt_box.center();
    const double dx = stride * r.rx;
    const double dy = stride * r.ry;
    return {std::max(c.x - dx, gt_box.x_min), std::max(c.y - dy, gt_box.y_min),
            std::min(c.x + dx, gt_box.x_max), std::min(c.y + dy, gt_box.y_max)};
}

DisplacementVector encode(Point p, const ExtremePoints& e) {
    DisplacementVector v;
    const std::array<double, 8> a = e.to_array();
    for (std::size_t i = 0; i < 8; ++i) {
        v.d[i] = (i % 2 == 0 ? p.x : p.y) - a[i];
    }
    return v;
}

ExtremePoints decode(Point p, const DisplacementVector& v) {
    std::array<double, 8> a{};
    for (std::size_t i = 0; i < 8; ++i) {
        a[i] = (i % 2 == 0 ? p.x : p.y) - v.d[i];
    }
    const ExtremePoints e = ExtremePoints::from_array(a);
    if (!e.ordered()) {
        throw std::invalid_argument("decode: extremes violate left/right or top/bottom order");
    }
    return e;
}

std::vector<LevelSpec> level_specs(const std::vector<double>& strides) {
    if (strides.empty()) {
        throw std::invalid_argument("level_specs: stride list is empty");
    }
    for (std::size_t i = 0; i < strides.size(); ++i) {
        if (strides[i] <= 0.0 || (i > 0 && strides[i] <= strides[i - 1])) {
            throw std::invalid_argument(
                "level_specs: strides must be positive and strictly increasing");
        }
    }
    std::vector<LevelSpec> specs(strides.size());
    double lo = 0.0;
    for (std::size_t i = 0; i < strides.size(); ++i) {
        const bool last = i + 1 == strides.size();
        specs[i].stride = strides[i];
        specs[i].min_extent = lo;
        specs[i].max_extent = last ? std::numeric_limits<double>::infinity()
                                   : 8.0 * strides[i];
        lo = specs[i].max_extent;
    }
    return specs;
}

namespace {

int grid_cells(double image_extent, double stride) {
    // Cell centers stride/2 + i*stride with center < image_extent.
    const double n = std::ceil((image_extent - 0.5 * stride) / stride);
    return n > 0.0 ? static_cast<int>(n) : 0;
}

double max_abs_component(const DisplacementVector& v) {
    double m = 0.0;
    for (double c : v.d) m = std::max(m, std::abs(c));
    return m;
}

bool contains(const AxisAlignedBox& b, Point p) {
    return p.x >= b.x_min && p.x <= b.x_max && p.y >= b.y_min && p.y <= b.y_max;
}

}  // namespace

std::vector<AssignmentTarget> assign(const std::vector<GroundTruthInstance>& gts,
                                     double image_width, double image_height,
                                     const std::vector<double>& strides) {
    if (image_width <= 0.0 || image_height <= 0.0) {
        throw std::invalid_argument("assign: image dimensions must be positive");
    }
    const std::vector<LevelSpec> specs = level_specs(strides);
    for (const GroundTruthInstance& gt : gts) {
        if (gt.box.width() <= 0.0 || gt.box.height() <= 0.0) {
            throw std::invalid_argument("assign: gt box must have positive extent");
        }
    }

    std::vector<AssignmentTarget> out;
    for (std::size_t li = 0; li < specs.size(); ++li) {
        const LevelSpec& spec = specs[li];
        const double s = spec.stride;

        // Per-gt sampling regions at this stride, precomputed once.
        std::vector<AxisAlignedBox> areas(gts.size());
        for (std::size_t k = 0; k < gts.size(); ++k) {
            areas[k] = positive_area(gts[k].box, s);
        }

        const int nx = grid_cells(image_width, s);
        const int ny = grid_cells(image_height, s);
        const std::size_t base = out.size();
        out.resize(base + static_cast<std::size_t>(nx) * ny);

#pragma omp parallel for schedule(static)
        for (int cell = 0; cell < nx * ny; ++cell) {
            const int ix = cell % nx;
            const int iy = cell / nx;
            const Point loc{0.5 * s + ix * s, 0.5 * s + iy * s};

            AssignmentTarget t;
            t.level = static_cast<int>(li);
            t.stride = s;
            t.location = loc;

            // Smallest-area candidate wins; instance id breaks exact ties so
            // the result is independent of gt ordering.
            double best_area = std::numeric_limits<double>::infinity();
            std::int64_t best_id = 0;
            std::size_t best_k = gts.size();
            for (std::size_t k = 0; k < gts.size(); ++k) {
                if (!contains(areas[k], loc)) continue;
                const DisplacementVector d = encode(loc, gts[k].extremes);
                const double ext = max_abs_component(d);
                if (ext <= spec.min_extent || ext > spec.max_extent) continue;
                const double a = gts[k].box.area();
                if (best_k == gts.size() || a < best_area ||
                    (a == best_area && gts[k].instance_id < best_id)) {
                    best_area = a;
                    best_id = gts[k].instance_id;
                    best_k = k;
                }
            }
            if (best_k < gts.size()) {
                t.positive = true;
                t.instance_id = gts[best_k].instance_id;
                t.displacement = encode(loc, gts[best_k].extremes);
            }
            out[base + static_cast<std::size_t>(cell)] = t;
        }
    }
    return out;
}

}  // namespace epd
