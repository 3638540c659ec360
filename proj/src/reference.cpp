#include "epd/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace epd::reference {

std::vector<EiouBreakdown> eiou_batch(const std::vector<batch::QuadPair>& pairs) {
    std::vector<EiouBreakdown> out;
    out.reserve(pairs.size());
    for (const batch::QuadPair& p : pairs) out.push_back(eiou(p.gt, p.pred));
    return out;
}

std::vector<LossValue> loss_batch(const std::vector<batch::QuadPair>& pairs) {
    std::vector<LossValue> out;
    out.reserve(pairs.size());
    for (const batch::QuadPair& p : pairs) out.push_back(eiou_loss(p.gt, p.pred));
    return out;
}

std::vector<LossGradient> grad_batch(const std::vector<batch::QuadPair>& pairs) {
    std::vector<LossGradient> out;
    out.reserve(pairs.size());
    for (const batch::QuadPair& p : pairs) out.push_back(eiou_loss_grad(p.gt, p.pred));
    return out;
}

std::vector<Detection> nms(const std::vector<Detection>& dets, RankMode mode,
                           double iou_threshold, double score_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw std::invalid_argument("nms: iou_threshold must be in (0, 1]");
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (ranking_key(dets[i], mode) >= score_threshold) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ka = ranking_key(dets[a], mode);
        const double kb = ranking_key(dets[b], mode);
        if (ka != kb) return ka > kb;
        return a < b;
    });

    // Quadratic pass: a candidate survives unless some higher-ranked
    // survivor of the same image and category overlaps it enough.
    std::vector<bool> kept(order.size(), false);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const Detection& cand = dets[order[oi]];
        bool survives = true;
        for (std::size_t oj = 0; oj < oi; ++oj) {
            if (!kept[oj]) continue;
            const Detection& prev = dets[order[oj]];
            if (prev.image_id != cand.image_id || prev.category != cand.category) continue;
            if (rect_iou(prev.box, cand.box) >= iou_threshold) {
                survives = false;
                break;
            }
        }
        kept[oi] = survives;
    }

    std::vector<Detection> out;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        if (kept[oi]) out.push_back(dets[order[oi]]);
    }
    return out;
}

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
        const double s = specs[li].stride;
        for (int iy = 0; 0.5 * s + iy * s < image_height; ++iy) {
            for (int ix = 0; 0.5 * s + ix * s < image_width; ++ix) {
                const Point loc{0.5 * s + ix * s, 0.5 * s + iy * s};
                AssignmentTarget t;
                t.level = static_cast<int>(li);
                t.stride = s;
                t.location = loc;

                double best_area = std::numeric_limits<double>::infinity();
                std::int64_t best_id = 0;
                const GroundTruthInstance* best = nullptr;
                for (const GroundTruthInstance& gt : gts) {
                    const AxisAlignedBox area = positive_area(gt.box, s);
                    if (loc.x < area.x_min || loc.x > area.x_max || loc.y < area.y_min ||
                        loc.y > area.y_max) {
                        continue;
                    }
                    const DisplacementVector d = encode(loc, gt.extremes);
                    double ext = 0.0;
                    for (double c : d.d) ext = std::max(ext, std::abs(c));
                    if (ext <= specs[li].min_extent || ext > specs[li].max_extent) continue;
                    const double a = gt.box.area();
                    if (best == nullptr || a < best_area ||
                        (a == best_area && gt.instance_id < best_id)) {
                        best_area = a;
                        best_id = gt.instance_id;
                        best = &gt;
                    }
                }
                if (best != nullptr) {
                    t.positive = true;
                    t.instance_id = best->instance_id;
                    t.displacement = encode(loc, best->extremes);
                }
                out.push_back(t);
            }
        }
    }
    return out;
}

}  // namespace epd::reference
