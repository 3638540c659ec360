#include "epd/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace epd {

RankMode rank_mode_from_string(const std::string& s) {
    if (s == "plain") return RankMode::kPlain;
    if (s == "centerness") return RankMode::kCenterness;
    if (s == "eiou") return RankMode::kEiou;
    throw std::invalid_argument("unknown ranking mode: " + s);
}

const char* to_string(RankMode mode) {
    switch (mode) {
        case RankMode::kPlain: return "plain";
        case RankMode::kCenterness: return "centerness";
        case RankMode::kEiou: return "eiou";
    }
    return "?";
}

double centerness(Point p, const AxisAlignedBox& box) {
    const double l = p.x - box.x_min;
    const double r = box.x_max - p.x;
    const double t = p.y - box.y_min;
    const double b = box.y_max - p.y;
    if (l <= 0.0 || r <= 0.0 || t <= 0.0 || b <= 0.0) {
        throw std::domain_error("centerness: point not strictly inside the box");
    }
    return std::sqrt((std::min(l, r) / std::max(l, r)) *
                     (std::min(t, b) / std::max(t, b)));
}

Detection make_detection(std::int64_t image_id, int category, double cls_confidence,
                         double eiou_score, const ExtremePoints& extremes) {
    if (!(cls_confidence >= 0.0 && cls_confidence <= 1.0)) {
        throw std::invalid_argument("make_detection: cls_confidence outside [0, 1]");
    }
    if (!(eiou_score >= 0.0 && eiou_score <= 1.0)) {
        throw std::invalid_argument("make_detection: eiou_score outside [0, 1]");
    }
    if (!extremes.finite() || !extremes.ordered()) {
        throw std::invalid_argument("make_detection: extremes unordered or non-finite");
    }
    Detection d;
    d.image_id = image_id;
    d.category = category;
    d.cls_confidence = cls_confidence;
    d.eiou_score = eiou_score;
    d.extremes = extremes;
    d.box = enclosing_box(extremes);

    const std::array<double, 8> a = extremes.to_array();
    const Point centroid{0.25 * (a[0] + a[2] + a[4] + a[6]),
                         0.25 * (a[1] + a[3] + a[5] + a[7])};
    const bool inside = centroid.x > d.box.x_min && centroid.x < d.box.x_max &&
                        centroid.y > d.box.y_min && centroid.y < d.box.y_max;
    d.centerness = inside ? centerness(centroid, d.box) : 0.0;
    return d;
}

double ranking_key(const Detection& d, RankMode mode) {
    switch (mode) {
        case RankMode::kPlain: return d.cls_confidence;
        case RankMode::kCenterness: return d.cls_confidence * d.centerness;
        case RankMode::kEiou: return d.cls_confidence * d.eiou_score;
    }
    return 0.0;
}

std::vector<Detection> nms(const std::vector<Detection>& dets, RankMode mode,
                           double iou_threshold, double score_threshold) {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
        throw std::invalid_argument("nms: iou_threshold must be in (0, 1]");
    }

    // Suppression never crosses images or categories.
    std::map<std::pair<std::int64_t, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (ranking_key(dets[i], mode) < score_threshold) continue;
        groups[{dets[i].image_id, dets[i].category}].push_back(i);
    }

    std::vector<std::vector<std::size_t>> group_lists;
    group_lists.reserve(groups.size());
    for (auto& [key, idx] : groups) group_lists.push_back(std::move(idx));

    std::vector<std::vector<std::size_t>> kept_per_group(group_lists.size());
#pragma omp parallel for schedule(dynamic)
    for (int g = 0; g < static_cast<int>(group_lists.size()); ++g) {
        std::vector<std::size_t>& order = group_lists[g];
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double ka = ranking_key(dets[a], mode);
            const double kb = ranking_key(dets[b], mode);
            if (ka != kb) return ka > kb;
            return a < b;
        });
        std::vector<std::size_t>& kept = kept_per_group[g];
        for (std::size_t i : order) {
            bool suppressed = false;
            for (std::size_t j : kept) {
                if (rect_iou(dets[i].box, dets[j].box) >= iou_threshold) {
                    suppressed = true;
                    break;
                }
            }
            if (!suppressed) kept.push_back(i);
        }
    }

    std::vector<std::size_t> all;
    for (const std::vector<std::size_t>& kept : kept_per_group) {
        all.insert(all.end(), kept.begin(), kept.end());
    }
    std::sort(all.begin(), all.end(), [&](std::size_t a, std::size_t b) {
        const double ka = ranking_key(dets[a], mode);
        const double kb = ranking_key(dets[b], mode);
        if (ka != kb) return ka > kb;
        return a < b;
    });

    std::vector<Detection> out;
    out.reserve(all.size());
    for (std::size_t i : all) out.push_back(dets[i]);
    return out;
}

}  // namespace epd
