#pragma once

// Detection records, ranking keys, and greedy non-maximum suppression with
// selectable ranking: raw classification confidence, centerness-weighted, or
// quality-weighted by the predicted extreme-point similarity.

#include <cstdint>
#include <string>
#include <vector>

#include "epd/geometry.hpp"

namespace epd {

enum class RankMode { kPlain, kCenterness, kEiou };

// Accepts "plain", "centerness", "eiou"; throws std::invalid_argument otherwise.
RankMode rank_mode_from_string(const std::string& s);
const char* to_string(RankMode mode);

// sqrt((min(l,r)/max(l,r)) * (min(t,b)/max(t,b))) for the distances from p
// to the four box sides. Throws std::domain_error when p lies on the
// boundary or outside the box.
double centerness(Point p, const AxisAlignedBox& box);

struct Detection {
    std::int64_t image_id = 0;
    int category = 0;
    double cls_confidence = 0.0;
    double eiou_score = 0.0;   // predicted extreme-point similarity in [0, 1]
    double centerness = 0.0;   // derived at the centroid of the extremes
    ExtremePoints extremes;
    AxisAlignedBox box;        // always enclosing_box(extremes)
};

// Assembles a detection from its stored fields: derives box from extremes
// and centerness at the centroid of the four extreme points (0 when the box
// is degenerate or the centroid is not strictly inside). Throws
// std::invalid_argument when a confidence is outside [0, 1] or the extremes
// are unordered/non-finite.
Detection make_detection(std::int64_t image_id, int category, double cls_confidence,
                         double eiou_score, const ExtremePoints& extremes);

double ranking_key(const Detection& d, RankMode mode);

// Greedy NMS, independently per (image, category) group: walk detections in
// decreasing ranking key and drop any detection whose enclosing box has
// rect_iou >= iou_threshold against an already-kept one. Detections whose
// ranking key falls below score_threshold are dropped up front. Output is
// sorted by (ranking key desc, input index asc). Throws
// std::invalid_argument when iou_threshold is outside (0, 1].
std::vector<Detection> nms(const std::vector<Detection>& dets, RankMode mode,
                           double iou_threshold, double score_threshold = 0.05);

}  // namespace epd
