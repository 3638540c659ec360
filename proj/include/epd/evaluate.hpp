#pragma once

// Detection-quality evaluation: greedy matching per image and category,
// precision/recall with all-point-interpolated AP, and the mean predicted-vs-
// actual extreme-point similarity over matched pairs.

#include <cstdint>
#include <vector>

#include "epd/extraction.hpp"
#include "epd/postprocess.hpp"

namespace epd {

struct ThresholdMetrics {
    double iou_threshold = 0.0;
    double ap = 0.0;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    double mean_eiou = 0.0;  // over matched pairs; 0 when nothing matched
};

struct EvalReport {
    RankMode mode = RankMode::kPlain;
    std::int64_t num_gt = 0;
    std::int64_t num_detections = 0;
    std::vector<ThresholdMetrics> per_threshold;
};

// Detections are scored by ranking_key(mode) and matched greedily in
// descending score order: each detection takes the unmatched same-image,
// same-category gt with the highest box IoU >= threshold (at most one
// detection per gt). When use_annotation_box is true the gt side uses the
// stored annotation box; otherwise the box enclosing the gt extremes.
// AP uses all-point interpolation over the pooled ranked list; an empty gt
// set yields AP 0. Throws std::invalid_argument when thresholds is empty or
// contains values outside (0, 1].
EvalReport evaluate(const std::vector<LoadedInstance>& gts,
                    const std::vector<Detection>& dets, RankMode mode,
                    const std::vector<double>& thresholds,
                    bool use_annotation_box = false);

}  // namespace epd
