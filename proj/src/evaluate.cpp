#include "epd/evaluate.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

namespace epd {

namespace {

struct RankedDet {
    std::size_t index = 0;  // into the input vector; also the tie-break
    double score = 0.0;
};

}  // namespace

EvalReport evaluate(const std::vector<LoadedInstance>& gts,
                    const std::vector<Detection>& dets, RankMode mode,
                    const std::vector<double>& thresholds, bool use_annotation_box) {
    if (thresholds.empty()) {
        throw std::invalid_argument("evaluate: no IoU thresholds given");
    }
    for (double t : thresholds) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw std::invalid_argument("evaluate: IoU thresholds must be in (0, 1]");
        }
    }

    // Group gt indices by (image, category); detections only ever match
    // within their own group.
    std::map<std::pair<std::int64_t, int>, std::vector<std::size_t>> gt_groups;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        gt_groups[{gts[i].image_id, gts[i].gt.category}].push_back(i);
    }

    std::vector<RankedDet> ranked(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        ranked[i] = {i, ranking_key(dets[i], mode)};
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedDet& a, const RankedDet& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.index < b.index;
    });

    EvalReport report;
    report.mode = mode;
    report.num_gt = static_cast<std::int64_t>(gts.size());
    report.num_detections = static_cast<std::int64_t>(dets.size());
    report.per_threshold.resize(thresholds.size());

#pragma omp parallel for schedule(dynamic)
    for (int ti = 0; ti < static_cast<int>(thresholds.size()); ++ti) {
        const double thr = thresholds[ti];
        std::vector<bool> gt_matched(gts.size(), false);
        std::vector<bool> det_is_tp(ranked.size(), false);

        ThresholdMetrics m;
        m.iou_threshold = thr;
        double eiou_sum = 0.0;

        for (std::size_t r = 0; r < ranked.size(); ++r) {
            const Detection& d = dets[ranked[r].index];
            auto group = gt_groups.find({d.image_id, d.category});
            std::size_t best_gt = gts.size();
            double best_iou = 0.0;
            if (group != gt_groups.end()) {
                for (std::size_t gi : group->second) {
                    if (gt_matched[gi]) continue;
                    const AxisAlignedBox gt_box = use_annotation_box
                                                      ? gts[gi].gt.box
                                                      : enclosing_box(gts[gi].gt.extremes);
                    const double iou = rect_iou(gt_box, d.box);
                    if (iou >= thr && iou > best_iou) {
                        best_iou = iou;
                        best_gt = gi;
                    }
                }
            }
            if (best_gt < gts.size()) {
                gt_matched[best_gt] = true;
                det_is_tp[r] = true;
                ++m.tp;
                eiou_sum += eiou(gts[best_gt].gt.extremes, d.extremes).eiou;
            } else {
                ++m.fp;
            }
        }
        m.fn = report.num_gt - m.tp;
        m.mean_eiou = m.tp > 0 ? eiou_sum / static_cast<double>(m.tp) : 0.0;

        // All-point interpolated AP: at each TP rank, credit the recall step
        // with the best precision at or beyond that rank.
        if (report.num_gt > 0) {
            const std::size_t n = ranked.size();
            std::vector<double> precision(n);
            std::int64_t cum_tp = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (det_is_tp[r]) ++cum_tp;
                precision[r] = static_cast<double>(cum_tp) / static_cast<double>(r + 1);
            }
            for (std::size_t r = n; r-- > 1;) {
                precision[r - 1] = std::max(precision[r - 1], precision[r]);
            }
            double ap = 0.0;
            const double recall_step = 1.0 / static_cast<double>(report.num_gt);
            for (std::size_t r = 0; r < n; ++r) {
                if (det_is_tp[r]) ap += recall_step * precision[r];
            }
            m.ap = ap;
        }
        report.per_threshold[ti] = m;
    }
    return report;
}

}  // namespace epd
