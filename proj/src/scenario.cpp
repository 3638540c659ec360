#include "epd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epd/rng.hpp"

namespace epd {

namespace {

ExtremePoints quad_in_box(const AxisAlignedBox& box, double at, double ar, double ab,
                          double al) {
    // Slide parameters in (0, 1) position each extreme along its side.
    ExtremePoints e;
    e.left = {box.x_min, box.y_min + al * box.height()};
    e.top = {box.x_min + at * box.width(), box.y_min};
    e.right = {box.x_max, box.y_min + ar * box.height()};
    e.bottom = {box.x_min + ab * box.width(), box.y_max};
    return e;
}

// Canonical extremes of the four (possibly jittered) quad points, reusing
// the mask-extraction tie rules.
ExtremePoints extremes_of_points(const std::array<Point, 4>& pts) {
    return extract_extremes({Polygon(pts.begin(), pts.end())});
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void validate(const ScenarioConfig& c) {
    if (c.images <= 0 || c.instances_per_image <= 0) {
        throw std::invalid_argument("scenario: image and instance counts must be positive");
    }
    if (c.image_width <= 0.0 || c.image_height <= 0.0) {
        throw std::invalid_argument("scenario: image dimensions must be positive");
    }
    if (c.categories <= 0) {
        throw std::invalid_argument("scenario: need at least one category");
    }
    if (c.detections_per_gt < 0) {
        throw std::invalid_argument("scenario: detections_per_gt must be >= 0");
    }
    if (!(c.cls_lo >= 0.0 && c.cls_hi <= 1.0 && c.cls_lo <= c.cls_hi)) {
        throw std::invalid_argument("scenario: cls range must be within [0, 1]");
    }
    if (c.sigma_translate < 0.0 || c.sigma_jitter < 0.0 || c.eiou_score_sigma < 0.0) {
        throw std::invalid_argument("scenario: noise sigmas must be >= 0");
    }
    if (c.preset != "noisy" && c.preset != "adversarial") {
        throw std::invalid_argument("scenario: unknown preset '" + c.preset + "'");
    }
}

LoadedInstance make_gt_noisy(const ScenarioConfig& c, std::uint64_t seed, int image,
                             int inst) {
    rng::Stream s = rng::Stream::of(seed, 1, static_cast<std::uint64_t>(image),
                                    static_cast<std::uint64_t>(inst));
    const double max_side = std::min({160.0, c.image_width / 3.0, c.image_height / 3.0});
    const double min_side = std::min(24.0, 0.5 * max_side);
    const double w = std::exp(s.uniform(std::log(min_side), std::log(max_side)));
    const double h = std::exp(s.uniform(std::log(min_side), std::log(max_side)));
    const double cx = s.uniform(0.5 * w + 1.0, c.image_width - 0.5 * w - 1.0);
    const double cy = s.uniform(0.5 * h + 1.0, c.image_height - 0.5 * h - 1.0);
    const AxisAlignedBox box{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
    const double at = s.uniform(0.15, 0.85);
    const double ar = s.uniform(0.15, 0.85);
    const double ab = s.uniform(0.15, 0.85);
    const double al = s.uniform(0.15, 0.85);

    LoadedInstance out;
    out.image_id = image;
    out.gt.instance_id = static_cast<std::int64_t>(image) * 100000 + inst;
    out.gt.category = static_cast<int>(s.uniform_int(1, c.categories));
    out.gt.box = box;
    out.gt.extremes = quad_in_box(box, at, ar, ab, al);
    return out;
}

LoadedInstance make_gt_adversarial(const ScenarioConfig& c, std::uint64_t seed, int image,
                                   int inst) {
    // One instance per grid cell, comfortably inside it, so distinct gts can
    // never interact through NMS and the ranking margins stay exact.
    const int cols = static_cast<int>(std::ceil(std::sqrt(double(c.instances_per_image))));
    const int rows = (c.instances_per_image + cols - 1) / cols;
    const double cell_w = c.image_width / cols;
    const double cell_h = c.image_height / rows;
    const int cxi = inst % cols;
    const int cyi = inst / cols;

    rng::Stream s = rng::Stream::of(seed, 1, static_cast<std::uint64_t>(image),
                                    static_cast<std::uint64_t>(inst));
    const double w = cell_w * s.uniform(0.38, 0.45);
    const double h = cell_h * s.uniform(0.38, 0.45);
    const double cx = (cxi + 0.5) * cell_w + cell_w * s.uniform(-0.03, 0.03);
    const double cy = (cyi + 0.5) * cell_h + cell_h * s.uniform(-0.03, 0.03);
    const AxisAlignedBox box{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};

    LoadedInstance out;
    out.image_id = image;
    out.gt.instance_id = static_cast<std::int64_t>(image) * 100000 + inst;
    out.gt.category = static_cast<int>(s.uniform_int(1, c.categories));
    out.gt.box = box;
    out.gt.extremes = quad_in_box(box, s.uniform(0.35, 0.65), s.uniform(0.35, 0.65),
                                  s.uniform(0.35, 0.65), s.uniform(0.35, 0.65));
    return out;
}

Detection make_det_noisy(const ScenarioConfig& c, std::uint64_t seed,
                         const LoadedInstance& gt, int image, int inst, int j) {
    rng::Stream s = rng::Stream::of(seed, 2, static_cast<std::uint64_t>(image),
                                    static_cast<std::uint64_t>(inst) * 1024 + j);
    const double dx = s.normal(0.0, c.sigma_translate);
    const double dy = s.normal(0.0, c.sigma_translate);
    const ExtremePoints shifted = gt.gt.extremes.translated(dx, dy);
    std::array<Point, 4> pts{shifted.left, shifted.top, shifted.right, shifted.bottom};
    for (Point& p : pts) {
        p.x += s.normal(0.0, c.sigma_jitter);
        p.y += s.normal(0.0, c.sigma_jitter);
    }
    const ExtremePoints det_extremes = extremes_of_points(pts);
    const double cls = s.uniform(c.cls_lo, c.cls_hi);
    double score = eiou(gt.gt.extremes, det_extremes).eiou;
    if (c.eiou_score_sigma > 0.0) {
        score = clamp01(score + s.normal(0.0, c.eiou_score_sigma));
    }
    return make_detection(gt.image_id, gt.gt.category, cls, score, det_extremes);
}

Detection make_det_adversarial(const LoadedInstance& gt, int j) {
    // j == 0: tight box, modest confidence. j == 1: misplaced box whose
    // confidence alone would outrank the good one.
    const double w = gt.gt.box.width();
    const double shift = (j == 0 ? 0.02 : 0.24) * w;
    const double cls = j == 0 ? 0.78 : 0.9;
    const ExtremePoints det_extremes = gt.gt.extremes.translated(shift, 0.0);
    const double score = eiou(gt.gt.extremes, det_extremes).eiou;
    return make_detection(gt.image_id, gt.gt.category, cls, score, det_extremes);
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    validate(config);
    const bool adversarial = config.preset == "adversarial";
    const int per_gt = adversarial ? 2 : config.detections_per_gt;
    const int n_gts = config.images * config.instances_per_image;

    Scenario sc;
    sc.gts.resize(n_gts);
    sc.detections.resize(static_cast<std::size_t>(n_gts) * per_gt);

#pragma omp parallel for schedule(static)
    for (int g = 0; g < n_gts; ++g) {
        const int image = g / config.instances_per_image;
        const int inst = g % config.instances_per_image;
        sc.gts[g] = adversarial ? make_gt_adversarial(config, seed, image, inst)
                                : make_gt_noisy(config, seed, image, inst);
        for (int j = 0; j < per_gt; ++j) {
            sc.detections[static_cast<std::size_t>(g) * per_gt + j] =
                adversarial ? make_det_adversarial(sc.gts[g], j)
                            : make_det_noisy(config, seed, sc.gts[g], image, inst, j);
        }
    }
    return sc;
}

CompareReport compare_rankings(const Scenario& scenario, const ScenarioConfig& config) {
    CompareReport report;
    for (RankMode mode : {RankMode::kPlain, RankMode::kCenterness, RankMode::kEiou}) {
        const std::vector<Detection> kept =
            nms(scenario.detections, mode, config.nms_iou_threshold, config.score_threshold);
        EvalReport r = evaluate(scenario.gts, kept, mode, config.eval_thresholds);
        switch (mode) {
            case RankMode::kPlain: report.plain = std::move(r); break;
            case RankMode::kCenterness: report.centerness = std::move(r); break;
            case RankMode::kEiou: report.eiou_guided = std::move(r); break;
        }
    }
    return report;
}

}  // namespace epd
