#pragma once

// Synthetic detection scenarios: seeded ground-truth quadrilaterals with
// noisy (or adversarially constructed) detections whose quality score is the
// true extreme-point similarity. Used to exercise NMS ranking modes and the
// evaluation pipeline without a trained model.

#include <cstdint>
#include <string>
#include <vector>

#include "epd/evaluate.hpp"

namespace epd {

struct ScenarioConfig {
    int images = 4;
    int instances_per_image = 6;
    double image_width = 640.0;
    double image_height = 640.0;
    int categories = 3;

    // "noisy": independent detections around each gt. "adversarial": per gt
    // one well-placed low-confidence and one badly-placed high-confidence
    // detection, the case that separates the ranking modes.
    std::string preset = "noisy";

    int detections_per_gt = 1;
    double sigma_translate = 2.0;   // rigid shift of the whole quad, pixels
    double sigma_jitter = 0.0;      // independent per-point jitter, pixels
    double eiou_score_sigma = 0.0;  // 0 = report the exact similarity
    double cls_lo = 0.5;            // uniform classification-confidence range
    double cls_hi = 0.95;

    double nms_iou_threshold = 0.6;
    double score_threshold = 0.05;
    std::vector<double> eval_thresholds{0.5, 0.75};
};

struct Scenario {
    std::vector<LoadedInstance> gts;
    std::vector<Detection> detections;
};

// Deterministic in (config, seed): every instance and detection draws from
// its own id-keyed stream, so the result is identical at any parallelism.
// Throws std::invalid_argument on non-positive dimensions or counts.
Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

struct CompareReport {
    EvalReport plain;
    EvalReport centerness;
    EvalReport eiou_guided;
};

// Runs NMS in each ranking mode over the scenario's detections and evaluates
// the survivors against the scenario's ground truth.
CompareReport compare_rankings(const Scenario& scenario, const ScenarioConfig& config);

}  // namespace epd
