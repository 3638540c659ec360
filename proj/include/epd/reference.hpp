#pragma once

// Straightforward serial implementations kept alongside the parallel
// kernels: the batch ops as plain loops, NMS as an exhaustive quadratic
// pass, and assignment as a direct nested scan. Tests compare these against
// the production paths bit for bit; the benchmark compares their speed.

#include <vector>

#include "epd/assignment.hpp"
#include "epd/batch.hpp"
#include "epd/postprocess.hpp"

namespace epd::reference {

std::vector<EiouBreakdown> eiou_batch(const std::vector<batch::QuadPair>& pairs);
std::vector<LossValue> loss_batch(const std::vector<batch::QuadPair>& pairs);
std::vector<LossGradient> grad_batch(const std::vector<batch::QuadPair>& pairs);

// Exhaustive suppression: every candidate is tested against every
// higher-ranked survivor of its (image, category) group, no early exits or
// grouping tricks. Same contract as epd::nms.
std::vector<Detection> nms(const std::vector<Detection>& dets, RankMode mode,
                           double iou_threshold, double score_threshold = 0.05);

// Location-by-location serial assignment with the same contract as
// epd::assign.
std::vector<AssignmentTarget> assign(const std::vector<GroundTruthInstance>& gts,
                                     double image_width, double image_height,
                                     const std::vector<double>& strides);

}  // namespace epd::reference
