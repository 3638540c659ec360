#pragma once

// File formats: JSONL for extremes / detections / assignment targets, JSON
// for scenario configs and evaluation reports. Writers are deterministic
// (fixed key order, shortest-round-trip doubles) so reruns are byte-equal.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "epd/assignment.hpp"
#include "epd/extraction.hpp"
#include "epd/postprocess.hpp"
#include "epd/scenario.hpp"

namespace epd::io {

struct ExtremesRecord {
    std::int64_t image_id = 0;
    std::int64_t instance_id = 0;
    int category_id = 0;
    ExtremePoints extremes;
    std::optional<AxisAlignedBox> bbox;  // annotation box, when known
};

void write_extremes_jsonl(std::ostream& os, const std::vector<ExtremesRecord>& recs);
std::vector<ExtremesRecord> read_extremes_jsonl(const std::string& path);

// Ground-truth view of extremes records. With use_annotation_box the stored
// bbox becomes the instance box (SchemaError when absent); otherwise the box
// enclosing the extremes is used.
std::vector<LoadedInstance> to_instances(const std::vector<ExtremesRecord>& recs,
                                         bool use_annotation_box);

// One {image_id, category_id, cls_confidence, eiou_score, extremes} object
// per line; box and centerness are always re-derived on read.
void write_detections_jsonl(std::ostream& os, const std::vector<Detection>& dets);
std::vector<Detection> read_detections_jsonl(const std::string& path);

void write_targets_jsonl(std::ostream& os, std::int64_t image_id,
                         const std::vector<AssignmentTarget>& targets);

// Strict config parse: unknown keys are errors, everything has a default.
ScenarioConfig read_scenario_config(const std::string& path);

std::string report_json(const EvalReport& report);
std::string compare_json(const CompareReport& report);

}  // namespace epd::io
