#include "epd/io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <ostream>
#include <set>

#include "json.hpp"

namespace epd::io {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

ExtremePoints extremes_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 8) {
        throw SchemaError(where + ": 'extremes' must be an array of 8 numbers");
    }
    std::array<double, 8> a{};
    for (std::size_t i = 0; i < 8; ++i) {
        if (!j[i].is_number()) {
            throw SchemaError(where + ": non-numeric extremes entry");
        }
        a[i] = j[i].get<double>();
    }
    return ExtremePoints::from_array(a);
}

json line_or_throw(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(where + ": not valid JSON: " + e.what());
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    return in;
}

double number_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw SchemaError(where + ": missing or non-numeric '" + key + "'");
    }
    return j[key].get<double>();
}

std::int64_t int_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
        throw SchemaError(where + ": missing or non-integer '" + key + "'");
    }
    return j[key].get<std::int64_t>();
}

}  // namespace

void write_extremes_jsonl(std::ostream& os, const std::vector<ExtremesRecord>& recs) {
    for (const ExtremesRecord& r : recs) {
        ordered line;
        line["image_id"] = r.image_id;
        line["instance_id"] = r.instance_id;
        line["category_id"] = r.category_id;
        line["extremes"] = r.extremes.to_array();
        if (r.bbox) {
            line["bbox"] = {r.bbox->x_min, r.bbox->y_min, r.bbox->width(),
                            r.bbox->height()};
        }
        os << line.dump() << '\n';
    }
}

std::vector<ExtremesRecord> read_extremes_jsonl(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<ExtremesRecord> out;
    std::string text;
    for (int lineno = 1; std::getline(in, text); ++lineno) {
        if (text.empty()) continue;
        const std::string where = path + " line " + std::to_string(lineno);
        const json j = line_or_throw(text, where);
        ExtremesRecord r;
        r.image_id = int_field(j, "image_id", where);
        r.instance_id = int_field(j, "instance_id", where);
        r.category_id = static_cast<int>(int_field(j, "category_id", where));
        if (!j.contains("extremes")) {
            throw SchemaError(where + ": missing 'extremes'");
        }
        r.extremes = extremes_from_json(j["extremes"], where);
        if (j.contains("bbox")) {
            const json& b = j["bbox"];
            if (!b.is_array() || b.size() != 4 ||
                !std::all_of(b.begin(), b.end(), [](const json& v) { return v.is_number(); })) {
                throw SchemaError(where + ": 'bbox' must be [x, y, w, h]");
            }
            const double x = b[0].get<double>();
            const double y = b[1].get<double>();
            r.bbox = AxisAlignedBox{x, y, x + b[2].get<double>(), y + b[3].get<double>()};
        }
        out.push_back(r);
    }
    return out;
}

std::vector<LoadedInstance> to_instances(const std::vector<ExtremesRecord>& recs,
                                         bool use_annotation_box) {
    std::vector<LoadedInstance> out;
    out.reserve(recs.size());
    for (const ExtremesRecord& r : recs) {
        LoadedInstance inst;
        inst.image_id = r.image_id;
        inst.gt.instance_id = r.instance_id;
        inst.gt.category = r.category_id;
        inst.gt.extremes = r.extremes;
        if (use_annotation_box) {
            if (!r.bbox) {
                throw SchemaError("gt record " + std::to_string(r.instance_id) +
                                  " has no bbox but annotation boxes were requested");
            }
            inst.gt.box = *r.bbox;
        } else {
            inst.gt.box = enclosing_box(r.extremes);
        }
        out.push_back(inst);
    }
    return out;
}

void write_detections_jsonl(std::ostream& os, const std::vector<Detection>& dets) {
    for (const Detection& d : dets) {
        ordered line;
        line["image_id"] = d.image_id;
        line["category_id"] = d.category;
        line["cls_confidence"] = d.cls_confidence;
        line["eiou_score"] = d.eiou_score;
        line["extremes"] = d.extremes.to_array();
        os << line.dump() << '\n';
    }
}

std::vector<Detection> read_detections_jsonl(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<Detection> out;
    std::string text;
    for (int lineno = 1; std::getline(in, text); ++lineno) {
        if (text.empty()) continue;
        const std::string where = path + " line " + std::to_string(lineno);
        const json j = line_or_throw(text, where);
        if (!j.contains("extremes")) {
            throw SchemaError(where + ": missing 'extremes'");
        }
        const ExtremePoints e = extremes_from_json(j["extremes"], where);
        try {
            out.push_back(make_detection(
                int_field(j, "image_id", where),
                static_cast<int>(int_field(j, "category_id", where)),
                number_field(j, "cls_confidence", where),
                number_field(j, "eiou_score", where), e));
        } catch (const std::invalid_argument& err) {
            throw SchemaError(where + ": " + err.what());
        }
    }
    return out;
}

void write_targets_jsonl(std::ostream& os, std::int64_t image_id,
                         const std::vector<AssignmentTarget>& targets) {
    for (const AssignmentTarget& t : targets) {
        ordered line;
        line["image_id"] = image_id;
        line["level"] = t.level;
        line["stride"] = t.stride;
        line["x"] = t.location.x;
        line["y"] = t.location.y;
        line["positive"] = t.positive;
        line["instance_id"] = t.positive ? ordered(t.instance_id) : ordered(nullptr);
        line["displacement"] =
            t.displacement ? ordered(t.displacement->d) : ordered(nullptr);
        // Similarity target is a training-time quantity; always empty here.
        line["eiou_target"] =
            t.eiou_target ? ordered(*t.eiou_target) : ordered(nullptr);
        os << line.dump() << '\n';
    }
}

ScenarioConfig read_scenario_config(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    json root;
    try {
        in >> root;
    } catch (const json::parse_error& e) {
        throw InputError("scenario config is not valid JSON: " + path + ": " + e.what());
    }
    if (!root.is_object()) {
        throw SchemaError("scenario config must be a JSON object: " + path);
    }

    static const std::set<std::string> known = {
        "images",          "instances_per_image", "image_width",
        "image_height",    "categories",          "preset",
        "detections_per_gt", "sigma_translate",   "sigma_jitter",
        "eiou_score_sigma", "cls_lo",             "cls_hi",
        "nms_iou_threshold", "score_threshold",   "eval_thresholds"};
    for (const auto& [key, value] : root.items()) {
        if (!known.count(key)) {
            throw SchemaError("scenario config: unknown key '" + key + "'");
        }
    }

    ScenarioConfig c;
    auto num = [&](const char* key, double fallback) {
        if (!root.contains(key)) return fallback;
        if (!root[key].is_number()) {
            throw SchemaError(std::string("scenario config: '") + key + "' must be a number");
        }
        return root[key].get<double>();
    };
    c.images = static_cast<int>(num("images", c.images));
    c.instances_per_image = static_cast<int>(num("instances_per_image", c.instances_per_image));
    c.image_width = num("image_width", c.image_width);
    c.image_height = num("image_height", c.image_height);
    c.categories = static_cast<int>(num("categories", c.categories));
    c.detections_per_gt = static_cast<int>(num("detections_per_gt", c.detections_per_gt));
    c.sigma_translate = num("sigma_translate", c.sigma_translate);
    c.sigma_jitter = num("sigma_jitter", c.sigma_jitter);
    c.eiou_score_sigma = num("eiou_score_sigma", c.eiou_score_sigma);
    c.cls_lo = num("cls_lo", c.cls_lo);
    c.cls_hi = num("cls_hi", c.cls_hi);
    c.nms_iou_threshold = num("nms_iou_threshold", c.nms_iou_threshold);
    c.score_threshold = num("score_threshold", c.score_threshold);
    if (root.contains("preset")) {
        if (!root["preset"].is_string()) {
            throw SchemaError("scenario config: 'preset' must be a string");
        }
        c.preset = root["preset"].get<std::string>();
    }
    if (root.contains("eval_thresholds")) {
        const json& t = root["eval_thresholds"];
        if (!t.is_array() || t.empty() ||
            !std::all_of(t.begin(), t.end(), [](const json& v) { return v.is_number(); })) {
            throw SchemaError("scenario config: 'eval_thresholds' must be a numeric array");
        }
        c.eval_thresholds.clear();
        for (const json& v : t) c.eval_thresholds.push_back(v.get<double>());
    }
    return c;
}

namespace {

ordered report_to_ordered(const EvalReport& report) {
    ordered j;
    j["mode"] = to_string(report.mode);
    j["num_gt"] = report.num_gt;
    j["num_detections"] = report.num_detections;
    j["per_threshold"] = ordered::array();
    for (const ThresholdMetrics& m : report.per_threshold) {
        ordered t;
        t["iou_threshold"] = m.iou_threshold;
        t["ap"] = m.ap;
        t["tp"] = m.tp;
        t["fp"] = m.fp;
        t["fn"] = m.fn;
        t["mean_eiou"] = m.mean_eiou;
        j["per_threshold"].push_back(t);
    }
    return j;
}

}  // namespace

std::string report_json(const EvalReport& report) {
    return report_to_ordered(report).dump(2);
}

std::string compare_json(const CompareReport& report) {
    ordered j;
    j["plain"] = report_to_ordered(report.plain);
    j["centerness"] = report_to_ordered(report.centerness);
    j["eiou"] = report_to_ordered(report.eiou_guided);
    return j.dump(2);
}

}  // namespace epd::io
