#include "epd/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace epd {

namespace {

// Representative of the vertices attaining the minimum of `key`: midpoint of
// their span along the other axis. `key` selects the scanned coordinate
// (negated for max scans), `other` the reported span coordinate.
template <typename Key, typename Other>
Point extremal_point(const std::vector<Polygon>& polys, Key key, Other other,
                     bool key_is_x) {
    double best = std::numeric_limits<double>::infinity();
    for (const Polygon& poly : polys) {
        for (const Point& p : poly) best = std::min(best, key(p));
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double key_value = 0.0;
    for (const Polygon& poly : polys) {
        for (const Point& p : poly) {
            if (key(p) == best) {
                lo = std::min(lo, other(p));
                hi = std::max(hi, other(p));
                key_value = key_is_x ? p.x : p.y;
            }
        }
    }
    const double mid = lo == hi ? lo : 0.5 * (lo + hi);
    return key_is_x ? Point{key_value, mid} : Point{mid, key_value};
}

}  // namespace

ExtremePoints extract_extremes(const std::vector<Polygon>& polygons) {
    if (polygons.empty()) {
        throw std::invalid_argument("extract_extremes: no polygons");
    }
    for (const Polygon& poly : polygons) {
        if (poly.size() < 3) {
            throw std::invalid_argument("extract_extremes: polygon with fewer than 3 vertices");
        }
        for (const Point& p : poly) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
                throw std::invalid_argument("extract_extremes: non-finite vertex");
            }
        }
    }
    ExtremePoints e;
    e.left = extremal_point(polygons, [](const Point& p) { return p.x; },
                            [](const Point& p) { return p.y; }, true);
    e.right = extremal_point(polygons, [](const Point& p) { return -p.x; },
                             [](const Point& p) { return p.y; }, true);
    e.top = extremal_point(polygons, [](const Point& p) { return p.y; },
                           [](const Point& p) { return p.x; }, false);
    e.bottom = extremal_point(polygons, [](const Point& p) { return -p.y; },
                              [](const Point& p) { return p.x; }, false);
    return e;
}

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw SchemaError("annotations: missing or non-numeric '" + std::string(key) +
                          "' in " + where);
    }
    return j[key].get<double>();
}

std::int64_t require_int(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
        throw SchemaError("annotations: missing or non-integer '" + std::string(key) +
                          "' in " + where);
    }
    return j[key].get<std::int64_t>();
}

}  // namespace

Dataset load_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open annotation file: " + path);
    }
    json root;
    try {
        in >> root;
    } catch (const json::parse_error& e) {
        throw InputError("annotation file is not valid JSON: " + path + ": " + e.what());
    }
    for (const char* key : {"images", "annotations", "categories"}) {
        if (!root.contains(key) || !root[key].is_array()) {
            throw SchemaError(std::string("annotations: missing top-level array '") + key + "'");
        }
    }

    Dataset ds;
    std::unordered_map<std::int64_t, const AnnotatedImage*> image_by_id;
    for (const json& im : root["images"]) {
        AnnotatedImage img;
        img.id = require_int(im, "id", "images entry");
        img.width = require_number(im, "width", "image " + std::to_string(img.id));
        img.height = require_number(im, "height", "image " + std::to_string(img.id));
        if (img.width <= 0.0 || img.height <= 0.0) {
            throw SchemaError("annotations: non-positive size for image " +
                              std::to_string(img.id));
        }
        if (im.contains("file_name") && im["file_name"].is_string()) {
            img.file_name = im["file_name"].get<std::string>();
        }
        ds.images.push_back(img);
    }
    for (const AnnotatedImage& img : ds.images) {
        image_by_id[img.id] = &img;
    }

    std::unordered_set<int> category_ids;
    for (const json& c : root["categories"]) {
        CategoryInfo cat;
        cat.id = static_cast<int>(require_int(c, "id", "categories entry"));
        if (c.contains("name") && c["name"].is_string()) {
            cat.name = c["name"].get<std::string>();
        }
        ds.categories.push_back(cat);
        category_ids.insert(cat.id);
    }

    for (const json& an : root["annotations"]) {
        const std::int64_t ann_id = require_int(an, "id", "annotations entry");
        const std::string where = "annotation " + std::to_string(ann_id);
        const std::int64_t image_id = require_int(an, "image_id", where);
        auto img_it = image_by_id.find(image_id);
        if (img_it == image_by_id.end()) {
            throw SchemaError("annotations: " + where + " references unknown image " +
                              std::to_string(image_id));
        }
        const int category_id = static_cast<int>(require_int(an, "category_id", where));
        if (!category_ids.count(category_id)) {
            throw SchemaError("annotations: " + where + " references unknown category " +
                              std::to_string(category_id));
        }
        if (an.contains("iscrowd") && an["iscrowd"].is_number_integer() &&
            an["iscrowd"].get<int>() != 0) {
            ++ds.skipped_crowd;
            continue;
        }
        if (!an.contains("segmentation")) {
            throw SchemaError("annotations: missing 'segmentation' in " + where);
        }
        const json& seg = an["segmentation"];
        if (seg.is_object()) {
            ++ds.skipped_rle;  // run-length encoding: out of scope
            continue;
        }
        if (!seg.is_array() || seg.empty()) {
            throw SchemaError("annotations: 'segmentation' must be a non-empty array in " +
                              where);
        }
        std::vector<Polygon> polys;
        for (const json& part : seg) {
            if (!part.is_array() || part.size() < 6 || part.size() % 2 != 0) {
                throw SchemaError("annotations: malformed polygon in " + where);
            }
            Polygon poly;
            for (std::size_t i = 0; i + 1 < part.size(); i += 2) {
                if (!part[i].is_number() || !part[i + 1].is_number()) {
                    throw SchemaError("annotations: non-numeric polygon vertex in " + where);
                }
                poly.push_back({part[i].get<double>(), part[i + 1].get<double>()});
            }
            polys.push_back(std::move(poly));
        }

        if (!an.contains("bbox") || !an["bbox"].is_array() || an["bbox"].size() != 4) {
            throw SchemaError("annotations: 'bbox' must be [x, y, w, h] in " + where);
        }
        double b[4];
        for (std::size_t i = 0; i < 4; ++i) {
            if (!an["bbox"][i].is_number()) {
                throw SchemaError("annotations: non-numeric bbox entry in " + where);
            }
            b[i] = an["bbox"][i].get<double>();
        }
        const AnnotatedImage& img = *img_it->second;
        AxisAlignedBox box{b[0], b[1], b[0] + b[2], b[1] + b[3]};
        box.x_min = std::clamp(box.x_min, 0.0, img.width);
        box.x_max = std::clamp(box.x_max, 0.0, img.width);
        box.y_min = std::clamp(box.y_min, 0.0, img.height);
        box.y_max = std::clamp(box.y_max, 0.0, img.height);
        if (box.x_max <= box.x_min || box.y_max <= box.y_min) {
            throw SchemaError("annotations: bbox collapses inside the image in " + where);
        }

        LoadedInstance inst;
        inst.image_id = image_id;
        inst.gt.instance_id = ann_id;
        inst.gt.category = category_id;
        inst.gt.box = box;
        try {
            inst.gt.extremes = extract_extremes(polys);
        } catch (const std::invalid_argument& e) {
            throw SchemaError("annotations: " + where + ": " + e.what());
        }
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

}  // namespace epd
