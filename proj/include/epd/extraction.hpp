#pragma once

// Extreme-point extraction from polygonal instance masks, and loading of the
// annotation files that carry them.

#include <cstdint>
#include <string>
#include <vector>

#include "epd/assignment.hpp"
#include "epd/errors.hpp"
#include "epd/geometry.hpp"

namespace epd {

using Polygon = std::vector<Point>;

// Extreme points over the union of all polygon parts. When several vertices
// attain an extremal coordinate, the representative is the midpoint of the
// extremal span along the other axis (e.g. a flat top edge yields its
// midpoint). Throws std::invalid_argument when the list is empty, a part has
// fewer than 3 vertices, or any coordinate is non-finite.
ExtremePoints extract_extremes(const std::vector<Polygon>& polygons);

struct AnnotatedImage {
    std::int64_t id = 0;
    double width = 0.0;
    double height = 0.0;
    std::string file_name;
};

struct CategoryInfo {
    int id = 0;
    std::string name;
};

struct LoadedInstance {
    std::int64_t image_id = 0;
    GroundTruthInstance gt;  // instance_id = annotation id; box from bbox, clamped
};

struct Dataset {
    std::vector<AnnotatedImage> images;
    std::vector<CategoryInfo> categories;
    std::vector<LoadedInstance> instances;
    int skipped_rle = 0;    // annotations with run-length masks (unsupported)
    int skipped_crowd = 0;  // iscrowd == 1 annotations
};

// Load a COCO-style annotation file (images / annotations / categories).
// Polygon segmentations become extreme points; RLE and crowd annotations are
// skipped and counted. Throws InputError when the file is missing or not
// JSON, SchemaError on structural violations (missing keys, bad bbox shape,
// references to unknown image or category ids, malformed polygons).
Dataset load_annotations(const std::string& path);

}  // namespace epd
