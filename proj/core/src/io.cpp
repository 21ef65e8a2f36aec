// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "microtube/error.hpp"

namespace microtube::io {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::schema, what); }

json parse_document(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        schema_error(std::string(what) + ": " + e.what());
    }
}

const json& field(const json& j, const char* key) {
    if (!j.is_object()) {
        schema_error(std::string("expected an object holding '") + key + "'");
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        schema_error(std::string("missing field '") + key + "'");
    }
    return *it;
}

int as_int(const json& j, const char* what) {
    if (!j.is_number_integer()) {
        schema_error(std::string("'") + what + "' must be an integer");
    }
    return j.get<int>();
}

std::int64_t as_int64(const json& j, const char* what) {
    if (!j.is_number_integer()) {
        schema_error(std::string("'") + what + "' must be an integer");
    }
    return j.get<std::int64_t>();
}

double as_double(const json& j, const char* what) {
    if (!j.is_number()) {
        schema_error(std::string("'") + what + "' must be a number");
    }
    return j.get<double>();
}

std::string as_string(const json& j, const char* what) {
    if (!j.is_string()) {
        schema_error(std::string("'") + what + "' must be a string");
    }
    return j.get<std::string>();
}

const json& as_array(const json& j, const char* what) {
    if (!j.is_array()) {
        schema_error(std::string("'") + what + "' must be an array");
    }
    return j;
}

json box_json(const Box& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

Box parse_box(const json& j) {
    if (!j.is_array() || j.size() != 4) {
        schema_error("a box must be an array of 4 numbers");
    }
    Box b{as_double(j[0], "box"), as_double(j[1], "box"), as_double(j[2], "box"), as_double(j[3], "box")};
    if (!is_valid(b)) {
        schema_error("box coordinates must be finite and ordered");
    }
    return b;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) {
        schema_error(std::string(what) + " must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            schema_error(std::string(what) + ": unknown key '" + key + "'");
        }
    }
}

std::vector<json> parse_lines(std::string_view text) {
    std::vector<json> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            schema_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

int grid_from_rows(const json& level) {
    const int rows = as_int(field(level, "rows"), "rows");
    const int cols = as_int(field(level, "cols"), "cols");
    const int grid = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rows))));
    if (rows != cols || grid < 1 || grid * grid != rows) {
        schema_error("transition level must be square with rows = grid^2");
    }
    return grid;
}

json transition_header(const std::string& hash, int delta) {
    json j;
    j["format_version"] = kFormatVersion;
    j["pyramid_config_hash"] = hash;
    j["delta"] = delta;
    return j;
}

void check_header(const json& j) {
    if (as_int(field(j, "format_version"), "format_version") != kFormatVersion) {
        schema_error("unsupported format_version");
    }
    as_string(field(j, "pyramid_config_hash"), "pyramid_config_hash");
    if (as_int(field(j, "delta"), "delta") < 1) {
        schema_error("delta must be >= 1");
    }
    as_array(field(j, "levels"), "levels");
}

void check_cell(int cell, int grid) {
    if (cell < 0 || cell >= grid * grid) {
        schema_error("cell index out of range");
    }
}

template <typename Entries>
json level_json(std::size_t p, int grid, const Entries& entries) {
    json l;
    l["p"] = p + 1;
    l["rows"] = grid * grid;
    l["cols"] = grid * grid;
    l["entries"] = entries;
    return l;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
    }
}

// --- configs -----------------------------------------------------------------

std::string serialize(const PyramidConfig& c) {
    json j;
    j["grid_sizes"] = c.grid_sizes;
    j["shapes_per_cell"] = c.shapes_per_cell;
    j["scales"] = c.scales;
    j["extra_scale"] = c.extra_scale;
    j["aspect_ratios"] = c.aspect_ratios;
    return j.dump(2) + "\n";
}

PyramidConfig parse_pyramid_config(std::string_view text) {
    const json j = parse_document(text, "pyramid config");
    reject_unknown(j, {"grid_sizes", "shapes_per_cell", "scales", "extra_scale", "aspect_ratios"},
                   "pyramid config");
    PyramidConfig c = PyramidConfig::ssd300();
    if (j.contains("grid_sizes")) {
        c.grid_sizes.clear();
        for (const auto& v : as_array(j["grid_sizes"], "grid_sizes")) c.grid_sizes.push_back(as_int(v, "grid_sizes"));
    }
    if (j.contains("shapes_per_cell")) {
        c.shapes_per_cell.clear();
        for (const auto& v : as_array(j["shapes_per_cell"], "shapes_per_cell"))
            c.shapes_per_cell.push_back(as_int(v, "shapes_per_cell"));
    }
    if (j.contains("scales")) {
        c.scales.clear();
        for (const auto& v : as_array(j["scales"], "scales")) c.scales.push_back(as_double(v, "scales"));
    }
    if (j.contains("extra_scale")) {
        c.extra_scale = as_double(j["extra_scale"], "extra_scale");
    }
    if (j.contains("aspect_ratios")) {
        c.aspect_ratios.clear();
        for (const auto& level : as_array(j["aspect_ratios"], "aspect_ratios")) {
            std::vector<double> ratios;
            for (const auto& v : as_array(level, "aspect_ratios")) ratios.push_back(as_double(v, "aspect_ratios"));
            c.aspect_ratios.push_back(std::move(ratios));
        }
    }
    validate(c);
    return c;
}

std::string serialize(const LinkParams& p) {
    json j;
    j["iou_weight"] = p.iou_weight;
    j["score_floor"] = p.score_floor;
    j["max_misses"] = p.max_misses;
    j["nms_threshold"] = p.nms_threshold;
    j["top_n"] = p.top_n;
    return j.dump(2) + "\n";
}

LinkParams parse_link_params(std::string_view text) {
    const json j = parse_document(text, "link params");
    reject_unknown(j, {"iou_weight", "score_floor", "max_misses", "nms_threshold", "top_n"}, "link params");
    LinkParams p;
    if (j.contains("iou_weight")) p.iou_weight = as_double(j["iou_weight"], "iou_weight");
    if (j.contains("score_floor")) p.score_floor = as_double(j["score_floor"], "score_floor");
    if (j.contains("max_misses")) p.max_misses = as_int(j["max_misses"], "max_misses");
    if (j.contains("nms_threshold")) p.nms_threshold = as_double(j["nms_threshold"], "nms_threshold");
    if (j.contains("top_n")) p.top_n = as_int(j["top_n"], "top_n");
    validate(p);
    return p;
}

std::string serialize(const MotionSpec& s) {
    json j;
    j["kind"] = to_string(s.kind);
    j["velocity_x"] = s.velocity_x;
    j["velocity_y"] = s.velocity_y;
    j["walk_sigma"] = s.walk_sigma;
    j["size_min"] = s.size_min;
    j["size_max"] = s.size_max;
    j["num_classes"] = s.num_classes;
    j["tubes_per_video"] = s.tubes_per_video;
    j["frames_per_video"] = s.frames_per_video;
    j["duration_min"] = s.duration_min;
    j["duration_max"] = s.duration_max;
    j["delta"] = s.delta;
    j["sparsity"] = s.sparsity;
    return j.dump(2) + "\n";
}

MotionSpec parse_motion_spec(std::string_view text) {
    const json j = parse_document(text, "motion spec");
    reject_unknown(j,
                   {"kind", "velocity_x", "velocity_y", "walk_sigma", "size_min", "size_max", "num_classes",
                    "tubes_per_video", "frames_per_video", "duration_min", "duration_max", "delta", "sparsity"},
                   "motion spec");
    MotionSpec s;
    if (j.contains("kind")) s.kind = motion_kind_from_string(as_string(j["kind"], "kind"));
    if (j.contains("velocity_x")) s.velocity_x = as_double(j["velocity_x"], "velocity_x");
    if (j.contains("velocity_y")) s.velocity_y = as_double(j["velocity_y"], "velocity_y");
    if (j.contains("walk_sigma")) s.walk_sigma = as_double(j["walk_sigma"], "walk_sigma");
    if (j.contains("size_min")) s.size_min = as_double(j["size_min"], "size_min");
    if (j.contains("size_max")) s.size_max = as_double(j["size_max"], "size_max");
    if (j.contains("num_classes")) s.num_classes = as_int(j["num_classes"], "num_classes");
    if (j.contains("tubes_per_video")) s.tubes_per_video = as_int(j["tubes_per_video"], "tubes_per_video");
    if (j.contains("frames_per_video")) s.frames_per_video = as_int(j["frames_per_video"], "frames_per_video");
    if (j.contains("duration_min")) s.duration_min = as_int(j["duration_min"], "duration_min");
    if (j.contains("duration_max")) s.duration_max = as_int(j["duration_max"], "duration_max");
    if (j.contains("delta")) s.delta = as_int(j["delta"], "delta");
    if (j.contains("sparsity")) s.sparsity = as_int(j["sparsity"], "sparsity");
    validate(s);
    return s;
}

// --- transitions ---------------------------------------------------------------

std::string serialize(const TransitionCounts& counts) {
    json j = transition_header(counts.pyramid_hash, counts.delta);
    j["normalized"] = false;
    j["levels"] = json::array();
    for (std::size_t p = 0; p < counts.levels.size(); ++p) {
        json entries = json::array();
        for (const auto& [pair, n] : counts.levels[p].entries) {
            entries.push_back(json::array({pair.from, pair.to, n}));
        }
        j["levels"].push_back(level_json(p, counts.levels[p].grid, entries));
    }
    return j.dump() + "\n";
}

std::string serialize(const TransitionMatrix& matrix) {
    json j = transition_header(matrix.pyramid_hash, matrix.delta);
    j["normalized"] = true;
    j["levels"] = json::array();
    for (std::size_t p = 0; p < matrix.levels.size(); ++p) {
        json entries = json::array();
        for (const auto& [pair, prob] : matrix.levels[p].entries) {
            entries.push_back(json::array({pair.from, pair.to, prob}));
        }
        j["levels"].push_back(level_json(p, matrix.levels[p].grid, entries));
    }
    return j.dump() + "\n";
}

namespace {

template <typename Level, typename Reader>
std::vector<Level> parse_levels(const json& j, Reader read_entry) {
    std::vector<Level> levels;
    std::size_t expected_p = 1;
    for (const json& l : j["levels"]) {
        if (as_int(field(l, "p"), "p") != static_cast<int>(expected_p++)) {
            schema_error("levels must be listed in order p = 1, 2, ...");
        }
        Level level;
        level.grid = grid_from_rows(l);
        for (const json& e : as_array(field(l, "entries"), "entries")) {
            read_entry(level, e);
        }
        levels.push_back(std::move(level));
    }
    return levels;
}

}  // namespace

TransitionCounts parse_counts(std::string_view text) {
    const json j = parse_document(text, "transition counts");
    check_header(j);
    if (field(j, "normalized").get<bool>()) {
        schema_error("expected a count document (normalized = false)");
    }
    TransitionCounts c;
    c.pyramid_hash = j["pyramid_config_hash"].get<std::string>();
    c.delta = j["delta"].get<int>();
    c.levels = parse_levels<LevelCounts>(j, [](LevelCounts& level, const json& e) {
        if (!e.is_array() || e.size() != 3) schema_error("count entries are [i, j, count]");
        const int from = as_int(e[0], "i");
        const int to = as_int(e[1], "j");
        check_cell(from, level.grid);
        check_cell(to, level.grid);
        const std::int64_t n = as_int64(e[2], "count");
        if (n < 0) schema_error("counts must be >= 0");
        if (!level.entries.emplace(CellPair{from, to}, n).second) schema_error("duplicate entry");
    });
    return c;
}

TransitionMatrix parse_matrix(std::string_view text) {
    const json j = parse_document(text, "transition matrix");
    check_header(j);
    const json& flag = field(j, "normalized");
    if (!flag.is_boolean()) {
        schema_error("'normalized' must be a boolean");
    }
    if (!flag.get<bool>()) {
        return normalize(parse_counts(text));
    }
    TransitionMatrix m;
    m.pyramid_hash = j["pyramid_config_hash"].get<std::string>();
    m.delta = j["delta"].get<int>();
    m.levels = parse_levels<LevelMatrix>(j, [](LevelMatrix& level, const json& e) {
        if (!e.is_array() || e.size() != 3) schema_error("matrix entries are [i, j, probability]");
        const int from = as_int(e[0], "i");
        const int to = as_int(e[1], "j");
        check_cell(from, level.grid);
        check_cell(to, level.grid);
        const double v = as_double(e[2], "probability");
        if (!(v >= 0.0 && v <= 1.0)) schema_error("probabilities must lie in [0, 1]");
        if (!level.entries.emplace(CellPair{from, to}, v).second) schema_error("duplicate entry");
    });
    return m;
}

std::string serialize(const BinaryTransitions& b) {
    json j = transition_header(b.pyramid_hash, b.delta);
    j["binary"] = true;
    j["normalized"] = true;
    j["tau"] = b.tau;
    j["augmentations"] = b.augmentations;
    j["levels"] = json::array();
    for (std::size_t p = 0; p < b.levels.size(); ++p) {
        json entries = json::array();
        for (const CellPair& pair : b.levels[p].pairs) {
            entries.push_back(json::array({pair.from, pair.to}));
        }
        j["levels"].push_back(level_json(p, b.levels[p].grid, entries));
    }
    return j.dump() + "\n";
}

BinaryTransitions parse_binary(std::string_view text) {
    const json j = parse_document(text, "binary transitions");
    check_header(j);
    const json& flag = field(j, "binary");
    if (!flag.is_boolean() || !flag.get<bool>()) {
        schema_error("expected a binary transitions document");
    }
    BinaryTransitions b;
    b.pyramid_hash = j["pyramid_config_hash"].get<std::string>();
    b.delta = j["delta"].get<int>();
    b.tau = as_double(field(j, "tau"), "tau");
    for (const json& a : as_array(field(j, "augmentations"), "augmentations")) {
        b.augmentations.push_back(as_string(a, "augmentations"));
    }
    b.levels = parse_levels<LevelSupport>(j, [](LevelSupport& level, const json& e) {
        if (!e.is_array() || e.size() != 2) schema_error("binary entries are [i, j]");
        const int from = as_int(e[0], "i");
        const int to = as_int(e[1], "j");
        check_cell(from, level.grid);
        check_cell(to, level.grid);
        if (!level.pairs.insert({from, to}).second) schema_error("duplicate entry");
    });
    return b;
}

// --- annotations -----------------------------------------------------------------

std::string serialize(const Dataset& d) {
    json j;
    j["dataset"] = d.name;
    j["image_size"] = json::array({d.image_width, d.image_height});
    j["videos"] = json::array();
    for (const VideoAnnotation& v : d.videos) {
        json jv;
        jv["id"] = v.id;
        jv["n_frames"] = v.n_frames;
        jv["tubes"] = json::array();
        for (const AnnotatedTube& t : v.tubes) {
            json jt;
            jt["class"] = t.class_id;
            jt["keyframes"] = json::array();
            for (const Keyframe& k : t.keyframes) {
                jt["keyframes"].push_back(json::array({k.frame, box_json(k.box)}));
            }
            jv["tubes"].push_back(std::move(jt));
        }
        j["videos"].push_back(std::move(jv));
    }
    return j.dump() + "\n";
}

Dataset parse_dataset(std::string_view text) {
    const json j = parse_document(text, "annotations");
    Dataset d;
    d.name = as_string(field(j, "dataset"), "dataset");
    const json& size = field(j, "image_size");
    if (!size.is_array() || size.size() != 2) {
        schema_error("image_size must be [width, height]");
    }
    d.image_width = as_double(size[0], "image_size");
    d.image_height = as_double(size[1], "image_size");
    std::set<std::string> ids;
    for (const json& jv : as_array(field(j, "videos"), "videos")) {
        VideoAnnotation v;
        v.id = as_string(field(jv, "id"), "id");
        if (!ids.insert(v.id).second) {
            schema_error("duplicate video id '" + v.id + "'");
        }
        v.n_frames = as_int(field(jv, "n_frames"), "n_frames");
        for (const json& jt : as_array(field(jv, "tubes"), "tubes")) {
            AnnotatedTube t;
            t.class_id = as_int(field(jt, "class"), "class");
            for (const json& k : as_array(field(jt, "keyframes"), "keyframes")) {
                if (!k.is_array() || k.size() != 2) {
                    schema_error("keyframes are [frame, [x1, y1, x2, y2]]");
                }
                t.keyframes.push_back({as_int(k[0], "frame"), parse_box(k[1])});
            }
            v.tubes.push_back(std::move(t));
        }
        d.videos.push_back(std::move(v));
    }
    validate(d);
    return d;
}

// --- detections, paths, proposals --------------------------------------------------

std::string serialize(std::span<const ScoredMicroTube> dets) {
    std::string out;
    for (const ScoredMicroTube& d : dets) {
        json j;
        j["video_id"] = d.video_id;
        j["frame_start"] = d.tube.frame_start;
        j["delta"] = d.tube.delta;
        j["boxes"] = json::array({box_json(d.tube.box_start), box_json(d.tube.box_end)});
        j["scores"] = d.scores;
        if (!d.stream.empty()) {
            j["stream"] = d.stream;
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<ScoredMicroTube> parse_detections(std::string_view text) {
    std::vector<ScoredMicroTube> out;
    for (const json& j : parse_lines(text)) {
        ScoredMicroTube d;
        d.video_id = as_string(field(j, "video_id"), "video_id");
        d.tube.frame_start = as_int(field(j, "frame_start"), "frame_start");
        d.tube.delta = as_int(field(j, "delta"), "delta");
        if (d.tube.delta < 1) schema_error("delta must be >= 1");
        const json& boxes = field(j, "boxes");
        if (!boxes.is_array() || boxes.size() != 2) schema_error("boxes must hold exactly two boxes");
        d.tube.box_start = parse_box(boxes[0]);
        d.tube.box_end = parse_box(boxes[1]);
        for (const json& s : as_array(field(j, "scores"), "scores")) {
            d.scores.push_back(as_double(s, "scores"));
        }
        if (d.scores.size() < 2) schema_error("scores need background plus at least one class");
        if (j.contains("stream")) d.stream = as_string(j["stream"], "stream");
        out.push_back(std::move(d));
    }
    return out;
}

std::string serialize(std::span<const ActionPath> paths) {
    std::string out;
    for (const ActionPath& p : paths) {
        json j;
        j["video_id"] = p.video_id;
        j["class"] = p.class_id;
        j["t_start"] = p.t_start;
        j["t_end"] = p.t_end;
        j["boxes"] = json::array();
        for (const Box& b : p.boxes) j["boxes"].push_back(box_json(b));
        j["frame_scores"] = p.frame_scores;
        j["steps"] = json::array();
        for (const PathStep& s : p.steps) {
            j["steps"].push_back({{"frame_start", s.frame_start},
                                  {"delta", s.delta},
                                  {"score", s.score},
                                  {"group", s.group},
                                  {"index", s.index}});
        }
        j["score"] = p.score;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<ActionPath> parse_paths(std::string_view text) {
    std::vector<ActionPath> out;
    for (const json& j : parse_lines(text)) {
        ActionPath p;
        p.video_id = as_string(field(j, "video_id"), "video_id");
        p.class_id = as_int(field(j, "class"), "class");
        p.t_start = as_int(field(j, "t_start"), "t_start");
        p.t_end = as_int(field(j, "t_end"), "t_end");
        if (p.t_end < p.t_start) schema_error("t_end before t_start");
        for (const json& b : as_array(field(j, "boxes"), "boxes")) p.boxes.push_back(parse_box(b));
        if (static_cast<int>(p.boxes.size()) != p.length()) {
            schema_error("a path needs one box per frame of [t_start, t_end]");
        }
        if (j.contains("frame_scores")) {
            for (const json& s : as_array(j["frame_scores"], "frame_scores")) {
                p.frame_scores.push_back(as_double(s, "frame_scores"));
            }
            if (p.frame_scores.size() != p.boxes.size()) schema_error("frame_scores length mismatch");
        }
        if (j.contains("steps")) {
            for (const json& s : as_array(j["steps"], "steps")) {
                PathStep step;
                step.frame_start = as_int(field(s, "frame_start"), "frame_start");
                step.delta = as_int(field(s, "delta"), "delta");
                step.score = as_double(field(s, "score"), "score");
                if (s.contains("group")) step.group = as_int(s["group"], "group");
                if (s.contains("index")) step.index = as_int(s["index"], "index");
                p.steps.push_back(step);
            }
        }
        p.score = as_double(field(j, "score"), "score");
        out.push_back(std::move(p));
    }
    return out;
}

std::string serialize(std::span<const AnchorMicroTube> proposals) {
    std::string out;
    for (const AnchorMicroTube& a : proposals) {
        json j;
        j["level"] = a.level + 1;
        j["cell_i"] = a.cell_i;
        j["cell_j"] = a.cell_j;
        j["shape"] = a.shape;
        j["box_start"] = box_json(a.box_start);
        j["box_end"] = box_json(a.box_end);
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<AnchorMicroTube> parse_proposals(std::string_view text) {
    std::vector<AnchorMicroTube> out;
    for (const json& j : parse_lines(text)) {
        AnchorMicroTube a;
        a.level = as_int(field(j, "level"), "level") - 1;
        if (a.level < 0) schema_error("levels are numbered from 1");
        a.cell_i = as_int(field(j, "cell_i"), "cell_i");
        a.cell_j = as_int(field(j, "cell_j"), "cell_j");
        a.shape = as_int(field(j, "shape"), "shape");
        a.box_start = parse_box(field(j, "box_start"));
        a.box_end = parse_box(field(j, "box_end"));
        out.push_back(a);
    }
    return out;
}

// --- metrics -------------------------------------------------------------------------

std::string delta_key(double delta) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", delta);
    return buf;
}

std::string serialize(const MetricsReport& report) {
    json j;
    j["per_class_ap"] = json::object();
    j["map_by_delta"] = json::object();
    for (const MapResult& r : report.by_delta) {
        json per_class = json::object();
        for (const auto& [c, ap] : r.per_class_ap) {
            per_class[std::to_string(c)] = ap;
        }
        j["per_class_ap"][delta_key(r.delta)] = per_class;
        j["map_by_delta"][delta_key(r.delta)] = r.map;
    }
    j["avg_map"] = report.avg_map ? json(*report.avg_map) : json(nullptr);
    j["accuracy"] = report.accuracy;
    j["trimmed_protocol"] = report.trimmed_protocol;
    return j.dump(2) + "\n";
}

std::string format_table(const MetricsReport& report) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-8s %-8s\n", "delta", "mAP");
    out += buf;
    for (const MapResult& r : report.by_delta) {
        std::snprintf(buf, sizeof buf, "%-8s %7.4f\n", delta_key(r.delta).c_str(), r.map);
        out += buf;
    }
    if (report.avg_map) {
        std::snprintf(buf, sizeof buf, "%-8s %7.4f\n", "avg", *report.avg_map);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%-8s %7.4f\n", "accuracy", report.accuracy);
    out += buf;
    return out;
}

}  // namespace microtube::io
