// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "microtube/error.hpp"
#include "microtube/io.hpp"

namespace microtube::cli {
namespace {

namespace fs = std::filesystem;

// Config files may be TOML or JSON; TOML is converted to JSON so both go
// through the same validating parsers.
std::string config_text(const std::string& path) {
    std::string text = io::read_file(path);
    if (fs::path(path).extension() != ".toml") {
        return text;
    }
    try {
        const toml::table table = toml::parse(text, path);
        std::ostringstream ss;
        ss << toml::json_formatter{table};
        return ss.str();
    } catch (const toml::parse_error& e) {
        throw Error(ErrorCode::schema, path + ": " + std::string(e.description()));
    }
}

PyramidConfig load_pyramid(const std::string& path) {
    return path.empty() ? PyramidConfig::ssd300() : io::parse_pyramid_config(config_text(path));
}

Dataset load_normalized(const std::string& path) { return normalized(io::parse_dataset(io::read_file(path))); }

struct EstimateArgs {
    std::string annotations, config, out;
    int delta = 1;
    std::size_t shards = 1;
    bool normalize_output = false;
};

void cmd_estimate(const EstimateArgs& a) {
    const AnchorSet anchors = build_pyramid(load_pyramid(a.config));
    const std::vector<MicroTube> gts = extract_microtubes(load_normalized(a.annotations), a.delta);
    if (gts.empty()) {
        throw Error(ErrorCode::invalid_argument,
                    "no micro-tubes with delta " + std::to_string(a.delta) + " in " + a.annotations);
    }
    const TransitionCounts counts = estimate_sharded(gts, anchors, a.shards);
    io::write_file(a.out, a.normalize_output ? io::serialize(normalize(counts)) : io::serialize(counts));
}

struct ThresholdArgs {
    std::string matrix, out;
    double tau = 0.10;
    std::vector<std::string> augment;
};

void cmd_threshold(const ThresholdArgs& a) {
    BinaryTransitions b = threshold(io::parse_matrix(io::read_file(a.matrix)), a.tau);
    for (const std::string& name : a.augment) {
        if (name == "diagonal") {
            b = augment_diagonal(b);
        } else if (name == "neighbors") {
            b = augment_neighbors(b);
        } else if (name == "offsets") {
            b = augment_relative_offsets(b);
        } else {
            throw Error(ErrorCode::invalid_argument, "unknown augmentation '" + name + "'");
        }
    }
    io::write_file(a.out, io::serialize(b));
}

struct ProposeArgs {
    std::string bin, config, out;
};

void cmd_propose(const ProposeArgs& a, std::ostream& out) {
    const AnchorSet anchors = build_pyramid(load_pyramid(a.config));
    const std::vector<AnchorMicroTube> proposals =
        enumerate_proposals(io::parse_binary(io::read_file(a.bin)), anchors);
    io::write_file(a.out, io::serialize(std::span<const AnchorMicroTube>(proposals)));
    out << proposals.size() << " proposals\n";
}

struct GenArgs {
    std::string spec, out;
    std::optional<std::string> kind;
    std::optional<double> velocity_x, velocity_y, walk_sigma;
    std::optional<int> num_classes, tubes_per_video, frames, sparsity;
    int videos = 20;
    std::uint64_t seed = 0;
    std::vector<double> image_size;
};

void cmd_gen(const GenArgs& a) {
    MotionSpec spec = a.spec.empty() ? MotionSpec{} : io::parse_motion_spec(config_text(a.spec));
    if (a.kind) spec.kind = motion_kind_from_string(*a.kind);
    if (a.velocity_x) spec.velocity_x = *a.velocity_x;
    if (a.velocity_y) spec.velocity_y = *a.velocity_y;
    if (a.walk_sigma) spec.walk_sigma = *a.walk_sigma;
    if (a.num_classes) spec.num_classes = *a.num_classes;
    if (a.tubes_per_video) spec.tubes_per_video = *a.tubes_per_video;
    if (a.frames) spec.frames_per_video = *a.frames;
    if (a.sparsity) spec.sparsity = *a.sparsity;
    Dataset d = generate_dataset(spec, a.videos, a.seed);
    if (!a.image_size.empty()) {
        d = to_pixels(d, a.image_size[0], a.image_size[1]);
    }
    io::write_file(a.out, io::serialize(d));
}

struct TransformArgs {
    std::string annotations, out;
    int max_pad_x = 32;
    int max_pad_y = 20;
    std::uint64_t seed = 0;
    std::vector<double> image_size;
};

void cmd_transform(const TransformArgs& a) {
    Dataset d = io::parse_dataset(io::read_file(a.annotations));
    if (d.is_normalized() && !a.image_size.empty()) {
        d = to_pixels(d, a.image_size[0], a.image_size[1]);
    }
    io::write_file(a.out, io::serialize(transform_annotations(d, {a.max_pad_x, a.max_pad_y}, a.seed)));
}

struct DetectArgs {
    std::string annotations, bin, config, out, stream;
    int delta = 1;
    DetectionNoise noise;
    std::uint64_t seed = 0;
};

void cmd_detect(const DetectArgs& a) {
    const AnchorSet anchors = build_pyramid(load_pyramid(a.config));
    BinaryTransitions b = a.bin.empty() ? diagonal_transitions(anchors, a.delta) : io::parse_binary(io::read_file(a.bin));
    std::vector<ScoredMicroTube> dets =
        simulate_detections(load_normalized(a.annotations), anchors, b, a.delta, a.noise, a.seed);
    if (!a.stream.empty()) {
        for (ScoredMicroTube& d : dets) d.stream = a.stream;
    }
    io::write_file(a.out, io::serialize(std::span<const ScoredMicroTube>(dets)));
}

struct LinkArgs {
    std::string dets, params, out;
    std::size_t threads = 1;
};

void cmd_link(const LinkArgs& a) {
    const LinkParams params = a.params.empty() ? LinkParams{} : io::parse_link_params(config_text(a.params));
    const std::vector<ScoredMicroTube> dets = io::parse_detections(io::read_file(a.dets));
    const std::vector<ActionPath> paths = link_all(dets, params, a.threads);
    io::write_file(a.out, io::serialize(std::span<const ActionPath>(paths)));
}

struct TrimArgs {
    std::string paths, out;
    double alpha = 0.5;
};

void cmd_trim(const TrimArgs& a) {
    std::vector<ActionPath> out;
    for (const ActionPath& p : io::parse_paths(io::read_file(a.paths))) {
        for (ActionPath& t : trim_path(p, a.alpha)) {
            out.push_back(std::move(t));
        }
    }
    io::write_file(a.out, io::serialize(std::span<const ActionPath>(out)));
}

struct EvalArgs {
    std::string paths, gt, report;
    std::vector<double> deltas{0.2, 0.5, 0.75};
    bool avg = false;
    bool trimmed_protocol = false;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
    const Dataset gts = load_normalized(a.gt);
    std::vector<ActionPath> paths = io::parse_paths(io::read_file(a.paths));
    if (a.trimmed_protocol) {
        paths = clip_to_ground_truth(paths, gts);
    }
    io::MetricsReport report;
    report.trimmed_protocol = a.trimmed_protocol;
    if (a.avg) {
        const AvgMapResult r = avg_map(paths, gts);
        report.by_delta = r.per_delta;
        report.avg_map = r.avg_map;
    } else {
        for (double d : a.deltas) {
            report.by_delta.push_back(video_map(paths, gts, d));
        }
    }
    report.accuracy = classification_accuracy(paths, gts);
    if (!a.report.empty()) {
        io::write_file(a.report, io::serialize(report));
    }
    out << io::format_table(report);
}

struct FuseArgs {
    std::string a, b, out;
};

void cmd_fuse(const FuseArgs& a) {
    const std::vector<ScoredMicroTube> x = io::parse_detections(io::read_file(a.a));
    const std::vector<ScoredMicroTube> y = io::parse_detections(io::read_file(a.b));
    const std::vector<ScoredMicroTube> fused = fuse_streams(x, y);
    io::write_file(a.out, io::serialize(std::span<const ScoredMicroTube>(fused)));
}

void report_error(std::ostream& err, std::string_view code, const std::string& message) {
    err << nlohmann::json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Anchor micro-tube transitions, linking and video-mAP evaluation", "microtube"};
    app.require_subcommand(1);
    std::function<void()> action;

    EstimateArgs est;
    auto* estimate_cmd = app.add_subcommand("estimate", "Count anchor-cell transitions in annotations");
    estimate_cmd->add_option("--annotations", est.annotations)->required();
    estimate_cmd->add_option("--delta", est.delta)->required()->check(CLI::PositiveNumber);
    estimate_cmd->add_option("--config", est.config, "Pyramid config (.toml or .json); default SSD300");
    estimate_cmd->add_option("--shards", est.shards, "Worker threads")->check(CLI::PositiveNumber);
    estimate_cmd->add_flag("--normalized", est.normalize_output, "Write row-normalized probabilities");
    estimate_cmd->add_option("--out", est.out)->required();
    estimate_cmd->callback([&] { action = [&] { cmd_estimate(est); }; });

    ThresholdArgs thr;
    auto* threshold_cmd = app.add_subcommand("threshold", "Binarize a transition matrix");
    threshold_cmd->add_option("--matrix", thr.matrix)->required();
    threshold_cmd->add_option("--tau", thr.tau);
    threshold_cmd->add_option("--augment", thr.augment, "diagonal, neighbors or offsets; repeatable")
        ->check(CLI::IsMember({"diagonal", "neighbors", "offsets"}));
    threshold_cmd->add_option("--out", thr.out)->required();
    threshold_cmd->callback([&] { action = [&] { cmd_threshold(thr); }; });

    ProposeArgs prop;
    auto* propose_cmd = app.add_subcommand("propose", "Enumerate anchor micro-tubes");
    propose_cmd->add_option("--bin", prop.bin)->required();
    propose_cmd->add_option("--config", prop.config);
    propose_cmd->add_option("--out", prop.out)->required();
    propose_cmd->callback([&] { action = [&] { cmd_propose(prop, out); }; });

    auto* synth_cmd = app.add_subcommand("synth", "Synthetic annotations and detections");
    synth_cmd->require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = synth_cmd->add_subcommand("gen", "Generate annotated videos");
    gen_cmd->add_option("--spec", gen.spec, "MotionSpec file (.toml or .json)");
    gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"static", "linear_drift", "random_walk"}));
    gen_cmd->add_option("--velocity-x", gen.velocity_x);
    gen_cmd->add_option("--velocity-y", gen.velocity_y);
    gen_cmd->add_option("--walk-sigma", gen.walk_sigma);
    gen_cmd->add_option("--num-classes", gen.num_classes);
    gen_cmd->add_option("--tubes-per-video", gen.tubes_per_video);
    gen_cmd->add_option("--frames", gen.frames);
    gen_cmd->add_option("--sparsity", gen.sparsity);
    gen_cmd->add_option("--videos", gen.videos)->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--image-size", gen.image_size, "Write pixel boxes for a W H canvas")->expected(2);
    gen_cmd->add_option("--seed", gen.seed)->required();
    gen_cmd->add_option("--out", gen.out)->required();
    gen_cmd->callback([&] { action = [&] { cmd_gen(gen); }; });

    TransformArgs tf;
    auto* transform_cmd = synth_cmd->add_subcommand("transform", "Random per-video padding of pixel annotations");
    transform_cmd->add_option("--annotations", tf.annotations)->required();
    transform_cmd->add_option("--max-pad-x", tf.max_pad_x)->check(CLI::NonNegativeNumber);
    transform_cmd->add_option("--max-pad-y", tf.max_pad_y)->check(CLI::NonNegativeNumber);
    transform_cmd->add_option("--image-size", tf.image_size, "Canvas W H for normalized input")->expected(2);
    transform_cmd->add_option("--seed", tf.seed)->required();
    transform_cmd->add_option("--out", tf.out)->required();
    transform_cmd->callback([&] { action = [&] { cmd_transform(tf); }; });

    DetectArgs det;
    auto* detect_cmd = synth_cmd->add_subcommand("detect", "Oracle detections from annotations");
    detect_cmd->add_option("--annotations", det.annotations)->required();
    detect_cmd->add_option("--bin", det.bin, "Transitions used to draw distractors; default diagonal");
    detect_cmd->add_option("--config", det.config);
    detect_cmd->add_option("--delta", det.delta)->check(CLI::PositiveNumber);
    detect_cmd->add_option("--sigma", det.noise.sigma);
    detect_cmd->add_option("--true-score", det.noise.true_score);
    detect_cmd->add_option("--distractor-rate", det.noise.distractor_rate);
    detect_cmd->add_option("--num-classes", det.noise.num_classes);
    detect_cmd->add_option("--stream", det.stream, "Stream tag written on every detection");
    detect_cmd->add_option("--seed", det.seed)->required();
    detect_cmd->add_option("--out", det.out)->required();
    detect_cmd->callback([&] { action = [&] { cmd_detect(det); }; });

    LinkArgs lk;
    auto* link_cmd = app.add_subcommand("link", "Link scored micro-tubes into action paths");
    link_cmd->add_option("--dets", lk.dets)->required();
    link_cmd->add_option("--params", lk.params, "Link parameters (.toml or .json)");
    link_cmd->add_option("--threads", lk.threads)->check(CLI::PositiveNumber);
    link_cmd->add_option("--out", lk.out)->required();
    link_cmd->callback([&] { action = [&] { cmd_link(lk); }; });

    TrimArgs tr;
    auto* trim_cmd = app.add_subcommand("trim", "Temporally trim action paths");
    trim_cmd->add_option("--paths", tr.paths)->required();
    trim_cmd->add_option("--alpha", tr.alpha)->check(CLI::NonNegativeNumber);
    trim_cmd->add_option("--out", tr.out)->required();
    trim_cmd->callback([&] { action = [&] { cmd_trim(tr); }; });

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Video-mAP of action paths");
    eval_cmd->add_option("--paths", ev.paths)->required();
    eval_cmd->add_option("--gt", ev.gt)->required();
    auto* deltas_opt = eval_cmd->add_option("--deltas", ev.deltas)->delimiter(',');
    eval_cmd->add_flag("--avg", ev.avg, "Average over 0.50:0.05:0.95")->excludes(deltas_opt);
    eval_cmd->add_flag("--trimmed-protocol", ev.trimmed_protocol, "Clip paths to ground-truth extents");
    eval_cmd->add_option("--report", ev.report);
    eval_cmd->callback([&] { action = [&] { cmd_eval(ev, out); }; });

    FuseArgs fu;
    auto* fuse_cmd = app.add_subcommand("fuse", "Average the scores of two aligned detection streams");
    fuse_cmd->add_option("--a", fu.a)->required();
    fuse_cmd->add_option("--b", fu.b)->required();
    fuse_cmd->add_option("--out", fu.out)->required();
    fuse_cmd->callback([&] { action = [&] { cmd_fuse(fu); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return 2;
    }

    try {
        action();
    } catch (const Error& e) {
        report_error(err, to_string(e.code()), e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
        return 1;
    }
    return 0;
}

}  // namespace microtube::cli
