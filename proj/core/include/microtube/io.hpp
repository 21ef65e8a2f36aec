// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "microtube/anchor_pyramid.hpp"
#include "microtube/annotation.hpp"
#include "microtube/eval.hpp"
#include "microtube/linking.hpp"
#include "microtube/proposals.hpp"
#include "microtube/synth.hpp"
#include "microtube/transition.hpp"

// Serialization for every on-disk artifact. Writers are canonical (sorted
// keys, shortest round-trip doubles), so equal values give equal bytes.
// Readers validate structure and throw Error(schema) on violations.
// Pyramid levels are numbered from 1 in files.
namespace microtube::io {

inline constexpr int kFormatVersion = 1;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string serialize(const PyramidConfig& config);
PyramidConfig parse_pyramid_config(std::string_view json);

std::string serialize(const LinkParams& params);
LinkParams parse_link_params(std::string_view json);

std::string serialize(const MotionSpec& spec);
MotionSpec parse_motion_spec(std::string_view json);

// Transition documents:
// {format_version, pyramid_config_hash, delta, normalized,
//  levels: [{p, rows, cols, entries: [[i, j, value], ...]}]}
std::string serialize(const TransitionCounts& counts);
std::string serialize(const TransitionMatrix& matrix);
TransitionCounts parse_counts(std::string_view json);
/// Accepts both count and normalized documents; counts are normalized.
TransitionMatrix parse_matrix(std::string_view json);

// Same layout with entries [[i, j], ...], plus tau and augmentations.
std::string serialize(const BinaryTransitions& b);
BinaryTransitions parse_binary(std::string_view json);

// {dataset, image_size: [w, h],
//  videos: [{id, n_frames, tubes: [{class, keyframes: [[frame, [x1,y1,x2,y2]], ...]}]}]}
std::string serialize(const Dataset& dataset);
Dataset parse_dataset(std::string_view json);

// One JSON object per line.
std::string serialize(std::span<const ScoredMicroTube> dets);
std::vector<ScoredMicroTube> parse_detections(std::string_view jsonl);

std::string serialize(std::span<const ActionPath> paths);
std::vector<ActionPath> parse_paths(std::string_view jsonl);

std::string serialize(std::span<const AnchorMicroTube> proposals);
std::vector<AnchorMicroTube> parse_proposals(std::string_view jsonl);

struct MetricsReport {
    std::vector<MapResult> by_delta;
    std::optional<double> avg_map;
    double accuracy = 0.0;
    bool trimmed_protocol = false;
};

/// Threshold keys are rendered with two decimals ("0.50").
std::string delta_key(double delta);

// {per_class_ap: {delta: {class: ap}}, map_by_delta: {delta: map}, avg_map, accuracy}
std::string serialize(const MetricsReport& report);

/// Fixed-width text table of the same numbers.
std::string format_table(const MetricsReport& report);

}  // namespace microtube::io
