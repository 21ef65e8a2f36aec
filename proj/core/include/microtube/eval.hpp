// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "microtube/annotation.hpp"
#include "microtube/linking.hpp"

namespace microtube {

/// Temporal IoU of the extents times the mean per-frame IoU over their
/// intersection; 0 when the extents do not intersect.
double tube_st_iou(const ActionPath& a, const ActionPath& b);

/// Dense path for a ground-truth tube; gaps between keyframes are interpolated.
ActionPath to_path(const AnnotatedTube& tube, const std::string& video_id);

/**
 * All-point interpolated average precision.
 * `hits` flags each ranked detection as true (TP) or false (FP) positive.
 */
double average_precision(const std::vector<bool>& hits, std::size_t num_gt);

struct MapResult {
    double delta = 0.5;
    /// Keyed by class id; only classes with at least one ground-truth tube.
    std::map<int, double> per_class_ap;
    double map = 0.0;
};

/**
 * Video-mAP at one spatiotemporal IoU threshold.
 *
 * Detections are ranked by score (ties: lower video id, then input order)
 * and each is greedily matched to the best still-unmatched ground-truth tube
 * of its class in its video when the overlap is >= delta.
 * Boxes of detections and ground truth must share units.
 */
MapResult video_map(std::span<const ActionPath> dets, const Dataset& gts, double delta);

/// {0.50, 0.55, ..., 0.95}.
std::vector<double> avg_map_thresholds();

struct AvgMapResult {
    std::vector<MapResult> per_delta;
    double avg_map = 0.0;
};

AvgMapResult avg_map(std::span<const ActionPath> dets, const Dataset& gts);

/// Fraction of annotated videos whose top-scoring tube carries one of the
/// video's ground-truth classes. Videos without detections count as misses.
double classification_accuracy(std::span<const ActionPath> dets, const Dataset& gts);

/// Clips every detection to the span of its video's ground-truth tubes
/// (trimmed-video protocol). Paths left with no frames are dropped.
std::vector<ActionPath> clip_to_ground_truth(std::span<const ActionPath> dets, const Dataset& gts);

}  // namespace microtube
