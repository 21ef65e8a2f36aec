// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "microtube/geometry.hpp"

namespace microtube {

/// A detection micro-tube with C+1 class confidences; index 0 is background.
struct ScoredMicroTube {
    std::string video_id;
    MicroTube tube;
    std::vector<double> scores;
    std::string stream;

    double score(int class_id) const { return scores.at(static_cast<std::size_t>(class_id)); }

    bool operator==(const ScoredMicroTube&) const = default;
};

/// Detections starting at frame_start and ending at frame_start + delta.
struct DetectionGroup {
    int frame_start = 0;
    int delta = 1;
    std::vector<ScoredMicroTube> dets;
};

struct LinkParams {
    /// Weight of the IoU term in score + weight * IoU.
    double iou_weight = 1.0;
    /// Candidates scoring below this for the linked class are ignored.
    double score_floor = 0.01;
    /// A path is closed after this many consecutive unmatched steps.
    int max_misses = 3;
    double nms_threshold = 0.45;
    /// Candidates kept per step after suppression.
    int top_n = 10;
};

/// Throws Error(invalid_argument) on negative weights or max_misses < 1.
void validate(const LinkParams& params);

struct PathStep {
    int frame_start = 0;
    int delta = 1;
    double score = 0.0;
    /// Index of the detection group and of the detection inside it; -1 when unknown.
    int group = -1;
    int index = -1;

    bool operator==(const PathStep&) const = default;
};

/**
 * @brief A class-specific tube built from linked micro-tubes.
 *
 * boxes and frame_scores hold one entry per frame of [t_start, t_end].
 * score is the mean of the step scores.
 */
struct ActionPath {
    std::string video_id;
    int class_id = 0;
    int t_start = 0;
    int t_end = 0;
    std::vector<Box> boxes;
    std::vector<double> frame_scores;
    std::vector<PathStep> steps;
    double score = 0.0;

    int length() const { return t_end - t_start + 1; }
    bool covers(int frame) const { return frame >= t_start && frame <= t_end; }
    const Box& box_at(int frame) const { return boxes.at(static_cast<std::size_t>(frame - t_start)); }

    bool operator==(const ActionPath&) const = default;
};

/// Greedy suppression by descending class score. Returns surviving indices in
/// score order; equal scores keep input order.
std::vector<std::size_t> nms_microtubes(std::span<const ScoredMicroTube> dets, int class_id,
                                        double thresh);

/// Per-frame boxes for frames frame_start..frame_end by linear interpolation.
std::vector<Box> interpolate(const MicroTube& mt);

/**
 * Online greedy linking of one class over consecutive detection groups.
 *
 * Each step, active paths in descending score order take the unclaimed
 * candidate maximizing score + iou_weight * IoU(path end, candidate start)
 * among candidates with positive IoU. Unclaimed candidates start new paths.
 * Throws Error(frame_misalignment) when a group does not start where the
 * previous one ended.
 */
std::vector<ActionPath> link(std::span<const DetectionGroup> groups, const LinkParams& params,
                             int class_id);

/// Detections of each video arranged into contiguous groups; empty groups
/// fill frames with no detections. Keyed and therefore ordered by video id.
std::map<std::string, std::vector<DetectionGroup>> group_by_video(std::span<const ScoredMicroTube> dets);

/// link() for every video and every foreground class, ordered by video id then class.
std::vector<ActionPath> link_all(std::span<const ScoredMicroTube> dets, const LinkParams& params,
                                 std::size_t threads = 1);

/// Inclusive index range into a score sequence.
struct Segment {
    int first = 0;
    int last = 0;

    bool operator==(const Segment&) const = default;
};

/// Objective maximized by trim() for a given labeling (true = action).
double trim_objective(std::span<const double> scores, const std::vector<bool>& labels, double switch_cost);

/**
 * Exact two-state Viterbi labeling of frames into action and background.
 *
 * Maximizes sum_t f(l_t, t) - switch_cost * #switches with f(action) = s(t)
 * and f(background) = 1 - s(t). Among optimal labelings the one preferring
 * background at the earliest differing frame wins. Returns the action runs.
 * Throws Error(invalid_argument) for an empty sequence or negative cost.
 */
std::vector<Segment> trim(std::span<const double> scores, double switch_cost);

/// trim() applied to a path's frame scores; every run becomes its own path.
std::vector<ActionPath> trim_path(const ActionPath& path, double switch_cost);

/// Mean fusion of two streams over the same proposal index space.
/// Throws Error(length_mismatch) when the streams do not line up.
std::vector<ScoredMicroTube> fuse_streams(std::span<const ScoredMicroTube> a,
                                          std::span<const ScoredMicroTube> b);

}  // namespace microtube
