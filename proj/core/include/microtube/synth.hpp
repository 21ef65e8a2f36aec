// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "microtube/anchor_pyramid.hpp"
#include "microtube/annotation.hpp"
#include "microtube/linking.hpp"
#include "microtube/transition.hpp"

namespace microtube {

enum class MotionKind { static_actor, linear_drift, random_walk };

std::string to_string(MotionKind kind);
MotionKind motion_kind_from_string(const std::string& name);

/**
 * @brief Controls the synthetic ground-truth generator.
 *
 * Coordinates are normalized. Velocities are in image widths/heights per
 * frame. Tube extents are aligned to a delta grid (start frames 1 + k*delta,
 * durations n*delta + 1 frames) so that oracle detections tile them exactly.
 */
struct MotionSpec {
    MotionKind kind = MotionKind::linear_drift;
    double velocity_x = 0.02;
    double velocity_y = 0.0;
    /// Per-frame standard deviation of the velocity change (random_walk only).
    double walk_sigma = 0.005;
    double size_min = 0.15;
    double size_max = 0.35;
    int num_classes = 1;
    int tubes_per_video = 1;
    int frames_per_video = 40;
    /// Tube duration bounds in frames.
    int duration_min = 21;
    int duration_max = 31;
    int delta = 1;
    /// Annotate every m-th frame of a tube; the last frame is always annotated.
    int sparsity = 1;

    bool operator==(const MotionSpec&) const = default;
};

/// Throws Error(invalid_argument) for inconsistent specs.
void validate(const MotionSpec& spec);

/// Deterministic in (spec, seed); video k draws from its own stream.
Dataset generate_dataset(const MotionSpec& spec, int n_videos, std::uint64_t seed);

/// All keyframe pairs exactly delta apart. A tube with a single keyframe
/// yields one micro-tube that repeats that box.
std::vector<MicroTube> extract_microtubes(const VideoAnnotation& video, int delta);
std::vector<MicroTube> extract_microtubes(const Dataset& dataset, int delta);

struct PaddingSpec {
    int max_pad_x = 32;
    int max_pad_y = 20;
};

/// Random per-video padding: left pad ~ U{0..max_pad_x}, top pad likewise;
/// boxes shift by (left, top) and the canvas grows by the maximum pads.
Dataset transform_annotations(const Dataset& dataset, PaddingSpec pads, std::uint64_t seed);

struct DetectionNoise {
    /// Gaussian jitter on every normalized coordinate.
    double sigma = 0.0;
    /// Confidence given to the true class; the rest goes to background.
    double true_score = 1.0;
    /// Mean number of distractors per detection group (Poisson).
    double distractor_rate = 0.0;
    int num_classes = 1;
};

/**
 * Oracle detector. Every step of the delta grid that a ground-truth tube
 * covers yields one jittered detection for it; distractors are proposals
 * drawn from the enumerated anchor micro-tubes with background-dominant
 * scores. The dataset must be normalized. Output is ordered by video id,
 * then start frame.
 */
std::vector<ScoredMicroTube> simulate_detections(const Dataset& dataset, const AnchorSet& anchors,
                                                 const BinaryTransitions& transitions, int delta,
                                                 const DetectionNoise& noise, std::uint64_t seed);

/// Derives the random stream for one video from the global seed.
std::uint64_t stream_seed(std::uint64_t seed, const std::string& video_id);

}  // namespace microtube
