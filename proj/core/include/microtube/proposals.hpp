// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "microtube/anchor_pyramid.hpp"
#include "microtube/geometry.hpp"
#include "microtube/transition.hpp"

namespace microtube {

/// Anchor box at cell_i for frame t paired with the same shape at cell_j for t + delta.
struct AnchorMicroTube {
    int level = 0;
    int cell_i = 0;
    int cell_j = 0;
    int shape = 0;
    Box box_start;
    Box box_end;

    bool is_cuboid() const { return cell_i == cell_j; }

    bool operator==(const AnchorMicroTube&) const = default;
};

/// Per endpoint frame: (dcx, dcy, dw, dh) in SSD parameterization.
using RegressionTarget = std::array<std::array<double, 4>, 2>;

struct BoxCoding {
    double center_variance = 0.1;
    double size_variance = 0.2;
};

/**
 * Every (pair, shape) combination of the support, ordered by level, cell_i,
 * cell_j and shape. Produces exactly sum_p |A_p| * r_p proposals.
 * Throws Error(config_mismatch) when b was built for another pyramid.
 */
std::vector<AnchorMicroTube> enumerate_proposals(const BinaryTransitions& b, const AnchorSet& anchors);

/// Throws Error(invalid_argument) for zero-area anchor or ground-truth boxes.
RegressionTarget encode(const MicroTube& g, const AnchorMicroTube& a, BoxCoding coding = {});

struct FrameSpan {
    int frame_start = 0;
    int delta = 1;
};

/// Inverse of encode(); decoded boxes are clipped to [0,1] unless clip is false.
MicroTube decode(const AnchorMicroTube& a, const RegressionTarget& t, FrameSpan span = {},
                 bool clip_to_unit = true, BoxCoding coding = {});

inline double microtube_overlap(const MicroTube& g, const AnchorMicroTube& a) {
    return pair_overlap(g.box_start, g.box_end, a.box_start, a.box_end);
}

struct Matching {
    /// GT index per proposal, -1 when unassigned.
    std::vector<int> proposal_to_gt;
    /// Overlap of each proposal with its assigned GT (0 when unassigned).
    std::vector<double> proposal_overlap;
    /// Best proposal per GT (-1 when none overlaps it) and its overlap.
    std::vector<int> gt_best_proposal;
    std::vector<double> gt_best_overlap;
};

/**
 * SSD-style matching. Every proposal whose best GT overlap reaches iou_min is
 * assigned to that GT, then every GT claims its own best proposal whenever
 * that overlap is positive. A proposal claimed by several GTs goes to the
 * highest overlap, ties to the lower GT index.
 * Throws Error(invalid_argument) unless iou_min is in (0, 1).
 */
Matching match_positives(std::span<const MicroTube> gts, std::span<const AnchorMicroTube> proposals,
                         double iou_min = 0.5);

/// Best proposal overlap for every GT (0 when there are no proposals).
std::vector<double> best_overlaps(std::span<const MicroTube> gts,
                                  std::span<const AnchorMicroTube> proposals);

/// Fraction of GTs whose best proposal overlap is >= delta. 0 for no GTs.
double proposal_recall(std::span<const MicroTube> gts, std::span<const AnchorMicroTube> proposals,
                       double delta);

}  // namespace microtube
