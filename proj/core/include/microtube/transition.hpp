// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "microtube/anchor_pyramid.hpp"
#include "microtube/geometry.hpp"

namespace microtube {

/// A transition between grid cells at frames t (from) and t + delta (to).
struct CellPair {
    int from = 0;
    int to = 0;

    auto operator<=>(const CellPair&) const = default;
};

// Per-level storage is sparse and ordered by (from, to), which keeps rows
// contiguous and serialization canonical.

struct LevelCounts {
    int grid = 0;
    std::map<CellPair, std::int64_t> entries;

    bool operator==(const LevelCounts&) const = default;
};

struct TransitionCounts {
    std::string pyramid_hash;
    int delta = 1;
    std::vector<LevelCounts> levels;

    std::int64_t total() const;
    /// Elementwise addition; throws Error(config_mismatch) on layout mismatch.
    void merge(const TransitionCounts& other);

    bool operator==(const TransitionCounts&) const = default;
};

struct LevelMatrix {
    int grid = 0;
    std::map<CellPair, double> entries;

    double at(int from, int to) const;
    double row_sum(int from) const;

    bool operator==(const LevelMatrix&) const = default;
};

/// Row-stochastic on every observed row; unobserved rows are all zero.
struct TransitionMatrix {
    std::string pyramid_hash;
    int delta = 1;
    std::vector<LevelMatrix> levels;

    bool operator==(const TransitionMatrix&) const = default;
};

struct LevelSupport {
    int grid = 0;
    std::set<CellPair> pairs;

    bool operator==(const LevelSupport&) const = default;
};

/// Thresholded (and possibly augmented) support of a TransitionMatrix.
struct BinaryTransitions {
    std::string pyramid_hash;
    int delta = 1;
    double tau = 0.0;
    std::vector<std::string> augmentations;
    std::vector<LevelSupport> levels;

    bool operator==(const BinaryTransitions&) const = default;
};

TransitionCounts empty_counts(const AnchorSet& anchors, int delta);
BinaryTransitions empty_transitions(const AnchorSet& anchors, int delta);

/// Best anchor for a single box at one level.
struct AnchorMatch {
    int cell = 0;
    int shape = 0;
    double iou = 0.0;
};

/// Scores closer than this are ties, so exact geometric ties do not depend
/// on rounding.
inline constexpr double kTieTolerance = 1e-12;

/// Max IoU over every anchor of the level; ties go to the lowest cell, then shape.
AnchorMatch best_anchor(const Box& box, const AnchorLevel& level);

struct AnchorPairMatch {
    int cell_start = 0;
    int cell_end = 0;
    int shape_start = 0;
    int shape_end = 0;
    /// Mean of the two endpoint IoUs.
    double score = 0.0;
};

AnchorPairMatch best_anchor_pair(const MicroTube& g, const AnchorSet& anchors, std::size_t level);

struct LevelPairMatch {
    std::size_t level = 0;
    AnchorPairMatch match;
};

/// best_anchor_pair over all levels; ties go to the lowest (finest) level.
LevelPairMatch best_level_pair(const MicroTube& g, const AnchorSet& anchors);

/**
 * Count best-matching anchor transitions over a ground-truth collection.
 * Every micro-tube adds exactly one count at its best level.
 * Throws Error(invalid_argument) for an empty collection.
 */
TransitionCounts estimate(std::span<const MicroTube> gts, const AnchorSet& anchors);

/// Same result as estimate(), with the collection split over worker threads.
TransitionCounts estimate_sharded(std::span<const MicroTube> gts, const AnchorSet& anchors,
                                  std::size_t shards);

TransitionMatrix normalize(const TransitionCounts& counts);

/// Keep (i, j) iff m[i, j] >= tau. Throws Error(invalid_argument) unless tau is in (0, 1].
BinaryTransitions threshold(const TransitionMatrix& m, double tau = 0.10);

/// Adds (i, i) for every cell.
BinaryTransitions augment_diagonal(const BinaryTransitions& b);

/// Adds every in-bounds 8-connected (cell, neighbour) pair.
BinaryTransitions augment_neighbors(const BinaryTransitions& b);

/// Replays every observed 2-D cell displacement from every cell, dropping
/// placements that leave the grid.
BinaryTransitions augment_relative_offsets(const BinaryTransitions& b);

/// Support where every cell maps only to itself.
BinaryTransitions diagonal_transitions(const AnchorSet& anchors, int delta = 1);

struct Cardinality {
    std::vector<std::size_t> per_level;
    std::size_t total = 0;
};

Cardinality cardinality(const BinaryTransitions& b);

std::size_t off_diagonal_count(const BinaryTransitions& b);

}  // namespace microtube
