// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "microtube/anchor_pyramid.hpp"
#include "microtube/error.hpp"
#include "microtube/synth.hpp"
#include "microtube/transition.hpp"
#include "oracle/oracle.hpp"
#include "support/generators.hpp"

namespace {

using namespace microtube;

const AnchorSet& ssd() {
    static const AnchorSet a = build_pyramid(PyramidConfig::ssd300());
    return a;
}

// Single 3x3 level whose first shape is exactly the cell.
AnchorSet cell_sized_3x3() {
    PyramidConfig c;
    c.grid_sizes = {3};
    c.shapes_per_cell = {4};
    c.scales = {1.0 / 3.0};
    c.extra_scale = 0.5;
    c.aspect_ratios = {{1.0, 1.0, 2.0, 0.5}};
    return build_pyramid(c);
}

BinaryTransitions level_set(int grid, std::initializer_list<CellPair> pairs) {
    BinaryTransitions b;
    b.levels.push_back({grid, std::set<CellPair>(pairs)});
    return b;
}

TEST(BestAnchorPair, IdentityAnchor) {
    const Box anchor = ssd().level(4).anchor(4, 0);
    const AnchorPairMatch m = best_anchor_pair({1, 1, anchor, anchor}, ssd(), 4);
    EXPECT_EQ(m.cell_start, 4);
    EXPECT_EQ(m.cell_end, 4);
    EXPECT_DOUBLE_EQ(m.score, 1.0);
}

TEST(BestAnchorPair, OneCellShiftWithCellSizedAnchors) {
    const double t = 1.0 / 3.0;
    const MicroTube g{1, 1, {t, t, 2 * t, 2 * t}, {2 * t, t, 1.0, 2 * t}};
    const AnchorPairMatch m = best_anchor_pair(g, cell_sized_3x3(), 0);
    EXPECT_EQ(m.cell_start, 4);
    EXPECT_EQ(m.cell_end, 5);
    EXPECT_NEAR(m.score, 1.0, 1e-12);
}

TEST(BestAnchorPair, OneCellShiftOnDefaultThreeByThreeLevel) {
    // Several default anchors contain a cell-sized box entirely and tie; the
    // lowest cell wins. Frozen from the exhaustive oracle.
    const double t = 1.0 / 3.0;
    const MicroTube g{1, 1, {t, t, 2 * t, 2 * t}, {2 * t, t, 1.0, 2 * t}};
    const AnchorPairMatch m = best_anchor_pair(g, ssd(), 4);
    EXPECT_EQ(m.cell_start, 1);
    EXPECT_EQ(m.cell_end, 2);
    EXPECT_NEAR(m.score, 0.21138855859426608, 1e-12);
    EXPECT_NEAR(m.score, (1.0 / 9.0) / (0.725 * 0.725), 1e-12);

    const oracle::PairChoice o = oracle::best_pair(g.box_start, g.box_end, ssd().level(4));
    EXPECT_EQ(o.cell_start, m.cell_start);
    EXPECT_EQ(o.cell_end, m.cell_end);
    EXPECT_NEAR(o.score, m.score, 1e-12);
}

TEST(BestAnchorPair, ReflectionReflectsCells) {
    const AnchorSet a = cell_sized_3x3();
    const double t = 1.0 / 3.0;
    // left-to-right shift on the top row, then its mirror image
    const MicroTube g{1, 1, {0, 0, t, t}, {t, 0, 2 * t, t}};
    const MicroTube mirrored{1, 1, {1 - t, 0, 1, t}, {1 - 2 * t, 0, 1 - t, t}};
    const AnchorPairMatch m = best_anchor_pair(g, a, 0);
    const AnchorPairMatch r = best_anchor_pair(mirrored, a, 0);
    auto mirror = [](int cell) { return cell / 3 * 3 + (2 - cell % 3); };
    EXPECT_EQ(r.cell_start, mirror(m.cell_start));
    EXPECT_EQ(r.cell_end, mirror(m.cell_end));
    EXPECT_NEAR(r.score, m.score, 1e-12);
}

TEST(BestAnchorPair, MatchesExhaustiveOracleOnSmallPyramid) {
    PyramidConfig c;
    c.grid_sizes = {5, 3};
    c.shapes_per_cell = {4, 4};
    c.scales = {0.2, 0.5};
    c.extra_scale = 0.8;
    c.aspect_ratios = {{1, 1, 2, 0.5}, {1, 1, 2, 0.5}};
    const AnchorSet a = build_pyramid(c);
    gen::Gen g(21);
    for (int k = 0; k < 200; ++k) {
        const MicroTube m = g.microtube();
        const LevelPairMatch lib = best_level_pair(m, a);
        const oracle::LevelChoice o = oracle::best_level(m.box_start, m.box_end, a);
        ASSERT_EQ(lib.level, o.level) << k;
        EXPECT_EQ(lib.match.cell_start, o.pair.cell_start) << k;
        EXPECT_EQ(lib.match.cell_end, o.pair.cell_end) << k;
        EXPECT_NEAR(lib.match.score, o.pair.score, 1e-12) << k;
    }
}

TEST(Estimate, StaticAnchorGoesToLevelFive) {
    const Box anchor = ssd().level(4).anchor(4, 0);
    const MicroTube g{1, 1, anchor, anchor};
    const TransitionCounts c = estimate(std::vector<MicroTube>{g}, ssd());
    EXPECT_EQ(c.total(), 1);
    for (std::size_t p = 0; p < c.levels.size(); ++p) {
        if (p == 4) {
            ASSERT_EQ(c.levels[p].entries.size(), 1U);
            EXPECT_EQ(c.levels[p].entries.at({4, 4}), 1);
        } else {
            EXPECT_TRUE(c.levels[p].entries.empty()) << p;
        }
    }
    const oracle::LevelChoice o = oracle::best_level(anchor, anchor, ssd());
    EXPECT_EQ(o.level, 4U);
    EXPECT_EQ(o.pair.cell_start, 4);
    EXPECT_EQ(o.pair.cell_end, 4);
}

TEST(Estimate, DuplicatingTheDatasetScalesCounts) {
    const Dataset d = generate_dataset(MotionSpec{}, 6, 3);
    std::vector<MicroTube> gts = extract_microtubes(d, 1);
    const TransitionCounts once = estimate(gts, ssd());
    std::vector<MicroTube> thrice;
    for (int k = 0; k < 3; ++k) thrice.insert(thrice.end(), gts.begin(), gts.end());
    const TransitionCounts three = estimate(thrice, ssd());
    ASSERT_EQ(once.levels.size(), three.levels.size());
    for (std::size_t p = 0; p < once.levels.size(); ++p) {
        ASSERT_EQ(once.levels[p].entries.size(), three.levels[p].entries.size());
        for (const auto& [pair, n] : once.levels[p].entries) {
            EXPECT_EQ(three.levels[p].entries.at(pair), 3 * n);
        }
    }
}

TEST(Estimate, StaticDataIsDiagonal) {
    MotionSpec spec;
    spec.kind = MotionKind::static_actor;
    const TransitionCounts c = estimate(extract_microtubes(generate_dataset(spec, 10, 5), 1), ssd());
    for (const auto& level : c.levels) {
        for (const auto& [pair, n] : level.entries) {
            EXPECT_EQ(pair.from, pair.to);
        }
    }
}

TEST(Estimate, OneIncrementPerMicrotubeAndPermutationInvariant) {
    MotionSpec spec;
    spec.kind = MotionKind::random_walk;
    std::vector<MicroTube> gts = extract_microtubes(generate_dataset(spec, 8, 9), 2);
    const TransitionCounts c = estimate(gts, ssd());
    EXPECT_EQ(c.total(), static_cast<std::int64_t>(gts.size()));
    std::mt19937_64 rng(4);
    std::shuffle(gts.begin(), gts.end(), rng);
    EXPECT_EQ(estimate(gts, ssd()), c);
    EXPECT_EQ(estimate_sharded(gts, ssd(), 3), c);
}

TEST(Estimate, Errors) {
    EXPECT_THROW(estimate(std::vector<MicroTube>{}, ssd()), Error);
    const Box b{0.1, 0.1, 0.3, 0.3};
    const std::vector<MicroTube> mixed{{1, 1, b, b}, {1, 2, b, b}};
    EXPECT_THROW(estimate(mixed, ssd()), Error);
}

TEST(Normalize, Examples) {
    TransitionCounts c;
    c.levels.push_back({2, {{{0, 0}, 2}, {{0, 1}, 1}, {{0, 2}, 1}, {{2, 1}, 7}}});
    const TransitionMatrix m = normalize(c);
    const LevelMatrix& l = m.levels[0];
    EXPECT_DOUBLE_EQ(l.at(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(l.at(0, 1), 0.25);
    EXPECT_DOUBLE_EQ(l.at(0, 2), 0.25);
    EXPECT_DOUBLE_EQ(l.at(0, 3), 0.0);
    EXPECT_DOUBLE_EQ(l.row_sum(1), 0.0);
    EXPECT_DOUBLE_EQ(l.at(2, 1), 1.0);
    EXPECT_DOUBLE_EQ(l.at(2, 0), 0.0);
}

TEST(Threshold, Examples) {
    TransitionMatrix m;
    m.levels.push_back({2, {{{0, 0}, 0.7}, {{0, 1}, 0.2}, {{0, 2}, 0.1}}});
    EXPECT_EQ(threshold(m, 0.10).levels[0].pairs.size(), 3U);

    TransitionMatrix half;
    half.levels.push_back({2, {{{0, 0}, 0.5}, {{0, 1}, 0.5}}});
    EXPECT_TRUE(threshold(half, 1.0).levels[0].pairs.empty());
}

TEST(Threshold, RejectsOutOfRangeTau) {
    TransitionMatrix m;
    EXPECT_THROW(threshold(m, 0.0), Error);
    EXPECT_THROW(threshold(m, 1.5), Error);
    EXPECT_THROW(threshold(m, std::nan("")), Error);
}

TEST(Threshold, JustAboveLargestOffDiagonalLeavesOnlyDiagonal) {
    MotionSpec spec;
    spec.velocity_x = 0.002;
    const TransitionMatrix m = normalize(estimate(extract_microtubes(generate_dataset(spec, 100, 17), 5), ssd()));
    // Rows seen once hold a single entry of probability 1 and always survive.
    double largest_off = 0.0;
    for (const auto& level : m.levels) {
        for (const auto& [pair, v] : level.entries) {
            if (pair.from != pair.to && v < 1.0) largest_off = std::max(largest_off, v);
        }
    }
    ASSERT_GT(largest_off, 0.0);
    const BinaryTransitions b = threshold(m, std::nextafter(largest_off, 2.0));
    const std::size_t off = off_diagonal_count(b);
    EXPECT_GT(cardinality(b).total - off, off);
    for (std::size_t p = 0; p < b.levels.size(); ++p) {
        for (const CellPair& pair : b.levels[p].pairs) {
            if (pair.from != pair.to) {
                EXPECT_EQ(m.levels[p].row_sum(pair.from), m.levels[p].at(pair.from, pair.to));
            }
        }
    }
}

TEST(AugmentDiagonal, Examples) {
    EXPECT_EQ(cardinality(augment_diagonal(level_set(3, {{0, 1}}))).total, 10U);
    const BinaryTransitions diag = augment_diagonal(level_set(3, {}));
    EXPECT_EQ(cardinality(diag).total, 9U);
    EXPECT_EQ(augment_diagonal(diag), diag);
}

TEST(AugmentNeighbors, Examples) {
    EXPECT_EQ(cardinality(augment_neighbors(level_set(3, {}))).total, 40U);
    EXPECT_EQ(cardinality(augment_neighbors(level_set(1, {}))).total, 0U);
    EXPECT_EQ(cardinality(augment_neighbors(level_set(3, {{4, 4}}))).total, 41U);
}

TEST(AugmentRelativeOffsets, Examples) {
    EXPECT_EQ(cardinality(augment_relative_offsets(level_set(3, {{4, 4}, {4, 5}}))).total, 15U);
    const BinaryTransitions diag = augment_diagonal(level_set(3, {}));
    EXPECT_EQ(augment_relative_offsets(diag).levels, diag.levels);
    const BinaryTransitions corner = augment_relative_offsets(level_set(3, {{0, 8}}));
    EXPECT_EQ(corner.levels[0].pairs, (std::set<CellPair>{{0, 8}}));
}

TEST(Augmentations, IdempotentSupersets) {
    gen::Gen g(31);
    for (int k = 0; k < 50; ++k) {
        const int grid = g.integer(1, 6);
        BinaryTransitions b = level_set(grid, {});
        const int n = g.integer(0, 8);
        for (int e = 0; e < n; ++e) {
            b.levels[0].pairs.insert({g.integer(0, grid * grid - 1), g.integer(0, grid * grid - 1)});
        }
        for (auto fn : {&augment_diagonal, &augment_neighbors, &augment_relative_offsets}) {
            const BinaryTransitions once = fn(b);
            EXPECT_TRUE(std::includes(once.levels[0].pairs.begin(), once.levels[0].pairs.end(),
                                      b.levels[0].pairs.begin(), b.levels[0].pairs.end()));
            EXPECT_EQ(fn(once), once);
        }
    }
}

TEST(Augmentations, RecordedOnce) {
    const BinaryTransitions b = augment_diagonal(augment_diagonal(augment_neighbors(level_set(3, {}))));
    EXPECT_EQ(b.augmentations, (std::vector<std::string>{"neighbors", "diagonal"}));
}

TEST(Cardinality, Examples) {
    EXPECT_EQ(cardinality(diagonal_transitions(ssd())).total, 1940U);
    EXPECT_EQ(cardinality(empty_transitions(ssd(), 1)).total, 0U);
    EXPECT_EQ(cardinality(augment_diagonal(empty_transitions(ssd(), 1))).total, 1940U);
    const Cardinality c = cardinality(diagonal_transitions(ssd()));
    EXPECT_EQ(c.per_level, (std::vector<std::size_t>{1444, 361, 100, 25, 9, 1}));
}

TEST(TransitionCounts, MergeAddsAndChecksLayout) {
    TransitionCounts a = empty_counts(ssd(), 1);
    TransitionCounts b = empty_counts(ssd(), 1);
    a.levels[0].entries[{1, 2}] = 2;
    b.levels[0].entries[{1, 2}] = 3;
    b.levels[1].entries[{0, 0}] = 1;
    a.merge(b);
    EXPECT_EQ(a.levels[0].entries.at({1, 2}), 5);
    EXPECT_EQ(a.levels[1].entries.at({0, 0}), 1);
    EXPECT_EQ(a.total(), 6);
    TransitionCounts other_delta = empty_counts(ssd(), 2);
    EXPECT_THROW(a.merge(other_delta), Error);
}

}  // namespace
