// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>

#include <gtest/gtest.h>

#include "microtube/anchor_pyramid.hpp"
#include "microtube/error.hpp"

namespace {

using microtube::AnchorSet;
using microtube::Box;
using microtube::PyramidConfig;

TEST(BuildPyramid, DefaultCounts) {
    const AnchorSet a = microtube::build_pyramid(PyramidConfig::ssd300());
    EXPECT_EQ(a.total(), 8732U);
    const std::size_t expected[] = {5776, 2166, 600, 150, 36, 4};
    ASSERT_EQ(a.num_levels(), 6U);
    for (std::size_t p = 0; p < 6; ++p) {
        EXPECT_EQ(a.level_count(p), expected[p]) << "level " << p;
    }
}

TEST(BuildPyramid, ThreeByThreeLevelHas36Anchors) {
    const AnchorSet a = microtube::build_pyramid(PyramidConfig::ssd300());
    EXPECT_EQ(a.level(4).grid, 3);
    EXPECT_EQ(a.level_count(4), 36U);
}

TEST(BuildPyramid, SingleCenteredSquare) {
    PyramidConfig c;
    c.grid_sizes = {1};
    c.shapes_per_cell = {1};
    c.scales = {0.4};
    c.aspect_ratios = {{1.0}};
    const AnchorSet a = microtube::build_pyramid(c);
    ASSERT_EQ(a.total(), 1U);
    const Box& b = a.level(0).anchor(0, 0);
    EXPECT_NEAR(b.x_min, 0.3, 1e-15);
    EXPECT_NEAR(b.y_min, 0.3, 1e-15);
    EXPECT_NEAR(b.x_max, 0.7, 1e-15);
    EXPECT_NEAR(b.y_max, 0.7, 1e-15);
}

TEST(BuildPyramid, ExtraSquareUsesGeometricMeanOfScales) {
    const AnchorSet a = microtube::build_pyramid(PyramidConfig::ssd300());
    EXPECT_NEAR(a.level(0).anchor(0, 1).width(), std::sqrt(0.10 * 0.20), 1e-15);
    EXPECT_NEAR(a.level(5).anchor(0, 1).width(), std::sqrt(0.90 * 1.075), 1e-15);
}

TEST(BuildPyramid, ShapeProperties) {
    const AnchorSet a = microtube::build_pyramid(PyramidConfig::ssd300());
    for (std::size_t p = 0; p < a.num_levels(); ++p) {
        const auto& level = a.level(p);
        const auto& ratios = a.config().aspect_ratios[p];
        for (int cell = 0; cell < level.num_cells(); ++cell) {
            const auto rc = microtube::cell_coord(level.grid, cell);
            for (int s = 0; s < level.shapes; ++s) {
                const Box& b = level.anchor(cell, s);
                // center inside its own cell
                EXPECT_GT(b.cx(), static_cast<double>(rc.col) / level.grid);
                EXPECT_LT(b.cx(), static_cast<double>(rc.col + 1) / level.grid);
                EXPECT_GT(b.cy(), static_cast<double>(rc.row) / level.grid);
                EXPECT_LT(b.cy(), static_cast<double>(rc.row + 1) / level.grid);
                EXPECT_NEAR(b.width() / b.height(), ratios[static_cast<std::size_t>(s)], 1e-12);
            }
            // ratio a and 1/a have equal area
            EXPECT_NEAR(level.anchor(cell, 2).area(), level.anchor(cell, 3).area(), 1e-15);
        }
    }
}

TEST(BuildPyramid, AnchorsAreNotClipped) {
    const AnchorSet a = microtube::build_pyramid(PyramidConfig::ssd300());
    // ratio 2 at scale 0.9 is wider than the image
    const Box& corner = a.level(5).anchor(0, 2);
    EXPECT_LT(corner.x_min, 0.0);
    EXPECT_GT(corner.x_max, 1.0);
}

TEST(BuildPyramid, Deterministic) {
    const AnchorSet a = microtube::build_pyramid(PyramidConfig::ssd300());
    const AnchorSet b = microtube::build_pyramid(PyramidConfig::ssd300());
    EXPECT_EQ(a.hash(), b.hash());
    for (std::size_t p = 0; p < a.num_levels(); ++p) {
        EXPECT_EQ(a.level(p).boxes, b.level(p).boxes);
    }
}

TEST(PyramidConfig, RejectsInconsistentConfigs) {
    PyramidConfig c = PyramidConfig::ssd300();
    c.scales.pop_back();
    EXPECT_THROW(microtube::build_pyramid(c), microtube::Error);

    c = PyramidConfig::ssd300();
    c.grid_sizes = {38, 19, 19, 5, 3, 1};
    EXPECT_THROW(microtube::validate(c), microtube::Error);

    c = PyramidConfig::ssd300();
    c.shapes_per_cell[0] = 6;
    EXPECT_THROW(microtube::validate(c), microtube::Error);

    c = PyramidConfig::ssd300();
    c.aspect_ratios[1][2] = -2.0;
    EXPECT_THROW(microtube::validate(c), microtube::Error);
}

TEST(PyramidConfig, HashDistinguishesGeometry) {
    PyramidConfig c = PyramidConfig::ssd300();
    const std::string h = microtube::config_hash(c);
    EXPECT_EQ(h.rfind("fnv1a64:", 0), 0U);
    EXPECT_EQ(h, microtube::config_hash(PyramidConfig::ssd300()));
    c.scales[0] = 0.1000000001;
    EXPECT_NE(h, microtube::config_hash(c));
}

TEST(CellOf, Examples) {
    EXPECT_EQ(microtube::cell_of(1, 0.5, 0.5), 0);
    EXPECT_EQ(microtube::cell_of(3, 0.99, 0.99), 8);
    EXPECT_EQ(microtube::cell_of(3, 0.34, 0.0), 1);
}

TEST(CellOf, BoundaryGoesToLowerCell) {
    EXPECT_EQ(microtube::cell_of(2, 0.5, 0.25), 0);
    EXPECT_EQ(microtube::cell_of(2, 0.75, 0.5), 1);
    EXPECT_EQ(microtube::cell_of(2, 1.0, 1.0), 3);
    EXPECT_EQ(microtube::cell_of(2, 0.0, 0.0), 0);
}

TEST(CellOf, RejectsOutOfRange) {
    EXPECT_THROW(microtube::cell_of(3, -0.01, 0.5), microtube::Error);
    EXPECT_THROW(microtube::cell_of(3, 0.5, 1.01), microtube::Error);
    EXPECT_THROW(microtube::cell_of(0, 0.5, 0.5), microtube::Error);
}

TEST(CellOf, AnchorCentersMapToTheirCell) {
    const AnchorSet a = microtube::build_pyramid(PyramidConfig::ssd300());
    for (const auto& level : a.levels()) {
        for (int cell = 0; cell < level.num_cells(); ++cell) {
            const Box& b = level.anchor(cell, 0);
            EXPECT_EQ(microtube::cell_of(level.grid, b.cx(), b.cy()), cell);
        }
    }
}

}  // namespace
