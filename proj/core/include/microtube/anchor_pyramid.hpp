// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "microtube/geometry.hpp"

namespace microtube {

/**
 * @brief Geometry of a P-level square feature-map pyramid.
 *
 * Level p has a grid_sizes[p] x grid_sizes[p] grid and shapes_per_cell[p]
 * anchor shapes in every cell. aspect_ratios[p] lists one width/height ratio
 * per shape; the first ratio 1 is a square of side scales[p] and any further
 * ratio 1 is the SSD "extra" square of side sqrt(scales[p] * scales[p + 1]),
 * where the scale after the last level is extra_scale.
 *
 * Levels are 0-based in the API. Serialized artifacts number them from 1.
 */
struct PyramidConfig {
    std::vector<int> grid_sizes;
    std::vector<int> shapes_per_cell;
    std::vector<double> scales;
    double extra_scale = 1.075;
    std::vector<std::vector<double>> aspect_ratios;

    /// SSD300 geometry: grids {38,19,10,5,3,1}, shapes {4,6,6,6,4,4}.
    static PyramidConfig ssd300();

    std::size_t num_levels() const { return grid_sizes.size(); }

    bool operator==(const PyramidConfig&) const = default;
};

/// Throws Error(invalid_argument) on length mismatches or bad values.
void validate(const PyramidConfig& config);

/// Canonical text form; the basis of config_hash.
std::string canonical_string(const PyramidConfig& config);

/// "fnv1a64:<16 hex digits>" over canonical_string. Stamped into artifacts.
std::string config_hash(const PyramidConfig& config);

struct AnchorLevel {
    int grid = 0;
    int shapes = 0;
    /// Row-major over cells, shape-minor: boxes[cell * shapes + shape].
    std::vector<Box> boxes;

    int num_cells() const { return grid * grid; }
    const Box& anchor(int cell, int shape) const {
        return boxes[static_cast<std::size_t>(cell) * static_cast<std::size_t>(shapes) +
                     static_cast<std::size_t>(shape)];
    }
};

/// Immutable anchor geometry for every pyramid level.
class AnchorSet {
public:
    AnchorSet(PyramidConfig config, std::vector<AnchorLevel> levels);

    const PyramidConfig& config() const { return config_; }
    const std::string& hash() const { return hash_; }
    std::size_t num_levels() const { return levels_.size(); }
    const AnchorLevel& level(std::size_t p) const { return levels_.at(p); }
    const std::vector<AnchorLevel>& levels() const { return levels_; }

    std::size_t level_count(std::size_t p) const { return levels_.at(p).boxes.size(); }
    std::size_t total() const;

private:
    PyramidConfig config_;
    std::string hash_;
    std::vector<AnchorLevel> levels_;
};

AnchorSet build_pyramid(const PyramidConfig& config);

/**
 * Row-major index of the grid cell containing (x, y) on a grid x grid map.
 * A point on a boundary between two cells belongs to the lower-index cell.
 * Throws Error(invalid_argument) for points outside [0,1]^2.
 */
int cell_of(int grid, double x, double y);

struct CellCoord {
    int row = 0;
    int col = 0;
};

inline CellCoord cell_coord(int grid, int cell) { return {cell / grid, cell % grid}; }
inline int cell_index(int grid, CellCoord c) { return c.row * grid + c.col; }

}  // namespace microtube
