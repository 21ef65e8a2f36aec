// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/anchor_pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>

#include "microtube/error.hpp"

namespace microtube {

PyramidConfig PyramidConfig::ssd300() {
    const std::vector<double> four{1.0, 1.0, 2.0, 0.5};
    const std::vector<double> six{1.0, 1.0, 2.0, 0.5, 3.0, 1.0 / 3.0};
    PyramidConfig c;
    c.grid_sizes = {38, 19, 10, 5, 3, 1};
    c.shapes_per_cell = {4, 6, 6, 6, 4, 4};
    c.scales = {0.10, 0.20, 0.375, 0.55, 0.725, 0.90};
    c.extra_scale = 1.075;
    c.aspect_ratios = {four, six, six, six, four, four};
    return c;
}

void validate(const PyramidConfig& config) {
    const std::size_t p = config.grid_sizes.size();
    if (p == 0) {
        throw Error(ErrorCode::invalid_argument, "pyramid config has no levels");
    }
    if (config.shapes_per_cell.size() != p || config.scales.size() != p ||
        config.aspect_ratios.size() != p) {
        throw Error(ErrorCode::invalid_argument,
                    "pyramid config lists must all have one entry per level");
    }
    for (std::size_t i = 0; i < p; ++i) {
        if (config.grid_sizes[i] < 1) {
            throw Error(ErrorCode::invalid_argument, "grid sizes must be positive");
        }
        if (i > 0 && config.grid_sizes[i] >= config.grid_sizes[i - 1]) {
            throw Error(ErrorCode::invalid_argument, "grid sizes must be strictly decreasing");
        }
        if (config.shapes_per_cell[i] < 1 ||
            config.aspect_ratios[i].size() != static_cast<std::size_t>(config.shapes_per_cell[i])) {
            throw Error(ErrorCode::invalid_argument,
                        "level " + std::to_string(i + 1) +
                            ": shapes_per_cell must equal the number of aspect ratios");
        }
        if (!(config.scales[i] > 0.0) || !std::isfinite(config.scales[i])) {
            throw Error(ErrorCode::invalid_argument, "scales must be positive and finite");
        }
        for (double a : config.aspect_ratios[i]) {
            if (!(a > 0.0) || !std::isfinite(a)) {
                throw Error(ErrorCode::invalid_argument, "aspect ratios must be positive");
            }
        }
    }
    if (!(config.extra_scale > 0.0) || !std::isfinite(config.extra_scale)) {
        throw Error(ErrorCode::invalid_argument, "extra_scale must be positive");
    }
}

std::string canonical_string(const PyramidConfig& config) {
    std::string out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    };
    out += "grid=";
    for (int g : config.grid_sizes) out += std::to_string(g) + ",";
    out += ";shapes=";
    for (int r : config.shapes_per_cell) out += std::to_string(r) + ",";
    out += ";scales=";
    for (double s : config.scales) {
        num(s);
        out += ",";
    }
    out += ";extra=";
    num(config.extra_scale);
    out += ";ratios=";
    for (const auto& level : config.aspect_ratios) {
        out += "[";
        for (double a : level) {
            num(a);
            out += ",";
        }
        out += "]";
    }
    return out;
}

std::string config_hash(const PyramidConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_string(config)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

AnchorSet::AnchorSet(PyramidConfig config, std::vector<AnchorLevel> levels)
    : config_(std::move(config)), hash_(config_hash(config_)), levels_(std::move(levels)) {}

std::size_t AnchorSet::total() const {
    return std::accumulate(levels_.begin(), levels_.end(), std::size_t{0},
                           [](std::size_t acc, const AnchorLevel& l) { return acc + l.boxes.size(); });
}

AnchorSet build_pyramid(const PyramidConfig& config) {
    validate(config);
    std::vector<AnchorLevel> levels;
    levels.reserve(config.num_levels());
    for (std::size_t p = 0; p < config.num_levels(); ++p) {
        AnchorLevel level;
        level.grid = config.grid_sizes[p];
        level.shapes = config.shapes_per_cell[p];
        const double scale = config.scales[p];
        const double next = p + 1 < config.num_levels() ? config.scales[p + 1] : config.extra_scale;
        const double extra = std::sqrt(scale * next);

        // Per-shape (width, height), shared by all cells of the level.
        std::vector<std::pair<double, double>> sizes;
        bool seen_square = false;
        for (double ratio : config.aspect_ratios[p]) {
            if (ratio == 1.0) {
                const double side = seen_square ? extra : scale;
                seen_square = true;
                sizes.emplace_back(side, side);
            } else {
                const double root = std::sqrt(ratio);
                sizes.emplace_back(scale * root, scale / root);
            }
        }

        const int g = level.grid;
        level.boxes.reserve(static_cast<std::size_t>(g * g) * sizes.size());
        for (int row = 0; row < g; ++row) {
            for (int col = 0; col < g; ++col) {
                const double cx = (col + 0.5) / g;
                const double cy = (row + 0.5) / g;
                for (const auto& [w, h] : sizes) {
                    level.boxes.push_back(Box::from_center(cx, cy, w, h));
                }
            }
        }
        levels.push_back(std::move(level));
    }
    return AnchorSet(config, std::move(levels));
}

int cell_of(int grid, double x, double y) {
    if (grid < 1) {
        throw Error(ErrorCode::invalid_argument, "grid must be positive");
    }
    if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "point outside the unit square");
    }
    auto axis = [grid](double v) {
        const int k = static_cast<int>(std::ceil(v * grid)) - 1;
        return std::clamp(k, 0, grid - 1);
    };
    return axis(y) * grid + axis(x);
}

}  // namespace microtube
