// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>

namespace microtube {

/**
 * @brief Axis-aligned rectangle [x_min, y_min, x_max, y_max].
 *
 * Coordinates are normalized to the unit square by default, but nothing here
 * depends on the unit: a box in pixels behaves identically.
 */
struct Box {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    static Box from_center(double cx, double cy, double w, double h) {
        return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
    }

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    double cx() const { return 0.5 * (x_min + x_max); }
    double cy() const { return 0.5 * (y_min + y_max); }

    std::array<double, 4> as_array() const { return {x_min, y_min, x_max, y_max}; }

    bool operator==(const Box&) const = default;
};

/// Finite coordinates with x_min <= x_max and y_min <= y_max.
bool is_valid(const Box& b);

/// Intersection over union; 0 when the union has zero area.
double iou(const Box& a, const Box& b);

Box translate(const Box& b, double dx, double dy);

/// Clamp every coordinate into [lo, hi].
Box clip(const Box& b, double lo = 0.0, double hi = 1.0);

/// Coordinate-wise linear blend, t = 0 gives a and t = 1 gives b.
Box lerp(const Box& a, const Box& b, double t);

/// Coordinate-wise mean of two boxes.
Box average(const Box& a, const Box& b);

/**
 * @brief Two temporally linked boxes `delta` frames apart.
 *
 * A tube covering frames [frame_start, frame_start + delta]. Only the two
 * endpoint boxes are stored; intermediate frames come from interpolation.
 */
struct MicroTube {
    int frame_start = 0;
    int delta = 1;
    Box box_start;
    Box box_end;

    int frame_end() const { return frame_start + delta; }

    bool operator==(const MicroTube&) const = default;
};

/// Throws Error(invalid_argument) unless delta >= 1 and both boxes are valid.
void validate(const MicroTube& m);

/// Mean of the two endpoint IoUs. Deltas of the two tubes may differ.
double microtube_overlap(const MicroTube& a, const MicroTube& b);

/// Same measure on raw endpoint pairs.
inline double pair_overlap(const Box& a_start, const Box& a_end,
                           const Box& b_start, const Box& b_end) {
    return 0.5 * (iou(a_start, b_start) + iou(a_end, b_end));
}

}  // namespace microtube
