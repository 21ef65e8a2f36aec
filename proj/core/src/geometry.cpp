// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "microtube/error.hpp"

namespace microtube {

bool is_valid(const Box& b) {
    return std::isfinite(b.x_min) && std::isfinite(b.y_min) && std::isfinite(b.x_max) &&
           std::isfinite(b.y_max) && b.x_min <= b.x_max && b.y_min <= b.y_max;
}

double iou(const Box& a, const Box& b) {
    const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) {
        return 0.0;
    }
    return std::clamp(inter / uni, 0.0, 1.0);
}

Box translate(const Box& b, double dx, double dy) {
    return {b.x_min + dx, b.y_min + dy, b.x_max + dx, b.y_max + dy};
}

Box clip(const Box& b, double lo, double hi) {
    return {std::clamp(b.x_min, lo, hi), std::clamp(b.y_min, lo, hi),
            std::clamp(b.x_max, lo, hi), std::clamp(b.y_max, lo, hi)};
}

Box lerp(const Box& a, const Box& b, double t) {
    auto mix = [t](double u, double v) { return u + (v - u) * t; };
    return {mix(a.x_min, b.x_min), mix(a.y_min, b.y_min), mix(a.x_max, b.x_max),
            mix(a.y_max, b.y_max)};
}

Box average(const Box& a, const Box& b) {
    return {0.5 * (a.x_min + b.x_min), 0.5 * (a.y_min + b.y_min), 0.5 * (a.x_max + b.x_max),
            0.5 * (a.y_max + b.y_max)};
}

void validate(const MicroTube& m) {
    if (m.delta < 1) {
        throw Error(ErrorCode::invalid_argument,
                    "micro-tube delta must be >= 1, got " + std::to_string(m.delta));
    }
    if (!is_valid(m.box_start) || !is_valid(m.box_end)) {
        throw Error(ErrorCode::invalid_argument, "micro-tube has an invalid box");
    }
}

double microtube_overlap(const MicroTube& a, const MicroTube& b) {
    return pair_overlap(a.box_start, a.box_end, b.box_start, b.box_end);
}

}  // namespace microtube
