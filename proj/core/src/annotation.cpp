// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/annotation.hpp"

#include <algorithm>
#include <iterator>

#include "microtube/error.hpp"

namespace microtube {

void validate(const Dataset& dataset) {
    if (!(dataset.image_width > 0.0) || !(dataset.image_height > 0.0)) {
        throw Error(ErrorCode::schema, "image size must be positive");
    }
    for (const VideoAnnotation& v : dataset.videos) {
        if (v.id.empty()) {
            throw Error(ErrorCode::schema, "video without id");
        }
        for (const AnnotatedTube& t : v.tubes) {
            if (t.keyframes.empty()) {
                throw Error(ErrorCode::schema, "video " + v.id + " has a tube without keyframes");
            }
            if (t.class_id < 1) {
                throw Error(ErrorCode::schema, "video " + v.id + ": class ids start at 1");
            }
            for (std::size_t k = 0; k < t.keyframes.size(); ++k) {
                if (!is_valid(t.keyframes[k].box)) {
                    throw Error(ErrorCode::schema, "video " + v.id + " has an invalid box");
                }
                if (k > 0 && t.keyframes[k].frame <= t.keyframes[k - 1].frame) {
                    throw Error(ErrorCode::schema,
                                "video " + v.id + ": keyframes must be strictly increasing");
                }
            }
        }
    }
}

namespace {

Dataset rescale(const Dataset& dataset, double sx, double sy, double width, double height) {
    Dataset out = dataset;
    out.image_width = width;
    out.image_height = height;
    for (auto& v : out.videos) {
        for (auto& t : v.tubes) {
            for (auto& k : t.keyframes) {
                k.box = {k.box.x_min * sx, k.box.y_min * sy, k.box.x_max * sx, k.box.y_max * sy};
            }
        }
    }
    return out;
}

}  // namespace

Dataset normalized(const Dataset& dataset) {
    if (dataset.is_normalized()) {
        return dataset;
    }
    return rescale(dataset, 1.0 / dataset.image_width, 1.0 / dataset.image_height, 1.0, 1.0);
}

Dataset to_pixels(const Dataset& dataset, double width, double height) {
    if (!dataset.is_normalized()) {
        throw Error(ErrorCode::invalid_argument, "dataset is already in pixel units");
    }
    if (!(width > 0.0) || !(height > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "resolution must be positive");
    }
    return rescale(dataset, width, height, width, height);
}

Box box_at(const AnnotatedTube& tube, int frame) {
    const auto& kf = tube.keyframes;
    if (kf.empty() || frame < kf.front().frame || frame > kf.back().frame) {
        throw Error(ErrorCode::invalid_argument, "frame outside the annotated extent");
    }
    const auto it = std::lower_bound(kf.begin(), kf.end(), frame,
                                     [](const Keyframe& k, int f) { return k.frame < f; });
    if (it->frame == frame) {
        return it->box;
    }
    const auto prev = std::prev(it);
    const double t = static_cast<double>(frame - prev->frame) / (it->frame - prev->frame);
    return lerp(prev->box, it->box, t);
}

}  // namespace microtube
