// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <vector>

#include "microtube/geometry.hpp"

namespace microtube {

struct Keyframe {
    int frame = 0;
    Box box;

    bool operator==(const Keyframe&) const = default;
};

/// One ground-truth action instance; keyframes have strictly increasing frames.
struct AnnotatedTube {
    int class_id = 0;
    std::vector<Keyframe> keyframes;

    int first_frame() const { return keyframes.front().frame; }
    int last_frame() const { return keyframes.back().frame; }

    bool operator==(const AnnotatedTube&) const = default;
};

struct VideoAnnotation {
    std::string id;
    int n_frames = 0;
    std::vector<AnnotatedTube> tubes;

    bool operator==(const VideoAnnotation&) const = default;
};

/// A set of annotated videos. Boxes are in the units of image_width x
/// image_height; a 1 x 1 image means normalized coordinates.
struct Dataset {
    std::string name;
    double image_width = 1.0;
    double image_height = 1.0;
    std::vector<VideoAnnotation> videos;

    bool is_normalized() const { return image_width == 1.0 && image_height == 1.0; }

    bool operator==(const Dataset&) const = default;
};

/// Throws Error(schema) on empty tubes, unordered keyframes or invalid boxes.
void validate(const Dataset& dataset);

/// Rescale boxes into the unit square.
Dataset normalized(const Dataset& dataset);

/// Rescale normalized boxes to a width x height pixel canvas.
Dataset to_pixels(const Dataset& dataset, double width, double height);

/// Box of the tube at frame, interpolating linearly between keyframes.
/// Frames outside the annotated extent are an error.
Box box_at(const AnnotatedTube& tube, int frame);

}  // namespace microtube
