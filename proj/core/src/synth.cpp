// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "microtube/error.hpp"
#include "microtube/proposals.hpp"

namespace microtube {

std::string to_string(MotionKind kind) {
    switch (kind) {
    case MotionKind::static_actor: return "static";
    case MotionKind::linear_drift: return "linear_drift";
    case MotionKind::random_walk: return "random_walk";
    }
    return "unknown";
}

MotionKind motion_kind_from_string(const std::string& name) {
    if (name == "static") return MotionKind::static_actor;
    if (name == "linear_drift") return MotionKind::linear_drift;
    if (name == "random_walk") return MotionKind::random_walk;
    throw Error(ErrorCode::invalid_argument, "unknown motion kind '" + name + "'");
}

namespace {

// Feasible tube lengths n*delta + 1 within the spec's duration bounds.
std::pair<int, int> step_range(const MotionSpec& spec) {
    const int lo = std::max(1, (spec.duration_min - 1 + spec.delta - 1) / spec.delta);
    const int hi = std::min((spec.duration_max - 1) / spec.delta, (spec.frames_per_video - 1) / spec.delta);
    return {lo, hi};
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

void validate(const MotionSpec& spec) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::invalid_argument, what); };
    if (spec.delta < 1) fail("delta must be >= 1");
    if (spec.sparsity < 1) fail("sparsity must be >= 1");
    if (spec.num_classes < 1) fail("num_classes must be >= 1");
    if (spec.tubes_per_video < 0) fail("tubes_per_video must be >= 0");
    if (spec.frames_per_video < 2) fail("frames_per_video must be >= 2");
    if (!(spec.size_min > 0.0) || spec.size_max < spec.size_min || spec.size_max > 1.0) {
        fail("box sizes must satisfy 0 < size_min <= size_max <= 1");
    }
    if (spec.duration_min < 2 || spec.duration_max < spec.duration_min) {
        fail("durations must satisfy 2 <= duration_min <= duration_max");
    }
    const auto [lo, hi] = step_range(spec);
    if (lo > hi) fail("no tube duration of the form n*delta + 1 fits the duration bounds and video length");
    if (!std::isfinite(spec.velocity_x) || !std::isfinite(spec.velocity_y) ||
        std::abs(spec.velocity_x) >= 1.0 || std::abs(spec.velocity_y) >= 1.0) {
        fail("velocities must be finite fractions of the image per frame");
    }
    if (!(spec.walk_sigma >= 0.0)) fail("walk_sigma must be >= 0");
}

std::uint64_t stream_seed(std::uint64_t seed, const std::string& video_id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : video_id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(seed ^ splitmix64(h));
}

namespace {

std::string video_name(int k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "v%05d", k);
    return buf;
}

// Start-center interval keeping the whole drift inside the image when possible.
std::pair<double, double> start_range(double half, double drift) {
    const double lo = std::max(half, half - drift);
    const double hi = std::min(1.0 - half, 1.0 - half - drift);
    if (lo <= hi) {
        return {lo, hi};
    }
    return {half, 1.0 - half};
}

AnnotatedTube generate_tube(const MotionSpec& spec, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick_class(1, spec.num_classes);
    const auto [lo_steps, hi_steps] = step_range(spec);
    std::uniform_int_distribution<int> pick_steps(lo_steps, hi_steps);
    std::uniform_real_distribution<double> pick_size(spec.size_min, spec.size_max);

    AnnotatedTube tube;
    tube.class_id = pick_class(rng);
    const int steps = pick_steps(rng);
    const int duration = steps * spec.delta + 1;
    std::uniform_int_distribution<int> pick_slot(0, (spec.frames_per_video - duration) / spec.delta);
    const int start = 1 + pick_slot(rng) * spec.delta;
    const double w = pick_size(rng);
    const double h = pick_size(rng);

    const bool drifting = spec.kind == MotionKind::linear_drift;
    const double dx = drifting ? spec.velocity_x * (duration - 1) : 0.0;
    const double dy = drifting ? spec.velocity_y * (duration - 1) : 0.0;
    const auto [x_lo, x_hi] = start_range(0.5 * w, dx);
    const auto [y_lo, y_hi] = start_range(0.5 * h, dy);
    const double cx0 = std::uniform_real_distribution<double>(x_lo, x_hi)(rng);
    const double cy0 = std::uniform_real_distribution<double>(y_lo, y_hi)(rng);

    std::normal_distribution<double> walk(0.0, spec.walk_sigma);
    double cx = cx0;
    double cy = cy0;
    double vx = spec.velocity_x;
    double vy = spec.velocity_y;
    for (int i = 0; i < duration; ++i) {
        switch (spec.kind) {
        case MotionKind::static_actor:
            break;
        case MotionKind::linear_drift:
            cx = cx0 + i * spec.velocity_x;
            cy = cy0 + i * spec.velocity_y;
            break;
        case MotionKind::random_walk:
            if (i > 0) {
                if (spec.walk_sigma > 0.0) {
                    vx += walk(rng);
                    vy += walk(rng);
                }
                cx += vx;
                cy += vy;
            }
            break;
        }
        cx = std::clamp(cx, 0.5 * w, 1.0 - 0.5 * w);
        cy = std::clamp(cy, 0.5 * h, 1.0 - 0.5 * h);
        if (i % spec.sparsity == 0 || i == duration - 1) {
            tube.keyframes.push_back({start + i, Box::from_center(cx, cy, w, h)});
        }
    }
    return tube;
}

}  // namespace

Dataset generate_dataset(const MotionSpec& spec, int n_videos, std::uint64_t seed) {
    validate(spec);
    if (n_videos < 0) {
        throw Error(ErrorCode::invalid_argument, "n_videos must be >= 0");
    }
    Dataset d;
    d.name = "synthetic-" + to_string(spec.kind);
    for (int k = 0; k < n_videos; ++k) {
        VideoAnnotation v;
        v.id = video_name(k);
        v.n_frames = spec.frames_per_video;
        std::mt19937_64 rng(stream_seed(seed, v.id));
        for (int t = 0; t < spec.tubes_per_video; ++t) {
            v.tubes.push_back(generate_tube(spec, rng));
        }
        d.videos.push_back(std::move(v));
    }
    return d;
}

std::vector<MicroTube> extract_microtubes(const VideoAnnotation& video, int delta) {
    if (delta < 1) {
        throw Error(ErrorCode::invalid_argument, "delta must be >= 1");
    }
    std::vector<MicroTube> out;
    for (const AnnotatedTube& t : video.tubes) {
        if (t.keyframes.size() == 1) {
            const Keyframe& k = t.keyframes.front();
            out.push_back({k.frame, delta, k.box, k.box});
            continue;
        }
        for (std::size_t a = 0; a < t.keyframes.size(); ++a) {
            const int target = t.keyframes[a].frame + delta;
            for (std::size_t b = a + 1; b < t.keyframes.size() && t.keyframes[b].frame <= target; ++b) {
                if (t.keyframes[b].frame == target) {
                    out.push_back({t.keyframes[a].frame, delta, t.keyframes[a].box, t.keyframes[b].box});
                }
            }
        }
    }
    return out;
}

std::vector<MicroTube> extract_microtubes(const Dataset& dataset, int delta) {
    std::vector<MicroTube> out;
    for (const VideoAnnotation& v : dataset.videos) {
        auto part = extract_microtubes(v, delta);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

Dataset transform_annotations(const Dataset& dataset, PaddingSpec pads, std::uint64_t seed) {
    if (pads.max_pad_x < 0 || pads.max_pad_y < 0) {
        throw Error(ErrorCode::invalid_argument, "padding must be >= 0");
    }
    if (dataset.is_normalized() && (pads.max_pad_x > 0 || pads.max_pad_y > 0)) {
        throw Error(ErrorCode::invalid_argument,
                    "padding is in pixels; convert the dataset to a pixel resolution first");
    }
    Dataset out = dataset;
    out.image_width += pads.max_pad_x;
    out.image_height += pads.max_pad_y;
    for (VideoAnnotation& v : out.videos) {
        std::mt19937_64 rng(stream_seed(seed, v.id));
        const int left = std::uniform_int_distribution<int>(0, pads.max_pad_x)(rng);
        const int top = std::uniform_int_distribution<int>(0, pads.max_pad_y)(rng);
        for (AnnotatedTube& t : v.tubes) {
            for (Keyframe& k : t.keyframes) {
                k.box = translate(k.box, left, top);
            }
        }
    }
    return out;
}

namespace {

Box jitter(const Box& b, double sigma, std::mt19937_64& rng) {
    if (sigma <= 0.0) {
        return b;
    }
    std::normal_distribution<double> noise(0.0, sigma);
    double x0 = b.x_min + noise(rng);
    double y0 = b.y_min + noise(rng);
    double x1 = b.x_max + noise(rng);
    double y1 = b.y_max + noise(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    return clip({x0, y0, x1, y1});
}

}  // namespace

std::vector<ScoredMicroTube> simulate_detections(const Dataset& dataset, const AnchorSet& anchors,
                                                 const BinaryTransitions& transitions, int delta,
                                                 const DetectionNoise& noise, std::uint64_t seed) {
    if (!dataset.is_normalized()) {
        throw Error(ErrorCode::invalid_argument, "simulate_detections expects normalized annotations");
    }
    if (delta < 1) {
        throw Error(ErrorCode::invalid_argument, "delta must be >= 1");
    }
    if (!(noise.sigma >= 0.0) || !(noise.distractor_rate >= 0.0) ||
        !(noise.true_score >= 0.0 && noise.true_score <= 1.0) || noise.num_classes < 1) {
        throw Error(ErrorCode::invalid_argument, "invalid detection noise parameters");
    }
    const std::vector<AnchorMicroTube> proposals = enumerate_proposals(transitions, anchors);
    if (noise.distractor_rate > 0.0 && proposals.empty()) {
        throw Error(ErrorCode::invalid_argument, "distractors need a non-empty proposal set");
    }
    const std::size_t width = static_cast<std::size_t>(noise.num_classes) + 1;

    std::vector<const VideoAnnotation*> videos;
    for (const auto& v : dataset.videos) videos.push_back(&v);
    std::sort(videos.begin(), videos.end(),
              [](const VideoAnnotation* a, const VideoAnnotation* b) { return a->id < b->id; });

    std::vector<ScoredMicroTube> out;
    for (const VideoAnnotation* video : videos) {
        for (const AnnotatedTube& t : video->tubes) {
            if (t.class_id > noise.num_classes) {
                throw Error(ErrorCode::invalid_argument,
                            "video " + video->id + " has class " + std::to_string(t.class_id) +
                                " beyond num_classes");
            }
        }
        std::mt19937_64 rng(stream_seed(seed ^ 0xd1b54a32d192ed03ULL, video->id));
        std::poisson_distribution<int> n_distractors(noise.distractor_rate > 0.0 ? noise.distractor_rate : 1.0);
        std::uniform_int_distribution<std::size_t> pick_proposal(0, proposals.empty() ? 0 : proposals.size() - 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        for (int f = 1; f + delta <= video->n_frames; f += delta) {
            for (const AnnotatedTube& t : video->tubes) {
                if (t.first_frame() > f || t.last_frame() < f + delta) {
                    continue;
                }
                ScoredMicroTube det;
                det.video_id = video->id;
                det.tube = {f, delta, jitter(box_at(t, f), noise.sigma, rng),
                            jitter(box_at(t, f + delta), noise.sigma, rng)};
                det.scores.assign(width, 0.0);
                det.scores[0] = 1.0 - noise.true_score;
                det.scores[static_cast<std::size_t>(t.class_id)] = noise.true_score;
                det.stream = "oracle";
                out.push_back(std::move(det));
            }
            if (noise.distractor_rate <= 0.0) {
                continue;
            }
            const int k = n_distractors(rng);
            for (int d = 0; d < k; ++d) {
                const AnchorMicroTube& a = proposals[pick_proposal(rng)];
                ScoredMicroTube det;
                det.video_id = video->id;
                det.tube = {f, delta, jitter(clip(a.box_start), noise.sigma, rng),
                            jitter(clip(a.box_end), noise.sigma, rng)};
                det.scores.assign(width, 0.0);
                det.scores[0] = 0.6 + 0.35 * unit(rng);
                std::vector<double> weights(width - 1);
                double total = 0.0;
                for (double& w : weights) {
                    w = unit(rng) + 1e-12;
                    total += w;
                }
                for (std::size_t c = 1; c < width; ++c) {
                    det.scores[c] = (1.0 - det.scores[0]) * weights[c - 1] / total;
                }
                det.stream = "oracle";
                out.push_back(std::move(det));
            }
        }
    }
    return out;
}

}  // namespace microtube
