// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/linking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "microtube/error.hpp"

namespace microtube {

void validate(const LinkParams& params) {
    if (!(params.iou_weight >= 0.0) || !std::isfinite(params.iou_weight)) {
        throw Error(ErrorCode::invalid_argument, "iou_weight must be >= 0");
    }
    if (params.max_misses < 1) {
        throw Error(ErrorCode::invalid_argument, "max_misses must be >= 1");
    }
    if (!(params.nms_threshold > 0.0 && params.nms_threshold <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "nms_threshold must lie in (0, 1]");
    }
    if (params.top_n < 1) {
        throw Error(ErrorCode::invalid_argument, "top_n must be >= 1");
    }
    if (!std::isfinite(params.score_floor)) {
        throw Error(ErrorCode::invalid_argument, "score_floor must be finite");
    }
}

std::vector<std::size_t> nms_microtubes(std::span<const ScoredMicroTube> dets, int class_id,
                                        double thresh) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].score(class_id) > dets[b].score(class_id);
    });
    std::vector<std::size_t> keep;
    for (std::size_t idx : order) {
        const bool suppressed = std::any_of(keep.begin(), keep.end(), [&](std::size_t k) {
            return microtube_overlap(dets[k].tube, dets[idx].tube) > thresh;
        });
        if (!suppressed) {
            keep.push_back(idx);
        }
    }
    return keep;
}

std::vector<Box> interpolate(const MicroTube& mt) {
    std::vector<Box> out;
    out.reserve(static_cast<std::size_t>(mt.delta) + 1);
    out.push_back(mt.box_start);
    for (int k = 1; k < mt.delta; ++k) {
        out.push_back(lerp(mt.box_start, mt.box_end, static_cast<double>(k) / mt.delta));
    }
    out.push_back(mt.box_end);
    return out;
}

namespace {

void refresh_score(ActionPath& path) {
    double sum = 0.0;
    for (const PathStep& s : path.steps) {
        sum += s.score;
    }
    path.score = path.steps.empty() ? 0.0 : sum / static_cast<double>(path.steps.size());
}

ActionPath start_path(const ScoredMicroTube& det, int class_id, int group, int index) {
    ActionPath path;
    path.video_id = det.video_id;
    path.class_id = class_id;
    path.t_start = det.tube.frame_start;
    path.t_end = det.tube.frame_end();
    path.boxes = interpolate(det.tube);
    const double s = det.score(class_id);
    path.frame_scores.assign(path.boxes.size(), s);
    path.steps.push_back({det.tube.frame_start, det.tube.delta, s, group, index});
    refresh_score(path);
    return path;
}

void extend_path(ActionPath& path, const ScoredMicroTube& det, int group, int index) {
    const MicroTube& m = det.tube;
    const double s = det.score(path.class_id);
    if (m.frame_start == path.t_end) {
        // Shared boundary frame: average the two estimates.
        path.boxes.back() = average(path.boxes.back(), m.box_start);
        path.frame_scores.back() = 0.5 * (path.frame_scores.back() + s);
    } else {
        // Bridge missed steps so the path stays gap-free.
        const int gap = m.frame_start - path.t_end;
        const Box last_box = path.boxes.back();
        const double last_score = path.frame_scores.back();
        for (int k = 1; k < gap; ++k) {
            const double t = static_cast<double>(k) / gap;
            path.boxes.push_back(lerp(last_box, m.box_start, t));
            path.frame_scores.push_back(last_score + (s - last_score) * t);
        }
        path.boxes.push_back(m.box_start);
        path.frame_scores.push_back(s);
    }
    const std::vector<Box> frames = interpolate(m);
    for (std::size_t k = 1; k < frames.size(); ++k) {
        path.boxes.push_back(frames[k]);
        path.frame_scores.push_back(s);
    }
    path.t_end = m.frame_end();
    path.steps.push_back({m.frame_start, m.delta, s, group, index});
    refresh_score(path);
}

struct ActiveTrack {
    ActionPath path;
    int misses = 0;
    std::size_t order = 0;
};

}  // namespace

std::vector<ActionPath> link(std::span<const DetectionGroup> groups, const LinkParams& params,
                             int class_id) {
    validate(params);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const DetectionGroup& group = groups[g];
        if (group.delta < 1) {
            throw Error(ErrorCode::frame_misalignment, "detection group with delta < 1");
        }
        if (g + 1 < groups.size() && group.frame_start + group.delta != groups[g + 1].frame_start) {
            throw Error(ErrorCode::frame_misalignment,
                        "group ending at frame " + std::to_string(group.frame_start + group.delta) +
                            " is followed by a group starting at " +
                            std::to_string(groups[g + 1].frame_start));
        }
        for (const ScoredMicroTube& det : group.dets) {
            if (det.tube.frame_start != group.frame_start || det.tube.delta != group.delta) {
                throw Error(ErrorCode::frame_misalignment,
                            "detection does not span its group's frames");
            }
        }
    }

    std::vector<ActionPath> finished;
    std::vector<ActiveTrack> active;
    std::size_t next_order = 0;

    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& dets = groups[g].dets;
        std::vector<std::size_t> candidates;
        for (std::size_t idx : nms_microtubes(dets, class_id, params.nms_threshold)) {
            if (dets[idx].score(class_id) >= params.score_floor) {
                candidates.push_back(idx);
            }
            if (candidates.size() == static_cast<std::size_t>(params.top_n)) {
                break;
            }
        }

        std::stable_sort(active.begin(), active.end(), [](const ActiveTrack& a, const ActiveTrack& b) {
            if (a.path.score != b.path.score) {
                return a.path.score > b.path.score;
            }
            return a.order < b.order;
        });

        std::vector<bool> claimed(candidates.size(), false);
        for (ActiveTrack& track : active) {
            int best = -1;
            double best_value = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                if (claimed[c]) {
                    continue;
                }
                const ScoredMicroTube& det = dets[candidates[c]];
                const double overlap = iou(track.path.boxes.back(), det.tube.box_start);
                if (overlap <= 0.0) {
                    continue;
                }
                const double value = det.score(class_id) + params.iou_weight * overlap;
                if (value > best_value) {
                    best_value = value;
                    best = static_cast<int>(c);
                }
            }
            if (best >= 0) {
                claimed[static_cast<std::size_t>(best)] = true;
                const std::size_t idx = candidates[static_cast<std::size_t>(best)];
                extend_path(track.path, dets[idx], static_cast<int>(g), static_cast<int>(idx));
                track.misses = 0;
            } else {
                ++track.misses;
            }
        }

        std::vector<ActiveTrack> still_active;
        for (ActiveTrack& track : active) {
            if (track.misses >= params.max_misses) {
                finished.push_back(std::move(track.path));
            } else {
                still_active.push_back(std::move(track));
            }
        }
        active = std::move(still_active);

        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (!claimed[c]) {
                active.push_back({start_path(dets[candidates[c]], class_id, static_cast<int>(g),
                                             static_cast<int>(candidates[c])),
                                  0, next_order++});
            }
        }
    }
    std::sort(active.begin(), active.end(),
              [](const ActiveTrack& a, const ActiveTrack& b) { return a.order < b.order; });
    for (ActiveTrack& track : active) {
        finished.push_back(std::move(track.path));
    }
    std::stable_sort(finished.begin(), finished.end(), [](const ActionPath& a, const ActionPath& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.t_start < b.t_start;
    });
    return finished;
}

std::map<std::string, std::vector<DetectionGroup>> group_by_video(std::span<const ScoredMicroTube> dets) {
    std::map<std::string, std::vector<const ScoredMicroTube*>> per_video;
    for (const ScoredMicroTube& d : dets) {
        per_video[d.video_id].push_back(&d);
    }
    std::map<std::string, std::vector<DetectionGroup>> out;
    for (const auto& [video, list] : per_video) {
        const int delta = list.front()->tube.delta;
        int first = list.front()->tube.frame_start;
        int last = first;
        for (const ScoredMicroTube* d : list) {
            if (d->tube.delta != delta) {
                throw Error(ErrorCode::frame_misalignment,
                            "video " + video + " mixes micro-tube deltas");
            }
            first = std::min(first, d->tube.frame_start);
            last = std::max(last, d->tube.frame_start);
        }
        std::vector<DetectionGroup> groups;
        for (int f = first; f <= last; f += delta) {
            groups.push_back({f, delta, {}});
        }
        for (const ScoredMicroTube* d : list) {
            const int offset = d->tube.frame_start - first;
            if (offset % delta != 0) {
                throw Error(ErrorCode::frame_misalignment,
                            "video " + video + " has a detection starting off the delta grid at frame " +
                                std::to_string(d->tube.frame_start));
            }
            groups[static_cast<std::size_t>(offset / delta)].dets.push_back(*d);
        }
        out.emplace(video, std::move(groups));
    }
    return out;
}

std::vector<ActionPath> link_all(std::span<const ScoredMicroTube> dets, const LinkParams& params,
                                 std::size_t threads) {
    validate(params);
    if (dets.empty()) {
        return {};
    }
    const std::size_t width = dets.front().scores.size();
    if (width < 2) {
        throw Error(ErrorCode::length_mismatch, "score vectors need background plus >= 1 class");
    }
    for (const ScoredMicroTube& d : dets) {
        if (d.scores.size() != width) {
            throw Error(ErrorCode::length_mismatch, "score vectors differ in length");
        }
    }
    const auto grouped = group_by_video(dets);
    std::vector<const std::vector<DetectionGroup>*> jobs;
    for (const auto& [video, groups] : grouped) {
        jobs.push_back(&groups);
    }
    std::vector<std::vector<ActionPath>> results(jobs.size());
    auto run = [&](std::size_t j) {
        for (int c = 1; c < static_cast<int>(width); ++c) {
            auto paths = link(*jobs[j], params, c);
            results[j].insert(results[j].end(), std::make_move_iterator(paths.begin()),
                              std::make_move_iterator(paths.end()));
        }
    };
    threads = std::clamp<std::size_t>(threads, 1, jobs.size());
    if (threads == 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) run(j);
    } else {
        std::vector<std::jthread> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t j = t; j < jobs.size(); j += threads) run(j);
            });
        }
    }
    std::vector<ActionPath> out;
    for (auto& r : results) {
        out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    }
    return out;
}

double trim_objective(std::span<const double> scores, const std::vector<bool>& labels, double switch_cost) {
    double total = 0.0;
    for (std::size_t t = 0; t < scores.size(); ++t) {
        total += labels[t] ? scores[t] : 1.0 - scores[t];
        if (t > 0 && labels[t] != labels[t - 1]) {
            total -= switch_cost;
        }
    }
    return total;
}

std::vector<Segment> trim(std::span<const double> scores, double switch_cost) {
    if (scores.empty()) {
        throw Error(ErrorCode::invalid_argument, "cannot trim an empty score sequence");
    }
    if (!(switch_cost >= 0.0) || !std::isfinite(switch_cost)) {
        throw Error(ErrorCode::invalid_argument, "switch cost must be >= 0");
    }
    constexpr double kTie = 1e-12;
    const std::size_t n = scores.size();
    auto gain = [&](int label, std::size_t t) { return label == 1 ? scores[t] : 1.0 - scores[t]; };

    // future[t][l]: best achievable sum over frames t+1.. given label l at t.
    std::vector<std::array<double, 2>> future(n, {0.0, 0.0});
    for (std::size_t t = n - 1; t-- > 0;) {
        for (int l = 0; l < 2; ++l) {
            double best = -std::numeric_limits<double>::infinity();
            for (int next = 0; next < 2; ++next) {
                best = std::max(best, gain(next, t + 1) - (next != l ? switch_cost : 0.0) + future[t + 1][next]);
            }
            future[t][l] = best;
        }
    }

    // Forward decode, background first on ties.
    std::vector<int> labels(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
        double value[2];
        for (int l = 0; l < 2; ++l) {
            const double cost = (t > 0 && labels[t - 1] != l) ? switch_cost : 0.0;
            value[l] = gain(l, t) - cost + future[t][l];
        }
        labels[t] = value[1] > value[0] + kTie ? 1 : 0;
    }

    std::vector<Segment> segments;
    for (std::size_t t = 0; t < n; ++t) {
        if (labels[t] == 1 && (t == 0 || labels[t - 1] == 0)) {
            segments.push_back({static_cast<int>(t), static_cast<int>(t)});
        }
        if (labels[t] == 1) {
            segments.back().last = static_cast<int>(t);
        }
    }
    return segments;
}

std::vector<ActionPath> trim_path(const ActionPath& path, double switch_cost) {
    std::vector<ActionPath> out;
    for (const Segment& seg : trim(path.frame_scores, switch_cost)) {
        ActionPath part;
        part.video_id = path.video_id;
        part.class_id = path.class_id;
        part.t_start = path.t_start + seg.first;
        part.t_end = path.t_start + seg.last;
        part.boxes.assign(path.boxes.begin() + seg.first, path.boxes.begin() + seg.last + 1);
        part.frame_scores.assign(path.frame_scores.begin() + seg.first,
                                 path.frame_scores.begin() + seg.last + 1);
        for (const PathStep& step : path.steps) {
            if (step.frame_start <= part.t_end && step.frame_start + step.delta >= part.t_start) {
                part.steps.push_back(step);
            }
        }
        if (part.steps.empty()) {
            // Segment lies entirely in a bridged gap; score it by its frames.
            const double mean = std::accumulate(part.frame_scores.begin(), part.frame_scores.end(), 0.0) /
                                static_cast<double>(part.frame_scores.size());
            part.steps.push_back({part.t_start, part.t_end - part.t_start, mean, -1, -1});
        }
        refresh_score(part);
        out.push_back(std::move(part));
    }
    return out;
}

std::vector<ScoredMicroTube> fuse_streams(std::span<const ScoredMicroTube> a,
                                          std::span<const ScoredMicroTube> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::length_mismatch, "streams have " + std::to_string(a.size()) + " and " +
                                                    std::to_string(b.size()) + " detections");
    }
    std::vector<ScoredMicroTube> out;
    out.reserve(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        const ScoredMicroTube& x = a[k];
        const ScoredMicroTube& y = b[k];
        if (x.video_id != y.video_id || x.tube.frame_start != y.tube.frame_start ||
            x.tube.delta != y.tube.delta || x.scores.size() != y.scores.size()) {
            throw Error(ErrorCode::length_mismatch,
                        "detection " + std::to_string(k) + " does not line up across streams");
        }
        ScoredMicroTube f;
        f.video_id = x.video_id;
        f.tube = {x.tube.frame_start, x.tube.delta, average(x.tube.box_start, y.tube.box_start),
                  average(x.tube.box_end, y.tube.box_end)};
        f.scores.resize(x.scores.size());
        for (std::size_t c = 0; c < x.scores.size(); ++c) {
            f.scores[c] = 0.5 * (x.scores[c] + y.scores[c]);
        }
        f.stream = x.stream == y.stream ? x.stream : "fused";
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace microtube
