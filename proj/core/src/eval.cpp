// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/eval.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "microtube/error.hpp"

namespace microtube {

double tube_st_iou(const ActionPath& a, const ActionPath& b) {
    const int lo = std::max(a.t_start, b.t_start);
    const int hi = std::min(a.t_end, b.t_end);
    if (lo > hi) {
        return 0.0;
    }
    const int inter = hi - lo + 1;
    const int uni = std::max(a.t_end, b.t_end) - std::min(a.t_start, b.t_start) + 1;
    double spatial = 0.0;
    for (int f = lo; f <= hi; ++f) {
        spatial += iou(a.box_at(f), b.box_at(f));
    }
    return static_cast<double>(inter) / uni * (spatial / inter);
}

ActionPath to_path(const AnnotatedTube& tube, const std::string& video_id) {
    ActionPath p;
    p.video_id = video_id;
    p.class_id = tube.class_id;
    p.t_start = tube.first_frame();
    p.t_end = tube.last_frame();
    for (int f = p.t_start; f <= p.t_end; ++f) {
        p.boxes.push_back(box_at(tube, f));
    }
    p.frame_scores.assign(p.boxes.size(), 1.0);
    p.score = 1.0;
    return p;
}

double average_precision(const std::vector<bool>& hits, std::size_t num_gt) {
    if (num_gt == 0) {
        return 0.0;
    }
    std::vector<double> recall{0.0};
    std::vector<double> precision{0.0};
    std::size_t tp = 0;
    for (std::size_t k = 0; k < hits.size(); ++k) {
        tp += hits[k] ? 1 : 0;
        recall.push_back(static_cast<double>(tp) / static_cast<double>(num_gt));
        precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
    }
    recall.push_back(1.0);
    precision.push_back(0.0);
    for (std::size_t k = precision.size() - 1; k-- > 0;) {
        precision[k] = std::max(precision[k], precision[k + 1]);
    }
    double ap = 0.0;
    for (std::size_t k = 1; k < recall.size(); ++k) {
        ap += (recall[k] - recall[k - 1]) * precision[k];
    }
    return ap;
}

namespace {

struct GroundTruthIndex {
    // (video, class) -> dense GT paths
    std::map<std::pair<std::string, int>, std::vector<ActionPath>> tubes;
    std::map<int, std::size_t> per_class;
};

GroundTruthIndex index_ground_truth(const Dataset& gts) {
    GroundTruthIndex index;
    for (const VideoAnnotation& v : gts.videos) {
        for (const AnnotatedTube& t : v.tubes) {
            index.tubes[{v.id, t.class_id}].push_back(to_path(t, v.id));
            ++index.per_class[t.class_id];
        }
    }
    return index;
}

std::vector<std::size_t> ranking(std::span<const ActionPath> dets) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dets[a].score != dets[b].score) {
            return dets[a].score > dets[b].score;
        }
        return dets[a].video_id < dets[b].video_id;
    });
    return order;
}

MapResult map_at(std::span<const ActionPath> dets, const GroundTruthIndex& index,
                 const std::vector<std::size_t>& order, double delta) {
    MapResult result;
    result.delta = delta;
    for (const auto& [class_id, num_gt] : index.per_class) {
        std::map<std::string, std::vector<bool>> used;
        std::vector<bool> hits;
        for (std::size_t idx : order) {
            const ActionPath& d = dets[idx];
            if (d.class_id != class_id) {
                continue;
            }
            bool hit = false;
            const auto it = index.tubes.find({d.video_id, class_id});
            if (it != index.tubes.end()) {
                auto& taken = used[d.video_id];
                taken.resize(it->second.size(), false);
                int best = -1;
                double best_overlap = -1.0;
                for (std::size_t g = 0; g < it->second.size(); ++g) {
                    if (taken[g]) {
                        continue;
                    }
                    const double v = tube_st_iou(d, it->second[g]);
                    if (v > best_overlap) {
                        best_overlap = v;
                        best = static_cast<int>(g);
                    }
                }
                if (best >= 0 && best_overlap >= delta) {
                    taken[static_cast<std::size_t>(best)] = true;
                    hit = true;
                }
            }
            hits.push_back(hit);
        }
        result.per_class_ap[class_id] = average_precision(hits, num_gt);
    }
    if (!result.per_class_ap.empty()) {
        double sum = 0.0;
        for (const auto& [c, ap] : result.per_class_ap) {
            sum += ap;
        }
        result.map = sum / static_cast<double>(result.per_class_ap.size());
    }
    return result;
}

}  // namespace

MapResult video_map(std::span<const ActionPath> dets, const Dataset& gts, double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "IoU threshold must lie in [0, 1]");
    }
    const GroundTruthIndex index = index_ground_truth(gts);
    return map_at(dets, index, ranking(dets), delta);
}

std::vector<double> avg_map_thresholds() {
    std::vector<double> out;
    for (int k = 0; k < 10; ++k) {
        out.push_back((50 + 5 * k) / 100.0);
    }
    return out;
}

AvgMapResult avg_map(std::span<const ActionPath> dets, const Dataset& gts) {
    const GroundTruthIndex index = index_ground_truth(gts);
    const std::vector<std::size_t> order = ranking(dets);
    AvgMapResult result;
    double sum = 0.0;
    for (double delta : avg_map_thresholds()) {
        result.per_delta.push_back(map_at(dets, index, order, delta));
        sum += result.per_delta.back().map;
    }
    result.avg_map = sum / static_cast<double>(result.per_delta.size());
    return result;
}

double classification_accuracy(std::span<const ActionPath> dets, const Dataset& gts) {
    std::map<std::string, const ActionPath*> top;
    for (const ActionPath& d : dets) {
        auto& slot = top[d.video_id];
        if (slot == nullptr || d.score > slot->score) {
            slot = &d;
        }
    }
    std::size_t videos = 0;
    std::size_t correct = 0;
    for (const VideoAnnotation& v : gts.videos) {
        if (v.tubes.empty()) {
            continue;
        }
        ++videos;
        const auto it = top.find(v.id);
        if (it == top.end()) {
            continue;
        }
        const int predicted = it->second->class_id;
        if (std::any_of(v.tubes.begin(), v.tubes.end(),
                        [predicted](const AnnotatedTube& t) { return t.class_id == predicted; })) {
            ++correct;
        }
    }
    return videos == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(videos);
}

std::vector<ActionPath> clip_to_ground_truth(std::span<const ActionPath> dets, const Dataset& gts) {
    std::map<std::string, std::pair<int, int>> extent;
    for (const VideoAnnotation& v : gts.videos) {
        for (const AnnotatedTube& t : v.tubes) {
            auto [it, inserted] = extent.try_emplace(v.id, t.first_frame(), t.last_frame());
            if (!inserted) {
                it->second.first = std::min(it->second.first, t.first_frame());
                it->second.second = std::max(it->second.second, t.last_frame());
            }
        }
    }
    std::vector<ActionPath> out;
    for (const ActionPath& d : dets) {
        const auto it = extent.find(d.video_id);
        if (it == extent.end()) {
            continue;
        }
        const int lo = std::max(d.t_start, it->second.first);
        const int hi = std::min(d.t_end, it->second.second);
        if (lo > hi) {
            continue;
        }
        ActionPath c = d;
        c.t_start = lo;
        c.t_end = hi;
        c.boxes.assign(d.boxes.begin() + (lo - d.t_start), d.boxes.begin() + (hi - d.t_start) + 1);
        if (d.frame_scores.size() == d.boxes.size()) {
            c.frame_scores.assign(d.frame_scores.begin() + (lo - d.t_start),
                                  d.frame_scores.begin() + (hi - d.t_start) + 1);
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace microtube
