// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/proposals.hpp"

#include <algorithm>
#include <cmath>

#include "microtube/error.hpp"

namespace microtube {

std::vector<AnchorMicroTube> enumerate_proposals(const BinaryTransitions& b, const AnchorSet& anchors) {
    if (b.pyramid_hash != anchors.hash() || b.levels.size() != anchors.num_levels()) {
        throw Error(ErrorCode::config_mismatch,
                    "transitions were built for pyramid " + b.pyramid_hash + ", anchors are " +
                        anchors.hash());
    }
    std::size_t n = 0;
    for (std::size_t p = 0; p < b.levels.size(); ++p) {
        n += b.levels[p].pairs.size() * static_cast<std::size_t>(anchors.level(p).shapes);
    }
    std::vector<AnchorMicroTube> out;
    out.reserve(n);
    for (std::size_t p = 0; p < b.levels.size(); ++p) {
        const AnchorLevel& level = anchors.level(p);
        for (const CellPair& pair : b.levels[p].pairs) {
            for (int shape = 0; shape < level.shapes; ++shape) {
                out.push_back({static_cast<int>(p), pair.from, pair.to, shape,
                               level.anchor(pair.from, shape), level.anchor(pair.to, shape)});
            }
        }
    }
    return out;
}

namespace {

std::array<double, 4> encode_box(const Box& g, const Box& a, const BoxCoding& c) {
    if (!(g.width() > 0.0 && g.height() > 0.0) || !(a.width() > 0.0 && a.height() > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "cannot encode against a zero-area box");
    }
    return {(g.cx() - a.cx()) / a.width() / c.center_variance,
            (g.cy() - a.cy()) / a.height() / c.center_variance,
            std::log(g.width() / a.width()) / c.size_variance,
            std::log(g.height() / a.height()) / c.size_variance};
}

Box decode_box(const Box& a, const std::array<double, 4>& t, const BoxCoding& c) {
    const double cx = a.cx() + t[0] * c.center_variance * a.width();
    const double cy = a.cy() + t[1] * c.center_variance * a.height();
    const double w = a.width() * std::exp(t[2] * c.size_variance);
    const double h = a.height() * std::exp(t[3] * c.size_variance);
    return Box::from_center(cx, cy, w, h);
}

}  // namespace

RegressionTarget encode(const MicroTube& g, const AnchorMicroTube& a, BoxCoding coding) {
    return {encode_box(g.box_start, a.box_start, coding), encode_box(g.box_end, a.box_end, coding)};
}

MicroTube decode(const AnchorMicroTube& a, const RegressionTarget& t, FrameSpan span,
                 bool clip_to_unit, BoxCoding coding) {
    MicroTube m{span.frame_start, span.delta, decode_box(a.box_start, t[0], coding),
                decode_box(a.box_end, t[1], coding)};
    if (clip_to_unit) {
        m.box_start = clip(m.box_start);
        m.box_end = clip(m.box_end);
    }
    return m;
}

Matching match_positives(std::span<const MicroTube> gts, std::span<const AnchorMicroTube> proposals,
                         double iou_min) {
    if (!(iou_min > 0.0 && iou_min < 1.0)) {
        throw Error(ErrorCode::invalid_argument, "iou_min must lie in (0, 1)");
    }
    Matching m;
    m.proposal_to_gt.assign(proposals.size(), -1);
    m.proposal_overlap.assign(proposals.size(), 0.0);
    m.gt_best_proposal.assign(gts.size(), -1);
    m.gt_best_overlap.assign(gts.size(), 0.0);

    // Threshold pass: each proposal goes to its best GT.
    for (std::size_t j = 0; j < proposals.size(); ++j) {
        int best_gt = -1;
        double best = 0.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            const double v = microtube_overlap(gts[g], proposals[j]);
            if (v > best) {
                best = v;
                best_gt = static_cast<int>(g);
            }
            if (v > m.gt_best_overlap[g]) {
                m.gt_best_overlap[g] = v;
                m.gt_best_proposal[g] = static_cast<int>(j);
            }
        }
        if (best_gt >= 0 && best >= iou_min) {
            m.proposal_to_gt[j] = best_gt;
            m.proposal_overlap[j] = best;
        }
    }

    // Forced pass: every GT keeps its best proposal. Competing claims resolve
    // by overlap, then by GT index.
    std::vector<int> forced_by(proposals.size(), -1);
    for (std::size_t g = 0; g < gts.size(); ++g) {
        const int j = m.gt_best_proposal[g];
        if (j < 0) {
            continue;
        }
        const int current = forced_by[static_cast<std::size_t>(j)];
        if (current < 0 || m.gt_best_overlap[g] > m.gt_best_overlap[static_cast<std::size_t>(current)]) {
            forced_by[static_cast<std::size_t>(j)] = static_cast<int>(g);
        }
    }
    for (std::size_t j = 0; j < proposals.size(); ++j) {
        if (forced_by[j] >= 0) {
            m.proposal_to_gt[j] = forced_by[j];
            m.proposal_overlap[j] = m.gt_best_overlap[static_cast<std::size_t>(forced_by[j])];
        }
    }
    return m;
}

std::vector<double> best_overlaps(std::span<const MicroTube> gts,
                                  std::span<const AnchorMicroTube> proposals) {
    std::vector<double> best(gts.size(), 0.0);
    for (std::size_t g = 0; g < gts.size(); ++g) {
        for (const AnchorMicroTube& a : proposals) {
            best[g] = std::max(best[g], microtube_overlap(gts[g], a));
        }
    }
    return best;
}

double proposal_recall(std::span<const MicroTube> gts, std::span<const AnchorMicroTube> proposals,
                       double delta) {
    if (gts.empty()) {
        return 0.0;
    }
    const std::vector<double> best = best_overlaps(gts, proposals);
    const auto hits = std::count_if(best.begin(), best.end(), [delta](double v) { return v >= delta; });
    return static_cast<double>(hits) / static_cast<double>(gts.size());
}

}  // namespace microtube
