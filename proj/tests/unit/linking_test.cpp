// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <set>

#include <gtest/gtest.h>

#include "microtube/anchor_pyramid.hpp"
#include "microtube/error.hpp"
#include "microtube/eval.hpp"
#include "microtube/linking.hpp"
#include "microtube/synth.hpp"
#include "oracle/oracle.hpp"
#include "support/generators.hpp"

namespace {

using namespace microtube;

ScoredMicroTube det(int start, int delta, const Box& s, const Box& e, double score, const std::string& video = "v") {
    return {video, {start, delta, s, e}, {1.0 - score, score}, "rgb"};
}

TEST(Nms, IdenticalKeepsOne) {
    const Box b{0.1, 0.1, 0.4, 0.4};
    const std::vector<ScoredMicroTube> d{det(1, 1, b, b, 0.6), det(1, 1, b, b, 0.9)};
    EXPECT_EQ(nms_microtubes(d, 1, 0.45), (std::vector<std::size_t>{1}));
}

TEST(Nms, DisjointKeepsBoth) {
    const Box a{0.0, 0.0, 0.2, 0.2};
    const Box b{0.5, 0.5, 0.7, 0.7};
    const std::vector<ScoredMicroTube> d{det(1, 1, a, a, 0.6), det(1, 1, b, b, 0.9)};
    EXPECT_EQ(nms_microtubes(d, 1, 0.45), (std::vector<std::size_t>{1, 0}));
}

TEST(Nms, ChainKeepsFirstAndThird) {
    // Unit-height boxes shifted by 0.25: neighbours overlap 0.6, the ends 1/3.
    auto at = [](double x) { return Box{x, 0.0, x + 1.0, 1.0}; };
    const std::vector<ScoredMicroTube> d{det(1, 1, at(0.0), at(0.0), 0.9), det(1, 1, at(0.25), at(0.25), 0.8),
                                         det(1, 1, at(0.5), at(0.5), 0.7)};
    ASSERT_NEAR(microtube_overlap(d[0].tube, d[1].tube), 0.6, 1e-12);
    ASSERT_NEAR(microtube_overlap(d[1].tube, d[2].tube), 0.6, 1e-12);
    ASSERT_NEAR(microtube_overlap(d[0].tube, d[2].tube), 1.0 / 3.0, 1e-12);
    EXPECT_EQ(nms_microtubes(d, 1, 0.5), (std::vector<std::size_t>{0, 2}));
}

TEST(Nms, EqualScoresKeepInputOrder) {
    const Box a{0.0, 0.0, 0.2, 0.2};
    const Box b{0.5, 0.5, 0.7, 0.7};
    const std::vector<ScoredMicroTube> d{det(1, 1, b, b, 0.5), det(1, 1, a, a, 0.5)};
    EXPECT_EQ(nms_microtubes(d, 1, 0.45), (std::vector<std::size_t>{0, 1}));
}

TEST(Interpolate, Examples) {
    const Box a{0, 0, 1, 1};
    const Box b{2, 2, 3, 3};
    EXPECT_EQ(interpolate({1, 1, a, b}), (std::vector<Box>{a, b}));
    EXPECT_EQ(interpolate({1, 2, a, b}), (std::vector<Box>{a, {1, 1, 2, 2}, b}));
    EXPECT_EQ(interpolate({1, 3, a, b}).size(), 4U);
}

TEST(Link, BoundarySharingMicrotubesChain) {
    const Box b{0.2, 0.2, 0.5, 0.5};
    const std::vector<DetectionGroup> groups{{1, 5, {det(1, 5, b, b, 0.9)}}, {6, 5, {det(6, 5, b, b, 0.8)}}};
    const std::vector<ActionPath> paths = link(groups, LinkParams{}, 1);
    ASSERT_EQ(paths.size(), 1U);
    EXPECT_EQ(paths[0].t_start, 1);
    EXPECT_EQ(paths[0].t_end, 11);
    EXPECT_EQ(paths[0].boxes.size(), 11U);
    EXPECT_NEAR(paths[0].score, 0.85, 1e-12);
    EXPECT_NEAR(paths[0].frame_scores[5], 0.85, 1e-12);
    EXPECT_EQ(paths[0].steps.size(), 2U);
}

TEST(Link, DisjointStreamsGiveParallelPaths) {
    const Box a{0.0, 0.0, 0.2, 0.2};
    const Box b{0.6, 0.6, 0.8, 0.8};
    std::vector<DetectionGroup> groups;
    for (int f = 1; f <= 9; f += 2) {
        groups.push_back({f, 2, {det(f, 2, a, a, 0.9), det(f, 2, b, b, 0.7)}});
    }
    const std::vector<ActionPath> paths = link(groups, LinkParams{}, 1);
    ASSERT_EQ(paths.size(), 2U);
    EXPECT_EQ(paths[0].boxes.front(), a);
    EXPECT_EQ(paths[1].boxes.front(), b);
    for (const ActionPath& p : paths) {
        EXPECT_EQ(p.t_start, 1);
        EXPECT_EQ(p.t_end, 11);
        EXPECT_EQ(p.steps.size(), 5U);
    }
}

TEST(Link, MisalignedGroupsThrow) {
    const Box b{0.2, 0.2, 0.5, 0.5};
    const std::vector<DetectionGroup> gap{{1, 5, {det(1, 5, b, b, 0.9)}}, {7, 5, {det(7, 5, b, b, 0.8)}}};
    try {
        link(gap, LinkParams{}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::frame_misalignment);
    }
    const std::vector<DetectionGroup> wrong_member{{1, 5, {det(2, 5, b, b, 0.9)}}};
    EXPECT_THROW(link(wrong_member, LinkParams{}, 1), Error);
}

TEST(Link, MissesCloseAndGapsAreBridged) {
    const Box b{0.2, 0.2, 0.5, 0.5};
    const Box c{0.3, 0.2, 0.6, 0.5};
    std::vector<DetectionGroup> groups{{1, 1, {det(1, 1, b, b, 0.9)}}, {2, 1, {}}, {3, 1, {det(3, 1, c, c, 0.9)}}};
    LinkParams params;
    params.max_misses = 2;
    const std::vector<ActionPath> bridged = link(groups, params, 1);
    ASSERT_EQ(bridged.size(), 1U);
    EXPECT_EQ(bridged[0].t_start, 1);
    EXPECT_EQ(bridged[0].t_end, 4);
    EXPECT_EQ(bridged[0].boxes[2], c);
    EXPECT_EQ(bridged[0].boxes[1], b);

    params.max_misses = 1;
    const std::vector<ActionPath> split = link(groups, params, 1);
    EXPECT_EQ(split.size(), 2U);
}

TEST(Link, ScoreFloorAndTopN) {
    const Box a{0.0, 0.0, 0.2, 0.2};
    const Box b{0.6, 0.6, 0.8, 0.8};
    const Box c{0.3, 0.0, 0.5, 0.2};
    const std::vector<DetectionGroup> groups{{1, 1, {det(1, 1, a, a, 0.9), det(1, 1, b, b, 0.005), det(1, 1, c, c, 0.5)}}};
    EXPECT_EQ(link(groups, LinkParams{}, 1).size(), 2U);
    LinkParams one;
    one.top_n = 1;
    const auto paths = link(groups, one, 1);
    ASSERT_EQ(paths.size(), 1U);
    EXPECT_EQ(paths[0].boxes[0], a);
}

TEST(Link, NoMicrotubeUsedTwiceAndAllConsumedWithoutFiltering) {
    gen::Gen g(51);
    LinkParams open;
    open.nms_threshold = 1.0;
    open.score_floor = 0.0;
    open.top_n = 1000;
    for (int k = 0; k < 30; ++k) {
        std::vector<DetectionGroup> groups;
        std::size_t total = 0;
        for (int f = 1; f <= 20; f += 1) {
            DetectionGroup group{f, 1, {}};
            const int n = g.integer(0, 4);
            for (int i = 0; i < n; ++i) {
                const MicroTube m = g.microtube();
                group.dets.push_back(det(f, 1, m.box_start, m.box_end, g.uniform(0, 1)));
            }
            total += group.dets.size();
            groups.push_back(std::move(group));
        }
        const std::vector<ActionPath> paths = link(groups, open, 1);
        std::set<std::pair<int, int>> used;
        std::size_t steps = 0;
        for (const ActionPath& p : paths) {
            EXPECT_EQ(static_cast<int>(p.boxes.size()), p.length());
            EXPECT_EQ(p.frame_scores.size(), p.boxes.size());
            for (const PathStep& s : p.steps) {
                EXPECT_TRUE(used.insert({s.group, s.index}).second);
                ++steps;
            }
        }
        EXPECT_EQ(steps, total);
    }
}

TEST(Link, DriftingActorGivesOneAccuratePath) {
    MotionSpec spec;
    spec.frames_per_video = 30;
    spec.duration_min = 30;
    spec.duration_max = 30;
    const Dataset d = generate_dataset(spec, 1, 77);
    const AnchorSet anchors = build_pyramid(PyramidConfig::ssd300());
    const std::vector<ScoredMicroTube> dets =
        simulate_detections(d, anchors, diagonal_transitions(anchors, 1), 1, DetectionNoise{}, 5);
    const std::vector<ActionPath> paths = link_all(dets, LinkParams{});
    ASSERT_EQ(paths.size(), 1U);
    const ActionPath gt = to_path(d.videos[0].tubes[0], d.videos[0].id);
    EXPECT_GE(tube_st_iou(paths[0], gt), 0.9);
    EXPECT_NEAR(oracle::st_iou(oracle::frames_of(paths[0]), oracle::frames_of(gt)), tube_st_iou(paths[0], gt), 1e-12);
}

TEST(LinkAll, OrderedByVideoThenClassAndThreadIndependent) {
    MotionSpec spec;
    spec.num_classes = 3;
    spec.tubes_per_video = 2;
    const Dataset d = generate_dataset(spec, 6, 78);
    const AnchorSet anchors = build_pyramid(PyramidConfig::ssd300());
    DetectionNoise noise;
    noise.sigma = 0.01;
    noise.distractor_rate = 1.0;
    noise.num_classes = 3;
    noise.true_score = 0.8;
    const std::vector<ScoredMicroTube> dets = simulate_detections(d, anchors, diagonal_transitions(anchors, 1), 1, noise, 6);
    const std::vector<ActionPath> serial = link_all(dets, LinkParams{}, 1);
    EXPECT_EQ(link_all(dets, LinkParams{}, 4), serial);
    for (std::size_t k = 1; k < serial.size(); ++k) {
        EXPECT_LE(std::tie(serial[k - 1].video_id, serial[k - 1].class_id),
                  std::tie(serial[k].video_id, serial[k].class_id));
    }
}

TEST(LinkAll, RejectsRaggedScores) {
    const Box b{0.2, 0.2, 0.5, 0.5};
    std::vector<ScoredMicroTube> dets{det(1, 1, b, b, 0.9), det(2, 1, b, b, 0.9)};
    dets[1].scores.push_back(0.0);
    try {
        link_all(dets, LinkParams{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::length_mismatch);
    }
}

TEST(LinkParams, Validation) {
    LinkParams p;
    EXPECT_NO_THROW(validate(p));
    p.iou_weight = -1;
    EXPECT_THROW(validate(p), Error);
    p = {};
    p.max_misses = 0;
    EXPECT_THROW(validate(p), Error);
    p = {};
    p.nms_threshold = 0.0;
    EXPECT_THROW(validate(p), Error);
    p = {};
    p.top_n = 0;
    EXPECT_THROW(validate(p), Error);
}

TEST(Trim, ConstantHighScoreIsOneSegment) {
    const std::vector<double> s(15, 0.9);
    for (double alpha : {0.0, 0.5, 3.0}) {
        EXPECT_EQ(trim(s, alpha), (std::vector<Segment>{{0, 14}}));
    }
}

TEST(Trim, ZeroCostThresholdsAtHalf) {
    const std::vector<double> s{0.9, 0.2, 0.7, 0.5, 0.51, 0.49, 0.1};
    EXPECT_EQ(trim(s, 0.0), (std::vector<Segment>{{0, 0}, {2, 2}, {4, 4}}));
}

TEST(Trim, TenRandomScoresMatchExhaustiveSearch) {
    gen::Gen g(61);
    const std::vector<double> s = g.scores(10);
    EXPECT_EQ(trim(s, 0.5), oracle::brute_force_trim(s, 0.5));
}

TEST(Trim, ObjectiveOfResultIsOptimal) {
    gen::Gen g(62);
    for (int k = 0; k < 300; ++k) {
        const std::vector<double> s = g.scores(static_cast<std::size_t>(g.integer(1, 10)));
        const double alpha = g.uniform(0, 1.5);
        std::vector<bool> labels(s.size(), false);
        for (const Segment& seg : trim(s, alpha)) {
            for (int t = seg.first; t <= seg.last; ++t) labels[static_cast<std::size_t>(t)] = true;
        }
        EXPECT_NEAR(trim_objective(s, labels, alpha), oracle::brute_force_trim_value(s, alpha), 1e-12);
    }
}

TEST(Trim, SegmentCountNonIncreasingInCost) {
    gen::Gen g(63);
    for (int k = 0; k < 200; ++k) {
        const std::vector<double> s = g.scores(static_cast<std::size_t>(g.integer(1, 40)));
        std::size_t last = SIZE_MAX;
        for (double alpha : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0}) {
            const std::size_t n = trim(s, alpha).size();
            EXPECT_LE(n, last);
            last = n;
        }
    }
}

TEST(Trim, Errors) {
    EXPECT_THROW(trim(std::vector<double>{}, 0.5), Error);
    EXPECT_THROW(trim(std::vector<double>{0.5}, -0.1), Error);
}

TEST(TrimPath, SplitsIntoRuns) {
    ActionPath p;
    p.video_id = "v";
    p.class_id = 2;
    p.t_start = 10;
    p.t_end = 17;
    for (int f = 10; f <= 17; ++f) p.boxes.push_back({0.1, 0.1, 0.2 + 0.01 * f, 0.3});
    p.frame_scores = {0.9, 0.9, 0.9, 0.1, 0.1, 0.1, 0.8, 0.8};
    p.steps = {{10, 3, 0.9, 0, 0}, {13, 3, 0.1, 1, 0}, {16, 1, 0.8, 2, 0}};
    const std::vector<ActionPath> parts = trim_path(p, 0.3);
    ASSERT_EQ(parts.size(), 2U);
    EXPECT_EQ(parts[0].t_start, 10);
    EXPECT_EQ(parts[0].t_end, 12);
    EXPECT_EQ(parts[0].boxes.front(), p.boxes[0]);
    EXPECT_EQ(parts[1].t_start, 16);
    EXPECT_EQ(parts[1].t_end, 17);
    EXPECT_EQ(parts[1].boxes.back(), p.boxes.back());
    EXPECT_EQ(parts[1].class_id, 2);
}

TEST(FuseStreams, Examples) {
    const Box b{0.2, 0.2, 0.4, 0.4};
    const std::vector<ScoredMicroTube> a{det(1, 1, b, b, 0.8)};
    EXPECT_EQ(fuse_streams(a, a), a);

    std::vector<ScoredMicroTube> zero = a;
    zero[0].scores = {0.0, 0.0};
    const auto half = fuse_streams(a, zero);
    EXPECT_DOUBLE_EQ(half[0].scores[0], 0.1);
    EXPECT_DOUBLE_EQ(half[0].scores[1], 0.4);

    std::vector<ScoredMicroTube> shifted = a;
    shifted[0].tube.box_start = translate(b, 0.002, 0.002);
    shifted[0].stream = "flow";
    const auto mid = fuse_streams(a, shifted);
    EXPECT_NEAR(mid[0].tube.box_start.x_min, b.x_min + 0.001, 1e-15);
    EXPECT_EQ(mid[0].stream, "fused");
}

TEST(FuseStreams, Mismatches) {
    const Box b{0.2, 0.2, 0.4, 0.4};
    const std::vector<ScoredMicroTube> a{det(1, 1, b, b, 0.8)};
    const std::vector<ScoredMicroTube> two{det(1, 1, b, b, 0.8), det(2, 1, b, b, 0.8)};
    EXPECT_THROW(fuse_streams(a, two), Error);
    const std::vector<ScoredMicroTube> other{det(2, 1, b, b, 0.8)};
    EXPECT_THROW(fuse_streams(a, other), Error);
}

}  // namespace
