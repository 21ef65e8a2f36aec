// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "microtube/transition.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "microtube/error.hpp"

namespace microtube {

std::int64_t TransitionCounts::total() const {
    std::int64_t sum = 0;
    for (const auto& level : levels) {
        for (const auto& [pair, count] : level.entries) {
            sum += count;
        }
    }
    return sum;
}

void TransitionCounts::merge(const TransitionCounts& other) {
    if (other.pyramid_hash != pyramid_hash || other.levels.size() != levels.size()) {
        throw Error(ErrorCode::config_mismatch, "cannot merge counts from different pyramids");
    }
    if (other.delta != delta) {
        throw Error(ErrorCode::invalid_argument, "cannot merge counts estimated at different deltas");
    }
    for (std::size_t p = 0; p < levels.size(); ++p) {
        if (levels[p].grid != other.levels[p].grid) {
            throw Error(ErrorCode::config_mismatch, "cannot merge counts from different grids");
        }
        for (const auto& [pair, count] : other.levels[p].entries) {
            levels[p].entries[pair] += count;
        }
    }
}

double LevelMatrix::at(int from, int to) const {
    const auto it = entries.find({from, to});
    return it == entries.end() ? 0.0 : it->second;
}

double LevelMatrix::row_sum(int from) const {
    double sum = 0.0;
    for (auto it = entries.lower_bound({from, 0}); it != entries.end() && it->first.from == from; ++it) {
        sum += it->second;
    }
    return sum;
}

TransitionCounts empty_counts(const AnchorSet& anchors, int delta) {
    TransitionCounts counts;
    counts.pyramid_hash = anchors.hash();
    counts.delta = delta;
    for (const auto& level : anchors.levels()) {
        counts.levels.push_back({level.grid, {}});
    }
    return counts;
}

BinaryTransitions empty_transitions(const AnchorSet& anchors, int delta) {
    BinaryTransitions b;
    b.pyramid_hash = anchors.hash();
    b.delta = delta;
    for (const auto& level : anchors.levels()) {
        b.levels.push_back({level.grid, {}});
    }
    return b;
}

AnchorMatch best_anchor(const Box& box, const AnchorLevel& level) {
    AnchorMatch best{0, 0, -1.0};
    const int cells = level.num_cells();
    for (int cell = 0; cell < cells; ++cell) {
        for (int shape = 0; shape < level.shapes; ++shape) {
            const double v = iou(box, level.anchor(cell, shape));
            if (v > best.iou + kTieTolerance) {
                best = {cell, shape, v};
            }
        }
    }
    return best;
}

AnchorPairMatch best_anchor_pair(const MicroTube& g, const AnchorSet& anchors, std::size_t level) {
    const AnchorLevel& l = anchors.level(level);
    const AnchorMatch s = best_anchor(g.box_start, l);
    const AnchorMatch e = best_anchor(g.box_end, l);
    return {s.cell, e.cell, s.shape, e.shape, 0.5 * (s.iou + e.iou)};
}

LevelPairMatch best_level_pair(const MicroTube& g, const AnchorSet& anchors) {
    LevelPairMatch best{0, best_anchor_pair(g, anchors, 0)};
    for (std::size_t p = 1; p < anchors.num_levels(); ++p) {
        const AnchorPairMatch m = best_anchor_pair(g, anchors, p);
        if (m.score > best.match.score + kTieTolerance) {
            best = {p, m};
        }
    }
    return best;
}

namespace {

void accumulate(std::span<const MicroTube> gts, const AnchorSet& anchors, TransitionCounts& counts) {
    for (const MicroTube& g : gts) {
        const LevelPairMatch m = best_level_pair(g, anchors);
        counts.levels[m.level].entries[{m.match.cell_start, m.match.cell_end}] += 1;
    }
}

int common_delta(std::span<const MicroTube> gts) {
    if (gts.empty()) {
        throw Error(ErrorCode::invalid_argument, "cannot estimate transitions from no micro-tubes");
    }
    const int delta = gts.front().delta;
    for (const MicroTube& g : gts) {
        if (g.delta != delta) {
            throw Error(ErrorCode::invalid_argument, "micro-tubes mix different deltas");
        }
    }
    return delta;
}

}  // namespace

TransitionCounts estimate(std::span<const MicroTube> gts, const AnchorSet& anchors) {
    TransitionCounts counts = empty_counts(anchors, common_delta(gts));
    accumulate(gts, anchors, counts);
    return counts;
}

TransitionCounts estimate_sharded(std::span<const MicroTube> gts, const AnchorSet& anchors,
                                  std::size_t shards) {
    const int delta = common_delta(gts);
    shards = std::clamp<std::size_t>(shards, 1, gts.size());
    std::vector<TransitionCounts> partial(shards, empty_counts(anchors, delta));
    {
        std::vector<std::jthread> workers;
        const std::size_t chunk = (gts.size() + shards - 1) / shards;
        for (std::size_t s = 0; s < shards; ++s) {
            const std::size_t begin = std::min(gts.size(), s * chunk);
            const std::size_t end = std::min(gts.size(), begin + chunk);
            workers.emplace_back([&, s, begin, end] {
                accumulate(gts.subspan(begin, end - begin), anchors, partial[s]);
            });
        }
    }
    TransitionCounts merged = std::move(partial.front());
    for (std::size_t s = 1; s < shards; ++s) {
        merged.merge(partial[s]);
    }
    return merged;
}

TransitionMatrix normalize(const TransitionCounts& counts) {
    TransitionMatrix m;
    m.pyramid_hash = counts.pyramid_hash;
    m.delta = counts.delta;
    for (const auto& level : counts.levels) {
        LevelMatrix lm{level.grid, {}};
        auto it = level.entries.begin();
        while (it != level.entries.end()) {
            const int row = it->first.from;
            auto row_end = it;
            std::int64_t sum = 0;
            for (; row_end != level.entries.end() && row_end->first.from == row; ++row_end) {
                sum += row_end->second;
            }
            for (; it != row_end; ++it) {
                if (it->second > 0) {
                    lm.entries.emplace(it->first, static_cast<double>(it->second) / static_cast<double>(sum));
                }
            }
        }
        m.levels.push_back(std::move(lm));
    }
    return m;
}

BinaryTransitions threshold(const TransitionMatrix& m, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "threshold tau must lie in (0, 1]");
    }
    BinaryTransitions b;
    b.pyramid_hash = m.pyramid_hash;
    b.delta = m.delta;
    b.tau = tau;
    for (const auto& level : m.levels) {
        LevelSupport s{level.grid, {}};
        for (const auto& [pair, prob] : level.entries) {
            if (prob >= tau) {
                s.pairs.insert(pair);
            }
        }
        b.levels.push_back(std::move(s));
    }
    return b;
}

namespace {

void note(BinaryTransitions& b, const char* name) {
    if (std::find(b.augmentations.begin(), b.augmentations.end(), name) == b.augmentations.end()) {
        b.augmentations.emplace_back(name);
    }
}

}  // namespace

BinaryTransitions augment_diagonal(const BinaryTransitions& b) {
    BinaryTransitions out = b;
    for (auto& level : out.levels) {
        for (int i = 0; i < level.grid * level.grid; ++i) {
            level.pairs.insert({i, i});
        }
    }
    note(out, "diagonal");
    return out;
}

BinaryTransitions augment_neighbors(const BinaryTransitions& b) {
    BinaryTransitions out = b;
    for (auto& level : out.levels) {
        const int g = level.grid;
        for (int row = 0; row < g; ++row) {
            for (int col = 0; col < g; ++col) {
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int r2 = row + dr;
                        const int c2 = col + dc;
                        if ((dr == 0 && dc == 0) || r2 < 0 || r2 >= g || c2 < 0 || c2 >= g) {
                            continue;
                        }
                        level.pairs.insert({row * g + col, r2 * g + c2});
                    }
                }
            }
        }
    }
    note(out, "neighbors");
    return out;
}

BinaryTransitions augment_relative_offsets(const BinaryTransitions& b) {
    BinaryTransitions out = b;
    for (auto& level : out.levels) {
        const int g = level.grid;
        std::set<std::pair<int, int>> offsets;
        for (const CellPair& pair : level.pairs) {
            const CellCoord from = cell_coord(g, pair.from);
            const CellCoord to = cell_coord(g, pair.to);
            offsets.emplace(to.row - from.row, to.col - from.col);
        }
        for (int row = 0; row < g; ++row) {
            for (int col = 0; col < g; ++col) {
                for (const auto& [dr, dc] : offsets) {
                    const int r2 = row + dr;
                    const int c2 = col + dc;
                    if (r2 >= 0 && r2 < g && c2 >= 0 && c2 < g) {
                        level.pairs.insert({row * g + col, r2 * g + c2});
                    }
                }
            }
        }
    }
    note(out, "offsets");
    return out;
}

BinaryTransitions diagonal_transitions(const AnchorSet& anchors, int delta) {
    return augment_diagonal(empty_transitions(anchors, delta));
}

Cardinality cardinality(const BinaryTransitions& b) {
    Cardinality c;
    for (const auto& level : b.levels) {
        c.per_level.push_back(level.pairs.size());
        c.total += level.pairs.size();
    }
    return c;
}

std::size_t off_diagonal_count(const BinaryTransitions& b) {
    std::size_t n = 0;
    for (const auto& level : b.levels) {
        n += static_cast<std::size_t>(std::count_if(level.pairs.begin(), level.pairs.end(),
                                                    [](const CellPair& p) { return p.from != p.to; }));
    }
    return n;
}

}  // namespace microtube
