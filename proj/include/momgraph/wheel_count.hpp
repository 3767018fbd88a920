#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "momgraph/graph.hpp"
#include "momgraph/int128.hpp"
#include "momgraph/parallel.hpp"
#include "momgraph/paths.hpp"
#include "momgraph/pattern.hpp"

namespace momgraph {

struct WheelCountLimits {
    std::uint64_t paths_per_hub = kDefaultPathBudget;
    unsigned threads = 0;
};

namespace detail {

// Fenwick tree over path indices holding the "blocked" indicator.
class Fenwick {
public:
    void reset(std::size_t n) { t_.assign(n + 1, 0); }
    void add(std::size_t i, int d) {
        for (++i; i < t_.size(); i += i & (~i + 1)) t_[i] += d;
    }
    std::int64_t prefix(std::size_t i) const {  // sum over [0, i)
        std::int64_t s = 0;
        for (; i > 0; i -= i & (~i + 1)) s += t_[i];
        return s;
    }

private:
    std::vector<std::int64_t> t_;
};

// Counts, for one hub at a time, the copies of a generalized wheel rooted at
// that hub: unordered choices of ls[j] spokes of length ks[j] for every
// group j, all spokes pairwise vertex-disjoint away from the hub.
class HubWheelCounter {
public:
    HubWheelCounter(const Graph& g, const WheelSpec& spec, std::uint64_t budget)
        : g_(g), spec_(spec.sorted()), budget_(budget), is_nbr_(g.num_vertices(), 0), tally_(g.num_vertices(), 0),
          slot_(g.num_vertices(), -1) {}

    Count count(Vertex hub) {
        if (spec_.t() == 1) {
            const int k = spec_.ks[0], l = spec_.ls[0];
            if (k == 1) return binomial(g_.degree(hub), static_cast<std::uint64_t>(l));
            if (l == 1) return count_paths_from(g_, hub, k, budget_);
            if (k == 2 && l <= 3) return two_path_selections(hub, l);
        }
        return backtrack(hub);
    }

private:
    // Inclusion-exclusion over the conflict relation of 2-paths (i, a, b).
    // A path is identified with its vertex pair {a, b}; two paths conflict
    // when the pairs meet. With c_v = #paths through v and m_ab = #paths on
    // the pair {a, b}, a path x = {a, b} conflicts with d_x = c_a + c_b - m_ab
    // paths (itself included), and the number of ordered conflict-free
    // tuples is
    //   l = 2:  P^2 - W1
    //   l = 3:  P^3 - 3 P W1 + 3 W2 - T3
    // with W1 = sum d_x, W2 = sum d_x^2 and T3 the ordered pairwise-conflicting
    // triples: those sharing a common vertex (sum_v c_v^3 - sum_x m_x^2) plus
    // those forming a triangle a-b-c of pairs (6 * sum m_ab m_bc m_ca).
    Count two_path_selections(Vertex hub, int l) {
        const auto nbrs = g_.neighbors(hub);
        for (Vertex a : nbrs) is_nbr_[a] = 1;
        touched_.clear();
        auto bump = [&](Vertex v, std::uint64_t by) {
            if (tally_[v] == 0) touched_.push_back(v);
            tally_[v] += by;
        };
        __int128 P = 0;
        for (Vertex a : nbrs) {
            const std::uint64_t out = g_.degree(a) - 1;
            P += out;
            if (out > 0) bump(a, out);
            for (Vertex b : g_.neighbors(a)) {
                if (b != hub) bump(b, 1);
            }
        }
        if (P > static_cast<__int128>(budget_)) {
            cleanup(nbrs);
            throw BudgetError("path budget of " + std::to_string(budget_) + " exceeded at hub " + std::to_string(hub) +
                              "; consider the degree-based approximation");
        }
        __int128 W1 = 0, W2 = 0, M2 = 0;
        for (Vertex a : nbrs) {
            for (Vertex b : g_.neighbors(a)) {
                if (b == hub) continue;
                const __int128 m = 1 + is_nbr_[b];
                const __int128 d = static_cast<__int128>(tally_[a]) + tally_[b] - m;
                W1 += d;
                W2 += d * d;
                M2 += m * m;
            }
        }
        __int128 ordered;
        if (l == 2) {
            ordered = P * P - W1;
        } else {
            __int128 C3 = 0;
            for (Vertex v : touched_) {
                const __int128 c = tally_[v];
                C3 += c * c * c;
            }
            __int128 tri = 0;
            for (Vertex a : nbrs) {
                for (Vertex c : g_.neighbors(a)) {
                    if (c <= a || !is_nbr_[c]) continue;
                    // a, c adjacent neighbours of the hub; third vertex b
                    auto na = g_.neighbors(a), nc = g_.neighbors(c);
                    auto ia = na.begin(), ic = nc.begin();
                    while (ia != na.end() && ic != nc.end()) {
                        if (*ia < *ic) {
                            ++ia;
                        } else if (*ic < *ia) {
                            ++ic;
                        } else {
                            const Vertex b = *ia;
                            ++ia;
                            ++ic;
                            if (b == hub) continue;
                            if (is_nbr_[b] && b < c) continue;  // all-neighbour triangle counted once
                            const __int128 mb = 1 + is_nbr_[b];
                            tri += 2 * mb * mb;
                        }
                    }
                }
            }
            const __int128 T3 = C3 - M2 + 6 * tri;
            ordered = P * P * P - 3 * P * W1 + 3 * W2 - T3;
        }
        cleanup(nbrs);
        const __int128 perms = l == 2 ? 2 : 6;
        if (ordered < 0 || ordered % perms != 0) throw OverflowError("inconsistent 2-path selection count");
        return static_cast<Count>(ordered / perms);
    }

    void cleanup(std::span<const Vertex> nbrs) {
        for (Vertex a : nbrs) is_nbr_[a] = 0;
        for (Vertex v : touched_) tally_[v] = 0;
        touched_.clear();
    }

    Count backtrack(Vertex hub) {
        const int t = spec_.t();
        // paths per group, flattened; global ids are offset per group
        group_paths_.assign(static_cast<std::size_t>(t), {});
        group_offset_.assign(static_cast<std::size_t>(t) + 1, 0);
        for (int j = 0; j < t; ++j) {
            enumerate_paths_from(g_, hub, spec_.ks[j], budget_, group_paths_[j]);
            const auto count = group_paths_[j].size() / static_cast<std::size_t>(spec_.ks[j]);
            group_offset_[j + 1] = group_offset_[j] + count;
            if (count < static_cast<std::size_t>(spec_.ls[j])) return 0;
        }
        const std::size_t total_paths = group_offset_[t];

        // incidence lists: vertex -> global path ids
        incidence_.clear();
        touched_.clear();
        for (int j = 0; j < t; ++j) {
            const auto k = static_cast<std::size_t>(spec_.ks[j]);
            for (std::size_t x = 0; x * k < group_paths_[j].size(); ++x) {
                for (std::size_t s = 0; s < k; ++s) {
                    const Vertex v = group_paths_[j][x * k + s];
                    if (slot_[v] < 0) {
                        slot_[v] = static_cast<std::int64_t>(incidence_.size());
                        incidence_.emplace_back();
                        touched_.push_back(v);
                    }
                    incidence_[static_cast<std::size_t>(slot_[v])].push_back(static_cast<std::uint32_t>(group_offset_[j] + x));
                }
            }
        }
        blocked_.assign(total_paths, 0);
        fenwick_.resize(static_cast<std::size_t>(t));
        for (int j = 0; j < t; ++j) fenwick_[j].reset(group_offset_[j + 1] - group_offset_[j]);

        slots_.clear();
        for (int j = 0; j < t; ++j) {
            for (int c = 0; c < spec_.ls[j]; ++c) slots_.push_back(j);
        }
        nodes_ = 0;
        hub_ = hub;
        Count total = select(0, 0);

        for (Vertex v : touched_) slot_[v] = -1;
        touched_.clear();
        return total;
    }

    void toggle(int group, std::size_t global, int delta) {
        const auto j = static_cast<std::size_t>(group);
        const auto k = static_cast<std::size_t>(spec_.ks[j]);
        const std::size_t local = global - group_offset_[j];
        for (std::size_t s = 0; s < k; ++s) {
            const Vertex v = group_paths_[j][local * k + s];
            for (std::uint32_t y : incidence_[static_cast<std::size_t>(slot_[v])]) {
                const int gy = group_of(y);
                if (delta > 0) {
                    if (blocked_[y]++ == 0) fenwick_[gy].add(y - group_offset_[gy], 1);
                } else {
                    if (--blocked_[y] == 0) fenwick_[gy].add(y - group_offset_[gy], -1);
                }
            }
        }
    }

    int group_of(std::size_t global) const {
        int j = 0;
        while (global >= group_offset_[j + 1]) ++j;
        return j;
    }

    // Chooses slot `pos` onward; within a group, spokes are taken in
    // increasing local index so each unordered selection is counted once.
    Count select(std::size_t pos, std::size_t min_local) {
        const int j = slots_[pos];
        const std::size_t size = group_offset_[j + 1] - group_offset_[j];
        if (pos + 1 == slots_.size()) {
            if (min_local >= size) return 0;
            const auto blocked = fenwick_[j].prefix(size) - fenwick_[j].prefix(min_local);
            return static_cast<Count>(size - min_local) - static_cast<Count>(blocked);
        }
        if (++nodes_ > node_limit()) {
            for (Vertex v : touched_) slot_[v] = -1;
            touched_.clear();
            throw BudgetError("wheel selection budget exceeded at hub " + std::to_string(hub_) + "; consider the degree-based approximation");
        }
        const bool next_same_group = slots_[pos + 1] == j;
        Count total = 0;
        for (std::size_t x = min_local; x < size; ++x) {
            const std::size_t global = group_offset_[j] + x;
            if (blocked_[global] != 0) continue;
            toggle(j, global, +1);
            total = checked_add(total, select(pos + 1, next_same_group ? x + 1 : 0));
            toggle(j, global, -1);
        }
        return total;
    }

    static constexpr std::uint64_t kNodeFactor = 64;
    std::uint64_t node_limit() const noexcept {
        return budget_ > UINT64_MAX / kNodeFactor ? UINT64_MAX : budget_ * kNodeFactor;
    }

    const Graph& g_;
    WheelSpec spec_;
    std::uint64_t budget_;
    std::vector<std::uint8_t> is_nbr_;
    std::vector<std::uint64_t> tally_;
    std::vector<std::int64_t> slot_;
    std::vector<Vertex> touched_;

    std::vector<std::vector<Vertex>> group_paths_;
    std::vector<std::size_t> group_offset_;
    std::vector<std::vector<std::uint32_t>> incidence_;
    std::vector<std::uint32_t> blocked_;
    std::vector<Fenwick> fenwick_;
    std::vector<int> slots_;
    std::uint64_t nodes_ = 0;
    Vertex hub_ = 0;
};

}  // namespace detail

// Entry i is the number of copies of the wheel whose hub is vertex i.
inline std::vector<Count> wheel_counts_per_hub(const Graph& g, const WheelSpec& spec, const WheelCountLimits& limits = {}) {
    spec.validate();
    const std::size_t n = g.num_vertices();
    std::vector<Count> out(n, 0);
    if (static_cast<std::size_t>(spec.q()) >= n) return out;
    const std::size_t chunks = std::min<std::size_t>(n, 64);
    parallel_chunks(n, chunks, limits.threads, [&](std::size_t b, std::size_t e, std::size_t) {
        detail::HubWheelCounter counter(g, spec, limits.paths_per_hub);
        for (std::size_t i = b; i < e; ++i) out[i] = counter.count(static_cast<Vertex>(i));
    });
    return out;
}

// Total hub-rooted copies of the wheel: the sum of the per-hub counts.
inline Count count_wheel_noninduced(const Graph& g, const WheelSpec& spec, const WheelCountLimits& limits = {}) {
    Count total = 0;
    for (Count c : wheel_counts_per_hub(g, spec, limits)) total = checked_add(total, c);
    return total;
}

}  // namespace momgraph
