#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "momgraph/errors.hpp"
#include "momgraph/graph.hpp"
#include "momgraph/int128.hpp"

namespace momgraph {

inline constexpr std::uint64_t kDefaultPathBudget = 1'000'000;

namespace detail {

inline bool on_path(const Vertex* path, int len, Vertex v) {
    for (int s = 0; s < len; ++s) {
        if (path[s] == v) return true;
    }
    return false;
}

}  // namespace detail

// Number of loopless paths (start, v1, ..., vk) with all k+1 vertices
// distinct. The final step is counted rather than enumerated: the
// continuations of the last vertex are its neighbours minus those already on
// the path. `budget` bounds the number of length-(k-1) prefixes visited.
inline Count count_paths_from(const Graph& g, Vertex start, int k, std::uint64_t budget = kDefaultPathBudget) {
    if (k < 1) throw DomainError("path length must be >= 1");
    if (k == 1) return g.degree(start);
    std::vector<Vertex> path(static_cast<std::size_t>(k) + 1);
    path[0] = start;
    std::uint64_t visited = 0;
    Count total = 0;
    auto rec = [&](auto&& self, int depth) -> void {
        const Vertex u = path[static_cast<std::size_t>(depth)];
        if (depth == k - 1) {
            if (++visited > budget) {
                throw BudgetError("path budget of " + std::to_string(budget) + " exceeded at vertex " + std::to_string(start));
            }
            // neighbours of u already on the path (u's predecessor always is)
            std::uint32_t blocked = 0;
            for (int s = 0; s < depth; ++s) {
                if (g.has_edge(u, path[static_cast<std::size_t>(s)])) ++blocked;
            }
            total = checked_add(total, g.degree(u) - blocked);
            return;
        }
        for (Vertex v : g.neighbors(u)) {
            if (detail::on_path(path.data(), depth + 1, v)) continue;
            path[static_cast<std::size_t>(depth) + 1] = v;
            self(self, depth + 1);
        }
    };
    rec(rec, 0);
    return total;
}

// Appends every loopless k-path from `start` to `out` as k consecutive
// vertices (the start vertex is omitted). Throws BudgetError once more than
// `budget` paths have been produced.
inline void enumerate_paths_from(const Graph& g, Vertex start, int k, std::uint64_t budget, std::vector<Vertex>& out) {
    if (k < 1) throw DomainError("path length must be >= 1");
    std::array<Vertex, 64> path{};
    if (k >= static_cast<int>(path.size())) throw CapabilityError("path length too large");
    path[0] = start;
    std::uint64_t produced = 0;
    auto rec = [&](auto&& self, int depth) -> void {
        const Vertex u = path[static_cast<std::size_t>(depth)];
        for (Vertex v : g.neighbors(u)) {
            if (detail::on_path(path.data(), depth + 1, v)) continue;
            path[static_cast<std::size_t>(depth) + 1] = v;
            if (depth + 1 == k) {
                if (++produced > budget) {
                    throw BudgetError("path budget of " + std::to_string(budget) + " exceeded at hub " + std::to_string(start) +
                                      "; consider the degree-based approximation");
                }
                out.insert(out.end(), path.begin() + 1, path.begin() + k + 1);
            } else {
                self(self, depth + 1);
            }
        }
    };
    rec(rec, 0);
}

}  // namespace momgraph
