#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "momgraph/graph.hpp"
#include "momgraph/int128.hpp"
#include "momgraph/parallel.hpp"
#include "momgraph/pattern.hpp"

namespace momgraph {

enum class Induced { no, yes };

namespace detail {

// Matching order: start from the highest-degree pattern vertex, then
// repeatedly take the vertex with the most already-placed neighbours
// (ties: higher degree, then lower id).
inline std::vector<int> matching_order(const PatternGraph& r) {
    const int p = r.p();
    std::vector<int> order;
    std::vector<bool> placed(static_cast<std::size_t>(p), false);
    for (int step = 0; step < p; ++step) {
        int best = -1, best_links = -1;
        for (int v = 0; v < p; ++v) {
            if (placed[static_cast<std::size_t>(v)]) continue;
            int links = 0;
            for (int u : order) links += r.adjacent(u, v) ? 1 : 0;
            if (links > best_links || (links == best_links && r.degree(v) > r.degree(best))) {
                best = v;
                best_links = links;
            }
        }
        order.push_back(best);
        placed[static_cast<std::size_t>(best)] = true;
    }
    return order;
}

class Embedder {
public:
    Embedder(const Graph& g, const PatternGraph& r, Induced induced) : g_(g), r_(r), induced_(induced == Induced::yes) {
        order_ = matching_order(r);
        const int p = r.p();
        for (int t = 0; t < p; ++t) {
            for (int s = 0; s < t; ++s) {
                (r.adjacent(order_[t], order_[s]) ? linked_[t] : unlinked_[t]).push_back(s);
            }
        }
    }

    // Labelled embeddings whose first pattern vertex maps to `anchor`.
    Count count_from(Vertex anchor) {
        image_[0] = anchor;
        return extend(1);
    }

private:
    Count extend(int t) {
        if (t == r_.p()) return 1;
        Count total = 0;
        const auto& links = linked_[t];
        if (links.empty()) {
            const auto n = static_cast<Vertex>(g_.num_vertices());
            for (Vertex c = 0; c < n; ++c) {
                if (admissible(t, c)) {
                    image_[t] = c;
                    total = checked_add(total, extend(t + 1));
                }
            }
            return total;
        }
        // scan the shortest neighbour list among linked images
        int pivot = links[0];
        for (int s : links) {
            if (g_.degree(image_[s]) < g_.degree(image_[pivot])) pivot = s;
        }
        for (Vertex c : g_.neighbors(image_[pivot])) {
            if (!admissible(t, c)) continue;
            bool ok = true;
            for (int s : links) {
                if (s != pivot && !g_.has_edge(image_[s], c)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            image_[t] = c;
            total = checked_add(total, extend(t + 1));
        }
        return total;
    }

    bool admissible(int t, Vertex c) const {
        for (int s = 0; s < t; ++s) {
            if (image_[s] == c) return false;
        }
        if (induced_) {
            for (int s : unlinked_[t]) {
                if (g_.has_edge(image_[s], c)) return false;
            }
        }
        return true;
    }

    const Graph& g_;
    const PatternGraph& r_;
    bool induced_;
    std::vector<int> order_;
    std::array<std::vector<int>, kMaxPatternVertices> linked_{}, unlinked_{};
    std::array<Vertex, kMaxPatternVertices> image_{};
};

}  // namespace detail

// Injective maps V(R) -> V(G) carrying every pattern edge onto a graph edge
// (and, when induced, every pattern non-edge onto a non-edge).
inline Count count_labelled_embeddings(const Graph& g, const PatternGraph& r, Induced induced, unsigned threads = 1) {
    const std::size_t n = g.num_vertices();
    if (n < static_cast<std::size_t>(r.p())) return 0;
    const std::size_t chunks = std::min<std::size_t>(n, 256);
    std::vector<Count> partial(chunks, 0);
    parallel_chunks(n, chunks, threads, [&](std::size_t b, std::size_t e, std::size_t c) {
        detail::Embedder emb(g, r, induced);
        Count sum = 0;
        for (std::size_t v = b; v < e; ++v) sum = checked_add(sum, emb.count_from(static_cast<Vertex>(v)));
        partial[c] = sum;
    });
    Count total = 0;
    for (Count x : partial) total = checked_add(total, x);
    return total;
}

// Number of (vertex subset, copy of R on that subset) pairs present in g:
// labelled embeddings divided by |Aut(R)| (root-fixing when R is rooted).
inline Count count_noninduced(const Graph& g, const PatternGraph& r, unsigned threads = 1) {
    return count_labelled_embeddings(g, r, Induced::no, threads) / automorphism_count(r);
}

// As count_noninduced, restricted to copies that equal the induced subgraph.
inline Count count_induced(const Graph& g, const PatternGraph& r, unsigned threads = 1) {
    return count_labelled_embeddings(g, r, Induced::yes, threads) / automorphism_count(r);
}

}  // namespace momgraph
