#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "momgraph/errors.hpp"
#include "momgraph/graph.hpp"
#include "momgraph/model.hpp"
#include "momgraph/rng.hpp"

namespace momgraph {

struct SampleOutput {
    Graph graph;
    // Latent uniforms xi_i and the block (or grid cell) containing each one;
    // present only when latents were requested.
    std::optional<std::vector<double>> xi;
    std::optional<std::vector<int>> cells;
    std::uint64_t seed = 0;
};

namespace detail {

// Stream tags. Latents use one sequential stream; each unordered pair of
// cells (a <= b) owns an independent stream.
inline constexpr std::uint64_t kLatentStream = 0;
inline constexpr std::uint64_t kEdgeStream = 1;

inline std::vector<double> draw_latents(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(SplitMix64::derive(seed, {kLatentStream}));
    std::vector<double> xi(n);
    for (auto& x : xi) x = rng.uniform_open();
    return xi;
}

// Samples edges of an inhomogeneous random graph whose pair probabilities
// depend only on the cells of the endpoints. Vertices of each cell are taken
// in ascending id order; pairs of cells (a, b), a <= b, are visited in
// lexicographic order and within each cell pair the candidate vertex pairs
// are scanned lexicographically, jumping between successes with geometric
// skips drawn from the (seed, a, b) stream.
template <typename ProbFn>
Graph sample_by_cells(std::size_t n, const std::vector<int>& cell, int num_cells, ProbFn&& prob, std::uint64_t seed) {
    std::vector<std::vector<Vertex>> members(static_cast<std::size_t>(num_cells));
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(cell[i])].push_back(static_cast<Vertex>(i));

    std::vector<int> occupied;
    for (int a = 0; a < num_cells; ++a) {
        if (!members[static_cast<std::size_t>(a)].empty()) occupied.push_back(a);
    }

    std::vector<Edge> edges;
    for (std::size_t ia = 0; ia < occupied.size(); ++ia) {
        for (std::size_t ib = ia; ib < occupied.size(); ++ib) {
            const int a = occupied[ia], b = occupied[ib];
            const double p = std::min(1.0, prob(a, b));
            if (!(p > 0.0)) continue;
            SplitMix64 rng(SplitMix64::derive(seed, {kEdgeStream, static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)}));
            const auto& A = members[static_cast<std::size_t>(a)];
            const auto& B = members[static_cast<std::size_t>(b)];
            if (a != b) {
                const std::uint64_t total = static_cast<std::uint64_t>(A.size()) * B.size();
                std::uint64_t t = rng.geometric_skip(p);
                while (t < total) {
                    edges.emplace_back(A[t / B.size()], B[t % B.size()]);
                    const std::uint64_t s = rng.geometric_skip(p);
                    if (s >= total - t) break;
                    t += s + 1;
                }
            } else {
                // Pairs (A[x], A[y]) with x < y, row by row.
                const std::uint64_t m = A.size();
                std::uint64_t x = 0, y = 1;  // current candidate
                std::uint64_t s = rng.geometric_skip(p);
                while (x + 1 < m) {
                    // advance s positions from (x, y)
                    while (x + 1 < m && s >= m - y) {
                        s -= m - y;
                        ++x;
                        y = x + 1;
                    }
                    if (x + 1 >= m) break;
                    y += s;
                    edges.emplace_back(A[x], A[y]);
                    ++y;
                    if (y >= m) {
                        ++x;
                        y = x + 1;
                    }
                    s = rng.geometric_skip(p);
                }
            }
        }
    }
    return Graph::from_edges(n, edges);
}

}  // namespace detail

// Probability that two vertices with the given latents are joined.
inline double edge_probability(const BlockModel& m, double xi_u, double xi_v) {
    const BlockModel c = canonicalize(m);
    const auto cut = block_boundaries(c);
    return c.rho * c.S(block_of(cut, xi_u), block_of(cut, xi_v));
}

inline double edge_probability(const Graphon& w, double rho, double xi_u, double xi_v) {
    return std::min(1.0, rho * w(xi_u, xi_v));
}

// Samples n vertices from the block model. Each vertex draws xi ~ U(0,1) and
// joins the canonical block whose interval contains xi, so block a is chosen
// with probability pi_a and xi is uniform inside that block's interval. The
// reported cells are canonical block indices.
inline SampleOutput sample_block_model(const BlockModel& m, std::size_t n, std::uint64_t seed, bool keep_latents = false) {
    m.validate();
    if (n < 2) throw DomainError("sample_block_model requires n >= 2");
    const BlockModel c = canonicalize(m);
    const auto cut = block_boundaries(c);
    auto xi = detail::draw_latents(n, seed);
    std::vector<int> cell(n);
    for (std::size_t i = 0; i < n; ++i) cell[i] = block_of(cut, xi[i]);
    SampleOutput out;
    out.seed = seed;
    out.graph = detail::sample_by_cells(n, cell, c.K(), [&](int a, int b) { return c.rho * c.S(a, b); }, seed);
    if (keep_latents) {
        out.xi = std::move(xi);
        out.cells = std::move(cell);
    }
    return out;
}

// Samples from h_n(u,v) = min(rho * w(u,v), 1) with w read off the grid cell.
inline SampleOutput sample_graphon(const Graphon& w, double rho, std::size_t n, std::uint64_t seed, bool keep_latents = false) {
    if (!(rho > 0.0) || rho > 1.0) throw DomainError("sample_graphon requires rho in (0, 1]");
    if (n < 2) throw DomainError("sample_graphon requires n >= 2");
    auto xi = detail::draw_latents(n, seed);
    std::vector<int> cell(n);
    for (std::size_t i = 0; i < n; ++i) cell[i] = static_cast<int>(w.cell_of(xi[i]));
    SampleOutput out;
    out.seed = seed;
    out.graph = detail::sample_by_cells(
        n, cell, static_cast<int>(w.resolution()),
        [&](int a, int b) { return rho * w.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b)); }, seed);
    if (keep_latents) {
        out.xi = std::move(xi);
        out.cells = std::move(cell);
    }
    return out;
}

}  // namespace momgraph
