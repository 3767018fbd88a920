#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "momgraph/errors.hpp"

namespace momgraph {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

// Immutable undirected simple graph in CSR form. Neighbor lists are strictly
// increasing; the adjacency is symmetric and loop free.
class Graph {
public:
    Graph() = default;

    // Builds from an arbitrary edge list on vertices 0..n-1. Duplicate and
    // reversed edges collapse; a self-loop throws SelfLoopError.
    static Graph from_edges(std::size_t n, std::span<const Edge> edges, std::vector<std::string> labels = {}) {
        if (n > std::numeric_limits<Vertex>::max()) throw DomainError("vertex count exceeds 32-bit ids");
        Graph g;
        g.n_ = n;
        std::vector<std::uint64_t> count(n + 1, 0);
        for (auto [u, v] : edges) {
            if (u >= n || v >= n) throw DomainError("edge endpoint out of range");
            if (u == v) throw SelfLoopError("self-loop on vertex " + std::to_string(u));
            ++count[u + 1];
            ++count[v + 1];
        }
        for (std::size_t i = 0; i < n; ++i) count[i + 1] += count[i];
        std::vector<Vertex> adj(count[n]);
        std::vector<std::uint64_t> fill(count.begin(), count.end() - 1);
        for (auto [u, v] : edges) {
            adj[fill[u]++] = v;
            adj[fill[v]++] = u;
        }
        // sort + dedup each list, then compact
        g.offsets_.assign(n + 1, 0);
        std::uint64_t out = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto b = adj.begin() + static_cast<std::ptrdiff_t>(count[i]);
            auto e = adj.begin() + static_cast<std::ptrdiff_t>(count[i + 1]);
            std::sort(b, e);
            e = std::unique(b, e);
            for (auto it = b; it != e; ++it) adj[out++] = *it;
            g.offsets_[i + 1] = out;
        }
        adj.resize(out);
        adj.shrink_to_fit();
        g.adj_ = std::move(adj);
        g.degrees_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            g.degrees_[i] = static_cast<std::uint32_t>(g.offsets_[i + 1] - g.offsets_[i]);
        }
        g.edge_count_ = out / 2;
        if (!labels.empty() && labels.size() != n) throw DomainError("label count does not match vertex count");
        g.labels_ = std::move(labels);
        return g;
    }

    // Builds directly from per-vertex neighbor lists that are already sorted,
    // symmetric and loop free (used by the samplers).
    static Graph from_sorted_adjacency(std::vector<std::uint64_t> offsets, std::vector<Vertex> adj) {
        Graph g;
        g.n_ = offsets.empty() ? 0 : offsets.size() - 1;
        g.offsets_ = std::move(offsets);
        g.adj_ = std::move(adj);
        g.degrees_.resize(g.n_);
        for (std::size_t i = 0; i < g.n_; ++i) {
            g.degrees_[i] = static_cast<std::uint32_t>(g.offsets_[i + 1] - g.offsets_[i]);
        }
        g.edge_count_ = g.adj_.size() / 2;
        return g;
    }

    std::size_t num_vertices() const noexcept { return n_; }
    std::uint64_t num_edges() const noexcept { return edge_count_; }

    std::span<const Vertex> neighbors(Vertex v) const noexcept {
        return {adj_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
    }

    std::uint32_t degree(Vertex v) const noexcept { return degrees_[v]; }
    const std::vector<std::uint32_t>& degrees() const noexcept { return degrees_; }

    std::uint32_t max_degree() const noexcept {
        return degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());
    }

    bool has_edge(Vertex u, Vertex v) const noexcept {
        auto a = neighbors(u);
        auto b = neighbors(v);
        if (b.size() < a.size()) {
            std::swap(a, b);
            std::swap(u, v);
        }
        return std::binary_search(a.begin(), a.end(), v);
    }

    // Label of vertex v as it appeared in the source file; decimal id when
    // the graph was not loaded from labelled input.
    std::string label(Vertex v) const { return labels_.empty() ? std::to_string(v) : labels_[v]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    // Edges (u, v) with u < v in lexicographic order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (Vertex u = 0; u < n_; ++u) {
            for (Vertex v : neighbors(u)) {
                if (u < v) out.emplace_back(u, v);
            }
        }
        return out;
    }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.offsets_ == b.offsets_ && a.adj_ == b.adj_;
    }

private:
    std::size_t n_ = 0;
    std::uint64_t edge_count_ = 0;
    std::vector<std::uint64_t> offsets_{0};
    std::vector<Vertex> adj_;
    std::vector<std::uint32_t> degrees_;
    std::vector<std::string> labels_;
};

inline double average_degree(const Graph& g) {
    if (g.num_vertices() == 0) throw DomainError("average degree of a graph with no vertices");
    return 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_vertices());
}

// Estimated edge probability 2L / (n (n-1)).
inline double rho_hat(const Graph& g) {
    const auto n = static_cast<double>(g.num_vertices());
    if (g.num_vertices() < 2) throw DomainError("rho_hat requires at least two vertices");
    return 2.0 * static_cast<double>(g.num_edges()) / (n * (n - 1.0));
}

// How vertex tokens in an edge list are interpreted.
//  integer: every token must be a non-negative integer. Ids are reindexed
//           densely in ascending numeric order, unless a "# vertices: N"
//           header is present, in which case ids are used as-is and must be
//           below N (this keeps isolated vertices across a round trip).
//  label:   tokens are opaque strings interned in first-seen order.
//  automatic: integer when every token is an integer, label otherwise.
enum class IdMode { automatic, integer, label };

namespace detail {

inline std::optional<std::uint64_t> parse_id(const std::string& tok) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) return std::nullopt;
    return v;
}

inline std::optional<std::uint64_t> vertices_directive(const std::string& line) {
    static const std::string key = "vertices:";
    auto pos = line.find_first_not_of(" \t#");
    if (pos == std::string::npos || line.compare(pos, key.size(), key) != 0) return std::nullopt;
    std::istringstream rest(line.substr(pos + key.size()));
    std::string tok;
    if (!(rest >> tok)) return std::nullopt;
    return parse_id(tok);
}

}  // namespace detail

inline Graph load_edge_list(std::istream& in, IdMode mode = IdMode::automatic) {
    struct RawEdge {
        std::string a, b;
        std::size_t line;
    };
    std::vector<RawEdge> raw;
    std::optional<std::uint64_t> declared_n;
    std::string line;
    std::size_t lineno = 0;
    bool all_integer = true;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            if (!declared_n && raw.empty()) declared_n = detail::vertices_directive(line);
            continue;
        }
        std::istringstream ss(line);
        RawEdge e{{}, {}, lineno};
        std::string extra;
        if (!(ss >> e.a >> e.b)) throw ParseError("line " + std::to_string(lineno) + ": expected two vertex ids");
        if (ss >> extra && extra[0] != '#') {
            throw ParseError("line " + std::to_string(lineno) + ": unexpected token '" + extra + "'");
        }
        if (e.a == e.b) throw SelfLoopError("line " + std::to_string(lineno) + ": self-loop on vertex '" + e.a + "'");
        for (const auto* tok : {&e.a, &e.b}) {
            if (!detail::parse_id(*tok)) {
                if (mode == IdMode::integer) {
                    throw ParseError("line " + std::to_string(lineno) + ": non-integer vertex id '" + *tok + "'");
                }
                all_integer = false;
            }
        }
        raw.push_back(std::move(e));
    }

    const bool integer = mode == IdMode::integer || (mode == IdMode::automatic && all_integer);
    std::vector<Edge> edges;
    edges.reserve(raw.size());

    if (integer && declared_n) {
        const std::uint64_t n = *declared_n;
        for (const auto& e : raw) {
            auto u = *detail::parse_id(e.a), v = *detail::parse_id(e.b);
            if (u >= n || v >= n) {
                throw ParseError("line " + std::to_string(e.line) + ": vertex id exceeds declared count " + std::to_string(n));
            }
            edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
        }
        return Graph::from_edges(n, edges);
    }

    if (integer) {
        std::vector<std::uint64_t> ids;
        ids.reserve(raw.size() * 2);
        for (const auto& e : raw) {
            ids.push_back(*detail::parse_id(e.a));
            ids.push_back(*detail::parse_id(e.b));
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        auto index = [&](const std::string& t) {
            return static_cast<Vertex>(std::lower_bound(ids.begin(), ids.end(), *detail::parse_id(t)) - ids.begin());
        };
        for (const auto& e : raw) edges.emplace_back(index(e.a), index(e.b));
        std::vector<std::string> labels;
        labels.reserve(ids.size());
        for (auto id : ids) labels.push_back(std::to_string(id));
        return Graph::from_edges(ids.size(), edges, std::move(labels));
    }

    std::unordered_map<std::string, Vertex> interned;
    std::vector<std::string> labels;
    auto intern = [&](const std::string& t) {
        auto [it, fresh] = interned.try_emplace(t, static_cast<Vertex>(labels.size()));
        if (fresh) labels.push_back(t);
        return it->second;
    };
    for (const auto& e : raw) {
        Vertex u = intern(e.a);
        Vertex v = intern(e.b);
        edges.emplace_back(u, v);
    }
    const std::size_t n = labels.size();
    return Graph::from_edges(n, edges, std::move(labels));
}

inline Graph load_edge_list(const std::string& text, IdMode mode = IdMode::automatic) {
    std::istringstream in(text);
    return load_edge_list(in, mode);
}

// One edge per line with endpoints ascending, lines sorted. Writes internal
// ids preceded by a "# vertices: n" header so isolated vertices survive.
inline void write_edge_list(const Graph& g, std::ostream& out) {
    out << "# vertices: " << g.num_vertices() << "\n";
    for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace momgraph
