#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "momgraph/errors.hpp"
#include "momgraph/int128.hpp"

namespace momgraph {

inline constexpr int kMaxPatternVertices = 10;

// Small query graph on vertices 0..p-1. Every vertex is incident to an edge.
// A pattern may carry a distinguished root vertex (the hub of a wheel); a
// rooted copy in a host graph records where the root lands, and
// automorphisms must fix the root.
class PatternGraph {
public:
    PatternGraph() = default;

    PatternGraph(int p, std::vector<std::pair<int, int>> edges, std::optional<int> root = std::nullopt)
        : p_(p), root_(root) {
        if (p < 2) throw DomainError("pattern needs at least two vertices");
        if (p > kMaxPatternVertices) {
            throw CapabilityError("pattern has " + std::to_string(p) + " vertices; at most " +
                                  std::to_string(kMaxPatternVertices) + " are supported");
        }
        if (root && (*root < 0 || *root >= p)) throw DomainError("pattern root out of range");
        adj_.fill(0);
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= p || v >= p) throw DomainError("pattern edge endpoint out of range");
            if (u == v) throw DomainError("pattern edge is a self-loop");
            if (u > v) std::swap(u, v);
            if (adj_[u] & bit(v)) throw DomainError("pattern has a repeated edge");
            adj_[u] |= bit(v);
            adj_[v] |= bit(u);
            edges_.emplace_back(u, v);
        }
        for (int v = 0; v < p; ++v) {
            if (adj_[v] == 0) throw DomainError("pattern vertex " + std::to_string(v) + " has no incident edge");
        }
        std::sort(edges_.begin(), edges_.end());
    }

    int p() const noexcept { return p_; }
    int q() const noexcept { return static_cast<int>(edges_.size()); }
    const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
    std::optional<int> root() const noexcept { return root_; }
    bool adjacent(int u, int v) const noexcept { return (adj_[u] & bit(v)) != 0; }
    std::uint16_t adjacency_mask(int v) const noexcept { return adj_[v]; }
    int degree(int v) const noexcept { return __builtin_popcount(adj_[v]); }

    bool is_acyclic() const {
        // connected components + edge count: a forest has q = p - components
        std::vector<int> parent(p_);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (auto [u, v] : edges_) {
            int a = find(u), b = find(v);
            if (a == b) return false;
            parent[a] = b;
        }
        return true;
    }

    PatternGraph unrooted() const { return PatternGraph(p_, edges_); }

    friend bool operator==(const PatternGraph& a, const PatternGraph& b) {
        return a.p_ == b.p_ && a.edges_ == b.edges_ && a.root_ == b.root_;
    }

private:
    static constexpr std::uint16_t bit(int v) noexcept { return static_cast<std::uint16_t>(1u << v); }

    int p_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::optional<int> root_;
    std::array<std::uint16_t, kMaxPatternVertices> adj_{};
};

// Generalized wheel: t groups of spokes sharing one hub; group j has ls[j]
// vertex-disjoint chains of ks[j] edges. t = 1 is the (k, l)-wheel.
struct WheelSpec {
    std::vector<int> ks;
    std::vector<int> ls;

    WheelSpec() = default;
    WheelSpec(std::vector<int> k, std::vector<int> l) : ks(std::move(k)), ls(std::move(l)) { validate(); }
    WheelSpec(int k, int l) : WheelSpec(std::vector<int>{k}, std::vector<int>{l}) {}

    void validate() const {
        if (ks.empty() || ks.size() != ls.size()) throw DomainError("wheel needs matching, nonempty k and l vectors");
        std::set<int> seen;
        for (std::size_t j = 0; j < ks.size(); ++j) {
            if (ks[j] < 1) throw DomainError("wheel spoke length must be >= 1");
            if (ls[j] < 1) throw DomainError("wheel spoke multiplicity must be >= 1");
            if (!seen.insert(ks[j]).second) throw DomainError("wheel spoke lengths must be distinct");
        }
    }

    int t() const noexcept { return static_cast<int>(ks.size()); }
    int spokes() const noexcept { return std::accumulate(ls.begin(), ls.end(), 0); }
    int q() const noexcept {
        int s = 0;
        for (std::size_t j = 0; j < ks.size(); ++j) s += ks[j] * ls[j];
        return s;
    }
    int p() const noexcept { return q() + 1; }
    int max_k() const noexcept { return *std::max_element(ks.begin(), ks.end()); }

    // Same wheel with groups sorted by spoke length.
    WheelSpec sorted() const {
        std::vector<std::size_t> idx(ks.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return ks[a] < ks[b]; });
        WheelSpec w;
        for (auto i : idx) {
            w.ks.push_back(ks[i]);
            w.ls.push_back(ls[i]);
        }
        return w;
    }

    // Root-fixing automorphisms: spokes of equal length permute freely.
    Count rooted_automorphisms() const {
        Count a = 1;
        for (int l : ls) a = checked_mul(a, factorial(static_cast<unsigned>(l)));
        return a;
    }

    // Number of hub-rooted copies on p labelled vertices: p! / prod l_j!.
    Count isomorphism_classes() const { return factorial(static_cast<unsigned>(p())) / rooted_automorphisms(); }

    friend bool operator==(const WheelSpec& a, const WheelSpec& b) {
        auto x = a.sorted(), y = b.sorted();
        return x.ks == y.ks && x.ls == y.ls;
    }
};

// Hub is vertex 0 and the root; spokes follow in group order, each spoke a
// chain of consecutive vertex ids.
inline PatternGraph wheel_to_pattern(const WheelSpec& spec) {
    spec.validate();
    if (spec.p() > kMaxPatternVertices) {
        throw CapabilityError("wheel has " + std::to_string(spec.p()) + " vertices; explicit patterns support at most " +
                              std::to_string(kMaxPatternVertices));
    }
    std::vector<std::pair<int, int>> edges;
    int next = 1;
    for (std::size_t j = 0; j < spec.ks.size(); ++j) {
        for (int c = 0; c < spec.ls[j]; ++c) {
            int prev = 0;
            for (int s = 0; s < spec.ks[j]; ++s) {
                edges.emplace_back(prev, next);
                prev = next++;
            }
        }
    }
    return PatternGraph(spec.p(), std::move(edges), 0);
}

// Enumerates automorphisms by backtracking over vertex images, pruning on
// degree and on adjacency to the already-mapped prefix. Calls visit(perm)
// for each automorphism.
template <typename Visit>
void for_each_automorphism(const PatternGraph& r, Visit&& visit) {
    const int p = r.p();
    std::array<int, kMaxPatternVertices> image{};
    std::uint16_t used = 0;
    auto rec = [&](auto&& self, int v) -> void {
        if (v == p) {
            visit(std::span<const int>(image.data(), static_cast<std::size_t>(p)));
            return;
        }
        for (int c = 0; c < p; ++c) {
            if (used & (1u << c)) continue;
            if (r.degree(c) != r.degree(v)) continue;
            if (r.root() && ((v == *r.root()) != (c == *r.root()))) continue;
            bool ok = true;
            for (int u = 0; u < v && ok; ++u) ok = r.adjacent(u, v) == r.adjacent(image[u], c);
            if (!ok) continue;
            image[v] = c;
            used |= static_cast<std::uint16_t>(1u << c);
            self(self, v + 1);
            used &= static_cast<std::uint16_t>(~(1u << c));
        }
    };
    rec(rec, 0);
}

inline Count automorphism_count(const PatternGraph& r) {
    Count n = 0;
    for_each_automorphism(r, [&](std::span<const int>) { ++n; });
    return n;
}

// N(R): number of copies of R on p labelled vertices, p! / |Aut(R)|.
inline Count count_isomorphism_classes(const PatternGraph& r) {
    if (r.p() > kMaxPatternVertices) throw CapabilityError("automorphism enumeration supports at most 10 vertices");
    return factorial(static_cast<unsigned>(r.p())) / automorphism_count(r);
}

// --------------------------------------------------------------- naming

using Pattern = std::variant<PatternGraph, WheelSpec>;

inline int pattern_vertices(const Pattern& pat) {
    return std::visit([](const auto& x) { return x.p(); }, pat);
}

inline int pattern_edges(const Pattern& pat) {
    return std::visit([](const auto& x) { return x.q(); }, pat);
}

inline std::string pattern_name(const Pattern& pat) {
    if (const auto* w = std::get_if<WheelSpec>(&pat)) {
        std::ostringstream os;
        if (w->t() == 1) {
            os << "wheel:k=" << w->ks[0] << ",l=" << w->ls[0];
        } else {
            os << "wheel:k=(";
            for (int j = 0; j < w->t(); ++j) os << (j ? "," : "") << w->ks[j];
            os << "),l=(";
            for (int j = 0; j < w->t(); ++j) os << (j ? "," : "") << w->ls[j];
            os << ")";
        }
        return os.str();
    }
    const auto& g = std::get<PatternGraph>(pat);
    std::ostringstream os;
    os << (g.root() ? "rooted-edges:" : "edges:");
    bool first = true;
    for (auto [u, v] : g.edges()) {
        os << (first ? "" : ",") << u << "-" << v;
        first = false;
    }
    if (g.root()) os << "@" << *g.root();
    return os.str();
}

namespace detail {

inline std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::string body = s;
    if (!body.empty() && body.front() == '(') {
        if (body.back() != ')') throw ParseError("unbalanced parentheses in " + what);
        body = body.substr(1, body.size() - 2);
    }
    std::vector<int> out;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size()) throw ParseError("");
            out.push_back(v);
        } catch (...) {
            throw ParseError("invalid integer '" + tok + "' in " + what);
        }
    }
    if (out.empty()) throw ParseError("empty list in " + what);
    return out;
}

}  // namespace detail

// Accepts "wheel:k=2,l=1", "wheel:k=(1,2),l=(1,1)", "edges:0-1,1-2",
// "rooted-edges:0-1,1-2@0", and the shorthands "edge", "2-star", "triangle".
inline Pattern parse_pattern(const std::string& text) {
    if (text == "edge") return PatternGraph(2, {{0, 1}});
    if (text == "2-star") return PatternGraph(3, {{0, 1}, {0, 2}});
    if (text == "triangle") return PatternGraph(3, {{0, 1}, {1, 2}, {0, 2}});
    if (text.rfind("wheel:", 0) == 0) {
        const std::string body = text.substr(6);
        auto kpos = body.find("k=");
        auto lpos = body.find(",l=");
        if (kpos != 0 || lpos == std::string::npos) throw ParseError("wheel pattern must look like wheel:k=..,l=..");
        auto ks = detail::parse_int_list(body.substr(2, lpos - 2), "wheel k");
        auto ls = detail::parse_int_list(body.substr(lpos + 3), "wheel l");
        return WheelSpec(std::move(ks), std::move(ls));
    }
    bool rooted = text.rfind("rooted-edges:", 0) == 0;
    if (rooted || text.rfind("edges:", 0) == 0) {
        std::string body = text.substr(rooted ? 13 : 6);
        std::optional<int> root;
        if (auto at = body.find('@'); at != std::string::npos) {
            root = detail::parse_int_list(body.substr(at + 1), "pattern root").front();
            body = body.substr(0, at);
        }
        std::vector<std::pair<int, int>> edges;
        int p = 0;
        std::stringstream ss(body);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            auto dash = tok.find('-');
            if (dash == std::string::npos) throw ParseError("pattern edge '" + tok + "' must look like u-v");
            int u = detail::parse_int_list(tok.substr(0, dash), "pattern edge").front();
            int v = detail::parse_int_list(tok.substr(dash + 1), "pattern edge").front();
            edges.emplace_back(u, v);
            p = std::max({p, u + 1, v + 1});
        }
        if (rooted && !root) throw ParseError("rooted pattern needs a root, e.g. rooted-edges:0-1@0");
        return PatternGraph(p, std::move(edges), root);
    }
    throw ParseError("unrecognized pattern '" + text + "'");
}

}  // namespace momgraph
