#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "momgraph/errors.hpp"
#include "momgraph/graph.hpp"
#include "momgraph/int128.hpp"
#include "momgraph/model.hpp"
#include "momgraph/parallel.hpp"
#include "momgraph/paths.hpp"
#include "momgraph/pattern.hpp"
#include "momgraph/theory.hpp"

namespace momgraph {

// counts(i, j) = D_i^(j), the number of loopless paths of length j from i.
struct DegreeProfile {
    std::size_t n = 0;
    int m = 0;
    double mean_degree = 0.0;
    std::vector<std::uint64_t> counts;  // row-major n x m

    std::uint64_t count(std::size_t i, int j) const { return counts[i * static_cast<std::size_t>(m) + static_cast<std::size_t>(j - 1)]; }
    double normalized(std::size_t i, int j) const {
        return static_cast<double>(count(i, j)) / std::pow(mean_degree, j);
    }
};

namespace detail {

// Visits every path of length < m from `start` once; the length-m step is
// counted from the endpoint's degree.
inline void m_degrees_from(const Graph& g, Vertex start, int m, std::uint64_t budget, std::uint64_t* row) {
    row[0] = g.degree(start);
    if (m == 1) return;
    if (m == 2) {
        std::uint64_t s = 0;
        for (Vertex a : g.neighbors(start)) s += g.degree(a) - 1;
        row[1] = s;
        return;
    }
    std::vector<Vertex> path(static_cast<std::size_t>(m));
    path[0] = start;
    std::uint64_t visited = 0;
    auto rec = [&](auto&& self, int depth) -> void {
        const Vertex u = path[static_cast<std::size_t>(depth)];
        if (depth >= 2) ++row[depth - 1];
        if (depth == m - 1) {
            if (++visited > budget) {
                throw BudgetError("m-degree budget of " + std::to_string(budget) + " paths exceeded at vertex " + std::to_string(start));
            }
            std::uint64_t blocked = 0;
            for (int s = 0; s < depth; ++s) {
                if (g.has_edge(u, path[static_cast<std::size_t>(s)])) ++blocked;
            }
            row[m - 1] += g.degree(u) - blocked;
            return;
        }
        for (Vertex v : g.neighbors(u)) {
            if (on_path(path.data(), depth + 1, v)) continue;
            path[static_cast<std::size_t>(depth) + 1] = v;
            self(self, depth + 1);
        }
    };
    rec(rec, 0);
}

}  // namespace detail

inline DegreeProfile m_degrees(const Graph& g, int m, std::uint64_t budget = kDefaultPathBudget, unsigned threads = 1) {
    if (m < 1) throw DomainError("m must be >= 1");
    DegreeProfile prof;
    prof.n = g.num_vertices();
    prof.m = m;
    prof.mean_degree = prof.n == 0 ? 0.0 : average_degree(g);
    prof.counts.assign(prof.n * static_cast<std::size_t>(m), 0);
    const std::size_t chunks = std::min<std::size_t>(std::max<std::size_t>(prof.n, 1), 64);
    parallel_chunks(prof.n, chunks, threads, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) {
            detail::m_degrees_from(g, static_cast<Vertex>(i), m, budget, prof.counts.data() + i * static_cast<std::size_t>(m));
        }
    });
    return prof;
}

// theta_m evaluated per unit: row i is (T^1(1), ..., T^m(1)) at unit i's
// block or grid cell.
struct ThetaProfile {
    int m = 0;
    std::vector<double> values;  // row-major rows x m

    std::size_t rows() const noexcept { return m == 0 ? 0 : values.size() / static_cast<std::size_t>(m); }
    double at(std::size_t i, int j) const { return values[i * static_cast<std::size_t>(m) + static_cast<std::size_t>(j - 1)]; }
};

// Latents index the canonical (H-ascending) block intervals, as in sampling.
inline ThetaProfile theta_profile(const BlockModel& model, std::span<const double> xi, int m) {
    const BlockModel canon = canonicalize(model);
    const auto it = iterate_operator_block(canon, m);
    const auto cut = block_boundaries(canon);
    ThetaProfile out;
    out.m = m;
    out.values.reserve(xi.size() * static_cast<std::size_t>(m));
    for (double x : xi) {
        const int a = block_of(cut, x);
        for (int j = 0; j < m; ++j) out.values.push_back(it.values(a, j));
    }
    return out;
}

inline ThetaProfile theta_profile(const Graphon& w, std::span<const double> xi, int m) {
    const auto it = iterate_operator_grid(w, m);
    ThetaProfile out;
    out.m = m;
    out.values.reserve(xi.size() * static_cast<std::size_t>(m));
    for (double x : xi) {
        const auto c = static_cast<Eigen::Index>(w.cell_of(x));
        for (int j = 0; j < m; ++j) out.values.push_back(it.values(c, j));
    }
    return out;
}

// Mean squared distance between each vertex's normalized degree vector and
// theta at its latent position.
inline double joint_coupling_error(const DegreeProfile& prof, const ThetaProfile& theta) {
    if (theta.rows() != prof.n) {
        throw AlignmentError("degree profile has " + std::to_string(prof.n) + " vertices but theta has " + std::to_string(theta.rows()) + " rows");
    }
    if (theta.m != prof.m) throw AlignmentError("degree profile and theta have different path lengths");
    if (prof.n == 0) throw DomainError("empty degree profile");
    double total = 0.0;
    for (std::size_t i = 0; i < prof.n; ++i) {
        for (int j = 1; j <= prof.m; ++j) {
            const double d = prof.normalized(i, j) - theta.at(i, j);
            total += d * d;
        }
    }
    return total / static_cast<double>(prof.n);
}

// Mallows-2 distance between two empirical distributions on the line: the
// quantile coupling, integrated exactly over the merged CDF breakpoints.
inline double mallows2_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("Mallows distance needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double total = 0.0;
    if (a.size() == b.size()) {
        for (std::size_t i = 0; i < a.size(); ++i) total += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(total / na);
    }
    std::size_t i = 0, j = 0;
    double u = 0.0;
    while (i < a.size() && j < b.size()) {
        const double ua = static_cast<double>(i + 1) / na, ub = static_cast<double>(j + 1) / nb;
        const double next = std::min(ua, ub);
        total += (next - u) * (a[i] - b[j]) * (a[i] - b[j]);
        u = next;
        if (ua <= next) ++i;
        if (ub <= next) ++j;
    }
    return std::sqrt(total);
}

// Sum over vertices of prod_j (D_i^(k_j))_{l_j}: the count of ordered spoke
// tuples that ignores intersections between different spokes.
inline Count degree_moment_numerator(const DegreeProfile& prof, const WheelSpec& key) {
    key.validate();
    if (key.max_k() > prof.m) throw DomainError("degree profile lacks column " + std::to_string(key.max_k()));
    Count total = 0;
    for (std::size_t i = 0; i < prof.n; ++i) {
        Count term = 1;
        for (int j = 0; j < key.t(); ++j) {
            term = checked_mul(term, falling_factorial(prof.count(i, key.ks[j]), static_cast<unsigned>(key.ls[j])));
        }
        total = checked_add(total, term);
    }
    return total;
}

// (1/n) sum_i prod_j (D_i^(k_j))_{l_j} / Dbar^{q}.
inline double degree_moment_approx(const DegreeProfile& prof, const WheelSpec& key) {
    key.validate();
    if (key.max_k() > prof.m) throw DomainError("degree profile lacks column " + std::to_string(key.max_k()));
    if (prof.n == 0 || prof.mean_degree <= 0.0) throw NormalizationError("degree approximation needs a nonempty graph");
    long double total = 0.0L;
    for (std::size_t i = 0; i < prof.n; ++i) {
        long double term = 1.0L;
        for (int j = 0; j < key.t(); ++j) {
            const long double x = static_cast<long double>(prof.count(i, key.ks[j]));
            for (int r = 0; r < key.ls[j]; ++r) term *= (x - r);
        }
        total += term;
    }
    return static_cast<double>(total / static_cast<long double>(prof.n) / std::pow(static_cast<long double>(prof.mean_degree), key.q()));
}

}  // namespace momgraph
