#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "momgraph/errors.hpp"
#include "momgraph/graph.hpp"
#include "momgraph/int128.hpp"
#include "momgraph/parallel.hpp"
#include "momgraph/pattern.hpp"
#include "momgraph/rng.hpp"
#include "momgraph/stats.hpp"
#include "momgraph/wheel_count.hpp"

namespace momgraph {

// Per-vertex hub counts for a fixed set of wheel keys.
struct HubCountCache {
    std::vector<WheelSpec> keys;
    std::vector<std::vector<Count>> counts;  // counts[key][vertex]
    std::vector<std::uint32_t> degrees;

    static HubCountCache build(const Graph& g, std::vector<WheelSpec> keys, const WheelCountLimits& limits = {}) {
        HubCountCache c;
        c.degrees = g.degrees();
        for (const auto& k : keys) c.counts.push_back(wheel_counts_per_hub(g, k, limits));
        c.keys = std::move(keys);
        return c;
    }

    std::size_t index_of(const WheelSpec& key) const {
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (keys[i] == key) return i;
        }
        throw DomainError("key " + pattern_name(key) + " is not in the hub-count cache");
    }

    Count total(const WheelSpec& key) const {
        Count s = 0;
        for (Count x : counts[index_of(key)]) s = checked_add(s, x);
        return s;
    }
};

enum class BootstrapNorm {
    rho,      // rho* = Dbar* / (n - 1); reproduces the full estimate at m = n
    literal,  // (Dbar* / m)
};

struct BootstrapResult {
    WheelSpec key;
    std::size_t m = 0;
    std::size_t B = 0;
    std::uint64_t seed = 0;
    BootstrapNorm norm = BootstrapNorm::rho;
    double full_estimate = 0.0;
    double sigma2_hat = 0.0;
    std::vector<double> replicates;
};

inline std::size_t default_subsample_size(std::size_t n) {
    return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 0.7)));
}

namespace detail {

// m distinct indices from [0, n) by a partial Fisher-Yates shuffle that only
// stores displaced entries.
inline void subsample(std::size_t n, std::size_t m, SplitMix64& rng, std::vector<std::size_t>& out) {
    std::unordered_map<std::size_t, std::size_t> moved;
    moved.reserve(2 * m);
    out.clear();
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        auto at = [&](std::size_t k) {
            auto it = moved.find(k);
            return it == moved.end() ? k : it->second;
        };
        const std::size_t vj = at(j), vi = at(i);
        moved[j] = vi;
        out.push_back(vj);
    }
}

inline double check_estimate(long double hub_sum, long double degree_sum, std::size_t n, std::size_t m, const WheelSpec& key,
                             BootstrapNorm norm) {
    const long double denom = static_cast<long double>(to_double(binomial(n, static_cast<std::uint64_t>(key.p())))) *
                              static_cast<long double>(to_double(key.isomorphism_classes()));
    const long double p_hat = static_cast<long double>(n) / static_cast<long double>(m) * hub_sum / denom;
    const long double dbar = degree_sum / static_cast<long double>(m);
    const long double scale = norm == BootstrapNorm::rho ? dbar / static_cast<long double>(n - 1) : dbar / static_cast<long double>(m);
    if (scale <= 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(p_hat / std::pow(scale, static_cast<long double>(key.q())));
}

}  // namespace detail

// Vertex-subsampling bootstrap: each replicate draws m distinct vertices,
// rescales their hub counts and degrees to a moment estimate, and the spread
// of the replicates, scaled by m/n, estimates the estimator's variance.
inline BootstrapResult bootstrap_variance(const Graph& g, const HubCountCache& cache, const WheelSpec& key, std::size_t m, std::size_t B,
                                          std::uint64_t seed, BootstrapNorm norm = BootstrapNorm::rho, unsigned threads = 1) {
    const std::size_t n = g.num_vertices();
    if (m < 1 || m > n) throw DomainError("subsample size m must satisfy 1 <= m <= n (got m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
    if (B < 2) throw DomainError("bootstrap needs B >= 2 replicates");
    if (n < 2) throw DomainError("bootstrap needs n >= 2");
    const auto& counts = cache.counts[cache.index_of(key)];
    if (counts.size() != n || cache.degrees.size() != n) throw AlignmentError("hub-count cache does not match the graph");

    BootstrapResult res;
    res.key = key;
    res.m = m;
    res.B = B;
    res.seed = seed;
    res.norm = norm;
    {
        long double hs = 0, ds = 0;
        for (std::size_t i = 0; i < n; ++i) {
            hs += static_cast<long double>(to_double(counts[i]));
            ds += cache.degrees[i];
        }
        res.full_estimate = detail::check_estimate(hs, ds, n, n, key, BootstrapNorm::rho);
    }
    res.replicates.assign(B, 0.0);
    parallel_chunks(B, std::min<std::size_t>(B, 64), threads, [&](std::size_t b0, std::size_t b1, std::size_t) {
        std::vector<std::size_t> pick;
        for (std::size_t b = b0; b < b1; ++b) {
            SplitMix64 rng(SplitMix64::derive(seed, {b}));
            detail::subsample(n, m, rng, pick);
            long double hs = 0, ds = 0;
            for (std::size_t i : pick) {
                hs += static_cast<long double>(to_double(counts[i]));
                ds += cache.degrees[i];
            }
            res.replicates[b] = detail::check_estimate(hs, ds, n, m, key, norm);
        }
    });
    const double mu = stats::mean(res.replicates);
    double ss = 0.0;
    for (double v : res.replicates) ss += (v - mu) * (v - mu);
    res.sigma2_hat = static_cast<double>(m) / static_cast<double>(n) * ss / static_cast<double>(B);
    return res;
}

inline nlohmann::json to_json(const BootstrapResult& r) {
    return {{"key", pattern_name(r.key)},
            {"m", r.m},
            {"B", r.B},
            {"seed", r.seed},
            {"normalization", r.norm == BootstrapNorm::rho ? "rho" : "literal"},
            {"full_estimate", r.full_estimate},
            {"sigma2_hat", r.sigma2_hat},
            {"replicates_summary",
             {{"mean", stats::mean(r.replicates)},
              {"sd", std::sqrt(stats::variance(r.replicates))},
              {"quantiles",
               {{"0.05", stats::quantile(r.replicates, 0.05)},
                {"0.25", stats::quantile(r.replicates, 0.25)},
                {"0.5", stats::quantile(r.replicates, 0.5)},
                {"0.75", stats::quantile(r.replicates, 0.75)},
                {"0.95", stats::quantile(r.replicates, 0.95)}}}}}};
}

}  // namespace momgraph
