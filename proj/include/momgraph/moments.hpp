#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "momgraph/counting.hpp"
#include "momgraph/degrees.hpp"
#include "momgraph/errors.hpp"
#include "momgraph/graph.hpp"
#include "momgraph/int128.hpp"
#include "momgraph/pattern.hpp"
#include "momgraph/wheel_count.hpp"

namespace momgraph {

enum class CountMode { induced, noninduced, both };

struct MomentEntry {
    Pattern pattern;
    int p = 0;
    int q = 0;
    Count n_r = 0;
    std::optional<Count> raw_induced;
    std::optional<Count> raw_noninduced;
    std::optional<double> p_hat, q_hat, p_check, q_check;
    bool degree_approx = false;
};

struct MomentTable {
    std::size_t n = 0;
    std::uint64_t edges = 0;
    double rho_hat = 0.0;
    std::vector<MomentEntry> entries;

    const MomentEntry& at(const std::string& name) const {
        for (const auto& e : entries) {
            if (pattern_name(e.pattern) == name) return e;
        }
        throw DomainError("pattern '" + name + "' not in moment table");
    }
};

inline Count isomorphism_classes(const Pattern& pat) {
    if (const auto* w = std::get_if<WheelSpec>(&pat)) return w->isomorphism_classes();
    return count_isomorphism_classes(std::get<PatternGraph>(pat));
}

// count / (C(n, p) N(R)) = count |Aut(R)| / (n)_p.
inline double frequency(Count count, std::size_t n, int p, Count n_r) {
    const double denom = to_double(binomial(n, static_cast<std::uint64_t>(p))) * to_double(n_r);
    return denom == 0.0 ? 0.0 : to_double(count) / denom;
}

struct MomentOptions {
    CountMode mode = CountMode::both;
    WheelCountLimits limits{};
    // Wheels are routed through the falling-factorial degree approximation.
    bool degree_approx = false;
};

inline MomentTable moment_table(const Graph& g, const std::vector<Pattern>& patterns, const MomentOptions& opt = {}) {
    MomentTable t;
    t.n = g.num_vertices();
    t.edges = g.num_edges();
    if (t.n < 2 || g.num_edges() == 0) throw NormalizationError("normalized moments need rho_hat > 0 (graph has no edges)");
    t.rho_hat = rho_hat(g);
    std::optional<DegreeProfile> prof;
    for (const auto& pat : patterns) {
        MomentEntry e;
        e.pattern = pat;
        e.p = pattern_vertices(pat);
        e.q = pattern_edges(pat);
        e.n_r = isomorphism_classes(pat);
        const double scale = std::pow(t.rho_hat, -e.q);
        const auto* wheel = std::get_if<WheelSpec>(&pat);
        const bool want_ind = opt.mode != CountMode::noninduced;
        const bool want_non = opt.mode != CountMode::induced;

        if (wheel && opt.degree_approx) {
            if (!prof || prof->m < wheel->max_k()) prof = m_degrees(g, wheel->max_k(), opt.limits.paths_per_hub, opt.limits.threads);
            e.degree_approx = true;
            e.q_check = degree_moment_approx(*prof, *wheel);
            e.q_hat = *e.q_check / scale;
            t.entries.push_back(std::move(e));
            continue;
        }
        if (want_non) {
            e.raw_noninduced = wheel ? count_wheel_noninduced(g, *wheel, opt.limits) : count_noninduced(g, std::get<PatternGraph>(pat), opt.limits.threads);
            e.q_hat = frequency(*e.raw_noninduced, t.n, e.p, e.n_r);
            e.q_check = *e.q_hat * scale;
        }
        if (want_ind) {
            const PatternGraph r = wheel ? wheel_to_pattern(*wheel) : std::get<PatternGraph>(pat);
            e.raw_induced = count_induced(g, r, opt.limits.threads);
            e.p_hat = frequency(*e.raw_induced, t.n, e.p, e.n_r);
            e.p_check = *e.p_hat * scale;
        }
        t.entries.push_back(std::move(e));
    }
    return t;
}

inline nlohmann::json to_json(const MomentTable& t) {
    using nlohmann::json;
    auto opt_num = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    auto opt_count = [](const std::optional<Count>& v) { return v ? json(to_string(*v)) : json(nullptr); };
    json rows = json::array();
    for (const auto& e : t.entries) {
        rows.push_back({{"pattern", pattern_name(e.pattern)},
                        {"p", e.p},
                        {"q", e.q},
                        {"raw_count", {{"induced", opt_count(e.raw_induced)}, {"noninduced", opt_count(e.raw_noninduced)}}},
                        {"N_R", to_string(e.n_r)},
                        {"p_hat", opt_num(e.p_hat)},
                        {"q_hat", opt_num(e.q_hat)},
                        {"p_check", opt_num(e.p_check)},
                        {"q_check", opt_num(e.q_check)},
                        {"source", e.degree_approx ? "degree-approx" : "exact"}});
    }
    return {{"n", t.n}, {"edges", t.edges}, {"rho_hat", t.rho_hat}, {"entries", rows}};
}

}  // namespace momgraph
