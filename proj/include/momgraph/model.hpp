#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "momgraph/errors.hpp"

namespace momgraph {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Piecewise-constant graphon with K blocks: a vertex falls in block a with
// probability pi[a]; two vertices in blocks a, b are joined with probability
// rho * S(a, b). S is normalized so that sum_ab pi_a pi_b S_ab = 1.
struct BlockModel {
    VectorXd pi;
    MatrixXd S;
    double rho = 1.0;

    int K() const noexcept { return static_cast<int>(pi.size()); }

    // Edge probabilities F = rho * S.
    MatrixXd F() const { return rho * S; }

    // Expected-degree weights H_a = sum_b S_ab pi_a pi_b, used for the
    // canonical block order.
    VectorXd H() const { return pi.cwiseProduct(S * pi); }

    void validate() const {
        const int k = K();
        if (k < 1) throw InvalidModelError("model field 'pi': needs at least one block");
        if (S.rows() != k || S.cols() != k) throw InvalidModelError("model field 'S': must be K x K with K = len(pi)");
        for (int a = 0; a < k; ++a) {
            if (!(pi[a] > 0.0)) throw InvalidModelError("model field 'pi': entries must be positive");
        }
        if (std::abs(pi.sum() - 1.0) > 1e-9) throw InvalidModelError("model field 'pi': must sum to 1");
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                if (!(S(a, b) >= 0.0) || !std::isfinite(S(a, b))) {
                    throw InvalidModelError("model field 'S': entries must be finite and nonnegative");
                }
                if (std::abs(S(a, b) - S(b, a)) > 1e-12 * std::max(1.0, std::abs(S(a, b)))) {
                    throw InvalidModelError("model field 'S': must be symmetric");
                }
            }
        }
        const double mass = pi.dot(S * pi);
        if (std::abs(mass - 1.0) > 1e-9) {
            throw InvalidModelError("model field 'S': sum_ab pi_a pi_b S_ab must equal 1 (got " + std::to_string(mass) + ")");
        }
        if (!(rho >= 0.0) || rho > 1.0) throw InvalidModelError("model field 'rho': must lie in [0, 1]");
        if (rho * S.maxCoeff() > 1.0 + 1e-12) throw InvalidModelError("model field 'rho': rho * max(S) exceeds 1");
    }
};

// Rescales S so that sum pi_a pi_b S_ab = 1; returns the factor divided out.
inline double normalize_intensities(const VectorXd& pi, MatrixXd& S) {
    const double mass = pi.dot(S * pi);
    if (!(mass > 0.0)) throw InvalidModelError("model field 'S': all-zero intensities cannot be normalized");
    S /= mass;
    return mass;
}

// Permutation (new index -> old index) that sorts blocks by H ascending.
// Ties in H fall back to pi, the diagonal of S and then the sorted row of S,
// so relabelled copies of one model map to the same order.
inline std::vector<int> canonical_block_order(const BlockModel& m) {
    const int k = m.K();
    const VectorXd h = m.H();
    std::vector<std::vector<double>> keys(k);
    for (int a = 0; a < k; ++a) {
        std::vector<double> row;
        for (int b = 0; b < k; ++b) row.push_back(m.S(a, b));
        std::sort(row.begin(), row.end());
        keys[a] = {h[a], m.pi[a], m.S(a, a)};
        keys[a].insert(keys[a].end(), row.begin(), row.end());
    }
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return keys[x] < keys[y]; });
    return order;
}

inline BlockModel permute_blocks(const BlockModel& m, const std::vector<int>& order) {
    BlockModel out;
    const int k = m.K();
    out.rho = m.rho;
    out.pi.resize(k);
    out.S.resize(k, k);
    for (int a = 0; a < k; ++a) {
        out.pi[a] = m.pi[order[a]];
        for (int b = 0; b < k; ++b) out.S(a, b) = m.S(order[a], order[b]);
    }
    return out;
}

inline BlockModel canonicalize(const BlockModel& m) { return permute_blocks(m, canonical_block_order(m)); }

// Symmetric G x G grid of w values on a uniform partition of (0,1)^2,
// normalized to grid mean 1.
class Graphon {
public:
    Graphon() = default;

    Graphon(std::size_t resolution, std::vector<double> grid) : g_(resolution), grid_(std::move(grid)) {
        if (g_ == 0) throw InvalidModelError("graphon field 'resolution': must be positive");
        if (grid_.size() != g_ * g_) throw InvalidModelError("graphon field 'grid': expected resolution^2 entries");
        double sum = 0.0;
        for (std::size_t r = 0; r < g_; ++r) {
            for (std::size_t c = 0; c < g_; ++c) {
                const double v = at(r, c);
                if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidModelError("graphon field 'grid': entries must be finite and nonnegative");
                if (std::abs(v - at(c, r)) > 1e-12 * std::max(1.0, std::abs(v))) {
                    throw InvalidModelError("graphon field 'grid': must be symmetric");
                }
                sum += v;
            }
        }
        const double mean = sum / static_cast<double>(g_ * g_);
        if (std::abs(mean - 1.0) > 1e-9) {
            throw InvalidModelError("graphon field 'grid': mean must equal 1 (got " + std::to_string(mean) + ")");
        }
    }

    // Builds a graphon from unnormalized values, dividing by the grid mean.
    static Graphon normalized(std::size_t resolution, std::vector<double> grid) {
        double sum = 0.0;
        for (double v : grid) sum += v;
        const double mean = sum / static_cast<double>(grid.size());
        if (!(mean > 0.0)) throw InvalidModelError("graphon field 'grid': all-zero grid cannot be normalized");
        for (double& v : grid) v /= mean;
        return Graphon(resolution, std::move(grid));
    }

    std::size_t resolution() const noexcept { return g_; }
    double at(std::size_t r, std::size_t c) const noexcept { return grid_[r * g_ + c]; }
    const std::vector<double>& grid() const noexcept { return grid_; }

    std::size_t cell_of(double xi) const noexcept {
        const auto c = static_cast<std::size_t>(xi * static_cast<double>(g_));
        return std::min(c, g_ - 1);
    }

    double operator()(double u, double v) const noexcept { return at(cell_of(u), cell_of(v)); }

    // Degree profile tau_w on each cell: mean of row r.
    std::vector<double> row_means() const {
        std::vector<double> out(g_, 0.0);
        for (std::size_t r = 0; r < g_; ++r) {
            for (std::size_t c = 0; c < g_; ++c) out[r] += at(r, c);
            out[r] /= static_cast<double>(g_);
        }
        return out;
    }

    // Whether the cell marginals are nondecreasing (the canonical form).
    bool is_canonical(double tol = 1e-12) const {
        auto m = row_means();
        for (std::size_t r = 1; r < m.size(); ++r) {
            if (m[r] + tol < m[r - 1]) return false;
        }
        return true;
    }

    friend bool operator==(const Graphon& a, const Graphon& b) { return a.g_ == b.g_ && a.grid_ == b.grid_; }

private:
    std::size_t g_ = 0;
    std::vector<double> grid_;
};

// Canonical block boundaries: cumulative pi in canonical block order.
inline std::vector<double> block_boundaries(const BlockModel& canonical) {
    std::vector<double> cut(canonical.K() + 1, 0.0);
    for (int a = 0; a < canonical.K(); ++a) cut[a + 1] = cut[a] + canonical.pi[a];
    cut.back() = 1.0;
    return cut;
}

// Block (in canonical order) whose interval contains xi.
inline int block_of(const std::vector<double>& cut, double xi) {
    auto it = std::upper_bound(cut.begin() + 1, cut.end() - 1, xi);
    return static_cast<int>(it - (cut.begin() + 1));
}

// Grid rendering of the canonical block model. Each cell holds the exact
// average of w over the cell, so the grid mean is 1 for any resolution and
// cells aligned with block boundaries carry the block values exactly.
inline Graphon blockmodel_to_graphon(const BlockModel& m, std::size_t resolution) {
    m.validate();
    if (resolution < static_cast<std::size_t>(m.K())) throw DomainError("graphon resolution must be at least K");
    const BlockModel c = canonicalize(m);
    const auto cut = block_boundaries(c);
    const int k = c.K();
    const double g = static_cast<double>(resolution);
    // overlap[r][a] = |[r/G, (r+1)/G) ∩ block a| * G
    std::vector<std::vector<double>> overlap(resolution, std::vector<double>(k, 0.0));
    for (std::size_t r = 0; r < resolution; ++r) {
        const double lo = static_cast<double>(r) / g, hi = static_cast<double>(r + 1) / g;
        for (int a = 0; a < k; ++a) {
            const double len = std::min(hi, cut[a + 1]) - std::max(lo, cut[a]);
            if (len > 0.0) overlap[r][a] = len * g;
        }
    }
    std::vector<double> grid(resolution * resolution, 0.0);
    for (std::size_t r = 0; r < resolution; ++r) {
        for (std::size_t s = r; s < resolution; ++s) {
            double v = 0.0;
            for (int a = 0; a < k; ++a) {
                if (overlap[r][a] == 0.0) continue;
                for (int b = 0; b < k; ++b) v += overlap[r][a] * overlap[s][b] * c.S(a, b);
            }
            grid[r * resolution + s] = grid[s * resolution + r] = v;
        }
    }
    // Absorb rounding in the overlaps so the mean is 1 to machine precision.
    return Graphon::normalized(resolution, std::move(grid));
}

// ---------------------------------------------------------------- JSON

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* field, const char* kind) {
    if (!j.is_object()) throw InvalidModelError(std::string(kind) + " document must be a JSON object");
    auto it = j.find(field);
    if (it == j.end()) throw InvalidModelError(std::string(kind) + " field '" + field + "': missing");
    return *it;
}

inline double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw InvalidModelError("model field '" + field + "': expected a number");
    return v.get<double>();
}

inline std::vector<std::vector<double>> as_matrix(const json& v, const std::string& field) {
    if (!v.is_array()) throw InvalidModelError("model field '" + field + "': expected an array of rows");
    std::vector<std::vector<double>> out;
    for (const auto& row : v) {
        if (!row.is_array()) throw InvalidModelError("model field '" + field + "': expected an array of rows");
        out.emplace_back();
        for (const auto& x : row) out.back().push_back(as_number(x, field));
    }
    return out;
}

}  // namespace detail

inline BlockModel block_model_from_json(const json& j) {
    BlockModel m;
    const auto& pi = detail::require(j, "pi", "model");
    const auto& S = detail::require(j, "S", "model");
    if (!pi.is_array()) throw InvalidModelError("model field 'pi': expected an array");
    m.pi.resize(static_cast<Eigen::Index>(pi.size()));
    for (std::size_t a = 0; a < pi.size(); ++a) m.pi[static_cast<Eigen::Index>(a)] = detail::as_number(pi[a], "pi");
    auto rows = detail::as_matrix(S, "S");
    const auto k = static_cast<Eigen::Index>(rows.size());
    m.S.resize(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        if (static_cast<Eigen::Index>(rows[a].size()) != k) throw InvalidModelError("model field 'S': must be square");
        for (Eigen::Index b = 0; b < k; ++b) m.S(a, b) = rows[a][b];
    }
    m.rho = detail::as_number(detail::require(j, "rho", "model"), "rho");
    if (j.contains("K")) {
        const auto& kk = j["K"];
        if (!kk.is_number_integer() || kk.get<long>() != static_cast<long>(k)) {
            throw InvalidModelError("model field 'K': must equal the number of blocks in 'pi'");
        }
    }
    m.validate();
    return m;
}

inline json to_json(const BlockModel& m) {
    json S = json::array();
    for (int a = 0; a < m.K(); ++a) {
        json row = json::array();
        for (int b = 0; b < m.K(); ++b) row.push_back(m.S(a, b));
        S.push_back(row);
    }
    return json{{"K", m.K()}, {"pi", std::vector<double>(m.pi.data(), m.pi.data() + m.pi.size())}, {"S", S}, {"rho", m.rho}};
}

inline Graphon graphon_from_json(const json& j) {
    const auto& res = detail::require(j, "resolution", "graphon");
    if (!res.is_number_integer() || res.get<long>() <= 0) throw InvalidModelError("graphon field 'resolution': expected a positive integer");
    const auto g = res.get<std::size_t>();
    auto rows = detail::as_matrix(detail::require(j, "grid", "graphon"), "grid");
    if (rows.size() != g) throw InvalidModelError("graphon field 'grid': expected 'resolution' rows");
    std::vector<double> flat;
    flat.reserve(g * g);
    for (const auto& row : rows) {
        if (row.size() != g) throw InvalidModelError("graphon field 'grid': expected 'resolution' columns");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return Graphon(g, std::move(flat));
}

inline json to_json(const Graphon& w) {
    json grid = json::array();
    for (std::size_t r = 0; r < w.resolution(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < w.resolution(); ++c) row.push_back(w.at(r, c));
        grid.push_back(row);
    }
    return json{{"resolution", w.resolution()}, {"grid", grid}};
}

}  // namespace momgraph
