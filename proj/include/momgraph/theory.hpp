#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "momgraph/errors.hpp"
#include "momgraph/model.hpp"
#include "momgraph/pattern.hpp"

namespace momgraph {

// Column j-1 holds T_w^j(1) evaluated on each block (block models) or grid
// cell (graphons), j = 1..J. The implicit column j = 0 is all ones.
struct OperatorIterates {
    MatrixXd values;

    int J() const noexcept { return static_cast<int>(values.cols()); }
    // T^j(1) on every block/cell; j = 0 gives the constant function.
    VectorXd iterate(int j) const {
        if (j == 0) return VectorXd::Ones(values.rows());
        return values.col(j - 1);
    }
};

// On block-constant functions the integral operator acts as
// M = S diag(pi): [T_w f]_a = sum_b S_ab pi_b f_b.
inline OperatorIterates iterate_operator_block(const BlockModel& m, int J) {
    if (J < 1) throw DomainError("operator iteration count must be >= 1");
    const MatrixXd M = m.S * m.pi.asDiagonal();
    OperatorIterates it;
    it.values.resize(m.K(), J);
    VectorXd v = VectorXd::Ones(m.K());
    for (int j = 0; j < J; ++j) {
        v = M * v;
        it.values.col(j) = v;
    }
    return it;
}

// Midpoint rule on the uniform grid: [T_w f]_r = (1/G) sum_c w_rc f_c.
inline OperatorIterates iterate_operator_grid(const Graphon& w, int J, std::optional<double> truncate_rho = std::nullopt) {
    if (J < 1) throw DomainError("operator iteration count must be >= 1");
    const auto g = static_cast<Eigen::Index>(w.resolution());
    MatrixXd W(g, g);
    for (Eigen::Index r = 0; r < g; ++r) {
        for (Eigen::Index c = 0; c < g; ++c) {
            double v = w.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            if (truncate_rho) v = std::min(v, 1.0 / *truncate_rho);
            W(r, c) = v;
        }
    }
    W /= static_cast<double>(g);
    OperatorIterates it;
    it.values.resize(g, J);
    VectorXd v = VectorXd::Ones(g);
    for (int j = 0; j < J; ++j) {
        v = W * v;
        it.values.col(j) = v;
    }
    return it;
}

namespace detail {

inline VectorXd wheel_integrand(const OperatorIterates& it, const WheelSpec& key) {
    VectorXd prod = VectorXd::Ones(it.values.rows());
    for (int j = 0; j < key.t(); ++j) {
        prod = prod.cwiseProduct(it.iterate(key.ks[j]).array().pow(key.ls[j]).matrix());
    }
    return prod;
}

}  // namespace detail

// Normalized wheel moment sum_a pi_a prod_j (T^{k_j}(1))_a^{l_j}.
inline double tau_block(const BlockModel& m, const WheelSpec& key) {
    key.validate();
    const auto it = iterate_operator_block(m, key.max_k());
    return m.pi.dot(detail::wheel_integrand(it, key));
}

inline double tau_block(const BlockModel& m, const WheelSpec& key, const OperatorIterates& it) {
    if (it.J() < key.max_k()) throw DomainError("operator iterates do not reach the wheel's spoke length");
    return m.pi.dot(detail::wheel_integrand(it, key));
}

struct GridMoment {
    double value = 0.0;
    // |value - value on the grid coarsened by 2x2 cell averaging|; NaN when
    // the resolution is odd.
    double coarsening_change = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double tau_grid_value(const Graphon& w, const WheelSpec& key, std::optional<double> truncate_rho) {
    const auto it = iterate_operator_grid(w, key.max_k(), truncate_rho);
    return wheel_integrand(it, key).mean();
}

inline Graphon coarsen(const Graphon& w) {
    const std::size_t g = w.resolution() / 2;
    std::vector<double> grid(g * g);
    for (std::size_t r = 0; r < g; ++r) {
        for (std::size_t c = 0; c < g; ++c) {
            grid[r * g + c] = 0.25 * (w.at(2 * r, 2 * c) + w.at(2 * r + 1, 2 * c) + w.at(2 * r, 2 * c + 1) + w.at(2 * r + 1, 2 * c + 1));
        }
    }
    return Graphon::normalized(g, std::move(grid));
}

}  // namespace detail

// Wheel moment of a gridded graphon. With truncate_rho set, w is replaced by
// min(w, 1/rho) before integrating; the default matches the untruncated
// normalized moments.
inline GridMoment tau_graphon(const Graphon& w, const WheelSpec& key, std::optional<double> truncate_rho = std::nullopt) {
    key.validate();
    GridMoment out;
    out.value = detail::tau_grid_value(w, key, truncate_rho);
    if (w.resolution() % 2 == 0 && w.resolution() >= 2) {
        out.coarsening_change = std::abs(out.value - detail::tau_grid_value(detail::coarsen(w), key, truncate_rho));
    }
    return out;
}

// Sum over blocks a, b, c of pi_a pi_b pi_c S_ab S_bc S_ca.
inline double tau_triangle_block(const BlockModel& m) {
    const MatrixXd M = m.S * m.pi.asDiagonal();
    return (M * M * M).trace();
}

// Integral of w(u,v) w(v,x) w(x,u) by the midpoint rule: the integral of
// w2(u,x) w(x,u) where w2 = T_w applied to w.
inline double tau_triangle_graphon(const Graphon& w) {
    const auto g = static_cast<Eigen::Index>(w.resolution());
    MatrixXd W(g, g);
    for (Eigen::Index r = 0; r < g; ++r) {
        for (Eigen::Index c = 0; c < g; ++c) W(r, c) = w.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
    W /= static_cast<double>(g);
    return (W * W * W).trace();
}

// Discretizes a symmetric function on (0,1)^2 by midpoint sampling.
inline Graphon discretize(const std::function<double(double, double)>& f, std::size_t resolution) {
    std::vector<double> grid(resolution * resolution);
    const double h = 1.0 / static_cast<double>(resolution);
    for (std::size_t r = 0; r < resolution; ++r) {
        for (std::size_t c = r; c < resolution; ++c) {
            const double v = f((static_cast<double>(r) + 0.5) * h, (static_cast<double>(c) + 0.5) * h);
            grid[r * resolution + c] = grid[c * resolution + r] = v;
        }
    }
    return Graphon::normalized(resolution, std::move(grid));
}

struct RefinedMoment {
    double value = 0.0;
    std::size_t resolution = 0;
    double last_change = 0.0;
    bool converged = false;
};

// Wheel moment of a smooth graphon: discretize at doubling resolutions until
// successive values differ by less than `tol`.
inline RefinedMoment tau_function(const std::function<double(double, double)>& f, const WheelSpec& key, double tol = 1e-8,
                                  std::size_t start = 16, std::size_t max_resolution = 2048) {
    RefinedMoment out;
    double prev = detail::tau_grid_value(discretize(f, start), key, std::nullopt);
    for (std::size_t g = start * 2; g <= max_resolution; g *= 2) {
        const double cur = detail::tau_grid_value(discretize(f, g), key, std::nullopt);
        out.value = cur;
        out.resolution = g;
        out.last_change = std::abs(cur - prev);
        if (out.last_change < tol) {
            out.converged = true;
            return out;
        }
        prev = cur;
    }
    return out;
}

}  // namespace momgraph
