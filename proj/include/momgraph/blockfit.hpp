#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "momgraph/bootstrap.hpp"
#include "momgraph/counting.hpp"
#include "momgraph/degrees.hpp"
#include "momgraph/errors.hpp"
#include "momgraph/graph.hpp"
#include "momgraph/model.hpp"
#include "momgraph/moments.hpp"
#include "momgraph/rng.hpp"
#include "momgraph/theory.hpp"
#include "momgraph/wheel_count.hpp"

namespace momgraph {

// Keys (k, l) with k = 1..K and l = 1..2K-1: the stage-k power sums of the
// K-atom law of T^k(1)(xi) for every stage.
inline std::vector<WheelSpec> default_fit_keys(int K) {
    std::vector<WheelSpec> keys;
    for (int k = 1; k <= K; ++k) {
        for (int l = 1; l <= 2 * K - 1; ++l) keys.emplace_back(k, l);
    }
    return keys;
}

enum class Estimator { pcheck, qcheck };

struct FitConfig {
    int K = 2;
    std::vector<WheelSpec> keys;  // empty: default_fit_keys(K)
    double stage_tolerance = 1e-2;
    double hankel_limit = 1e12;
    double vandermonde_limit = 1e10;
    int max_iterations = 200;
    double tolerance = 1e-12;
    int multistarts = 8;
    std::uint64_t seed = 1;
    std::vector<double> weights;  // per key; empty means unit weights
    // Graphs whose degree heterogeneity var(T(1)) is within this many standard
    // errors of zero are rejected as unidentifiable for K >= 2.
    double heterogeneity_z = 2.0;
    Estimator estimator = Estimator::qcheck;
    WheelCountLimits limits{};
    bool allow_degree_approx = true;

    std::vector<WheelSpec> fit_keys() const { return keys.empty() ? default_fit_keys(K) : keys; }
};

// ---------------------------------------------------------------- atoms

struct AtomResult {
    VectorXd atoms;    // ascending
    VectorXd weights;
    double hankel_condition = 1.0;
    bool clipped = false;
};

inline double condition_number(const MatrixXd& a) {
    Eigen::JacobiSVD<MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    const double lo = s(s.size() - 1);
    return lo == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / lo;
}

// Recovers the K-atom law with power sums m_1..m_{2K-1} (m_0 = 1): the
// Hankel system gives the monic polynomial whose roots are the atoms, and the
// Vandermonde system gives their weights.
inline AtomResult atoms_from_moments(std::span<const double> m, int K, double hankel_limit = 1e12) {
    if (K < 1) throw DomainError("K must be >= 1");
    if (m.size() < static_cast<std::size_t>(2 * K - 1)) throw DomainError("need 2K-1 moments");
    AtomResult r;
    if (K == 1) {
        r.atoms = VectorXd::Constant(1, m[0]);
        r.weights = VectorXd::Ones(1);
        return r;
    }
    auto mom = [&](int j) { return j == 0 ? 1.0 : m[static_cast<std::size_t>(j - 1)]; };
    MatrixXd H(K, K);
    VectorXd rhs(K);
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) H(i, j) = mom(i + j);
        rhs(i) = -mom(K + i);
    }
    Eigen::JacobiSVD<MatrixXd> svd(H);
    const auto& sv = svd.singularValues();
    if (sv(K - 1) <= 1e3 * std::numeric_limits<double>::epsilon() * sv(0)) {
        throw AtomSeparationError("Hankel matrix is numerically singular: the moments come from fewer than " + std::to_string(K) +
                                  " distinct atoms");
    }
    r.hankel_condition = sv(0) / sv(K - 1);
    if (r.hankel_condition > hankel_limit) {
        throw IllPosedError("Hankel condition number " + std::to_string(r.hankel_condition) + " exceeds " + std::to_string(hankel_limit) +
                            " (near-coincident atoms)");
    }
    const VectorXd c = H.colPivHouseholderQr().solve(rhs);
    // companion matrix of x^K + c_{K-1} x^{K-1} + ... + c_0
    MatrixXd C = MatrixXd::Zero(K, K);
    for (int i = 1; i < K; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < K; ++i) C(i, K - 1) = -c(i);
    Eigen::EigenSolver<MatrixXd> es(C, false);
    std::vector<double> roots;
    for (int i = 0; i < K; ++i) {
        const auto z = es.eigenvalues()(i);
        if (std::abs(z.imag()) > 1e-7 * std::max(1.0, std::abs(z.real()))) {
            throw AtomSeparationError("moment polynomial has complex roots; the moments are not those of a " + std::to_string(K) + "-atom law");
        }
        roots.push_back(z.real());
    }
    std::sort(roots.begin(), roots.end());
    for (int i = 1; i < K; ++i) {
        if (roots[i] - roots[i - 1] <= 1e-9 * std::max(1.0, std::abs(roots[i]))) throw AtomSeparationError("repeated atoms");
    }
    r.atoms = Eigen::Map<VectorXd>(roots.data(), K);
    MatrixXd V(K, K);
    VectorXd b(K);
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) V(i, j) = std::pow(r.atoms(j), i);
        b(i) = mom(i);
    }
    r.weights = V.colPivHouseholderQr().solve(b);
    constexpr double eps = 1e-6;
    if ((r.weights.array() < eps).any() || (r.weights.array() > 1.0).any()) {
        r.weights = r.weights.cwiseMax(eps).cwiseMin(1.0);
        r.weights /= r.weights.sum();
        r.clipped = true;
    }
    return r;
}

// ---------------------------------------------------------------- S

struct RecoverResult {
    MatrixXd S;
    double asymmetry = 0.0;
    double v1_condition = 1.0;
};

// iterates: column j-1 is v^(j) per block, j = 1..K. With V1 = [1, v^(1),
// ..., v^(K-1)] and V2 = [v^(1), ..., v^(K)], M V1 = V2 for M = S diag(pi).
inline RecoverResult recover_S(const VectorXd& pi, const MatrixXd& iterates, double limit = 1e10) {
    const int K = static_cast<int>(pi.size());
    RecoverResult r;
    if (K == 1) {
        r.S = MatrixXd::Ones(1, 1);
        return r;
    }
    if (iterates.rows() != K || iterates.cols() < K) throw DomainError("recover_S needs K x K iterates");
    MatrixXd V1(K, K);
    V1.col(0).setOnes();
    for (int j = 1; j < K; ++j) V1.col(j) = iterates.col(j - 1);
    const MatrixXd V2 = iterates.leftCols(K);
    r.v1_condition = condition_number(V1);
    if (!(r.v1_condition <= limit)) {
        throw IdentifiabilityError("iterate matrix [1, v1, ..., v" + std::to_string(K - 1) + "] has condition number " +
                                   std::to_string(r.v1_condition) +
                                   "; the degree profile T(1) does not separate the blocks (e.g. S has constant row sums)");
    }
    const MatrixXd M = V1.transpose().fullPivLu().solve(V2.transpose()).transpose();
    MatrixXd S = M * pi.cwiseInverse().asDiagonal();
    r.asymmetry = (S - S.transpose()).cwiseAbs().maxCoeff();
    r.S = 0.5 * (S + S.transpose());
    return r;
}

// ---------------------------------------------------------------- alignment

struct AlignResult {
    MatrixXd iterates;  // rows: blocks in stage-1 atom order; column k-1: stage k
    bool ambiguous = false;
    bool weight_mismatch = false;
    double max_mismatch = 0.0;
    std::vector<MatrixXd> alternatives;
};

namespace detail {

inline std::vector<int> ranks(const VectorXd& v) {
    std::vector<int> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v(a) < v(b); });
    std::vector<int> r(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[static_cast<std::size_t>(idx[i])] = static_cast<int>(i);
    return r;
}

}  // namespace detail

// Assigns each stage's atoms to the stage-1 blocks. A permutation is feasible
// when every matched weight is within `tol` of the stage-1 weight; among the
// feasible ones whose mismatch is within `tol` of the best, the one whose
// ordering agrees most with the previous stage wins. With `strict` unset, a
// stage with no feasible permutation falls back to that monotone coupling.
inline AlignResult align_stages(const std::vector<AtomResult>& stages, double tol = 1e-2, bool strict = true) {
    if (stages.empty()) throw DomainError("no stages to align");
    const int K = static_cast<int>(stages[0].atoms.size());
    const VectorXd& pi = stages[0].weights;
    AlignResult out;
    out.iterates.resize(K, static_cast<Eigen::Index>(stages.size()));
    out.iterates.col(0) = stages[0].atoms;
    std::vector<std::vector<int>> chosen(stages.size()), alt_cols;
    std::vector<std::size_t> alt_stage;
    for (std::size_t s = 1; s < stages.size(); ++s) {
        const auto& st = stages[s];
        if (st.atoms.size() != K) throw DomainError("stages have different atom counts");
        const auto prev_rank = detail::ranks(out.iterates.col(static_cast<Eigen::Index>(s - 1)));
        struct Cand {
            std::vector<int> perm;
            double mismatch;
            long agreement;
        };
        std::vector<Cand> all;
        std::vector<int> perm(static_cast<std::size_t>(K));
        std::iota(perm.begin(), perm.end(), 0);
        do {
            double mis = 0.0;
            long agree = 0;
            for (int a = 0; a < K; ++a) {
                mis = std::max(mis, std::abs(st.weights(perm[a]) - pi(a)));
                const long d = prev_rank[static_cast<std::size_t>(a)] - perm[a];
                agree -= d * d;
            }
            all.push_back({perm, mis, agree});
        } while (std::next_permutation(perm.begin(), perm.end()));

        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : all) best = std::min(best, c.mismatch);
        std::vector<const Cand*> cands;
        if (best <= tol) {
            for (const auto& c : all) {
                if (c.mismatch <= tol && c.mismatch <= best + tol) cands.push_back(&c);
            }
        } else {
            if (strict) {
                throw StageInconsistencyError("stage " + std::to_string(s + 1) + " weights differ from the stage-1 weights by " +
                                              std::to_string(best) + " (tolerance " + std::to_string(tol) + ")");
            }
            out.weight_mismatch = true;
            for (const auto& c : all) cands.push_back(&c);
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand* a, const Cand* b) {
            if (a->agreement != b->agreement) return a->agreement > b->agreement;
            return a->mismatch < b->mismatch;
        });
        out.max_mismatch = std::max(out.max_mismatch, cands.front()->mismatch);
        chosen[s] = cands.front()->perm;
        for (int a = 0; a < K; ++a) out.iterates(a, static_cast<Eigen::Index>(s)) = st.atoms(chosen[s][static_cast<std::size_t>(a)]);
        if (best <= tol && cands.size() > 1) {
            out.ambiguous = true;
            for (std::size_t c = 1; c < cands.size(); ++c) {
                alt_cols.push_back(cands[c]->perm);
                alt_stage.push_back(s);
            }
        }
    }
    for (std::size_t i = 0; i < alt_cols.size(); ++i) {
        MatrixXd alt = out.iterates;
        const auto s = static_cast<Eigen::Index>(alt_stage[i]);
        for (int a = 0; a < K; ++a) alt(a, s) = stages[alt_stage[i]].atoms(alt_cols[i][static_cast<std::size_t>(a)]);
        out.alternatives.push_back(std::move(alt));
    }
    return out;
}

// ---------------------------------------------------------------- forward map

inline VectorXd forward_moments(const VectorXd& pi, const MatrixXd& S, const std::vector<WheelSpec>& keys) {
    BlockModel m{pi, S, 0.0};
    int J = 1;
    for (const auto& k : keys) J = std::max(J, k.max_k());
    const auto it = iterate_operator_block(m, J);
    VectorXd out(static_cast<Eigen::Index>(keys.size()));
    for (std::size_t i = 0; i < keys.size(); ++i) out(static_cast<Eigen::Index>(i)) = tau_block(m, keys[i], it);
    return out;
}

// ---------------------------------------------------------------- NLS

struct NlsResult {
    VectorXd pi;
    MatrixXd S;
    double residual = 0.0;
    double initial_residual = 0.0;
    bool converged = false;
    int iterations = 0;
    int starts = 0;
};

namespace detail {

// theta = (alpha_0..alpha_{K-2}, beta_ab for a <= b); pi = softmax(alpha, 0),
// S_ab = exp(beta_ab), then S is rescaled so that pi' S pi = 1.
struct Param {
    int K;
    int size() const { return K - 1 + K * (K + 1) / 2; }

    void decode(const VectorXd& th, VectorXd& pi, MatrixXd& S) const {
        pi.resize(K);
        double mx = 0.0;
        for (int a = 0; a < K - 1; ++a) mx = std::max(mx, th(a));
        for (int a = 0; a < K; ++a) pi(a) = std::exp((a < K - 1 ? th(a) : 0.0) - mx);
        pi /= pi.sum();
        S.resize(K, K);
        int idx = K - 1;
        for (int a = 0; a < K; ++a) {
            for (int b = a; b < K; ++b) S(a, b) = S(b, a) = std::exp(std::clamp(th(idx++), -40.0, 40.0));
        }
        S /= pi.dot(S * pi);
    }

    VectorXd encode(const VectorXd& pi, const MatrixXd& S) const {
        VectorXd th(size());
        for (int a = 0; a < K - 1; ++a) th(a) = std::log(std::max(pi(a), 1e-300) / std::max(pi(K - 1), 1e-300));
        int idx = K - 1;
        for (int a = 0; a < K; ++a) {
            for (int b = a; b < K; ++b) th(idx++) = std::log(std::max(0.5 * (S(a, b) + S(b, a)), 1e-12));
        }
        return th;
    }
};

inline double gaussian(SplitMix64& rng) {
    const double u = rng.uniform_open(), v = rng.uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.14159265358979323846 * v);
}

class Lm {
public:
    Lm(const std::vector<WheelSpec>& keys, const VectorXd& target, const VectorXd& weights, int K, int max_iter, double tol)
        : keys_(keys), target_(target), sw_(weights.cwiseSqrt()), par_{K}, max_iter_(max_iter), tol_(tol) {}

    VectorXd residuals(const VectorXd& th) const {
        VectorXd pi;
        MatrixXd S;
        par_.decode(th, pi, S);
        return sw_.cwiseProduct(target_ - forward_moments(pi, S, keys_));
    }

    double cost(const VectorXd& th) const {
        const double c = residuals(th).squaredNorm();
        return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
    }

    struct Run {
        VectorXd theta;
        double cost;
        double initial_cost;
        bool converged;
        int iterations;
    };

    Run run(VectorXd th) const {
        Run out{th, cost(th), 0.0, false, 0};
        out.initial_cost = out.cost;
        const int P = par_.size();
        double mu = 1e-3;
        VectorXd r = residuals(th);
        for (int it = 0; it < max_iter_; ++it) {
            out.iterations = it + 1;
            if (out.cost < 1e-28) {
                out.converged = true;
                break;
            }
            MatrixXd J(r.size(), P);
            for (int p = 0; p < P; ++p) {
                const double h = 1e-6 * std::max(1.0, std::abs(th(p)));
                VectorXd tp = th, tm = th;
                tp(p) += h;
                tm(p) -= h;
                J.col(p) = (residuals(tp) - residuals(tm)) / (2.0 * h);
            }
            const MatrixXd A = J.transpose() * J;
            const VectorXd g = J.transpose() * r;
            if (g.norm() <= 1e-15 * (1.0 + out.cost)) {
                out.converged = true;
                break;
            }
            const double dmax = std::max(A.diagonal().maxCoeff(), 1e-300);
            bool accepted = false;
            while (mu < 1e12) {
                MatrixXd D = A;
                for (int p = 0; p < P; ++p) D(p, p) += mu * std::max(A(p, p), 1e-9 * dmax);
                const VectorXd step = D.ldlt().solve(-g);
                const VectorXd cand = th + step;
                const double c = cost(cand);
                if (c < out.cost) {
                    const double rel = (out.cost - c) / out.cost;
                    th = cand;
                    r = residuals(th);
                    out.cost = c;
                    out.theta = th;
                    mu = std::max(mu / 3.0, 1e-12);
                    accepted = true;
                    if (rel < tol_ || step.norm() < 1e-12 * (1.0 + th.norm())) out.converged = true;
                    break;
                }
                mu *= 4.0;
            }
            if (!accepted) {
                // no descent direction left at machine precision
                out.converged = g.norm() <= 1e-8 * (1.0 + std::sqrt(out.cost));
                break;
            }
            if (out.converged) break;
        }
        return out;
    }

    const Param& param() const { return par_; }

private:
    const std::vector<WheelSpec>& keys_;
    VectorXd target_;
    VectorXd sw_;
    Param par_;
    int max_iter_;
    double tol_;
};

}  // namespace detail

// Weighted least-squares projection of tau_hat onto the block-model moment
// map, by Levenberg-Marquardt from `init` plus extra and random starts.
inline NlsResult nls_refine(const std::vector<WheelSpec>& keys, const VectorXd& tau_hat, const VectorXd& pi0, const MatrixXd& S0,
                            const FitConfig& cfg, const std::vector<std::pair<VectorXd, MatrixXd>>& extra_starts = {}) {
    const int K = static_cast<int>(pi0.size());
    if (static_cast<std::size_t>(tau_hat.size()) != keys.size()) throw DomainError("moment vector does not match the key list");
    VectorXd w = VectorXd::Ones(tau_hat.size());
    if (!cfg.weights.empty()) {
        if (cfg.weights.size() != keys.size()) throw DomainError("weight vector does not match the key list");
        for (std::size_t i = 0; i < keys.size(); ++i) w(static_cast<Eigen::Index>(i)) = cfg.weights[i];
    }
    detail::Lm lm(keys, tau_hat, w, K, cfg.max_iterations, cfg.tolerance);
    const auto& par = lm.param();
    NlsResult best;
    best.starts = 0;
    std::optional<detail::Lm::Run> top;
    auto consider = [&](const VectorXd& th) {
        auto run = lm.run(th);
        ++best.starts;
        if (!top || run.cost < top->cost) top = run;
    };
    const VectorXd th0 = par.encode(pi0, S0);
    consider(th0);
    best.initial_residual = top->initial_cost;
    if (top->initial_cost >= 1e-28) {
        for (const auto& [p, s] : extra_starts) consider(par.encode(p, s));
        VectorXd flat = VectorXd::Zero(par.size());
        consider(flat);
        for (int r = 0; r < cfg.multistarts; ++r) {
            SplitMix64 rng(SplitMix64::derive(cfg.seed, {0x6e6c73, static_cast<std::uint64_t>(r)}));
            VectorXd th = (r % 2 == 0) ? th0 : flat;
            for (int p = 0; p < par.size(); ++p) th(p) += 0.7 * detail::gaussian(rng);
            consider(th);
        }
    }
    par.decode(top->theta, best.pi, best.S);
    best.residual = top->cost;
    best.converged = top->converged;
    best.iterations = top->iterations;
    return best;
}

// ---------------------------------------------------------------- pipeline

struct StageAtoms {
    int k = 0;
    AtomResult atoms;
};

struct FitResult {
    int K = 0;
    VectorXd pi;
    MatrixXd S;
    double rho_hat = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
    bool converged = true;
    int iterations = 0;
    int starts = 0;
    std::optional<BlockModel> direct;
    std::vector<StageAtoms> stages;
    double v1_condition = std::numeric_limits<double>::quiet_NaN();
    double asymmetry = std::numeric_limits<double>::quiet_NaN();
    bool alignment_ambiguous = false;
    bool stage_weight_mismatch = false;
    std::optional<double> heterogeneity_z;
    std::string moment_source = "exact";
    std::string estimator = "qcheck";
    std::vector<WheelSpec> keys;
    VectorXd moments;
    std::vector<std::string> warnings;
};

enum class DirectFailure { raise, fallback };

// Fit from normalized moments tau_hat (one per key of cfg.fit_keys()).
inline FitResult fit_from_moments(const VectorXd& tau_hat, const FitConfig& cfg, DirectFailure on_fail = DirectFailure::raise) {
    if (cfg.K < 1) throw DomainError("K must be >= 1");
    const auto keys = cfg.fit_keys();
    if (static_cast<std::size_t>(tau_hat.size()) != keys.size()) throw DomainError("moment vector does not match the key list");
    FitResult res;
    res.K = cfg.K;
    res.keys = keys;
    res.moments = tau_hat;
    const int K = cfg.K;
    if (K == 1) {
        res.pi = VectorXd::Ones(1);
        res.S = MatrixXd::Ones(1, 1);
        res.residual = (tau_hat - forward_moments(res.pi, res.S, keys)).squaredNorm();
        res.direct = BlockModel{res.pi, res.S, 1.0};
        return res;
    }
    auto lookup = [&](int k, int l) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (keys[i].t() == 1 && keys[i].ks[0] == k && keys[i].ls[0] == l) return tau_hat(static_cast<Eigen::Index>(i));
        }
        throw DomainError("fit keys lack " + pattern_name(WheelSpec(k, l)));
    };

    std::vector<std::pair<VectorXd, MatrixXd>> extra;
    VectorXd pi0;
    MatrixXd S0;
    try {
        std::vector<AtomResult> stages;
        for (int k = 1; k <= K; ++k) {
            std::vector<double> m;
            for (int l = 1; l <= 2 * K - 1; ++l) m.push_back(lookup(k, l));
            stages.push_back(atoms_from_moments(m, K, cfg.hankel_limit));
            res.stages.push_back({k, stages.back()});
            if (stages.back().clipped) res.warnings.push_back("stage " + std::to_string(k) + " weights clipped to [1e-6, 1]");
        }
        const auto al = align_stages(stages, cfg.stage_tolerance, on_fail == DirectFailure::raise);
        res.alignment_ambiguous = al.ambiguous;
        res.stage_weight_mismatch = al.weight_mismatch;
        if (al.ambiguous) res.warnings.push_back("stage alignment ambiguous (indistinguishable weights); alternatives used as NLS starts");
        if (al.weight_mismatch) res.warnings.push_back("stage weights disagree beyond tolerance; monotone coupling used");
        const VectorXd pi = stages[0].weights;
        const auto rec = recover_S(pi, al.iterates, cfg.vandermonde_limit);
        res.v1_condition = rec.v1_condition;
        res.asymmetry = rec.asymmetry;
        MatrixXd S = rec.S;
        if ((S.array() < 0.0).any()) {
            res.warnings.push_back("direct estimate of S had negative entries; clamped to 0");
            S = S.cwiseMax(0.0);
        }
        if (pi.dot(S * pi) > 0.0) normalize_intensities(pi, S);
        res.direct = BlockModel{pi, S, 1.0};
        pi0 = pi;
        S0 = S;
        for (const auto& alt : al.alternatives) {
            try {
                auto r2 = recover_S(pi, alt, cfg.vandermonde_limit);
                MatrixXd S2 = r2.S.cwiseMax(0.0);
                if (pi.dot(S2 * pi) > 0.0) {
                    normalize_intensities(pi, S2);
                    extra.emplace_back(pi, S2);
                }
            } catch (const NumericalError&) {
            }
        }
    } catch (const NumericalError& e) {
        if (on_fail == DirectFailure::raise) throw;
        res.warnings.push_back(std::string("direct estimate failed: ") + e.what());
        res.direct.reset();
        pi0 = VectorXd::Constant(K, 1.0 / K);
        S0 = MatrixXd::Ones(K, K);
        for (int a = 0; a < K; ++a) S0(a, a) = 2.0;
        normalize_intensities(pi0, S0);
    }

    const auto nls = nls_refine(keys, tau_hat, pi0, S0, cfg, extra);
    res.pi = nls.pi;
    res.S = nls.S;
    res.residual = nls.residual;
    res.converged = nls.converged;
    res.iterations = nls.iterations;
    res.starts = nls.starts;
    if (!nls.converged) res.warnings.push_back("NLS did not converge; best iterate returned");

    const auto order = canonical_block_order(BlockModel{res.pi, res.S, 1.0});
    const auto canon = permute_blocks(BlockModel{res.pi, res.S, 1.0}, order);
    res.pi = canon.pi;
    res.S = canon.S;
    if (res.direct) res.direct = canonicalize(*res.direct);
    return res;
}

// Normalized moments of g for the fit keys, from exact hub counts or, when a
// budget is exceeded and allowed, the falling-factorial degree approximation.
struct EstimatedMoments {
    VectorXd values;
    std::string source = "exact";
};

inline EstimatedMoments estimate_fit_moments(const Graph& g, const std::vector<WheelSpec>& keys, const FitConfig& cfg) {
    EstimatedMoments out;
    out.values.resize(static_cast<Eigen::Index>(keys.size()));
    const std::vector<Pattern> pats(keys.begin(), keys.end());
    MomentOptions opt;
    opt.limits = cfg.limits;
    opt.mode = cfg.estimator == Estimator::pcheck ? CountMode::induced : CountMode::noninduced;
    MomentTable table;
    try {
        table = moment_table(g, pats, opt);
    } catch (const BudgetError&) {
        if (!cfg.allow_degree_approx) throw;
        opt.degree_approx = true;
        table = moment_table(g, pats, opt);
        out.source = "degree-approx";
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto& e = table.entries[i];
        const auto v = (cfg.estimator == Estimator::pcheck && !e.degree_approx) ? e.p_check : e.q_check;
        out.values(static_cast<Eigen::Index>(i)) = *v;
    }
    return out;
}

// z-score of the (1,2)-wheel excess tau_12 - 1 = var T(1)(xi) against its
// standard error from the per-vertex terms (D_i)_2 / ((n-1)(n-2) rho^2).
inline double degree_heterogeneity_z(const Graph& g) {
    const std::size_t n = g.num_vertices();
    if (n < 3) return 0.0;
    const double rho = rho_hat(g);
    const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 2) * rho * rho;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = g.degree(static_cast<Vertex>(i));
        y[i] = d * (d - 1.0) / denom;
    }
    const double mu = stats::mean(y);
    const double se = std::sqrt(stats::variance(y) / static_cast<double>(n));
    if (se == 0.0) return mu - 1.0 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return (mu - 1.0) / se;
}

inline FitResult fit_block_model(const Graph& g, const FitConfig& cfg) {
    if (cfg.K < 1) throw DomainError("K must be >= 1");
    if (g.num_vertices() < 2 || g.num_edges() == 0) throw NormalizationError("fitting needs rho_hat > 0 (graph has no edges)");
    const double rho = rho_hat(g);
    const auto keys = cfg.fit_keys();
    std::vector<std::string> warnings;
    std::optional<double> z;
    if (cfg.K >= 2) {
        z = degree_heterogeneity_z(g);
        if (*z < cfg.heterogeneity_z) {
            throw IdentifiabilityError("degree heterogeneity is not distinguishable from noise (z = " + std::to_string(*z) + " < " +
                                       std::to_string(cfg.heterogeneity_z) +
                                       "): T(1) looks constant, as when S has constant row sums, so a " + std::to_string(cfg.K) +
                                       "-block fit is not identifiable");
        }
    }
    const double lambda = static_cast<double>(g.num_vertices() - 1) * rho;
    if (lambda > std::sqrt(static_cast<double>(g.num_vertices()))) {
        warnings.push_back("mean degree " + std::to_string(lambda) + " exceeds sqrt(n); moment estimates may be biased");
    }
    const auto est = estimate_fit_moments(g, keys, cfg);
    FitResult res = fit_from_moments(est.values, cfg, cfg.K == 1 ? DirectFailure::raise : DirectFailure::fallback);
    res.rho_hat = rho;
    res.heterogeneity_z = z;
    res.moment_source = est.source;
    res.estimator = cfg.estimator == Estimator::pcheck ? "pcheck" : "qcheck";
    if (est.source != "exact") warnings.push_back("wheel counts exceeded the budget; degree-based approximation used");
    res.warnings.insert(res.warnings.begin(), warnings.begin(), warnings.end());
    return res;
}

// Inverse bootstrap variances 1 / sigma2_hat for the fit keys.
inline std::vector<double> bootstrap_weights(const Graph& g, const std::vector<WheelSpec>& keys, std::size_t m, std::size_t B,
                                             std::uint64_t seed, const WheelCountLimits& limits = {}) {
    const auto cache = HubCountCache::build(g, keys, limits);
    std::vector<double> w;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto r = bootstrap_variance(g, cache, keys[i], m, B, SplitMix64::derive(seed, {i}), BootstrapNorm::rho, limits.threads);
        w.push_back(r.sigma2_hat > 0.0 ? 1.0 / r.sigma2_hat : 1.0);
    }
    return w;
}

inline nlohmann::json to_json(const FitResult& r, bool report_stages = false) {
    using nlohmann::json;
    auto vec = [](const VectorXd& v) {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
        return a;
    };
    auto mat = [&](const MatrixXd& m) {
        json a = json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
        return a;
    };
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    json hankel = json::array();
    for (const auto& s : r.stages) hankel.push_back(s.atoms.hankel_condition);
    json moments = json::array();
    for (std::size_t i = 0; i < r.keys.size(); ++i) {
        moments.push_back({{"key", pattern_name(r.keys[i])}, {"value", r.moments(static_cast<Eigen::Index>(i))}});
    }
    json diag = {{"hankel_condition", hankel},
                 {"v1_condition", num(r.v1_condition)},
                 {"asymmetry", num(r.asymmetry)},
                 {"projection_distance", std::sqrt(r.residual)},
                 {"alignment_ambiguous", r.alignment_ambiguous},
                 {"stage_weight_mismatch", r.stage_weight_mismatch},
                 {"heterogeneity_z", r.heterogeneity_z ? num(*r.heterogeneity_z) : json(nullptr)},
                 {"iterations", r.iterations},
                 {"starts", r.starts},
                 {"moment_source", r.moment_source},
                 {"estimator", r.estimator},
                 {"warnings", r.warnings}};
    json out = {{"K", r.K},
                {"pi", vec(r.pi)},
                {"S", mat(r.S)},
                {"rho_hat", num(r.rho_hat)},
                {"residual", r.residual},
                {"converged", r.converged},
                {"direct", r.direct ? json{{"pi", vec(r.direct->pi)}, {"S", mat(r.direct->S)}} : json(nullptr)},
                {"moments", moments},
                {"diagnostics", diag}};
    if (report_stages) {
        json st = json::array();
        for (const auto& s : r.stages) st.push_back({{"k", s.k}, {"atoms", vec(s.atoms.atoms)}, {"weights", vec(s.atoms.weights)}, {"clipped", s.atoms.clipped}});
        out["stages"] = st;
    }
    return out;
}

}  // namespace momgraph
