#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace momgraph;

namespace {

std::vector<double> stage_moments(const VectorXd& atoms, const VectorXd& w, int count) {
    std::vector<double> m;
    for (int l = 1; l <= count; ++l) m.push_back(w.dot(atoms.array().pow(l).matrix()));
    return m;
}

}  // namespace

TEST(Atoms, ReferenceStageOne) {
    std::vector<double> m{1.0, 1.0625, 1.1875};
    auto r = atoms_from_moments(m, 2);
    EXPECT_NEAR(r.atoms(0), 0.75, 1e-12);
    EXPECT_NEAR(r.atoms(1), 1.25, 1e-12);
    EXPECT_NEAR(r.weights(0), 0.5, 1e-12);
    EXPECT_NEAR(r.weights(1), 0.5, 1e-12);
    EXPECT_FALSE(r.clipped);
}

TEST(Atoms, ReferenceStageTwo) {
    std::vector<double> m{1.0625, 1.26953125, 1.647705078125};
    auto r = atoms_from_moments(m, 2);
    EXPECT_NEAR(r.atoms(0), 0.6875, 1e-12);
    EXPECT_NEAR(r.atoms(1), 1.4375, 1e-12);
}

TEST(Atoms, ThreeAtoms) {
    VectorXd a(3), w(3);
    a << 0.4, 1.1, 2.0;
    w << 0.2, 0.5, 0.3;
    auto r = atoms_from_moments(stage_moments(a, w, 5), 3);
    EXPECT_TRUE(r.atoms.isApprox(a, 1e-9));
    EXPECT_TRUE(r.weights.isApprox(w, 1e-9));
}

TEST(Atoms, Failures) {
    EXPECT_THROW(atoms_from_moments(std::vector<double>{1, 1, 1}, 2), AtomSeparationError);
    EXPECT_THROW(atoms_from_moments(std::vector<double>{0, -1, 0}, 2), AtomSeparationError);
    const double d = 1e-3;
    std::vector<double> close{1.0, 1 + d * d, 1 + 3 * d * d};
    EXPECT_THROW(atoms_from_moments(close, 2, 1e5), IllPosedError);
    EXPECT_NO_THROW(atoms_from_moments(close, 2, 1e12));
    EXPECT_THROW(atoms_from_moments(std::vector<double>{1, 1}, 2), DomainError);
}

TEST(Recover, ReferenceModel) {
    VectorXd pi(2);
    pi << 0.5, 0.5;
    MatrixXd it(2, 2);
    it << 0.75, 0.6875, 1.25, 1.4375;
    auto r = recover_S(pi, it);
    EXPECT_NEAR(r.S(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(r.S(0, 1), 0.5, 1e-12);
    EXPECT_NEAR(r.S(1, 1), 2.0, 1e-12);
    EXPECT_NEAR(r.asymmetry, 0.0, 1e-12);
}

TEST(Recover, ConstantRowSumsAreNotIdentifiable) {
    VectorXd pi(2);
    pi << 0.5, 0.5;
    MatrixXd it(2, 2);
    it << 1.0, 1.0, 1.0, 1.0;
    EXPECT_THROW(recover_S(pi, it), IdentifiabilityError);
}

TEST(Align, WeightsDecideTheMatching) {
    AtomResult s1, s2;
    s1.atoms = Eigen::Vector2d(0.5, 1.5);
    s1.weights = Eigen::Vector2d(0.3, 0.7);
    s2.atoms = Eigen::Vector2d(0.4, 1.8);
    s2.weights = Eigen::Vector2d(0.7, 0.3);  // order flips between stages
    auto a = align_stages({s1, s2});
    EXPECT_DOUBLE_EQ(a.iterates(0, 1), 1.8);
    EXPECT_DOUBLE_EQ(a.iterates(1, 1), 0.4);
    EXPECT_FALSE(a.ambiguous);
}

TEST(Align, EqualWeightsPreferMonotoneAndKeepAlternatives) {
    AtomResult s1, s2;
    s1.atoms = Eigen::Vector2d(0.75, 1.25);
    s1.weights = Eigen::Vector2d(0.5, 0.5);
    s2.atoms = Eigen::Vector2d(0.6875, 1.4375);
    s2.weights = Eigen::Vector2d(0.5, 0.5);
    auto a = align_stages({s1, s2});
    EXPECT_DOUBLE_EQ(a.iterates(0, 1), 0.6875);
    EXPECT_TRUE(a.ambiguous);
    ASSERT_EQ(a.alternatives.size(), 1u);
    EXPECT_DOUBLE_EQ(a.alternatives[0](0, 1), 1.4375);
}

TEST(Align, InconsistentStages) {
    AtomResult s1, s2;
    s1.atoms = Eigen::Vector2d(0.5, 1.5);
    s1.weights = Eigen::Vector2d(0.3, 0.7);
    s2.atoms = Eigen::Vector2d(0.4, 1.8);
    s2.weights = Eigen::Vector2d(0.5, 0.5);
    EXPECT_THROW(align_stages({s1, s2}, 1e-2, true), StageInconsistencyError);
    auto a = align_stages({s1, s2}, 1e-2, false);
    EXPECT_TRUE(a.weight_mismatch);
    EXPECT_DOUBLE_EQ(a.iterates(1, 1), 1.8);
}

TEST(Fit, PopulationMomentsOfReferenceModel) {
    const auto m = oracle::reference_model(0.01);
    FitConfig cfg;
    cfg.K = 2;
    const auto tau = forward_moments(m.pi, m.S, cfg.fit_keys());
    auto r = fit_from_moments(tau, cfg);
    EXPECT_NEAR(r.pi(0), 0.5, 1e-9);
    EXPECT_NEAR(r.S(0, 0), 1.0, 1e-8);
    EXPECT_NEAR(r.S(0, 1), 0.5, 1e-8);
    EXPECT_NEAR(r.S(1, 1), 2.0, 1e-8);
    EXPECT_LT(r.residual, 1e-20);
    ASSERT_TRUE(r.direct.has_value());
    EXPECT_NEAR(r.direct->S(1, 1), 2.0, 1e-9);
    EXPECT_TRUE(r.converged);
}

TEST(Fit, PopulationMomentsThreeBlocks) {
    BlockModel m;
    m.pi = Eigen::Vector3d(0.2, 0.3, 0.5);
    m.S = (Eigen::Matrix3d() << 3.0, 0.5, 0.2, 0.5, 1.5, 0.4, 0.2, 0.4, 0.8).finished();
    normalize_intensities(m.pi, m.S);
    FitConfig cfg;
    cfg.K = 3;
    auto r = fit_from_moments(forward_moments(m.pi, m.S, cfg.fit_keys()), cfg);
    const auto c = canonicalize(m);
    EXPECT_LT((r.pi - c.pi).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((r.S - c.S).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Fit, SingleBlock) {
    FitConfig cfg;
    cfg.K = 1;
    VectorXd tau = VectorXd::Ones(1);
    auto r = fit_from_moments(tau, cfg);
    EXPECT_DOUBLE_EQ(r.S(0, 0), 1.0);
    EXPECT_THROW(fit_from_moments(VectorXd::Ones(3), cfg), DomainError);
}

TEST(Fit, ForwardMapOfErdosRenyiIsUnidentifiableAtK2) {
    FitConfig cfg;
    cfg.K = 2;
    const auto tau = forward_moments(VectorXd::Ones(1), MatrixXd::Ones(1, 1), cfg.fit_keys());
    EXPECT_THROW(fit_from_moments(tau, cfg), AtomSeparationError);
}

TEST(Fit, SimulatedReferenceGraph) {
    const std::size_t n = 4000;
    auto out = sample_block_model(oracle::reference_model(20.0 / (n - 1)), n, 2026);
    FitConfig cfg;
    cfg.K = 2;
    auto r = fit_block_model(out.graph, cfg);
    EXPECT_LT(std::abs(r.pi(0) - 0.5), 0.05);
    EXPECT_LT((r.S - canonicalize(oracle::reference_model(0.01)).S).cwiseAbs().maxCoeff(), 0.2);
    EXPECT_EQ(r.moment_source, "exact");
    auto j = to_json(r, true);
    EXPECT_EQ(j["K"], 2);
    EXPECT_TRUE(j.contains("stages"));
    EXPECT_TRUE(j["diagnostics"].contains("v1_condition"));
}

TEST(Fit, ConstantRowSumGraphRejected) {
    BlockModel m;
    m.pi = Eigen::Vector2d(0.5, 0.5);
    m.S = (Eigen::Matrix2d() << 1.6, 0.4, 0.4, 1.6).finished();
    const std::size_t n = 4000;
    m.rho = 20.0 / (n - 1);
    auto out = sample_block_model(m, n, 99);
    FitConfig cfg;
    cfg.K = 2;
    try {
        fit_block_model(out.graph, cfg);
        FAIL() << "expected IdentifiabilityError";
    } catch (const IdentifiabilityError& e) {
        EXPECT_EQ(e.exit_code(), 3);
    }
}

TEST(Fit, BudgetFallsBackToDegreeApproximation) {
    const std::size_t n = 1500;
    auto out = sample_block_model(oracle::reference_model(20.0 / (n - 1)), n, 5);
    FitConfig cfg;
    cfg.K = 2;
    cfg.limits.paths_per_hub = 5;
    auto r = fit_block_model(out.graph, cfg);
    EXPECT_EQ(r.moment_source, "degree-approx");
    cfg.allow_degree_approx = false;
    EXPECT_THROW(fit_block_model(out.graph, cfg), BudgetError);
}
