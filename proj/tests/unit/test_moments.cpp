#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace momgraph;

namespace {

Graph complete(std::size_t n) {
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) e.emplace_back(u, v);
    }
    return Graph::from_edges(n, e);
}

}  // namespace

TEST(Moments, CompleteGraphFrequencies) {
    auto t = moment_table(complete(5), {parse_pattern("triangle"), parse_pattern("2-star"), parse_pattern("edge")});
    EXPECT_DOUBLE_EQ(t.rho_hat, 1.0);
    const auto& tri = t.at("edges:0-1,0-2,1-2");
    EXPECT_DOUBLE_EQ(*tri.p_hat, 1.0);
    EXPECT_DOUBLE_EQ(*tri.q_hat, 1.0);
    const auto& star = t.at("edges:0-1,0-2");
    EXPECT_EQ(star.n_r, 3);
    EXPECT_DOUBLE_EQ(*star.p_hat, 0.0);
    EXPECT_DOUBLE_EQ(*star.q_hat, 1.0);
    EXPECT_THROW(t.at("edges:0-1,1-2,2-3"), DomainError);
}

TEST(Moments, PathGraphHandValues) {
    // P4: rho_hat = 3/6; 2 two-stars out of C(4,3) * 3 = 12 slots
    std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}};
    auto t = moment_table(Graph::from_edges(4, e), {parse_pattern("2-star")});
    const auto& s = t.entries[0];
    EXPECT_DOUBLE_EQ(*s.q_hat, 2.0 / 12.0);
    EXPECT_DOUBLE_EQ(*s.q_check, (2.0 / 12.0) / 0.25);
    EXPECT_EQ(*s.raw_induced, 2);
}

TEST(Moments, TwoPathWheelsAgree) {
    // (1,2) and (2,1) wheels both count 2-paths: N = 3 and 6 absorb the
    // hub choice, so their frequencies coincide exactly.
    SplitMix64 rng(5);
    auto g = oracle::random_graph(40, 0.2, rng);
    auto t = moment_table(g, {WheelSpec(1, 2), WheelSpec(2, 1)}, {CountMode::noninduced});
    EXPECT_EQ(*t.entries[1].raw_noninduced, 2 * *t.entries[0].raw_noninduced);
    EXPECT_DOUBLE_EQ(*t.entries[0].q_check, *t.entries[1].q_check);
    EXPECT_FALSE(t.entries[0].p_hat.has_value());
}

TEST(Moments, InducedWheelCountUsesExplicitPattern) {
    SplitMix64 rng(6);
    auto g = oracle::random_graph(25, 0.3, rng);
    auto t = moment_table(g, {WheelSpec(2, 2)}, {CountMode::both});
    EXPECT_EQ(*t.entries[0].raw_induced, count_induced(g, wheel_to_pattern(WheelSpec(2, 2))));
    EXPECT_LE(*t.entries[0].raw_induced, *t.entries[0].raw_noninduced);
}

TEST(Moments, DegreeApproximationFlagged) {
    SplitMix64 rng(7);
    auto g = oracle::random_graph(30, 0.2, rng);
    MomentOptions opt;
    opt.degree_approx = true;
    auto t = moment_table(g, {WheelSpec(2, 2), parse_pattern("triangle")}, opt);
    EXPECT_TRUE(t.entries[0].degree_approx);
    EXPECT_FALSE(t.entries[0].raw_noninduced.has_value());
    EXPECT_TRUE(t.entries[0].q_check.has_value());
    EXPECT_FALSE(t.entries[1].degree_approx);
    EXPECT_EQ(to_json(t)["entries"][0]["source"], "degree-approx");
}

TEST(Moments, EmptyGraphCannotBeNormalized) {
    auto g = Graph::from_edges(5, std::vector<Edge>{});
    EXPECT_THROW(moment_table(g, {parse_pattern("edge")}), NormalizationError);
}

TEST(Moments, JsonCountsAreStrings) {
    auto j = to_json(moment_table(complete(4), {parse_pattern("triangle")}));
    EXPECT_EQ(j["entries"][0]["raw_count"]["noninduced"], "4");
    EXPECT_EQ(j["entries"][0]["N_R"], "1");
}

TEST(Moments, SubgraphSumIdentity) {
    // |Aut R| Q(R) = sum over labelled supergraphs S of R on the same
    // vertices of |Aut S| P(S), checked with the 2-star on 3 vertices:
    // noninduced 2-stars = induced 2-stars + 3 * triangles.
    SplitMix64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = oracle::random_graph(15, 0.4, rng);
        auto t = moment_table(g, {parse_pattern("2-star"), parse_pattern("triangle")});
        EXPECT_EQ(*t.entries[0].raw_noninduced, *t.entries[0].raw_induced + 3 * *t.entries[1].raw_induced);
    }
}

TEST(Bootstrap, SubsampleIsDistinct) {
    SplitMix64 rng(1);
    std::vector<std::size_t> pick;
    detail::subsample(100, 60, rng, pick);
    std::set<std::size_t> s(pick.begin(), pick.end());
    EXPECT_EQ(s.size(), 60u);
    EXPECT_LT(*s.rbegin(), 100u);
}

TEST(Bootstrap, FullSubsampleReproducesEstimate) {
    auto out = sample_block_model(oracle::reference_model(0.02), 400, 3);
    const WheelSpec key(2, 1);
    auto cache = HubCountCache::build(out.graph, {key});
    auto r = bootstrap_variance(out.graph, cache, key, 400, 5, 9);
    auto t = moment_table(out.graph, {key}, {CountMode::noninduced});
    EXPECT_NEAR(r.full_estimate, *t.entries[0].q_check, 1e-9);
    for (double x : r.replicates) EXPECT_NEAR(x, r.full_estimate, 1e-9);
    EXPECT_NEAR(r.sigma2_hat, 0.0, 1e-15);
}

TEST(Bootstrap, DeterministicAndThreadIndependent) {
    auto out = sample_block_model(oracle::reference_model(0.02), 600, 4);
    const WheelSpec key(2, 1);
    auto cache = HubCountCache::build(out.graph, {key});
    auto a = bootstrap_variance(out.graph, cache, key, 100, 50, 11, BootstrapNorm::rho, 1);
    auto b = bootstrap_variance(out.graph, cache, key, 100, 50, 11, BootstrapNorm::rho, 4);
    EXPECT_EQ(a.replicates, b.replicates);
    EXPECT_GT(a.sigma2_hat, 0.0);
    auto c = bootstrap_variance(out.graph, cache, key, 100, 50, 11, BootstrapNorm::literal, 1);
    EXPECT_NE(a.replicates, c.replicates);
}

TEST(Bootstrap, Validation) {
    auto out = sample_block_model(oracle::reference_model(0.02), 100, 4);
    auto cache = HubCountCache::build(out.graph, {WheelSpec(1, 1)});
    EXPECT_THROW(bootstrap_variance(out.graph, cache, WheelSpec(1, 1), 0, 10, 1), DomainError);
    EXPECT_THROW(bootstrap_variance(out.graph, cache, WheelSpec(1, 1), 101, 10, 1), DomainError);
    EXPECT_THROW(bootstrap_variance(out.graph, cache, WheelSpec(1, 1), 10, 1, 1), DomainError);
    EXPECT_THROW(bootstrap_variance(out.graph, cache, WheelSpec(2, 1), 10, 10, 1), DomainError);
    EXPECT_EQ(default_subsample_size(1000), 126u);
}
