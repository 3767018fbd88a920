#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace momgraph;

namespace {

Graph make(std::size_t n, std::vector<Edge> e) { return Graph::from_edges(n, e); }

Graph complete(std::size_t n) {
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) e.emplace_back(u, v);
    }
    return make(n, e);
}

const PatternGraph kEdge(2, {{0, 1}});
const PatternGraph kTwoStar(3, {{0, 1}, {0, 2}});
const PatternGraph kTriangle(3, {{0, 1}, {1, 2}, {0, 2}});
const PatternGraph kFourCycle(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});

}  // namespace

TEST(Pattern, ParsesShorthandsAndEdgeLists) {
    EXPECT_EQ(pattern_name(parse_pattern("2-star")), "edges:0-1,0-2");
    EXPECT_EQ(pattern_name(parse_pattern("edges:1-0,2-1")), "edges:0-1,1-2");
    EXPECT_EQ(pattern_name(parse_pattern("rooted-edges:0-1,1-2@1")), "rooted-edges:0-1,1-2@1");
    EXPECT_EQ(pattern_name(parse_pattern("wheel:k=2,l=3")), "wheel:k=2,l=3");
    EXPECT_EQ(pattern_name(parse_pattern("wheel:k=(1,2),l=(2,1)")), "wheel:k=(1,2),l=(2,1)");
}

TEST(Pattern, RejectsMalformed) {
    EXPECT_THROW(parse_pattern("square"), ParseError);
    EXPECT_THROW(parse_pattern("edges:0-0"), DomainError);
    EXPECT_THROW(parse_pattern("edges:0-1,0-1"), DomainError);
    EXPECT_THROW(parse_pattern("edges:0-2"), DomainError);  // vertex 1 isolated
    EXPECT_THROW(parse_pattern("wheel:k=(1,1),l=(1,1)"), DomainError);
    EXPECT_THROW(parse_pattern("wheel:k=0,l=1"), DomainError);
    EXPECT_THROW(parse_pattern("rooted-edges:0-1"), ParseError);
    EXPECT_THROW(PatternGraph(11, {{0, 1}}), CapabilityError);
}

TEST(Pattern, IsomorphismClassCounts) {
    EXPECT_EQ(count_isomorphism_classes(kEdge), 1);
    EXPECT_EQ(count_isomorphism_classes(kTwoStar), 3);
    EXPECT_EQ(count_isomorphism_classes(kTriangle), 1);
    EXPECT_EQ(count_isomorphism_classes(kFourCycle), 3);
    // rooted path of length 2 rooted at an end: 3! / 1
    EXPECT_EQ(count_isomorphism_classes(PatternGraph(3, {{0, 1}, {1, 2}}, 0)), 6);
}

TEST(Pattern, AutomorphismsAgreeWithPermutationScan) {
    for (int p = 2; p <= 5; ++p) {
        for (const auto& r : oracle::patterns_on(p)) EXPECT_EQ(automorphism_count(r), oracle::automorphisms(r)) << pattern_name(r);
    }
}

TEST(Pattern, AllGraphsOnFiveVertices) {
    // Graphs without isolated vertices: 1, 2, 7, 23 on 2..5 vertices.
    EXPECT_EQ(oracle::patterns_on(2).size(), 1u);
    EXPECT_EQ(oracle::patterns_on(3).size(), 2u);
    EXPECT_EQ(oracle::patterns_on(4).size(), 7u);
    EXPECT_EQ(oracle::patterns_on(5).size(), 23u);
}

TEST(Pattern, WheelToPatternShape) {
    auto r = wheel_to_pattern(WheelSpec({1, 3}, {2, 1}));
    EXPECT_EQ(r.p(), 6);
    EXPECT_EQ(r.q(), 5);
    EXPECT_EQ(r.root(), 0);
    EXPECT_EQ(r.degree(0), 3);
    EXPECT_TRUE(r.is_acyclic());
    EXPECT_EQ(automorphism_count(r), 2);
}

TEST(Counting, PathGraph) {
    auto g = make(4, {{0, 1}, {1, 2}, {2, 3}});
    EXPECT_EQ(count_noninduced(g, kEdge), 3);
    EXPECT_EQ(count_noninduced(g, kTwoStar), 2);
    EXPECT_EQ(count_induced(g, kTwoStar), 2);
    EXPECT_EQ(count_noninduced(g, kTriangle), 0);
    EXPECT_EQ(count_labelled_embeddings(g, kTwoStar, Induced::no), 4);
}

TEST(Counting, CompleteGraphK4) {
    auto g = complete(4);
    EXPECT_EQ(count_noninduced(g, kTwoStar), 12);
    EXPECT_EQ(count_induced(g, kTwoStar), 0);
    EXPECT_EQ(count_noninduced(g, kTriangle), 4);
    EXPECT_EQ(count_induced(g, kTriangle), 4);
    EXPECT_EQ(count_noninduced(g, kFourCycle), 3);
    EXPECT_EQ(count_induced(g, kFourCycle), 0);
}

TEST(Counting, FourCycle) {
    auto g = make(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
    EXPECT_EQ(count_noninduced(g, kTwoStar), 4);
    EXPECT_EQ(count_induced(g, kTwoStar), 4);
    EXPECT_EQ(count_induced(g, kFourCycle), 1);
}

TEST(Counting, Star) {
    auto g = make(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    EXPECT_EQ(count_noninduced(g, kTwoStar), 6);
    EXPECT_EQ(count_noninduced(g, PatternGraph(4, {{0, 1}, {0, 2}, {0, 3}})), 4);
    EXPECT_EQ(count_noninduced(g, PatternGraph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}})), 1);
}

TEST(Counting, TooFewVertices) {
    auto g = make(2, {{0, 1}});
    EXPECT_EQ(count_noninduced(g, kTriangle), 0);
}

TEST(Counting, MatchesBruteForceOnRandomGraphs) {
    SplitMix64 rng(2024);
    std::vector<PatternGraph> pats;
    for (int p = 2; p <= 4; ++p) {
        for (auto& r : oracle::patterns_on(p)) pats.push_back(r);
    }
    std::vector<oracle::MapTable> tables;
    for (auto& r : pats) tables.push_back(oracle::build_table(r));
    for (int trial = 0; trial < 40; ++trial) {
        auto g = oracle::random_graph(3 + rng.below(6), 0.2 + 0.6 * rng.uniform(), rng);
        for (std::size_t i = 0; i < pats.size(); ++i) {
            auto [non, ind] = oracle::labelled_counts(g, tables[i]);
            ASSERT_EQ(count_labelled_embeddings(g, pats[i], Induced::no), non);
            ASSERT_EQ(count_labelled_embeddings(g, pats[i], Induced::yes), ind);
        }
    }
}

TEST(Counting, ThreadCountDoesNotChangeResult) {
    SplitMix64 rng(1);
    auto g = oracle::random_graph(60, 0.2, rng);
    EXPECT_EQ(count_noninduced(g, kFourCycle, 1), count_noninduced(g, kFourCycle, 4));
    EXPECT_EQ(count_induced(g, kTriangle, 1), count_induced(g, kTriangle, 3));
}

TEST(Int128, CheckedArithmetic) {
    EXPECT_EQ(binomial(10, 3), 120);
    EXPECT_EQ(binomial(3, 5), 0);
    EXPECT_EQ(factorial(10), 3628800);
    EXPECT_EQ(falling_factorial(5, 2), 20);
    EXPECT_EQ(falling_factorial(1, 2), 0);
    EXPECT_EQ(to_string(parse_count("340282366920938463463374607431768211455")), "340282366920938463463374607431768211455");
    const Count big = parse_count("340282366920938463463374607431768211455");
    EXPECT_THROW(checked_add(big, 1), OverflowError);
    EXPECT_THROW(checked_mul(big, 2), OverflowError);
}
