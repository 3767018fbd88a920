#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "momgraph");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream os, es;
    const int code = momgraph::cli::run(static_cast<int>(argv.size()), argv.data(), os, es);
    return {code, os.str(), es.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("momgraph_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string demo(const std::string& rel) const { return std::string(MOMGRAPH_DEMO_DIR) + "/" + rel; }

    std::string slurp(const std::string& p) const {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write(const std::string& p, const std::string& text) const { std::ofstream(p) << text; }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenIsDeterministicAndWritesManifest) {
    const auto model = demo("models/reference_k2.json");
    ASSERT_EQ(run({"gen", model, "--n", "300", "-o", path("a.txt"), "--seed", "5"}).code, 0);
    ASSERT_EQ(run({"--seed", "5", "gen", model, "--n", "300", "-o", path("b.txt")}).code, 0);
    auto strip = [](std::string s) {
        // drop the provenance comment, which names the output path
        std::istringstream in(s);
        std::string line, out;
        while (std::getline(in, line)) {
            if (line.rfind("# manifest", 0) != 0) out += line + "\n";
        }
        return out;
    };
    EXPECT_EQ(strip(slurp(path("a.txt"))), strip(slurp(path("b.txt"))));
    const auto man = json::parse(slurp(path("a.txt") + ".manifest.json"));
    EXPECT_EQ(man["schema"], "momgraph.manifest/1");
    EXPECT_EQ(man["seeds"][0], 5);
    EXPECT_EQ(man["command"], "gen");
    ASSERT_EQ(run({"gen", model, "--n", "300", "-o", path("c.txt"), "--seed", "6"}).code, 0);
    EXPECT_NE(strip(slurp(path("a.txt"))), strip(slurp(path("c.txt"))));
}

TEST_F(CliTest, MomentsOnSmallGraph) {
    write(path("k4.txt"), "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    auto r = run({"moments", path("k4.txt"), "-p", "triangle", "-p", "2-star"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["schema"], "momgraph.moment_table/1");
    EXPECT_EQ(j["entries"][0]["raw_count"]["noninduced"], "4");
    EXPECT_DOUBLE_EQ(j["entries"][0]["estimate"].get<double>(), 1.0);
    EXPECT_TRUE(j["manifest"].is_object());
}

TEST_F(CliTest, FitWritesResultAndSidecar) {
    const auto model = demo("models/reference_k2.json");
    ASSERT_EQ(run({"gen", model, "--n", "2000", "-o", path("g.txt"), "--seed", "3"}).code, 0);
    auto r = run({"fit", path("g.txt"), "--K", "2", "-o", path("fit.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(slurp(path("fit.json")));
    EXPECT_EQ(j["schema"], "momgraph.fit_result/1");
    EXPECT_EQ(j["pi"].size(), 2u);
    EXPECT_TRUE(fs::exists(path("fit.json") + ".manifest.json"));
}

TEST_F(CliTest, DegreesAndBootstrap) {
    const auto model = demo("models/er.json");
    ASSERT_EQ(run({"gen", model, "--n", "200", "-o", path("g.txt")}).code, 0);
    auto d = run({"degrees", path("g.txt"), "-m", "3", "--csv", path("d.csv")});
    ASSERT_EQ(d.code, 0) << d.err;
    EXPECT_EQ(json::parse(d.out)["schema"], "momgraph.degree_summary/1");
    std::ifstream csv(path("d.csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_NE(header.find("D3"), std::string::npos);
    auto b = run({"bootstrap", path("g.txt"), "-B", "20", "--key", "k=1,l=2"});
    ASSERT_EQ(b.code, 0) << b.err;
    auto j = json::parse(b.out);
    EXPECT_EQ(j["B"], 20);
    EXPECT_EQ(j["key"], "wheel:k=1,l=2");
}

TEST_F(CliTest, ExitCodes) {
    // 2: bad input
    EXPECT_EQ(run({"gen", demo("models/bad_model.json"), "--n", "10"}).code, 2);
    write(path("loop.txt"), "1 1\n");
    EXPECT_EQ(run({"moments", path("loop.txt")}).code, 2);
    EXPECT_EQ(run({"moments", path("missing.txt")}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    write(path("g.txt"), "0 1\n1 2\n");
    EXPECT_EQ(run({"moments", path("g.txt"), "-p", "wheel:k=0,l=1"}).code, 2);
    // 3: numerical failure (no edges)
    write(path("empty.txt"), "# vertices: 4\n");
    auto r = run({"moments", path("empty.txt")});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("rho_hat"), std::string::npos);
    // 4: budget
    const auto model = demo("models/reference_k2.json");
    ASSERT_EQ(run({"gen", model, "--n", "500", "-o", path("h.txt")}).code, 0);
    EXPECT_EQ(run({"--budget", "3", "moments", path("h.txt"), "-p", "wheel:k=3,l=2"}).code, 4);
}

TEST_F(CliTest, ConstantRowSumFitIsRejected) {
    ASSERT_EQ(run({"gen", demo("models/constant_rowsum.json"), "--n", "4000", "--rho", "0.005", "-o", path("c.txt")}).code, 0);
    auto r = run({"fit", path("c.txt"), "--K", "2"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("not identifiable"), std::string::npos);
}

TEST_F(CliTest, SweepWritesLinesAndSummary) {
    json cfg = {{"schema", "momgraph.sweep_config/1"},
                {"models", json::array({{{"name", "er"}, {"file", demo("models/er.json")}}})},
                {"n", json::array({200, 400})},
                {"lambda", {{"values", json::array({8})}}},
                {"replicates", 2},
                {"seed", 3},
                {"K", 1},
                {"metrics", json::array({"rho_hat", "tau:wheel:k=1,l=2"})}};
    write(path("cfg.json"), cfg.dump());
    auto r = run({"sweep", path("cfg.json"), "-o", path("out.jsonl"), "--summary", path("sum.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path("out.jsonl"));
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        auto j = json::parse(line);
        EXPECT_EQ(j["schema"], "momgraph.sweep_line/1");
        ++lines;
    }
    EXPECT_EQ(lines, 4);
    EXPECT_EQ(json::parse(slurp(path("sum.json")))["schema"], "momgraph.sweep_summary/1");
}
