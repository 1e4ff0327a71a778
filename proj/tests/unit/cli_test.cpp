#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "torusflow/cli.hpp"
#include "torusflow/io.hpp"

using namespace torusflow;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "torusflow");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("torusflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        const auto path = dir_ / name;
        std::ofstream(path) << text;
        return path.string();
    }

    std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, SolvePentagon) {
    const auto r = run({"solve", "--case", "pentagon", "--gamma", "1.4"});
    ASSERT_EQ(r.code, cli::kFound) << r.err;
    const auto doc = Json::parse(r.out);
    EXPECT_EQ(doc.at("count"), 3);
    EXPECT_EQ(doc.at("solutions")[0].at("u"), Json::parse("[-1]"));
}

TEST_F(CliTest, MalformedJsonIsAnInputError) {
    const auto path = write("bad.json", "{\"graph\": ");
    EXPECT_EQ(run({"solve", path}).code, cli::kInputError);
    EXPECT_EQ(run({"solve"}).code, cli::kInputError);
    EXPECT_EQ(run({"solve", "--case", "nowhere"}).code, cli::kInputError);
    EXPECT_EQ(run({"solve", "--case", "pentagon", "--gamma", "4"}).code, cli::kInputError);
    EXPECT_EQ(run({"solve", "--case", "pentagon", "--jobs", "0"}).code, cli::kInputError);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kInputError);
}

TEST_F(CliTest, OverloadedProblemHasNoSolution) {
    const auto path = write("heavy.json", R"({"graph": {"n": 3, "edges": [[0, 1], [1, 2], [2, 0]]},
        "flow": {"family": "sin"}, "p": [1.5, -0.75, -0.75], "gamma": 0.1})");
    const auto r = run({"solve", path});
    EXPECT_EQ(r.code, cli::kNoSolution);
    EXPECT_EQ(Json::parse(r.out).at("count"), 0);
}

TEST_F(CliTest, CheckRoundTripAndTampering) {
    const auto report = (dir_ / "sol.json").string();
    const auto problem = write("problem.json", R"({"graph": {"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]},
        "flow": {"family": "sin"}, "p": [0.1, -0.1, 0, 0, 0], "gamma": 1.4})");
    ASSERT_EQ(run({"solve", problem, "--out", report}).code, cli::kFound);
    const auto ok = run({"check", problem, "--solutions", report});
    EXPECT_EQ(ok.code, cli::kFound) << ok.out << ok.err;

    auto doc = read_json_file(report);
    doc["solutions"][1]["f"][0] = doc["solutions"][1]["f"][0].get<double>() + 1e-4;
    const auto flow = write("flow.json", doc.dump());
    const auto bad_flow = run({"check", problem, "--solutions", flow});
    EXPECT_EQ(bad_flow.code, cli::kVerificationFailure);
    EXPECT_NE(bad_flow.out.find("physics"), std::string::npos);

    doc = read_json_file(report);
    ASSERT_EQ(doc["solutions"][1]["u"], Json::parse("[1]"));
    doc["solutions"][1]["u"] = Json::parse("[0]");
    const auto wrong_u = write("u.json", doc.dump());
    const auto bad_u = run({"check", problem, "--solutions", wrong_u});
    EXPECT_EQ(bad_u.code, cli::kVerificationFailure);
    EXPECT_NE(bad_u.out.find("winding"), std::string::npos);
}

TEST_F(CliTest, WindingsAndBasis) {
    const auto w = run({"windings", "--case", "ring12-sym"});
    ASSERT_EQ(w.code, cli::kFound) << w.err;
    EXPECT_EQ(Json::parse(w.out).at("candidates"), 5);

    const auto tree = write("tree.json", R"({"graph": {"n": 3, "edges": [[0, 1], [1, 2]]}, "gamma": 1.0})");
    const auto t = run({"windings", tree});
    EXPECT_EQ(t.code, cli::kFound);
    EXPECT_NE(t.out.find("acyclic: unique-solution regime"), std::string::npos);

    const auto b = run({"basis", "--case", "expo(2)", "--basis", "minimum"});
    ASSERT_EQ(b.code, cli::kFound) << b.err;
    EXPECT_EQ(Json::parse(b.out).at("cycles").size(), 2U);
    EXPECT_EQ(run({"basis", "--case", "pentagon", "--basis", "custom"}).code, cli::kInputError);
}

TEST_F(CliTest, SolveCsv) {
    const auto r = run({"solve", "--case", "pentagon", "--gamma", "1.4", "--format", "csv"});
    ASSERT_EQ(r.code, cli::kFound);
    EXPECT_EQ(r.out.rfind("u_0,f_0", 0), 0U);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

TEST_F(CliTest, SweepCsv) {
    const auto r = run({"sweep", "--case", "ring12-asym", "--tol", "1e-4", "--samples", "2"});
    ASSERT_EQ(r.code, cli::kFound) << r.err;
    EXPECT_EQ(r.out.rfind("u_0,ptc", 0), 0U);
}

TEST_F(CliTest, DecomposeAndGen) {
    const auto report = (dir_ / "sol.json").string();
    ASSERT_EQ(run({"solve", "--case", "pentagon", "--gamma", "1.4", "--out", report}).code, cli::kFound);
    const auto d = run({"decompose", "--case", "pentagon", "--gamma", "1.4", "--solutions", report});
    EXPECT_EQ(d.code, cli::kFound) << d.err;

    const auto g = run({"gen", "--family", "grid", "--size", "3", "--seed", "5"});
    ASSERT_EQ(g.code, cli::kFound) << g.err;
    const auto problem = problem_from_json(Json::parse(g.out));
    EXPECT_EQ(problem.graph().node_count(), 9);
    EXPECT_EQ(run({"gen", "--family", "grid", "--size", "3", "--seed", "5"}).out, g.out);

    const auto c = run({"gen", "--case", "ring12-sym"});
    ASSERT_EQ(c.code, cli::kFound);
    EXPECT_EQ(case_from_json(Json::parse(c.out)).buses.size(), 12U);
}

TEST_F(CliTest, ElasticInput) {
    const auto path = write("elastic.json", R"({"graph": {"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]},
        "energy": {"family": "spacing"}, "tau": [0, 0, 0, 0, 0], "gamma": 1.4})");
    const auto r = run({"solve", path});
    ASSERT_EQ(r.code, cli::kFound) << r.err;
    EXPECT_EQ(Json::parse(r.out).at("count"), 3);
}
