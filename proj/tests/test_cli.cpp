#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <tgraph/cli.hpp>

#include "oracles.hpp"

using namespace tgraph;

namespace
{

struct Run
{
    int code = 0;
    std::string out, err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    Run r;
    r.code = cli::dispatch(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string temp_file(const std::string& name, const std::string& text)
{
    auto p = std::filesystem::temp_directory_path() / ("tgraph_cli_" + name);
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

} // namespace

TEST(Cli, ExitCodes)
{
    auto ok = run({"graph", "validate", oracle::fixture("fibonacci")});
    EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
    EXPECT_TRUE(contains(ok.out, "result: PASS"));
    EXPECT_TRUE(contains(ok.err, "wall time"));
    EXPECT_FALSE(contains(ok.out, "wall time"));

    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"graph", "paths", oracle::fixture("fibonacci")}).code, 2);
    EXPECT_EQ(run({"graph", "validate", "/nonexistent/graph.json"}).code, 2);
    EXPECT_EQ(run({"graph", "--help"}).code, 0);
}

TEST(Cli, MalformedJsonReportsLocation)
{
    auto bad = temp_file("bad.json", "{\n  \"kind\": \"finite\",\n  \"vertices\": [\"a\",,]\n}\n");
    auto r = run({"graph", "validate", bad});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(contains(r.err, "line 3")) << r.err;
    EXPECT_TRUE(contains(r.err, "column")) << r.err;

    auto missing = temp_file("missing.json", R"({"kind": "finite", "vertices": ["a"]})");
    r = run({"graph", "validate", missing});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(contains(r.err, "edges")) << r.err;

    auto badedge = temp_file("badedge.json", R"({"kind": "finite", "vertices": ["a"], "edges": [{"id": "e", "src": "a", "rng": "zz"}]})");
    r = run({"graph", "validate", badedge});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(contains(r.err, "edges/0")) << r.err;
}

TEST(Cli, KmsBelowCriticalBeta)
{
    // log rho for the Fibonacci graph is about 0.481
    auto r = run({"kms", "eval", oracle::fixture("fibonacci"), "--beta", "0.4", "--word", "\"p_E\""});
    EXPECT_EQ(r.code, 1) << r.out << r.err;
    EXPECT_TRUE(contains(r.out, "[FAIL] beta_above_critical"));

    r = run({"kms", "eval", oracle::fixture("fibonacci"), "--beta", "2", "--word", "\"p_E\""});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_TRUE(contains(r.out, "value: "));
}

TEST(Cli, DeterministicOutput)
{
    std::vector<std::string> args{"fock", "reconstruct-check", oracle::fixture("ten_edge"), "--trials", "5", "--seed", "9"};
    auto a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_EQ(a.out, b.out);
    EXPECT_TRUE(contains(a.out, "seed: 9"));
    auto c = run({"fock", "reconstruct-check", oracle::fixture("ten_edge"), "--trials", "5", "--seed", "10"});
    EXPECT_EQ(c.code, 0);
}

TEST(Cli, CommandTableIsReachable)
{
    EXPECT_GE(cli::command_table().size(), 20u);
    for(const auto& c : cli::command_table())
    {
        std::vector<std::string> args;
        std::istringstream s(c.path);
        for(std::string w; s >> w;) args.push_back(w);
        args.push_back("--help");
        auto r = run(args);
        EXPECT_EQ(r.code, 0) << c.path;
        EXPECT_FALSE(c.operations.empty());
    }
}

TEST(Cli, JsonAndCsvReports)
{
    auto js = (std::filesystem::temp_directory_path() / "tgraph_cli_report.json").string();
    auto r = run({"bundle", "monodromy", oracle::fixture("swap_cocycle"), "--json", js});
    EXPECT_EQ(r.code, 0) << r.out;
    auto j = io::json::parse(slurp(js));
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["values"]["rank"], "2");
    EXPECT_EQ(j["values"]["permutation_trivial"], "no");
    EXPECT_FALSE(j["checks"].empty());
    EXPECT_EQ(j["inputs_digest"].get<std::string>().size(), 16u);

    auto csv = (std::filesystem::temp_directory_path() / "tgraph_cli_sweep.csv").string();
    r = run({"kms", "sweep", oracle::fixture("fibonacci"), "--betas", "1:4:1", "--csv", csv});
    EXPECT_EQ(r.code, 0) << r.out;
    auto text = slurp(csv);
    EXPECT_EQ(text.substr(0, text.find('\n')), "beta,word-id,value,residual");
    EXPECT_GT(std::count(text.begin(), text.end(), '\n'), 4);

    r = run({"kms", "sweep", oracle::fixture("fibonacci"), "--betas", "0.3:2:1"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, VerdictsAreNotFailures)
{
    auto r = run({"iso", "check", oracle::fixture("s5_E"), oracle::fixture("s5_F")});
    EXPECT_EQ(r.code, 2); // finite graphs only
    r = run({"iso", "check", oracle::fixture("fibonacci"), oracle::fixture("k_loop")});
    EXPECT_EQ(r.code, 0) << r.out;
    r = run({"iso", "check", oracle::fixture("ten_edge"), oracle::fixture("ten_edge")});
    EXPECT_EQ(r.code, 0) << r.out;
    r = run({"bundle", "frame", oracle::fixture("three_cycle_cocycle"), "--grid", "9"});
    EXPECT_EQ(r.code, 2);
    r = run({"bundle", "frame", oracle::fixture("three_cycle_cocycle")});
    EXPECT_EQ(r.code, 0) << r.out;
}
