#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "report.hpp"

using nlohmann::json;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args) {
    CliRun r;
    std::string cmd = std::string(BQDIM_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

json run_json(const std::string& args) {
    CliRun r = run(args);
    EXPECT_EQ(r.code, 0) << args;
    json j = json::parse(r.out);
    EXPECT_EQ(j.at("schema"), "bqdim/1");
    return j;
}

} // namespace

TEST(CliWeyl, NormalForm) {
    json j = run_json("weyl normal-form --n 3 --word 1,2,3,2,1");
    EXPECT_EQ(j["length"], 5);
    EXPECT_EQ(j["normal_form"][0]["eps"], 0);
    EXPECT_EQ(j["normal_form"][1]["eps"], 0);
    EXPECT_EQ(j["normal_form"][2]["eps"], 2);
    EXPECT_EQ(j["normal_form"][2]["k"], 1);
}

TEST(CliWeyl, DimsLongestDecompose) {
    EXPECT_EQ(run_json("weyl dims --n 2 --m 2")["quotient_dim"], 7);
    EXPECT_EQ(run_json("weyl longest --n 2")["length"], 4);
    json d = run_json("weyl decompose --n 2 --word 2,1,2 --subset 2");
    EXPECT_EQ(d["left"]["word"], json::array({2}));
    EXPECT_EQ(d["right"]["word"], json::array({1, 2}));
}

TEST(CliWeyl, MalformedInputIsUsageError) {
    EXPECT_EQ(run("weyl normal-form --n 2 --word 1,x").code, 2);
    EXPECT_EQ(run("weyl normal-form --n 2 --word 3").code, 2);
    EXPECT_EQ(run("weyl dims --n 2 --m 5").code, 2);
    EXPECT_EQ(run("weyl").code, 2);
    EXPECT_EQ(run("--q 1.5 weyl longest --n 2").code, 2);
}

TEST(CliRep, VerifyOrthogonality) {
    json j = run_json("rep verify --n 2 --word 1,2,1,2");
    EXPECT_TRUE(j["orthogonality"]["pass"]);
    EXPECT_LT(j["orthogonality"]["max_deviation"].get<double>(), 1e-8);
}

TEST(CliRep, VerifyReducedWordPair) {
    json j = run_json("rep verify --n 3 --word 1,2,1 --word2 2,1,2");
    EXPECT_TRUE(j["braid"]["vacuum_state_equal"]);
    EXPECT_LT(j["braid"]["vacuum_state_deviation"].get<double>(), 1e-8);
    EXPECT_TRUE(j["braid"].contains("entrywise_equal"));
    EXPECT_EQ(run("rep verify --n 3 --word 1,2 --word2 2,1").code, 2);
}

TEST(CliRep, TorusPointValidation) {
    EXPECT_EQ(run("rep verify --n 1 --word 1 --t 0.6,0.8").code, 0);
    EXPECT_EQ(run("rep verify --n 1 --word 1 --t 2,0").code, 2);
}

TEST(CliRep, Entry) {
    json j = run_json("rep entry --n 3 --word 1,2,3,2,1 --k 4 --l 4");
    EXPECT_EQ(j["summands"], 2);
    EXPECT_NE(j["operator"].get<std::string>().find("q^{2N}"), std::string::npos);
}

TEST(CliDiagram, Paths) {
    EXPECT_EQ(run_json("diagram paths --n 3 --word 1,2,3,2,1 --from 1 --to 3")["count"], 2);
    EXPECT_EQ(run_json("diagram paths --n 3 --word 1,2,3,2,1 --from 1 --to 7")["count"], 1);
    EXPECT_EQ(run("diagram paths --n 3 --word 1,2 --from 1 --to 9").code, 2);
}

TEST(CliDiagram, Dot) {
    CliRun r = run("diagram dot --n 3 --word 1,2,3,2,1");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("digraph bqdim {", 0), 0u);
    for (int c = 0; c <= 5; ++c) EXPECT_NE(r.out.find("subgraph col" + std::to_string(c) + " "), std::string::npos);
    EXPECT_EQ(r.out.find("subgraph col6 "), std::string::npos);
}

TEST(CliGkdim, ModuleSingleReflection) {
    json j = run_json("gkdim module --n 2 --word 1 --rmax 8");
    EXPECT_EQ(j["target"], 1);
    EXPECT_TRUE(j["pass"]);
    EXPECT_EQ(j["series"].size(), 9u);
}

TEST(CliGkdim, ModuleLongestCsv) {
    CliRun r = run("gkdim module --n 2 --word 1,2,1,2 --rmax 6 --csv -");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "r,d,lower,upper");
    EXPECT_NE(r.out.find("\n6,924,84,28561\n"), std::string::npos);
    json j = run_json("gkdim module --n 2 --word 1,2,1,2 --rmax 6");
    EXPECT_EQ(j["target"], 4);
    EXPECT_TRUE(j["pass"]);
}

TEST(CliGkdim, TruncationExitCode) {
    EXPECT_EQ(run("--basis-cap 20 gkdim module --n 2 --word 1,2,1,2 --rmax 6").code, 3);
}

TEST(CliGkdim, HomogeneousRankOne) {
    json j = run_json("gkdim homogeneous --n 1 --m 1 --rmax 5");
    EXPECT_EQ(j["target"], 3);
    EXPECT_TRUE(j["pass"]);
    EXPECT_TRUE(j["stabilized"]);
}

TEST(CliGkdim, ThreadsDoNotChangeOutput) {
    CliRun a = run("--threads 1 gkdim module --n 2 --word 2,1,2 --rmax 5");
    CliRun b = run("--threads 4 gkdim module --n 2 --word 2,1,2 --rmax 5");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    CliRun c = run("--threads 4 gkdim module --n 2 --word 2,1,2 --rmax 5 --csv -");
    CliRun d = run("--threads 1 gkdim module --n 2 --word 2,1,2 --rmax 5 --csv -");
    EXPECT_EQ(c.out, d.out);
}

TEST(Report, ModuleCsvRows) {
    bqdim::GrowthOptions o;
    o.r_max = 3;
    bqdim::RepSpec spec{2, {}, {1, 2}};
    std::string csv = bqdim::report::module_csv(bqdim::module_certificate(spec, o));
    EXPECT_EQ(csv, "r,d,lower,upper\n0,1,1,1\n1,4,2,9\n2,9,3,25\n3,16,4,49\n");
}
