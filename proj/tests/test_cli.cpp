#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <tlt/cli.hpp>

#include "fixtures.hpp"

using namespace tlt;
using fixtures::data_path;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::vector<json> lines(const std::string& text) {
    std::vector<json> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (!l.empty()) v.push_back(json::parse(l));
    return v;
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / ("tlt_cli_" + name)).string(); }

}  // namespace

TEST(Check, TrafficLightProved) {
    auto r = invoke({"check", "--system", data_path("traffic_light.json"), "--formula", "G F (g | b)"});
    ASSERT_EQ(r.code, cli::kExitProved) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["verdict"], "proved");
    EXPECT_EQ(j["proved_by"], json({"thm3(i)", "thm3(ii)"}));
}

TEST(Check, RefutedAndErrors) {
    EXPECT_EQ(invoke({"check", "--system", data_path("traffic_light.json"), "--formula", "G g"}).code, cli::kExitRefuted);
    auto bad = invoke({"check", "--system", data_path("traffic_light.json"), "--formula", "G (g"});
    EXPECT_EQ(bad.code, cli::kExitError);
    auto e = json::parse(bad.err);
    EXPECT_EQ(e["code"], "syntax-error");
    EXPECT_EQ(e["offset"], 4);
    EXPECT_EQ(invoke({"check", "--system", data_path("traffic_light.json"), "--formula", "G zz"}).code, cli::kExitError);
    EXPECT_EQ(invoke({"check", "--system", "/nonexistent.json", "--formula", "g"}).code, cli::kExitError);
    EXPECT_EQ(invoke({"check", "--system", data_path("example7.json"), "--formula", "o1"}).code, cli::kExitError);
    EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitError);
    EXPECT_EQ(invoke({"check", "--system", data_path("traffic_light.json")}).code, cli::kExitError);
}

TEST(Synth, TableOneTrace) {
    auto r = invoke({"synth", "--system", data_path("example7.json"), "--formula", "F G o2", "--resolver",
                  "scripted:" + data_path("table1_script.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto v = lines(r.out);
    ASSERT_EQ(v.size(), 10u);
    EXPECT_EQ(v[0]["type"], "header");
    std::vector<std::string> states{"s1", "s3", "s3", "s2", "s3", "s2", "s4", "s2"};
    std::vector<json> feasible{{"a1"}, {"a1", "a2"}, {"a1", "a2"}, {"a1", "a2"}, {"a1", "a2"}, {"a1", "a2"}, {"a1"}, {"a1", "a2"}};
    std::vector<std::string> chosen{"a1", "a2", "a1", "a1", "a1", "a2", "a1", "a2"};
    for (std::size_t k = 0; k < 8; ++k) {
        auto& s = v[k + 1];
        EXPECT_EQ(s["type"], "step");
        EXPECT_EQ(s["k"], k);
        EXPECT_EQ(s["state"], states[k]);
        EXPECT_EQ(s["feasible"], feasible[k]);
        EXPECT_EQ(s["chosen"], chosen[k]);
    }
    EXPECT_EQ(v[9]["type"], "end");
    EXPECT_EQ(v[9]["status"], "active");
    EXPECT_EQ(v[9]["state"], "s4");
}

TEST(Synth, DeadlockAtStart) {
    auto r = invoke({"synth", "--system", data_path("example7.json"), "--formula", "G o1"});
    EXPECT_EQ(r.code, cli::kExitDeadlock);
    auto v = lines(r.out);
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[1]["status"], "deadlock");
    EXPECT_EQ(v[1]["k"], 0);
}

TEST(Synth, TraceReplaysUnderScript) {
    auto path = tmp("trace.jsonl");
    auto r = invoke({"synth", "--system", data_path("example7.json"), "--formula", "F G o2", "--seed", "9", "--steps", "12", "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto v = lines(buf.str());
    ASSERT_EQ(v.size(), 14u);
    json script = json::array();
    for (auto& l : v)
        if (l["type"] == "step") script.push_back({{"input", l["chosen"]}, {"next", l["next"]}});
    auto spath = tmp("script.json");
    std::ofstream(spath) << script.dump();
    auto replay = lines(invoke({"synth", "--system", data_path("example7.json"), "--formula", "F G o2", "--resolver", "scripted:" + spath}).out);
    ASSERT_EQ(replay.size(), v.size());
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_EQ(replay[i], v[i]) << i;
}

TEST(Synth, DoubleIntegratorStepsCarryGeometry) {
    auto r = invoke({"synth", "--system", data_path("double_integrator.json"), "--formula", "G !a2", "--steps", "3", "--x0", "c27_25"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto v = lines(r.out);
    ASSERT_EQ(v.size(), 5u);
    EXPECT_EQ(v[1]["x"].size(), 2u);
    EXPECT_EQ(v[1]["u"].size(), 1u);
    EXPECT_EQ(invoke({"synth", "--system", data_path("example7.json"), "--formula", "F G o2", "--x0", "s9"}).code, cli::kExitError);
}

TEST(Reach, TrafficLightOperators) {
    auto j = json::parse(invoke({"reach", "--system", data_path("traffic_light.json"), "--op", "min", "--to", "g | b"}).out);
    EXPECT_EQ(j["size"], 5);
    EXPECT_EQ(j["op"], "min");
    auto inv = json::parse(invoke({"reach", "--system", data_path("traffic_light.json"), "--op", "inv", "--set", "r | g"}).out);
    EXPECT_EQ(inv["size"], 0);
    auto ri = json::parse(invoke({"reach", "--system", data_path("traffic_light.json"), "--op", "ri", "--set", "S"}).out);
    EXPECT_EQ(ri["size"], 5);
    auto rc = json::parse(invoke({"reach", "--system", data_path("example7.json"), "--op", "rcis", "--set", "o2"}).out);
    EXPECT_EQ(rc["members"], json({"s2", "s4"}));
    EXPECT_EQ(invoke({"reach", "--system", data_path("traffic_light.json"), "--op", "min"}).code, cli::kExitError);
    EXPECT_EQ(invoke({"reach", "--system", data_path("traffic_light.json"), "--op", "ctrl", "--to", "g"}).code, cli::kExitError);
    EXPECT_EQ(invoke({"reach", "--system", data_path("traffic_light.json"), "--op", "min", "--to", "F g"}).code, cli::kExitError);
}

TEST(Tree, FlavorsDump) {
    auto j = json::parse(invoke({"tlt", "--system", data_path("traffic_light.json"), "--formula", "G F (g | b)"}).out);
    EXPECT_EQ(j["flavor"], "universal");
    EXPECT_EQ(j["nodes"].size(), 8u);
    auto c = json::parse(invoke({"tlt", "--system", data_path("example7.json"), "--formula", "F G o2", "--flavor", "controlled"}).out);
    EXPECT_EQ(c["nodes"].size(), 5u);
    EXPECT_EQ(c["nodes"][2]["members"], json({"s2", "s4"}));
    EXPECT_EQ(invoke({"tlt", "--system", data_path("example7.json"), "--formula", "o1"}).code, cli::kExitError);
}

TEST(Binary, ExitCodesThroughProcess) {
    auto status = [](const std::string& args) {
        int s = std::system((std::string(TLT_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(status("check --system " + data_path("traffic_light.json") + " --formula 'G F (g | b)'"), 0);
    EXPECT_EQ(status("check --system " + data_path("traffic_light.json") + " --formula 'G g'"), 1);
    EXPECT_EQ(status("synth --system " + data_path("example7.json") + " --formula 'G o1'"), 3);
    EXPECT_EQ(status("check --system " + data_path("traffic_light.json") + " --formula '('"), 64);
}
