// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

// Runs the fgp binary and checks its exit codes and outputs.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string scenario(const std::string& name) { return std::string(FGP_SCENARIO_DIR) + "/" + name + ".json"; }

int fgp(const std::string& args) {
    const std::string cmd = std::string(FGP_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("fgp_cli_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("simulate and analyze succeed") {
    TempDir dir;
    const auto trace = (dir.path / "m.trace").string();
    const auto csv = (dir.path / "m.csv").string();
    CHECK(fgp("simulate -s " + scenario("minimal") + " -o " + trace) == 0);
    CHECK(fgp("analyze -t " + trace + " --segment phase --jobs -o " + csv) == 0);
    const auto text = slurp(csv);
    CHECK(text.rfind("scope,window,sg_num,sg_den,sg,rg_num,rg_den,rg,pg_num,pg_den,pg,mpg,flags\n", 0) == 0);
    CHECK(text.find("\nfleet,0.000000:30.000000,") != std::string::npos);
    CHECK(text.find("\njob=train,") != std::string::npos);
    CHECK(fgp("analyze -t " + trace + " --legacy") == 0);
}

TEST_CASE("configuration errors exit 2") {
    TempDir dir;
    const auto bad = dir.path / "bad.json";
    std::ofstream(bad) << "{\"name\": \"x\"}";
    CHECK(fgp("simulate -s " + bad.string() + " -o " + (dir.path / "t").string()) == 2);
    CHECK(fgp("simulate") == 2);
    CHECK(fgp("frobnicate") == 2);
    const auto trace = (dir.path / "m.trace").string();
    REQUIRE(fgp("simulate -s " + scenario("minimal") + " -o " + trace) == 0);
    CHECK(fgp("analyze -t " + trace + " --window 9:1") == 2);
    CHECK(fgp("analyze -t " + trace + " --segment colour") == 2);
}

TEST_CASE("I/O errors exit 3") {
    CHECK(fgp("simulate -s /nonexistent/s.json -o /tmp/x") == 3);
    CHECK(fgp("analyze -t /nonexistent/t.trace") == 3);
    CHECK(fgp("simulate -s " + scenario("minimal") + " -o /nonexistent/dir/t.trace") == 3);
}

TEST_CASE("corrupt traces exit 4") {
    TempDir dir;
    const auto trace = dir.path / "m.trace";
    REQUIRE(fgp("simulate -s " + scenario("minimal") + " -o " + trace.string()) == 0);
    std::string text = slurp(trace);
    text.resize(text.size() / 2);
    std::ofstream(dir.path / "cut.trace") << text;
    CHECK(fgp("analyze -t " + (dir.path / "cut.trace").string()) == 4);
}

TEST_CASE("comparison gate exits 0 on match and 5 on mismatch") {
    TempDir dir;
    const auto a = (dir.path / "a.trace").string();
    const auto b = (dir.path / "b.trace").string();
    REQUIRE(fgp("simulate -s " + scenario("table2_device_bound_a") + " -o " + a) == 0);
    REQUIRE(fgp("simulate -s " + scenario("table2_device_bound_b") + " -o " + b) == 0);
    CHECK(fgp("compare -a " + a + " -b " + b + " --factor compiler") == 0);
    CHECK(fgp("compare -a " + b + " -b " + a + " --factor compiler") == 5);
    CHECK(fgp("compare -a " + a + " -b " + b + " --factor runtime") == 2);
}

TEST_CASE("sweep writes one run per value and a summary") {
    TempDir dir;
    const auto out = (dir.path / "sweep").string();
    CHECK(fgp("sweep -s " + scenario("checkpoint_economics") +
              " --param jobs[0].runtime.checkpoint_interval --values 5,20 -o " + out) == 0);
    CHECK(fs::exists(dir.path / "sweep" / "run_0.trace"));
    CHECK(fs::exists(dir.path / "sweep" / "run_1.csv"));
    CHECK(slurp(dir.path / "sweep" / "summary.csv").rfind("value,sg,rg,pg,mpg\n5,", 0) == 0);
    CHECK(fgp("sweep -s " + scenario("checkpoint_economics") + " --param jobs[0].nope --values 1 -o " + out) == 2);
    CHECK(fgp("sweep -s " + scenario("checkpoint_economics") +
              " --param jobs[0].runtime.checkpoint_interval --values \"\" -o " + out) == 2);
}
