#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

// Runs a command line, capturing stdout and stderr together.
Result run(const std::string& cmd) {
    Result r;
    const fs::path log = fs::temp_directory_path() / ("cp_cli_" + std::to_string(::getpid()) + ".log");
    const int status = std::system((cmd + " >" + log.string() + " 2>&1").c_str());
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    fs::remove(log);
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("cp_cli_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::string bin = CYCLE_PATROL_BIN;
const std::string mutant = CYCLE_PATROL_MUTANT_BIN;
const std::string samples = SAMPLES_DIR;

}  // namespace

TEST(Cli, TourSquareNearestNeighbour) {
    auto dir = scratch("tour");
    write(dir / "tasks.json",
          R"({"tasks":[{"id":1,"x":0,"y":0},{"id":2,"x":10,"y":0},{"id":3,"x":10,"y":10},{"id":4,"x":0,"y":10}]})");
    auto r = run(bin + " tour " + (dir / "tasks.json").string() + " --method nn -o " + (dir / "g.json").string());
    ASSERT_EQ(r.code, 0) << r.out;
    auto j = nlohmann::json::parse(slurp(dir / "g.json"));
    EXPECT_DOUBLE_EQ(j["total_length"].get<double>(), 40.0);
    EXPECT_EQ(j["waypoints"].size(), 4u);
    fs::remove_all(dir);
}

TEST(Cli, TourSingleTaskWarns) {
    auto dir = scratch("tour1");
    write(dir / "tasks.json", R"({"tasks":[{"id":1,"x":3,"y":4}]})");
    auto r = run(bin + " tour " + (dir / "tasks.json").string());
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("warning"), std::string::npos);
    EXPECT_NE(r.out.find("\"total_length\": 0.0"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, TourMissingFileIsUsageError) {
    auto r = run(bin + " tour /nonexistent/tasks.json");
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, SimulateFourRobotFleet) {
    auto dir = scratch("sim");
    auto r = run(bin + " simulate " + samples + "/four_robots.json --until 1000000 -o " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("t_star 250.000000000"), std::string::npos);
    EXPECT_NE(r.out.find("balanced revisiting time: PASS"), std::string::npos);
    auto rep = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_DOUBLE_EQ(rep["t_star"].get<double>(), 250.0);
    EXPECT_DOUBLE_EQ(rep["predicted_revisit_time"].get<double>(), 500.0);
    const auto trace = slurp(dir / "trace.csv");
    EXPECT_EQ(trace.substr(0, trace.find('\n')), "time,kind,robot_a,robot_b,boundary_index,y_value,e_a,e_b");
    EXPECT_TRUE(fs::exists(dir / "plot.csv"));
    EXPECT_TRUE(fs::exists(dir / "rounds.csv"));
    EXPECT_EQ(slurp(dir / "rounds.csv").substr(0, 45), "round,meetings,n_bal,interlaced,max_event_off");
    EXPECT_TRUE(fs::exists(dir / "words.csv"));
    fs::remove_all(dir);
}

TEST(Cli, SimulateRejectsUniformOrientation) {
    auto dir = scratch("a2");
    write(dir / "fleet.json", R"({"L":100,"robots":[{"id":1,"v":1,"r":1,"p0":10,"o0":1},{"id":2,"v":1,"r":1,"p0":50,"o0":1}]})");
    auto r = run(bin + " simulate " + (dir / "fleet.json").string() + " --events 10 -o " + dir.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("A2 violated"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, SimulateRejectsStaticallyCoverableFleet) {
    auto dir = scratch("cov");
    write(dir / "fleet.json", R"({"L":100,"robots":[{"id":1,"v":1,"r":30},{"id":2,"v":1,"r":30}]})");
    auto r = run(bin + " simulate " + (dir / "fleet.json").string() + " --events 10 -o " + dir.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("statically coverable"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, SimulateSeededPlacementIsByteStable) {
    auto a = scratch("seed_a"), b = scratch("seed_b");
    const std::string args = " simulate " + samples + "/eight_robots.json --events 20000 --seed 42 -o ";
    ASSERT_EQ(run(bin + args + a.string()).code, 0);
    ASSERT_EQ(run(bin + args + b.string()).code, 0);
    for (const char* f : {"trace.csv", "report.json", "plot.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, SimulateParameterChangeScenario) {
    auto dir = scratch("change");
    auto r = run(bin + " simulate " + samples + "/parameter_change.json --until 400000 --seed 1 -o " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    auto rep = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_NEAR(rep["t_star"].get<double>(), 460.0 / 3.25, 1e-9);
    EXPECT_EQ(rep["theorems"][0]["verdict"], "PASS");
    fs::remove_all(dir);
}

TEST(Cli, BadArgumentsAreUsageErrors) {
    EXPECT_EQ(run(bin).code, 1);
    EXPECT_EQ(run(bin + " verify --suite nope").code, 1);
    EXPECT_EQ(run(bin + " simulate " + samples + "/four_robots.json --until 10 --events 5").code, 1);
    EXPECT_EQ(run(bin + " sweep").code, 1);
    EXPECT_EQ(run(bin + " --help").code, 0);
}

TEST(Cli, VerifyConsensusPasses) {
    auto dir = scratch("verify");
    auto r = run(bin + " verify --suite consensus -o " + (dir / "v.json").string());
    EXPECT_EQ(r.code, 0) << r.out;
    auto j = nlohmann::json::parse(slurp(dir / "v.json"));
    EXPECT_TRUE(j["suites"][0]["ok"].get<bool>());
    EXPECT_TRUE(j["spectrum_sample"]["ok"].get<bool>());
    fs::remove_all(dir);
}

TEST(Cli, VerifyCatchesMutatedBoundaryUpdate) {
    auto r = run(mutant + " verify --suite consensus");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.out.find("FAIL consensus"), std::string::npos);
}

TEST(Cli, SweepSinglePointGivesOneRow) {
    auto r = run(bin + " sweep --factor 2..2 --target radius");
    ASSERT_EQ(r.code, 0) << r.out;
    std::size_t rows = 0;
    for (char c : r.out) rows += c == '\n';
    EXPECT_EQ(rows, 2u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "sweep,n,factor,t_star,t_rev_predicted,t_rev_measured,relative_error");
}
