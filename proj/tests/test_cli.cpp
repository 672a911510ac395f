#include "perch_cli/commands.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace perch;

namespace
{
    class Cli : public ::testing::Test
    {
    protected:
        void SetUp() override
        {
            dir_ = fs::temp_directory_path() /
                   ("perch_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
            fs::remove_all(dir_);
            fs::create_directories(dir_);
        }

        void TearDown() override
        {
            fs::remove_all(dir_);
            for (const char *v : {"PERCH_MAX_ITERATIONS", "PERCH_GRADIENT_TOLERANCE", "PERCH_STAGNATION_TOLERANCE",
                                  "PERCH_HISTORY_SIZE"})
            {
                unsetenv(v);
            }
        }

        int run(std::vector<std::string> args)
        {
            args.insert(args.begin(), "perch");
            std::vector<const char *> argv;
            for (const std::string &a : args)
            {
                argv.push_back(a.c_str());
            }
            out_.str("");
            err_.str("");
            return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
        }

        std::string path(const std::string &name) const { return (dir_ / name).string(); }

        fs::path dir_;
        std::ostringstream out_, err_;
    };

    std::string read_file(const std::string &path)
    {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
} // namespace

TEST_F(Cli, PlanWritesTraceAndSummary)
{
    const std::string out = path("out");
    ASSERT_EQ(run({"plan", test::scenario_path("benchmark-rest2rest"), "-o", out}), cli::kExitOk) << err_.str();
    const auto summary = nlohmann::json::parse(read_file(out + "/summary.json"));
    EXPECT_EQ(summary["status"], "converged");
    EXPECT_TRUE(summary["report"]["pass"].get<bool>());

    std::ifstream trace(out + "/trace.csv");
    std::string header;
    std::getline(trace, header);
    EXPECT_EQ(header.rfind("t,px,py,pz,vx,vy,vz,ax,ay,az,jx,jy,jz", 0), 0u);
    trace.seekg(0);
    const auto samples = cli::read_trace(trace);
    ASSERT_GT(samples.size(), 10u);
    const double step = samples[1].t - samples[0].t;
    EXPECT_LE(step, 0.01 + 1e-12);
    for (std::size_t k = 1; k < samples.size(); ++k)
    {
        EXPECT_NEAR(samples[k].t - samples[k - 1].t, step, 1e-9);
    }
    EXPECT_NEAR(samples.back().t, summary["duration"].get<double>(), 1e-12);
    EXPECT_LT((samples.back().p - Vec3(4.0, 0, 4.25)).norm(), 1e-6);

    EXPECT_EQ(run({"validate", out + "/trace.csv", test::scenario_path("benchmark-rest2rest")}), cli::kExitOk)
        << out_.str();
}

TEST_F(Cli, MalformedScenarioIsParseErrorWithNoOutput)
{
    const std::string bad = path("bad.yaml");
    std::ofstream(bad) << "name: broken\nlimits: {v_max: [\n";
    const std::string out = path("out");
    EXPECT_EQ(run({"plan", bad, "-o", out}), cli::kExitParseError);
    EXPECT_FALSE(fs::exists(out));

    const std::string unknown = path("unknown.yaml");
    std::ofstream(unknown) << read_file(test::scenario_path("static-45deg")) << "bogus: 1\n";
    EXPECT_EQ(run({"plan", unknown, "-o", out}), cli::kExitParseError);
    EXPECT_FALSE(fs::exists(out));
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run({}), cli::kExitParseError);
    EXPECT_EQ(run({"frobnicate"}), cli::kExitParseError);
    EXPECT_EQ(run({"sweep", test::scenario_path("height-sweep"), "--param", "mass", "--values", "1"}),
              cli::kExitParseError);
    EXPECT_EQ(run({"bench", test::scenario_path("static-45deg"), "--repeats", "0"}), cli::kExitParseError);
    EXPECT_EQ(run({"--help"}), cli::kExitOk);
}

TEST_F(Cli, SolverFailureExitCode)
{
    setenv("PERCH_MAX_ITERATIONS", "2", 1);
    EXPECT_EQ(run({"plan", test::scenario_path("static-45deg"), "-o", path("out")}), cli::kExitSolverFailure);
}

TEST_F(Cli, BadEnvironmentValueIsParseError)
{
    setenv("PERCH_GRADIENT_TOLERANCE", "tight", 1);
    EXPECT_EQ(run({"plan", test::scenario_path("static-45deg"), "-o", path("out")}), cli::kExitParseError);
    setenv("PERCH_GRADIENT_TOLERANCE", "-1", 1);
    EXPECT_EQ(run({"plan", test::scenario_path("static-45deg"), "-o", path("out")}), cli::kExitParseError);
}

TEST_F(Cli, EnvironmentOverridesSolverConfig)
{
    setenv("PERCH_MAX_ITERATIONS", "17", 1);
    setenv("PERCH_HISTORY_SIZE", "4", 1);
    setenv("PERCH_STAGNATION_TOLERANCE", "1e-9", 1);
    const Scenario s = cli::load_for_cli(test::scenario_path("static-45deg"));
    EXPECT_EQ(s.solver.max_iterations, 17);
    EXPECT_EQ(s.solver.history_size, 4);
    EXPECT_EQ(s.solver.stagnation_tolerance, 1e-9);
}

TEST_F(Cli, TamperedTraceFailsValidation)
{
    const std::string out = path("out");
    ASSERT_EQ(run({"plan", test::scenario_path("static-45deg"), "-o", out}), cli::kExitOk);
    std::ifstream in(out + "/trace.csv");
    auto samples = cli::read_trace(in);

    // Shift the last position well off the landing point and write it back.
    std::vector<cli::TraceRow> rows;
    for (const auto &s : samples)
    {
        rows.push_back({s});
    }
    rows.back().sample.p.z() += 0.05;
    {
        std::ofstream fix(path("tampered.csv"));
        cli::write_trace(fix, rows);
    }
    EXPECT_EQ(run({"validate", path("tampered.csv"), test::scenario_path("static-45deg")}),
              cli::kExitValidationFailure);

    std::ofstream(path("garbage.csv")) << "t,x\n0,1\n";
    EXPECT_EQ(run({"validate", path("garbage.csv"), test::scenario_path("static-45deg")}), cli::kExitParseError);
}

TEST_F(Cli, SingleValueSweepMatchesPlan)
{
    const std::string scenario = test::scenario_path("height-sweep");
    ASSERT_EQ(run({"sweep", scenario, "--param", "landing_height", "--values", "1.5"}), cli::kExitOk) << err_.str();
    std::istringstream csv(out_.str());
    std::string header, line;
    std::getline(csv, header);
    std::getline(csv, line);
    EXPECT_EQ(header, "value,vt_norm,duration,min_altitude,cost,wall_ms,status,pass");

    ASSERT_EQ(run({"plan", scenario, "-o", path("out")}), cli::kExitOk);
    const auto summary = nlohmann::json::parse(read_file(path("out") + "/summary.json"));
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');)
    {
        cells.push_back(c);
    }
    ASSERT_EQ(cells.size(), 8u);
    EXPECT_NEAR(std::stod(cells[2]), summary["duration"].get<double>(), 1e-9);
    EXPECT_NEAR(std::stod(cells[4]), summary["cost"].get<double>(), 1e-6 * summary["cost"].get<double>());
    EXPECT_EQ(cells[6], "converged");
}

TEST_F(Cli, BenchSingleRepeatPrintsOneSample)
{
    ASSERT_EQ(run({"bench", test::scenario_path("static-45deg"), "--repeats", "1"}), cli::kExitOk);
    const auto j = nlohmann::json::parse(out_.str());
    EXPECT_TRUE(j["cold_ms"].contains("sample"));
    EXPECT_FALSE(j["cold_ms"].contains("median"));

    ASSERT_EQ(run({"bench", test::scenario_path("static-45deg"), "--repeats", "3"}), cli::kExitOk);
    const auto k = nlohmann::json::parse(out_.str());
    EXPECT_TRUE(k["cold_ms"].contains("median"));
    EXPECT_TRUE(k["cold_ms"].contains("p95"));
}

TEST(TimingStats, NearestRankPercentile)
{
    const cli::TimingStats s = cli::timing_stats({5, 1, 4, 2, 3});
    EXPECT_DOUBLE_EQ(s.mean, 3.0);
    EXPECT_DOUBLE_EQ(s.median, 3.0);
    EXPECT_DOUBLE_EQ(s.p95, 5.0);
    EXPECT_DOUBLE_EQ(cli::timing_stats({1, 2, 3, 4}).median, 2.5);
}
