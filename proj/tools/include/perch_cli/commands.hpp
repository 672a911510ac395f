#pragma once

#include "perch/optimizer.hpp"
#include "perch/scenario.hpp"
#include "perch/validator.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace perch::cli
{
    enum ExitCode : int
    {
        kExitOk = 0,
        kExitParseError = 2,
        kExitSolverFailure = 3,
        kExitValidationFailure = 4,
    };

    /// Bad input that is not a scenario file: a trace, a sweep parameter, an environment value.
    class InputError : public std::runtime_error
    {
    public:
        explicit InputError(const std::string &what) : std::runtime_error(what) {}
    };

    /// Solver overrides read from PERCH_MAX_ITERATIONS, PERCH_GRADIENT_TOLERANCE,
    /// PERCH_STAGNATION_TOLERANCE and PERCH_HISTORY_SIZE. Throws InputError on bad values.
    void apply_env_overrides(SolverConfig &config);

    /// Loads a scenario and applies the environment overrides.
    Scenario load_for_cli(const std::string &path);

    // Trace files

    const std::vector<std::string> &trace_header();

    struct TraceRow
    {
        validator::TraceSample sample;
        double thrust = 0.0;
        double bodyrate = 0.0;
        Vec3 zb = Vec3::UnitZ();
        double f1 = 0.0;
        double distance = 0.0;
    };

    /// Endpoint-inclusive samples with a constant step no longer than 1 / rate_hz.
    std::vector<TraceRow> sample_trace(const PlanResult &plan, const Scenario &scenario, double rate_hz);
    void write_trace(std::ostream &out, const std::vector<TraceRow> &rows);

    /// Checks the header, time ordering and constant step. Throws InputError.
    std::vector<validator::TraceSample> read_trace(std::istream &in);

    nlohmann::json report_to_json(const validator::ConstraintReport &report);
    nlohmann::json plan_to_json(const PlanResult &plan, const Scenario &scenario,
                                const validator::ConstraintReport &report);

    // Sweep

    inline const std::vector<std::string> kSweepParameters = {"landing_height", "slope", "v_n_bar"};

    /// Throws InputError for names outside kSweepParameters.
    void apply_parameter(Scenario &scenario, const std::string &name, double value);

    struct SweepRow
    {
        double value = 0.0;
        double vt_norm = 0.0;
        double duration = 0.0;
        double min_altitude = 0.0;
        double cost = 0.0;
        double wall_ms = 0.0;
        std::string status; // solve status, or "error"
        bool pass = false;
        std::string error;
    };

    std::vector<SweepRow> run_sweep(const Scenario &base, const std::string &name, const std::vector<double> &values);
    void write_sweep(std::ostream &out, const std::vector<SweepRow> &rows);

    // Bench

    struct TimingStats
    {
        std::vector<double> samples;
        double mean = 0.0;
        double median = 0.0;
        double p95 = 0.0;
    };

    TimingStats timing_stats(std::vector<double> samples);

    struct BenchResult
    {
        TimingStats cold_ms;
        TimingStats warm_ms;
        TimingStats cold_iterations;
        TimingStats warm_iterations;
        int cold_failures = 0;
        int warm_failures = 0;
        double elapsed = 0.0;
    };

    /// Each repeat runs a cold solve, advances elapsed seconds and replans warm.
    BenchResult run_bench(const Scenario &scenario, int repeats, double elapsed);
    nlohmann::json bench_to_json(const BenchResult &result);

    // Commands. Diagnostics go to err, results to out.

    int cmd_plan(const std::string &scenario_path, const std::string &out_dir, double rate_hz,
                 std::ostream &out, std::ostream &err);
    int cmd_sweep(const std::string &scenario_path, const std::string &parameter,
                  const std::vector<double> &values, const std::string &csv_path,
                  std::ostream &out, std::ostream &err);
    int cmd_bench(const std::string &scenario_path, int repeats, double elapsed,
                  std::ostream &out, std::ostream &err);
    int cmd_validate(const std::string &trace_path, const std::string &scenario_path,
                     std::ostream &out, std::ostream &err);

    /// Full argument parsing and dispatch, as used by main.
    int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace perch::cli
