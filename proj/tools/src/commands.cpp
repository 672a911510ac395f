#include "perch_cli/commands.hpp"

#include "perch/flatness.hpp"
#include "perch/penalties.hpp"
#include "perch/scenario_io.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace perch::cli
{
    namespace
    {
        double env_double(const char *name, double fallback)
        {
            const char *raw = std::getenv(name);
            if (raw == nullptr || *raw == '\0')
            {
                return fallback;
            }
            char *end = nullptr;
            errno = 0;
            const double v = std::strtod(raw, &end);
            if (errno != 0 || end == raw || *end != '\0' || !std::isfinite(v) || v <= 0.0)
            {
                throw InputError(std::string(name) + " must be a positive number, got '" + raw + "'");
            }
            return v;
        }

        int env_int(const char *name, int fallback)
        {
            const char *raw = std::getenv(name);
            if (raw == nullptr || *raw == '\0')
            {
                return fallback;
            }
            char *end = nullptr;
            errno = 0;
            const long v = std::strtol(raw, &end, 10);
            if (errno != 0 || end == raw || *end != '\0' || v < 1 || v > std::numeric_limits<int>::max())
            {
                throw InputError(std::string(name) + " must be a positive integer, got '" + raw + "'");
            }
            return static_cast<int>(v);
        }

        nlohmann::json vec_json(const Vec3 &v) { return {v.x(), v.y(), v.z()}; }

        nlohmann::json violation_json(const validator::Violation &v)
        {
            return {{"worst", v.worst}, {"time", v.time}};
        }

        std::string format_double(double v)
        {
            std::ostringstream s;
            s << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
            return s.str();
        }

        std::vector<std::string> split_csv_line(const std::string &line)
        {
            std::vector<std::string> cells;
            std::string cell;
            std::istringstream s(line);
            while (std::getline(s, cell, ','))
            {
                cells.push_back(cell);
            }
            if (!line.empty() && line.back() == ',')
            {
                cells.emplace_back();
            }
            return cells;
        }

        double parse_cell(const std::string &cell, std::size_t line)
        {
            char *end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
            {
                throw InputError("trace line " + std::to_string(line) + ": '" + cell + "' is not a number");
            }
            return v;
        }

        bool plan_ok(const PlanResult &plan) { return plan.status == SolveStatus::Converged; }
    } // namespace

    void apply_env_overrides(SolverConfig &config)
    {
        config.max_iterations = env_int("PERCH_MAX_ITERATIONS", config.max_iterations);
        config.gradient_tolerance = env_double("PERCH_GRADIENT_TOLERANCE", config.gradient_tolerance);
        config.stagnation_tolerance = env_double("PERCH_STAGNATION_TOLERANCE", config.stagnation_tolerance);
        config.history_size = env_int("PERCH_HISTORY_SIZE", config.history_size);
    }

    Scenario load_for_cli(const std::string &path)
    {
        Scenario s = load_scenario(path);
        apply_env_overrides(s.solver);
        return s;
    }

    const std::vector<std::string> &trace_header()
    {
        static const std::vector<std::string> header = {
            "t", "px", "py", "pz", "vx", "vy", "vz", "ax", "ay", "az", "jx", "jy", "jz",
            "thrust", "bodyrate", "zbx", "zby", "zbz", "f1", "dist"};
        return header;
    }

    std::vector<TraceRow> sample_trace(const PlanResult &plan, const Scenario &scenario, double rate_hz)
    {
        if (!(rate_hz > 0.0))
        {
            throw InputError("trace rate must be positive");
        }
        const double T = plan.duration;
        const int steps = std::max(1, static_cast<int>(std::ceil(T * rate_hz - 1e-9)));
        const double g_bar = scenario.geometry.g_bar;

        std::vector<TraceRow> rows;
        rows.reserve(static_cast<std::size_t>(steps) + 1);
        for (int k = 0; k <= steps; ++k)
        {
            const double t = k == steps ? T : T * k / steps;
            const FlatState x = plan.spline.eval(t, 4);
            TraceRow row;
            row.sample = {t, x.p, x.v, x.a, x.j};
            const Vec3 tau = flatness::net_thrust(x.a, g_bar);
            row.thrust = tau.norm();
            const PlatformState ps = scenario.platform.at(t);
            row.distance = (x.p - ps.position).norm();
            if (row.thrust > 0.0)
            {
                row.zb = tau / row.thrust;
                row.bodyrate = std::sqrt(flatness::body_rate_sq(tau, x.j).value);
                row.f1 = support_margin(x, ps, scenario.geometry).value;
            }
            else
            {
                row.zb = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());
                row.bodyrate = std::numeric_limits<double>::quiet_NaN();
                row.f1 = std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(row);
        }
        return rows;
    }

    void write_trace(std::ostream &out, const std::vector<TraceRow> &rows)
    {
        const auto &header = trace_header();
        for (std::size_t i = 0; i < header.size(); ++i)
        {
            out << (i ? "," : "") << header[i];
        }
        out << '\n';
        out << std::setprecision(std::numeric_limits<double>::max_digits10);
        for (const TraceRow &r : rows)
        {
            const validator::TraceSample &s = r.sample;
            out << s.t;
            for (const Vec3 *v : {&s.p, &s.v, &s.a, &s.j})
            {
                out << ',' << v->x() << ',' << v->y() << ',' << v->z();
            }
            out << ',' << r.thrust << ',' << r.bodyrate << ',' << r.zb.x() << ',' << r.zb.y() << ',' << r.zb.z()
                << ',' << r.f1 << ',' << r.distance << '\n';
        }
    }

    std::vector<validator::TraceSample> read_trace(std::istream &in)
    {
        const auto &header = trace_header();
        std::string line;
        if (!std::getline(in, line))
        {
            throw InputError("trace is empty");
        }
        if (!line.empty() && line.back() == '\r')
        {
            line.pop_back();
        }
        if (split_csv_line(line) != header)
        {
            throw InputError("trace header does not match the expected columns");
        }

        std::vector<validator::TraceSample> samples;
        std::size_t line_no = 1;
        while (std::getline(in, line))
        {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
            {
                line.pop_back();
            }
            if (line.empty())
            {
                continue;
            }
            const std::vector<std::string> cells = split_csv_line(line);
            if (cells.size() != header.size())
            {
                throw InputError("trace line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                 " columns, expected " + std::to_string(header.size()));
            }
            double v[13];
            for (int c = 0; c < 13; ++c)
            {
                v[c] = parse_cell(cells[static_cast<std::size_t>(c)], line_no);
                if (!std::isfinite(v[c]))
                {
                    throw InputError("trace line " + std::to_string(line_no) + " has a non-finite state");
                }
            }
            validator::TraceSample s;
            s.t = v[0];
            s.p = Vec3(v[1], v[2], v[3]);
            s.v = Vec3(v[4], v[5], v[6]);
            s.a = Vec3(v[7], v[8], v[9]);
            s.j = Vec3(v[10], v[11], v[12]);
            samples.push_back(s);
        }
        if (samples.size() < 2)
        {
            throw InputError("trace needs at least two samples");
        }

        const double step = samples[1].t - samples[0].t;
        if (!(step > 0.0))
        {
            throw InputError("trace times are not increasing");
        }
        for (std::size_t k = 1; k < samples.size(); ++k)
        {
            const double dt = samples[k].t - samples[k - 1].t;
            if (!(dt > 0.0))
            {
                throw InputError("trace times are not increasing at row " + std::to_string(k + 1));
            }
            if (std::abs(dt - step) > 1e-6 * step)
            {
                throw InputError("trace step is not constant at row " + std::to_string(k + 1));
            }
        }
        return samples;
    }

    nlohmann::json report_to_json(const validator::ConstraintReport &r)
    {
        return {
            {"pass", r.pass},
            {"slack", r.slack},
            {"terminal_tolerance", r.terminal_tolerance},
            {"samples", r.samples},
            {"duration", r.duration},
            {"violations",
             {{"velocity", violation_json(r.velocity)},
              {"bodyrate", violation_json(r.bodyrate)},
              {"thrust", violation_json(r.thrust)},
              {"ground", violation_json(r.ground)},
              {"collision", violation_json(r.collision)}}},
            {"max_speed", r.max_speed},
            {"max_bodyrate", r.max_bodyrate},
            {"min_thrust", r.min_thrust},
            {"max_thrust", r.max_thrust},
            {"min_altitude", r.min_altitude},
            {"min_altitude_time", r.min_altitude_time},
            {"terminal",
             {{"position_error", r.terminal_position_error},
              {"velocity_error", r.terminal_velocity_error},
              {"normal_speed", r.terminal_normal_speed},
              {"tangential_speed", r.terminal_tangential_speed},
              {"zb_angle_deg", r.terminal_zb_angle * 180.0 / std::numbers::pi},
              {"jerk", r.terminal_jerk}}},
        };
    }

    nlohmann::json plan_to_json(const PlanResult &plan, const Scenario &scenario,
                                const validator::ConstraintReport &report)
    {
        const FlatState end = plan.spline.eval(plan.duration, 3);
        const PenaltyIntegrals &pen = plan.parts.penalties;
        return {
            {"scenario", scenario.name},
            {"status", to_string(plan.status)},
            {"solver_status", lbfgs::to_string(plan.solver_status)},
            {"iterations", plan.iterations},
            {"evaluations", plan.evaluations},
            {"wall_time_ms", plan.wall_time_ms},
            {"duration", plan.duration},
            {"pieces", plan.spline.pieces()},
            {"cost", plan.cost},
            {"cost_breakdown",
             {{"energy", plan.parts.energy},
              {"time", plan.parts.time},
              {"regularizer", plan.parts.regularizer},
              {"thrust", pen.thrust},
              {"bodyrate", pen.bodyrate},
              {"velocity", pen.velocity},
              {"ground", pen.ground},
              {"collision", pen.collision}}},
            {"terminal",
             {{"v_t", {plan.terminal.v_t.x(), plan.terminal.v_t.y()}},
              {"v_t_norm", plan.terminal.v_t.norm()},
              {"tau_f", plan.terminal.tau_f},
              {"position", vec_json(end.p)},
              {"velocity", vec_json(end.v)},
              {"acceleration", vec_json(end.a)},
              {"platform_position", vec_json(scenario.platform.position(plan.duration))}}},
            {"report", report_to_json(report)},
        };
    }

    void apply_parameter(Scenario &scenario, const std::string &name, double value)
    {
        if (name == "landing_height")
        {
            scenario.platform.rho0.z() = value;
        }
        else if (name == "slope")
        {
            scenario.platform.spec.z_d = surface_normal_from_slope(value);
        }
        else if (name == "v_n_bar")
        {
            scenario.platform.spec.v_n_bar = value;
        }
        else
        {
            throw InputError("unknown sweep parameter '" + name + "' (expected landing_height, slope or v_n_bar)");
        }
    }

    std::vector<SweepRow> run_sweep(const Scenario &base, const std::string &name, const std::vector<double> &values)
    {
        {
            Scenario probe = base;
            apply_parameter(probe, name, 0.0);
        }
        std::vector<SweepRow> rows;
        rows.reserve(values.size());
        for (double value : values)
        {
            SweepRow row;
            row.value = value;
            try
            {
                Scenario s = base;
                apply_parameter(s, name, value);
                s.validate();
                const PlanResult plan = solve(s);
                const validator::ConstraintReport report = validator::check(plan, s);
                row.vt_norm = plan.terminal.v_t.norm();
                row.duration = plan.duration;
                row.min_altitude = report.min_altitude;
                row.cost = plan.cost;
                row.wall_ms = plan.wall_time_ms;
                row.status = to_string(plan.status);
                row.pass = plan_ok(plan) && report.pass;
            }
            catch (const std::exception &e)
            {
                row.status = "error";
                row.error = e.what();
                row.vt_norm = row.duration = row.min_altitude = row.cost = row.wall_ms =
                    std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(row);
        }
        return rows;
    }

    void write_sweep(std::ostream &out, const std::vector<SweepRow> &rows)
    {
        out << "value,vt_norm,duration,min_altitude,cost,wall_ms,status,pass\n";
        for (const SweepRow &r : rows)
        {
            out << format_double(r.value) << ',' << format_double(r.vt_norm) << ',' << format_double(r.duration) << ','
                << format_double(r.min_altitude) << ',' << format_double(r.cost) << ',' << format_double(r.wall_ms)
                << ',' << r.status << ',' << (r.pass ? 1 : 0) << '\n';
        }
    }

    TimingStats timing_stats(std::vector<double> samples)
    {
        TimingStats st;
        st.samples = samples;
        if (samples.empty())
        {
            return st;
        }
        std::sort(samples.begin(), samples.end());
        const std::size_t n = samples.size();
        st.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
        st.median = n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
        const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
        st.p95 = samples[std::max<std::size_t>(rank, 1) - 1];
        return st;
    }

    BenchResult run_bench(const Scenario &scenario, int repeats, double elapsed)
    {
        if (repeats < 1)
        {
            throw InputError("repeats must be at least 1");
        }
        std::vector<double> cold, warm, cold_it, warm_it;
        BenchResult result;
        result.elapsed = elapsed;
        for (int r = 0; r < repeats; ++r)
        {
            const PlanResult first = solve(scenario);
            cold.push_back(first.wall_time_ms);
            cold_it.push_back(first.iterations);
            result.cold_failures += plan_ok(first) ? 0 : 1;

            const Scenario next = advance(scenario, first, elapsed);
            const PlanResult second = replan(next, first, elapsed);
            warm.push_back(second.wall_time_ms);
            warm_it.push_back(second.iterations);
            result.warm_failures += plan_ok(second) ? 0 : 1;
        }
        result.cold_ms = timing_stats(cold);
        result.warm_ms = timing_stats(warm);
        result.cold_iterations = timing_stats(cold_it);
        result.warm_iterations = timing_stats(warm_it);
        return result;
    }

    nlohmann::json bench_to_json(const BenchResult &result)
    {
        auto stats = [](const TimingStats &s) {
            nlohmann::json j;
            if (s.samples.size() == 1)
            {
                j["sample"] = s.samples.front();
            }
            else
            {
                j["mean"] = s.mean;
                j["median"] = s.median;
                j["p95"] = s.p95;
            }
            return j;
        };
        return {
            {"repeats", result.cold_ms.samples.size()},
            {"elapsed", result.elapsed},
            {"cold_ms", stats(result.cold_ms)},
            {"warm_ms", stats(result.warm_ms)},
            {"cold_iterations", stats(result.cold_iterations)},
            {"warm_iterations", stats(result.warm_iterations)},
            {"cold_failures", result.cold_failures},
            {"warm_failures", result.warm_failures},
        };
    }

    int cmd_plan(const std::string &scenario_path, const std::string &out_dir, double rate_hz,
                 std::ostream &out, std::ostream &err)
    {
        Scenario scenario;
        try
        {
            scenario = load_for_cli(scenario_path);
            if (!(rate_hz > 0.0))
            {
                throw InputError("--rate must be positive");
            }
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return kExitParseError;
        }

        const PlanResult plan = solve(scenario);
        const validator::ConstraintReport report = validator::check(plan, scenario);
        const nlohmann::json summary = plan_to_json(plan, scenario, report);

        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        const std::filesystem::path dir(out_dir);
        {
            std::ofstream csv(dir / "trace.csv");
            std::ofstream json(dir / "summary.json");
            if (!csv || !json)
            {
                err << "error: cannot write to " << out_dir << '\n';
                return kExitParseError;
            }
            write_trace(csv, sample_trace(plan, scenario, rate_hz));
            json << summary.dump(2) << '\n';
        }
        out << summary.dump(2) << '\n';

        if (!plan_ok(plan))
        {
            err << "solver did not converge: " << to_string(plan.status) << '\n';
            return kExitSolverFailure;
        }
        if (!report.pass)
        {
            err << "plan failed validation\n";
            return kExitValidationFailure;
        }
        return kExitOk;
    }

    int cmd_sweep(const std::string &scenario_path, const std::string &parameter,
                  const std::vector<double> &values, const std::string &csv_path,
                  std::ostream &out, std::ostream &err)
    {
        Scenario scenario;
        try
        {
            scenario = load_for_cli(scenario_path);
            Scenario probe = scenario;
            apply_parameter(probe, parameter, 0.0);
            if (values.empty())
            {
                throw InputError("--values is empty");
            }
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return kExitParseError;
        }

        const std::vector<SweepRow> rows = run_sweep(scenario, parameter, values);
        if (csv_path.empty())
        {
            write_sweep(out, rows);
        }
        else
        {
            std::ofstream file(csv_path);
            if (!file)
            {
                err << "error: cannot write " << csv_path << '\n';
                return kExitParseError;
            }
            write_sweep(file, rows);
        }

        bool solver_failed = false;
        bool validation_failed = false;
        for (const SweepRow &r : rows)
        {
            if (!r.error.empty())
            {
                err << "value " << r.value << ": " << r.error << '\n';
            }
            if (r.status != to_string(SolveStatus::Converged))
            {
                solver_failed = true;
            }
            else if (!r.pass)
            {
                validation_failed = true;
            }
        }
        if (solver_failed)
        {
            return kExitSolverFailure;
        }
        return validation_failed ? kExitValidationFailure : kExitOk;
    }

    int cmd_bench(const std::string &scenario_path, int repeats, double elapsed, std::ostream &out, std::ostream &err)
    {
        Scenario scenario;
        try
        {
            scenario = load_for_cli(scenario_path);
            if (repeats < 1)
            {
                throw InputError("--repeats must be at least 1");
            }
            if (!(elapsed >= 0.0))
            {
                throw InputError("--elapsed must be nonnegative");
            }
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return kExitParseError;
        }
        const BenchResult result = run_bench(scenario, repeats, elapsed);
        out << bench_to_json(result).dump(2) << '\n';
        return result.cold_failures + result.warm_failures == 0 ? kExitOk : kExitSolverFailure;
    }

    int cmd_validate(const std::string &trace_path, const std::string &scenario_path, std::ostream &out,
                     std::ostream &err)
    {
        Scenario scenario;
        std::vector<validator::TraceSample> samples;
        try
        {
            scenario = load_for_cli(scenario_path);
            std::ifstream in(trace_path);
            if (!in)
            {
                throw InputError("cannot open trace " + trace_path);
            }
            samples = read_trace(in);
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return kExitParseError;
        }
        const validator::ConstraintReport report = validator::check_samples(samples, scenario);
        out << report_to_json(report).dump(2) << '\n';
        return report.pass ? kExitOk : kExitValidationFailure;
    }

    int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Perching trajectory planner"};
        app.require_subcommand(1);

        std::string scenario_path;
        std::string out_dir = "out";
        double rate = 100.0;
        auto *plan = app.add_subcommand("plan", "Plan one trajectory and write trace.csv and summary.json");
        plan->add_option("scenario", scenario_path, "Scenario file (YAML or JSON)")->required();
        plan->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
        plan->add_option("--rate", rate, "Trace sample rate in Hz")->capture_default_str();

        std::string parameter;
        std::vector<double> values;
        std::string sweep_csv;
        auto *sweep = app.add_subcommand("sweep", "Solve once per parameter value and print a CSV table");
        sweep->add_option("scenario", scenario_path, "Scenario file")->required();
        sweep->add_option("--param", parameter, "landing_height, slope or v_n_bar")->required();
        sweep->add_option("--values", values, "Comma separated values")->required()->delimiter(',');
        sweep->add_option("-o,--out", sweep_csv, "Write the table here instead of stdout");

        int repeats = 10;
        double elapsed = 0.1;
        auto *bench = app.add_subcommand("bench", "Time cold solves and warm replans");
        bench->add_option("scenario", scenario_path, "Scenario file")->required();
        bench->add_option("--repeats", repeats, "Number of cold/warm pairs")->capture_default_str();
        bench->add_option("--elapsed", elapsed, "Seconds executed before the warm replan")->capture_default_str();

        std::string trace_path;
        auto *validate = app.add_subcommand("validate", "Check a trace CSV against a scenario");
        validate->add_option("trace", trace_path, "Trace CSV written by plan")->required();
        validate->add_option("scenario", scenario_path, "Scenario file")->required();

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::Success &e)
        {
            app.exit(e, out, err);
            return kExitOk;
        }
        catch (const CLI::ParseError &e)
        {
            err << "error: " << e.what() << '\n';
            return kExitParseError;
        }

        if (plan->parsed())
        {
            return cmd_plan(scenario_path, out_dir, rate, out, err);
        }
        if (sweep->parsed())
        {
            return cmd_sweep(scenario_path, parameter, values, sweep_csv, out, err);
        }
        if (bench->parsed())
        {
            return cmd_bench(scenario_path, repeats, elapsed, out, err);
        }
        return cmd_validate(trace_path, scenario_path, out, err);
    }

} // namespace perch::cli
