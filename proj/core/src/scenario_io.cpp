#include "perch/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace perch
{
    using nlohmann::json;

    namespace
    {
        [[noreturn]] void fail(const std::string &what)
        {
            throw ScenarioParseError(what);
        }

        void reject_unknown(const json &obj, const std::string &section, std::initializer_list<const char *> keys)
        {
            if (!obj.is_object())
            {
                fail("section '" + section + "' must be a mapping");
            }
            const std::set<std::string> allowed(keys.begin(), keys.end());
            for (const auto &[k, v] : obj.items())
            {
                if (!allowed.count(k))
                {
                    fail("unknown key '" + k + "' in section '" + section + "'");
                }
            }
        }

        double get_number(const json &obj, const char *key, double fallback, const std::string &section)
        {
            if (!obj.contains(key))
            {
                return fallback;
            }
            const json &v = obj.at(key);
            if (!v.is_number())
            {
                fail("'" + section + "." + key + "' must be a number");
            }
            return v.get<double>();
        }

        int get_int(const json &obj, const char *key, int fallback, const std::string &section)
        {
            if (!obj.contains(key))
            {
                return fallback;
            }
            const json &v = obj.at(key);
            if (!v.is_number_integer())
            {
                fail("'" + section + "." + key + "' must be an integer");
            }
            return v.get<int>();
        }

        bool get_bool(const json &obj, const char *key, bool fallback, const std::string &section)
        {
            if (!obj.contains(key))
            {
                return fallback;
            }
            const json &v = obj.at(key);
            if (!v.is_boolean())
            {
                fail("'" + section + "." + key + "' must be true or false");
            }
            return v.get<bool>();
        }

        Vec3 get_vec3(const json &obj, const char *key, const Vec3 &fallback, const std::string &section)
        {
            if (!obj.contains(key))
            {
                return fallback;
            }
            const json &v = obj.at(key);
            if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
            {
                fail("'" + section + "." + key + "' must be a list of three numbers");
            }
            return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
        }

        json vec_json(const Vec3 &v)
        {
            return json::array({v.x(), v.y(), v.z()});
        }

        const json &section_or_empty(const json &doc, const char *key)
        {
            static const json empty = json::object();
            return doc.contains(key) ? doc.at(key) : empty;
        }

        json yaml_to_json(const YAML::Node &node)
        {
            switch (node.Type())
            {
            case YAML::NodeType::Null:
            case YAML::NodeType::Undefined:
                return nullptr;
            case YAML::NodeType::Sequence:
            {
                json arr = json::array();
                for (const auto &item : node)
                {
                    arr.push_back(yaml_to_json(item));
                }
                return arr;
            }
            case YAML::NodeType::Map:
            {
                json obj = json::object();
                for (const auto &kv : node)
                {
                    obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
                }
                return obj;
            }
            case YAML::NodeType::Scalar:
                break;
            }
            const std::string s = node.Scalar();
            if (node.Tag() == "!")
            {
                return s; // quoted scalar
            }
            if (s == "true" || s == "True")
            {
                return true;
            }
            if (s == "false" || s == "False")
            {
                return false;
            }
            long long iv = 0;
            const char *first = s.data();
            const char *last = s.data() + s.size();
            if (auto [p, ec] = std::from_chars(first, last, iv); ec == std::errc() && p == last)
            {
                return iv;
            }
            double dv = 0.0;
            if (auto [p, ec] = std::from_chars(first, last, dv); ec == std::errc() && p == last)
            {
                return dv;
            }
            return s;
        }

        void emit_json(YAML::Emitter &out, const json &v)
        {
            if (v.is_object())
            {
                out << YAML::BeginMap;
                for (const auto &[k, item] : v.items())
                {
                    out << YAML::Key << k << YAML::Value;
                    emit_json(out, item);
                }
                out << YAML::EndMap;
            }
            else if (v.is_array())
            {
                out << YAML::Flow << YAML::BeginSeq;
                for (const auto &item : v)
                {
                    emit_json(out, item);
                }
                out << YAML::EndSeq;
            }
            else if (v.is_boolean())
            {
                out << v.get<bool>();
            }
            else if (v.is_number_integer())
            {
                out << v.get<long long>();
            }
            else if (v.is_number())
            {
                // Shortest representation that parses back to the same double.
                out << json(v.get<double>()).dump();
            }
            else if (v.is_string())
            {
                out << YAML::DoubleQuoted << v.get<std::string>();
            }
            else
            {
                out << YAML::Null;
            }
        }

        const char *duration_name(InitialDuration d)
        {
            return d == InitialDuration::Distance ? "distance" : "unit";
        }

        const char *phase_name(InitialPhase p)
        {
            return p == InitialPhase::MidThrust ? "mid-thrust" : "literal";
        }
    } // namespace

    ScenarioFormat format_for_path(const std::string &path)
    {
        const std::string ext = ".json";
        if (path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
        {
            return ScenarioFormat::Json;
        }
        return ScenarioFormat::Yaml;
    }

    Scenario scenario_from_json(const json &doc)
    {
        reject_unknown(doc, "<root>", {"name", "initial", "platform", "vehicle", "limits", "weights", "smoothing",
                                       "quadrature", "solver", "free_terminal"});
        Scenario s;
        if (doc.contains("name"))
        {
            if (!doc.at("name").is_string())
            {
                fail("'name' must be a string");
            }
            s.name = doc.at("name").get<std::string>();
        }
        s.free_terminal = get_bool(doc, "free_terminal", s.free_terminal, "<root>");

        const json &init = section_or_empty(doc, "initial");
        reject_unknown(init, "initial", {"p", "v", "a", "j"});
        s.initial.p = get_vec3(init, "p", s.initial.p, "initial");
        s.initial.v = get_vec3(init, "v", s.initial.v, "initial");
        s.initial.a = get_vec3(init, "a", s.initial.a, "initial");
        s.initial.j = get_vec3(init, "j", s.initial.j, "initial");

        const json &plat = section_or_empty(doc, "platform");
        reject_unknown(plat, "platform", {"position", "velocity", "normal", "slope_deg", "v_n_bar", "d_bar"});
        s.platform.rho0 = get_vec3(plat, "position", s.platform.rho0, "platform");
        s.platform.vel = get_vec3(plat, "velocity", s.platform.vel, "platform");
        if (plat.contains("normal") && plat.contains("slope_deg"))
        {
            fail("give either platform.normal or platform.slope_deg, not both");
        }
        if (plat.contains("slope_deg"))
        {
            s.platform.spec.z_d = surface_normal_from_slope(get_number(plat, "slope_deg", 0.0, "platform"));
        }
        s.platform.spec.z_d = get_vec3(plat, "normal", s.platform.spec.z_d, "platform");
        s.platform.spec.v_n_bar = get_number(plat, "v_n_bar", s.platform.spec.v_n_bar, "platform");
        s.platform.spec.d_bar = get_number(plat, "d_bar", s.platform.spec.d_bar, "platform");

        const json &veh = section_or_empty(doc, "vehicle");
        reject_unknown(veh, "vehicle", {"g_bar", "l_bar", "r_bar"});
        s.geometry.g_bar = get_number(veh, "g_bar", s.geometry.g_bar, "vehicle");
        s.geometry.l_bar = get_number(veh, "l_bar", s.geometry.l_bar, "vehicle");
        s.geometry.r_bar = get_number(veh, "r_bar", s.geometry.r_bar, "vehicle");

        const json &lim = section_or_empty(doc, "limits");
        reject_unknown(lim, "limits", {"v_max", "omega_max", "tau_min", "tau_max", "z_min"});
        s.limits.v_max = get_number(lim, "v_max", s.limits.v_max, "limits");
        s.limits.omega_max = get_number(lim, "omega_max", s.limits.omega_max, "limits");
        s.limits.tau_min = get_number(lim, "tau_min", s.limits.tau_min, "limits");
        s.limits.tau_max = get_number(lim, "tau_max", s.limits.tau_max, "limits");
        s.limits.z_min = get_number(lim, "z_min", s.limits.z_min, "limits");

        const json &w = section_or_empty(doc, "weights");
        reject_unknown(w, "weights", {"w_tau", "w_omega", "w_v", "w_g", "w_c", "w_t", "rho_time"});
        s.weights.w_tau = get_number(w, "w_tau", s.weights.w_tau, "weights");
        s.weights.w_omega = get_number(w, "w_omega", s.weights.w_omega, "weights");
        s.weights.w_v = get_number(w, "w_v", s.weights.w_v, "weights");
        s.weights.w_g = get_number(w, "w_g", s.weights.w_g, "weights");
        s.weights.w_c = get_number(w, "w_c", s.weights.w_c, "weights");
        s.weights.w_t = get_number(w, "w_t", s.weights.w_t, "weights");
        s.weights.rho_time = get_number(w, "rho_time", s.weights.rho_time, "weights");

        const json &sm = section_or_empty(doc, "smoothing");
        reject_unknown(sm, "smoothing", {"mu", "eps"});
        s.smoothing.mu = get_number(sm, "mu", s.smoothing.mu, "smoothing");
        s.smoothing.eps = get_number(sm, "eps", s.smoothing.eps, "smoothing");

        const json &quad = section_or_empty(doc, "quadrature");
        reject_unknown(quad, "quadrature", {"kappa"});
        s.quadrature.kappa = get_int(quad, "kappa", s.quadrature.kappa, "quadrature");

        const json &sol = section_or_empty(doc, "solver");
        reject_unknown(sol, "solver", {"pieces", "max_iterations", "gradient_tolerance", "history_size", "armijo",
                                       "wolfe", "stagnation_window", "stagnation_tolerance", "max_linesearch",
                                       "initial_duration", "initial_phase"});
        SolverConfig &c = s.solver;
        c.pieces = get_int(sol, "pieces", c.pieces, "solver");
        c.max_iterations = get_int(sol, "max_iterations", c.max_iterations, "solver");
        c.gradient_tolerance = get_number(sol, "gradient_tolerance", c.gradient_tolerance, "solver");
        c.history_size = get_int(sol, "history_size", c.history_size, "solver");
        c.armijo = get_number(sol, "armijo", c.armijo, "solver");
        c.wolfe = get_number(sol, "wolfe", c.wolfe, "solver");
        c.stagnation_window = get_int(sol, "stagnation_window", c.stagnation_window, "solver");
        c.stagnation_tolerance = get_number(sol, "stagnation_tolerance", c.stagnation_tolerance, "solver");
        c.max_linesearch = get_int(sol, "max_linesearch", c.max_linesearch, "solver");
        if (sol.contains("initial_duration"))
        {
            const json &v = sol.at("initial_duration");
            if (v == "distance")
                c.initial_duration = InitialDuration::Distance;
            else if (v == "unit")
                c.initial_duration = InitialDuration::Unit;
            else
                fail("solver.initial_duration must be 'distance' or 'unit'");
        }
        if (sol.contains("initial_phase"))
        {
            const json &v = sol.at("initial_phase");
            if (v == "mid-thrust")
                c.initial_phase = InitialPhase::MidThrust;
            else if (v == "literal")
                c.initial_phase = InitialPhase::Literal;
            else
                fail("solver.initial_phase must be 'mid-thrust' or 'literal'");
        }

        try
        {
            s.validate();
        }
        catch (const std::invalid_argument &e)
        {
            fail(std::string("invalid scenario: ") + e.what());
        }
        return s;
    }

    json scenario_to_json(const Scenario &s)
    {
        json doc;
        doc["name"] = s.name;
        doc["free_terminal"] = s.free_terminal;
        doc["initial"] = {{"p", vec_json(s.initial.p)},
                          {"v", vec_json(s.initial.v)},
                          {"a", vec_json(s.initial.a)},
                          {"j", vec_json(s.initial.j)}};
        doc["platform"] = {{"position", vec_json(s.platform.rho0)},
                           {"velocity", vec_json(s.platform.vel)},
                           {"normal", vec_json(s.platform.spec.z_d)},
                           {"v_n_bar", s.platform.spec.v_n_bar},
                           {"d_bar", s.platform.spec.d_bar}};
        doc["vehicle"] = {{"g_bar", s.geometry.g_bar}, {"l_bar", s.geometry.l_bar}, {"r_bar", s.geometry.r_bar}};
        doc["limits"] = {{"v_max", s.limits.v_max},
                         {"omega_max", s.limits.omega_max},
                         {"tau_min", s.limits.tau_min},
                         {"tau_max", s.limits.tau_max},
                         {"z_min", s.limits.z_min}};
        doc["weights"] = {{"w_tau", s.weights.w_tau}, {"w_omega", s.weights.w_omega}, {"w_v", s.weights.w_v},
                          {"w_g", s.weights.w_g},     {"w_c", s.weights.w_c},         {"w_t", s.weights.w_t},
                          {"rho_time", s.weights.rho_time}};
        doc["smoothing"] = {{"mu", s.smoothing.mu}, {"eps", s.smoothing.eps}};
        doc["quadrature"] = {{"kappa", s.quadrature.kappa}};
        doc["solver"] = {{"pieces", s.solver.pieces},
                         {"max_iterations", s.solver.max_iterations},
                         {"gradient_tolerance", s.solver.gradient_tolerance},
                         {"history_size", s.solver.history_size},
                         {"armijo", s.solver.armijo},
                         {"wolfe", s.solver.wolfe},
                         {"stagnation_window", s.solver.stagnation_window},
                         {"stagnation_tolerance", s.solver.stagnation_tolerance},
                         {"max_linesearch", s.solver.max_linesearch},
                         {"initial_duration", duration_name(s.solver.initial_duration)},
                         {"initial_phase", phase_name(s.solver.initial_phase)}};
        return doc;
    }

    Scenario parse_scenario(const std::string &text, ScenarioFormat format)
    {
        json doc;
        if (format == ScenarioFormat::Json)
        {
            try
            {
                doc = json::parse(text);
            }
            catch (const json::exception &e)
            {
                fail(std::string("malformed JSON: ") + e.what());
            }
        }
        else
        {
            try
            {
                doc = yaml_to_json(YAML::Load(text));
            }
            catch (const YAML::Exception &e)
            {
                fail(std::string("malformed YAML: ") + e.what());
            }
        }
        if (doc.is_null())
        {
            fail("scenario document is empty");
        }
        try
        {
            return scenario_from_json(doc);
        }
        catch (const json::exception &e)
        {
            fail(std::string("scenario type error: ") + e.what());
        }
    }

    std::string dump_scenario(const Scenario &scenario, ScenarioFormat format)
    {
        const json doc = scenario_to_json(scenario);
        if (format == ScenarioFormat::Json)
        {
            return doc.dump(2) + "\n";
        }
        YAML::Emitter out;
        emit_json(out, doc);
        return std::string(out.c_str()) + "\n";
    }

    Scenario load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
        {
            fail("cannot open scenario file '" + path + "'");
        }
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_scenario(buf.str(), format_for_path(path));
    }

    void save_scenario(const Scenario &scenario, const std::string &path)
    {
        std::ofstream out(path);
        if (!out)
        {
            throw std::runtime_error("cannot write scenario file '" + path + "'");
        }
        out << dump_scenario(scenario, format_for_path(path));
    }

} // namespace perch
