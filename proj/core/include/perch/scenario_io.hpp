#pragma once

#include "perch/scenario.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>

namespace perch
{
    class ScenarioParseError : public std::runtime_error
    {
    public:
        explicit ScenarioParseError(const std::string &what) : std::runtime_error(what) {}
    };

    enum class ScenarioFormat
    {
        Yaml,
        Json,
    };

    /// JSON for paths ending in .json, YAML otherwise.
    ScenarioFormat format_for_path(const std::string &path);

    /// Unknown keys, wrong types and invariant violations all raise ScenarioParseError.
    Scenario scenario_from_json(const nlohmann::json &doc);
    nlohmann::json scenario_to_json(const Scenario &scenario);

    Scenario parse_scenario(const std::string &text, ScenarioFormat format);
    std::string dump_scenario(const Scenario &scenario, ScenarioFormat format);

    Scenario load_scenario(const std::string &path);
    void save_scenario(const Scenario &scenario, const std::string &path);

} // namespace perch
