#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cherenkov/kernels.hpp"
#include "cherenkov/medium.hpp"
#include "cherenkov/power.hpp"
#include "cherenkov/thermal.hpp"

namespace cherenkov {

// Config problems: line/column for syntax, field path for everything else.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& what, std::string field, int line = 0, int column = 0)
        : std::invalid_argument(what), field_(std::move(field)), line_(line), column_(column) {}
    const std::string& field() const { return field_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    std::string field_;
    int line_;
    int column_;
};

enum class Artifact { spectrum, branches, sumrules, kernelmap, response, thermalfactors };
const char* to_string(Artifact a);

struct KGrid {
    double k_min = 0.0;
    double k_max = 0.0;
    int points = 50;
    bool log_spacing = true;
    bool present = false;
    std::vector<double> values() const;
};

struct Sweep {
    std::string key;  // dotted key being varied
    std::vector<std::string> values;  // raw value text, parsed like the key itself
};

struct Scenario {
    Medium medium;
    Particle particle;
    RegimeSpec regime;
    IntegrationDomain domain;
    bool caps_automatic = false;
    KGrid kgrid;
    ThermalState thermal;
    bool matsubara = false;  // also report the Matsubara total with a classical lossy spectrum
    std::vector<Artifact> outputs;
    std::filesystem::path output_dir = "out";
    std::optional<Sweep> sweep;
    std::string source_text;  // the config as given, for the input hash
};

/// Parse and validate a config of `dotted.key = value [unit]` lines.
/// '#' starts a comment. Unknown keys, missing units and invalid values are
/// ConfigErrors; the swept key may be absent since each sweep value fills it.
Scenario parse_scenario(const std::string& text);

struct RunOptions {
    std::optional<std::filesystem::path> output_dir;
    std::optional<double> tolerance;
    std::optional<int> jobs;
};

struct RunReport {
    std::vector<std::filesystem::path> directories;  // one per (swept) scenario
    std::vector<std::string> warnings;
};

// Computes every requested artifact, stages the files next to the output
// directory, and moves them into place only when all of them succeeded.
RunReport run_scenario(const Scenario& scenario, const RunOptions& opts = {});

struct ExampleConfig {
    const char* name;
    const char* description;
    const char* text;
};
const std::vector<ExampleConfig>& example_configs();

inline constexpr const char* tool_version = "0.1.0";

}  // namespace cherenkov
