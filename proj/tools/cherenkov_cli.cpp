// cherenkov: run radiation scenarios from flat key = value configs.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cherenkov/scenario.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read config '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int report_config_error(const std::string& path, const cherenkov::ConfigError& e) {
    std::cerr << path;
    if (e.line() > 0) std::cerr << ':' << e.line() << ':' << e.column();
    std::cerr << ": error: " << e.what() << '\n';
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cherenkov radiation in lossy, dispersive magnetodielectrics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cherenkov::tool_version);

    std::string config;
    std::string out_dir;
    double tol = 0.0;
    int jobs = 0;
    auto* run = app.add_subcommand("run", "compute the artifacts requested by a config");
    run->add_option("config", config, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides output_dir)");
    run->add_option("--tol", tol, "relative tolerance (overrides domain.tolerance)");
    run->add_option("--jobs", jobs, "worker threads for per-frequency bins")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "parse and validate a config without computing");
    validate->add_option("config", config, "scenario config file")->required();

    std::string show;
    auto* list = app.add_subcommand("list-examples", "list the built-in example configs");
    list->add_option("--show", show, "print the named example config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& ex : cherenkov::example_configs()) {
                if (!show.empty()) {
                    if (show == ex.name) {
                        std::cout << ex.text;
                        return 0;
                    }
                    continue;
                }
                std::cout << ex.name << "\t" << ex.description << '\n';
            }
            if (!show.empty()) {
                std::cerr << "no example named '" << show << "'\n";
                return 2;
            }
            return 0;
        }

        const std::string text = slurp(config);
        cherenkov::Scenario scenario;
        try {
            scenario = cherenkov::parse_scenario(text);
        } catch (const cherenkov::ConfigError& e) {
            return report_config_error(config, e);
        }

        if (*validate) {
            std::cout << config << ": ok (" << scenario.outputs.size() << " outputs";
            if (scenario.sweep) std::cout << ", sweep over " << scenario.sweep->values.size() << " values";
            std::cout << ")\n";
            return 0;
        }

        cherenkov::RunOptions opts;
        if (!out_dir.empty()) opts.output_dir = out_dir;
        if (run->count("--tol")) opts.tolerance = tol;
        if (run->count("--jobs")) opts.jobs = jobs;
        const auto report = cherenkov::run_scenario(scenario, opts);
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& d : report.directories) std::cout << "wrote " << d.string() << '\n';
        return 0;
    } catch (const cherenkov::ConfigError& e) {
        return report_config_error(config, e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
