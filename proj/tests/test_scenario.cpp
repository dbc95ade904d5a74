#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cherenkov/io.hpp"
#include "cherenkov/scenario.hpp"

using namespace cherenkov;
namespace fs = std::filesystem;

namespace {

const char* minimal = R"(medium.omega_pe = 1.118e16 rad_s
medium.omega_0e = 1e16 rad_s
medium.gamma_e = 1e12 rad_s
particle.beta = 0.9
regime.mechanics = classical
domain.omega_max = 2e14 rad_s
domain.k_max = 1e7 rad_m
)";

std::string read(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cherenkov_test_" + name);
    fs::remove_all(p);
    return p;
}

ConfigError config_error(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a ConfigError");
    return ConfigError("", "");
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
    const Scenario s = parse_scenario(minimal);
    CHECK(s.domain.relative_tolerance == 1e-6);
    CHECK(s.regime.temperature == 0.0);
    CHECK(s.particle.hbar_scale == 1.0);
    CHECK(s.particle.mass == constants::m_e);
    CHECK(s.regime.medium_mode == MediumMode::lossy);
    CHECK(std::get<LorentzMedium>(s.medium).omega_0e == 1e16);
    CHECK(s.outputs.empty());
}

TEST_CASE("units convert to SI") {
    const Scenario s = parse_scenario(std::string(minimal) +
                                      "regime.temperature = 1 eV\nparticle.mass = 938.272 MeV\nparticle.charge = 2 e\n");
    CHECK(s.regime.temperature == doctest::Approx(constants::eV / constants::k_B));
    CHECK(s.particle.mass == doctest::Approx(1.6726e-27).epsilon(1e-4));
    CHECK(s.particle.charge == doctest::Approx(2.0 * constants::e));
}

TEST_CASE("errors name the field and position") {
    SUBCASE("beta out of range") {
        std::string text = minimal;
        text.replace(text.find("0.9"), 3, "1.2");
        const auto e = config_error(text);
        CHECK(e.field() == "particle.beta");
        CHECK(std::string(e.what()).find("particle.beta") != std::string::npos);
    }
    SUBCASE("unknown key") {
        const auto e = config_error(std::string(minimal) + "particle.bta = 0.5\n");
        CHECK(e.field() == "particle.bta");
        CHECK(e.line() == 8);
        CHECK(e.column() == 1);
    }
    SUBCASE("syntax") {
        const auto e = config_error("medium.omega_0e = 1 rad_s\n   particle.beta 0.9\n");
        CHECK(e.line() == 2);
        CHECK(e.column() == 4);
    }
    SUBCASE("missing unit names the dimension") {
        std::string text = minimal;
        text.replace(text.find("2e14 rad_s"), 10, "2e14");
        const auto e = config_error(text);
        CHECK(e.field() == "domain.omega_max");
        CHECK(std::string(e.what()).find("angular frequency") != std::string::npos);
    }
    SUBCASE("wrong unit") {
        std::string text = minimal;
        text.replace(text.find("1e7 rad_m"), 9, "1e7 K");
        CHECK(config_error(text).field() == "domain.k_max");
    }
    SUBCASE("duplicate key") { CHECK(config_error(std::string(minimal) + "particle.beta = 0.8\n").line() == 8); }
    SUBCASE("classical spectrum without caps") {
        const auto e = config_error("medium.omega_pe = 1e15 rad_s\nmedium.omega_0e = 2e15 rad_s\n"
                                    "medium.gamma_e = 1e14 rad_s\nparticle.beta = 0.9\n"
                                    "domain.omega_max = 1e16 rad_s\noutputs = spectrum\n");
        CHECK(e.field() == "domain.k_max");
    }
    SUBCASE("unknown artifact") { CHECK(config_error(std::string(minimal) + "outputs = spectra\n").field() == "outputs"); }
}

TEST_CASE("quantum regime without caps gets automatic ones") {
    const char* text = R"(medium.model = fixed
medium.eps = 2.25
medium.eps_imag = 1e-4
particle.beta = 0.9
regime.mechanics = nonrel_quantum
outputs = spectrum
)";
    const Scenario s = parse_scenario(text);
    CHECK(s.caps_automatic);
    const double wc = cutoff_frequency(Mechanics::nonrel_quantum, s.particle, 1.5);
    CHECK(s.domain.omega_max == doctest::Approx(1.05 * wc));
    CHECK(s.domain.k_max == doctest::Approx(2.0 * s.particle.mass * s.particle.speed() / constants::hbar));
}

TEST_CASE("sum rules artifact") {
    const auto& ex = example_configs();
    const auto it = std::find_if(ex.begin(), ex.end(), [](const ExampleConfig& e) { return std::string(e.name) == "sumrules"; });
    REQUIRE(it != ex.end());
    const fs::path out = scratch("sumrules");
    run_scenario(parse_scenario(it->text), {out, std::nullopt, std::nullopt});
    const auto rows = csv_rows(read(out / "sumrules.csv"));
    CHECK(rows.size() == 50);
    for (const auto& r : rows) {
        CHECK(r[1] == 3.0);
        for (int j = 2; j <= 4; ++j) CHECK(r[j] < 1e-8);
    }
    CHECK(fs::exists(out / "branches.csv"));
    const auto manifest = nlohmann::json::parse(read(out / "manifest.json"));
    CHECK(manifest["input_hash_fnv1a64"] == io::fnv1a_hex(it->text));
    CHECK(manifest["totals"]["sumrules_max_residual"].get<double>() < 1e-8);
}

TEST_CASE("relativistic cutoff in the spectrum artifact") {
    const char* text = R"(medium.model = fixed
medium.eps = 2.25
particle.beta = 0.9
regime.mechanics = rel_quantum
regime.medium_mode = transparent
domain.omega_min = 0.01 MeV
domain.omega_max = 1.0 MeV
domain.omega_points = 100
outputs = spectrum
)";
    const fs::path out = scratch("cutoff");
    run_scenario(parse_scenario(text), {out, std::nullopt, std::nullopt});
    const auto rows = csv_rows(read(out / "spectrum.csv"));
    const double wc = 0.6565 * constants::MeV / constants::hbar;
    for (const auto& r : rows) {
        if (r[0] > wc * 1.001) CHECK(r[1] == 0.0);
        if (r[0] < wc * 0.999) CHECK(r[1] > 0.0);
    }
    const auto j = nlohmann::json::parse(read(out / "spectrum.json"));
    CHECK(j["cutoffs"]["omega_cutoff_rad_s"].get<double>() == doctest::Approx(wc).epsilon(1e-4));
}

TEST_CASE("empty outputs writes only the manifest") {
    const fs::path out = scratch("empty");
    run_scenario(parse_scenario(std::string(minimal) + "outputs =\n"), {out, std::nullopt, std::nullopt});
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(out)) files.push_back(e.path().filename().string());
    CHECK(files == std::vector<std::string>{"manifest.json"});
}

TEST_CASE("identical input gives identical payloads") {
    const std::string text = std::string(minimal) + "domain.omega_min = 2e13 rad_s\ndomain.omega_points = 9\n"
                                                    "outputs = spectrum, response, kernelmap\nkgrid.k_max = 1e7 rad_m\n"
                                                    "kgrid.points = 5\n";
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    run_scenario(parse_scenario(text), {a, std::nullopt, std::nullopt});
    run_scenario(parse_scenario(text), {b, std::nullopt, 2});
    for (const char* f : {"spectrum.csv", "response.csv", "kernelmap.csv"}) CHECK(read(a / f) == read(b / f));
    // no staging leftovers next to the outputs
    for (const auto& e : fs::directory_iterator(a.parent_path()))
        CHECK(e.path().filename().string().find(".staging-cherenkov_test_det") == std::string::npos);
}

TEST_CASE("warnings appear once in the manifest") {
    const char* text = R"(medium.omega_pe = 1e15 rad_s
medium.omega_0e = 2e15 rad_s
medium.gamma_e = 1e14 rad_s
medium.omega_pm = 1e15 rad_s
medium.omega_0m = 2e15 rad_s
medium.gamma_m = 1e14 rad_s
particle.beta = 0.9
domain.omega_max = 6e15 rad_s
domain.k_max = 1e8 rad_m
domain.omega_points = 21
outputs = spectrum
)";
    const fs::path out = scratch("warnings");
    const auto report = run_scenario(parse_scenario(text), {out, std::nullopt, std::nullopt});
    const auto manifest = nlohmann::json::parse(read(out / "manifest.json"));
    const auto warnings = manifest["warnings"].get<std::vector<std::string>>();
    CHECK_FALSE(warnings.empty());
    for (std::size_t i = 0; i < warnings.size(); ++i)
        for (std::size_t j = i + 1; j < warnings.size(); ++j) CHECK(warnings[i] != warnings[j]);
    CHECK(report.warnings == warnings);
}

TEST_CASE("failed runs leave nothing at the target") {
    const fs::path base = scratch("blocked");
    fs::create_directories(base);
    std::ofstream(base / "target") << "not a directory";
    CHECK_THROWS(run_scenario(parse_scenario(std::string(minimal) + "outputs = response\n"),
                              {base / "target", std::nullopt, std::nullopt}));
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(base)) files.push_back(e.path().filename().string());
    CHECK(files == std::vector<std::string>{"target"});
}

TEST_CASE("sweeps produce one manifest per value") {
    const auto& ex = example_configs();
    const auto it = std::find_if(ex.begin(), ex.end(), [](const ExampleConfig& e) { return std::string(e.name) == "beta_sweep"; });
    REQUIRE(it != ex.end());
    const Scenario s = parse_scenario(it->text);
    REQUIRE(s.sweep);
    const fs::path out = scratch("sweep");
    const auto report = run_scenario(s, {out, std::nullopt, std::nullopt});
    REQUIRE(report.directories.size() == 4);
    double previous = -1.0;
    for (const auto& d : report.directories) {
        const auto m = nlohmann::json::parse(read(d / "manifest.json"));
        const double total = m["totals"]["spectrum_total_W"].get<double>();
        CHECK(total >= previous);  // 0.6 is below threshold, then grows with beta
        previous = total;
    }
    CHECK(config_error(std::string(it->text) + "sweep.values = 0.5, 1.5\n").line() > 0);
}

TEST_CASE("bad sweep value is caught before running") {
    std::string text = std::string(minimal) + "sweep.key = particle.beta\nsweep.values = 0.8, 1.3\n";
    CHECK(config_error(text).field() == "particle.beta");
}

TEST_CASE("built-in examples parse and match the test data") {
    for (const auto& e : example_configs()) CHECK_NOTHROW(parse_scenario(e.text));
    const fs::path data = fs::path(__FILE__).parent_path() / "data";
    for (const char* name : {"frank_tamm", "sumrules"}) {
        const auto& ex = example_configs();
        const auto it = std::find_if(ex.begin(), ex.end(), [&](const ExampleConfig& e) { return std::string(e.name) == name; });
        REQUIRE(it != ex.end());
        CHECK(read(data / (std::string(name) + ".cfg")) == it->text);
    }
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 1.0})
        CHECK(std::stod(io::format_number(x)) == x);
    CHECK(io::format_number(std::numeric_limits<double>::infinity()) == "inf");
}
