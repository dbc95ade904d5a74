#include "cherenkov/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "cherenkov/io.hpp"

namespace cherenkov {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- parsing

struct Entry {
    std::string value;
    int line = 0;
    int column = 0;  // of the value
};

using Entries = std::map<std::string, Entry>;

enum class Kind { frequency, wavenumber, temperature, mass, charge, number, integer, word, list, path };

struct KeySpec {
    Kind kind;
    std::vector<std::string> words;  // allowed values for Kind::word
};

const std::map<std::string, KeySpec>& key_table() {
    static const std::map<std::string, KeySpec> t = {
        {"medium.model", {Kind::word, {"lorentz", "fixed"}}},
        {"medium.omega_pe", {Kind::frequency, {}}},
        {"medium.omega_0e", {Kind::frequency, {}}},
        {"medium.gamma_e", {Kind::frequency, {}}},
        {"medium.omega_pm", {Kind::frequency, {}}},
        {"medium.omega_0m", {Kind::frequency, {}}},
        {"medium.gamma_m", {Kind::frequency, {}}},
        {"medium.eps", {Kind::number, {}}},
        {"medium.eps_imag", {Kind::number, {}}},
        {"medium.mu", {Kind::number, {}}},
        {"medium.mu_imag", {Kind::number, {}}},
        {"particle.charge", {Kind::charge, {}}},
        {"particle.mass", {Kind::mass, {}}},
        {"particle.beta", {Kind::number, {}}},
        {"particle.hbar_scale", {Kind::number, {}}},
        {"regime.mechanics", {Kind::word, {"classical", "nonrel_quantum", "rel_quantum"}}},
        {"regime.temperature", {Kind::temperature, {}}},
        {"regime.medium_mode", {Kind::word, {"lossy", "transparent"}}},
        {"domain.omega_min", {Kind::frequency, {}}},
        {"domain.omega_max", {Kind::frequency, {}}},
        {"domain.k_max", {Kind::wavenumber, {}}},
        {"domain.tolerance", {Kind::number, {}}},
        {"domain.bracket_refinement", {Kind::integer, {}}},
        {"domain.omega_points", {Kind::integer, {}}},
        {"domain.spacing", {Kind::word, {"linear", "log"}}},
        {"kgrid.k_min", {Kind::wavenumber, {}}},
        {"kgrid.k_max", {Kind::wavenumber, {}}},
        {"kgrid.points", {Kind::integer, {}}},
        {"kgrid.spacing", {Kind::word, {"linear", "log"}}},
        {"thermal.matsubara", {Kind::word, {"true", "false"}}},
        {"thermal.matsubara_count", {Kind::integer, {}}},
        {"thermal.tail_policy", {Kind::word, {"none", "integral_tail"}}},
        {"outputs", {Kind::list, {}}},
        {"output_dir", {Kind::path, {}}},
        {"sweep.key", {Kind::word, {}}},
        {"sweep.values", {Kind::list, {}}},
    };
    return t;
}

struct UnitTable {
    const char* dimension;
    std::vector<std::pair<std::string, double>> units;  // name -> SI factor
};

const UnitTable& units_for(Kind k) {
    using namespace constants;
    static const UnitTable frequency{"an angular frequency",
                                     {{"rad_s", 1.0}, {"Hz", 2.0 * pi}, {"THz", 2.0 * pi * 1e12},
                                      {"eV", eV / hbar}, {"keV", 1e3 * eV / hbar}, {"MeV", MeV / hbar}}};
    static const UnitTable wavenumber{"a wave number", {{"rad_m", 1.0}, {"rad_um", 1e6}, {"rad_nm", 1e9}}};
    static const UnitTable temperature{"a temperature", {{"K", 1.0}, {"eV", eV / k_B}, {"keV", 1e3 * eV / k_B}}};
    static const UnitTable mass{"a mass", {{"kg", 1.0}, {"m_e", m_e}, {"MeV", MeV / (c * c)}, {"keV", 1e3 * eV / (c * c)}}};
    static const UnitTable charge{"a charge", {{"C", 1.0}, {"e", e}}};
    static const UnitTable none{"a dimensionless number", {}};
    switch (k) {
        case Kind::frequency: return frequency;
        case Kind::wavenumber: return wavenumber;
        case Kind::temperature: return temperature;
        case Kind::mass: return mass;
        case Kind::charge: return charge;
        default: return none;
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Entries tokenize(const std::string& text) {
    Entries entries;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = raw.substr(0, raw.find('#'));
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ", column " + std::to_string(first + 1) +
                                  ": expected 'key = value'",
                              "", line_no, static_cast<int>(first) + 1);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty() || !std::all_of(key.begin(), key.end(), [](unsigned char ch) {
                return std::islower(ch) || std::isdigit(ch) || ch == '_' || ch == '.';
            }))
            throw ConfigError("line " + std::to_string(line_no) + ", column " + std::to_string(first + 1) +
                                  ": malformed key '" + key + "'",
                              key, line_no, static_cast<int>(first) + 1);
        if (!key_table().count(key))
            throw ConfigError("line " + std::to_string(line_no) + ", column " + std::to_string(first + 1) +
                                  ": unknown key '" + key + "'",
                              key, line_no, static_cast<int>(first) + 1);
        if (entries.count(key))
            throw ConfigError("line " + std::to_string(line_no) + ", column " + std::to_string(first + 1) +
                                  ": duplicate key '" + key + "' (first set on line " +
                                  std::to_string(entries[key].line) + ")",
                              key, line_no, static_cast<int>(first) + 1);
        const auto vstart = line.find_first_not_of(" \t", eq + 1);
        const int vcol = static_cast<int>(vstart == std::string::npos ? eq + 2 : vstart + 1);
        entries[key] = {trim(line.substr(eq + 1)), line_no, vcol};
    }
    return entries;
}

// Typed access to the tokenized entries; every error names the key.
class Reader {
public:
    explicit Reader(const Entries& e) : entries_(e) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    double quantity(const std::string& key, double fallback) const {
        return has(key) ? parse_quantity(key, entries_.at(key)) : fallback;
    }
    std::optional<double> quantity(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return parse_quantity(key, entries_.at(key));
    }
    long integer(const std::string& key, long fallback) const {
        if (!has(key)) return fallback;
        const Entry& e = entries_.at(key);
        long v = 0;
        const auto r = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
        if (r.ec != std::errc() || r.ptr != e.value.data() + e.value.size())
            fail(key, e, "expected an integer, got '" + e.value + "'");
        return v;
    }
    std::string word(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const Entry& e = entries_.at(key);
        const auto& allowed = key_table().at(key).words;
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), e.value) == allowed.end()) {
            std::string opts;
            for (const auto& w : allowed) opts += (opts.empty() ? "" : " | ") + w;
            fail(key, e, "expected one of " + opts + ", got '" + e.value + "'");
        }
        return e.value;
    }
    std::vector<std::string> list(const std::string& key) const {
        return has(key) ? split_list(entries_.at(key).value) : std::vector<std::string>{};
    }
    std::string raw(const std::string& key) const { return entries_.at(key).value; }

    [[noreturn]] static void fail(const std::string& key, const Entry& e, const std::string& why) {
        throw ConfigError(key + ": " + why + " (line " + std::to_string(e.line) + ", column " +
                              std::to_string(e.column) + ")",
                          key, e.line, e.column);
    }

private:
    double parse_quantity(const std::string& key, const Entry& e) const {
        const Kind kind = key_table().at(key).kind;
        const std::string& s = e.value;
        double v = 0.0;
        const char* begin = s.data();
        const char* end = s.data() + s.size();
        const auto r = std::from_chars(begin, end, v);
        if (r.ec != std::errc() || !std::isfinite(v)) fail(key, e, "expected a number, got '" + s + "'");
        const std::string unit = trim(std::string(r.ptr, end));
        const UnitTable& table = units_for(kind);
        if (table.units.empty()) {
            if (!unit.empty() && unit != "1")
                fail(key, e, "is dimensionless, unexpected unit '" + unit + "'");
            return v;
        }
        std::string names;
        for (const auto& [name, factor] : table.units) {
            if (name == unit) return v * factor;
            names += (names.empty() ? "" : ", ") + name;
        }
        fail(key, e,
             (unit.empty() ? std::string("missing unit") : "unit '" + unit + "' is not") + "; expected " +
                 table.dimension + " (" + names + ")");
    }

    const Entries& entries_;
};

Artifact parse_artifact(const std::string& name, const Entry& e) {
    static const std::pair<const char*, Artifact> names[] = {
        {"spectrum", Artifact::spectrum},   {"branches", Artifact::branches}, {"sumrules", Artifact::sumrules},
        {"kernelmap", Artifact::kernelmap}, {"response", Artifact::response}, {"thermalfactors", Artifact::thermalfactors}};
    for (const auto& [n, a] : names)
        if (name == n) return a;
    Reader::fail("outputs", e,
                 "unknown artifact '" + name + "' (expected spectrum, branches, sumrules, kernelmap, response, "
                 "thermalfactors)");
}

template <typename F>
void field_check(const std::string& field, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        const std::string what = ex.what();
        // module validators already lead with the full field path
        if (what.rfind(field, 0) == 0) {
            const auto colon = what.find(':');
            throw ConfigError(what, colon == std::string::npos ? field : what.substr(0, colon));
        }
        throw ConfigError(field + ": " + what, field);
    }
}

bool wants(const Scenario& s, Artifact a) { return std::find(s.outputs.begin(), s.outputs.end(), a) != s.outputs.end(); }

double static_index(const Medium& m) {
    const double n2 = (permittivity(m, Complex(0.0)) * permeability(m, Complex(0.0))).real();
    return n2 > 0.0 ? std::sqrt(n2) : 0.0;
}

Scenario build(const Entries& entries) {
    const Reader r(entries);
    Scenario s;

    // medium
    const std::string model = r.word("medium.model", "lorentz");
    static const char* lorentz_keys[] = {"medium.omega_pe", "medium.omega_0e", "medium.gamma_e",
                                         "medium.omega_pm", "medium.omega_0m", "medium.gamma_m"};
    static const char* fixed_keys[] = {"medium.eps", "medium.eps_imag", "medium.mu", "medium.mu_imag"};
    if (model == "lorentz") {
        for (const char* k : fixed_keys)
            if (r.has(k)) throw ConfigError(std::string(k) + ": only valid with medium.model = fixed", k);
        LorentzMedium m;
        m.omega_pe = r.quantity("medium.omega_pe", 0.0);
        m.omega_0e = r.quantity("medium.omega_0e", 0.0);
        m.gamma_e = r.quantity("medium.gamma_e", 0.0);
        m.omega_pm = r.quantity("medium.omega_pm", 0.0);
        m.omega_0m = r.quantity("medium.omega_0m", 0.0);
        m.gamma_m = r.quantity("medium.gamma_m", 0.0);
        if (m.omega_pe == 0.0 && m.omega_0e == 0.0) m.omega_0e = 1.0;  // inactive channel placeholders
        if (m.omega_pm == 0.0 && m.omega_0m == 0.0) m.omega_0m = 1.0;
        field_check("medium", [&] { m.validate(); });
        s.medium = m;
    } else {
        for (const char* k : lorentz_keys)
            if (r.has(k)) throw ConfigError(std::string(k) + ": only valid with medium.model = lorentz", k);
        if (!r.has("medium.eps")) throw ConfigError("medium.eps: required for medium.model = fixed", "medium.eps");
        FixedResponse f;
        f.eps = {r.quantity("medium.eps", 1.0), r.quantity("medium.eps_imag", 0.0)};
        f.mu = {r.quantity("medium.mu", 1.0), r.quantity("medium.mu_imag", 0.0)};
        if (f.eps.imag() < 0.0) throw ConfigError("medium.eps_imag: must be >= 0 (passive medium)", "medium.eps_imag");
        if (f.mu.imag() < 0.0) throw ConfigError("medium.mu_imag: must be >= 0 (passive medium)", "medium.mu_imag");
        if (std::abs(f.mu) == 0.0) throw ConfigError("medium.mu: must be nonzero", "medium.mu");
        s.medium = f;
    }

    // particle
    s.particle.charge = r.quantity("particle.charge", constants::e);
    s.particle.mass = r.quantity("particle.mass", constants::m_e);
    if (!r.has("particle.beta")) throw ConfigError("particle.beta: required", "particle.beta");
    s.particle.beta = r.quantity("particle.beta", 0.0);
    s.particle.hbar_scale = r.quantity("particle.hbar_scale", 1.0);
    field_check("particle", [&] { s.particle.validate(); });

    // regime
    const std::string mech = r.word("regime.mechanics", "classical");
    s.regime.mechanics = mech == "classical"        ? Mechanics::classical
                         : mech == "nonrel_quantum" ? Mechanics::nonrel_quantum
                                                    : Mechanics::rel_quantum;
    s.regime.temperature = r.quantity("regime.temperature", 0.0);
    if (!(s.regime.temperature >= 0.0)) throw ConfigError("regime.temperature: must be >= 0", "regime.temperature");
    s.regime.medium_mode =
        r.word("regime.medium_mode", is_lossless(s.medium) ? "transparent" : "lossy") == "lossy" ? MediumMode::lossy
                                                                                                : MediumMode::transparent;
    if (s.regime.temperature > 0.0 && !(s.particle.hbar_scale > 0.0))
        throw ConfigError("particle.hbar_scale: must be > 0 when regime.temperature > 0", "particle.hbar_scale");

    // outputs
    if (r.has("outputs"))
        for (const auto& name : r.list("outputs")) {
            const Artifact a = parse_artifact(name, entries.at("outputs"));
            if (!wants(s, a)) s.outputs.push_back(a);
        }
    if (r.has("output_dir")) {
        if (r.raw("output_dir").empty()) throw ConfigError("output_dir: must not be empty", "output_dir");
        s.output_dir = r.raw("output_dir");
    }

    const bool transparent = s.regime.medium_mode == MediumMode::transparent;
    if (transparent) {
        if (!is_lossless(s.medium))
            throw ConfigError("regime.medium_mode: transparent mode needs a lossless medium (gamma = 0, real eps/mu)",
                              "regime.medium_mode");
        if (wants(s, Artifact::kernelmap))
            throw ConfigError("outputs: kernelmap needs regime.medium_mode = lossy (the transparent kernel is a "
                              "sum of delta functions)",
                              "outputs");
    } else if (is_lossless(s.medium) && (wants(s, Artifact::spectrum) || wants(s, Artifact::kernelmap))) {
        throw ConfigError("regime.medium_mode: lossy mode needs gamma_e > 0 or gamma_m > 0 (or eps/mu imaginary parts)",
                          "regime.medium_mode");
    }

    // domain
    IntegrationDomain& d = s.domain;
    d.relative_tolerance = r.quantity("domain.tolerance", 1e-6);
    d.bracket_refinement = static_cast<int>(r.integer("domain.bracket_refinement", d.bracket_refinement));
    d.omega_points = static_cast<int>(r.integer("domain.omega_points", d.omega_points));
    d.log_spacing = r.word("domain.spacing", "linear") == "log";
    const auto omega_max = r.quantity("domain.omega_max");
    const auto k_max = r.quantity("domain.k_max");
    const bool quantum = s.regime.mechanics != Mechanics::classical;
    const bool needs_band = wants(s, Artifact::spectrum) || wants(s, Artifact::kernelmap) ||
                            wants(s, Artifact::response) || wants(s, Artifact::thermalfactors);
    if (quantum && (!omega_max || (!k_max && !transparent))) {
        // caps from the recoil cutoff of the static index, else the kinematic limit
        const double n = static_index(s.medium);
        double wc = kinematic_limit_frequency(s.regime.mechanics, s.particle);
        if (n * s.particle.beta > 1.0) wc = std::min(wc, 1.05 * cutoff_frequency(s.regime.mechanics, s.particle, n));
        const double kk = (s.regime.mechanics == Mechanics::rel_quantum ? 2.0 * s.particle.momentum()
                                                                        : 2.0 * s.particle.mass * s.particle.speed()) /
                          s.particle.hbar();
        if (std::isfinite(wc) && std::isfinite(kk)) {
            d.omega_max = omega_max.value_or(wc);
            d.k_max = k_max.value_or(kk);
            s.caps_automatic = true;
        }
    }
    if (!s.caps_automatic) {
        d.omega_max = omega_max.value_or(0.0);
        d.k_max = k_max.value_or(0.0);
    }
    d.omega_min = r.quantity("domain.omega_min", d.log_spacing ? d.omega_max * 1e-3 : 0.0);
    const bool needs_k = !transparent && (wants(s, Artifact::spectrum));
    if (needs_band && !(d.omega_max > 0.0))
        throw ConfigError("domain.omega_max: required by the requested outputs", "domain.omega_max");
    if (needs_k && !(d.k_max > 0.0))
        throw ConfigError("domain.k_max: required for a classical lossy spectrum (the k-integral diverges without a "
                          "cap)",
                          "domain.k_max");
    if (needs_band) field_check("domain", [&] { d.validate(needs_k); });
    else if (!(d.relative_tolerance > 1e-12 && d.relative_tolerance < 1e-2))
        throw ConfigError("domain.tolerance: must lie in (1e-12, 1e-2)", "domain.tolerance");

    // k grid
    KGrid& g = s.kgrid;
    g.present = r.has("kgrid.k_max");
    g.k_max = r.quantity("kgrid.k_max", 0.0);
    g.points = static_cast<int>(r.integer("kgrid.points", 50));
    g.log_spacing = r.word("kgrid.spacing", "log") == "log";
    g.k_min = r.quantity("kgrid.k_min", g.k_max * 1e-2);
    const bool needs_kgrid = wants(s, Artifact::branches) || wants(s, Artifact::sumrules) || wants(s, Artifact::kernelmap);
    if (needs_kgrid) {
        if (!g.present) throw ConfigError("kgrid.k_max: required by branches/sumrules/kernelmap", "kgrid.k_max");
        if (!(g.k_min > 0.0 && g.k_max > g.k_min))
            throw ConfigError("kgrid.k_min: need 0 < kgrid.k_min < kgrid.k_max", "kgrid.k_min");
        if (g.points < 1) throw ConfigError("kgrid.points: must be >= 1", "kgrid.points");
        if (const auto* f = std::get_if<FixedResponse>(&s.medium);
            f && (wants(s, Artifact::branches) || wants(s, Artifact::sumrules)) &&
            (f->eps.imag() != 0.0 || f->mu.imag() != 0.0))
            throw ConfigError("medium.eps_imag: branches need a causal medium; a constant complex eps/mu has no "
                              "dispersion relation (use medium.model = lorentz)",
                              "medium.eps_imag");
    }

    // thermal
    s.thermal.temperature = s.regime.temperature;
    s.thermal.matsubara_count = r.integer("thermal.matsubara_count", s.thermal.matsubara_count);
    s.thermal.tail_policy =
        r.word("thermal.tail_policy", "integral_tail") == "none" ? TailPolicy::none : TailPolicy::integral_tail;
    s.matsubara = r.word("thermal.matsubara", "false") == "true";
    field_check("thermal", [&] { s.thermal.validate(); });
    if (s.matsubara && (s.regime.mechanics != Mechanics::classical || transparent || !(s.regime.temperature > 0.0)))
        throw ConfigError("thermal.matsubara: needs a classical lossy regime at regime.temperature > 0",
                          "thermal.matsubara");

    return s;
}

Entries with_value(Entries e, const std::string& key, const std::string& value) {
    const Entry ref = e.count("sweep.values") ? e.at("sweep.values") : Entry{};
    e[key] = {value, ref.line, ref.column};
    e.erase("sweep.key");
    e.erase("sweep.values");
    return e;
}

// ---------------------------------------------------------------- running

json medium_json(const Medium& m) {
    if (const auto* l = std::get_if<LorentzMedium>(&m))
        return {{"model", "lorentz"},          {"omega_pe_rad_s", l->omega_pe}, {"omega_0e_rad_s", l->omega_0e},
                {"gamma_e_rad_s", l->gamma_e}, {"omega_pm_rad_s", l->omega_pm}, {"omega_0m_rad_s", l->omega_0m},
                {"gamma_m_rad_s", l->gamma_m}};
    const auto& f = std::get<FixedResponse>(m);
    return {{"model", "fixed"}, {"eps", {f.eps.real(), f.eps.imag()}}, {"mu", {f.mu.real(), f.mu.imag()}}};
}

json number(double x) { return std::isfinite(x) ? json(x) : json(io::format_number(x)); }

json scenario_json(const Scenario& s) {
    const auto& d = s.domain;
    return {{"medium", medium_json(s.medium)},
            {"particle",
             {{"charge_C", s.particle.charge},
              {"mass_kg", s.particle.mass},
              {"beta", s.particle.beta},
              {"hbar_scale", s.particle.hbar_scale}}},
            {"regime",
             {{"mechanics", to_string(s.regime.mechanics)},
              {"temperature_K", s.regime.temperature},
              {"medium_mode", to_string(s.regime.medium_mode)}}},
            {"domain",
             {{"omega_min_rad_s", d.omega_min},
              {"omega_max_rad_s", d.omega_max},
              {"k_max_rad_m", d.k_max},
              {"tolerance", d.relative_tolerance},
              {"bracket_refinement", d.bracket_refinement},
              {"omega_points", d.omega_points},
              {"spacing", d.log_spacing ? "log" : "linear"},
              {"caps", s.caps_automatic ? "automatic" : "user"}}}};
}

struct Staged {
    std::vector<std::pair<std::string, std::string>> files;  // name, content
    std::vector<std::string> warnings;
    json totals = json::object();
};

void add_warnings(Staged& st, const std::string& context, const std::vector<std::string>& ws) {
    for (const auto& w : ws) st.warnings.push_back(context + ": " + w);
}

void compute_spectrum(const Scenario& s, Staged& st) {
    Spectrum sp;
    std::optional<MatsubaraTotal> mats;
    const bool classical = s.regime.mechanics == Mechanics::classical;
    if (s.regime.medium_mode == MediumMode::lossy) {
        sp = classical ? power_classical_lossy(s.medium, s.particle, s.domain, s.regime.temperature)
                       : power_quantum(s.medium, s.particle, s.domain, s.regime);
        if (s.matsubara) mats = power_classical_matsubara(s.medium, s.particle, s.domain, s.thermal);
    } else {
        TransparentMedium tm;
        if (const auto* l = std::get_if<LorentzMedium>(&s.medium)) {
            tm = TransparentMedium::from_lorentz(*l);
        } else {
            const auto& f = std::get<FixedResponse>(s.medium);
            const double n2 = (f.eps * f.mu).real();
            if (!(n2 > 0.0)) throw DomainError("medium: transparent mode needs eps * mu > 0");
            tm = TransparentMedium::constant(std::sqrt(n2), f.mu.real());
        }
        sp = classical ? power_classical_transparent(tm, s.particle, s.domain, s.regime.temperature)
                       : power_quantum_transparent(tm, s.particle, s.domain, s.regime);
    }
    sp.cutoffs.automatic = s.caps_automatic;
    add_warnings(st, "spectrum", sp.warnings);
    if (sp.cap_dependent) st.warnings.push_back("spectrum: total depends on the domain caps (omega_max, k_max)");

    st.files.emplace_back("spectrum.csv", io::spectrum_csv(sp).str());
    json j = {{"regime",
               {{"mechanics", to_string(sp.regime.mechanics)},
                {"temperature_K", sp.regime.temperature},
                {"medium_mode", to_string(sp.regime.medium_mode)}}},
              {"medium", medium_json(s.medium)},
              {"cutoffs",
               {{"omega_min_rad_s", sp.cutoffs.omega_min},
                {"omega_max_rad_s", sp.cutoffs.omega_max},
                {"k_max_rad_m", sp.cutoffs.k_max},
                {"omega_cutoff_rad_s", number(sp.cutoffs.omega_cutoff)},
                {"caps", sp.cutoffs.automatic ? "automatic" : "user"}}},
              {"total_W", sp.total},
              {"total_error_W", sp.total_error},
              {"cap_dependent", sp.cap_dependent},
              {"omega", sp.omega_grid},
              {"density", sp.density},
              {"error", sp.error_estimate}};
    json comps = json::array();
    for (const auto& c : sp.components) comps.push_back({{"name", c.name}, {"total_W", c.total}, {"density", c.density}});
    j["components"] = comps;
    st.totals["spectrum_total_W"] = sp.total;
    st.totals["spectrum_total_error_W"] = sp.total_error;
    st.totals["cap_dependent"] = sp.cap_dependent;
    if (mats) {
        j["matsubara"] = {{"total_W", mats->total},
                          {"mode_sum_W", mats->mode_sum},
                          {"tail_W", mats->tail},
                          {"error_estimate_W", mats->error_estimate},
                          {"terms", mats->terms}};
        st.totals["matsubara_total_W"] = mats->total;
        add_warnings(st, "matsubara", mats->warnings);
    }
    st.files.emplace_back("spectrum.json", j.dump(2) + "\n");
}

void compute_branch_outputs(const Scenario& s, Staged& st) {
    std::vector<double> ks = s.kgrid.values();
    std::vector<BranchSet> sets(ks.size());
    parallel_for(ks.size(), s.domain.jobs, [&](std::size_t i) { sets[i] = solve_branches(s.medium, ks[i]); });
    for (const auto& set : sets) add_warnings(st, "branches", set.warnings);
    if (wants(s, Artifact::branches)) st.files.emplace_back("branches.csv", io::branches_csv(sets).str());
    if (wants(s, Artifact::sumrules)) {
        io::CsvTable t = io::sumrules_csv(sets);
        double worst = 0.0;
        for (const auto& set : sets) {
            const auto r = sum_rules(set);
            worst = std::max({worst, r.s1, r.s2, r.s3});
        }
        st.totals["sumrules_max_residual"] = worst;
        st.files.emplace_back("sumrules.csv", t.str());
    }
}

void compute_kernelmap(const Scenario& s, Staged& st) {
    io::CsvTable t({"omega", "k", "K"});
    const auto omegas = s.domain.grid();
    const auto ks = s.kgrid.values();
    for (double w : omegas) {
        if (w <= 0.0) continue;
        for (double k : ks) t.add_row({w, k, spectral_kernel(s.medium, w, k)});
    }
    st.files.emplace_back("kernelmap.csv", t.str());
}

void compute_response(const Scenario& s, Staged& st) {
    io::CsvTable t({"omega", "eps_re", "eps_im", "mu_re", "mu_im", "kappa_re", "kappa_im", "chi_e_re", "chi_e_im",
                    "chi_m_re", "chi_m_im"});
    for (double w : s.domain.grid()) {
        const ResponseSample r = sample_response(s.medium, w);
        t.add_row({w, r.eps.real(), r.eps.imag(), r.mu.real(), r.mu.imag(), r.kappa.real(), r.kappa.imag(),
                   r.chi_e.real(), r.chi_e.imag(), r.chi_m.real(), r.chi_m.imag()});
    }
    st.files.emplace_back("response.csv", t.str());
}

void compute_thermalfactors(const Scenario& s, Staged& st) {
    io::CsvTable t({"omega", "bose", "coth", "coth_half_exponent", "f_t", "f_t_reflected"});
    const double T = s.regime.temperature, lam = s.particle.hbar_scale, eq = s.particle.energy();
    int reflected = 0;
    for (double w : s.domain.grid()) {
        if (w <= 0.0) continue;
        const bool refl = f_t_reflected(w, eq, lam);
        reflected += (refl && T > 0.0);
        t.add_row({w, bose_occupation(w, T, lam), coth_weight(w, T, lam), coth_weight_half_exponent(w, T, lam),
                   f_t_factor(w, T, eq, lam), refl ? 1.0 : 0.0});
    }
    if (reflected)
        st.warnings.push_back("thermalfactors: F_T evaluated with |E_q - hbar*omega| on the reflected branch in " +
                              std::to_string(reflected) + " rows");
    st.files.emplace_back("thermalfactors.csv", t.str());
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> dedupe(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& w : in)
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    return out;
}

// Writes everything into a sibling staging directory, then renames each
// file into place; manifest last, so its presence marks a complete run.
void promote(const fs::path& target, const Staged& st, const std::string& manifest) {
    const fs::path parent = target.has_parent_path() ? target.parent_path() : fs::path(".");
    fs::create_directories(parent);
    const fs::path stage = parent / (".staging-" + target.filename().string() + "-" + std::to_string(::getpid()));
    fs::remove_all(stage);
    fs::create_directories(stage);
    try {
        for (const auto& [name, content] : st.files) io::write_text(stage / name, content);
        io::write_text(stage / "manifest.json", manifest);
        fs::create_directories(target);
        for (const auto& [name, content] : st.files) fs::rename(stage / name, target / name);
        fs::rename(stage / "manifest.json", target / "manifest.json");
    } catch (...) {
        std::error_code ec;
        fs::remove_all(stage, ec);
        throw;
    }
    fs::remove_all(stage);
}

template <typename F>
void in_context(const char* artifact, F&& f) {
    try {
        f();
    } catch (const std::exception& ex) {
        throw std::runtime_error(std::string("outputs.") + artifact + ": " + ex.what());
    }
}

std::vector<std::string> run_one(const Scenario& s, const fs::path& dir, const json& sweep_info) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    Staged st;
    if (wants(s, Artifact::spectrum)) in_context("spectrum", [&] { compute_spectrum(s, st); });
    if (wants(s, Artifact::branches) || wants(s, Artifact::sumrules))
        in_context("branches", [&] { compute_branch_outputs(s, st); });
    if (wants(s, Artifact::kernelmap)) in_context("kernelmap", [&] { compute_kernelmap(s, st); });
    if (wants(s, Artifact::response)) in_context("response", [&] { compute_response(s, st); });
    if (wants(s, Artifact::thermalfactors)) in_context("thermalfactors", [&] { compute_thermalfactors(s, st); });
    st.warnings = dedupe(st.warnings);

    json artifacts = json::array();
    for (const auto& f : st.files) artifacts.push_back(f.first);
    json requested = json::array();
    for (Artifact a : s.outputs) requested.push_back(to_string(a));
    const json manifest = {
        {"tool", "cherenkov"},
        {"version", tool_version},
        {"input_hash_fnv1a64", io::fnv1a_hex(s.source_text)},
        {"sweep", sweep_info},
        {"started_utc", started},
        {"wall_time_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
        {"scenario", scenario_json(s)},
        {"outputs", requested},
        {"artifacts", artifacts},
        {"totals", st.totals},
        {"warnings", st.warnings},
    };
    promote(dir, st, manifest.dump(2) + "\n");
    return st.warnings;
}

}  // namespace

const char* to_string(Artifact a) {
    switch (a) {
        case Artifact::spectrum: return "spectrum";
        case Artifact::branches: return "branches";
        case Artifact::sumrules: return "sumrules";
        case Artifact::kernelmap: return "kernelmap";
        case Artifact::response: return "response";
        case Artifact::thermalfactors: return "thermalfactors";
    }
    return "?";
}

std::vector<double> KGrid::values() const {
    std::vector<double> out;
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
        out.push_back(log_spacing ? k_min * std::pow(k_max / k_min, t) : k_min + t * (k_max - k_min));
    }
    if (!out.empty()) out.back() = k_max;
    return out;
}

Scenario parse_scenario(const std::string& text) {
    const Entries entries = tokenize(text);
    if (!entries.count("sweep.key") && !entries.count("sweep.values")) {
        Scenario s = build(entries);
        s.source_text = text;
        return s;
    }
    if (!entries.count("sweep.key") || !entries.count("sweep.values"))
        throw ConfigError("sweep.key: sweep.key and sweep.values must be given together", "sweep.key");
    Sweep sw{entries.at("sweep.key").value, split_list(entries.at("sweep.values").value)};
    if (!key_table().count(sw.key) || sw.key.rfind("sweep.", 0) == 0 || sw.key == "outputs" || sw.key == "output_dir")
        Reader::fail("sweep.key", entries.at("sweep.key"), "'" + sw.key + "' is not a sweepable key");
    if (sw.values.empty()) Reader::fail("sweep.values", entries.at("sweep.values"), "must list at least one value");
    // every sweep point is validated up front, before anything is computed
    Scenario s;
    for (std::size_t i = 0; i < sw.values.size(); ++i) {
        Scenario point = build(with_value(entries, sw.key, sw.values[i]));
        if (i == 0) s = std::move(point);
    }
    s.sweep = std::move(sw);
    s.source_text = text;
    return s;
}

RunReport run_scenario(const Scenario& scenario, const RunOptions& opts) {
    Scenario base = scenario;
    if (opts.output_dir) base.output_dir = *opts.output_dir;
    if (opts.tolerance) {
        if (!(*opts.tolerance > 1e-12 && *opts.tolerance < 1e-2))
            throw ConfigError("--tol: must lie in (1e-12, 1e-2)", "domain.tolerance");
        base.domain.relative_tolerance = *opts.tolerance;
    }
    if (opts.jobs) {
        if (*opts.jobs < 1) throw ConfigError("--jobs: must be >= 1", "jobs");
        base.domain.jobs = *opts.jobs;
    }

    RunReport report;
    if (!base.sweep) {
        report.warnings = run_one(base, base.output_dir, nullptr);
        report.directories.push_back(base.output_dir);
        return report;
    }
    const Entries entries = tokenize(base.source_text);
    const Sweep& sw = *base.sweep;
    for (std::size_t i = 0; i < sw.values.size(); ++i) {
        Scenario point = build(with_value(entries, sw.key, sw.values[i]));
        point.source_text = base.source_text;
        point.domain.relative_tolerance = base.domain.relative_tolerance;
        point.domain.jobs = base.domain.jobs;
        char name[32];
        std::snprintf(name, sizeof name, "sweep_%03zu", i);
        const fs::path dir = base.output_dir / name;
        const json info = {{"key", sw.key}, {"value", sw.values[i]}, {"index", i}};
        for (auto& w : run_one(point, dir, info)) report.warnings.push_back(std::string(name) + ": " + w);
        report.directories.push_back(dir);
    }
    return report;
}

const std::vector<ExampleConfig>& example_configs() {
    static const std::vector<ExampleConfig> examples = {
        {"frank_tamm", "classical spectrum of an electron at beta = 0.9 in a weakly absorbing n = 1.5 dielectric",
         R"(# Lorentz dielectric with static eps = 2.25, probed far below resonance
medium.model = lorentz
medium.omega_pe = 1.1180339887498949e16 rad_s
medium.omega_0e = 1.0e16 rad_s
medium.gamma_e = 1.0e12 rad_s

particle.beta = 0.9
regime.mechanics = classical

domain.omega_min = 2.0e13 rad_s
domain.omega_max = 2.0e14 rad_s
domain.k_max = 1.0e7 rad_m
domain.omega_points = 41
domain.spacing = log

outputs = spectrum, response
output_dir = out/frank_tamm
)"},
        {"quantum_cutoff", "relativistic recoil cutoff in a transparent n = 1.5 medium (hbar*omega_c = 0.6565 MeV)",
         R"(medium.model = fixed
medium.eps = 2.25
medium.mu = 1

particle.beta = 0.9
regime.mechanics = rel_quantum
regime.medium_mode = transparent

domain.omega_min = 0.01 MeV
domain.omega_max = 1.0 MeV
domain.omega_points = 200

outputs = spectrum
output_dir = out/quantum_cutoff
)"},
        {"sumrules", "dispersion branches and velocity sum rules of a lossy magnetodielectric",
         R"(medium.model = lorentz
medium.omega_pe = 1.0e15 rad_s
medium.omega_0e = 2.0e15 rad_s
medium.gamma_e = 1.0e14 rad_s
medium.omega_pm = 1.0e15 rad_s
medium.omega_0m = 2.0e15 rad_s
medium.gamma_m = 1.0e14 rad_s

particle.beta = 0.9

kgrid.k_min = 667128.19 rad_m
kgrid.k_max = 66712819 rad_m
kgrid.points = 50

outputs = branches, sumrules
output_dir = out/sumrules
)"},
        {"thermal", "classical thermal spectrum with the Matsubara cross-check at k_B T = hbar*omega_0e",
         R"(medium.model = lorentz
medium.omega_pe = 1.0e15 rad_s
medium.omega_0e = 2.0e15 rad_s
medium.gamma_e = 1.0e14 rad_s

particle.beta = 0.9
regime.mechanics = classical
regime.temperature = 15278.6 K

domain.omega_min = 0 rad_s
domain.omega_max = 2.0e16 rad_s
domain.k_max = 6.7e8 rad_m
domain.omega_points = 101

thermal.matsubara = true
thermal.matsubara_count = 10000

outputs = spectrum, thermalfactors
output_dir = out/thermal
)"},
        {"beta_sweep", "Frank-Tamm spectrum over a velocity sweep",
         R"(medium.model = fixed
medium.eps = 2.25

particle.beta = 0.9
regime.mechanics = classical
regime.medium_mode = transparent

domain.omega_min = 1.0e14 rad_s
domain.omega_max = 1.0e15 rad_s
domain.omega_points = 10

outputs = spectrum
output_dir = out/beta_sweep
sweep.key = particle.beta
sweep.values = 0.6, 0.7, 0.8, 0.9
)"},
    };
    return examples;
}

}  // namespace cherenkov
