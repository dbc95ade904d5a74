#include "cherenkov/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace cherenkov::io {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

void CsvTable::add_row(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw std::logic_error("CsvTable: row width does not match header");
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) line += ',';
        line += format_number(row[i]);
    }
    rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        out += r;
        out += '\n';
    }
    return out;
}

CsvTable spectrum_csv(const Spectrum& s) {
    std::vector<std::string> header{"omega", "density", "error", "cumulative"};
    for (const auto& c : s.components) header.push_back(c.name);
    CsvTable t(header);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < s.omega_grid.size(); ++i) {
        if (i) cumulative += 0.5 * (s.omega_grid[i] - s.omega_grid[i - 1]) * (s.density[i] + s.density[i - 1]);
        std::vector<double> row{s.omega_grid[i], s.density[i], s.error_estimate[i], cumulative};
        for (const auto& c : s.components) row.push_back(c.density[i]);
        t.add_row(row);
    }
    return t;
}

CsvTable branches_csv(const std::vector<BranchSet>& sets) {
    CsvTable t({"k", "branch", "omega_re", "omega_im", "v_g_re", "v_g_im", "v_p_re", "v_p_im", "weight",
                "damping_time"});
    for (const auto& set : sets)
        for (std::size_t j = 0; j < set.branches.size(); ++j) {
            const auto& b = set.branches[j];
            t.add_row({set.k, static_cast<double>(j), b.omega.real(), b.omega.imag(), b.v_g.real(), b.v_g.imag(),
                       b.v_p.real(), b.v_p.imag(), b.weight, b.damping_time});
        }
    return t;
}

CsvTable sumrules_csv(const std::vector<BranchSet>& sets) {
    CsvTable t({"k", "branches", "S1", "S2", "S3"});
    for (const auto& set : sets) {
        const SumRuleResiduals r = sum_rules(set);
        t.add_row({set.k, static_cast<double>(set.branches.size()), r.s1, r.s2, r.s3});
    }
    return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    f.close();
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

}  // namespace cherenkov::io
