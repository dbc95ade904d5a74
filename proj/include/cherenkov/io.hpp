#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cherenkov/dispersion.hpp"
#include "cherenkov/power.hpp"

namespace cherenkov::io {

// Round-trip decimal: 17 significant digits, no locale.
std::string format_number(double x);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add_row(const std::vector<double>& row);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

// omega, density, error, cumulative (trapezoid), then one column per component.
CsvTable spectrum_csv(const Spectrum& s);
CsvTable branches_csv(const std::vector<BranchSet>& sets);
CsvTable sumrules_csv(const std::vector<BranchSet>& sets);

void write_text(const std::filesystem::path& path, const std::string& text);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace cherenkov::io
