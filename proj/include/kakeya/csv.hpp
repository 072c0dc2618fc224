#pragma once

#include <string>
#include <vector>

#include "kakeya/errors.hpp"

namespace kakeya {

// Deterministic number formatting shared by every artifact writer.
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const; // -1 when missing
};

// Header row, comma separators, UTF-8, LF line endings.
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

} // namespace kakeya
