#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace spinchain {

const char* version_string();

// Shortest round-trip text form of a double, 17 significant digits.
std::string format_double(double v);

using CsvCell = std::variant<double, long long, std::string>;

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<CsvCell> cells);
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }
    std::string str() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<CsvCell>> rows_;
};

// Throws std::runtime_error naming the path on failure.
void write_text(const std::string& path, const std::string& text);
void write_csv(const std::string& path, const CsvTable& table);
void write_json(const std::string& path, const nlohmann::json& j);

// Sidecar for an output file: command, config, seed, version, wall-clock.
nlohmann::json run_metadata(const std::string& command, const nlohmann::json& config);

// "<stem>.json" next to a CSV path ("out.csv" -> "out.json").
std::string sidecar_path(const std::string& csv_path);

// Plain key = value lines; '#' starts a comment, blank lines are skipped.
// Throws std::runtime_error on unreadable files or malformed lines.
std::map<std::string, std::string> read_key_value_file(const std::string& path);

}  // namespace spinchain
