#pragma once

#include <filesystem>
#include <map>

#include "qmem/field.hpp"

namespace qmem {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const;  // throws DataError
    std::vector<double> column(const std::string& name) const;
    std::vector<double> column(std::size_t i) const;
};

// Reads a comma-separated table with a mandatory header row. '#' lines are
// skipped.
CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// Spectrum CSV: columns `omega_or_wavelength, amplitude[, phase]` with the
// frequency unit declared in the first header token (rad/s, GHz or nm).
// Output omega is always rad/s, ascending.
SpectralField load_spectrum_csv(const std::filesystem::path& path);

// Flat key=value configuration with [section] headers. Keys are addressed as
// "section.key".
struct Config {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    std::string require(const std::string& key) const;  // throws ConfigError naming the key
    double require_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    // Serializes sections and keys in sorted order; parse(serialize()) is the
    // identity.
    std::string serialize() const;
};

Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

// FNV-1a 64-bit digest, hex-encoded; used for config and input fingerprints.
std::string fnv1a_hex(const std::string& bytes);
std::string file_digest(const std::filesystem::path& path);

}  // namespace qmem
