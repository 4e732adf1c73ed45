#include "qmem/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qmem {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
    return out;
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw DataError("CSV: missing column '" + name + "'");
}

std::vector<double> CsvTable::column(const std::string& name) const {
    return column(column_index(name));
}

std::vector<double> CsvTable::column(std::size_t i) const {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.at(i));
    return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path.string());
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (table.columns.empty()) {
            table.columns = split_csv_line(line);
            if (table.columns.empty()) throw DataError("CSV: empty header in " + path.string());
            continue;
        }
        const auto toks = split_csv_line(line);
        if (toks.size() != table.columns.size())
            throw DataError("CSV: row with " + std::to_string(toks.size()) +
                            " fields, expected " + std::to_string(table.columns.size()) +
                            " in " + path.string());
        std::vector<double> row;
        row.reserve(toks.size());
        for (const auto& t : toks) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(t, &pos));
                if (pos != t.size()) throw std::invalid_argument(t);
            } catch (const std::exception&) {
                throw DataError("CSV: non-numeric field '" + t + "' in " + path.string());
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.columns.empty()) throw DataError("CSV: no header row in " + path.string());
    return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write CSV file: " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    char buf[64];
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.12g", r[i]);
            out << buf << (i + 1 < r.size() ? "," : "\n");
        }
    }
}

SpectralField load_spectrum_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    if (t.columns.size() < 2 || t.columns.size() > 3)
        throw DataError("spectrum CSV must have 2 or 3 columns (axis, amplitude[, phase]): " +
                        path.string());
    std::string axis = t.columns[0];
    std::transform(axis.begin(), axis.end(), axis.begin(),
                   [](unsigned char c) { return std::tolower(c); });

    enum class Unit { RadPerS, GHz, Nm } unit;
    if (axis.find("rad") != std::string::npos) unit = Unit::RadPerS;
    else if (axis.find("ghz") != std::string::npos) unit = Unit::GHz;
    else if (axis.find("nm") != std::string::npos) unit = Unit::Nm;
    else
        throw DataError("spectrum CSV header must declare the axis unit (rad/s, GHz or nm): " +
                        path.string());

    struct Sample { double w, a, p; };
    std::vector<Sample> samples;
    samples.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        double w = r[0];
        switch (unit) {
            case Unit::RadPerS: break;
            case Unit::GHz: w = 2.0 * pi * w * 1e9; break;
            case Unit::Nm: w = 2.0 * pi * speed_of_light / (w * 1e-9); break;
        }
        samples.push_back({w, r[1], t.columns.size() == 3 ? r[2] : 0.0});
    }
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
        return a.w < b.w;
    });
    std::vector<double> w, a, p;
    for (const auto& s : samples) {
        w.push_back(s.w);
        a.push_back(s.a);
        p.push_back(s.p);
    }
    return SpectralField(std::move(w), std::move(a), std::move(p));
}

std::string Config::require(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing required config key: " + key);
    return it->second;
}

double Config::require_double(const std::string& key) const {
    const std::string v = require(key);
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + v);
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? require_double(key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    try {
        return std::stoi(require(key));
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = require(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + v);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? require(key) : fallback;
}

std::string Config::serialize() const {
    std::string out;
    std::string section;
    for (const auto& [key, value] : values) {  // std::map iterates sorted
        const auto dot = key.find('.');
        const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (sec != section || out.empty()) {
            if (!out.empty()) out += "\n";
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += name + " = " + value + "\n";
    }
    return out;
}

Config parse_config(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for digest: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

}  // namespace qmem
