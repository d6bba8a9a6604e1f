#include "subbg/config.hh"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subbg {

namespace {
std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}
}  // namespace

Config Config::parse_string(const std::string& text,
                            const std::string& origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(origin + ":" + std::to_string(lineno)
                                         + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno)
                                     + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno)
                                     + ": empty key or value");
        if (!section.empty()) key = section + "." + key;
        c.kv_[key] = val;
        c.lines_[key] = lineno;
    }
    return c;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str(), path);
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

void Config::fail(const std::string& key, const std::string& why) const {
    auto it = lines_.find(key);
    std::string where = origin_;
    if (it != lines_.end()) where += ":" + std::to_string(it->second);
    throw std::runtime_error(where + ": key '" + key + "' " + why);
}

double Config::get_number(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) fail(key, "is missing");
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        fail(key, "is not a number: " + it->second);
    }
}

double Config::get_number(const std::string& key, double fallback) const {
    return has(key) ? get_number(key) : fallback;
}

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) fail(key, "is missing");
    std::string v = it->second;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = kv_.at(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(key, "is not a boolean: " + v);
}

std::vector<double> Config::get_numbers(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) fail(key, "is missing");
    std::string v = it->second;
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        fail(key, "is not an array: " + v);
    std::vector<double> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) continue;
        try {
            out.push_back(std::stod(cell));
        } catch (...) {
            fail(key, "has a non-numeric element: " + cell);
        }
    }
    return out;
}

void Config::override_entry(const std::string& key, const std::string& value) {
    kv_[key] = value;
}

}  // namespace subbg
