// Minimal TOML-style configuration: [sections], key = value with strings,
// numbers, booleans and flat arrays.  Keys are flattened to "section.key".
#pragma once

#include <map>
#include <string>
#include <vector>

namespace subbg {

class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;

    double get_number(const std::string& key) const;
    double get_number(const std::string& key, double fallback) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_numbers(const std::string& key) const;

    // CLI overrides in key=value form
    void override_entry(const std::string& key, const std::string& value);

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;  // raw value text
    std::map<std::string, int> lines_;       // for error messages
    std::string origin_;
    [[noreturn]] void fail(const std::string& key, const std::string& why) const;
};

}  // namespace subbg
