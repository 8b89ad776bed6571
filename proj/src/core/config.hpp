#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace sb {

/// Strict sectioned key-value config. Duplicate keys are allowed (ordered);
/// unknown sections or keys are hard errors at schema-check time, with
/// line/key diagnostics.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has_section(const std::string& section) const;
    bool has_key(const std::string& section, const std::string& key) const;

    /// single-valued lookup; ParseError if missing or repeated
    const std::string& get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

    /// all values for a repeatable key, in file order
    std::vector<std::string> get_all(const std::string& section, const std::string& key) const;

    /// Errors unless every present section is listed and every key of each
    /// section is in the allowed set. allowed: {section -> {keys...}}.
    void check_schema(
        const std::vector<std::pair<std::string, std::vector<std::string>>>& allowed) const;

    /// FNV-1a hash of the raw text, embedded in output artifacts.
    std::uint64_t content_hash() const { return hash_; }
    const std::string& raw_text() const { return raw_; }

private:
    struct Entry {
        std::string section, key, value;
        int line;
    };
    std::vector<Entry> entries_;
    std::vector<std::string> sections_;
    std::string origin_;
    std::string raw_;
    std::uint64_t hash_ = 0;
};

}  // namespace sb
