#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace sb {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    cfg.raw_ = text;
    cfg.hash_ = fnv1a(text);
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw Error(ErrorCode::ParseError,
                            origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw Error(ErrorCode::ParseError,
                            origin + ":" + std::to_string(lineno) + ": empty section name");
            if (std::find(cfg.sections_.begin(), cfg.sections_.end(), section) ==
                cfg.sections_.end())
                cfg.sections_.push_back(section);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError,
                        origin + ":" + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw Error(ErrorCode::ParseError,
                        origin + ":" + std::to_string(lineno) + ": key outside any section");
        cfg.entries_.push_back({section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno});
    }
    return cfg;
}

bool Config::has_section(const std::string& section) const {
    return std::find(sections_.begin(), sections_.end(), section) != sections_.end();
}

bool Config::has_key(const std::string& section, const std::string& key) const {
    for (const Entry& e : entries_)
        if (e.section == section && e.key == key) return true;
    return false;
}

const std::string& Config::get(const std::string& section, const std::string& key) const {
    const std::string* found = nullptr;
    for (const Entry& e : entries_) {
        if (e.section == section && e.key == key) {
            if (found)
                throw Error(ErrorCode::ParseError,
                            origin_ + ": key '" + key + "' repeated in [" + section + "]");
            found = &e.value;
        }
    }
    if (!found)
        throw Error(ErrorCode::ParseError,
                    origin_ + ": missing key '" + key + "' in [" + section + "]");
    return *found;
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has_key(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string& v = get(section, key);
    try {
        if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    origin_ + ": key '" + key + "' in [" + section + "] is not a number: " + v);
    }
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
    return has_key(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
    const double d = get_double(section, key);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw Error(ErrorCode::ParseError,
                    origin_ + ": key '" + key + "' in [" + section + "] is not an integer");
    return i;
}

int Config::get_int_or(const std::string& section, const std::string& key, int fallback) const {
    return has_key(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t Config::get_u64_or(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const {
    if (!has_key(section, key)) return fallback;
    const std::string& v = get(section, key);
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    origin_ + ": key '" + key + "' in [" + section + "] is not an unsigned integer");
    }
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
    const std::string& v = get(section, key);
    std::vector<double> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            out.push_back(std::stod(trim(item)));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError,
                        origin_ + ": bad number '" + item + "' in list key '" + key + "'");
        }
    }
    if (out.empty())
        throw Error(ErrorCode::ParseError, origin_ + ": empty list for key '" + key + "'");
    return out;
}

std::vector<std::string> Config::get_all(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    for (const Entry& e : entries_)
        if (e.section == section && e.key == key) out.push_back(e.value);
    return out;
}

void Config::check_schema(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& allowed) const {
    for (const std::string& s : sections_) {
        const auto it = std::find_if(allowed.begin(), allowed.end(),
                                     [&](const auto& p) { return p.first == s; });
        if (it == allowed.end())
            throw Error(ErrorCode::ParseError, origin_ + ": unknown section [" + s + "]");
    }
    for (const Entry& e : entries_) {
        const auto it = std::find_if(allowed.begin(), allowed.end(),
                                     [&](const auto& p) { return p.first == e.section; });
        if (it == allowed.end() ||
            std::find(it->second.begin(), it->second.end(), e.key) == it->second.end())
            throw Error(ErrorCode::ParseError, origin_ + ":" + std::to_string(e.line) +
                                                   ": unknown key '" + e.key + "' in [" +
                                                   e.section + "]");
    }
}

}  // namespace sb
