#include "tmag/ini.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tmag {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
} // namespace

IniDoc IniDoc::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

IniDoc IniDoc::parse_string(const std::string& text, const std::string& origin) {
    IniDoc doc;
    doc.origin = origin;
    doc.sections.push_back({"", {}});
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ValidationError(origin + ":" + std::to_string(line_no) +
                                      ": unterminated section header");
            doc.sections.push_back({trim(t.substr(1, t.size() - 2)), {}});
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError(origin + ":" + std::to_string(line_no) +
                                  ": expected key = value");
        Entry e;
        e.key = trim(t.substr(0, eq));
        e.value = trim(t.substr(eq + 1));
        e.line = line_no;
        if (e.key.empty())
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": empty key");
        auto& sec = doc.sections.back();
        for (const auto& prev : sec.entries)
            if (prev.key == e.key)
                throw ValidationError(origin + ":" + std::to_string(line_no) +
                                      ": duplicate key '" + e.key + "'");
        sec.entries.push_back(std::move(e));
    }
    return doc;
}

const IniDoc::Section* IniDoc::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

const std::string* IniDoc::get(const std::string& section, const std::string& key) const {
    const Section* sec = find(section);
    if (!sec) return nullptr;
    for (const auto& e : sec->entries) {
        if (e.key == key) {
            e.consumed = true;
            return &e.value;
        }
    }
    return nullptr;
}

double IniDoc::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    const std::string* v = get(section, key);
    if (!v) return fallback;
    const char* s = v->c_str();
    char* end = nullptr;
    const double d = std::strtod(s, &end);
    if (end == s || *end != '\0')
        throw ValidationError(origin + ": key '" + key + "' in [" + section +
                              "]: cannot parse '" + *v + "' as a number");
    return d;
}

long IniDoc::get_long(const std::string& section, const std::string& key,
                      long fallback) const {
    const double d = get_double(section, key, static_cast<double>(fallback));
    const long l = static_cast<long>(d);
    if (static_cast<double>(l) != d)
        throw ValidationError(origin + ": key '" + key + "' in [" + section +
                              "] must be an integer");
    return l;
}

std::string IniDoc::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    const std::string* v = get(section, key);
    return v ? *v : fallback;
}

void IniDoc::reject_unknown(const std::vector<std::string>& allowed_sections) const {
    for (const auto& sec : sections) {
        if (sec.entries.empty() && sec.name.empty()) continue;
        const bool known =
            std::find(allowed_sections.begin(), allowed_sections.end(), sec.name) !=
            allowed_sections.end();
        if (!known)
            throw ValidationError(origin + ": unknown section [" + sec.name + "]");
        for (const auto& e : sec.entries)
            if (!e.consumed)
                throw ValidationError(origin + ":" + std::to_string(e.line) +
                                      ": unknown key '" + e.key + "' in [" + sec.name +
                                      "]");
    }
}

} // namespace tmag
