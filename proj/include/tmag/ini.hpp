#pragma once

#include <string>
#include <vector>

#include "tmag/errors.hpp"

namespace tmag {

// Minimal INI reader: [section] headers, key = value lines, '#' or ';'
// comments. Keys keep file order; duplicate keys within a section are
// rejected. Values are raw strings; typed access is the consumer's job.
struct IniDoc {
    struct Entry {
        std::string key;
        std::string value;
        long line = 0;
        mutable bool consumed = false;
    };
    struct Section {
        std::string name; // "" for the top level
        std::vector<Entry> entries;
    };

    std::vector<Section> sections;
    std::string origin; // path or "<string>"

    static IniDoc parse_file(const std::string& path);
    static IniDoc parse_string(const std::string& text, const std::string& origin);

    const Section* find(const std::string& name) const;
    // nullptr when absent; marks the entry consumed for unknown-key checks.
    const std::string* get(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    long get_long(const std::string& section, const std::string& key,
                  long fallback) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;

    // Throws ValidationError naming the first entry never consumed and any
    // section outside `allowed`.
    void reject_unknown(const std::vector<std::string>& allowed_sections) const;
};

} // namespace tmag
