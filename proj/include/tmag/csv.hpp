#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "tmag/errors.hpp"

namespace tmag {

// Round-trip-exact, locale-independent number formatting. All file output
// goes through this so reports are byte-stable.
std::string fmt_num(double v);

struct CsvDoc {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Strict reader: '#' lines are metadata, the first real line must equal the
// expected header, every row must parse as doubles. Errors carry the line
// number.
CsvDoc read_csv(const std::string& path, const std::vector<std::string>& expected_columns);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& meta_line,
              const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void close();
    ~CsvWriter();

private:
    std::ofstream out_;
    std::string path_;
    std::size_t n_columns_;
};

} // namespace tmag
