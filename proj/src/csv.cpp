#include "tmag/csv.hpp"

#include <cstdlib>
#include <sstream>

namespace tmag {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {
std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}
} // namespace

CsvDoc read_csv(const std::string& path, const std::vector<std::string>& expected_columns) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    CsvDoc doc;
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_fields(line);
        if (!header_seen) {
            if (fields.size() != expected_columns.size())
                throw ValidationError(path + ":" + std::to_string(line_no) +
                                      ": expected " + std::to_string(expected_columns.size()) +
                                      " columns in header");
            for (std::size_t i = 0; i < fields.size(); ++i)
                if (fields[i] != expected_columns[i])
                    throw ValidationError(path + ":" + std::to_string(line_no) +
                                          ": expected column '" + expected_columns[i] +
                                          "', found '" + fields[i] + "'");
            doc.columns = expected_columns;
            header_seen = true;
            continue;
        }
        if (fields.size() != expected_columns.size())
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": wrong field count");
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const char* s = fields[i].c_str();
            char* end = nullptr;
            row[i] = std::strtod(s, &end);
            if (end == s || *end != '\0')
                throw ValidationError(path + ":" + std::to_string(line_no) +
                                      ": cannot parse '" + fields[i] + "' as a number");
        }
        doc.rows.push_back(std::move(row));
    }
    if (!header_seen) throw ValidationError(path + ": missing CSV header");
    return doc;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& meta_line,
                     const std::vector<std::string>& columns)
    : out_(path), path_(path), n_columns_(columns.size()) {
    if (!out_) throw IoError("cannot write " + path);
    out_ << "# " << meta_line << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != n_columns_) throw Error("CSV row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << fmt_num(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::close() {
    if (out_.is_open()) {
        out_.flush();
        if (!out_) throw IoError("write failure on " + path_);
        out_.close();
    }
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

} // namespace tmag
