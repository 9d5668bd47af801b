#include "banditsim/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace banditsim {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << names[i];
    }
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (row_open_) out_ << ',';
    out_ << v;
    row_open_ = true;
    return *this;
}

CsvWriter& CsvWriter::cell(long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

void CsvWriter::end_row() {
    out_ << '\n';
    row_open_ = false;
}

}  // namespace banditsim
