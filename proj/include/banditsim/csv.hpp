#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace banditsim {

// 12 significant digits; enough to round-trip the quantities we emit while
// keeping output byte-stable across IEEE-754 double platforms.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void header(const std::vector<std::string>& names);

    CsvWriter& cell(const std::string& v);
    CsvWriter& cell(long v);
    CsvWriter& cell(int v) { return cell(static_cast<long>(v)); }
    CsvWriter& cell(double v);
    void end_row();

    const std::string& path() const { return path_; }

private:
    std::ofstream out_;
    std::string path_;
    bool row_open_ = false;
};

}  // namespace banditsim
