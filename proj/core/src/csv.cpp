#include "cmix/csv.hpp"

#include <cstdio>

namespace cmix {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvWriter::comment(const std::string& text) {
    out_ << "# " << text << '\n';
}

void CsvWriter::header(const std::vector<std::string>& names) {
    row(names);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

}  // namespace cmix
