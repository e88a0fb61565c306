#ifndef CMIX_CSV_HPP
#define CMIX_CSV_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace cmix {

// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

// Minimal CSV emitter: one optional '#' comment line, one header line,
// then data rows. No quoting; cell content must not contain commas.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void comment(const std::string& text);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(std::uint64_t v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(const std::string& v) { return v; }

private:
    std::ostream& out_;
};

}  // namespace cmix

#endif
