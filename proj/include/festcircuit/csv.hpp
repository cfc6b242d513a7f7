#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace festcircuit::csv {

using Row = std::vector<std::string>;

/// Header-row CSV reader. Handles quoted fields, embedded separators and
/// newlines, doubled quotes, and CRLF endings. Rows must match the header
/// width; anything else is reported with the source name and line number.
class Reader {
public:
    Reader(std::istream& in, std::string source_name);

    const Row& header() const { return header_; }
    int column(std::string_view name) const;
    int require_column(std::string_view name) const;

    /// Next data row, or nullopt at end of input.
    std::optional<Row> next();

    /// Physical line on which the last returned row started.
    std::size_t line_number() const { return row_line_; }

private:
    std::optional<Row> read_record();

    std::istream& in_;
    std::string source_;
    Row header_;
    std::size_t line_ = 0;
    std::size_t row_line_ = 0;
};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}
    void row(const Row& fields);

private:
    std::ostream& out_;
};

/// Fixed 6-fractional-digit decimal formatting used for all numeric output.
std::string fixed6(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

} // namespace festcircuit::csv
