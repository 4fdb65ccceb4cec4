#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace t1forge::cli {

/// Header-addressed CSV table. Fields are unquoted; commas inside fields are
/// not supported.
class CsvTable {
public:
    static CsvTable parse(std::string_view text);

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    bool has_column(std::string_view name) const;

    /// Empty string when the column is absent.
    const std::string& cell(std::size_t row, std::string_view column) const;
    std::optional<double> number(std::size_t row, std::string_view column) const;

private:
    std::vector<std::string> header_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::vector<std::string>> rows_;
};

std::vector<std::string> split_csv_line(std::string_view line);

/// Fixed-precision number formatting for deterministic tables.
std::string format_number(double v, int precision = 6);

}  // namespace t1forge::cli
