#include "cli/csv.hpp"

#include <cstdio>
#include <cstdlib>

#include "t1forge/error.hpp"

namespace t1forge::cli {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
        out.emplace_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

CsvTable CsvTable::parse(std::string_view text) {
    CsvTable t;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_csv_line(line);
        if (!have_header) {
            t.header_ = std::move(fields);
            for (std::size_t i = 0; i < t.header_.size(); ++i) t.index_[t.header_[i]] = i;
            have_header = true;
            continue;
        }
        if (fields.size() > t.header_.size()) {
            throw Error(ErrorCode::FormatError, "CSV row has more fields than the header");
        }
        fields.resize(t.header_.size());
        t.rows_.push_back(std::move(fields));
    }
    if (!have_header) throw Error(ErrorCode::FormatError, "CSV has no header line");
    return t;
}

bool CsvTable::has_column(std::string_view name) const { return index_.find(name) != index_.end(); }

const std::string& CsvTable::cell(std::size_t row, std::string_view column) const {
    static const std::string empty;
    const auto it = index_.find(column);
    if (it == index_.end()) return empty;
    return rows_.at(row)[it->second];
}

std::optional<double> CsvTable::number(std::size_t row, std::string_view column) const {
    const std::string& s = cell(row, column);
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw Error(ErrorCode::FormatError, "column " + std::string(column) + ": '" + s + "' is not a number");
    }
    return v;
}

std::string format_number(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

}  // namespace t1forge::cli
