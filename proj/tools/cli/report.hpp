#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cli/csv.hpp"
#include "t1forge/stats.hpp"

namespace t1forge::cli {

struct BoxPlot {
    std::string group;
    std::string column;
    std::size_t n = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;   // most extreme value within q1 - 1.5 IQR
    double whisker_high = 0.0;  // most extreme value within q3 + 1.5 IQR
    std::vector<double> outliers;
};

BoxPlot box_plot(std::string group, std::string column, std::vector<double> values);

struct AgreementSeries {
    std::string column;  // automatic column; the manual one is `<column>_manual`
    std::vector<std::string> subjects;
    std::vector<double> manual;
    std::vector<double> automatic;
    stats::BlandAltman summary;
};

struct RangeRow {
    std::string stratum;  // "group" or "age"
    std::string level;
    std::string column;
    stats::ReferenceRange range;
};

struct CohortReport {
    std::vector<BoxPlot> boxes;
    std::vector<AgreementSeries> agreement;
    std::vector<RangeRow> ranges;
};

/// Builds box plots per group, Bland-Altman series for every column with a
/// `_manual` twin, and reference ranges per group and per age decade.
/// Only accepted rows are used. Throws Error(EmptyInput) for an empty cohort.
CohortReport build_report(const CsvTable& cohort);

void write_report(const CohortReport& report, const std::filesystem::path& dir);

std::string box_plot_csv(const std::vector<BoxPlot>& boxes);
std::string box_plot_svg(const std::vector<BoxPlot>& boxes);
std::string agreement_csv(const std::vector<AgreementSeries>& series);
std::string agreement_svg(const AgreementSeries& series);
std::string ranges_csv(const std::vector<RangeRow>& rows);
std::string ranges_svg(const std::vector<RangeRow>& rows);

}  // namespace t1forge::cli
