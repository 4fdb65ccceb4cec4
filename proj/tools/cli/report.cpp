#include "cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "t1forge/error.hpp"
#include "t1forge/raw_io.hpp"

namespace t1forge::cli {
namespace {

constexpr const char* kReportColumns[] = {"t1_global", "t1_ivs", "t1_fw", "t1_global_corr", "t1_ivs_corr",
                                          "t1_fw_corr"};

std::string num(double v) { return format_number(v, 4); }

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Scale {
    double lo, hi, px_lo, px_hi;
    double operator()(double v) const {
        if (hi <= lo) return 0.5 * (px_lo + px_hi);
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

Scale padded(double lo, double hi, double px_lo, double px_hi) {
    const double pad = hi > lo ? 0.05 * (hi - lo) : 1.0;
    return {lo - pad, hi + pad, px_lo, px_hi};
}

std::string svg_open(int w, int h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
           std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
           "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char* extra = "stroke=\"black\"") {
    return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\" " +
           extra + "/>\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\">" + escape_xml(s) +
           "</text>\n";
}

std::string y_axis(const Scale& y, double x, double top, double bottom) {
    std::string out = line(x, top, x, bottom);
    for (int k = 0; k <= 4; ++k) {
        const double v = y.lo + (y.hi - y.lo) * k / 4.0;
        out += line(x - 4, y(v), x, y(v));
        out += text(x - 6, y(v) + 4, format_number(v, 1), "end");
    }
    return out;
}

std::string age_decade(double age) {
    const int d = static_cast<int>(std::floor(age / 10.0)) * 10;
    return std::to_string(d) + "-" + std::to_string(d + 9);
}

}  // namespace

BoxPlot box_plot(std::string group, std::string column, std::vector<double> values) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "box plot of an empty series");
    std::sort(values.begin(), values.end());
    BoxPlot b;
    b.group = std::move(group);
    b.column = std::move(column);
    b.n = values.size();
    b.q1 = stats::quantile(values, 0.25);
    b.median = stats::quantile(values, 0.5);
    b.q3 = stats::quantile(values, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    for (double v : values) {
        if (v < lo_fence || v > hi_fence) {
            b.outliers.push_back(v);
            continue;
        }
        b.whisker_low = std::min(b.whisker_low, v);
        b.whisker_high = std::max(b.whisker_high, v);
    }
    return b;
}

CohortReport build_report(const CsvTable& cohort) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < cohort.rows(); ++r) {
        if (!cohort.has_column("accepted") || cohort.cell(r, "accepted") == "1") rows.push_back(r);
    }
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, "empty cohort: no accepted subjects");

    auto group_of = [&](std::size_t r) {
        const std::string& g = cohort.cell(r, "group");
        return g.empty() ? std::string("all") : g;
    };

    CohortReport report;
    for (const char* column : kReportColumns) {
        if (!cohort.has_column(column)) continue;
        std::map<std::string, std::vector<double>> by_group;
        std::map<std::string, std::vector<double>> by_age;
        for (std::size_t r : rows) {
            const auto v = cohort.number(r, column);
            if (!v) continue;
            by_group[group_of(r)].push_back(*v);
            if (const auto age = cohort.number(r, "age")) by_age[age_decade(*age)].push_back(*v);
        }
        for (auto& [g, values] : by_group) {
            report.boxes.push_back(box_plot(g, column, values));
            if (values.size() >= 2) report.ranges.push_back({"group", g, column, stats::reference_range(values)});
        }
        for (auto& [decade, values] : by_age) {
            if (values.size() >= 2) report.ranges.push_back({"age", decade, column, stats::reference_range(values)});
        }

        const std::string manual_col = std::string(column) + "_manual";
        if (!cohort.has_column(manual_col)) continue;
        AgreementSeries s;
        s.column = column;
        for (std::size_t r : rows) {
            const auto a = cohort.number(r, column);
            const auto m = cohort.number(r, manual_col);
            if (!a || !m) continue;
            s.subjects.push_back(cohort.cell(r, "subject_id"));
            s.manual.push_back(*m);
            s.automatic.push_back(*a);
        }
        if (s.manual.size() < 2) continue;
        s.summary = stats::bland_altman(s.manual, s.automatic);
        report.agreement.push_back(std::move(s));
    }
    if (report.boxes.empty()) throw Error(ErrorCode::EmptyInput, "empty cohort: no T1 values present");
    return report;
}

std::string box_plot_csv(const std::vector<BoxPlot>& boxes) {
    std::string out = "group,column,n,whisker_low,q1,median,q3,whisker_high,outliers\n";
    for (const auto& b : boxes) {
        std::string outliers;
        for (std::size_t i = 0; i < b.outliers.size(); ++i) {
            if (i) outliers += ';';
            outliers += num(b.outliers[i]);
        }
        out += b.group + "," + b.column + "," + std::to_string(b.n) + "," + num(b.whisker_low) + "," + num(b.q1) +
               "," + num(b.median) + "," + num(b.q3) + "," + num(b.whisker_high) + "," + outliers + "\n";
    }
    return out;
}

std::string box_plot_svg(const std::vector<BoxPlot>& boxes) {
    const int slot = 90;
    const int w = 80 + slot * static_cast<int>(std::max<std::size_t>(boxes.size(), 1));
    const int h = 420;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& b : boxes) {
        lo = std::min(lo, b.whisker_low);
        hi = std::max(hi, b.whisker_high);
        for (double v : b.outliers) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const Scale y = padded(lo, hi, h - 60.0, 20.0);
    std::string out = svg_open(w, h);
    out += y_axis(y, 60, 20, h - 60.0);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& b = boxes[i];
        const double cx = 60 + slot * (static_cast<double>(i) + 0.5);
        const double half = slot * 0.3;
        out += line(cx, y(b.whisker_low), cx, y(b.q1));
        out += line(cx, y(b.q3), cx, y(b.whisker_high));
        out += line(cx - half / 2, y(b.whisker_low), cx + half / 2, y(b.whisker_low));
        out += line(cx - half / 2, y(b.whisker_high), cx + half / 2, y(b.whisker_high));
        out += "<rect x=\"" + num(cx - half) + "\" y=\"" + num(y(b.q3)) + "\" width=\"" + num(2 * half) +
               "\" height=\"" + num(y(b.q1) - y(b.q3)) + "\" fill=\"#cfe2f3\" stroke=\"black\"/>\n";
        out += line(cx - half, y(b.median), cx + half, y(b.median), "stroke=\"black\" stroke-width=\"2\"");
        for (double v : b.outliers) {
            out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(y(v)) + "\" r=\"3\" fill=\"none\" stroke=\"black\"/>\n";
        }
        out += text(cx, h - 40.0, b.group);
        out += text(cx, h - 25.0, b.column);
    }
    out += "</svg>\n";
    return out;
}

std::string agreement_csv(const std::vector<AgreementSeries>& series) {
    std::string out = "column,subject_id,manual,automatic,mean,difference\n";
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.subjects.size(); ++i) {
            out += s.column + "," + s.subjects[i] + "," + num(s.manual[i]) + "," + num(s.automatic[i]) + "," +
                   num(0.5 * (s.manual[i] + s.automatic[i])) + "," + num(s.automatic[i] - s.manual[i]) + "\n";
        }
    }
    return out;
}

std::string agreement_svg(const AgreementSeries& s) {
    const int w = 520, h = 400;
    double xlo = INFINITY, xhi = -INFINITY;
    double ylo = std::min(s.summary.lower, 0.0), yhi = std::max(s.summary.upper, 0.0);
    for (std::size_t i = 0; i < s.manual.size(); ++i) {
        const double m = 0.5 * (s.manual[i] + s.automatic[i]);
        const double d = s.automatic[i] - s.manual[i];
        xlo = std::min(xlo, m);
        xhi = std::max(xhi, m);
        ylo = std::min(ylo, d);
        yhi = std::max(yhi, d);
    }
    const Scale x = padded(xlo, xhi, 70, w - 20.0);
    const Scale y = padded(ylo, yhi, h - 50.0, 20.0);
    std::string out = svg_open(w, h);
    out += y_axis(y, 70, 20, h - 50.0);
    out += line(70, h - 50.0, w - 20.0, h - 50.0);
    for (std::size_t i = 0; i < s.manual.size(); ++i) {
        out += "<circle cx=\"" + num(x(0.5 * (s.manual[i] + s.automatic[i]))) + "\" cy=\"" +
               num(y(s.automatic[i] - s.manual[i])) + "\" r=\"3\" fill=\"#3d85c6\"/>\n";
    }
    out += line(70, y(s.summary.bias), w - 20.0, y(s.summary.bias), "stroke=\"black\"");
    for (double v : {s.summary.lower, s.summary.upper}) {
        out += line(70, y(v), w - 20.0, y(v), "stroke=\"black\" stroke-dasharray=\"4 3\"");
    }
    out += text(w / 2.0, h - 15.0, "mean of " + s.column + " (manual, automatic)");
    out += text(w - 22.0, y(s.summary.bias) - 4, "bias " + format_number(s.summary.bias, 2), "end");
    out += "</svg>\n";
    return out;
}

std::string ranges_csv(const std::vector<RangeRow>& rows) {
    std::string out = "stratum,level,column,n,mean,sd,lower,upper\n";
    for (const auto& r : rows) {
        out += r.stratum + "," + r.level + "," + r.column + "," + std::to_string(r.range.n) + "," +
               num(r.range.mean) + "," + num(r.range.sd) + "," + num(r.range.lower) + "," + num(r.range.upper) + "\n";
    }
    return out;
}

std::string ranges_svg(const std::vector<RangeRow>& rows) {
    const int row_h = 22;
    const int w = 640;
    const int h = 50 + row_h * static_cast<int>(std::max<std::size_t>(rows.size(), 1));
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& r : rows) {
        lo = std::min(lo, r.range.lower);
        hi = std::max(hi, r.range.upper);
    }
    const Scale x = padded(lo, hi, 240, w - 20.0);
    std::string out = svg_open(w, h);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const double cy = 30 + row_h * static_cast<double>(i);
        out += text(230, cy + 4, r.stratum + " " + r.level + " " + r.column, "end");
        out += line(x(r.range.lower), cy, x(r.range.upper), cy);
        out += "<circle cx=\"" + num(x(r.range.mean)) + "\" cy=\"" + num(cy) + "\" r=\"3\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

void write_report(const CohortReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, dir.string() + ": " + ec.message());
    write_text_file(dir / "boxplot.csv", box_plot_csv(report.boxes));
    write_text_file(dir / "boxplot.svg", box_plot_svg(report.boxes));
    write_text_file(dir / "reference_ranges.csv", ranges_csv(report.ranges));
    write_text_file(dir / "reference_ranges.svg", ranges_svg(report.ranges));
    if (report.agreement.empty()) return;
    write_text_file(dir / "bland_altman.csv", agreement_csv(report.agreement));
    std::string summary = "column,n,bias,sd,lower,upper,t,p_value\n";
    for (const auto& s : report.agreement) {
        const auto& b = s.summary;
        summary += s.column + "," + std::to_string(b.n) + "," + num(b.bias) + "," + num(b.sd) + "," + num(b.lower) +
                   "," + num(b.upper) + "," + num(b.t) + "," + format_number(b.p_value, 8) + "\n";
        write_text_file(dir / ("bland_altman_" + s.column + ".svg"), agreement_svg(s));
    }
    write_text_file(dir / "bland_altman_summary.csv", summary);
}

}  // namespace t1forge::cli
