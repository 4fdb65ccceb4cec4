#include "t1forge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace t1forge::stats {

double mean(std::span<const double> v) {
    if (v.empty()) throw Error(ErrorCode::TooFew, "mean of an empty series");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

double sample_sd(std::span<const double> v) { return std::sqrt(sample_variance(v)); }

double quantile(std::span<const double> v, double p) {
    if (v.empty()) throw Error(ErrorCode::TooFew, "quantile of an empty series");
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile probability outside [0, 1]");
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double dice(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "dice of masks with different dimensions");
    std::size_t na = 0;
    std::size_t nb = 0;
    std::size_t both = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool in_a = a[i] != 0;
        const bool in_b = b[i] != 0;
        na += in_a;
        nb += in_b;
        both += in_a && in_b;
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(both) / static_cast<double>(na + nb);
}

namespace {

void require_pairs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "paired series differ in length");
    if (x.size() < 2) throw Error(ErrorCode::TooFew, "need at least two pairs");
}

std::vector<double> differences(std::span<const double> x, std::span<const double> y) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = y[i] - x[i];
    return d;
}

double two_sided_t_p(double t, double df) {
    // Both tails at once: I_{df/(df+t^2)}(df/2, 1/2).
    return std::clamp(incomplete_beta(0.5 * df, 0.5, df / (df + t * t)), 0.0, 1.0);
}

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The continued fraction converges fastest for x < (a + 1) / (a + b + 2).
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "t distribution needs df > 0");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile probability must be in (0, 1)");
    if (p == 0.5) return 0.0;
    double lo = -1.0;
    double hi = 1.0;
    while (student_t_cdf(lo, df) > p) lo *= 2.0;
    while (student_t_cdf(hi, df) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::fabs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < p) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double f_cdf(double f, double df1, double df2) {
    if (!(df1 > 0.0) || !(df2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "F distribution needs df > 0");
    if (f <= 0.0) return 0.0;
    if (std::isinf(f)) return 1.0;
    return incomplete_beta(0.5 * df1, 0.5 * df2, df1 * f / (df1 * f + df2));
}

BlandAltman bland_altman(std::span<const double> x, std::span<const double> y) {
    require_pairs(x, y);
    const auto d = differences(x, y);
    BlandAltman ba;
    ba.n = d.size();
    ba.bias = mean(d);
    ba.sd = sample_sd(d);
    ba.lower = ba.bias - kLoaMultiplier * ba.sd;
    ba.upper = ba.bias + kLoaMultiplier * ba.sd;
    const TestResult t = paired_t(x, y);
    ba.t = t.statistic;
    ba.p_value = t.p_value;
    return ba;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    require_pairs(x, y);
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ConstantSeries, "pearson correlation of a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> remove_outliers(std::span<const double> values) {
    if (values.size() < 4) throw Error(ErrorCode::TooFew, "outlier removal needs at least four values");
    std::vector<double> kept(values.begin(), values.end());
    std::size_t before = 0;
    while (before != kept.size() && kept.size() >= 4) {
        before = kept.size();
        const double q1 = quantile(kept, 0.25);
        const double q3 = quantile(kept, 0.75);
        const double iqr = q3 - q1;
        const double lo = q1 - 3.0 * iqr;
        const double hi = q3 + 3.0 * iqr;
        std::erase_if(kept, [&](double v) { return v < lo || v > hi; });
    }
    return kept;
}

ReferenceRange reference_range(std::span<const double> values) {
    if (values.size() < 2) throw Error(ErrorCode::TooFew, "reference range needs at least two values");
    ReferenceRange r;
    r.n = values.size();
    r.mean = mean(values);
    r.sd = sample_sd(values);
    const double n = static_cast<double>(r.n);
    const double half = student_t_quantile(0.975, n - 1.0) * r.sd * std::sqrt(1.0 + 1.0 / n);
    r.lower = r.mean - half;
    r.upper = r.mean + half;
    return r;
}

TestResult paired_t(std::span<const double> x, std::span<const double> y) {
    require_pairs(x, y);
    const auto d = differences(x, y);
    TestResult r;
    r.df1 = static_cast<double>(d.size() - 1);
    const double sd = sample_sd(d);
    if (sd == 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    r.statistic = mean(d) / (sd / std::sqrt(static_cast<double>(d.size())));
    r.p_value = two_sided_t_p(r.statistic, r.df1);
    return r;
}

TestResult unpaired_t(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) throw Error(ErrorCode::TooFew, "unpaired t-test needs n >= 2 per group");
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    const double pooled = ((nx - 1.0) * sample_variance(x) + (ny - 1.0) * sample_variance(y)) / (nx + ny - 2.0);
    TestResult r;
    r.df1 = nx + ny - 2.0;
    if (pooled == 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    r.statistic = (mean(x) - mean(y)) / std::sqrt(pooled * (1.0 / nx + 1.0 / ny));
    r.p_value = two_sided_t_p(r.statistic, r.df1);
    return r;
}

TestResult f_var(std::span<const double> x, std::span<const double> y) {
    if (x.size() < 2 || y.size() < 2) throw Error(ErrorCode::TooFew, "F-test needs n >= 2 per group");
    const double vx = sample_variance(x);
    const double vy = sample_variance(y);
    const bool x_larger = vx >= vy;
    const double big = x_larger ? vx : vy;
    const double small = x_larger ? vy : vx;
    if (small == 0.0) throw Error(ErrorCode::ZeroVariance, "F-test with a zero-variance sample");
    TestResult r;
    r.statistic = big / small;
    r.df1 = static_cast<double>((x_larger ? x.size() : y.size()) - 1);
    r.df2 = static_cast<double>((x_larger ? y.size() : x.size()) - 1);
    // Upper tail of F(df1, df2) computed directly to keep precision for large F.
    const double upper = incomplete_beta(0.5 * r.df2, 0.5 * r.df1, r.df2 / (r.df2 + r.df1 * r.statistic));
    r.p_value = std::clamp(2.0 * upper, 0.0, 1.0);
    return r;
}

double zscore(double value, double mu, double sigma) {
    if (!(sigma > 0.0)) throw Error(ErrorCode::ZeroVariance, "z-score needs sigma > 0");
    return (value - mu) / sigma;
}

}  // namespace t1forge::stats
