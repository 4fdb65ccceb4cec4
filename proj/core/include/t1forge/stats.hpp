#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "t1forge/image.hpp"

namespace t1forge::stats {

double mean(std::span<const double> v);
/// Sample (n - 1) standard deviation; 0 when n < 2.
double sample_sd(std::span<const double> v);
double sample_variance(std::span<const double> v);

/// Linear-interpolation quantile (R type 7). Throws TooFew on empty input.
double quantile(std::span<const double> v, double p);

/// 2|A n B| / (|A| + |B|), with 1 for two empty masks.
double dice(const BinaryMask& a, const BinaryMask& b);

struct BlandAltman {
    double bias = 0.0;
    double sd = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double t = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

inline constexpr double kLoaMultiplier = 1.96;

/// Differences are y - x.
BlandAltman bland_altman(std::span<const double> x, std::span<const double> y);

double pearson(std::span<const double> x, std::span<const double> y);

/// Drops values below Q1 - 3 IQR or above Q3 + 3 IQR, repeating until no value
/// is dropped (or fewer than four remain); order preserved.
std::vector<double> remove_outliers(std::span<const double> values);

struct ReferenceRange {
    double mean = 0.0;
    double sd = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t n = 0;
};

/// 95% prediction interval: mean -/+ t(0.975, n-1) * sd * sqrt(1 + 1/n).
ReferenceRange reference_range(std::span<const double> values);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double df1 = 0.0;
    double df2 = 0.0;
};

/// Two-sided paired t-test of y - x against zero.
TestResult paired_t(std::span<const double> x, std::span<const double> y);

/// Two-sided Student's t-test with pooled variance.
TestResult unpaired_t(std::span<const double> x, std::span<const double> y);

/// Two-sided F-test for equal variances; the statistic is larger / smaller variance.
TestResult f_var(std::span<const double> x, std::span<const double> y);

double zscore(double value, double mu, double sigma);

// Distribution functions.

/// Regularised incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double df);
/// Inverse of student_t_cdf for p in (0, 1).
double student_t_quantile(double p, double df);
double f_cdf(double f, double df1, double df2);

}  // namespace t1forge::stats
