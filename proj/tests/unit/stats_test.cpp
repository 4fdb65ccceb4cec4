#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "t1forge/error.hpp"
#include "t1forge/stats.hpp"

using namespace t1forge;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::InvalidArgument;
}

/// t quantile from the integration oracle by bisection.
double oracle_t_quantile(double p, double df) {
    double lo = -1000, hi = 1000;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (oracle::t_cdf(mid, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

BinaryMask strip(int from, int to) {
    BinaryMask m(10, 1, 0);
    for (int x = from; x < to; ++x) m.at(x, 0) = 1;
    return m;
}

}  // namespace

TEST(Dice, Examples) {
    EXPECT_EQ(stats::dice(strip(0, 4), strip(0, 4)), 1.0);
    EXPECT_EQ(stats::dice(strip(0, 4), strip(5, 9)), 0.0);
    EXPECT_EQ(stats::dice(strip(0, 4), strip(2, 6)), 0.5);
    EXPECT_EQ(stats::dice(BinaryMask(3, 3, 0), BinaryMask(3, 3, 0)), 1.0);
    EXPECT_EQ(code_of([] { stats::dice(BinaryMask(3, 3, 0), BinaryMask(3, 4, 0)); }), ErrorCode::DimensionMismatch);
}

TEST(DiceProperty, SymmetricAndReflexive) {
    std::mt19937_64 rng(71);
    for (int k = 0; k < 10000; ++k) {
        const BinaryMask a = oracle::random_binary(rng, 8, 8, 0.4);
        const BinaryMask b = oracle::random_binary(rng, 8, 8, 0.4);
        ASSERT_EQ(stats::dice(a, b), stats::dice(b, a));
        if (area(a) > 0) ASSERT_EQ(stats::dice(a, a), 1.0);
    }
}

TEST(BlandAltman, IdenticalSeries) {
    const std::vector<double> x{1, 2, 3, 4};
    const auto ba = stats::bland_altman(x, x);
    EXPECT_EQ(ba.bias, 0.0);
    EXPECT_EQ(ba.lower, 0.0);
    EXPECT_EQ(ba.upper, 0.0);
    EXPECT_EQ(ba.p_value, 1.0);
}

TEST(BlandAltman, ConstantOffset) {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{6, 7, 8, 9};
    const auto ba = stats::bland_altman(x, y);
    EXPECT_DOUBLE_EQ(ba.bias, 5.0);
    EXPECT_EQ(ba.sd, 0.0);
    EXPECT_DOUBLE_EQ(ba.lower, 5.0);
    EXPECT_DOUBLE_EQ(ba.upper, 5.0);
}

TEST(BlandAltman, HandComputedDifferences) {
    const std::vector<double> x{0, 0, 0, 0};
    const std::vector<double> y{-1, 0, 1, 4};
    const auto ba = stats::bland_altman(x, y);
    const double sd = std::sqrt(14.0 / 3.0);
    const double t = 1.0 / (sd / 2.0);
    EXPECT_DOUBLE_EQ(ba.bias, 1.0);
    EXPECT_NEAR(ba.sd, sd, 1e-12);
    EXPECT_NEAR(ba.sd, 2.160, 1e-3);
    EXPECT_NEAR(ba.lower, 1 - 1.96 * sd, 1e-12);
    EXPECT_NEAR(ba.upper, 1 + 1.96 * sd, 1e-12);
    EXPECT_NEAR(ba.lower, -3.234, 1e-3);
    EXPECT_NEAR(ba.t, t, 1e-12);
    EXPECT_NEAR(ba.t, 0.926, 1e-3);
    const double p = 2.0 * (1.0 - oracle::t_cdf(t, 3));
    EXPECT_NEAR(ba.p_value, p, 1e-6);
    EXPECT_NEAR(ba.p_value, 0.423, 1e-3);
    EXPECT_EQ(ba.n, 4u);
}

TEST(BlandAltman, Errors) {
    const std::vector<double> a{1, 2, 3}, b{1, 2}, c{1};
    EXPECT_EQ(code_of([&] { stats::bland_altman(a, b); }), ErrorCode::LengthMismatch);
    EXPECT_EQ(code_of([&] { stats::bland_altman(c, c); }), ErrorCode::TooFew);
}

TEST(BlandAltmanProperty, TranslationEquivariant) {
    std::mt19937_64 rng(72);
    std::normal_distribution<double> n(900, 50);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> x(15), y(15), xs(15), ys(15);
        const double shift = n(rng);
        for (int i = 0; i < 15; ++i) {
            x[i] = n(rng);
            y[i] = x[i] + n(rng) / 10;
            xs[i] = x[i] + shift;
            ys[i] = y[i] + shift;
        }
        const auto a = stats::bland_altman(x, y), b = stats::bland_altman(xs, ys);
        ASSERT_NEAR(a.bias, b.bias, 1e-9);
        ASSERT_NEAR(a.sd, b.sd, 1e-9);
        ASSERT_NEAR(a.p_value, b.p_value, 1e-6);
        ASSERT_LE(a.lower, a.bias);
        ASSERT_LE(a.bias, a.upper);
    }
}

TEST(Pearson, Examples) {
    const std::vector<double> x{1, 2, 3, 4};
    std::vector<double> y2, yn;
    for (double v : x) {
        y2.push_back(2 * v + 3);
        yn.push_back(-v);
    }
    EXPECT_NEAR(stats::pearson(x, y2), 1.0, 1e-15);
    EXPECT_NEAR(stats::pearson(x, yn), -1.0, 1e-15);
    const std::vector<double> y{2, 1, 4, 3};
    EXPECT_NEAR(stats::pearson(x, y), 0.6, 1e-15);
    const std::vector<double> flat{5, 5, 5, 5};
    EXPECT_EQ(code_of([&] { stats::pearson(x, flat); }), ErrorCode::ConstantSeries);
}

TEST(PearsonProperty, AffineInvariantAndSignFlip) {
    std::mt19937_64 rng(73);
    std::normal_distribution<double> n(0, 1);
    for (int k = 0; k < 200; ++k) {
        std::vector<double> x(20), y(20), xa(20), yn(20);
        for (int i = 0; i < 20; ++i) {
            x[i] = n(rng);
            y[i] = x[i] + n(rng);
            xa[i] = 3.5 * x[i] + 100;
            yn[i] = -y[i];
        }
        const double r = stats::pearson(x, y);
        ASSERT_NEAR(stats::pearson(xa, y), r, 1e-12);
        ASSERT_NEAR(stats::pearson(x, yn), -r, 1e-12);
    }
}

TEST(RemoveOutliers, Examples) {
    const std::vector<double> same(8, 930.0);
    EXPECT_EQ(stats::remove_outliers(same), same);
    std::vector<double> v;
    for (int i = 0; i < 10; ++i) v.push_back(900 + i);
    v.push_back(5000);
    const auto out = stats::remove_outliers(v);
    EXPECT_EQ(out, std::vector<double>(v.begin(), v.end() - 1));
    const double q1 = oracle::quantile7(v, 0.25), q3 = oracle::quantile7(v, 0.75);
    EXPECT_GT(5000, q3 + 3 * (q3 - q1));
    const std::vector<double> mild{10, 12, 11, 13, 9, 14};
    EXPECT_EQ(stats::remove_outliers(mild), mild);
    const std::vector<double> three{1, 2, 3};
    EXPECT_EQ(code_of([&] { stats::remove_outliers(three); }), ErrorCode::TooFew);
}

TEST(RemoveOutliersProperty, MatchesOracleAndIdempotent) {
    std::mt19937_64 rng(74);
    std::normal_distribution<double> n(930, 40);
    std::cauchy_distribution<double> heavy(930, 20);
    for (int k = 0; k < 10000; ++k) {
        std::vector<double> v(4 + k % 30);
        for (auto& x : v) x = k % 2 ? heavy(rng) : n(rng);
        const auto once = stats::remove_outliers(v);
        std::vector<double> expect = v;
        for (std::size_t before = 0; before != expect.size() && expect.size() >= 4;) {
            before = expect.size();
            const double q1 = oracle::quantile7(expect, 0.25), q3 = oracle::quantile7(expect, 0.75);
            std::vector<double> next;
            for (double x : expect)
                if (!(x < q1 - 3 * (q3 - q1) || x > q3 + 3 * (q3 - q1))) next.push_back(x);
            expect = std::move(next);
        }
        ASSERT_EQ(once, expect);
        if (once.size() >= 4) ASSERT_EQ(stats::remove_outliers(once), once);
    }
}

TEST(Quantile, MatchesR7Oracle) {
    std::mt19937_64 rng(75);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 500; ++k) {
        std::vector<double> v(1 + k % 17);
        for (auto& x : v) x = u(rng) * 100;
        const double p = u(rng);
        ASSERT_NEAR(stats::quantile(v, p), oracle::quantile7(v, p), 1e-12);
    }
}

TEST(ReferenceRange, TwoPoints) {
    const std::vector<double> v{0, 2};
    const auto rr = stats::reference_range(v);
    const double tq = oracle_t_quantile(0.975, 1);
    EXPECT_NEAR(tq, 12.706, 1e-3);
    EXPECT_DOUBLE_EQ(rr.mean, 1.0);
    EXPECT_NEAR(rr.sd, std::sqrt(2.0), 1e-15);
    const double half = tq * std::sqrt(2.0) * std::sqrt(1.5);
    EXPECT_NEAR(rr.upper - rr.mean, half, 1e-6);
    EXPECT_NEAR(rr.upper, 1 + 22.007, 1e-3);
    EXPECT_NEAR(rr.lower, 1 - 22.007, 1e-3);
}

TEST(ReferenceRange, LargeNormalSample) {
    std::mt19937_64 rng(76);
    std::normal_distribution<double> n(0, 1);
    std::vector<double> v(10000);
    for (auto& x : v) x = n(rng);
    const auto rr = stats::reference_range(v);
    EXPECT_NEAR(rr.lower, -1.96, 0.05);
    EXPECT_NEAR(rr.upper, 1.96, 0.05);
    EXPECT_EQ(rr.n, 10000u);
}

TEST(ReferenceRange, ConstantSampleAndTooFew) {
    const std::vector<double> v(5, 930.0);
    const auto rr = stats::reference_range(v);
    EXPECT_EQ(rr.lower, 930.0);
    EXPECT_EQ(rr.upper, 930.0);
    const std::vector<double> one{1.0};
    EXPECT_EQ(code_of([&] { stats::reference_range(one); }), ErrorCode::TooFew);
}

TEST(HypothesisTests, ZscoreExample) {
    EXPECT_NEAR(stats::zscore(946.44, 927.62, 46.41), (946.44 - 927.62) / 46.41, 1e-15);
    EXPECT_NEAR(stats::zscore(946.44, 927.62, 46.41), 0.4055, 1e-4);
    EXPECT_EQ(code_of([] { stats::zscore(1, 1, 0); }), ErrorCode::ZeroVariance);
}

TEST(HypothesisTests, PairedTIdenticalSeries) {
    const std::vector<double> x{900, 910, 930};
    EXPECT_EQ(stats::paired_t(x, x).p_value, 1.0);
}

TEST(HypothesisTests, PairedAndUnpairedAgainstOracle) {
    const std::vector<double> x{901, 915, 930, 944, 952, 960};
    const std::vector<double> y{905, 921, 929, 950, 961, 962};
    const auto pt = stats::paired_t(x, y);
    // d = y - x = {4, 6, -1, 6, 9, 2}
    const std::vector<double> d{4, 6, -1, 6, 9, 2};
    const double md = (4 + 6 - 1 + 6 + 9 + 2) / 6.0;
    double ss = 0;
    for (double v : d) ss += (v - md) * (v - md);
    const double t = md / (std::sqrt(ss / 5) / std::sqrt(6.0));
    EXPECT_NEAR(std::fabs(pt.statistic), t, 1e-12);
    EXPECT_NEAR(pt.p_value, 2 * (1 - oracle::t_cdf(t, 5)), 1e-6);

    const auto ut = stats::unpaired_t(x, y);
    const double mx = 933.666666666666667, my = 938.0;
    double sx = 0, sy = 0;
    for (double v : x) sx += (v - mx) * (v - mx);
    for (double v : y) sy += (v - my) * (v - my);
    const double sp = std::sqrt((sx + sy) / 10);
    const double tu = (my - mx) / (sp * std::sqrt(1.0 / 6 + 1.0 / 6));
    EXPECT_NEAR(std::fabs(ut.statistic), tu, 1e-9);
    EXPECT_NEAR(ut.p_value, 2 * (1 - oracle::t_cdf(tu, 10)), 1e-6);
    EXPECT_EQ(ut.df1, 10);
}

TEST(HypothesisTests, FTestDetectsSdReduction) {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> a(946.44, 61.64), b(927.62, 46.41);
    std::vector<double> x(1000), y(1000);
    for (auto& v : x) v = a(rng);
    for (auto& v : y) v = b(rng);
    const auto f = stats::f_var(x, y);
    EXPECT_LT(f.p_value, 0.001);
    EXPECT_GT(f.statistic, 1.0);
    // Ratio is larger over smaller regardless of argument order.
    EXPECT_DOUBLE_EQ(stats::f_var(y, x).statistic, f.statistic);
}

TEST(HypothesisTests, FTestAgainstOracle) {
    const std::vector<double> x{1, 4, 2, 8, 5, 7};
    const std::vector<double> y{3, 4, 5, 4, 3, 4, 5, 4};
    const auto f = stats::f_var(x, y);
    const double vx = stats::sample_variance(x), vy = stats::sample_variance(y);
    EXPECT_NEAR(f.statistic, vx / vy, 1e-12);
    EXPECT_EQ(f.df1, 5);
    EXPECT_EQ(f.df2, 7);
    EXPECT_NEAR(f.p_value, std::min(1.0, 2 * (1 - oracle::f_cdf(vx / vy, 5, 7))), 1e-6);
    const std::vector<double> flat{2, 2, 2};
    EXPECT_EQ(code_of([&] { stats::f_var(x, flat); }), ErrorCode::ZeroVariance);
}

TEST(Distributions, StudentTCdfMatchesIntegrationOracle) {
    const double dfs[] = {1, 2.5, 5, 30};
    const double ts[] = {-6.0, -1.3, 0.4, 2.2, 9.0};
    for (double df : dfs)
        for (double t : ts) {
            EXPECT_NEAR(stats::student_t_cdf(t, df), oracle::t_cdf(t, df), 1e-6) << df << " " << t;
        }
}

TEST(Distributions, FCdfMatchesIntegrationOracle) {
    const std::pair<double, double> dfs[] = {{1, 1}, {3, 7}, {10, 4}, {30, 60}};
    const double fs[] = {0.05, 0.5, 1.0, 2.5, 8.0};
    for (auto [d1, d2] : dfs)
        for (double f : fs) {
            EXPECT_NEAR(stats::f_cdf(f, d1, d2), oracle::f_cdf(f, d1, d2), 1e-6) << d1 << "," << d2 << " " << f;
        }
}

TEST(Distributions, TQuantileInvertsCdf) {
    for (double df : {1.0, 3.0, 9.0, 99.0})
        for (double p : {0.025, 0.5, 0.9, 0.975}) {
            EXPECT_NEAR(stats::student_t_cdf(stats::student_t_quantile(p, df), df), p, 1e-10);
            EXPECT_NEAR(stats::student_t_quantile(p, df), oracle_t_quantile(p, df), 1e-5);
        }
}

TEST(Distributions, IncompleteBetaClosedForms) {
    // I_x(1, 1) = x and I_x(a, 1) = x^a.
    for (double x : {0.0, 0.1, 0.5, 0.93, 1.0}) {
        EXPECT_NEAR(stats::incomplete_beta(1, 1, x), x, 1e-14);
        EXPECT_NEAR(stats::incomplete_beta(3.5, 1, x), std::pow(x, 3.5), 1e-14);
        EXPECT_NEAR(stats::incomplete_beta(2, 3, x), 1 - stats::incomplete_beta(3, 2, 1 - x), 1e-14);
    }
}

TEST(Distributions, PValuesStayInUnitInterval) {
    std::mt19937_64 rng(78);
    std::normal_distribution<double> n(0, 1);
    for (int k = 0; k < 300; ++k) {
        std::vector<double> x(3 + k % 20), y(3 + k % 20);
        for (auto& v : x) v = n(rng);
        for (auto& v : y) v = n(rng) * (1 + k % 3);
        for (double p : {stats::paired_t(x, y).p_value, stats::unpaired_t(x, y).p_value, stats::f_var(x, y).p_value,
                         stats::bland_altman(x, y).p_value}) {
            ASSERT_GE(p, 0.0);
            ASSERT_LE(p, 1.0);
        }
    }
}
