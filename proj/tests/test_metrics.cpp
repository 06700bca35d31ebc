#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "anfis/metrics.hpp"
#include "anfis/random.hpp"

using namespace anfis;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("perfect predictions produce zero error and unit fit", "[metrics]") {
    const std::vector<double> a{1.5, -2.0, 4.0, 0.5};
    const Metrics m = compute_metrics(a, a);
    CHECK(m.mse == 0.0);
    CHECK(m.rmse == 0.0);
    REQUIRE(m.relative_defined());
    CHECK(*m.mare_pct == 0.0);
    CHECK(*m.mre_pct == 0.0);
    REQUIRE(m.r2_defined());
    CHECK(*m.r2 == 1.0);
    for (double d : m.relative_deviations) CHECK(d == 0.0);
}

TEST_CASE("hand-computed three-point case", "[metrics]") {
    const std::vector<double> actual{1.0, 2.0, 3.0};
    const std::vector<double> predicted{1.1, 1.9, 3.0};
    const Metrics m = compute_metrics(actual, predicted);

    CHECK_THAT(m.mse, WithinRel(0.02 / 3.0, 1e-12));
    CHECK_THAT(m.rmse, WithinRel(std::sqrt(0.02 / 3.0), 1e-12));
    REQUIRE(m.relative_defined());
    CHECK_THAT(*m.mare_pct, WithinRel(5.0, 1e-12));
    CHECK_THAT(*m.mre_pct, WithinRel(100.0 * (-0.1 + 0.05 + 0.0) / 3.0, 1e-12));
    REQUIRE(m.r2_defined());
    CHECK_THAT(*m.r2, WithinRel(1.0 - 0.02 / 2.0, 1e-12));

    REQUIRE(m.relative_deviations.size() == 3);
    CHECK_THAT(m.relative_deviations[0], WithinRel(10.0, 1e-12));
    CHECK_THAT(m.relative_deviations[1], WithinRel(-5.0, 1e-12));
    CHECK_THAT(m.relative_deviations[2], WithinAbs(0.0, 1e-15));
}

TEST_CASE("predicting the mean gives an r-squared of zero", "[metrics]") {
    const std::vector<double> actual{1.0, 2.0, 3.0, 6.0};
    const double mean = 3.0;
    const std::vector<double> predicted(actual.size(), mean);
    const Metrics m = compute_metrics(actual, predicted);
    REQUIRE(m.r2_defined());
    CHECK_THAT(*m.r2, WithinAbs(0.0, 1e-12));
}

TEST_CASE("squared error fields agree", "[metrics]") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> a, p;
        for (int k = 0; k < 10; ++k) {
            a.push_back(uniform(rng, 0.5, 9.0));
            p.push_back(uniform(rng, 0.5, 9.0));
        }
        const Metrics m = compute_metrics(a, p);
        REQUIRE_THAT(m.rmse * m.rmse, WithinRel(m.mse, 1e-12));
        REQUIRE(m.mse >= 0.0);
        REQUIRE(*m.mare_pct >= 0.0);
        REQUIRE(*m.r2 <= 1.0);
    }
}

TEST_CASE("relative measures ignore a common positive scale", "[metrics]") {
    Rng rng(17);
    std::vector<double> a, p;
    for (int k = 0; k < 12; ++k) {
        a.push_back(uniform(rng, 1.0, 5.0));
        p.push_back(uniform(rng, 1.0, 5.0));
    }
    const Metrics base = compute_metrics(a, p);
    for (double k : {0.01, 3.0, 250.0}) {
        std::vector<double> ak, pk;
        for (std::size_t i = 0; i < a.size(); ++i) {
            ak.push_back(k * a[i]);
            pk.push_back(k * p[i]);
        }
        const Metrics scaled = compute_metrics(ak, pk);
        CHECK_THAT(*scaled.mare_pct, WithinRel(*base.mare_pct, 1e-12));
        CHECK_THAT(*scaled.mre_pct, WithinRel(*base.mre_pct, 1e-12));
        CHECK_THAT(*scaled.r2, WithinRel(*base.r2, 1e-12));
        CHECK_THAT(scaled.rmse, WithinRel(k * base.rmse, 1e-12));
        CHECK_THAT(scaled.mse, WithinRel(k * k * base.mse, 1e-12));
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK_THAT(scaled.relative_deviations[i],
                       WithinRel(base.relative_deviations[i], 1e-12));
        }
    }
}

TEST_CASE("absolute errors ignore a common translation", "[metrics]") {
    Rng rng(19);
    std::vector<double> a, p;
    for (int k = 0; k < 12; ++k) {
        a.push_back(uniform(rng, 1.0, 5.0));
        p.push_back(uniform(rng, 1.0, 5.0));
    }
    const Metrics base = compute_metrics(a, p);
    for (double c : {-3.0, 0.5, 40.0}) {
        std::vector<double> ac, pc;
        for (std::size_t i = 0; i < a.size(); ++i) {
            ac.push_back(a[i] + c);
            pc.push_back(p[i] + c);
        }
        const Metrics shifted = compute_metrics(ac, pc);
        CHECK_THAT(shifted.rmse, WithinRel(base.rmse, 1e-12));
        CHECK_THAT(shifted.mse, WithinRel(base.mse, 1e-12));
    }
}

TEST_CASE("mean deviation is the negated signed relative error", "[metrics]") {
    Rng rng(29);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> a, p;
        for (int k = 0; k < 8; ++k) {
            a.push_back(uniform(rng, 0.5, 4.0));
            p.push_back(uniform(rng, 0.5, 4.0));
        }
        const Metrics m = compute_metrics(a, p);
        double mean_dev = 0.0;
        for (double d : m.relative_deviations) mean_dev += d;
        mean_dev /= static_cast<double>(m.relative_deviations.size());
        REQUIRE_THAT(mean_dev, WithinAbs(-*m.mre_pct, 1e-12));
    }
}

TEST_CASE("unit fit happens only with zero residuals", "[metrics]") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    // The perturbation must keep sse / ss_tot above the double-precision
    // resolution near 1.0, or the subtraction rounds back to exactly 1.
    const Metrics imperfect = compute_metrics(a, std::vector<double>{1.0, 2.0, 3.0 + 1e-6});
    CHECK(*imperfect.r2 < 1.0);
    const Metrics perfect = compute_metrics(a, a);
    CHECK(*perfect.r2 == 1.0);
}

TEST_CASE("a zero actual disables the relative measures only", "[metrics]") {
    const Metrics m = compute_metrics(std::vector<double>{0.0, 2.0, 4.0}, std::vector<double>{0.5, 2.0, 4.0});
    CHECK_FALSE(m.relative_defined());
    CHECK_FALSE(m.mare_pct.has_value());
    CHECK_FALSE(m.mre_pct.has_value());
    CHECK(m.relative_deviations.empty());
    CHECK(m.mse > 0.0);
    REQUIRE(m.r2_defined());
}

TEST_CASE("constant actuals disable r-squared only", "[metrics]") {
    const Metrics m = compute_metrics(std::vector<double>{2.0, 2.0, 2.0}, std::vector<double>{2.1, 1.9, 2.0});
    CHECK_FALSE(m.r2_defined());
    REQUIRE(m.relative_defined());
    CHECK(m.mse > 0.0);
}

TEST_CASE("metric computation validates its inputs", "[metrics]") {
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}), ShapeError);
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()},
                                 std::vector<double>{1.0, 2.0}),
                    NumericError);
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{1.0, 2.0},
                                 std::vector<double>{1.0, std::numeric_limits<double>::infinity()}),
                    NumericError);
}
