#include <algorithm>
#include <cmath>

#include "cumfolio/cumulants.hpp"
#include "cumfolio/errors.hpp"
#include "cumfolio/synth.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cumfolio;

TEST_CASE("synthetic calendar lays out weekdays minus fixed holidays") {
    const auto dates = synthetic_calendar("2010-01-01", "2016-06-30");
    CHECK(dates.size() == 1686);
    CHECK(dates.front() == "2010-01-01");
    CHECK(dates.back() == "2016-06-30");
    CHECK(std::is_sorted(dates.begin(), dates.end()));

    const auto has = [&](const char* d) {
        return std::binary_search(dates.begin(), dates.end(), std::string(d));
    };
    CHECK_FALSE(has("2010-01-02"));  // Saturday
    CHECK_FALSE(has("2010-01-03"));  // Sunday
    CHECK(has("2010-01-04"));        // Monday
    for (const char* holiday : {"2014-12-24", "2014-12-25", "2014-12-26", "2015-01-01",
                                "2015-01-06", "2015-04-03", "2015-04-06", "2015-05-01",
                                "2015-06-04"}) {
        CHECK_FALSE(has(holiday));
    }

    // The reference episode: exactly 180 trading days between entry and exit.
    const auto at = [&](const char* d) {
        return std::lower_bound(dates.begin(), dates.end(), std::string(d)) - dates.begin();
    };
    CHECK(at("2014-12-19") == 1295);
    CHECK(at("2015-09-10") == 1475);

    SUBCASE("degenerate and invalid ranges") {
        CHECK(synthetic_calendar("2020-03-02", "2020-03-02") ==
              std::vector<std::string>{"2020-03-02"});
        CHECK(synthetic_calendar("2020-03-07", "2020-03-08").empty());  // weekend only
        CHECK_THROWS_AS(synthetic_calendar("2020-03-02", "2020-03-01"), OutOfRangeError);
        CHECK_THROWS_AS(synthetic_calendar("not-a-date", "2020-03-01"), MalformedRowError);
    }
}

TEST_CASE("synthetic panels are reproducible from the seed") {
    const auto dates = synthetic_calendar("2014-01-01", "2014-06-30");
    const auto tickers = testhelp::index_tickers(4);

    Rng a(5), b(5), c(6);
    const PricePanel pa = synth_shock_panel(dates, tickers, 1.0, 0.1, 3.0, a);
    const PricePanel pb = synth_shock_panel(dates, tickers, 1.0, 0.1, 3.0, b);
    const PricePanel pc = synth_shock_panel(dates, tickers, 1.0, 0.1, 3.0, c);

    CHECK((pa.prices() - pb.prices()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pa.prices() - pc.prices()).cwiseAbs().maxCoeff() > 0.0);
    CHECK(pa.rows() == static_cast<Eigen::Index>(dates.size()));
    CHECK((pa.prices().row(0).array() == 100.0).all());
}

TEST_CASE("gaussian panel log-returns look like the configured volatility") {
    const auto dates = synthetic_calendar("2010-01-01", "2013-12-31");
    Rng rng(11);
    const PricePanel panel = synth_gaussian_panel(dates, testhelp::index_tickers(2), 2.0, rng);

    const auto& p = panel.prices();
    Eigen::VectorXd lr(p.rows() - 1);
    for (Eigen::Index t = 0; t + 1 < p.rows(); ++t) lr[t] = std::log(p(t + 1, 0) / p(t, 0));
    const double sd = std::sqrt((lr.array() - lr.mean()).square().mean());
    CHECK(sd == doctest::Approx(0.02).epsilon(0.08));

    CHECK_THROWS_AS(synth_gaussian_panel({"2020-01-01"}, {"A"}, 1.0, rng), TooShortError);
}

TEST_CASE("shock panel has much fatter tails than the gaussian walk") {
    const auto dates = synthetic_calendar("2010-01-01", "2013-12-31");
    const auto tickers = testhelp::index_tickers(3);
    Rng r1(21), r2(21);
    const ReturnPanel gauss = percent_returns(synth_gaussian_panel(dates, tickers, 1.0, r1));
    const ReturnPanel shock =
        percent_returns(synth_shock_panel(dates, tickers, 1.0, 0.08, 4.0, r2));

    // Standardized fourth cumulant (excess kurtosis) per asset.
    const auto kurtosis = [](const ReturnPanel& panel, int col) {
        Vector e = Vector::Zero(panel.cols());
        e[col] = 1.0;
        const double k2 = directional_cumulant(panel, e, 2);
        return directional_cumulant(panel, e, 4) / (k2 * k2);
    };
    // Loadings land anywhere in [0.5, 1.5]; even the weakest mixes to an
    // excess kurtosis near 2 while the pure gaussian walk stays near 0.
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(kurtosis(gauss, i)) < 0.75);
        CHECK(kurtosis(shock, i) > 1.0);
    }

    CHECK_THROWS_AS(synth_shock_panel(dates, tickers, 1.0, 1.5, 4.0, r1), OutOfRangeError);
}

TEST_CASE("ar1 index with a negative coefficient mean-reverts") {
    const auto dates = synthetic_calendar("2010-01-01", "2013-12-31");
    Rng rng(31);
    const PricePanel panel = synth_ar1_index(dates, "IDX", -0.6, 1.0, rng);
    REQUIRE(panel.cols() == 1);
    CHECK(panel.tickers()[0] == "IDX");

    const auto& p = panel.prices();
    Eigen::VectorXd lr(p.rows() - 1);
    for (Eigen::Index t = 0; t + 1 < p.rows(); ++t) lr[t] = std::log(p(t + 1, 0) / p(t, 0));
    const Eigen::VectorXd centered = lr.array() - lr.mean();
    const double lag1 = (centered.head(lr.size() - 1).array() *
                         centered.tail(lr.size() - 1).array()).mean() /
                        centered.array().square().mean();
    CHECK(lag1 < -0.4);  // theoretical autocorrelation is -0.6
}

TEST_CASE("synthetic benchmark weights are positive and normalized") {
    Rng a(41), b(41);
    const auto bp1 = synth_benchmark(testhelp::index_tickers(8), a);
    const auto bp2 = synth_benchmark(testhelp::index_tickers(8), b);
    CHECK(bp1.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bp1.weights.minCoeff() > 0.0);
    CHECK((bp1.weights - bp2.weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK(bp1.tickers == testhelp::index_tickers(8));
}
