#include <cmath>
#include <fstream>

#include "cumfolio/errors.hpp"
#include "cumfolio/panel.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cumfolio;

namespace {

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

}  // namespace

TEST_CASE("load_prices joins tickers on common dates in request order") {
    testhelp::TempDir dir;
    const std::string path = dir.file("prices.csv");
    write_file(path,
               "date,ticker,close\n"
               "2020-01-02,BBB,20\n"
               "2020-01-02,AAA,10\n"
               "2020-01-03,AAA,11\n"
               "2020-01-06,AAA,12\n"
               "2020-01-06,BBB,24\n"
               "2020-01-07,CCC,99\n");

    const PricePanel panel = load_prices(path, {"AAA", "BBB"});
    // 2020-01-03 lacks BBB and 2020-01-07 lacks both, so only two rows survive.
    REQUIRE(panel.rows() == 2);
    CHECK(panel.dates() == std::vector<std::string>{"2020-01-02", "2020-01-06"});
    CHECK(panel.tickers() == std::vector<std::string>{"AAA", "BBB"});
    CHECK(panel.prices()(0, 0) == 10.0);
    CHECK(panel.prices()(0, 1) == 20.0);
    CHECK(panel.prices()(1, 0) == 12.0);
    CHECK(panel.prices()(1, 1) == 24.0);
    CHECK(panel.row_of("2020-01-06") == 1);
    CHECK_THROWS_AS(panel.row_of("2020-01-03"), OutOfRangeError);
}

TEST_CASE("load_prices input validation") {
    testhelp::TempDir dir;
    const std::string path = dir.file("prices.csv");

    SUBCASE("missing ticker") {
        write_file(path, "date,ticker,close\n2020-01-02,AAA,10\n");
        CHECK_THROWS_AS(load_prices(path, {"AAA", "ZZZ"}), MissingTickerError);
    }
    SUBCASE("non-positive close") {
        write_file(path, "date,ticker,close\n2020-01-02,AAA,0\n");
        CHECK_THROWS_AS(load_prices(path, {"AAA"}), NonPositivePriceError);
    }
    SUBCASE("bad header") {
        write_file(path, "ticker,date,close\n2020-01-02,AAA,10\n");
        CHECK_THROWS_AS(load_prices(path, {"AAA"}), MalformedRowError);
    }
    SUBCASE("unparseable close") {
        write_file(path, "date,ticker,close\n2020-01-02,AAA,ten\n");
        CHECK_THROWS_AS(load_prices(path, {"AAA"}), MalformedRowError);
    }
    SUBCASE("bad date shape") {
        write_file(path, "date,ticker,close\n01/02/2020,AAA,10\n");
        CHECK_THROWS_AS(load_prices(path, {"AAA"}), MalformedRowError);
    }
    SUBCASE("duplicate quote") {
        write_file(path,
                   "date,ticker,close\n2020-01-02,AAA,10\n2020-01-02,AAA,11\n");
        CHECK_THROWS_AS(load_prices(path, {"AAA"}), MalformedRowError);
    }
    SUBCASE("duplicate request") {
        write_file(path, "date,ticker,close\n2020-01-02,AAA,10\n");
        CHECK_THROWS_AS(load_prices(path, {"AAA", "AAA"}), Error);
    }
}

TEST_CASE("percent_returns definition and labelling") {
    Eigen::MatrixXd p(3, 2);
    p << 100, 50, 110, 45, 99, 54;
    const PricePanel panel(testhelp::iso_dates(3), {"A", "B"}, p);
    const ReturnPanel r = percent_returns(panel);

    REQUIRE(r.rows() == 2);
    CHECK(r.returns()(0, 0) == doctest::Approx(10.0));
    CHECK(r.returns()(0, 1) == doctest::Approx(-10.0));
    CHECK(r.returns()(1, 0) == doctest::Approx(-10.0));
    CHECK(r.returns()(1, 1) == doctest::Approx(20.0));
    // Row t carries the date the return was realized on.
    CHECK(r.dates().front() == panel.dates()[1]);

    Eigen::MatrixXd one(1, 1);
    one << 100;
    CHECK_THROWS_AS(percent_returns(PricePanel(testhelp::iso_dates(1), {"A"}, one)),
                    TooShortError);
}

TEST_CASE("panel constructors reject inconsistent input") {
    Eigen::MatrixXd p(2, 1);
    p << 1.0, 2.0;
    CHECK_THROWS_AS(PricePanel(testhelp::iso_dates(3), {"A"}, p), Error);
    CHECK_THROWS_AS(PricePanel(testhelp::iso_dates(2), {"A", "B"}, p), Error);
    CHECK_THROWS_AS(PricePanel({"2020-01-02", "2020-01-02"}, {"A"}, p), Error);

    Eigen::MatrixXd neg(2, 1);
    neg << 1.0, -2.0;
    CHECK_THROWS_AS(PricePanel(testhelp::iso_dates(2), {"A"}, neg), NonPositivePriceError);

    Eigen::MatrixXd nan(2, 1);
    nan << 1.0, std::nan("");
    CHECK_THROWS_AS(ReturnPanel(testhelp::iso_dates(2), {"A"}, nan), Error);
}

TEST_CASE("slices keep axes aligned and bounds checked") {
    cumfolio::Rng rng(7);
    const Eigen::MatrixXd p = testhelp::normal_matrix(rng, 10, 2).array().exp();
    const PricePanel panel(testhelp::iso_dates(10), {"A", "B"}, p);

    const PricePanel sub = slice_rows(panel, 3, 4);
    REQUIRE(sub.rows() == 4);
    CHECK(sub.dates().front() == panel.dates()[3]);
    CHECK(sub.prices()(0, 0) == panel.prices()(3, 0));
    CHECK(sub.prices()(3, 1) == panel.prices()(6, 1));

    const PricePanel by_date = slice_window(panel, panel.dates()[3], 4);
    CHECK(by_date.dates() == sub.dates());
    CHECK((by_date.prices().array() == sub.prices().array()).all());

    CHECK_THROWS_AS(slice_rows(panel, 8, 5), OutOfRangeError);
    CHECK_THROWS_AS(slice_rows(panel, -1, 2), OutOfRangeError);
    CHECK_THROWS_AS(slice_window(panel, "1999-01-01", 2), OutOfRangeError);
}

TEST_CASE("write_prices_csv round-trips through load_prices") {
    cumfolio::Rng rng(11);
    const Eigen::MatrixXd p = 100.0 * testhelp::normal_matrix(rng, 6, 3).array().exp();
    const PricePanel panel(testhelp::iso_dates(6), {"AAA", "BBB", "CCC"}, p);

    testhelp::TempDir dir;
    const std::string path = dir.file("roundtrip.csv");
    write_prices_csv(panel, path);
    const PricePanel back = load_prices(path, panel.tickers());

    REQUIRE(back.rows() == panel.rows());
    CHECK(back.dates() == panel.dates());
    // %.17g formatting is lossless, so the round-trip is bit exact.
    CHECK((back.prices().array() == panel.prices().array()).all());
}
