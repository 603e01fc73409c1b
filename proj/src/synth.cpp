#include "cumfolio/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "cumfolio/errors.hpp"

namespace cumfolio {

namespace {

/// Days since 1970-01-01 of a proleptic Gregorian date (civil-days algorithm).
long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

std::array<int, 3> civil_from_days(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

/// 0 = Sunday .. 6 = Saturday.
int weekday_of(long days) {
    return static_cast<int>(days >= -4 ? (days + 4) % 7 : (days + 5) % 7 + 6);
}

long parse_iso(const std::string& date) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(date.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
        d > 31) {
        throw MalformedRowError("expected an ISO date (YYYY-MM-DD), got '" + date + "'");
    }
    return days_from_civil(y, m, d);
}

std::string iso_of(long days) {
    const auto [y, m, d] = civil_from_days(days);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

PricePanel walk_prices(const std::vector<std::string>& dates,
                       const std::vector<std::string>& tickers, const Matrix& log_returns) {
    const auto t_rows = static_cast<Eigen::Index>(dates.size());
    const auto m = static_cast<Eigen::Index>(tickers.size());
    Matrix prices(t_rows, m);
    prices.row(0).setConstant(100.0);
    for (Eigen::Index t = 1; t < t_rows; ++t) {
        prices.row(t) = prices.row(t - 1).array() * log_returns.row(t - 1).array().exp();
    }
    return PricePanel(dates, tickers, std::move(prices));
}

}  // namespace

std::vector<std::string> synthetic_calendar(const std::string& first, const std::string& last) {
    static const std::unordered_set<std::string> holidays = {
        "2014-12-24", "2014-12-25", "2014-12-26", "2015-01-01", "2015-01-06",
        "2015-04-03", "2015-04-06", "2015-05-01", "2015-06-04",
    };
    const long lo = parse_iso(first);
    const long hi = parse_iso(last);
    if (hi < lo) {
        throw OutOfRangeError("calendar end " + last + " precedes start " + first);
    }
    std::vector<std::string> dates;
    for (long z = lo; z <= hi; ++z) {
        const int wd = weekday_of(z);
        if (wd == 0 || wd == 6) continue;
        std::string iso = iso_of(z);
        if (holidays.count(iso) != 0) continue;
        dates.push_back(std::move(iso));
    }
    return dates;
}

PricePanel synth_gaussian_panel(const std::vector<std::string>& dates,
                                const std::vector<std::string>& tickers, double daily_vol_pct,
                                Rng& rng) {
    if (dates.size() < 2 || tickers.empty()) {
        throw TooShortError("need at least 2 dates and 1 ticker");
    }
    const double sigma = daily_vol_pct / 100.0;
    Matrix lr(static_cast<Eigen::Index>(dates.size()) - 1,
              static_cast<Eigen::Index>(tickers.size()));
    for (Eigen::Index t = 0; t < lr.rows(); ++t) {
        for (Eigen::Index i = 0; i < lr.cols(); ++i) {
            lr(t, i) = sigma * rng.normal();
        }
    }
    return walk_prices(dates, tickers, lr);
}

PricePanel synth_shock_panel(const std::vector<std::string>& dates,
                             const std::vector<std::string>& tickers, double daily_vol_pct,
                             double shock_prob, double shock_scale, Rng& rng) {
    if (dates.size() < 2 || tickers.empty()) {
        throw TooShortError("need at least 2 dates and 1 ticker");
    }
    if (shock_prob < 0.0 || shock_prob > 1.0) {
        throw OutOfRangeError("shock probability must lie in [0, 1]");
    }
    const double sigma = daily_vol_pct / 100.0;
    const auto m = static_cast<Eigen::Index>(tickers.size());
    Vector loading(m);
    for (Eigen::Index i = 0; i < m; ++i) loading[i] = 0.5 + rng.uniform();
    Matrix lr(static_cast<Eigen::Index>(dates.size()) - 1, m);
    for (Eigen::Index t = 0; t < lr.rows(); ++t) {
        const double shock = rng.uniform() < shock_prob ? shock_scale * rng.normal() : 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            lr(t, i) = sigma * (rng.normal() + loading[i] * shock);
        }
    }
    return walk_prices(dates, tickers, lr);
}

PricePanel synth_ar1_index(const std::vector<std::string>& dates, const std::string& ticker,
                           double ar_coeff, double daily_vol_pct, Rng& rng) {
    if (dates.size() < 2) {
        throw TooShortError("need at least 2 dates");
    }
    const double sigma = daily_vol_pct / 100.0;
    Matrix lr(static_cast<Eigen::Index>(dates.size()) - 1, 1);
    double state = 0.0;
    for (Eigen::Index t = 0; t < lr.rows(); ++t) {
        state = ar_coeff * state + rng.normal();
        lr(t, 0) = sigma * state;
    }
    return walk_prices(dates, {ticker}, lr);
}

BenchmarkWeights synth_benchmark(const std::vector<std::string>& tickers, Rng& rng) {
    BenchmarkWeights bp;
    bp.tickers = tickers;
    bp.weights.resize(static_cast<Eigen::Index>(tickers.size()));
    for (Eigen::Index i = 0; i < bp.weights.size(); ++i) {
        bp.weights[i] = 0.5 + rng.uniform();
    }
    bp.weights /= bp.weights.sum();
    return bp;
}

}  // namespace cumfolio
