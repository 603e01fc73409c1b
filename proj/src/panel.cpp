#include "cumfolio/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cumfolio/csv.hpp"
#include "cumfolio/errors.hpp"

namespace cumfolio {

namespace {

void check_axes(const std::vector<std::string>& dates,
                const std::vector<std::string>& tickers,
                const Eigen::MatrixXd& values, const char* what) {
    if (static_cast<Eigen::Index>(dates.size()) != values.rows()) {
        throw Error(std::string(what) + ": date axis does not match row count");
    }
    if (static_cast<Eigen::Index>(tickers.size()) != values.cols()) {
        throw Error(std::string(what) + ": ticker axis does not match column count");
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw Error(std::string(what) + ": dates must be strictly increasing (" +
                        dates[i - 1] + " >= " + dates[i] + ")");
        }
    }
}

Eigen::Index find_row(const std::vector<std::string>& dates, const std::string& date) {
    const auto it = std::lower_bound(dates.begin(), dates.end(), date);
    if (it == dates.end() || *it != date) {
        throw OutOfRangeError("date '" + date + "' not present in panel");
    }
    return static_cast<Eigen::Index>(it - dates.begin());
}

template <class Panel>
Panel slice_impl(const Panel& panel, const std::vector<std::string>& dates,
                 const Eigen::MatrixXd& values, Eigen::Index start, Eigen::Index length) {
    if (length < 0 || start < 0 || start + length > values.rows()) {
        std::ostringstream os;
        os << "slice of " << length << " rows starting at row " << start
           << " exceeds panel of " << values.rows() << " rows";
        throw OutOfRangeError(os.str());
    }
    std::vector<std::string> sub_dates(dates.begin() + start, dates.begin() + start + length);
    return Panel(std::move(sub_dates), panel.tickers(),
                 values.middleRows(start, length));
}

}  // namespace

PricePanel::PricePanel(std::vector<std::string> dates, std::vector<std::string> tickers,
                       Eigen::MatrixXd prices)
    : dates_(std::move(dates)), tickers_(std::move(tickers)), prices_(std::move(prices)) {
    check_axes(dates_, tickers_, prices_, "PricePanel");
    for (Eigen::Index t = 0; t < prices_.rows(); ++t) {
        for (Eigen::Index i = 0; i < prices_.cols(); ++i) {
            const double p = prices_(t, i);
            if (!std::isfinite(p)) {
                throw Error("PricePanel: non-finite price for " + tickers_[i] +
                            " on " + dates_[t]);
            }
            if (p <= 0.0) {
                throw NonPositivePriceError("non-positive price " + csv::format_double(p) +
                                            " for " + tickers_[i] + " on " + dates_[t]);
            }
        }
    }
}

Eigen::Index PricePanel::row_of(const std::string& date) const {
    return find_row(dates_, date);
}

ReturnPanel::ReturnPanel(std::vector<std::string> dates, std::vector<std::string> tickers,
                         Eigen::MatrixXd returns)
    : dates_(std::move(dates)), tickers_(std::move(tickers)), returns_(std::move(returns)) {
    check_axes(dates_, tickers_, returns_, "ReturnPanel");
    if (!returns_.allFinite()) {
        throw Error("ReturnPanel: non-finite return entry");
    }
}

Eigen::Index ReturnPanel::row_of(const std::string& date) const {
    return find_row(dates_, date);
}

PricePanel load_prices(const std::filesystem::path& path,
                       const std::vector<std::string>& tickers) {
    if (tickers.empty()) {
        throw Error("load_prices: no tickers requested");
    }
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open price file: " + path.string());
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw MalformedRowError("empty price file: " + path.string());
    }
    {
        auto header = csv::split(line);
        for (auto& h : header) h = csv::trim(h);
        if (header.size() != 3 || header[0] != "date" || header[1] != "ticker" ||
            header[2] != "close") {
            throw MalformedRowError("expected header 'date,ticker,close' in " + path.string());
        }
    }

    const std::unordered_set<std::string> wanted(tickers.begin(), tickers.end());
    if (wanted.size() != tickers.size()) {
        throw Error("load_prices: duplicate ticker in request");
    }
    std::unordered_set<std::string> seen;
    // date -> ticker -> close, ordered by date
    std::map<std::string, std::unordered_map<std::string, double>> quotes;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split(line);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 3) {
            throw MalformedRowError("expected 3 fields in " + where);
        }
        const std::string date = csv::trim(fields[0]);
        const std::string ticker = csv::trim(fields[1]);
        if (!csv::looks_like_iso_date(date)) {
            throw MalformedRowError("unparseable date '" + date + "' in " + where);
        }
        if (ticker.empty()) {
            throw MalformedRowError("empty ticker in " + where);
        }
        const double close = csv::parse_double(fields[2], where);
        if (!std::isfinite(close) || close <= 0.0) {
            throw NonPositivePriceError("non-positive close for " + ticker + " in " + where);
        }
        seen.insert(ticker);
        if (!wanted.count(ticker)) continue;
        auto& row = quotes[date];
        if (!row.emplace(ticker, close).second) {
            throw MalformedRowError("duplicate quote for " + ticker + " in " + where);
        }
    }

    for (const auto& t : tickers) {
        if (!seen.count(t)) {
            throw MissingTickerError("ticker '" + t + "' not present in " + path.string());
        }
    }

    // inner join: keep only dates quoted for every requested ticker
    std::vector<std::string> dates;
    for (const auto& [date, row] : quotes) {
        if (row.size() == tickers.size()) dates.push_back(date);
    }
    Eigen::MatrixXd prices(static_cast<Eigen::Index>(dates.size()),
                           static_cast<Eigen::Index>(tickers.size()));
    for (std::size_t t = 0; t < dates.size(); ++t) {
        const auto& row = quotes[dates[t]];
        for (std::size_t i = 0; i < tickers.size(); ++i) {
            prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) =
                row.at(tickers[i]);
        }
    }
    return PricePanel(std::move(dates), tickers, std::move(prices));
}

ReturnPanel percent_returns(const PricePanel& panel) {
    const Eigen::Index t_raw = panel.rows();
    if (t_raw < 2) {
        throw TooShortError("percent_returns needs at least 2 price rows, got " +
                            std::to_string(t_raw));
    }
    const auto& p = panel.prices();
    Eigen::MatrixXd r(t_raw - 1, panel.cols());
    for (Eigen::Index t = 0; t + 1 < t_raw; ++t) {
        r.row(t) = 100.0 * (p.row(t + 1) - p.row(t)).cwiseQuotient(p.row(t));
    }
    std::vector<std::string> dates(panel.dates().begin() + 1, panel.dates().end());
    return ReturnPanel(std::move(dates), panel.tickers(), std::move(r));
}

PricePanel slice_window(const PricePanel& panel, const std::string& start,
                        Eigen::Index length) {
    return slice_impl(panel, panel.dates(), panel.prices(), panel.row_of(start), length);
}

ReturnPanel slice_window(const ReturnPanel& panel, const std::string& start,
                         Eigen::Index length) {
    return slice_impl(panel, panel.dates(), panel.returns(), panel.row_of(start), length);
}

PricePanel slice_rows(const PricePanel& panel, Eigen::Index start, Eigen::Index length) {
    return slice_impl(panel, panel.dates(), panel.prices(), start, length);
}

ReturnPanel slice_rows(const ReturnPanel& panel, Eigen::Index start, Eigen::Index length) {
    return slice_impl(panel, panel.dates(), panel.returns(), start, length);
}

void write_prices_csv(const PricePanel& panel, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write price file: " + path.string());
    }
    out << "date,ticker,close\n";
    for (Eigen::Index t = 0; t < panel.rows(); ++t) {
        for (Eigen::Index i = 0; i < panel.cols(); ++i) {
            out << panel.dates()[t] << ',' << panel.tickers()[i] << ','
                << csv::format_double(panel.prices()(t, i)) << '\n';
        }
    }
}

}  // namespace cumfolio
