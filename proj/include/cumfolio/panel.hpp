#ifndef CUMFOLIO_PANEL_HPP
#define CUMFOLIO_PANEL_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace cumfolio {

/// Aligned daily closing prices: T_raw rows (dates, strictly increasing)
/// by M columns (tickers). Every price is finite and strictly positive.
/// Immutable after construction; dates are opaque ordered labels and all
/// window arithmetic is done in rows (trading days).
class PricePanel {
public:
    PricePanel(std::vector<std::string> dates, std::vector<std::string> tickers,
               Eigen::MatrixXd prices);

    const std::vector<std::string>& dates() const { return dates_; }
    const std::vector<std::string>& tickers() const { return tickers_; }
    const Eigen::MatrixXd& prices() const { return prices_; }
    Eigen::Index rows() const { return prices_.rows(); }
    Eigen::Index cols() const { return prices_.cols(); }

    /// Row index of a date; throws OutOfRangeError when absent.
    Eigen::Index row_of(const std::string& date) const;

private:
    std::vector<std::string> dates_;
    std::vector<std::string> tickers_;
    Eigen::MatrixXd prices_;
};

/// Percentage returns (in %, i.e. already scaled by 100) with the same
/// ticker axis as the source prices and one fewer row.
class ReturnPanel {
public:
    ReturnPanel(std::vector<std::string> dates, std::vector<std::string> tickers,
                Eigen::MatrixXd returns);

    const std::vector<std::string>& dates() const { return dates_; }
    const std::vector<std::string>& tickers() const { return tickers_; }
    const Eigen::MatrixXd& returns() const { return returns_; }
    Eigen::Index rows() const { return returns_.rows(); }
    Eigen::Index cols() const { return returns_.cols(); }

    Eigen::Index row_of(const std::string& date) const;

private:
    std::vector<std::string> dates_;
    std::vector<std::string> tickers_;
    Eigen::MatrixXd returns_;
};

/// Load closing prices from a long-format CSV with header `date,ticker,close`.
/// The result is restricted to dates where every requested ticker has a
/// quote (inner join), rows sorted by date, columns in request order.
PricePanel load_prices(const std::filesystem::path& path,
                       const std::vector<std::string>& tickers);

/// Daily percentage returns: 100 * (p[t+1] - p[t]) / p[t]. The first
/// date is dropped, so row t of the result is labelled with the date the
/// return was realized on.
ReturnPanel percent_returns(const PricePanel& panel);

/// Contiguous sub-panel of exactly `length` rows beginning at `start`.
PricePanel slice_window(const PricePanel& panel, const std::string& start,
                        Eigen::Index length);
ReturnPanel slice_window(const ReturnPanel& panel, const std::string& start,
                         Eigen::Index length);

/// Row-index based slices used by the rolling backtester.
PricePanel slice_rows(const PricePanel& panel, Eigen::Index start, Eigen::Index length);
ReturnPanel slice_rows(const ReturnPanel& panel, Eigen::Index start, Eigen::Index length);

void write_prices_csv(const PricePanel& panel, const std::filesystem::path& path);

}  // namespace cumfolio

#endif  // CUMFOLIO_PANEL_HPP
