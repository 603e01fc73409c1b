#ifndef CUMFOLIO_BACKTEST_HPP
#define CUMFOLIO_BACKTEST_HPP

#include <string>
#include <vector>

#include "cumfolio/factorization.hpp"
#include "cumfolio/panel.hpp"
#include "cumfolio/tensor_algebra.hpp"

namespace cumfolio {

/// Fixed benchmark contributions BP_i, nonnegative and summing to 1.
struct BenchmarkWeights {
    std::vector<std::string> tickers;
    Vector weights;
};

/// CSV `ticker,weight`; validates the sum-to-one and nonnegativity rules.
BenchmarkWeights load_benchmark_weights(const std::string& path);
void write_benchmark_csv(const std::string& path, const BenchmarkWeights& bp);

/// Reorder benchmark weights to a panel's ticker order; every panel ticker
/// must be present.
Vector align_benchmark(const BenchmarkWeights& bp, const std::vector<std::string>& tickers);

/// Normalized mixture of one factor column with the benchmark.
struct TestPortfolio {
    Method method = Method::ZeroV;
    int column = 0;  // 1-based factor column index
    Vector weights;  // sums to 1; entries may be negative (shorts)
};

/// TV_ij = (alpha*BP_i + V_ij) / sum_i (alpha*BP_i + V_ij) for the rear
/// min(rear_count, M) columns j of v. An all-zero column returns the
/// benchmark weights bit-for-bit, as substituting V = 0 must reproduce the
/// benchmark exactly.
std::vector<TestPortfolio> blend(const Matrix& v, const Vector& bp, double alpha, Method method,
                                 int rear_count = 5);

/// Percentage return after `holding_days`: 100 * (sum_i w_i * p(L, i) / p(0, i) - 1)
/// over a window of at least holding_days + 1 price rows.
double portfolio_return(const Vector& weights, const Matrix& window_prices, int holding_days);

struct WindowStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double mode = 0.0;
};

/// Min/max/mean are exact; mode is the first peak of a Gaussian kernel
/// density (Silverman bandwidth) on a 512-point grid spanning [min, max].
WindowStats window_stats(const std::vector<double>& returns);
double kde_mode(const std::vector<double>& values);

struct BacktestConfig {
    int window_len = 20;    // holding days L per window
    int train_len = 1100;   // trailing return rows used for estimation
    double alpha = 7.0;     // benchmark blending weight
    int rear_count = 5;     // rear factor columns forming test portfolios
    std::vector<Method> methods = {Method::Evd, Method::Phi4, Method::Phi6};
    int max_iters = 100;    // ALS iteration cap
    double rel_tol = 1e-6;  // ALS stop tolerance
    int threads = 1;
};

struct MethodWindowOutcome {
    Method method = Method::ZeroV;
    std::vector<double> returns;  // one per rear portfolio, ascending column order
    WindowStats stats;
};

struct WindowResult {
    int index = 0;  // 1-based window number
    std::string start_date;
    std::string end_date;
    double benchmark_return = 0.0;
    std::vector<MethodWindowOutcome> methods;
};

/// Per-statistic values across windows plus their compounded cumulative.
struct StatSeries {
    std::vector<double> values;
    std::vector<double> cumulative;
};

struct MethodSeries {
    Method method = Method::ZeroV;
    StatSeries min, max, mean, mode;
};

struct BacktestReport {
    BacktestConfig config;
    std::vector<WindowResult> windows;
    std::vector<MethodSeries> series;  // same order as config.methods
    StatSeries benchmark;
};

/// cum_w = 100 * (prod_{k<=w} (1 + stat_k/100) - 1): sequential reinvestment.
std::vector<double> compound_cumulative(const std::vector<double>& percents);

/// Roll consecutive windows of config.window_len trading days, the first
/// starting the day after entry_date, emitting windows until the first whose
/// end date reaches or passes exit_date. Each window trains every method on
/// the train_len return rows that end at the window's first price row.
BacktestReport run_backtest(const ReturnPanel& returns, const PricePanel& prices,
                            const BenchmarkWeights& bp, const std::string& entry_date,
                            const std::string& exit_date, const BacktestConfig& config);

/// Fixed-count schedule: n_windows windows, the first starting at start_date.
BacktestReport post_exit_backtest(const ReturnPanel& returns, const PricePanel& prices,
                                  const BenchmarkWeights& bp, const std::string& start_date,
                                  int n_windows, const BacktestConfig& config);

/// Writes min.csv / max.csv / mean.csv / mode.csv
/// (`window,start,end,method,value,cumulative`, benchmark rows tagged BENCH)
/// and summary.json into out_dir; returns the paths written.
std::vector<std::string> write_report_csvs(const BacktestReport& report,
                                           const std::string& out_dir);

}  // namespace cumfolio

#endif  // CUMFOLIO_BACKTEST_HPP
