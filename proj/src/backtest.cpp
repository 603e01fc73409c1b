#include "cumfolio/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <json.hpp>

#include "cumfolio/csv.hpp"
#include "cumfolio/errors.hpp"
#include "cumfolio/parallel.hpp"

namespace cumfolio {

namespace {

using nlohmann::json;

double quantile_type7(const std::vector<double>& sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BenchmarkWeights load_benchmark_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || csv::trim(line) != "ticker,weight") {
        throw MalformedRowError("benchmark file " + path + " must start with `ticker,weight`");
    }
    std::vector<std::string> tickers;
    std::vector<double> weights;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto fields = csv::split(line, ',');
        if (fields.size() != 2) {
            throw MalformedRowError(where + ": expected `ticker,weight`");
        }
        const std::string ticker = csv::trim(fields[0]);
        if (ticker.empty()) {
            throw MalformedRowError(where + ": empty ticker");
        }
        if (std::find(tickers.begin(), tickers.end(), ticker) != tickers.end()) {
            throw MalformedRowError(where + ": duplicate ticker " + ticker);
        }
        const double w = csv::parse_double(fields[1], where);
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw OutOfRangeError(where + ": benchmark weight must be nonnegative, got " +
                                  fields[1]);
        }
        tickers.push_back(ticker);
        weights.push_back(w);
    }
    if (tickers.empty()) {
        throw MalformedRowError("benchmark file " + path + " has no data rows");
    }
    BenchmarkWeights bp;
    bp.tickers = std::move(tickers);
    bp.weights = Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    if (std::abs(bp.weights.sum() - 1.0) > 1e-9) {
        throw OutOfRangeError("benchmark weights in " + path + " sum to " +
                              std::to_string(bp.weights.sum()) + ", expected 1");
    }
    return bp;
}

void write_benchmark_csv(const std::string& path, const BenchmarkWeights& bp) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out << "ticker,weight\n";
    for (std::size_t k = 0; k < bp.tickers.size(); ++k) {
        out << bp.tickers[k] << ',' << csv::format_double(bp.weights[static_cast<Eigen::Index>(k)])
            << '\n';
    }
    if (!out) {
        throw Error("failed while writing " + path);
    }
}

Vector align_benchmark(const BenchmarkWeights& bp, const std::vector<std::string>& tickers) {
    if (bp.tickers.size() != tickers.size()) {
        throw MissingTickerError("benchmark lists " + std::to_string(bp.tickers.size()) +
                                 " tickers but the panel has " + std::to_string(tickers.size()));
    }
    Vector out(static_cast<Eigen::Index>(tickers.size()));
    for (std::size_t k = 0; k < tickers.size(); ++k) {
        const auto it = std::find(bp.tickers.begin(), bp.tickers.end(), tickers[k]);
        if (it == bp.tickers.end()) {
            throw MissingTickerError("benchmark file lacks ticker " + tickers[k]);
        }
        out[static_cast<Eigen::Index>(k)] =
            bp.weights[static_cast<Eigen::Index>(it - bp.tickers.begin())];
    }
    return out;
}

std::vector<TestPortfolio> blend(const Matrix& v, const Vector& bp, double alpha, Method method,
                                 int rear_count) {
    if (v.rows() != bp.size()) {
        throw DimMismatchError("factor matrix has " + std::to_string(v.rows()) +
                               " rows but benchmark has " + std::to_string(bp.size()) +
                               " weights");
    }
    if (rear_count < 1) {
        throw OutOfRangeError("rear_count must be positive");
    }
    const Eigen::Index rear = std::min<Eigen::Index>(rear_count, v.cols());
    std::vector<TestPortfolio> portfolios;
    portfolios.reserve(static_cast<std::size_t>(rear));
    for (Eigen::Index j = v.cols() - rear; j < v.cols(); ++j) {
        TestPortfolio tp;
        tp.method = method;
        tp.column = static_cast<int>(j) + 1;
        if (v.col(j).isZero(0.0)) {
            // With a zero column the mixture is alpha*BP / (alpha * sum BP);
            // return BP itself so benchmark reproduction is exact, not merely
            // within rounding.
            tp.weights = bp;
        } else {
            const Vector mixed = alpha * bp + v.col(j);
            const double denom = mixed.sum();
            if (std::abs(denom) < 1e-9) {
                throw DegenerateDenominatorError("column " + std::to_string(j + 1) +
                                                 " blends to a near-zero total " +
                                                 std::to_string(denom));
            }
            tp.weights = mixed / denom;
        }
        portfolios.push_back(std::move(tp));
    }
    return portfolios;
}

double portfolio_return(const Vector& weights, const Matrix& window_prices, int holding_days) {
    if (holding_days < 1) {
        throw OutOfRangeError("holding period must be at least 1 day");
    }
    if (window_prices.rows() < holding_days + 1) {
        throw WindowTooShortError("window has " + std::to_string(window_prices.rows()) +
                                  " price rows, need " + std::to_string(holding_days + 1));
    }
    if (weights.size() != window_prices.cols()) {
        throw DimMismatchError("weights length " + std::to_string(weights.size()) +
                               " does not match " + std::to_string(window_prices.cols()) +
                               " assets");
    }
    const double gross =
        weights.dot((window_prices.row(holding_days).array() / window_prices.row(0).array())
                        .matrix()
                        .transpose());
    return 100.0 * (gross - 1.0);
}

double kde_mode(const std::vector<double>& values) {
    if (values.empty()) {
        throw Error("mode of an empty sample is undefined");
    }
    const auto n = values.size();
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double mn = *mn_it;
    const double mx = *mx_it;
    if (mn == mx || n == 1) return mn;

    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    const double sd = std::sqrt(var);

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);

    // Silverman's rule; when the quartiles collapse fall back to the sample
    // standard deviation so the bandwidth stays positive.
    double sigma = std::min(sd, iqr / 1.34);
    if (!(sigma > 0.0)) sigma = sd;
    const double bandwidth = 0.9 * sigma * std::pow(static_cast<double>(n), -0.2);

    constexpr int kGrid = 512;
    double best_g = mn;
    double best_density = -1.0;
    for (int k = 0; k < kGrid; ++k) {
        const double g = mn + (mx - mn) * static_cast<double>(k) / (kGrid - 1);
        double density = 0.0;
        for (const double v : values) {
            const double z = (g - v) / bandwidth;
            density += std::exp(-0.5 * z * z);
        }
        if (density > best_density) {
            best_density = density;
            best_g = g;
        }
    }
    return best_g;
}

WindowStats window_stats(const std::vector<double>& returns) {
    if (returns.empty()) {
        throw Error("window statistics need at least one portfolio return");
    }
    WindowStats s;
    const auto [mn, mx] = std::minmax_element(returns.begin(), returns.end());
    s.min = *mn;
    s.max = *mx;
    double mean = 0.0;
    for (const double v : returns) mean += v;
    mean /= static_cast<double>(returns.size());
    // The true mean lies in [min, max]; clamping removes the one-ulp
    // summation drift that would otherwise break mean == min == max when
    // every portfolio produced the identical return.
    s.mean = std::clamp(mean, s.min, s.max);
    s.mode = kde_mode(returns);
    return s;
}

std::vector<double> compound_cumulative(const std::vector<double>& percents) {
    std::vector<double> out;
    out.reserve(percents.size());
    double growth = 1.0;
    for (const double p : percents) {
        growth *= 1.0 + p / 100.0;
        out.push_back(100.0 * (growth - 1.0));
    }
    return out;
}

namespace {

void check_backtest_config(const BacktestConfig& cfg) {
    if (cfg.window_len < 1) throw OutOfRangeError("window_len must be positive");
    if (cfg.train_len < 2) throw OutOfRangeError("train_len must be at least 2");
    if (cfg.rear_count < 1) throw OutOfRangeError("rear_count must be positive");
    if (cfg.methods.empty()) throw Error("at least one method is required");
    if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) {
        throw OutOfRangeError("alpha must be a finite nonnegative number");
    }
}

/// Evaluate every configured method over one test window. `train` is the
/// trailing slice ending at the window's first price row.
WindowResult evaluate_window(int index, std::size_t start_row, const ReturnPanel& train,
                             const PricePanel& prices, const Vector& bp,
                             const BacktestConfig& cfg) {
    const auto m = static_cast<Eigen::Index>(prices.cols());
    const int L = cfg.window_len;
    WindowResult res;
    res.index = index;
    res.start_date = prices.dates()[start_row];
    res.end_date = prices.dates()[start_row + static_cast<std::size_t>(L)];
    const Matrix window = prices.prices().block(static_cast<Eigen::Index>(start_row), 0, L + 1, m);
    res.benchmark_return = portfolio_return(bp, window, L);

    const bool need4 = std::find(cfg.methods.begin(), cfg.methods.end(), Method::Phi4) !=
                       cfg.methods.end();
    const bool need6 = std::find(cfg.methods.begin(), cfg.methods.end(), Method::Phi6) !=
                       cfg.methods.end();
    CumulantFamily family;
    if (need4 || need6) {
        family = cumulant_family(train, need6 ? 6 : 4);
    }
    CumulantFamily family4;
    if (need4 && need6) {
        // Orders 2..4 of the same estimation pass.
        family4.tensors.assign(family.tensors.begin(), family.tensors.begin() + 3);
        family4.n_max = 4;
        family4.dim = family.dim;
        family4.sample_size = family.sample_size;
    }

    for (const Method method : cfg.methods) {
        Matrix v;
        switch (method) {
            case Method::ZeroV:
                v = Matrix::Zero(m, m);
                break;
            case Method::Evd: {
                const SymmetricTensor c2 =
                    (need4 || need6) ? family.order(2) : cumulant_tensor(train, 2);
                v = evd_factor(c2).columns;
                break;
            }
            case Method::Phi4: {
                const CumulantFamily& fam = need6 ? family4 : family;
                AlsConfig acfg;
                acfg.n_max = 4;
                acfg.max_iters = cfg.max_iters;
                acfg.rel_tol = cfg.rel_tol;
                v = als_factor(fam, acfg).factors.columns;
                break;
            }
            case Method::Phi6: {
                AlsConfig acfg;
                acfg.n_max = 6;
                acfg.max_iters = cfg.max_iters;
                acfg.rel_tol = cfg.rel_tol;
                v = als_factor(family, acfg).factors.columns;
                break;
            }
        }
        MethodWindowOutcome outcome;
        outcome.method = method;
        for (const TestPortfolio& tp : blend(v, bp, cfg.alpha, method, cfg.rear_count)) {
            outcome.returns.push_back(portfolio_return(tp.weights, window, L));
        }
        outcome.stats = window_stats(outcome.returns);
        res.methods.push_back(std::move(outcome));
    }
    return res;
}

BacktestReport run_schedule(const ReturnPanel& returns, const PricePanel& prices,
                            const BenchmarkWeights& bp, const std::vector<std::size_t>& starts,
                            const BacktestConfig& cfg) {
    if (returns.rows() + 1 != prices.rows() || returns.tickers() != prices.tickers()) {
        throw RowMismatchError("return panel does not derive from the given price panel");
    }
    const Vector bpv = align_benchmark(bp, prices.tickers());

    BacktestReport report;
    report.config = cfg;
    report.windows.resize(starts.size());
    parallel_for(starts.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) {
            const std::size_t r = starts[w];
            const ReturnPanel train =
                slice_rows(returns, static_cast<Eigen::Index>(r) - cfg.train_len, cfg.train_len);
            report.windows[w] =
                evaluate_window(static_cast<int>(w) + 1, r, train, prices, bpv, cfg);
        }
    });

    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        MethodSeries s;
        s.method = cfg.methods[m];
        for (const WindowResult& w : report.windows) {
            s.min.values.push_back(w.methods[m].stats.min);
            s.max.values.push_back(w.methods[m].stats.max);
            s.mean.values.push_back(w.methods[m].stats.mean);
            s.mode.values.push_back(w.methods[m].stats.mode);
        }
        s.min.cumulative = compound_cumulative(s.min.values);
        s.max.cumulative = compound_cumulative(s.max.values);
        s.mean.cumulative = compound_cumulative(s.mean.values);
        s.mode.cumulative = compound_cumulative(s.mode.values);
        report.series.push_back(std::move(s));
    }
    for (const WindowResult& w : report.windows) {
        report.benchmark.values.push_back(w.benchmark_return);
    }
    report.benchmark.cumulative = compound_cumulative(report.benchmark.values);
    return report;
}

void check_window_feasible(std::size_t start_row, const PricePanel& prices,
                           const BacktestConfig& cfg, int window_index) {
    if (start_row < static_cast<std::size_t>(cfg.train_len)) {
        throw InsufficientHistoryError(
            "window " + std::to_string(window_index) + " starts at price row " +
            std::to_string(start_row + 1) + " but training needs " +
            std::to_string(cfg.train_len) + " prior return rows");
    }
    if (start_row + static_cast<std::size_t>(cfg.window_len) >=
        static_cast<std::size_t>(prices.rows())) {
        throw InsufficientHistoryError("window " + std::to_string(window_index) +
                                       " would end past the last available date");
    }
}

}  // namespace

BacktestReport run_backtest(const ReturnPanel& returns, const PricePanel& prices,
                            const BenchmarkWeights& bp, const std::string& entry_date,
                            const std::string& exit_date, const BacktestConfig& config) {
    check_backtest_config(config);
    const auto entry_row = static_cast<std::size_t>(prices.row_of(entry_date));
    const auto exit_row = static_cast<std::size_t>(prices.row_of(exit_date));
    if (exit_row <= entry_row) {
        throw OutOfRangeError("exit date " + exit_date + " does not follow entry date " +
                              entry_date);
    }
    std::vector<std::size_t> starts;
    const auto step = static_cast<std::size_t>(config.window_len);
    for (std::size_t r = entry_row + 1;; r += step) {
        check_window_feasible(r, prices, config, static_cast<int>(starts.size()) + 1);
        starts.push_back(r);
        if (r + step >= exit_row) break;  // this window reaches/passes the exit
    }
    return run_schedule(returns, prices, bp, starts, config);
}

BacktestReport post_exit_backtest(const ReturnPanel& returns, const PricePanel& prices,
                                  const BenchmarkWeights& bp, const std::string& start_date,
                                  int n_windows, const BacktestConfig& config) {
    check_backtest_config(config);
    if (n_windows < 0) {
        throw OutOfRangeError("window count must be nonnegative");
    }
    const auto first = static_cast<std::size_t>(prices.row_of(start_date));
    std::vector<std::size_t> starts;
    for (int w = 0; w < n_windows; ++w) {
        const std::size_t r = first + static_cast<std::size_t>(w) * config.window_len;
        check_window_feasible(r, prices, config, w + 1);
        starts.push_back(r);
    }
    return run_schedule(returns, prices, bp, starts, config);
}

namespace {

json stats_json(const WindowStats& s) {
    return json{{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"mode", s.mode}};
}

void write_stat_csv(const std::string& path, const BacktestReport& report,
                    StatSeries MethodSeries::*stat) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out << "window,start,end,method,value,cumulative\n";
    for (std::size_t w = 0; w < report.windows.size(); ++w) {
        const WindowResult& win = report.windows[w];
        for (const MethodSeries& s : report.series) {
            const StatSeries& series = s.*stat;
            out << win.index << ',' << win.start_date << ',' << win.end_date << ','
                << method_name(s.method) << ',' << csv::format_double(series.values[w]) << ','
                << csv::format_double(series.cumulative[w]) << '\n';
        }
        out << win.index << ',' << win.start_date << ',' << win.end_date << ",BENCH,"
            << csv::format_double(report.benchmark.values[w]) << ','
            << csv::format_double(report.benchmark.cumulative[w]) << '\n';
    }
    if (!out) {
        throw Error("failed while writing " + path);
    }
}

}  // namespace

std::vector<std::string> write_report_csvs(const BacktestReport& report,
                                           const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto path_of = [&](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    std::vector<std::string> written;

    const std::pair<std::string, StatSeries MethodSeries::*> stats[] = {
        {"min.csv", &MethodSeries::min},
        {"max.csv", &MethodSeries::max},
        {"mean.csv", &MethodSeries::mean},
        {"mode.csv", &MethodSeries::mode},
    };
    for (const auto& [name, member] : stats) {
        const std::string path = path_of(name);
        write_stat_csv(path, report, member);
        written.push_back(path);
    }

    json summary;
    summary["config"] = {
        {"window_len", report.config.window_len},
        {"train_len", report.config.train_len},
        {"alpha", report.config.alpha},
        {"rear_count", report.config.rear_count},
        {"max_iters", report.config.max_iters},
        {"rel_tol", report.config.rel_tol},
        {"threads", report.config.threads},
    };
    for (const Method m : report.config.methods) {
        summary["config"]["methods"].push_back(method_name(m));
    }
    summary["windows"] = json::array();
    for (const WindowResult& w : report.windows) {
        json jw;
        jw["window"] = w.index;
        jw["start"] = w.start_date;
        jw["end"] = w.end_date;
        jw["benchmark_return"] = w.benchmark_return;
        for (const MethodWindowOutcome& o : w.methods) {
            json jo;
            jo["returns"] = o.returns;
            jo["stats"] = stats_json(o.stats);
            jw["methods"][method_name(o.method)] = std::move(jo);
        }
        summary["windows"].push_back(std::move(jw));
    }
    for (const MethodSeries& s : report.series) {
        json js;
        js["min"] = {{"values", s.min.values}, {"cumulative", s.min.cumulative}};
        js["max"] = {{"values", s.max.values}, {"cumulative", s.max.cumulative}};
        js["mean"] = {{"values", s.mean.values}, {"cumulative", s.mean.cumulative}};
        js["mode"] = {{"values", s.mode.values}, {"cumulative", s.mode.cumulative}};
        summary["series"][method_name(s.method)] = std::move(js);
    }
    summary["series"]["BENCH"] = {{"values", report.benchmark.values},
                                  {"cumulative", report.benchmark.cumulative}};

    const std::string summary_path = path_of("summary.json");
    std::ofstream out(summary_path);
    if (!out) {
        throw Error("cannot open " + summary_path + " for writing");
    }
    out << summary.dump(2) << '\n';
    if (!out) {
        throw Error("failed while writing " + summary_path);
    }
    written.push_back(summary_path);
    return written;
}

}  // namespace cumfolio
