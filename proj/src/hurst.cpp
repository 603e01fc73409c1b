#include "cumfolio/hurst.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "cumfolio/csv.hpp"
#include "cumfolio/errors.hpp"
#include "cumfolio/parallel.hpp"

namespace cumfolio {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Thin Q factor of the Vandermonde matrix on local coordinates 0..s-1; the
/// least-squares residual in any box is then y - Q (Q^T y), shared by every
/// box of the same size.
Matrix detrend_q(int s, int degree) {
    Matrix vand(s, degree + 1);
    for (int r = 0; r < s; ++r) {
        double p = 1.0;
        for (int c = 0; c <= degree; ++c) {
            vand(r, c) = p;
            p *= r;
        }
    }
    Eigen::HouseholderQR<Matrix> qr(vand);
    return qr.householderQ() * Matrix::Identity(s, degree + 1);
}

double fluctuation_with_q(const Vector& profile, int s, const Matrix& q) {
    const auto n = static_cast<int>(profile.size());
    const int n_boxes = n / s;
    double total = 0.0;
    for (int b = 0; b < n_boxes; ++b) {
        // One box from the start and its mirror from the end, so a remainder
        // shorter than s never leaves data uncovered on either side.
        for (const int at : {b * s, n - (b + 1) * s}) {
            const Vector seg = profile.segment(at, s);
            total += (seg - q * (q.transpose() * seg)).squaredNorm();
        }
    }
    return std::sqrt(total / (2.0 * n_boxes * s));
}

Vector profile_of(const Vector& series) {
    Vector profile(series.size());
    const double mean = series.mean();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < series.size(); ++k) {
        acc += series[k] - mean;
        profile[k] = acc;
    }
    return profile;
}

void check_box(int box_size, int degree, Eigen::Index series_len) {
    if (degree < 0) {
        throw OutOfRangeError("detrend degree must be nonnegative");
    }
    if (box_size < degree + 2) {
        throw OutOfRangeError("box size " + std::to_string(box_size) +
                              " too small for a degree-" + std::to_string(degree) +
                              " detrend (need >= degree + 2)");
    }
    if (2 * static_cast<Eigen::Index>(box_size) > series_len) {
        throw BoxTooLargeError("box size " + std::to_string(box_size) +
                               " needs a series of length >= " + std::to_string(2 * box_size) +
                               ", got " + std::to_string(series_len));
    }
}

/// Slope and R^2 of the least-squares line through (x, y).
void fit_line(const std::vector<double>& x, const std::vector<double>& y, double* slope,
              double* r2) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    *slope = sxy / sxx;
    *r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
}

/// Per-box-size state shared across all dates of one run.
struct DfaKernel {
    int window;
    int degree;
    std::vector<int> boxes;
    std::vector<Matrix> qs;
    std::vector<double> log_s;

    explicit DfaKernel(const DfaConfig& cfg) : window(cfg.obs_window), degree(cfg.detrend_degree) {
        if (window < 4) {
            throw OutOfRangeError("observation window must be at least 4 days");
        }
        boxes = cfg.box_sizes.empty() ? default_box_sizes(window) : cfg.box_sizes;
        const Eigen::Index series_len = window - 1;  // log-returns in the window
        for (const int s : boxes) {
            check_box(s, degree, series_len);
            if (s > window / 4) {
                throw OutOfRangeError("box size " + std::to_string(s) +
                                      " exceeds a quarter of the observation window");
            }
            qs.push_back(detrend_q(s, degree));
            log_s.push_back(std::log(static_cast<double>(s)));
        }
        if (boxes.size() < 2) {
            throw OutOfRangeError("need at least 2 box sizes for the log-log fit");
        }
    }

    /// H from the window of log-returns; NaN when fewer than two box sizes
    /// produce a positive fluctuation.
    double eval(const Vector& log_returns, double* r2_out) const {
        const Vector profile = profile_of(log_returns);
        std::vector<double> xs, ys;
        xs.reserve(boxes.size());
        ys.reserve(boxes.size());
        for (std::size_t k = 0; k < boxes.size(); ++k) {
            const double f = fluctuation_with_q(profile, boxes[k], qs[k]);
            if (f > 0.0 && std::isfinite(f)) {
                xs.push_back(log_s[k]);
                ys.push_back(std::log(f));
            }
        }
        if (xs.size() < 2) {
            if (r2_out != nullptr) *r2_out = kNan;
            return kNan;
        }
        double slope = kNan, r2 = kNan;
        fit_line(xs, ys, &slope, &r2);
        if (r2_out != nullptr) *r2_out = r2;
        return slope;
    }
};

Vector log_returns_of(const Vector& prices) {
    for (Eigen::Index k = 0; k < prices.size(); ++k) {
        if (!(prices[k] > 0.0) || !std::isfinite(prices[k])) {
            throw NonPositivePriceError("price at position " + std::to_string(k) +
                                        " must be positive and finite");
        }
    }
    Vector lr(prices.size() - 1);
    for (Eigen::Index k = 0; k + 1 < prices.size(); ++k) {
        lr[k] = std::log(prices[k + 1] / prices[k]);
    }
    return lr;
}

}  // namespace

std::vector<int> default_box_sizes(int obs_window) {
    const int hi = obs_window / 4;
    constexpr int lo = 10;
    if (hi < lo) {
        throw OutOfRangeError("observation window " + std::to_string(obs_window) +
                              " too short for the default box range [10, window/4]");
    }
    std::vector<int> sizes;
    constexpr int count = 20;
    const double step = std::log(static_cast<double>(hi) / lo) / (count - 1);
    for (int k = 0; k < count; ++k) {
        const int s = static_cast<int>(std::lround(lo * std::exp(step * k)));
        if (sizes.empty() || s != sizes.back()) sizes.push_back(s);
    }
    return sizes;
}

double dfa_fluctuation(const Vector& series, int box_size, int degree) {
    check_box(box_size, degree, series.size());
    return fluctuation_with_q(profile_of(series), box_size, detrend_q(box_size, degree));
}

HurstSeries local_hurst(const std::vector<std::string>& dates, const Vector& prices,
                        const DfaConfig& cfg) {
    if (static_cast<Eigen::Index>(dates.size()) != prices.size()) {
        throw RowMismatchError("dates and prices disagree: " + std::to_string(dates.size()) +
                               " vs " + std::to_string(prices.size()));
    }
    const auto t_total = static_cast<int>(prices.size());
    if (t_total < cfg.obs_window) {
        throw TooShortError("need at least " + std::to_string(cfg.obs_window) +
                            " prices, got " + std::to_string(t_total));
    }
    const DfaKernel kernel(cfg);
    const Vector lr = log_returns_of(prices);
    const int w = cfg.obs_window;

    HurstSeries series;
    const auto n_out = static_cast<std::size_t>(t_total - w);
    series.dates.assign(dates.begin() + w, dates.end());
    series.h.assign(n_out, kNan);
    series.fit_r2.assign(n_out, kNan);
    parallel_for(n_out, cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const auto t = static_cast<Eigen::Index>(k) + w;
            // Prices p[t-w .. t-1] contribute log-returns lr[t-w .. t-2].
            series.h[k] = kernel.eval(lr.segment(t - w, w - 1), &series.fit_r2[k]);
        }
    });
    return series;
}

double hurst_at(const Vector& prices, int t, const DfaConfig& cfg, double* fit_r2) {
    if (t < cfg.obs_window || t > prices.size()) {
        throw TooShortError("date index " + std::to_string(t) + " lacks " +
                            std::to_string(cfg.obs_window) + " prior prices");
    }
    const DfaKernel kernel(cfg);
    const Vector window = prices.segment(t - cfg.obs_window, cfg.obs_window);
    return kernel.eval(log_returns_of(window), fit_r2);
}

std::vector<Episode> signals(const HurstSeries& series, const SignalConfig& cfg) {
    if (cfg.h_exit < cfg.h_entry) {
        throw OutOfRangeError("exit threshold must be >= entry threshold");
    }
    std::vector<Episode> episodes;
    bool open = false;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double h = series.h[k];
        if (std::isnan(h)) continue;
        if (!open && h < cfg.h_entry) {
            episodes.push_back({series.dates[k], std::nullopt});
            open = true;
        } else if (open && h > cfg.h_exit) {
            episodes.back().exit_date = series.dates[k];
            open = false;
        }
    }
    return episodes;
}

void write_hurst_csv(const std::string& path, const HurstSeries& series) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out << "date,h,fit_r2\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        out << series.dates[k] << ',' << csv::format_double(series.h[k]) << ','
            << csv::format_double(series.fit_r2[k]) << '\n';
    }
    if (!out) {
        throw Error("failed while writing " + path);
    }
}

void write_episodes_csv(const std::string& path, const std::vector<Episode>& episodes) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out << "entry_date,exit_date\n";
    for (const Episode& e : episodes) {
        out << e.entry_date << ',' << e.exit_date.value_or("") << '\n';
    }
    if (!out) {
        throw Error("failed while writing " + path);
    }
}

std::vector<Episode> read_episodes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || csv::trim(line) != "entry_date,exit_date") {
        throw MalformedRowError("bad episodes header in " + path);
    }
    std::vector<Episode> episodes;
    while (std::getline(in, line)) {
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split(line, ',');
        if (fields.size() != 2) {
            throw MalformedRowError("episode rows in " + path + " need 2 fields");
        }
        Episode e;
        e.entry_date = csv::trim(fields[0]);
        const std::string exit = csv::trim(fields[1]);
        if (!exit.empty()) e.exit_date = exit;
        episodes.push_back(std::move(e));
    }
    return episodes;
}

}  // namespace cumfolio
