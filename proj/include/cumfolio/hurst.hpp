#ifndef CUMFOLIO_HURST_HPP
#define CUMFOLIO_HURST_HPP

#include <optional>
#include <string>
#include <vector>

#include "cumfolio/tensor_algebra.hpp"

namespace cumfolio {

struct DfaConfig {
    int obs_window = 500;        // trailing trading days feeding each estimate
    std::vector<int> box_sizes;  // empty -> default_box_sizes(obs_window)
    int detrend_degree = 1;
    int threads = 1;
};

/// About 20 log-spaced integer box sizes in [10, obs_window/4], deduplicated.
std::vector<int> default_box_sizes(int obs_window);

/// Detrended fluctuation at one box size: profile the mean-subtracted series,
/// cover it with floor(N/s) boxes from the start and the same number from the
/// end, remove a degree-`degree` least-squares polynomial per box, and return
/// sqrt of the mean squared residual over all boxes.
double dfa_fluctuation(const Vector& series, int box_size, int degree);

struct HurstSeries {
    std::vector<std::string> dates;  // only dates with >= obs_window prior prices
    std::vector<double> h;
    std::vector<double> fit_r2;

    std::size_t size() const { return dates.size(); }
};

/// Local Hurst exponent for every date with at least cfg.obs_window strictly
/// prior prices: H(t) is the log-log slope of the fluctuation of the
/// log-returns of prices[t - obs_window .. t - 1] across cfg.box_sizes, so
/// the estimate only uses information available before day t.
HurstSeries local_hurst(const std::vector<std::string>& dates, const Vector& prices,
                        const DfaConfig& cfg);

/// Single-date variant: H for date index t of `prices` (needs t >= obs_window).
double hurst_at(const Vector& prices, int t, const DfaConfig& cfg, double* fit_r2 = nullptr);

struct SignalConfig {
    double h_entry = 0.4;
    double h_exit = 0.425;  // must be >= h_entry (hysteresis band)
};

struct Episode {
    std::string entry_date;
    std::optional<std::string> exit_date;  // empty while still open at series end
};

/// Hysteresis walk: entry on the first date with H < h_entry while flat, exit
/// on the first later date with H > h_exit; episodes never overlap. Dates
/// with undefined H are skipped.
std::vector<Episode> signals(const HurstSeries& series, const SignalConfig& cfg);

void write_hurst_csv(const std::string& path, const HurstSeries& series);
void write_episodes_csv(const std::string& path, const std::vector<Episode>& episodes);
std::vector<Episode> read_episodes_csv(const std::string& path);

}  // namespace cumfolio

#endif  // CUMFOLIO_HURST_HPP
