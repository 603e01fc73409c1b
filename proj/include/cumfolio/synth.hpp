#ifndef CUMFOLIO_SYNTH_HPP
#define CUMFOLIO_SYNTH_HPP

#include <string>
#include <vector>

#include "cumfolio/backtest.hpp"
#include "cumfolio/panel.hpp"
#include "cumfolio/rng.hpp"

namespace cumfolio {

/// Weekday calendar between two ISO dates (inclusive) minus a fixed holiday
/// list. The holidays are placed so that the span 2014-12-19 .. 2015-09-10
/// contains exactly 180 trading days after the first date, which reproduces
/// the reference nine-window layout of 20-day test windows.
std::vector<std::string> synthetic_calendar(const std::string& first, const std::string& last);

/// Geometric random walk per asset: p[t+1] = p[t] * exp(sigma * z), with
/// sigma = daily_vol_pct / 100 and independent standard normal z.
PricePanel synth_gaussian_panel(const std::vector<std::string>& dates,
                                const std::vector<std::string>& tickers, double daily_vol_pct,
                                Rng& rng);

/// Heavy-tailed variant: log-returns sigma * (z_ti + loading_i * s_t) where
/// s_t is a rare common shock (Bernoulli(shock_prob) times a normal of scale
/// shock_scale) and per-asset loadings sit in [0.5, 1.5]. The mixture has
/// strongly positive excess kurtosis.
PricePanel synth_shock_panel(const std::vector<std::string>& dates,
                             const std::vector<std::string>& tickers, double daily_vol_pct,
                             double shock_prob, double shock_scale, Rng& rng);

/// Single-asset panel whose log-returns follow an AR(1) process with the
/// given coefficient; a negative coefficient yields an anti-persistent
/// series whose local Hurst exponent sits well below one half.
PricePanel synth_ar1_index(const std::vector<std::string>& dates, const std::string& ticker,
                           double ar_coeff, double daily_vol_pct, Rng& rng);

/// Random positive weights, normalized to sum to one.
BenchmarkWeights synth_benchmark(const std::vector<std::string>& tickers, Rng& rng);

}  // namespace cumfolio

#endif  // CUMFOLIO_SYNTH_HPP
