// Command-line front end: synthetic data generation, cumulant dumps,
// factorization, Hurst signals, backtests, and report printing.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cumfolio/backtest.hpp"
#include "cumfolio/cumulants.hpp"
#include "cumfolio/errors.hpp"
#include "cumfolio/factorization.hpp"
#include "cumfolio/hurst.hpp"
#include "cumfolio/output_stage.hpp"
#include "cumfolio/panel.hpp"
#include "cumfolio/rng.hpp"
#include "cumfolio/synth.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
    std::string data_path;
    std::string benchmark_path;
    std::string index_path;  // defaults to data_path when empty
    std::vector<std::string> tickers;
    std::string index_ticker = "INDEX";

    int obs_window = 500;
    std::vector<int> box_sizes;  // empty -> defaults
    int detrend_degree = 1;
    double h_entry = 0.4;
    double h_exit = 0.425;

    int train_len = 1100;
    int window_len = 20;
    double alpha = 7.0;
    int rear_count = 5;
    std::vector<std::string> methods = {"EVD", "PHI4", "PHI6"};
    int n_max = 6;
    int max_iters = 100;
    double rel_tol = 1e-6;

    std::string entry_date;  // used when --episode start:end is absent
    std::string exit_date;
    int post_windows = 0;

    std::string out_dir;
    unsigned long long seed = 1;
    int threads = 1;
};

void apply_config_file(const std::string& path, RunConfig* cfg) {
    std::ifstream in(path);
    if (!in) {
        throw cumfolio::Error("cannot open config file " + path);
    }
    json j;
    in >> j;
    for (const auto& [key, value] : j.items()) {
        if (key == "data") cfg->data_path = value.get<std::string>();
        else if (key == "benchmark") cfg->benchmark_path = value.get<std::string>();
        else if (key == "index") cfg->index_path = value.get<std::string>();
        else if (key == "tickers") cfg->tickers = value.get<std::vector<std::string>>();
        else if (key == "index_ticker") cfg->index_ticker = value.get<std::string>();
        else if (key == "obs_window") cfg->obs_window = value.get<int>();
        else if (key == "box_sizes") cfg->box_sizes = value.get<std::vector<int>>();
        else if (key == "detrend_degree") cfg->detrend_degree = value.get<int>();
        else if (key == "h_entry") cfg->h_entry = value.get<double>();
        else if (key == "h_exit") cfg->h_exit = value.get<double>();
        else if (key == "train_len") cfg->train_len = value.get<int>();
        else if (key == "window_len") cfg->window_len = value.get<int>();
        else if (key == "alpha") cfg->alpha = value.get<double>();
        else if (key == "rear_count") cfg->rear_count = value.get<int>();
        else if (key == "methods") cfg->methods = value.get<std::vector<std::string>>();
        else if (key == "nmax") cfg->n_max = value.get<int>();
        else if (key == "max_iters") cfg->max_iters = value.get<int>();
        else if (key == "rel_tol") cfg->rel_tol = value.get<double>();
        else if (key == "entry") cfg->entry_date = value.get<std::string>();
        else if (key == "exit") cfg->exit_date = value.get<std::string>();
        else if (key == "post_windows") cfg->post_windows = value.get<int>();
        else if (key == "out") cfg->out_dir = value.get<std::string>();
        else if (key == "seed") cfg->seed = value.get<unsigned long long>();
        else if (key == "threads") cfg->threads = value.get<int>();
        else throw cumfolio::Error("unknown config key '" + key + "' in " + path);
    }
}

/// Precedence: --out flag > config "out" > CUMFOLIO_OUT > ./out.
std::string resolve_out_dir(const std::string& flag_value, const RunConfig& cfg) {
    if (!flag_value.empty()) return flag_value;
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv("CUMFOLIO_OUT"); env != nullptr && env[0] != '\0') {
        return env;
    }
    return "out";
}

cumfolio::ReturnPanel load_returns(const RunConfig& cfg, cumfolio::PricePanel* prices_out) {
    if (cfg.data_path.empty()) {
        throw cumfolio::Error("a data file is required; set `data` in the config");
    }
    if (cfg.tickers.empty()) {
        throw cumfolio::Error("a ticker list is required; set `tickers` in the config");
    }
    cumfolio::PricePanel prices = cumfolio::load_prices(cfg.data_path, cfg.tickers);
    cumfolio::ReturnPanel returns = cumfolio::percent_returns(prices);
    if (prices_out != nullptr) *prices_out = std::move(prices);
    return returns;
}

/// The trailing train_len return rows (all rows when shorter) — the slice
/// every estimation-only command works on.
cumfolio::ReturnPanel training_slice(const cumfolio::ReturnPanel& returns, int train_len) {
    if (returns.rows() <= train_len) return returns;
    return cumfolio::slice_rows(returns, returns.rows() - train_len, train_len);
}

std::vector<cumfolio::Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<cumfolio::Method> methods;
    methods.reserve(names.size());
    for (const std::string& name : names) methods.push_back(cumfolio::method_from_name(name));
    return methods;
}

cumfolio::DfaConfig dfa_config(const RunConfig& cfg) {
    cumfolio::DfaConfig dfa;
    dfa.obs_window = cfg.obs_window;
    dfa.box_sizes = cfg.box_sizes;
    dfa.detrend_degree = cfg.detrend_degree;
    dfa.threads = cfg.threads;
    return dfa;
}

int cmd_synth(const RunConfig& cfg, const std::string& out_flag) {
    cumfolio::OutputStager stage(resolve_out_dir(out_flag, cfg));
    cumfolio::Rng rng(cfg.seed);

    const auto dates = cumfolio::synthetic_calendar("2010-01-01", "2016-06-30");
    std::vector<std::string> tickers;
    for (int i = 1; i <= 10; ++i) tickers.push_back("A" + std::to_string(i));

    const auto gauss = cumfolio::synth_gaussian_panel(dates, tickers, 1.0, rng);
    cumfolio::write_prices_csv(gauss, stage.reserve("prices_gauss.csv"));

    const auto shock = cumfolio::synth_shock_panel(dates, tickers, 1.0, 0.05, 5.0, rng);
    cumfolio::write_prices_csv(shock, stage.reserve("prices_shock.csv"));

    const auto index = cumfolio::synth_ar1_index(dates, cfg.index_ticker, -0.6, 1.0, rng);
    cumfolio::write_prices_csv(index, stage.reserve("index_ar1.csv"));

    const auto bp = cumfolio::synth_benchmark(tickers, rng);
    cumfolio::write_benchmark_csv(stage.reserve("benchmark.csv"), bp);

    stage.commit();
    std::cout << "wrote 4 fixture files to " << stage.dir().string() << "\n";
    return 0;
}

int cmd_cumulants(const RunConfig& cfg, const std::string& out_flag) {
    const auto returns = training_slice(load_returns(cfg, nullptr), cfg.train_len);
    const auto family = cumfolio::cumulant_family(returns, cfg.n_max, cfg.threads);

    cumfolio::OutputStager stage(resolve_out_dir(out_flag, cfg));
    for (int n = 2; n <= family.n_max; ++n) {
        cumfolio::write_tensor_csv(stage.reserve("cumulants_o" + std::to_string(n) + ".csv"),
                                   family.order(n));
    }
    stage.commit();
    std::cout << "wrote " << family.n_max - 1 << " tensor files to " << stage.dir().string()
              << "\n";
    return 0;
}

int cmd_factorize(const RunConfig& cfg, const std::string& out_flag) {
    const auto returns = training_slice(load_returns(cfg, nullptr), cfg.train_len);
    const auto methods = parse_methods(cfg.methods);

    const bool need4 = std::count(methods.begin(), methods.end(), cumfolio::Method::Phi4) > 0;
    const bool need6 = std::count(methods.begin(), methods.end(), cumfolio::Method::Phi6) > 0;
    cumfolio::CumulantFamily family;
    if (need4 || need6) {
        family = cumfolio::cumulant_family(returns, need6 ? 6 : 4, cfg.threads);
    }

    cumfolio::OutputStager stage(resolve_out_dir(out_flag, cfg));
    int written = 0;
    for (const cumfolio::Method method : methods) {
        cumfolio::FactorMatrix fm;
        if (method == cumfolio::Method::Evd) {
            const auto c2 = (need4 || need6) ? family.order(2)
                                             : cumfolio::cumulant_tensor(returns, 2, cfg.threads);
            fm = cumfolio::evd_factor(c2);
        } else if (method == cumfolio::Method::Phi4 || method == cumfolio::Method::Phi6) {
            cumfolio::AlsConfig acfg;
            acfg.n_max = method == cumfolio::Method::Phi4 ? 4 : 6;
            acfg.max_iters = cfg.max_iters;
            acfg.rel_tol = cfg.rel_tol;
            cumfolio::CumulantFamily local;
            const cumfolio::CumulantFamily* fam = &family;
            if (acfg.n_max == 4 && family.n_max == 6) {
                local.tensors.assign(family.tensors.begin(), family.tensors.begin() + 3);
                local.n_max = 4;
                local.dim = family.dim;
                local.sample_size = family.sample_size;
                fam = &local;
            }
            fm = cumfolio::als_factor(*fam, acfg).factors;
        } else {
            continue;  // a zero factor matrix is not worth a file
        }
        cumfolio::write_factor_csv(
            stage.reserve("factors_" + cumfolio::method_name(method) + ".csv"), fm);
        ++written;
    }
    stage.commit();
    std::cout << "wrote " << written << " factor files to " << stage.dir().string() << "\n";
    return 0;
}

int cmd_hurst(const RunConfig& cfg, const std::string& out_flag) {
    const std::string path = cfg.index_path.empty() ? cfg.data_path : cfg.index_path;
    if (path.empty()) {
        throw cumfolio::Error("an index price file is required; set `index` in the config");
    }
    const auto panel = cumfolio::load_prices(path, {cfg.index_ticker});
    const auto series = cumfolio::local_hurst(panel.dates(), panel.prices().col(0),
                                              dfa_config(cfg));
    const auto episodes = cumfolio::signals(series, {cfg.h_entry, cfg.h_exit});

    cumfolio::OutputStager stage(resolve_out_dir(out_flag, cfg));
    cumfolio::write_hurst_csv(stage.reserve("hurst.csv"), series);
    cumfolio::write_episodes_csv(stage.reserve("episodes.csv"), episodes);
    stage.commit();
    std::cout << "wrote hurst.csv and episodes.csv (" << episodes.size() << " episode"
              << (episodes.size() == 1 ? "" : "s") << ") to " << stage.dir().string() << "\n";
    return 0;
}

/// --episode forms: "auto" (first episode from cmd_hurst output) or
/// "ENTRY:EXIT" (ISO dates). Falls back to config `entry`/`exit`.
std::pair<std::string, std::string> resolve_episode(const std::string& episode_flag,
                                                    const RunConfig& cfg,
                                                    const std::string& out_dir,
                                                    const cumfolio::PricePanel& prices) {
    std::string entry = cfg.entry_date;
    std::string exit = cfg.exit_date;
    if (episode_flag == "auto") {
        const auto episodes = cumfolio::read_episodes_csv(
            (std::filesystem::path(out_dir) / "episodes.csv").string());
        if (episodes.empty()) {
            throw cumfolio::Error("episodes.csv holds no episodes; nothing to backtest");
        }
        entry = episodes.front().entry_date;
        // An episode still open at series end is tested to the last date.
        exit = episodes.front().exit_date.value_or(prices.dates().back());
    } else if (!episode_flag.empty()) {
        const auto colon = episode_flag.find(':');
        if (colon == std::string::npos) {
            throw cumfolio::Error("--episode expects `auto` or `ENTRY:EXIT` dates");
        }
        entry = episode_flag.substr(0, colon);
        exit = episode_flag.substr(colon + 1);
    }
    if (entry.empty() || exit.empty()) {
        throw cumfolio::Error("no episode: pass --episode or set `entry`/`exit` in the config");
    }
    return {entry, exit};
}

int cmd_backtest(const RunConfig& cfg, const std::string& out_flag,
                 const std::string& episode_flag) {
    if (cfg.benchmark_path.empty()) {
        throw cumfolio::Error("a benchmark file is required; set `benchmark` in the config");
    }
    cumfolio::PricePanel prices({}, {}, {});
    const auto returns = load_returns(cfg, &prices);
    const auto bp = cumfolio::load_benchmark_weights(cfg.benchmark_path);

    const std::string out_dir = resolve_out_dir(out_flag, cfg);
    const auto [entry, exit] = resolve_episode(episode_flag, cfg, out_dir, prices);

    cumfolio::BacktestConfig bcfg;
    bcfg.window_len = cfg.window_len;
    bcfg.train_len = cfg.train_len;
    bcfg.alpha = cfg.alpha;
    bcfg.rear_count = cfg.rear_count;
    bcfg.methods = parse_methods(cfg.methods);
    bcfg.max_iters = cfg.max_iters;
    bcfg.rel_tol = cfg.rel_tol;
    bcfg.threads = cfg.threads;

    cumfolio::OutputStager stage(out_dir);
    for (const char* name : {"min.csv", "max.csv", "mean.csv", "mode.csv", "summary.json"}) {
        stage.reserve(name);
    }
    const auto report = cumfolio::run_backtest(returns, prices, bp, entry, exit, bcfg);
    cumfolio::write_report_csvs(report, out_dir);

    if (cfg.post_windows > 0) {
        const std::string post_dir = (std::filesystem::path(out_dir) / "post").string();
        cumfolio::OutputStager post_stage(post_dir);
        for (const char* name : {"min.csv", "max.csv", "mean.csv", "mode.csv", "summary.json"}) {
            post_stage.reserve(name);
        }
        // Post-exit windows continue from the last in-episode window's end.
        const auto post = cumfolio::post_exit_backtest(
            returns, prices, bp, report.windows.back().end_date, cfg.post_windows, bcfg);
        cumfolio::write_report_csvs(post, post_dir);
        post_stage.commit();
    }
    stage.commit();
    std::cout << "backtest over " << report.windows.size() << " windows ("
              << entry << " .. " << exit << ") written to " << out_dir << "\n";
    return 0;
}

int cmd_report(const RunConfig& cfg, const std::string& out_flag) {
    const std::string out_dir = resolve_out_dir(out_flag, cfg);
    const std::string path = (std::filesystem::path(out_dir) / "summary.json").string();
    std::ifstream in(path);
    if (!in) {
        throw cumfolio::Error("cannot open " + path + "; run the backtest first");
    }
    json summary;
    in >> summary;

    std::cout << "windows: " << summary["windows"].size() << "\n";
    std::cout << "method      stat        final cumulative %\n";
    for (const auto& [method, series] : summary["series"].items()) {
        for (const char* stat : {"min", "max", "mean", "mode"}) {
            if (!series.contains(stat)) continue;
            const auto& cum = series[stat]["cumulative"];
            if (cum.empty()) continue;
            std::printf("%-10s  %-5s  %20.6f\n", method.c_str(), stat,
                        cum.back().get<double>());
        }
        if (series.contains("cumulative")) {  // benchmark entry: flat series
            const auto& cum = series["cumulative"];
            if (!cum.empty()) {
                std::printf("%-10s  %-5s  %20.6f\n", method.c_str(), "all",
                            cum.back().get<double>());
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cumulant-tensor portfolio toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    std::string episode_flag;
    std::optional<int> nmax_flag;
    std::optional<unsigned long long> seed_flag;
    std::optional<int> threads_flag;

    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_flag, "output directory (overrides config and CUMFOLIO_OUT)");
    app.add_option("--nmax", nmax_flag, "highest cumulant order (4 or 6)")
        ->check(CLI::IsMember({4, 6}));
    app.add_option("--episode", episode_flag, "`auto` or `ENTRY:EXIT` ISO dates");
    app.add_option("--seed", seed_flag, "RNG seed for synthetic data");
    app.add_option("--threads", threads_flag, "worker thread cap (0 = all cores)");

    auto* synth = app.add_subcommand("synth", "write synthetic price fixtures");
    auto* cumulants = app.add_subcommand("cumulants", "estimate and dump cumulant tensors");
    auto* factorize = app.add_subcommand("factorize", "write factor matrices per method");
    auto* hurst = app.add_subcommand("hurst", "local Hurst exponents and entry/exit signals");
    auto* backtest = app.add_subcommand("backtest", "rolling-window portfolio backtest");
    auto* report = app.add_subcommand("report", "print cumulative statistics of a backtest");
    for (CLI::App* sub : {synth, cumulants, factorize, hurst, backtest, report}) {
        sub->fallthrough();  // global flags may follow the subcommand name
    }

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) apply_config_file(config_path, &cfg);
        if (nmax_flag) cfg.n_max = *nmax_flag;
        if (seed_flag) cfg.seed = *seed_flag;
        if (threads_flag) cfg.threads = *threads_flag;

        if (synth->parsed()) return cmd_synth(cfg, out_flag);
        if (cumulants->parsed()) return cmd_cumulants(cfg, out_flag);
        if (factorize->parsed()) return cmd_factorize(cfg, out_flag);
        if (hurst->parsed()) return cmd_hurst(cfg, out_flag);
        if (backtest->parsed()) return cmd_backtest(cfg, out_flag, episode_flag);
        if (report->parsed()) return cmd_report(cfg, out_flag);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
