#pragma once

// Command implementations behind the CLI: data generation, single estimation
// runs, the Monte Carlo study, and the Rossberg diagnostic reproduction.
// Every command's output is a pure function of (config, seed, input files);
// wall-clock timings go to stderr only so files stay bit-identical.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ordsieve/criterion.hpp"
#include "ordsieve/diagnostics.hpp"
#include "ordsieve/estimator.hpp"
#include "ordsieve/io.hpp"
#include "ordsieve/random.hpp"
#include "ordsieve/sieve.hpp"

namespace ordsieve {

namespace detail {

// Truth order comes from the theta length; an empty vector is the pure base.
inline SieveCdf truth_sieve(const BaseCdf& base, std::vector<double> theta, double c) {
    const int order = static_cast<int>(theta.size());
    return SieveCdf(base, order, std::move(theta), c);
}

// Type-7 (linear interpolation) sample quantile of an unsorted copy.
inline double sample_quantile(std::vector<double> v, double p) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

// sup_x |fit(x) - truth(x)| over 201 truth quantiles, p in [0.005, 0.995].
inline double sup_cdf_error(const SieveCdf& fit, const SieveCdf& truth) {
    double worst = 0.0;
    for (int g = 0; g <= 200; ++g) {
        const double p = 0.005 + 0.99 * g / 200.0;
        const double x = truth.quantile(p);
        worst = std::max(worst, std::fabs(fit.cdf(x) - truth.cdf(x)));
    }
    return worst;
}

inline std::vector<double> ecdf_on_grid(std::vector<double> sample,
                                        const std::vector<double>& grid) {
    std::sort(sample.begin(), sample.end());
    std::vector<double> out;
    out.reserve(grid.size());
    for (const double x : grid)
        out.push_back(static_cast<double>(std::upper_bound(sample.begin(), sample.end(), x) -
                                          sample.begin()) /
                      static_cast<double>(sample.size()));
    return out;
}

}  // namespace detail

// Draws N observed rows from the configured truth.  Data stream: child 0.
inline int cmd_simulate(const RunConfig& rc, const std::string& out_path) {
    const SieveCdf truth_xi =
        detail::truth_sieve(rc.base_xi, rc.truth_theta_xi, rc.bound_c);
    const SieveCdf truth_eps =
        detail::truth_sieve(rc.base_eps, rc.truth_theta_eps, rc.bound_c);
    const SimPanel panel(rc.n_obs, rc.design.n, child_seed(rc.seed, 0));
    write_sample_csv(out_path, simulate_sample(truth_xi, truth_eps, panel, rc.design));
    return 0;
}

// Runs the estimator on a data file.  The simulation panel reuses child
// stream 0 — the same stream `simulate` draws its data from — so a sample
// generated with the same seed and N is exactly self-matched (criterion 0
// at the truth); pass a different --seed to decouple.  Optimizer stream:
// child 1.  Writes <out>.estimate.txt and <out>.curves.csv; exits 4 on
// non-convergence with both files still written.
inline int cmd_estimate(const RunConfig& rc, const std::string& data_path,
                        const std::string& out_prefix) {
    const ObservedSample data = read_sample_csv(data_path);
    if (data.size() != rc.n_obs)
        throw data_error("'" + data_path + "': " + std::to_string(data.size()) +
                         " rows but config N = " + std::to_string(rc.n_obs));
    const SimPanel panel(data.size(), rc.design.n, child_seed(rc.seed, 0));
    OptimizerSettings opt = rc.opt;
    opt.seed = child_seed(rc.seed, 1);
    const EstimateResult result = estimate(data, rc.base_xi, rc.base_eps, rc.k,
                                           {rc.kappa, rc.design}, panel, opt, rc.bound_c);
    const SieveCdf f_xi(rc.base_xi, rc.k, result.theta_xi, rc.bound_c);
    const SieveCdf f_eps(rc.base_eps, rc.k, result.theta_eps, rc.bound_c);
    write_estimate_record(out_prefix + ".estimate.txt", result, f_xi, f_eps);
    const double lo = *std::min_element(data.xr.begin(), data.xr.end());
    const double hi = *std::max_element(data.xs.begin(), data.xs.end());
    write_cdf_curves(out_prefix + ".curves.csv", f_xi, f_eps, lo, hi);
    return result.converged ? 0 : 4;
}

namespace detail {

struct RepRow {
    std::uint64_t seed = 0;  // data-stream seed: rerun replication j in isolation
    bool ok = false;
    double criterion = std::numeric_limits<double>::quiet_NaN();
    double sup_err_xi = std::numeric_limits<double>::quiet_NaN();
    double sup_err_eps = std::numeric_limits<double>::quiet_NaN();
    long long evaluations = 0;
    bool converged = false;
};

}  // namespace detail

// The replication study.  Replication j owns child seeds {3j, 3j+1, 3j+2}
// (data, panel, optimizer), so any row reruns in isolation.  Workers fill a
// preallocated row table; a single writer emits rows in replication order,
// so montecarlo.csv is identical for every --jobs value.
inline int cmd_montecarlo(const RunConfig& rc, const std::string& out_dir, int jobs = 1) {
    if (jobs < 1) throw config_error("--jobs must be >= 1");
    std::filesystem::create_directories(out_dir);
    const SieveCdf truth_xi =
        detail::truth_sieve(rc.base_xi, rc.truth_theta_xi, rc.bound_c);
    const SieveCdf truth_eps =
        detail::truth_sieve(rc.base_eps, rc.truth_theta_eps, rc.bound_c);

    const int reps = rc.replications;
    std::vector<detail::RepRow> rows(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    std::mutex log_mutex;

    const auto run_rep = [&](int j) {
        detail::RepRow row;
        row.seed = child_seed(rc.seed, 3 * static_cast<std::uint64_t>(j));
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const SimPanel data_panel(rc.n_obs, rc.design.n, row.seed);
            const ObservedSample data =
                simulate_sample(truth_xi, truth_eps, data_panel, rc.design);
            const SimPanel sim_panel(rc.n_obs, rc.design.n,
                                     child_seed(rc.seed, 3 * static_cast<std::uint64_t>(j) + 1));
            OptimizerSettings opt = rc.opt;
            opt.seed = child_seed(rc.seed, 3 * static_cast<std::uint64_t>(j) + 2);
            const EstimateResult result = estimate(data, rc.base_xi, rc.base_eps, rc.k,
                                                   {rc.kappa, rc.design}, sim_panel, opt,
                                                   rc.bound_c);
            const SieveCdf f_xi(rc.base_xi, rc.k, result.theta_xi, rc.bound_c);
            const SieveCdf f_eps(rc.base_eps, rc.k, result.theta_eps, rc.bound_c);
            row.ok = true;
            row.criterion = result.criterion_value;
            row.sup_err_xi = detail::sup_cdf_error(f_xi, truth_xi);
            row.sup_err_eps = detail::sup_cdf_error(f_eps, truth_eps);
            row.evaluations = result.evaluations;
            row.converged = result.converged;
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(log_mutex);
            std::cerr << "rep " << j << " failed: " << e.what() << "\n";
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        {
            std::lock_guard<std::mutex> lock(log_mutex);
            std::cerr << "rep " << j << (row.ok ? " ok " : " error ") << secs << "s\n";
        }
        rows[static_cast<std::size_t>(j)] = row;
    };

    const auto worker = [&] {
        for (int j = next.fetch_add(1); j < reps; j = next.fetch_add(1)) run_rep(j);
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int count = std::min(jobs, reps);
        pool.reserve(static_cast<std::size_t>(count));
        for (int t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const std::string path = (std::filesystem::path(out_dir) / "montecarlo.csv").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << "rep,seed,status,criterion,sup_err_xi,sup_err_eps,evaluations,converged\n";
    std::vector<double> col_crit, col_xi, col_eps, col_ev, col_conv;
    for (int j = 0; j < reps; ++j) {
        const auto& row = rows[static_cast<std::size_t>(j)];
        out << j << ',' << row.seed << ',' << (row.ok ? "ok" : "error") << ','
            << detail::g17(row.criterion) << ',' << detail::g17(row.sup_err_xi) << ','
            << detail::g17(row.sup_err_eps) << ',' << row.evaluations << ','
            << (row.converged ? 1 : 0) << '\n';
        if (row.ok) {
            col_crit.push_back(row.criterion);
            col_xi.push_back(row.sup_err_xi);
            col_eps.push_back(row.sup_err_eps);
            col_ev.push_back(static_cast<double>(row.evaluations));
            col_conv.push_back(row.converged ? 1.0 : 0.0);
        }
    }
    const auto med = [](const std::vector<double>& v) {
        return detail::sample_quantile(v, 0.5);
    };
    const auto iqr = [](const std::vector<double>& v) {
        return detail::sample_quantile(v, 0.75) - detail::sample_quantile(v, 0.25);
    };
    out << "median,,," << detail::g17(med(col_crit)) << ',' << detail::g17(med(col_xi)) << ','
        << detail::g17(med(col_eps)) << ',' << detail::g17(med(col_ev)) << ','
        << detail::g17(med(col_conv)) << '\n';
    out << "iqr,,," << detail::g17(iqr(col_crit)) << ',' << detail::g17(iqr(col_xi)) << ','
        << detail::g17(iqr(col_eps)) << ',' << detail::g17(iqr(col_ev)) << ','
        << detail::g17(iqr(col_conv)) << '\n';
    if (!out) throw data_error("write failed for '" + path + "'");
    return 0;
}

// Identification diagnostics at n=2, r=1, s=2: ch.f.-ratio
// curves (observed data drawn from the exponential model), spacing and
// cross-sum CDF tables, and a KS summary.  Child streams: 0 observed,
// 1 exponential model, 2 Rossberg model, 3/4 spacings, 5/6 cross-sums.
inline int cmd_rossberg(std::uint64_t seed, std::size_t draws, const std::string& out_dir) {
    if (draws < 2) throw config_error("--draws must be >= 2");
    std::filesystem::create_directories(out_dir);
    const OrderStatDesign d(2, 1, 2);
    const ExponentialCdf expo{1.0};
    const RossbergCdf ross;
    // The latent cancels in the ratio; a tight one keeps |E e^{itX_(r)}|
    // comfortably above the reliability floor across the whole t grid.
    const BaseCdf latent = BaseCdf::normal(0.0, 0.25);

    std::vector<double> t_grid;
    for (int i = 0; i <= 80; ++i) t_grid.push_back(-4.0 + 8.0 * i / 80.0);

    const auto observed =
        chf_ratio_curve(simulate_orderstat_pairs(expo, latent, d, draws, child_seed(seed, 0)),
                        t_grid);
    const auto exp_model = chf_ratio_curve(expo, latent, d, t_grid, draws, child_seed(seed, 1));
    const auto ross_model = chf_ratio_curve(ross, latent, d, t_grid, draws, child_seed(seed, 2));

    const auto write_ratio = [&](const std::string& name, auto part) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw data_error("cannot write '" + path + "'");
        out << "t,observed,observed_se,exponential,exponential_se,rossberg,rossberg_se\n";
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            out << detail::g17(t_grid[i]);
            for (const auto* curve : {&observed, &exp_model, &ross_model}) {
                const auto& pt = (*curve)[i];
                out << ',' << detail::g17(pt.reliable ? part(pt.ratio) : nan) << ','
                    << detail::g17(pt.reliable ? pt.se : nan);
            }
            out << '\n';
        }
        if (!out) throw data_error("write failed for '" + path + "'");
    };
    write_ratio("ratio_real.csv", [](const std::complex<double>& z) { return z.real(); });
    write_ratio("ratio_imag.csv", [](const std::complex<double>& z) { return z.imag(); });

    const auto write_pair_cdf = [&](const std::string& name, const char* header,
                                    std::vector<double> a, std::vector<double> b,
                                    const DistanceReport& report) {
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw data_error("cannot write '" + path + "'");
        out << header;
        const auto fa = detail::ecdf_on_grid(std::move(a), report.grid);
        const auto fb = detail::ecdf_on_grid(std::move(b), report.grid);
        for (std::size_t i = 0; i < report.grid.size(); ++i)
            out << detail::g17(report.grid[i]) << ',' << detail::g17(fa[i]) << ','
                << detail::g17(fb[i]) << '\n';
        if (!out) throw data_error("write failed for '" + path + "'");
    };

    const auto spacing_exp = spacing_sample(expo, d, draws, child_seed(seed, 3));
    const auto spacing_ross = spacing_sample(ross, d, draws, child_seed(seed, 4));
    const DistanceReport spacing_report = ks_report(spacing_exp, spacing_ross);
    write_pair_cdf("spacing_cdf.csv", "x,exponential,rossberg\n", spacing_exp, spacing_ross,
                   spacing_report);

    const auto cross_exp = crosssum_sample(expo, expo, d, draws, child_seed(seed, 5));
    const auto cross_ross = crosssum_sample(expo, ross, d, draws, child_seed(seed, 6));
    const DistanceReport cross_report = ks_report(cross_exp, cross_ross);
    write_pair_cdf("crosssum_cdf.csv", "x,exp_exp,exp_rossberg\n", cross_exp, cross_ross,
                   cross_report);

    // Two-sample KS critical value at significance 1e-3.
    const double m1 = static_cast<double>(spacing_report.sample_sizes.first);
    const double m2 = static_cast<double>(spacing_report.sample_sizes.second);
    const double critical = std::sqrt(-std::log(0.5e-3) / 2.0) * std::sqrt((m1 + m2) / (m1 * m2));

    const std::string path = (std::filesystem::path(out_dir) / "distance_summary.txt").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << "draws = " << draws << "\n";
    out << "seed = " << seed << "\n";
    out << "spacing_ks = " << detail::g17(spacing_report.statistic) << "\n";
    out << "spacing_threshold = " << detail::g17(0.004) << "\n";
    out << "spacing_flag = " << (spacing_report.statistic < 0.004 ? "aligned" : "misaligned")
        << "\n";
    out << "crosssum_ks = " << detail::g17(cross_report.statistic) << "\n";
    out << "crosssum_critical = " << detail::g17(critical) << "\n";
    out << "crosssum_flag = " << (cross_report.statistic > critical ? "distinct" : "indistinct")
        << "\n";
    if (!out) throw data_error("write failed for '" + path + "'");
    return 0;
}

}  // namespace ordsieve
