#pragma once

// Flat key=value config parsing, CSV sample I/O, and plain-text records for
// estimates and curves.  All numeric output uses 17 significant digits and
// '\n' line endings so files round-trip bit-exactly and diff cleanly.

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ordsieve/base_cdf.hpp"
#include "ordsieve/criterion.hpp"
#include "ordsieve/estimator.hpp"
#include "ordsieve/orderstat.hpp"
#include "ordsieve/sieve.hpp"

namespace ordsieve {

// Error taxonomy mirrored by the CLI exit codes.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE)
        throw config_error(what + ": cannot parse real value '" + text + "'");
    return v;
}

inline long long parse_integer(const std::string& text, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE)
        throw config_error(what + ": cannot parse integer '" + text + "'");
    return v;
}

}  // namespace detail

// One `key = value` per line; '#' starts a comment; duplicate keys rejected.
class KeyValueConfig {
  public:
    static KeyValueConfig parse_string(const std::string& text) {
        KeyValueConfig cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (detail::trim(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) +
                                   ": expected 'key = value'");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty())
                throw config_error("config line " + std::to_string(lineno) + ": empty key");
            if (!cfg.entries_.emplace(key, value).second)
                throw config_error("config: duplicate key '" + key + "'");
        }
        return cfg;
    }

    static KeyValueConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("config: cannot open '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str());
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    const std::string& get_string(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw config_error("config: missing key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key) const {
        return detail::parse_double(get_string(key), "config key '" + key + "'");
    }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    long long get_integer(const std::string& key) const {
        return detail::parse_integer(get_string(key), "config key '" + key + "'");
    }
    long long get_integer(const std::string& key, long long fallback) const {
        return has(key) ? get_integer(key) : fallback;
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

// "kind(p1[, p2])" with kind in {uniform, normal, truncnormal, exponential}.
inline BaseCdf parse_base_spec(const std::string& spec) {
    const std::string s = detail::trim(spec);
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        throw config_error("base spec '" + spec + "': expected kind(params)");
    const std::string kind = detail::trim(s.substr(0, open));
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    std::vector<double> args;
    std::istringstream in(inner);
    std::string piece;
    while (std::getline(in, piece, ','))
        args.push_back(detail::parse_double(detail::trim(piece), "base spec '" + spec + "'"));
    const auto want = [&](std::size_t count) {
        if (args.size() != count)
            throw config_error("base spec '" + spec + "': expected " + std::to_string(count) +
                               " parameter(s)");
    };
    try {
        if (kind == "uniform") {
            want(2);
            return BaseCdf::uniform(args[0], args[1]);
        }
        if (kind == "normal") {
            want(2);
            return BaseCdf::normal(args[0], args[1]);
        }
        if (kind == "truncnormal") {
            want(2);
            return BaseCdf::truncnormal(args[0], args[1]);
        }
        if (kind == "exponential") {
            want(1);
            return BaseCdf::exponential(args[0]);
        }
    } catch (const std::invalid_argument& e) {
        throw config_error("base spec '" + spec + "': " + e.what());
    }
    throw config_error("base spec '" + spec + "': unknown kind '" + kind + "'");
}

inline std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ','))
        out.push_back(detail::parse_double(detail::trim(piece), what));
    return out;
}

// Everything a run needs; truth vectors may be empty for estimate-only use.
struct RunConfig {
    OrderStatDesign design{3, 1, 2};
    std::size_t n_obs = 0;  // N
    int k = 0;
    double kappa = 1.0;
    BaseCdf base_xi = BaseCdf::normal(0.0, 0.25);
    BaseCdf base_eps = BaseCdf::truncnormal(0.0, 1.0);
    double bound_c = 5.0;
    std::uint64_t seed = 0;
    int replications = 1;
    OptimizerSettings opt;
    std::vector<double> truth_theta_xi;
    std::vector<double> truth_theta_eps;
};

inline RunConfig parse_run_config(const KeyValueConfig& cfg) {
    RunConfig rc;
    try {
        rc.design = OrderStatDesign(static_cast<int>(cfg.get_integer("n")),
                                    static_cast<int>(cfg.get_integer("r")),
                                    static_cast<int>(cfg.get_integer("s")));
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    const long long n_obs = cfg.get_integer("N");
    if (n_obs < 2) throw config_error("config: N >= 2 required");
    rc.n_obs = static_cast<std::size_t>(n_obs);
    const long long k = cfg.get_integer("k");
    if (k < 0) throw config_error("config: k >= 0 required");
    rc.k = static_cast<int>(k);
    rc.kappa = cfg.get_double("kappa", 1.0);
    if (!(rc.kappa > 0.0)) throw config_error("config: kappa > 0 required");
    rc.bound_c = cfg.get_double("c", 5.0);
    if (!(rc.bound_c > 0.0)) throw config_error("config: c > 0 required");
    rc.base_xi = parse_base_spec(cfg.get_string("base_xi"));
    rc.base_eps = parse_base_spec(cfg.get_string("base_eps"));
    rc.seed = static_cast<std::uint64_t>(cfg.get_integer("seed", 1));
    const long long reps = cfg.get_integer("replications", 1);
    if (reps < 1) throw config_error("config: replications >= 1 required");
    rc.replications = static_cast<int>(reps);

    rc.opt.random_starts = static_cast<int>(cfg.get_integer("starts", 8));
    rc.opt.max_evals_per_start = cfg.get_integer("max_evals", 20000);
    rc.opt.diameter_tol = cfg.get_double("diameter_tol", 1e-6);
    rc.opt.initial_step = cfg.get_double("initial_step", 0.1);
    if (rc.opt.random_starts < 0 || rc.opt.max_evals_per_start < 1 ||
        !(rc.opt.diameter_tol > 0.0) || !(rc.opt.initial_step > 0.0))
        throw config_error("config: bad optimizer settings");

    // Truth order is the vector length; it need not match the estimation
    // order k (fitting a low-order sieve to a higher-order truth is the
    // standard consistency experiment).
    const auto read_truth = [&](const char* key) -> std::vector<double> {
        if (!cfg.has(key)) return {};
        auto theta = parse_real_list(cfg.get_string(key), std::string("config key '") + key + "'");
        if (!theta_feasible(static_cast<int>(theta.size()), theta, rc.bound_c))
            throw config_error(std::string("config: ") + key + " violates the Theta_k bounds");
        return theta;
    };
    rc.truth_theta_xi = read_truth("truth_theta_xi");
    rc.truth_theta_eps = read_truth("truth_theta_eps");
    return rc;
}

// ---- CSV / record output ----------------------------------------------

inline void write_sample_csv(const std::string& path, const ObservedSample& sample) {
    std::ofstream out(path, std::ios::binary);  // binary: keep '\n' endings everywhere
    if (!out) throw data_error("cannot write '" + path + "'");
    out << "x_r,x_s\n";
    for (std::size_t i = 0; i < sample.size(); ++i)
        out << detail::g17(sample.xr[i]) << ',' << detail::g17(sample.xs[i]) << '\n';
    if (!out) throw data_error("write failed for '" + path + "'");
}

inline ObservedSample read_sample_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "x_r,x_s")
        throw data_error("'" + path + "': expected header 'x_r,x_s'");
    std::vector<double> xr, xs;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw data_error("'" + path + "' line " + std::to_string(lineno) +
                             ": expected 'x_r,x_s'");
        const std::string where = "'" + path + "' line " + std::to_string(lineno);
        double a, b;
        try {
            a = detail::parse_double(detail::trim(line.substr(0, comma)), where);
            b = detail::parse_double(detail::trim(line.substr(comma + 1)), where);
        } catch (const config_error& e) {
            throw data_error(e.what());
        }
        if (!(a <= b)) throw data_error(where + ": x_r > x_s");
        xr.push_back(a);
        xs.push_back(b);
    }
    if (xr.empty()) throw data_error("'" + path + "': no data rows");
    return ObservedSample(std::move(xr), std::move(xs));
}

inline void write_estimate_record(const std::string& path, const EstimateResult& result,
                                  const SieveCdf& f_xi, const SieveCdf& f_eps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << "criterion_value = " << detail::g17(result.criterion_value) << "\n";
    out << "evaluations = " << result.evaluations << "\n";
    out << "converged = " << (result.converged ? 1 : 0) << "\n";
    out << "restarts_used = " << result.restarts_used << "\n";
    const auto emit_block = [&out](const char* prefix, const SieveCdf& f) {
        std::istringstream rec(sieve_to_record(f));
        std::string line;
        while (std::getline(rec, line)) out << prefix << line << "\n";
    };
    emit_block("xi_", f_xi);
    emit_block("eps_", f_eps);
    if (!out) throw data_error("write failed for '" + path + "'");
}

// 201-point CDF table "x,F_xi_hat,F_eps_hat" spanning [lo, hi].
inline void write_cdf_curves(const std::string& path, const SieveCdf& f_xi,
                             const SieveCdf& f_eps, double lo, double hi, int points = 201) {
    if (!(hi > lo) || points < 2) throw data_error("write_cdf_curves: bad grid");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << "x,F_xi_hat,F_eps_hat\n";
    for (int g = 0; g < points; ++g) {
        const double x = lo + (hi - lo) * g / static_cast<double>(points - 1);
        out << detail::g17(x) << ',' << detail::g17(f_xi.cdf(x)) << ','
            << detail::g17(f_eps.cdf(x)) << '\n';
    }
    if (!out) throw data_error("write failed for '" + path + "'");
}

}  // namespace ordsieve
