#ifndef PREDCONS_EXPERIMENT_HPP
#define PREDCONS_EXPERIMENT_HPP

// Experiment drivers: MSE traces, gain sweeps, theory checks and DOI
// accuracy runs over a topology and a list of network sizes.

#include "predcons/accel.hpp"
#include "predcons/doi.hpp"
#include "predcons/engine.hpp"
#include "predcons/error.hpp"
#include "predcons/graph.hpp"
#include "predcons/predictor.hpp"
#include "predcons/rng.hpp"
#include "predcons/spectral.hpp"
#include "predcons/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace predcons {

// ---------------------------------------------------------------- config

enum class ThetaKind { least_squares, asymptotic };

struct ThetaChoice {
    ThetaKind kind = ThetaKind::asymptotic;
    double eps = 0.5;   ///< only for the asymptotic family

    [[nodiscard]] PredictorParams params() const
    {
        return kind == ThetaKind::least_squares ? least_squares_theta() : asymptotic_theta(eps);
    }

    friend bool operator==(const ThetaChoice&, const ThetaChoice&) = default;
};

/// Where alpha* gets its lambda2: the exact spectrum, or decentralized
/// orthogonal iteration with K iterations (0 means 2N) and period L.
struct Lambda2Source {
    bool use_doi = true;
    std::size_t iterations = 0;
    std::size_t period = 10;
    std::optional<Seed> seed;   ///< DOI init stream; unset derives it from the trial seed

    [[nodiscard]] std::size_t iterations_for(std::size_t n) const { return iterations == 0 ? 2 * n : iterations; }

    /// L, capped at K so that the K = 2N default stays valid for tiny networks.
    [[nodiscard]] DoiConfig config_for(std::size_t n, Seed trial) const
    {
        const std::size_t k = iterations_for(n);
        return DoiConfig{k, std::min(period, k), seed ? derive_seed(*seed, trial) : derive_seed(trial, 2)};
    }

    friend bool operator==(const Lambda2Source&, const Lambda2Source&) = default;
};

namespace detail {

inline double parse_double(std::string_view s, std::string_view what)
{
    // std::from_chars for double is available in libstdc++ 11.
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::config, std::string("cannot parse ") + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

inline std::size_t parse_count(std::string_view s, std::string_view what)
{
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(ErrorCode::config, std::string("cannot parse ") + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

} // namespace detail

/// "ls" or "asym:<eps>".
inline ThetaChoice parse_theta(std::string_view s)
{
    if (s == "ls") return {ThetaKind::least_squares, 0.0};
    if (s.starts_with("asym:")) {
        const double eps = detail::parse_double(s.substr(5), "theta eps");
        if (!(eps > 0.0)) throw Error(ErrorCode::config, "asym theta needs eps > 0");
        return {ThetaKind::asymptotic, eps};
    }
    throw Error(ErrorCode::config, "theta must be 'ls' or 'asym:<eps>'");
}

inline std::string to_string(const ThetaChoice& t)
{
    if (t.kind == ThetaKind::least_squares) return "ls";
    std::string out = "asym:";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, t.eps);
    out.append(buf, r.ptr);
    return out;
}

/// "oracle", "doi" (K = 2N, L = 10) or "doi:<K>,<L>".
inline Lambda2Source parse_lambda2(std::string_view s)
{
    if (s == "oracle") return {false, 0, 10, {}};
    if (s == "doi") return {true, 0, 10, {}};
    if (s.starts_with("doi:")) {
        const auto rest = s.substr(4);
        const auto comma = rest.find(',');
        if (comma == std::string_view::npos) throw Error(ErrorCode::config, "lambda2 must be 'doi:<K>,<L>'");
        Lambda2Source out{true, detail::parse_count(rest.substr(0, comma), "DOI K"),
                          detail::parse_count(rest.substr(comma + 1), "DOI L"), {}};
        if (out.iterations == 0 || out.period == 0 || out.iterations < out.period)
            throw Error(ErrorCode::config, "DOI needs K >= L >= 1");
        return out;
    }
    throw Error(ErrorCode::config, "lambda2 must be 'oracle', 'doi' or 'doi:<K>,<L>'");
}

inline std::string to_string(const Lambda2Source& l)
{
    if (!l.use_doi) return "oracle";
    if (l.iterations == 0 && l.period == 10) return "doi";
    return "doi:" + std::to_string(l.iterations) + "," + std::to_string(l.period);
}

inline Topology parse_topology(std::string_view s)
{
    if (s == "chain") return Topology::chain;
    if (s == "grid") return Topology::grid;
    if (s == "rgg") return Topology::rgg;
    throw Error(ErrorCode::config, "topology must be chain, grid or rgg");
}

inline InitModel parse_init(std::string_view s)
{
    if (s == "slope") return InitModel::slope;
    if (s == "spike") return InitModel::spike;
    throw Error(ErrorCode::config, "init must be slope or spike");
}

inline std::size_t exact_sqrt(std::size_t n)
{
    auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    return r * r == n ? r : 0;
}

struct ExperimentConfig {
    Topology topology = Topology::rgg;
    std::vector<std::size_t> sizes{200};
    std::size_t trials = 30;
    InitModel init = InitModel::slope;
    double epsilon_db = -100.0;
    ThetaChoice theta;
    Lambda2Source lambda2;
    Seed seed = 1;

    /// Relative l2 accuracy; -100 dB is 1e-5.
    [[nodiscard]] double epsilon() const { return std::pow(10.0, epsilon_db / 20.0); }

    /// Chain and grid with slope init are identical in every trial.
    [[nodiscard]] bool deterministic() const
    {
        return topology != Topology::rgg && init == InitModel::slope;
    }

    [[nodiscard]] std::size_t trials_run() const { return deterministic() ? 1 : trials; }

    void validate() const
    {
        if (topology == Topology::custom) throw Error(ErrorCode::config, "topology must be chain, grid or rgg");
        if (sizes.empty()) throw Error(ErrorCode::config, "at least one network size is required");
        if (!std::is_sorted(sizes.begin(), sizes.end()) ||
            std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end())
            throw Error(ErrorCode::config, "sizes must be strictly ascending");
        for (std::size_t n : sizes) {
            if (n < 2) throw Error(ErrorCode::config, "network size must be at least 2");
            if (topology == Topology::grid && (exact_sqrt(n) < 2))
                throw Error(ErrorCode::config, "grid size " + std::to_string(n) + " is not a square of a side >= 2");
        }
        if (trials < 1) throw Error(ErrorCode::config, "trials must be at least 1");
        if (!(epsilon_db < 0.0) || !std::isfinite(epsilon_db))
            throw Error(ErrorCode::config, "epsilon_db must be negative");
        if (theta.kind == ThetaKind::asymptotic && !(theta.eps > 0.0))
            throw Error(ErrorCode::config, "asym theta needs eps > 0");
        if (lambda2.use_doi && lambda2.period == 0) throw Error(ErrorCode::config, "DOI period must be >= 1");
    }
};

// ---------------------------------------------------------------- trials

/// Everything a trial needs, derived from (config seed, N, trial index).
struct TrialSetup {
    std::size_t n = 0;
    std::size_t trial = 0;
    Seed seed = 0;
    WeightMatrix w;
    /// MH weights failed lambda2 >= |lambda_N| and were replaced by (I + W) / 2.
    bool lazy = false;
    Spectrum spectrum;
    StateVector x0;
};

inline Seed trial_seed(Seed base, std::size_t n, std::size_t trial)
{
    return derive_seed(derive_seed(base, n), trial);
}

inline Graph make_topology(Topology t, std::size_t n, Seed seed)
{
    switch (t) {
    case Topology::chain: return make_chain(n);
    case Topology::grid: return make_grid(exact_sqrt(n));
    case Topology::rgg: return make_rgg(n, seed);
    case Topology::custom: break;
    }
    throw Error(ErrorCode::config, "custom topology cannot be generated");
}

inline TrialSetup make_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t trial)
{
    const Seed s = trial_seed(cfg.seed, n, trial);
    auto g = std::make_shared<const Graph>(make_topology(cfg.topology, n, derive_seed(s, 0)));
    WeightMatrix w = metropolis_hastings(g);
    Spectrum spectrum = symmetric_eigenvalues(w);
    bool lazy = false;
    if (std::abs(spectrum.smallest()) > spectrum.lambda2()) {
        w = lazy_transform(w);
        spectrum = symmetric_eigenvalues(w);
        lazy = true;
    }
    StateVector x0;
    if (cfg.init == InitModel::slope) {
        x0 = init_slope(*g);
    } else {
        Rng rng(derive_seed(s, 1));
        x0 = init_spike(*g, static_cast<NodeId>(rng.below(n)));
    }
    return TrialSetup{n, trial, s, std::move(w), lazy, std::move(spectrum), std::move(x0)};
}

/// Simulation length: twice the spectral prediction of the epsilon crossing
/// plus a margin for transients.
inline std::size_t simulation_horizon(double rho, double epsilon)
{
    if (!(rho > 0.0)) return 100;
    if (!(rho < 1.0)) throw Error(ErrorCode::instability, "spectral radius must be below 1");
    return 2 * static_cast<std::size_t>(std::ceil(std::log(epsilon) / std::log(rho))) + 100;
}

/// log rho(Phi3 - J) / log rho(W - J): ratio of asymptotic convergence times.
inline double asymptotic_gain(double rho_w, double rho_phi)
{
    if (rho_phi == 0.0) return std::numeric_limits<double>::infinity();
    return std::log(rho_phi) / std::log(rho_w);
}

/// log(1 - sqrt(x)) / log(1 - x).
inline double gain_envelope_f(double x) { return std::log1p(-std::sqrt(x)) / std::log1p(-x); }

/// DOI estimate; on precision loss the run is repeated with L = 1, as the
/// error suggests. Both runs are charged to the cost.
struct DriverEstimate {
    DoiResult result;
    bool retried = false;
};

inline DriverEstimate estimate_with_retry(const WeightMatrix& w, const DoiConfig& doi)
{
    try {
        return {estimate_lambda2(w, doi), false};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::precision_loss || doi.normalize_every == 1) throw;
    }
    // The failed run used K + 1 consensus rounds and at most ceil(K / L)
    // max-consensus runs before giving up; charge the full schedule.
    DoiResult again = estimate_lambda2(w, DoiConfig{doi.iterations, 1, doi.seed});
    const std::size_t hops = diameter(w.graph());
    const std::size_t runs = doi.iterations / doi.normalize_every + (doi.iterations % doi.normalize_every != 0);
    again.cost.consensus_rounds += doi.iterations + 1;
    again.cost.max_consensus_runs += runs;
    again.cost.max_consensus_rounds += runs * hops;
    return {again, true};
}

// ---------------------------------------------------------------- mse

inline constexpr const char* algo_memoryless = "memoryless";
inline constexpr const char* algo_accel_oracle = "accel-oracle";
inline constexpr const char* algo_accel_doi = "accel-doi";

struct AlgoRun {
    std::string algorithm;
    ExperimentTrace trace;
    double radius = 0.0;                                        ///< asymptotic rate of the iteration
    double alpha = std::numeric_limits<double>::quiet_NaN();   ///< NaN for memoryless
};

struct MseTrial {
    std::size_t n = 0;
    std::size_t trial = 0;
    Seed seed = 0;
    bool lazy = false;
    double lambda2 = 0.0;
    std::optional<double> lambda2_estimate;
    bool estimate_clamped = false;
    std::optional<DoiCost> doi_cost;
    bool doi_retried = false;   ///< precision loss forced a rerun with L = 1
    std::vector<AlgoRun> runs;
};

struct AlgoSummary {
    std::string algorithm;
    std::size_t completed = 0;
    std::vector<std::size_t> incomplete;   ///< trial ids without a crossing
    std::optional<double> mean_converged_at;
    std::optional<std::size_t> min_converged_at;
    std::optional<std::size_t> max_converged_at;
    /// 10 log10 of the trial-averaged MSE, over the horizon every trial covers.
    std::vector<double> mean_mse_db;
};

struct MseSizeSummary {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::vector<AlgoSummary> algorithms;
    /// Share of trials where the accelerated run crosses strictly before the
    /// memoryless run on the same x(0).
    double oracle_win_fraction = 0.0;
    std::optional<double> doi_win_fraction;
    /// Max |dB| gap between the averaged accel-doi and accel-oracle curves up
    /// to the oracle curve's epsilon crossing.
    std::optional<double> doi_oracle_gap_db;
    std::optional<std::size_t> gap_window;
};

struct MseResult {
    std::vector<MseTrial> trials;
    std::vector<MseSizeSummary> sizes;
};

namespace detail {

inline bool strictly_faster(const ExperimentTrace& fast, const ExperimentTrace& slow)
{
    if (!fast.converged_at) return false;
    if (!slow.converged_at) return true;
    return *fast.converged_at < *slow.converged_at;
}

inline AlgoSummary summarize(const std::string& algorithm, const std::vector<const MseTrial*>& trials,
                             std::size_t index)
{
    AlgoSummary s;
    s.algorithm = algorithm;
    double total = 0.0;
    std::size_t horizon = std::numeric_limits<std::size_t>::max();
    for (const MseTrial* t : trials) {
        const auto& tr = t->runs[index].trace;
        horizon = std::min(horizon, tr.mse_linear.size());
        if (tr.converged_at) {
            ++s.completed;
            total += static_cast<double>(*tr.converged_at);
            s.min_converged_at = std::min(s.min_converged_at.value_or(*tr.converged_at), *tr.converged_at);
            s.max_converged_at = std::max(s.max_converged_at.value_or(*tr.converged_at), *tr.converged_at);
        } else {
            s.incomplete.push_back(t->trial);
        }
    }
    if (s.completed > 0) s.mean_converged_at = total / static_cast<double>(s.completed);
    s.mean_mse_db.resize(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
        double acc = 0.0;
        for (const MseTrial* t : trials) acc += t->runs[index].trace.mse_linear[k];
        s.mean_mse_db[k] = to_db(acc / static_cast<double>(trials.size()));
    }
    return s;
}

} // namespace detail

/// One trial: memoryless, accelerated with exact lambda2 and, when the
/// config asks for it, accelerated with the decentralized estimate. All
/// three start from the same x(0).
inline MseTrial run_mse_trial(const ExperimentConfig& cfg, std::size_t n, std::size_t trial)
{
    TrialSetup setup = make_trial(cfg, n, trial);
    const double eps = cfg.epsilon();
    const PredictorParams theta = cfg.theta.params();
    MseTrial out;
    out.n = n;
    out.trial = trial;
    out.seed = setup.seed;
    out.lazy = setup.lazy;
    out.lambda2 = setup.spectrum.lambda2();

    const double rho_w = rho_deviation(setup.spectrum);
    {
        AlgoRun run{algo_memoryless, {}, rho_w};
        run.trace = run_to_accuracy(setup.w, setup.x0, eps, simulation_horizon(rho_w, eps), cfg.init);
        out.runs.push_back(std::move(run));
    }
    const auto oracle = AcceleratedOperator::with_optimal_alpha(setup.w, theta);
    const std::size_t accel_horizon = simulation_horizon(oracle.deviation_radius(), eps);
    {
        AlgoRun run{algo_accel_oracle, {}, oracle.deviation_radius(), oracle.alpha()};
        run.trace = run_to_accuracy(oracle, setup.x0, eps, accel_horizon, cfg.init);
        out.runs.push_back(std::move(run));
    }
    if (cfg.lambda2.use_doi) {
        const DoiConfig doi = cfg.lambda2.config_for(n, setup.seed);
        const DriverEstimate est = estimate_with_retry(setup.w, doi);
        const double used = std::clamp(est.result.estimate, 0.0, lambda2_ceiling);
        const auto op = AcceleratedOperator::with_lambda2(setup.w, theta, used);
        out.lambda2_estimate = est.result.estimate;
        out.estimate_clamped = used != est.result.estimate;
        out.doi_cost = est.result.cost;
        out.doi_retried = est.retried;
        // At least the oracle horizon so the averaged curves line up.
        const std::size_t horizon = std::max(accel_horizon, simulation_horizon(op.deviation_radius(), eps));
        AlgoRun run{algo_accel_doi, {}, op.deviation_radius(), op.alpha()};
        run.trace = run_to_accuracy(op, setup.x0, eps, horizon, cfg.init);
        out.runs.push_back(std::move(run));
    }
    return out;
}

inline MseResult run_mse_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    MseResult result;
    for (std::size_t n : cfg.sizes) {
        const std::size_t first = result.trials.size();
        for (std::size_t t = 0; t < cfg.trials_run(); ++t) result.trials.push_back(run_mse_trial(cfg, n, t));

        std::vector<const MseTrial*> trials;
        for (std::size_t k = first; k < result.trials.size(); ++k) trials.push_back(&result.trials[k]);
        MseSizeSummary summary;
        summary.n = n;
        summary.trials = trials.size();
        const std::size_t algos = trials.front()->runs.size();
        for (std::size_t a = 0; a < algos; ++a)
            summary.algorithms.push_back(detail::summarize(trials.front()->runs[a].algorithm, trials, a));

        std::size_t oracle_wins = 0;
        std::size_t doi_wins = 0;
        for (const MseTrial* t : trials) {
            oracle_wins += detail::strictly_faster(t->runs[1].trace, t->runs[0].trace);
            if (algos > 2) doi_wins += detail::strictly_faster(t->runs[2].trace, t->runs[0].trace);
        }
        const auto count = static_cast<double>(trials.size());
        summary.oracle_win_fraction = static_cast<double>(oracle_wins) / count;
        if (algos > 2) {
            summary.doi_win_fraction = static_cast<double>(doi_wins) / count;
            const auto& oracle_db = summary.algorithms[1].mean_mse_db;
            const auto& doi_db = summary.algorithms[2].mean_mse_db;
            std::vector<double> oracle_linear(oracle_db.size());
            std::transform(oracle_db.begin(), oracle_db.end(), oracle_linear.begin(),
                           [](double db) { return std::pow(10.0, db / 10.0); });
            const std::size_t common = std::min(oracle_db.size(), doi_db.size());
            const std::size_t window = std::min(
                common - 1, detail::first_sustained_crossing(oracle_linear, cfg.epsilon()).value_or(common - 1));
            double gap = 0.0;
            for (std::size_t k = 0; k <= window; ++k) gap = std::max(gap, std::abs(oracle_db[k] - doi_db[k]));
            summary.doi_oracle_gap_db = gap;
            summary.gap_window = window;
        }
        result.sizes.push_back(std::move(summary));
    }
    return result;
}

inline std::string trace_file_name(const ExperimentConfig& cfg, const MseTrial& t, const std::string& algorithm)
{
    return to_string(cfg.topology) + "_" + std::to_string(t.n) + "_" + algorithm + "_" + to_string(cfg.init) + "_" +
        std::to_string(t.seed) + ".csv";
}

/// One CSV per (trial, algorithm) plus one per (size, algorithm) with the
/// trial-averaged curve.
inline std::vector<std::filesystem::path> write_mse_traces(const ExperimentConfig& cfg, const MseResult& r,
                                                           const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto open = [&](const std::string& name) {
        written.push_back(dir / name);
        std::ofstream os(written.back());
        if (!os) throw Error(ErrorCode::config, "cannot write " + written.back().string());
        return os;
    };
    for (const auto& t : r.trials) {
        for (const auto& run : t.runs) {
            auto os = open(trace_file_name(cfg, t, run.algorithm));
            write_trace_csv(os, run.trace);
        }
    }
    for (const auto& s : r.sizes) {
        for (const auto& a : s.algorithms) {
            auto os = open(to_string(cfg.topology) + "_" + std::to_string(s.n) + "_" + a.algorithm + "_" +
                           to_string(cfg.init) + "_mean.csv");
            os.precision(17);
            os << "iter,mse_db\n";
            for (std::size_t k = 0; k < a.mean_mse_db.size(); ++k) os << k << ',' << a.mean_mse_db[k] << '\n';
        }
    }
    return written;
}

// ---------------------------------------------------------------- gain

struct GainRecord {
    std::size_t n = 0;
    std::size_t trials = 0;
    double rho_w = 0.0;                 ///< mean rho(W - J)
    double rho_phi = 0.0;               ///< mean rho(Phi3[alpha*] - J)
    double psi = 0.0;                   ///< 1 - mean rho(W - J)
    double gain = 0.0;                  ///< mean tau_asym(W) / tau_asym(Phi3[alpha*])
    std::optional<double> empirical_ratio;   ///< mean T_c(W) / T_c(Phi3), completed trials only
    std::vector<std::size_t> incomplete;     ///< trials where either run missed epsilon
    double min_bound_slack = 0.0;       ///< min over trials of 1 - sqrt(psi) - rho(Phi3 - J)
    std::size_t lazy_trials = 0;
};

struct GainReport {
    std::vector<GainRecord> records;
};

inline GainReport run_gain_sweep(const ExperimentConfig& cfg, bool simulate = true)
{
    cfg.validate();
    const PredictorParams theta = cfg.theta.params();
    const double eps = cfg.epsilon();
    GainReport report;
    for (std::size_t n : cfg.sizes) {
        GainRecord rec;
        rec.n = n;
        rec.trials = cfg.trials_run();
        rec.min_bound_slack = std::numeric_limits<double>::infinity();
        double ratio_total = 0.0;
        std::size_t ratio_count = 0;
        for (std::size_t t = 0; t < rec.trials; ++t) {
            const TrialSetup setup = make_trial(cfg, n, t);
            const double rho_w = rho_deviation(setup.spectrum);
            const auto op = AcceleratedOperator::with_optimal_alpha(setup.w, theta);
            const double rho_phi = op.deviation_radius();
            rec.rho_w += rho_w;
            rec.rho_phi += rho_phi;
            rec.gain += asymptotic_gain(rho_w, rho_phi);
            rec.min_bound_slack = std::min(rec.min_bound_slack, 1.0 - std::sqrt(1.0 - rho_w) - rho_phi);
            rec.lazy_trials += setup.lazy;
            if (!simulate) continue;
            const auto slow = run_to_accuracy(setup.w, setup.x0, eps, simulation_horizon(rho_w, eps), cfg.init);
            const auto fast = run_to_accuracy(op, setup.x0, eps, simulation_horizon(rho_phi, eps), cfg.init);
            if (slow.converged_at && fast.converged_at && *fast.converged_at > 0) {
                ratio_total += static_cast<double>(*slow.converged_at) / static_cast<double>(*fast.converged_at);
                ++ratio_count;
            } else {
                rec.incomplete.push_back(t);
            }
        }
        const auto count = static_cast<double>(rec.trials);
        rec.rho_w /= count;
        rec.rho_phi /= count;
        rec.gain /= count;
        rec.psi = 1.0 - rec.rho_w;
        if (ratio_count > 0) rec.empirical_ratio = ratio_total / static_cast<double>(ratio_count);
        report.records.push_back(std::move(rec));
    }
    return report;
}

// ---------------------------------------------------------------- verify

struct VerifyRecord {
    std::size_t n = 0;
    double psi = 0.0;
    double rate = 0.0;              ///< 1 - rho(Phi3[alpha*] - J)
    double predicted_rate = 0.0;    ///< gamma sqrt(psi)
    double rate_deviation = 0.0;    ///< |rate - predicted| / predicted
    double gain = 0.0;
    double inv_sqrt_psi = 0.0;
    double f_psi = 0.0;             ///< log(1 - sqrt psi) / log(1 - psi)
    bool f_in_envelope = false;     ///< 1/sqrt(psi) <= f <= 1/sqrt(psi) + 1/2
    bool gain_at_least_f = false;   ///< gain >= f(psi), which implies gain >= 1/sqrt(psi)
    double gain_over_inv_sqrt_psi = 0.0;
    double bound_slack = 0.0;
};

struct VerifyReport {
    ThetaChoice theta;
    double gamma = 0.0;
    std::vector<VerifyRecord> records;
    bool rate_deviation_shrinks = false;
    std::optional<double> closed_form_max_error;   ///< chain only: max_i |lambda_i - closed form|
    [[nodiscard]] bool envelopes_hold() const
    {
        return std::all_of(records.begin(), records.end(),
                           [](const VerifyRecord& r) { return r.f_in_envelope && r.gain_at_least_f && r.bound_slack >= 0.0; });
    }
};

/// Closed-form MH chain spectrum 1/3 + 2/3 cos(pi (i - 1) / N), descending.
inline std::vector<double> chain_mh_spectrum(std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = 1.0 / 3.0 + 2.0 / 3.0 * std::cos(std::acos(-1.0) * static_cast<double>(i) / static_cast<double>(n));
    return out;
}

inline VerifyReport verify_theory(const ExperimentConfig& cfg)
{
    cfg.validate();
    VerifyReport report;
    report.theta = cfg.theta;
    const PredictorParams theta = cfg.theta.params();
    report.gamma = gamma_coefficient(theta);
    const GainReport gains = run_gain_sweep(cfg, false);
    for (const auto& g : gains.records) {
        VerifyRecord r;
        r.n = g.n;
        r.psi = g.psi;
        r.rate = 1.0 - g.rho_phi;
        r.predicted_rate = report.gamma * std::sqrt(g.psi);
        r.rate_deviation = std::abs(r.rate - r.predicted_rate) / r.predicted_rate;
        r.gain = g.gain;
        r.inv_sqrt_psi = 1.0 / std::sqrt(g.psi);
        r.f_psi = gain_envelope_f(g.psi);
        r.f_in_envelope = r.inv_sqrt_psi <= r.f_psi && r.f_psi <= r.inv_sqrt_psi + 0.5;
        r.gain_at_least_f = g.gain >= r.f_psi;
        r.gain_over_inv_sqrt_psi = g.gain / r.inv_sqrt_psi;
        r.bound_slack = g.min_bound_slack;
        report.records.push_back(r);
    }
    report.rate_deviation_shrinks = true;
    for (std::size_t k = 1; k < report.records.size(); ++k)
        if (report.records[k].rate_deviation > report.records[k - 1].rate_deviation)
            report.rate_deviation_shrinks = false;
    if (cfg.topology == Topology::chain) {
        double worst = 0.0;
        for (std::size_t n : cfg.sizes) {
            const auto exact = symmetric_eigenvalues(metropolis_hastings(make_chain(n))).values;
            const auto closed = chain_mh_spectrum(n);
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(exact[i] - closed[i]));
        }
        report.closed_form_max_error = worst;
    }
    return report;
}

// ---------------------------------------------------------------- doi

struct DoiTrial {
    std::size_t n = 0;
    std::size_t trial = 0;
    Seed seed = 0;
    double lambda2 = 0.0;
    double estimate = 0.0;
    double relative_error = 0.0;   ///< absolute when lambda2 = 0
    DoiCost cost;
    bool retried = false;
};

struct DoiReport {
    Lambda2Source source;
    std::vector<DoiTrial> trials;
    [[nodiscard]] double max_relative_error() const
    {
        double m = 0.0;
        for (const auto& t : trials) m = std::max(m, t.relative_error);
        return m;
    }
};

/// Estimator accuracy against the exact spectrum. An "oracle" lambda2 source
/// still runs DOI with its K and L (K = 2N, L = 10 unless overridden).
inline DoiReport run_doi_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    DoiReport report;
    report.source = cfg.lambda2;
    report.source.use_doi = true;
    for (std::size_t n : cfg.sizes) {
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            const TrialSetup setup = make_trial(cfg, n, t);
            const DoiConfig doi = report.source.config_for(n, setup.seed);
            const DriverEstimate est = estimate_with_retry(setup.w, doi);
            const double exact = setup.spectrum.lambda2();
            const double err = std::abs(est.result.estimate - exact);
            report.trials.push_back(DoiTrial{n, t, setup.seed, exact, est.result.estimate,
                                             exact > 0.0 ? err / exact : err, est.result.cost, est.retried});
        }
    }
    return report;
}

} // namespace predcons

#endif
