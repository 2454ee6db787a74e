// JSON views of the experiment reports. Kept out of the library so that
// only the command-line tool depends on nlohmann/json.
#ifndef PREDCONS_TOOLS_REPORT_JSON_HPP
#define PREDCONS_TOOLS_REPORT_JSON_HPP

#include "predcons/experiment.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>

namespace predcons::report {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

template <class T>
Json optional_value(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json config_json(const ExperimentConfig& cfg)
{
    Json j;
    j["topology"] = to_string(cfg.topology);
    j["sizes"] = cfg.sizes;
    j["trials"] = cfg.trials;
    j["trials_run"] = cfg.trials_run();
    j["init"] = to_string(cfg.init);
    j["epsilon_db"] = cfg.epsilon_db;
    j["theta"] = to_string(cfg.theta);
    const PredictorParams p = cfg.theta.params();
    j["theta_values"] = {p.theta1(), p.theta2(), p.theta3()};
    j["lambda2"] = to_string(cfg.lambda2);
    j["doi_seed"] = optional_value(cfg.lambda2.seed);
    j["seed"] = cfg.seed;
    return j;
}

inline Json cost_json(const DoiCost& c)
{
    return Json{{"consensus_rounds", c.consensus_rounds},
                {"max_consensus_runs", c.max_consensus_runs},
                {"max_consensus_rounds", c.max_consensus_rounds},
                {"total_rounds", c.total_rounds()}};
}

inline Json envelope(const char* verb, const ExperimentConfig& cfg)
{
    return Json{{"schema", schema_version}, {"verb", verb}, {"config", config_json(cfg)}};
}

inline Json mse_json(const ExperimentConfig& cfg, const MseResult& r)
{
    Json j = envelope("mse", cfg);
    Json sizes = Json::array();
    for (const auto& s : r.sizes) {
        Json algos = Json::array();
        for (const auto& a : s.algorithms) {
            algos.push_back({{"algorithm", a.algorithm},
                             {"completed", a.completed},
                             {"incomplete", a.incomplete},
                             {"mean_converged_at", optional_value(a.mean_converged_at)},
                             {"min_converged_at", optional_value(a.min_converged_at)},
                             {"max_converged_at", optional_value(a.max_converged_at)}});
        }
        sizes.push_back({{"n", s.n},
                         {"trials", s.trials},
                         {"algorithms", algos},
                         {"oracle_win_fraction", s.oracle_win_fraction},
                         {"doi_win_fraction", optional_value(s.doi_win_fraction)},
                         {"doi_oracle_gap_db", optional_value(s.doi_oracle_gap_db)},
                         {"gap_window", optional_value(s.gap_window)}});
    }
    j["sizes"] = sizes;
    Json trials = Json::array();
    for (const auto& t : r.trials) {
        Json runs = Json::array();
        for (const auto& run : t.runs) {
            runs.push_back({{"algorithm", run.algorithm},
                            {"radius", run.radius},
                            {"alpha", finite_or_null(run.alpha)},
                            {"iterations_run", run.trace.iterations_run},
                            {"converged_at", optional_value(run.trace.converged_at)}});
        }
        trials.push_back({{"n", t.n},
                          {"trial", t.trial},
                          {"seed", t.seed},
                          {"lazy", t.lazy},
                          {"lambda2", t.lambda2},
                          {"lambda2_estimate", optional_value(t.lambda2_estimate)},
                          {"estimate_clamped", t.estimate_clamped},
                          {"doi_cost", t.doi_cost ? cost_json(*t.doi_cost) : Json(nullptr)},
                          {"doi_retried", t.doi_retried},
                          {"runs", runs}});
    }
    j["trials"] = trials;
    return j;
}

inline Json gain_json(const ExperimentConfig& cfg, const GainReport& r)
{
    Json j = envelope("gain", cfg);
    Json records = Json::array();
    for (const auto& g : r.records) {
        records.push_back({{"n", g.n},
                           {"trials", g.trials},
                           {"rho_w", g.rho_w},
                           {"rho_phi", g.rho_phi},
                           {"psi", g.psi},
                           {"gain", g.gain},
                           {"empirical_ratio", optional_value(g.empirical_ratio)},
                           {"incomplete", g.incomplete},
                           {"bound_slack", g.min_bound_slack},
                           {"lazy_trials", g.lazy_trials}});
    }
    j["records"] = records;
    return j;
}

inline Json verify_json(const ExperimentConfig& cfg, const VerifyReport& r)
{
    Json j = envelope("verify", cfg);
    j["gamma"] = r.gamma;
    Json records = Json::array();
    for (const auto& v : r.records) {
        records.push_back({{"n", v.n},
                           {"psi", v.psi},
                           {"rate", v.rate},
                           {"predicted_rate", v.predicted_rate},
                           {"rate_deviation", v.rate_deviation},
                           {"gain", v.gain},
                           {"inv_sqrt_psi", v.inv_sqrt_psi},
                           {"f_psi", v.f_psi},
                           {"f_in_envelope", v.f_in_envelope},
                           {"gain_at_least_f", v.gain_at_least_f},
                           {"gain_over_inv_sqrt_psi", v.gain_over_inv_sqrt_psi},
                           {"bound_slack", v.bound_slack}});
    }
    j["records"] = records;
    j["rate_deviation_shrinks"] = r.rate_deviation_shrinks;
    j["envelopes_hold"] = r.envelopes_hold();
    j["closed_form_max_error"] = optional_value(r.closed_form_max_error);
    return j;
}

inline Json doi_json(const ExperimentConfig& cfg, const DoiReport& r)
{
    Json j = envelope("doi", cfg);
    j["source"] = to_string(r.source);
    Json trials = Json::array();
    for (const auto& t : r.trials) {
        trials.push_back({{"n", t.n},
                          {"trial", t.trial},
                          {"seed", t.seed},
                          {"lambda2", t.lambda2},
                          {"estimate", t.estimate},
                          {"relative_error", t.relative_error},
                          {"cost", cost_json(t.cost)},
                          {"retried", t.retried}});
    }
    j["trials"] = trials;
    j["max_relative_error"] = r.max_relative_error();
    return j;
}

} // namespace predcons::report

#endif
