#ifndef PREDCONS_DOI_HPP
#define PREDCONS_DOI_HPP

// Decentralized estimation of lambda2(W): power iteration from a zero-mean
// start, with sup-norm normalisation every L rounds computed by
// max-consensus so that every node divides by the same value.

#include "predcons/accel.hpp"
#include "predcons/engine.hpp"
#include "predcons/error.hpp"
#include "predcons/graph.hpp"
#include "predcons/rng.hpp"
#include "predcons/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>

namespace predcons {

struct DoiConfig {
    std::size_t iterations = 0;        ///< K
    std::size_t normalize_every = 1;   ///< L
    Seed seed = 0;

    void validate() const
    {
        if (normalize_every < 1 || iterations < normalize_every)
            throw Error(ErrorCode::invalid_parameter, "DOI needs K >= L >= 1");
    }
};

/// L = max(1, diameter).
inline DoiConfig default_doi_config(const Graph& g, std::size_t iterations, Seed seed)
{
    return DoiConfig{iterations, std::max<std::size_t>(1, diameter(g)), seed};
}

struct DoiCost {
    std::size_t consensus_rounds = 0;       ///< applications of W
    std::size_t max_consensus_runs = 0;
    std::size_t max_consensus_rounds = 0;   ///< runs x diameter

    [[nodiscard]] std::size_t total_rounds() const noexcept { return consensus_rounds + max_consensus_rounds; }
};

struct DoiResult {
    double estimate = 0.0;
    DoiCost cost;
};

/// Called with (k, v_k) for k = 0..K after each W application and any
/// normalisation at that step.
using DoiObserver = std::function<void(std::size_t, std::span<const double>)>;

inline constexpr double doi_underflow_guard = 1e-300;

namespace detail {

// Network-wide sup-norm via max-consensus on |v|; returns node 0's copy,
// which equals every other node's after diameter rounds.
inline double network_sup_norm(const Graph& g, std::span<const double> v, std::size_t rounds, DoiCost& cost)
{
    StateVector magnitude(v.size());
    std::transform(v.begin(), v.end(), magnitude.begin(), [](double x) { return std::abs(x); });
    const StateVector agreed = max_consensus_rounds(g, magnitude, rounds);
    ++cost.max_consensus_runs;
    cost.max_consensus_rounds += rounds;
    return agreed.front();
}

} // namespace detail

inline DoiResult estimate_lambda2(const WeightMatrix& w, const DoiConfig& cfg, const DoiObserver& observer = {})
{
    cfg.validate();
    const Graph& g = w.graph();
    const std::size_t hops = diameter(g);
    const std::size_t n = g.size();
    DoiResult out;

    Rng rng(cfg.seed);
    StateVector v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    StateVector wv = step_memoryless(w, v);
    for (std::size_t i = 0; i < n; ++i) v[i] = wv[i] - v[i];
    ++out.cost.consensus_rounds;
    if (observer) observer(0, v);

    // Decay over one normalisation window below this means the iterate is
    // rounding noise. |v_0| <= ||W - I||_inf ||v||_inf <= 2 bounds the first window.
    constexpr double noise_floor = 1e3 * std::numeric_limits<double>::epsilon();
    double window_scale = 2.0;

    for (std::size_t k = 1; k <= cfg.iterations; ++k) {
        v = step_memoryless(w, v);
        ++out.cost.consensus_rounds;
        if (k % cfg.normalize_every == 0 || k == cfg.iterations) {
            const double sup = detail::network_sup_norm(g, v, hops, out.cost);
            if (sup < doi_underflow_guard || sup < noise_floor * window_scale) {
                // A single application annihilated the iterate: lambda2 is zero
                // to working precision. Over longer windows the information is
                // simply lost.
                if (cfg.normalize_every == 1) {
                    out.estimate = 0.0;
                    return out;
                }
                throw Error(ErrorCode::precision_loss,
                            "iterate decayed to rounding level between normalisations; use a smaller L");
            }
            for (double& x : v) x /= sup;
            window_scale = 1.0;
        }
        if (observer) observer(k, v);
    }

    wv = step_memoryless(w, v);
    ++out.cost.consensus_rounds;
    const double numerator = detail::network_sup_norm(g, wv, hops, out.cost);
    // ||v_K||_inf is 1 after the final normalisation.
    out.estimate = numerator;
    return out;
}

struct EndToEndResult {
    AcceleratedOperator op;
    double lambda2_estimate = 0.0;   ///< raw estimator output
    bool clamped = false;            ///< estimate was moved into [0, 1 - 1e-9]
    DoiCost cost;
};

/// Builds Phi3[alpha*(lambda2_hat)] from the decentralized estimate.
inline EndToEndResult end_to_end_alpha(const WeightMatrix& w, const PredictorParams& theta, const DoiConfig& cfg)
{
    const DoiResult est = estimate_lambda2(w, cfg);
    const double used = std::clamp(est.estimate, 0.0, lambda2_ceiling);
    return EndToEndResult{AcceleratedOperator::with_lambda2(w, theta, used), est.estimate,
                          used != est.estimate, est.cost};
}

} // namespace predcons

#endif
