// Accelerated vs plain consensus on a 100-node random geometric graph.
#include "predcons/accel.hpp"
#include "predcons/doi.hpp"
#include "predcons/engine.hpp"
#include "predcons/graph.hpp"
#include "predcons/weights.hpp"

#include <iostream>

int main()
{
    using namespace predcons;

    const Graph g = make_rgg(100, 7);
    const WeightMatrix w = metropolis_hastings(g);
    const auto x0 = init_slope(g);
    const double eps = 1e-5;   // -100 dB

    const auto theta = asymptotic_theta(0.5);
    const auto oracle = AcceleratedOperator::with_optimal_alpha(w, theta);

    // Same thing without knowing the spectrum: estimate lambda2 in-network.
    const EndToEndResult est = end_to_end_alpha(w, theta, default_doi_config(g, 200, 11));

    const auto plain = run_to_accuracy(w, x0, eps, 20000);
    const auto fast = run_to_accuracy(oracle, x0, eps, 5000);
    const auto fast_blind = run_to_accuracy(est.op, x0, eps, 5000);

    std::cout << "lambda2          " << oracle.w_spectrum().lambda2() << "\n"
              << "lambda2 (DOI)    " << est.lambda2_estimate << "\n"
              << "alpha*           " << oracle.alpha() << "\n"
              << "plain iters      " << plain.converged_at.value_or(0) << "\n"
              << "accel iters      " << fast.converged_at.value_or(0) << "\n"
              << "accel+DOI iters  " << fast_blind.converged_at.value_or(0) << "\n";
}
