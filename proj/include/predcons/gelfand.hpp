#ifndef PREDCONS_GELFAND_HPP
#define PREDCONS_GELFAND_HPP

// Numerical rho(Phi3[alpha] - J) from ||Phi^t X||^(1/t) on a start vector
// with the consensus mode removed.

#include "predcons/accel.hpp"
#include "predcons/error.hpp"
#include "predcons/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

namespace predcons {

inline constexpr std::size_t gelfand_renormalize_every = 10;
inline constexpr double gelfand_overflow_guard = 1e12;

/// Estimate of rho(Phi3[alpha] - J) from `iters` applications of Phi3.
/// The rate is measured over the second half of the run, which discards the
/// start-up transient.
inline double gelfand_radius_estimate(const AcceleratedOperator& op, std::size_t iters, Seed seed)
{
    if (iters < 50) throw Error(ErrorCode::invalid_parameter, "gelfand estimate needs iters >= 50");
    const auto n = static_cast<Eigen::Index>(op.size());
    const Eigen::MatrixXd w3 = op.weight_coefficient() * op.weight().dense()
        + op.current_coefficient() * Eigen::MatrixXd::Identity(n, n);
    const double c = op.previous_coefficient();
    auto apply = [&](Eigen::VectorXd& top, Eigen::VectorXd& bottom) {
        Eigen::VectorXd next = w3 * top + c * bottom;
        bottom = std::move(top);
        top = std::move(next);
    };
    auto sup = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    };

    Rng rng(seed);
    Eigen::VectorXd top(n);
    Eigen::VectorXd bottom(n);
    for (Eigen::Index i = 0; i < n; ++i) top(i) = rng.uniform(-1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) bottom(i) = rng.uniform(-1.0, 1.0);
    // (Phi - I) X annihilates the unit eigenvalue.
    {
        Eigen::VectorXd t0 = top;
        Eigen::VectorXd b0 = bottom;
        apply(top, bottom);
        top -= t0;
        bottom -= b0;
    }
    // Rounding keeps feeding the unit mode, which then outgrows every decaying
    // mode. Project it out along the left eigenvector (1, alpha theta1).
    const double left_norm = static_cast<double>(n) * (1.0 + c);
    auto deflate = [&] {
        const double k = (top.sum() + c * bottom.sum()) / left_norm;
        top.array() -= k;
        bottom.array() -= k;
    };
    if (left_norm != 0.0) deflate();
    double s0 = sup(top, bottom);
    if (!(s0 > 0.0)) return 0.0;
    top /= s0;
    bottom /= s0;

    double log_norm = 0.0;   // log of the true norm of Phi^t X0 relative to X0
    double log_at_mid = 0.0;
    const std::size_t mid = iters / 2;
    for (std::size_t t = 1; t <= iters; ++t) {
        apply(top, bottom);
        if (t % gelfand_renormalize_every == 0 || t == mid || t == iters) {
            if (left_norm != 0.0) deflate();
            const double s = sup(top, bottom);
            if (!(s > 0.0)) return 0.0;
            log_norm += std::log(s);
            if (!std::isfinite(s) || log_norm > std::log(gelfand_overflow_guard))
                throw Error(ErrorCode::instability,
                            "iteration diverges; alpha is outside [0, -1/theta1)");
            top /= s;
            bottom /= s;
        }
        if (t == mid) log_at_mid = log_norm;
    }
    const double estimate = std::exp((log_norm - log_at_mid) / static_cast<double>(iters - mid));
    if (estimate >= 1.0)
        throw Error(ErrorCode::instability, "estimated radius >= 1; alpha is outside [0, -1/theta1)");
    return estimate;
}

} // namespace predcons

#endif
