#ifndef PREDCONS_ACCEL_HPP
#define PREDCONS_ACCEL_HPP

// Optimal mixing parameter, per-eigenvalue cost functions and the
// accelerated operator Phi3[alpha].

#include "predcons/error.hpp"
#include "predcons/predictor.hpp"
#include "predcons/spectral.hpp"
#include "predcons/weights.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string>

namespace predcons {

/// lambda2 inputs closer to 1 than this are rejected (alpha* is
/// ill-conditioned at the boundary).
inline constexpr double lambda2_ceiling = 1.0 - 1e-9;

inline void require_lambda2(double lambda2)
{
    if (!(lambda2 >= 0.0) || !(lambda2 <= lambda2_ceiling))
        throw Error(ErrorCode::out_of_domain,
                    "lambda2 must lie in [0, 1 - 1e-9] (apply lazy_transform for negative values)");
}

/// Boundaries [alpha*_i, alpha**_i] of the alpha interval on which the root
/// pair for eigenvalue lambda_i is complex.
struct AlphaBounds {
    double alpha_star = 0.0;
    double alpha_dstar = 0.0;   ///< +inf when theta2 + (theta3 - 1) lambda_i = 0
};

// The boundaries solve (lambda + s alpha)^2 + 4 theta1 alpha = 0 with
// s = theta2 + (theta3 - 1) lambda. With a = s^2, b = 2 lambda s + 4 theta1,
// c = lambda^2, -b >= -2 theta1 > 0 on [-1, 1], so the larger root has no
// cancellation and the smaller one follows from Vieta.
inline AlphaBounds alpha_region_bounds(double lambda_i, const PredictorParams& theta)
{
    if (!(lambda_i > -1.0) || !(lambda_i < 1.0))
        throw Error(ErrorCode::out_of_domain, "lambda_i must lie in (-1, 1)");
    const double t1 = theta.theta1();
    if (t1 == 0.0)
        throw Error(ErrorCode::degenerate_parameters, "theta = (0, 0, 1) has no complex region");
    const double s = theta.theta2() + (theta.theta3() - 1.0) * lambda_i;
    const double b = 2.0 * lambda_i * s + 4.0 * t1;
    const double disc = std::max(0.0, 16.0 * t1 * (t1 + lambda_i * s));
    const double q = -b + std::sqrt(disc);
    AlphaBounds out;
    out.alpha_star = 2.0 * lambda_i * lambda_i / q;
    out.alpha_dstar = s == 0.0 ? std::numeric_limits<double>::infinity() : q / (2.0 * s * s);
    return out;
}

/// alpha* = argmin_alpha rho(Phi3[alpha] - J); depends on W only through lambda2.
///
/// At alpha* the lambda2 root pair is a double root, and rounding alpha* down
/// by one ulp splits it into two real roots about sqrt(eps) apart, which costs
/// ~1e-8 of radius. The result is therefore moved up by a few ulps until the
/// pair is safely complex, which costs at most ~1e-9 and
/// usually ~1e-15.
inline double optimal_alpha(double lambda2, const PredictorParams& theta)
{
    require_lambda2(lambda2);
    const double alpha = alpha_region_bounds(lambda2, theta).alpha_star;
    if (alpha == 0.0) return alpha;
    const double t1 = theta.theta1();
    auto disc = [&](double a) {
        const double l3 = w3_eigenvalue(lambda2, theta, a);
        return l3 * l3 + 4.0 * a * t1;
    };
    const double margin = 256.0 * std::numeric_limits<double>::epsilon() * std::abs(4.0 * alpha * t1);
    double step = std::numeric_limits<double>::epsilon() * alpha;
    for (double a = alpha; a < theta.alpha_limit(); a = alpha + step, step *= 2.0) {
        if (disc(a) <= -margin) return a;
        if (step > 1e-8 * alpha) break;
    }
    return alpha;
}

/// Largest root modulus for eigenvalue lambda_i as a function of alpha:
/// sqrt(-alpha theta1) inside the complex region, otherwise
/// (|l3| + sqrt(l3^2 + 4 alpha theta1)) / 2.
inline double cost_J(double alpha, double lambda_i, const PredictorParams& theta)
{
    if (!(alpha >= 0.0) || !(alpha <= theta.alpha_limit()))
        throw Error(ErrorCode::out_of_range, "alpha outside [0, -1/theta1]");
    const double t1 = theta.theta1();
    const auto bounds = alpha_region_bounds(lambda_i, theta);
    if (alpha >= bounds.alpha_star) return std::sqrt(-alpha * t1);
    const double l3 = w3_eigenvalue(lambda_i, theta, alpha);
    return 0.5 * (std::abs(l3) + std::sqrt(std::max(0.0, l3 * l3 + 4.0 * alpha * t1)));
}

/// rho(Phi3[alpha*] - J) = sqrt(-alpha* theta1).
inline double predicted_radius(double lambda2, const PredictorParams& theta)
{
    return std::sqrt(-optimal_alpha(lambda2, theta) * theta.theta1());
}

/// Foundational matrix W, predictor theta and mixing parameter alpha; the
/// network update is X(t+1) = Phi3[alpha] X(t).
class AcceleratedOperator {
public:
    /// alpha = alpha*(lambda2(W)) with lambda2 from the exact spectrum.
    static AcceleratedOperator with_optimal_alpha(WeightMatrix w, PredictorParams theta)
    {
        Spectrum s = checked_spectrum(w);
        const double l2 = s.lambda2();
        const double alpha = optimal_alpha(l2, theta);
        return AcceleratedOperator(std::move(w), theta, alpha, l2, std::move(s));
    }

    /// alpha = alpha*(lambda2) for a supplied (e.g. estimated) lambda2.
    static AcceleratedOperator with_lambda2(WeightMatrix w, PredictorParams theta, double lambda2)
    {
        const double alpha = optimal_alpha(lambda2, theta);
        Spectrum s = symmetric_eigenvalues(w);
        return AcceleratedOperator(std::move(w), theta, alpha, lambda2, std::move(s));
    }

    /// Explicit alpha; must lie in the stability range [0, -1/theta1).
    static AcceleratedOperator with_alpha(WeightMatrix w, PredictorParams theta, double alpha)
    {
        if (!(alpha >= 0.0) || !(alpha < theta.alpha_limit()))
            throw Error(ErrorCode::out_of_range, "alpha outside the stability range [0, -1/theta1)");
        Spectrum s = checked_spectrum(w);
        const double l2 = s.lambda2();
        return AcceleratedOperator(std::move(w), theta, alpha, l2, std::move(s));
    }

    /// No range check on alpha; for probing divergence.
    static AcceleratedOperator with_alpha_unchecked(WeightMatrix w, PredictorParams theta, double alpha)
    {
        Spectrum s = symmetric_eigenvalues(w);
        const double l2 = s.lambda2();
        return AcceleratedOperator(std::move(w), theta, alpha, l2, std::move(s));
    }

    [[nodiscard]] const WeightMatrix& weight() const noexcept { return weight_; }
    [[nodiscard]] const PredictorParams& theta() const noexcept { return theta_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    /// lambda2 the operator was configured with (exact or estimated).
    [[nodiscard]] double lambda2() const noexcept { return lambda2_; }
    [[nodiscard]] std::size_t size() const noexcept { return weight_.size(); }
    [[nodiscard]] bool stable() const noexcept { return alpha_ >= 0.0 && alpha_ < theta_.alpha_limit(); }

    /// Exact spectrum of W.
    [[nodiscard]] const Spectrum& w_spectrum() const noexcept { return *spectrum_; }

    [[nodiscard]] PhiSpectrum spectrum() const { return phi_spectrum(w_spectrum(), theta_, alpha_); }
    [[nodiscard]] double deviation_radius() const { return spectrum().deviation_radius; }

    // Coefficients of the node update x(t+1) = a W x(t) + b x(t) + c x(t-1).
    [[nodiscard]] double weight_coefficient() const noexcept { return 1.0 - alpha_ + alpha_ * theta_.theta3(); }
    [[nodiscard]] double current_coefficient() const noexcept { return alpha_ * theta_.theta2(); }
    [[nodiscard]] double previous_coefficient() const noexcept { return alpha_ * theta_.theta1(); }

private:
    AcceleratedOperator(WeightMatrix w, PredictorParams theta, double alpha, double lambda2,
                        Spectrum spectrum)
        : weight_(std::move(w)), theta_(theta), alpha_(alpha), lambda2_(lambda2),
          spectrum_(std::make_shared<const Spectrum>(std::move(spectrum)))
    {
    }

    static Spectrum checked_spectrum(const WeightMatrix& w)
    {
        Spectrum s = symmetric_eigenvalues(w);
        if (s.size() < 2) throw Error(ErrorCode::contract_violation, "operator needs N >= 2");
        const double l2 = s.lambda2();
        if (!(l2 >= 0.0) || !(l2 < 1.0))
            throw Error(ErrorCode::contract_violation, "lambda2(W) must lie in [0, 1)");
        if (std::abs(s.smallest()) > l2 + 1e-12)
            throw Error(ErrorCode::contract_violation,
                        "|lambda_N(W)| exceeds lambda2(W); apply lazy_transform first");
        return s;
    }

    WeightMatrix weight_;
    PredictorParams theta_;
    double alpha_;
    double lambda2_;
    std::shared_ptr<const Spectrum> spectrum_;
};

} // namespace predcons

#endif
