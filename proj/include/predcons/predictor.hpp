#ifndef PREDCONS_PREDICTOR_HPP
#define PREDCONS_PREDICTOR_HPP

// Two-tap predictor coefficients: x^P = theta3 x^W + theta2 x(t) + theta1 x(t-1).

#include "predcons/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace predcons {

class PredictorParams {
public:
    static constexpr double sum_tolerance = 1e-12;

    /// Throws invalid-parameter unless theta1 + theta2 + theta3 = 1,
    /// theta3 >= 1 and theta2 >= 0.
    PredictorParams(double theta1, double theta2, double theta3)
        : theta1_(theta1), theta2_(theta2), theta3_(theta3)
    {
        if (!std::isfinite(theta1) || !std::isfinite(theta2) || !std::isfinite(theta3))
            throw Error(ErrorCode::invalid_parameter, "predictor coefficients must be finite");
        if (std::abs(theta1 + theta2 + theta3 - 1.0) > sum_tolerance)
            throw Error(ErrorCode::invalid_parameter, "predictor coefficients must sum to 1");
        if (theta3 < 1.0 || theta2 < 0.0)
            throw Error(ErrorCode::invalid_parameter, "need theta3 >= 1 and theta2 >= 0");
    }

    [[nodiscard]] double theta1() const noexcept { return theta1_; }
    [[nodiscard]] double theta2() const noexcept { return theta2_; }
    [[nodiscard]] double theta3() const noexcept { return theta3_; }

    /// Upper end of the stability range [0, -1/theta1); infinite when theta1 = 0.
    [[nodiscard]] double alpha_limit() const noexcept
    {
        return theta1_ < 0.0 ? -1.0 / theta1_ : HUGE_VAL;
    }

    friend bool operator==(const PredictorParams&, const PredictorParams&) = default;

private:
    double theta1_;
    double theta2_;
    double theta3_;
};

/// Least-squares design theta = pinv(A)^T B for A = [-2 -1 0; 1 1 1]^T, B = [1 1]^T.
inline PredictorParams least_squares_theta()
{
    Eigen::Matrix<double, 3, 2> a;
    a << -2.0, 1.0,
         -1.0, 1.0,
          0.0, 1.0;
    const Eigen::Vector2d b(1.0, 1.0);
    const Eigen::MatrixXd pinv = a.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::Vector3d theta = pinv.transpose() * b;
    return PredictorParams(theta(0), theta(1), theta(2));
}

/// (-eps, 0, 1 + eps): the family with the largest asymptotic rate coefficient.
inline PredictorParams asymptotic_theta(double eps)
{
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw Error(ErrorCode::invalid_parameter, "asymptotic theta needs eps > 0");
    return PredictorParams(-eps, 0.0, 1.0 + eps);
}

/// Coefficient of sqrt(1 - lambda2) in the expansion of 1 - rho(Phi3[alpha*] - J).
inline double gamma_coefficient(double theta2, double theta3)
{
    const double a = theta3 - 1.0;
    if (a + theta2 <= 0.0)
        throw Error(ErrorCode::degenerate_parameters, "gamma undefined for theta2 = 0, theta3 = 1");
    return std::sqrt((2.0 * a + theta2) / (a + theta2));
}

inline double gamma_coefficient(const PredictorParams& theta)
{
    return gamma_coefficient(theta.theta2(), theta.theta3());
}

} // namespace predcons

#endif
