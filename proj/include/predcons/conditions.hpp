#ifndef PREDCONS_CONDITIONS_HPP
#define PREDCONS_CONDITIONS_HPP

#include "predcons/spectral.hpp"
#include "predcons/weights.hpp"

#include <algorithm>
#include <cmath>

namespace predcons {

/// Convergence hypotheses on W, each with the measured slack.
struct ConditionReport {
    bool doubly_stochastic = false;
    double stochastic_error = 0.0;   ///< max |row sum - 1| over rows and columns
    bool symmetric = false;
    double symmetry_error = 0.0;     ///< max |W_ij - W_ji|
    bool contracting = false;
    double rho_deviation = 0.0;      ///< rho(W - J); contracting iff < 1
    bool ordering = false;
    double ordering_slack = 0.0;     ///< lambda_2 - |lambda_N|; ordering iff >= 0

    [[nodiscard]] bool all() const noexcept
    {
        return doubly_stochastic && symmetric && contracting && ordering;
    }
};

inline constexpr double stochastic_tolerance = 1e-12;

inline ConditionReport check_conditions(const WeightMatrix& w)
{
    ConditionReport r;
    const auto& m = w.dense();
    const double row_err = (m.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double col_err = (m.colwise().sum().array() - 1.0).abs().maxCoeff();
    r.stochastic_error = std::max(row_err, col_err);
    r.doubly_stochastic = r.stochastic_error <= stochastic_tolerance;
    r.symmetry_error = (m - m.transpose()).cwiseAbs().maxCoeff();
    r.symmetric = r.symmetry_error == 0.0;

    const Spectrum s = symmetric_eigenvalues(m);
    r.rho_deviation = rho_deviation(s);
    r.contracting = r.rho_deviation < 1.0 - 1e-12;
    if (s.size() >= 2) {
        r.ordering_slack = s.lambda2() - std::abs(s.smallest());
        r.ordering = r.ordering_slack >= -1e-12;
    }
    return r;
}

} // namespace predcons

#endif
