#ifndef PREDCONS_SPECTRAL_HPP
#define PREDCONS_SPECTRAL_HPP

// Eigenstructure of W and of the accelerated operator Phi3[alpha].
//
// Phi3[alpha] = [ W3[alpha]  alpha*theta1*I ]   with W3[alpha] = (1 - alpha + alpha*theta3) W + alpha*theta2 I
//               [ I          0              ]
//
// shares eigenvectors with W, so each eigenvalue l of W yields the two roots
// of z^2 - l3 z - alpha*theta1 = 0 with l3 = (1 - alpha + alpha*theta3) l + alpha*theta2.

#include "predcons/error.hpp"
#include "predcons/predictor.hpp"
#include "predcons/weights.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

namespace predcons {

/// Real eigenvalues of a symmetric matrix, sorted descending.
struct Spectrum {
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double largest() const { return values.front(); }
    [[nodiscard]] double lambda2() const { return values.at(1); }
    [[nodiscard]] double smallest() const { return values.back(); }
};

inline Spectrum symmetric_eigenvalues(const Eigen::MatrixXd& m)
{
    if (m.rows() != m.cols())
        throw Error(ErrorCode::contract_violation, "eigenvalues of a non-square matrix");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(ErrorCode::contract_violation, "symmetric eigensolver given a non-symmetric matrix");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::contract_violation, "symmetric eigensolver did not converge");
    const auto& ev = solver.eigenvalues();
    Spectrum s;
    s.values.assign(ev.data(), ev.data() + ev.size());
    std::sort(s.values.begin(), s.values.end(), std::greater<>());
    return s;
}

inline Spectrum symmetric_eigenvalues(const WeightMatrix& w)
{
    return symmetric_eigenvalues(w.dense());
}

/// max_{i >= 2} |lambda_i|, i.e. rho(W - J) for symmetric doubly stochastic W.
inline double rho_deviation(const Spectrum& s)
{
    double r = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) r = std::max(r, std::abs(s.values[i]));
    return r;
}

inline double rho_deviation(const WeightMatrix& w)
{
    return rho_deviation(symmetric_eigenvalues(w));
}

/// Eigenvalue of W3[alpha] paired with eigenvalue `lambda` of W.
inline double w3_eigenvalue(double lambda, const PredictorParams& theta, double alpha)
{
    return (1.0 - alpha + alpha * theta.theta3()) * lambda + alpha * theta.theta2();
}

/// Roots (lambda*, lambda**) of z^2 - l3 z - alpha*theta1 = 0. A discriminant
/// within rounding of zero is taken as an exact double root.
inline std::pair<std::complex<double>, std::complex<double>>
phi_roots(double l3, double alpha, double theta1)
{
    const double p = 4.0 * alpha * theta1;
    double disc = l3 * l3 + p;
    const double noise = 64.0 * std::numeric_limits<double>::epsilon()
        * std::max(l3 * l3, std::abs(p));
    if (std::abs(disc) <= noise) disc = 0.0;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        return {std::complex<double>(0.5 * (l3 + r), 0.0), std::complex<double>(0.5 * (l3 - r), 0.0)};
    }
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(0.5 * l3, im), std::complex<double>(0.5 * l3, -im)};
}

struct PhiSpectrum {
    /// 2N roots; entries 2i and 2i+1 are (lambda*_i, lambda**_i) for the
    /// i-th eigenvalue of W in descending order.
    std::vector<std::complex<double>> values;
    /// Index into `values` of the unit eigenvalue removed by subtracting J.
    std::size_t excluded = 0;
    /// rho(Phi3[alpha] - J).
    double deviation_radius = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] std::vector<double> moduli() const
    {
        std::vector<double> m;
        m.reserve(values.size());
        for (const auto& z : values) m.push_back(std::abs(z));
        return m;
    }
};

/// Analytic spectrum of Phi3[alpha] from the spectrum of W. The consensus
/// root (the one of the first pair nearest 1) is excluded from the radius;
/// its partner -alpha*theta1 is kept.
inline PhiSpectrum phi_spectrum(const Spectrum& w_spectrum, const PredictorParams& theta, double alpha)
{
    PhiSpectrum out;
    const std::size_t n = w_spectrum.size();
    out.values.reserve(2 * n);
    for (double lambda : w_spectrum.values) {
        const auto [a, b] = phi_roots(w3_eigenvalue(lambda, theta, alpha), alpha, theta.theta1());
        out.values.push_back(a);
        out.values.push_back(b);
    }
    if (n == 0) return out;
    out.excluded = std::abs(out.values[0] - 1.0) <= std::abs(out.values[1] - 1.0) ? 0 : 1;
    for (std::size_t k = 0; k < out.values.size(); ++k)
        if (k != out.excluded) out.deviation_radius = std::max(out.deviation_radius, std::abs(out.values[k]));
    return out;
}

/// CSV rows: index, real, imag, modulus.
inline void write_spectrum_csv(std::ostream& os, const PhiSpectrum& s)
{
    const auto old_precision = os.precision(17);
    os << "index,real,imag,modulus\n";
    for (std::size_t k = 0; k < s.size(); ++k)
        os << k << ',' << s.values[k].real() << ',' << s.values[k].imag() << ',' << std::abs(s.values[k]) << '\n';
    os.precision(old_precision);
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s)
{
    const auto old_precision = os.precision(17);
    os << "index,real,imag,modulus\n";
    for (std::size_t k = 0; k < s.size(); ++k)
        os << k << ',' << s.values[k] << ",0," << std::abs(s.values[k]) << '\n';
    os.precision(old_precision);
}

} // namespace predcons

#endif
