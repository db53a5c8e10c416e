#pragma once

#include <array>
#include <map>

#include <Eigen/Dense>

#include "esrad/dipole.hpp"

namespace esrad {

enum class ProfileKind { Tanh, Exponential, Step };

// Field envelope f(t) in [0,1], monotone nondecreasing.
struct SwitchingProfile {
    ProfileKind kind = ProfileKind::Tanh;
    double tau = 1.0;  // rise time; ignored by Step
    double t_on = 0.0; // switch center

    double envelope(double t) const;
    double switch_start() const; // envelope negligible before this
    double switch_end() const;   // envelope ~1 after this
};

// Rotating-frame amplitudes sampled on a uniform grid.
struct TimeSeries {
    std::vector<double> t;
    std::vector<Eigen::Vector2cd> a;
    double max_norm_drift = 0.0;
};

// Integrates i da/dt = H(t) a with H = [[0, V f(t)], [V* f(t), Delta]],
// V = |V| e^{i phi0} (the matrix element basis_transform diagonalizes),
// using an adaptive Dormand-Prince RK5(4) pair.
// Starts at profile.switch_start() (or t_on for Step) and samples uniformly
// up to t_end.  tol must lie in [1e-12, 1e-6].
TimeSeries propagate(const DressedParams& params, const SwitchingProfile& profile,
                     const Eigen::Vector2cd& initial, double t_end, double tol,
                     std::size_t n_samples = 6000);

inline Eigen::Vector2cd psi1() { return {complexd{1.0, 0.0}, complexd{0.0, 0.0}}; }
inline Eigen::Vector2cd psi2() { return {complexd{0.0, 0.0}, complexd{1.0, 0.0}}; }

// Spectral amplitudes of one dipole matrix element extracted from a fit of
// a1*(t) a2(t) to c0 + c+ e^{i Om t} + c- e^{-i Om t} over the window.
// Keys of amp_at are the emission frequencies omega, omega-Omega, omega+Omega.
struct OracleResult {
    std::map<std::string, complexd> amp_at;
    double residual = 0.0;      // rms misfit of the three-exponential model
    double pop_residual = 0.0;  // rms misfit of the |a1|^2-|a2|^2 fit
    double omega_rabi_fitted = 0.0;
};

OracleResult extract_components(const TimeSeries& series,
                                const DressedParams& params,
                                double window_start, double window_end,
                                bool refine_omega = true);

// Full dressed dipole matrix from propagating both bare initial states:
// fitted coefficients of x1*(t) y2(t) for each ordered pair of solutions.
// amp[i][k][h+1] is the modulus of the emission component of element (i,k)
// at harmonic h in {-1, 0, +1} (frequency omega + h*Omega).
struct MatrixOracleResult {
    std::array<std::array<std::array<double, 3>, 2>, 2> amp{};
    double max_norm_drift = 0.0;
    double residual = 0.0; // worst fit rms over the four elements

    double diag(int h) const { return amp[0][0][h + 1]; }
    // Root-sum-square over the two cross elements at one harmonic;
    // insensitive to which propagated solution tracks which dressed state.
    double offdiag_rss(int h) const {
        return std::hypot(amp[0][1][h + 1], amp[1][0][h + 1]);
    }
};

MatrixOracleResult matrix_element_oracle(const DressedParams& params,
                                         const SwitchingProfile& profile,
                                         double t_end, double tol,
                                         std::size_t n_samples = 6000);

// One row of an oracle-vs-analytic comparison.
struct OracleDeviation {
    std::string what;
    int harmonic = 0;
    double oracle_amp = 0.0;
    double analytic_amp = 0.0;
    double rel_dev = 0.0; // |oracle - analytic| / analytic, or absolute when analytic ~ 0
    bool absolute = false;
};

// Compares a matrix oracle run against adiabatic_dipoles or
// sudden_dipoles_exact component moduli (diagonal element-wise, off-diagonal
// as a root-sum-square pair).
std::vector<OracleDeviation> compare_oracle(const MatrixOracleResult& oracle,
                                            const DressedParams& params,
                                            DipoleBasis basis);

} // namespace esrad
