#pragma once

#include <complex>

#include <Eigen/Dense>

#include "esrad/config.hpp"

namespace esrad {

using complexd = std::complex<double>;

// Parameters of the dressed two-level system.  c1 is real nonnegative;
// all phase freedom sits in c2.
struct DressedParams {
    double omega = 0.0;      // carrier frequency (kept for sideband output)
    double delta = 0.0;      // detuning E21 - omega, signed
    double v_mag = 0.0;      // |V| = |E d| (hbar = 1)
    double phi_field = 0.0;  // deterministic field phase
    double phi_rand = 0.0;   // phi1 - phi2
    double phi0 = 0.0;       // interaction phase phi + phi1 - phi2
    double alpha = 0.0;      // 2|V|/|Delta|, +inf at Delta = 0
    bool alpha_infinite = false;
    double omega_rabi = 0.0; // sqrt(Delta^2 + 4|V|^2)
    double lambda1 = 0.0;    // (Delta - Omega)/2, always <= 0
    double c1 = 0.0;
    complexd c2{0.0, 0.0};
    bool outside_model_validity = false; // |Delta|/E21 > 0.1

    int sign_delta() const { return delta < 0.0 ? -1 : 1; }
    // Upper/lower dressed weights (1 +- Delta/Omega)/2; p + q = 1.
    double p() const { return 0.5 * (1.0 + delta / omega_rabi); }
    double q() const { return 0.5 * (1.0 - delta / omega_rabi); }
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

DressedParams derive_params(const SystemConfig& cfg);

// Convenience for tests and sweeps: build params directly from
// (delta, v_mag, phases) with a given carrier frequency.
DressedParams derive_params(double delta, double v_mag, double omega = 100.0,
                            double phi_field = 0.0, double phi1 = 0.0,
                            double phi2 = 0.0);

// Unitary mapping (Phi1, Phi2) coordinates to (Phi'1, Phi'2):
// row1 = (C1, C2*), row2 = (-C2, C1).
Eigen::Matrix2cd basis_transform(const DressedParams& params);

struct SidebandFrequencies {
    double lower = 0.0;  // omega - Omega
    double center = 0.0; // omega
    double upper = 0.0;  // omega + Omega
};

SidebandFrequencies sideband_frequencies(const DressedParams& params);

} // namespace esrad
