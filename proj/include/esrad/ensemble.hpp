#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "esrad/dipole.hpp"

namespace esrad {

struct AtomSite {
    Eigen::Vector3d position{0.0, 0.0, 0.0}; // length units of 1/k
    double phi1 = 0.0;
    double phi2 = 0.0;
};

// Deterministic uniform phase in [0, 2pi) from a raw 64-bit draw.
double uniform_phase(std::uint64_t raw);

// Quenched geometry: N positions uniform in a cube of the given side,
// centered at the origin.  Phases are filled per trial, not here.
std::vector<AtomSite> sample_positions(std::size_t n_atoms, double cube_side,
                                       std::uint64_t seed);

struct EnsembleIntensity {
    double mean = 0.0;
    double variance = 0.0;  // across trials
    double std_error = 0.0; // of the mean
};

// Monte Carlo mean of |sum_i amp_i e^{i(k-k') r_i}|^2 over fresh random
// phase draws (phi1, phi2 resampled per atom per trial); positions fixed.
// Trial t uses the engine seeded with (seed, t), so serial and parallel
// partitions agree.
EnsembleIntensity ensemble_intensity(const std::vector<AtomSite>& sites,
                                     const DipoleComponent& component,
                                     double phi_field,
                                     const Eigen::Vector3d& k_in,
                                     const Eigen::Vector3d& k_out,
                                     std::size_t n_trials, std::uint64_t seed);

struct ScalingResult {
    std::vector<std::size_t> n_atoms;
    std::vector<double> mean_intensity;
    std::vector<double> std_error;
    double exponent = 0.0; // log-log least-squares slope
};

ScalingResult scaling_exponent(const DipoleComponent& component,
                               double phi_field,
                               const std::vector<std::size_t>& n_grid,
                               double cube_side, const Eigen::Vector3d& k_in,
                               const Eigen::Vector3d& k_out,
                               std::size_t n_trials, std::uint64_t seed);

} // namespace esrad
