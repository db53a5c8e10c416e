#include "esrad/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace esrad {

namespace {

// splitmix64; documented mixing so (seed, trial) -> engine is reproducible
// across platforms.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(mix64(mix64(seed) ^ stream));
}

} // namespace

double uniform_phase(std::uint64_t raw) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return two_pi * static_cast<double>(raw >> 11) * 0x1.0p-53;
}

std::vector<AtomSite> sample_positions(std::size_t n_atoms, double cube_side,
                                       std::uint64_t seed) {
    auto rng = trial_engine(seed, 0xfeedULL);
    std::vector<AtomSite> sites(n_atoms);
    for (auto& s : sites) {
        for (int i = 0; i < 3; ++i) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            s.position[i] = cube_side * (u - 0.5);
        }
    }
    return sites;
}

EnsembleIntensity ensemble_intensity(const std::vector<AtomSite>& sites,
                                     const DipoleComponent& component,
                                     double phi_field,
                                     const Eigen::Vector3d& k_in,
                                     const Eigen::Vector3d& k_out,
                                     std::size_t n_trials, std::uint64_t seed) {
    if (sites.empty())
        throw std::invalid_argument("ensemble_intensity: empty site list");
    if (n_trials < 1)
        throw std::invalid_argument("ensemble_intensity: n_trials must be >= 1");

    const Eigen::Vector3d dk = k_in - k_out;
    std::vector<complexd> geometry(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i)
        geometry[i] = std::exp(complexd{0.0, dk.dot(sites[i].position)});

    double mean = 0.0, m2 = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) {
        auto rng = trial_engine(seed, t + 1);
        complexd sum{0.0, 0.0};
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const double phi1 = uniform_phase(rng());
            const double phi2 = uniform_phase(rng());
            sum += component.amp(phi_field, phi1, phi2) * geometry[i];
        }
        const double x = std::norm(sum);
        const double d = x - mean;
        mean += d / static_cast<double>(t + 1);
        m2 += d * (x - mean);
    }

    EnsembleIntensity r;
    r.mean = mean;
    r.variance = n_trials > 1 ? m2 / static_cast<double>(n_trials - 1) : 0.0;
    r.std_error = std::sqrt(r.variance / static_cast<double>(n_trials));
    return r;
}

ScalingResult scaling_exponent(const DipoleComponent& component,
                               double phi_field,
                               const std::vector<std::size_t>& n_grid,
                               double cube_side, const Eigen::Vector3d& k_in,
                               const Eigen::Vector3d& k_out,
                               std::size_t n_trials, std::uint64_t seed) {
    if (n_grid.size() < 2)
        throw std::invalid_argument("scaling_exponent: need at least 2 grid points");

    ScalingResult r;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        const auto sites = sample_positions(n, cube_side, mix64(seed) + gi);
        const auto inten =
            ensemble_intensity(sites, component, phi_field, k_in, k_out,
                               n_trials, mix64(seed + 1) + gi);
        r.n_atoms.push_back(n);
        r.mean_intensity.push_back(inten.mean);
        r.std_error.push_back(inten.std_error);
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(inten.mean);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(n_grid.size());
    r.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return r;
}

} // namespace esrad
