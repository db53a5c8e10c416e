#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "esrad/dipole.hpp"

namespace esrad {

enum class FreqLabel { Lower, Center, Upper }; // omega-Omega, omega, omega+Omega
enum class Direction { Emission, Absorption };

const char* to_string(FreqLabel f);
const char* to_string(Direction d);

// Weak probe occupation and geometry.
struct ProbeField {
    double n_photons = 0.0;
    Eigen::Vector3d direction{0.0, 0.0, 1.0};
    Eigen::Vector3cd polarization{1.0, 0.0, 0.0};
};

void validate(const ProbeField& probe);

// Occupations of the probe modes at the three emission frequencies.
struct ProbeOccupation {
    double at_lower = 0.0;
    double at_center = 0.0;
    double at_upper = 0.0;

    double at(FreqLabel f) const {
        switch (f) {
        case FreqLabel::Lower: return at_lower;
        case FreqLabel::Center: return at_center;
        case FreqLabel::Upper: return at_upper;
        }
        return 0.0;
    }
};

// One line of a first-order probability table, in units of the spontaneous
// probability at its frequency.
struct RateEntry {
    FreqLabel freq_label = FreqLabel::Center;
    double freq_value = 0.0;
    Direction direction = Direction::Emission;
    double spont_coeff = 0.0;      // asymptotic coefficient of dW_sp * 1
    double stim_coeff = 0.0;       // asymptotic coefficient of dW_sp * n', signed
    double exact_spont_coeff = 0.0;
    double exact_stim_coeff = 0.0;
    Coherence coherence = Coherence::Coherent;
    std::string transition;
    std::string validity;
    bool active = false;           // net rate nonzero for the supplied n'
    std::string regime;            // "adiabatic" / "sudden"
};

enum class SpontaneousMode { PerSolidAngle, AngleIntegrated };

// First-order spontaneous rate in natural units (hbar = c = 1).
// PerSolidAngle: w^3/(2 pi) |e'* . d-|^2; AngleIntegrated: (4/3) w^3 |d-|^2.
double spontaneous_rate(double freq, const Eigen::Vector3cd& d_minus,
                        const Eigen::Vector3cd& e_prime, SpontaneousMode mode);

// n' = 8 pi^3 I / w^3 in natural units.
double stimulated_occupation(double intensity, double freq);

// Combine emission (d-) and absorption (d+) amplitudes at one frequency into a
// net rate entry; stimulated parts subtract, the spontaneous part is
// emission-only.  Amplitudes are scalar moduli in units of |d|.
RateEntry net_rate(complexd emission_amp, complexd absorption_amp,
                   double n_photons, FreqLabel label = FreqLabel::Center,
                   double freq_value = 0.0);

std::vector<RateEntry> adiabatic_table(const DressedParams& params,
                                       const ProbeOccupation& n,
                                       std::vector<std::string>* warnings = nullptr);
std::vector<RateEntry> sudden_table(const DressedParams& params,
                                    const ProbeOccupation& n,
                                    std::vector<std::string>* warnings = nullptr);

struct LinewidthResult {
    double gamma_es = 0.0;
    double n2_weight = 0.0; // upper bare-level occupancy of the dressed state
};

// Radiative width of the adiabatically dressed state, n' = 0.
LinewidthResult es_linewidth(const DressedParams& params, double gamma_free);

std::string table_csv(const std::vector<RateEntry>& rows);

} // namespace esrad
