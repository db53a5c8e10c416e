#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace esrad {

// Physical inputs describing the atom and the strong dressing field.
// All energies/frequencies are angular frequencies (hbar = 1).
struct SystemConfig {
    double e21 = 0.0;        // transition frequency E2 - E1, > 0
    double omega = 0.0;      // carrier frequency of the strong field, > 0
    double dipole_mag = 1.0; // |d|
    double field_amp = 0.0;  // |E|, >= 0
    double phi_field = 0.0;  // deterministic field phase
    double phi1 = 0.0;       // per-atom random phase of the lower state
    double phi2 = 0.0;       // per-atom random phase of the upper state
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Throws ConfigError on hard violations; returns human-readable warnings
// for soft ones (near-resonance condition |Delta| << E21).
std::vector<std::string> validate(const SystemConfig& cfg);

} // namespace esrad
