#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace esrad::cli {

// Resolved run configuration: defaults, then config file, then command-line
// overrides.  All validation happens before any computation starts.
struct RunConfig {
    // System parameters.
    double omega = 100.0;
    double delta = 1.0;
    double vmag = 0.5;
    bool have_alpha = false;
    double alpha = 0.0; // when set, vmag = alpha*|delta|/2
    double phi = 0.0, phi1 = 0.0, phi2 = 0.0;

    // Probe occupations per frequency.
    double n_lower = 0.0, n_center = 0.0, n_upper = 0.0;

    // Table / dipole options.
    std::string regime = "adiabatic"; // adiabatic | sudden
    bool exact_mode = false;          // --exact: asymptotic columns carry exact values

    // Sweeps.
    std::string alpha_grid; // start:stop:points[log|lin]

    // Oracle options.
    std::string profile = "tanh"; // tanh | exp | step
    double delta_tau = 200.0;     // |Delta * tau|
    double tol = 1e-10;
    double periods_after = 25.0;  // fit-window length in Rabi periods

    // Ensemble options.
    std::string n_grid = "10,30,100,300,1000";
    std::uint64_t trials = 10000;
    double cube_side = 50.0; // units of 1/k
    double direction_cos = 1.0; // cos of angle between k' and k
    std::string component = "coherent"; // coherent | noncoherent

    // Misc.
    std::uint64_t seed = 12345;
    double audit_tol = 1e-3;
    std::string format = "csv"; // csv | json
    std::string out_path;       // empty -> stdout
    double gamma_free = 1.0;
};

RunConfig make_config(const std::map<std::string, std::string>& file_keys);

// Per-subcommand emitters; each returns the complete output document.
std::string params_output(const RunConfig& cfg);
std::string fig1_output(const RunConfig& cfg);
std::string table_output(const RunConfig& cfg);
std::string oracle_output(const RunConfig& cfg);
std::string ensemble_output(const RunConfig& cfg);
std::string audit_output(const RunConfig& cfg);

// Full front end.  Exit codes: 0 success, 2 config error, 3 numerical failure.
int run(int argc, const char* const* argv);

} // namespace esrad::cli
