#include "esrad/dressed.hpp"

#include <cmath>
#include <limits>

namespace esrad {

std::vector<std::string> validate(const SystemConfig& cfg) {
    if (!(cfg.e21 > 0.0))
        throw ConfigError("e21 must be > 0");
    if (!(cfg.omega > 0.0))
        throw ConfigError("omega must be > 0");
    if (!(cfg.dipole_mag > 0.0))
        throw ConfigError("dipole_mag must be > 0");
    if (cfg.field_amp < 0.0)
        throw ConfigError("field_amp must be >= 0");

    std::vector<std::string> warnings;
    const double delta = cfg.e21 - cfg.omega;
    if (std::abs(delta) / cfg.e21 > 0.1)
        warnings.push_back("|Delta|/E21 = " + std::to_string(std::abs(delta) / cfg.e21) +
                           " > 0.1: outside model validity (near-resonance condition)");
    return warnings;
}

DressedParams derive_params(const SystemConfig& cfg) {
    validate(cfg);

    DressedParams p;
    p.omega = cfg.omega;
    p.delta = cfg.e21 - cfg.omega;
    p.v_mag = cfg.field_amp * cfg.dipole_mag;
    p.phi_field = cfg.phi_field;
    p.phi_rand = cfg.phi1 - cfg.phi2;
    p.phi0 = cfg.phi_field + cfg.phi1 - cfg.phi2;
    p.outside_model_validity = std::abs(p.delta) / cfg.e21 > 0.1;

    if (p.delta == 0.0 && p.v_mag == 0.0)
        throw NumericalError("degenerate dressing: Delta = 0 and |V| = 0 (Omega = 0, transform undefined)");

    if (p.delta == 0.0) {
        p.alpha_infinite = true;
        p.alpha = std::numeric_limits<double>::infinity();
    } else {
        p.alpha = 2.0 * p.v_mag / std::abs(p.delta);
    }

    p.omega_rabi = std::hypot(p.delta, 2.0 * p.v_mag);
    p.lambda1 = 0.5 * (p.delta - p.omega_rabi);
    p.c1 = std::sqrt(0.5 * (1.0 + p.delta / p.omega_rabi));

    // c2 = -(lambda1/V) c1 with V = |V| e^{i phi0 - i pi}; lambda1 <= 0,
    // so c2 = -sqrt(1 - c1^2) e^{-i phi0}.  This form stays finite as V -> 0.
    const double s = std::sqrt(std::max(0.0, 1.0 - p.c1 * p.c1));
    p.c2 = (p.v_mag == 0.0 && p.delta > 0.0)
               ? complexd{0.0, 0.0}
               : -s * std::exp(complexd{0.0, -p.phi0});
    return p;
}

DressedParams derive_params(double delta, double v_mag, double omega,
                            double phi_field, double phi1, double phi2) {
    SystemConfig cfg;
    cfg.omega = omega;
    cfg.e21 = omega + delta;
    cfg.dipole_mag = 1.0;
    cfg.field_amp = v_mag;
    cfg.phi_field = phi_field;
    cfg.phi1 = phi1;
    cfg.phi2 = phi2;
    return derive_params(cfg);
}

Eigen::Matrix2cd basis_transform(const DressedParams& params) {
    Eigen::Matrix2cd u;
    u(0, 0) = params.c1;
    u(0, 1) = std::conj(params.c2);
    u(1, 0) = -params.c2;
    u(1, 1) = params.c1;
    return u;
}

SidebandFrequencies sideband_frequencies(const DressedParams& params) {
    return {params.omega - params.omega_rabi, params.omega,
            params.omega + params.omega_rabi};
}

} // namespace esrad
