#include "esrad/rates.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "esrad/io.hpp"

namespace esrad {

namespace {

double inv_alpha(const DressedParams& p) {
    return p.alpha_infinite ? 0.0 : 1.0 / p.alpha;
}

bool small_regime(const DressedParams& p) {
    return !p.alpha_infinite && p.alpha < 1.0;
}

void warn_band(const DressedParams& p, std::vector<std::string>* warnings) {
    if (warnings && !p.alpha_infinite && p.alpha >= 0.5 && p.alpha <= 2.0)
        warnings->push_back("alpha = " + std::to_string(p.alpha) +
                            " in [0.5, 2]: asymptotic table coefficients are uncontrolled");
}

RateEntry make_row(const DressedParams& p, FreqLabel label, Direction dir,
                   double spont, double stim, double exact_spont,
                   double exact_stim, Coherence coh, const std::string& transition,
                   const std::string& validity, double n, const char* regime) {
    const auto f = sideband_frequencies(p);
    RateEntry r;
    r.freq_label = label;
    r.freq_value = label == FreqLabel::Lower ? f.lower
                 : label == FreqLabel::Upper ? f.upper
                                             : f.center;
    r.direction = dir;
    r.spont_coeff = spont;
    r.stim_coeff = stim;
    r.exact_spont_coeff = exact_spont;
    r.exact_stim_coeff = exact_stim;
    r.coherence = coh;
    r.transition = transition;
    r.validity = validity;
    r.active = std::abs(exact_spont + exact_stim * n) > 1e-300;
    r.regime = regime;
    return r;
}

} // namespace

const char* to_string(FreqLabel f) {
    switch (f) {
    case FreqLabel::Lower: return "omega-Omega";
    case FreqLabel::Center: return "omega";
    case FreqLabel::Upper: return "omega+Omega";
    }
    return "?";
}

const char* to_string(Direction d) {
    return d == Direction::Emission ? "emission" : "absorption";
}

void validate(const ProbeField& probe) {
    if (probe.n_photons < 0.0)
        throw ConfigError("probe occupation must be >= 0");
    if (std::abs(probe.direction.norm() - 1.0) > 1e-9)
        throw ConfigError("probe direction must be a unit vector");
    if (std::abs(probe.polarization.norm() - 1.0) > 1e-9)
        throw ConfigError("probe polarization must be a unit vector");
    if (std::abs(probe.polarization.dot(probe.direction.cast<complexd>())) > 1e-9)
        throw ConfigError("probe polarization must be orthogonal to the direction");
}

double spontaneous_rate(double freq, const Eigen::Vector3cd& d_minus,
                        const Eigen::Vector3cd& e_prime, SpontaneousMode mode) {
    if (!(freq > 0.0))
        throw ConfigError("spontaneous_rate requires freq > 0");
    const double w3 = freq * freq * freq;
    if (mode == SpontaneousMode::PerSolidAngle) {
        const double proj = std::norm(e_prime.dot(d_minus));
        return w3 / (2.0 * std::numbers::pi) * proj;
    }
    return 4.0 / 3.0 * w3 * d_minus.squaredNorm();
}

double stimulated_occupation(double intensity, double freq) {
    if (intensity < 0.0)
        throw ConfigError("intensity must be >= 0");
    if (!(freq > 0.0))
        throw ConfigError("stimulated_occupation requires freq > 0");
    const double pi3 = std::numbers::pi * std::numbers::pi * std::numbers::pi;
    return 8.0 * pi3 * intensity / (freq * freq * freq);
}

RateEntry net_rate(complexd emission_amp, complexd absorption_amp,
                   double n_photons, FreqLabel label, double freq_value) {
    const double em2 = std::norm(emission_amp);
    const double ab2 = std::norm(absorption_amp);
    RateEntry r;
    r.freq_label = label;
    r.freq_value = freq_value;
    r.spont_coeff = em2;
    r.stim_coeff = em2 - ab2;
    r.exact_spont_coeff = em2;
    r.exact_stim_coeff = r.stim_coeff;
    const double net = em2 + r.stim_coeff * n_photons;
    r.direction = net >= 0.0 ? Direction::Emission : Direction::Absorption;
    r.active = std::abs(net) > 1e-300;
    return r;
}

std::vector<RateEntry> adiabatic_table(const DressedParams& p,
                                       const ProbeOccupation& n,
                                       std::vector<std::string>* warnings) {
    warn_band(p, warnings);
    const bool small = small_regime(p);
    const int sd = p.sign_delta();
    const double al = p.alpha, ia = inv_alpha(p);
    const double pp = p.p(), qq = p.q();
    const double exact_ray = pp * qq; // (V/Omega)^2

    std::vector<RateEntry> rows;
    const char* reg = "adiabatic";

    // Rayleigh line, Phi1 -> Phi1: stimulated parts compensate.
    const double ray = small ? 0.25 * al * al * (1.0 - al * al)
                             : 0.25 * (1.0 - ia * ia);
    rows.push_back(make_row(p, FreqLabel::Center, Direction::Emission, ray, 0.0,
                            exact_ray, 0.0, Coherence::Coherent, "Phi1->Phi1",
                            small ? "alpha^2<<1" : "alpha^2>>1",
                            n.at_center, reg));

    // omega - Omega, Phi1 -> Phi2: spontaneous + stimulated emission.
    const double lo = small ? (sd > 0 ? al * al * al * al / 16.0
                                      : 1.0 - 0.5 * al * al)
                            : 0.25 * (1.0 - 2.0 * sd * ia);
    rows.push_back(make_row(p, FreqLabel::Lower, Direction::Emission, lo, lo,
                            qq * qq, qq * qq, Coherence::Noncoherent,
                            "Phi1->Phi2",
                            std::string(small ? "alpha^2<<1" : "alpha^2>>1") +
                                (small ? (sd > 0 ? ", Delta>0" : ", Delta<0") : ""),
                            n.at_lower, reg));

    // omega + Omega, Phi1 -> Phi2: stimulated absorption only.
    const double hi = small ? (sd > 0 ? 1.0 - 0.5 * al * al
                                      : al * al * al * al / 16.0)
                            : 0.25 * (1.0 + 2.0 * sd * ia);
    rows.push_back(make_row(p, FreqLabel::Upper, Direction::Absorption, 0.0, -hi,
                            0.0, -pp * pp, Coherence::Noncoherent, "Phi1->Phi2",
                            std::string(small ? "alpha^2<<1" : "alpha^2>>1") +
                                (small ? (sd > 0 ? ", Delta>0" : ", Delta<0") : ""),
                            n.at_upper, reg));
    return rows;
}

std::vector<RateEntry> sudden_table(const DressedParams& p,
                                    const ProbeOccupation& n,
                                    std::vector<std::string>* warnings) {
    warn_band(p, warnings);
    const bool small = small_regime(p);
    const int sd = p.sign_delta();
    const double al = p.alpha, ia = inv_alpha(p);
    const double pp = p.p(), qq = p.q();
    const double dw = p.delta / p.omega_rabi; // = sd/sqrt(1+alpha^2)
    const char* reg = "sudden";
    const std::string band = small ? "alpha^2<<1" : "alpha^2>>1";
    const std::string sgn = sd > 0 ? ", Delta>0" : ", Delta<0";

    std::vector<RateEntry> rows;

    // --- Coherent lines, Phi'1 -> Phi'1 (spontaneous only). ---
    const double a2 = small ? 0.25 * al * al : 0.0;
    const double coh_ray = small ? a2 * (1.0 - al * al)
                                 : 0.25 * ia * ia * (1.0 - ia * ia);
    rows.push_back(make_row(p, FreqLabel::Center, Direction::Emission, coh_ray, 0.0,
                            dw * dw * pp * qq, 0.0, Coherence::Coherent,
                            "Phi'1->Phi'1", band, n.at_center, reg));

    const double a6 = small ? std::pow(al, 6) / 64.0 : 0.0;
    const double big = small ? a2 * (1.0 - 0.5 * al * al) : 0.0;
    const double coh_lo = small ? (sd > 0 ? a6 : big)
                                : (1.0 - 2.0 * sd * ia) / 16.0;
    rows.push_back(make_row(p, FreqLabel::Lower, Direction::Emission, coh_lo, 0.0,
                            pp * qq * qq * qq, 0.0, Coherence::Coherent,
                            "Phi'1->Phi'1", band + sgn, n.at_lower, reg));

    const double coh_hi = small ? (sd > 0 ? big : a6)
                                : (1.0 + 2.0 * sd * ia) / 16.0;
    rows.push_back(make_row(p, FreqLabel::Upper, Direction::Emission, coh_hi, 0.0,
                            pp * pp * pp * qq, 0.0, Coherence::Coherent,
                            "Phi'1->Phi'1", band + sgn, n.at_upper, reg));

    // --- Noncoherent lines, Phi'1 -> Phi'2. ---
    const double pq2 = pp * pp * qq * qq;
    const double a4 = small ? std::pow(al, 4) / 16.0 : 0.0;

    const double nc_ray = small ? 4.0 * a4 * (1.0 - al * al)
                                : 0.25 * (1.0 - ia * ia);
    rows.push_back(make_row(p, FreqLabel::Center, Direction::Emission, nc_ray, 0.0,
                            4.0 * pq2, 0.0, Coherence::Noncoherent,
                            "Phi'1->Phi'2", band, n.at_center, reg));

    // omega - Omega: spont P^2Q^2, stimulated net Q^2 (P^2 - Q^2) = Q^2 Delta/Omega.
    double lo_spont, lo_stim;
    std::string lo_valid = band + sgn;
    if (small) {
        lo_spont = a4;
        if (sd > 0) {
            lo_stim = a4;
        } else {
            lo_stim = -1.0;
            lo_valid += ", n>alpha^4/16";
        }
    } else {
        lo_spont = (1.0 - 2.0 * ia * ia) / 16.0;
        lo_stim = sd * ia / 4.0 - 0.5 * ia * ia;
        lo_valid += ", drawn for 1/16 > n/(4 alpha)";
    }
    const double lo_exact_stim = qq * qq * dw;
    rows.push_back(make_row(p, FreqLabel::Lower,
                            lo_spont + lo_stim * n.at_lower >= 0.0
                                ? Direction::Emission
                                : Direction::Absorption,
                            lo_spont, lo_stim, pq2, lo_exact_stim,
                            Coherence::Noncoherent, "Phi'1->Phi'2", lo_valid,
                            n.at_lower, reg));

    // omega + Omega: spont P^2Q^2, stimulated net -P^2 Delta/Omega;
    // the stimulated term is always driven by the occupation at omega+Omega.
    double hi_spont, hi_stim;
    std::string hi_valid = band + sgn;
    if (small) {
        hi_spont = a4;
        if (sd > 0) {
            hi_stim = -1.0;
            hi_valid += ", n>alpha^4/16";
        } else {
            hi_stim = a4;
        }
    } else {
        hi_spont = (1.0 - 2.0 * ia * ia) / 16.0;
        hi_stim = -(sd * ia / 4.0 + 0.5 * ia * ia);
        hi_valid += ", drawn for 1/16 > n/(4 alpha)";
    }
    const double hi_exact_stim = -pp * pp * dw;
    rows.push_back(make_row(p, FreqLabel::Upper,
                            hi_spont + hi_stim * n.at_upper >= 0.0
                                ? Direction::Emission
                                : Direction::Absorption,
                            hi_spont, hi_stim, pq2, hi_exact_stim,
                            Coherence::Noncoherent, "Phi'1->Phi'2", hi_valid,
                            n.at_upper, reg));
    return rows;
}

LinewidthResult es_linewidth(const DressedParams& p, double gamma_free) {
    if (gamma_free < 0.0)
        throw ConfigError("gamma_free must be >= 0");
    LinewidthResult r;
    r.n2_weight = p.q(); // (sqrt(1+a^2) - sign Delta) / (2 sqrt(1+a^2)) == (1 - Delta/Omega)/2
    r.gamma_es = r.n2_weight * gamma_free;
    return r;
}

std::string table_csv(const std::vector<RateEntry>& rows) {
    std::ostringstream out;
    out << "regime,transition,freq_label,freq_value,spont_coeff,stim_coeff,"
           "coherence,validity,active_flag,exact_coeff\n";
    for (const auto& r : rows) {
        const double exact = r.spont_coeff != 0.0 ? r.exact_spont_coeff
                                                  : r.exact_stim_coeff;
        out << r.regime << ',' << r.transition << ',' << to_string(r.freq_label)
            << ',' << format_g9(r.freq_value) << ',' << format_g9(r.spont_coeff)
            << ',' << format_g9(r.stim_coeff) << ',' << to_string(r.coherence)
            << ',' << '"' << r.validity << '"' << ',' << (r.active ? 1 : 0)
            << ',' << format_g9(exact) << '\n';
    }
    return out.str();
}

} // namespace esrad
