#pragma once

#include <vector>

#include "esrad/dressed.hpp"

namespace esrad {

enum class Element { E11, E12, E21, E22 };
enum class DipoleBasis { Adiabatic, Sudden };
enum class Coherence { Coherent, Noncoherent };
enum class AlphaRegime { SmallAlpha, LargeAlpha };

const char* to_string(Element e);
const char* to_string(DipoleBasis b);
const char* to_string(Coherence c);

// One spectral term of a dressed dipole matrix element, in units of |d|.
// The term's time dependence is coeff * e^{i(a phi + m (phi1-phi2))} * e^{i freq t}
// with freq = dir*(omega + harmonic*Omega).  Terms with freq < 0 (dir = -1)
// form the negative-frequency (emission) part d^-.
struct DipoleComponent {
    Element element = Element::E11;
    DipoleBasis basis = DipoleBasis::Adiabatic;
    int dir = -1;      // +1 or -1
    int harmonic = 0;  // -1, 0, +1 -> freq offset -Omega, 0, +Omega
    complexd coeff{0.0, 0.0};
    int field_exp = 0; // a, power of e^{i phi}
    int phase_exp = 0; // m, net power of e^{i(phi1-phi2)}

    double freq(const DressedParams& p) const {
        return dir * (p.omega + harmonic * p.omega_rabi);
    }
    // Full complex amplitude at the given phases.
    complexd amp(double phi, double phi1, double phi2) const {
        return coeff * std::exp(complexd{0.0, field_exp * phi + phase_exp * (phi1 - phi2)});
    }
    complexd amp(const DressedParams& p) const {
        return amp(p.phi_field, p.phi_rand, 0.0);
    }
    Coherence coherence() const {
        return phase_exp == 0 ? Coherence::Coherent : Coherence::Noncoherent;
    }
};

// Exact dressed dipole in the adiabatic basis: D11, D12 and their
// Hermitian/diagonal partners D21 = D12*, D22 = -D11.
std::vector<DipoleComponent> adiabatic_dipoles(const DressedParams& params);

// Exact sudden-basis dipole, obtained by the unitary congruence
// D' = M* D M^T per spectral frequency with M = basis_transform coefficients.
std::vector<DipoleComponent> sudden_dipoles_exact(const DressedParams& params);

// Truncated asymptotic forms.  Warnings (alpha in the uncontrolled band
// [0.5, 2]) are appended to *warnings when provided.
std::vector<DipoleComponent> adiabatic_dipoles_asymptotic(
    const DressedParams& params, AlphaRegime regime,
    std::vector<std::string>* warnings = nullptr);
std::vector<DipoleComponent> sudden_dipoles_asymptotic(
    const DressedParams& params, AlphaRegime regime,
    std::vector<std::string>* warnings = nullptr);

Coherence classify_coherence(const DipoleComponent& component);

// Independent check: evaluate the amplitude at two random phase draws and
// compare.  Agrees with classify_coherence for every generated component.
Coherence classify_coherence_two_draw(const DipoleComponent& component,
                                      unsigned long long seed);

// Lookup helper; returns nullptr when the component is absent (amplitude
// below the drop threshold).
const DipoleComponent* find_component(const std::vector<DipoleComponent>& list,
                                      Element element, int dir, int harmonic);

} // namespace esrad
