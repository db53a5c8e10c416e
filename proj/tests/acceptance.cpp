// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Each check is desk-scale and deterministic.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "esrad/dipole.hpp"
#include "esrad/ensemble.hpp"
#include "esrad/oracle.hpp"
#include "esrad/rates.hpp"

using namespace esrad;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail = {}) {
    std::printf("criterion %2d (%s): %s%s%s\n", id, name, ok ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok)
        ++g_failures;
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i)
        v.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    return v;
}

// Least-squares slope of ln(err) against ln(x), restricted to the smaller
// half of the x values: subleading terms of opposite sign can flatten the
// slope at the large-x edge of the window without changing the true order.
double fit_order(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    const std::size_t use = std::max<std::size_t>(5, pts.size() / 2 + 1);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(use);
    for (std::size_t i = 0; i < use; ++i) {
        const double lx = std::log(pts[i].first);
        const double ly = std::log(std::max(pts[i].second, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// --- criterion 3 helpers: named truncated-vs-exact quantities -------------

struct Quantity {
    std::string name;
    // returns (approx, exact) at the given dressed parameters
    std::function<std::pair<double, double>(const DressedParams&)> eval;
};

std::vector<Quantity> dipole_quantities(AlphaRegime regime, bool sudden) {
    std::vector<Quantity> out;
    struct Slot {
        Element e;
        int dir, h;
    };
    const std::vector<Slot> slots = {
        {Element::E11, -1, -1}, {Element::E11, -1, 0}, {Element::E11, -1, +1},
        {Element::E12, -1, -1}, {Element::E12, -1, 0}, {Element::E12, -1, +1},
        {Element::E21, -1, -1}, {Element::E21, -1, 0}, {Element::E21, -1, +1},
    };
    for (const auto& s : slots) {
        std::ostringstream name;
        name << (sudden ? "sudden" : "adiabatic") << " D" << to_string(s.e)
             << " h=" << s.h;
        out.push_back({name.str(), [s, regime, sudden](const DressedParams& p) {
                           const auto exact = sudden ? sudden_dipoles_exact(p)
                                                     : adiabatic_dipoles(p);
                           const auto approx =
                               sudden ? sudden_dipoles_asymptotic(p, regime)
                                      : adiabatic_dipoles_asymptotic(p, regime);
                           const auto* ec =
                               find_component(exact, s.e, s.dir, s.h);
                           const auto* ac =
                               find_component(approx, s.e, s.dir, s.h);
                           const double ev = ec ? std::abs(ec->coeff) : 0.0;
                           const double av = ac ? std::abs(ac->coeff) : 0.0;
                           return std::make_pair(av, ev);
                       }});
    }
    return out;
}

std::vector<Quantity> rate_quantities(bool sudden) {
    std::vector<Quantity> out;
    const int n_rows = sudden ? 6 : 3;
    for (int i = 0; i < n_rows; ++i) {
        for (const bool stim : {false, true}) {
            std::ostringstream name;
            name << (sudden ? "sudden" : "adiabatic") << " rate row " << i
                 << (stim ? " stim" : " spont");
            out.push_back(
                {name.str(), [i, stim, sudden](const DressedParams& p) {
                     const auto rows =
                         sudden ? sudden_table(p, {}) : adiabatic_table(p, {});
                     const auto& r = rows.at(i);
                     return stim ? std::make_pair(r.stim_coeff,
                                                  r.exact_stim_coeff)
                                 : std::make_pair(r.spont_coeff,
                                                  r.exact_spont_coeff);
                 }});
        }
    }
    return out;
}

// Fitted order of the truncation error in x (= alpha or 1/alpha); quantities
// represented exactly (error at rounding level) count as converged.
bool check_orders(const std::vector<double>& alphas, bool small_regime,
                  std::string& worst_desc) {
    std::vector<Quantity> quantities;
    const auto regime =
        small_regime ? AlphaRegime::SmallAlpha : AlphaRegime::LargeAlpha;
    for (auto& q : dipole_quantities(regime, false))
        quantities.push_back(q);
    for (auto& q : dipole_quantities(regime, true))
        quantities.push_back(q);
    for (auto& q : rate_quantities(false))
        quantities.push_back(q);
    for (auto& q : rate_quantities(true))
        quantities.push_back(q);

    bool ok = true;
    double worst = 1e9;
    for (const auto& q : quantities) {
        for (const double sd : {1.0, -1.0}) {
            std::vector<std::pair<double, double>> pts;
            double max_err = 0.0;
            for (const double a : alphas) {
                const auto p = derive_params(sd, 0.5 * a);
                const auto [approx, exact] = q.eval(p);
                const double scale = std::max(std::abs(exact), 1e-12);
                const double err = std::abs(approx - exact) / scale;
                pts.emplace_back(small_regime ? a : 1.0 / a, err);
                max_err = std::max(max_err, err);
            }
            if (max_err < 1e-12)
                continue; // representation is exact; nothing to fit
            const double order = fit_order(pts);
            if (order < 1.8) {
                ok = false;
                std::ostringstream d;
                d << q.name << " sign " << (sd > 0 ? "+" : "-") << " order "
                  << order;
                worst_desc = d.str();
            }
            worst = std::min(worst, order);
        }
    }
    if (ok) {
        std::ostringstream d;
        d << "min fitted order " << worst;
        worst_desc = d.str();
    }
    return ok;
}

// --- oracle helpers -------------------------------------------------------

bool oracle_matches(double alpha, double sign_delta, double delta_tau,
                    DipoleBasis basis, double tol_rel, double* worst,
                    double* leak) {
    const auto p = derive_params(sign_delta, 0.5 * alpha);
    SwitchingProfile prof;
    prof.kind = ProfileKind::Tanh;
    prof.tau = delta_tau; // |delta| = 1
    prof.t_on = 0.0;
    const double t_end =
        prof.switch_end() + 25.0 * 2.0 * std::numbers::pi / p.omega_rabi;
    const auto m = matrix_element_oracle(p, prof, t_end, 1e-10);
    bool ok = true;
    for (const auto& d : compare_oracle(m, p, basis)) {
        *worst = std::max(*worst, d.rel_dev);
        ok = ok && d.rel_dev < tol_rel;
    }
    if (basis == DipoleBasis::Adiabatic) {
        *leak = std::max({*leak, m.diag(-1), m.diag(+1)});
        ok = ok && m.diag(-1) < 1e-3 && m.diag(+1) < 1e-3;
    }
    return ok;
}

std::string run_cli_capture(const std::string& args, const std::string& out) {
    const std::string cmd =
        std::string(ESRAD_CLI_PATH) + " " + args + " --out " + out;
    const int rc = std::system(cmd.c_str());
    if (WEXITSTATUS(rc) != 0)
        return {};
    std::ifstream f(out, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

int main() {
    using clock = std::chrono::steady_clock;

    { // 1 + 2: normalization and completeness on a 10^4-point grid.
        const auto t0 = clock::now();
        double worst_norm = 0.0, worst_sum = 0.0;
        const auto grid = logspace(1e-4, 1e4, 5000);
        for (const double a : grid) {
            for (const double sd : {1.0, -1.0}) {
                const auto p = derive_params(sd, 0.5 * a);
                worst_norm = std::max(
                    worst_norm,
                    std::abs(p.c1 * p.c1 + std::norm(p.c2) - 1.0));
                const double pq = p.v_mag / p.omega_rabi *
                                  (p.v_mag / p.omega_rabi);
                worst_sum = std::max(
                    worst_sum, std::abs(p.q() * p.q() + p.p() * p.p() +
                                        2.0 * pq - 1.0));
            }
        }
        const double secs =
            std::chrono::duration<double>(clock::now() - t0).count();
        std::ostringstream d1;
        d1 << "max |deviation| " << worst_norm << ", " << secs << " s";
        report(1, "state normalization", worst_norm < 1e-12 && secs < 1.0,
               d1.str());
        std::ostringstream d2;
        d2 << "max |deviation| " << worst_sum;
        report(2, "spectral completeness", worst_sum < 1e-12, d2.str());
    }

    { // 3: convergence order of every truncated coefficient.
        const auto t0 = clock::now();
        std::string detail_small, detail_large;
        const bool ok_small =
            check_orders(logspace(0.01, 0.2, 10), true, detail_small);
        const bool ok_large =
            check_orders(logspace(5.0, 100.0, 10), false, detail_large);
        const double secs =
            std::chrono::duration<double>(clock::now() - t0).count();
        std::ostringstream d;
        d << "small-field: " << detail_small << "; strong-field: "
          << detail_large << "; " << secs << " s";
        report(3, "asymptotic convergence", ok_small && ok_large && secs < 10.0,
               d.str());
    }

    { // 4: slow switching reaches the adiabatic components.
        bool ok = true;
        double worst = 0.0, leak = 0.0;
        for (const double a : {0.3, 1.0, 3.0})
            for (const double sd : {1.0, -1.0})
                ok = oracle_matches(a, sd, 200.0, DipoleBasis::Adiabatic, 0.02,
                                    &worst, &leak) &&
                     ok;
        std::ostringstream d;
        d << "max rel dev " << worst << ", max diagonal sideband leakage "
          << leak;
        report(4, "oracle, slow switching", ok, d.str());
    }

    { // 5: fast switching reaches the transformed components.
        bool ok = true;
        double worst = 0.0, leak = 0.0;
        for (const double a : {0.3, 1.0, 3.0})
            for (const double sd : {1.0, -1.0})
                ok = oracle_matches(a, sd, 0.001, DipoleBasis::Sudden, 0.02,
                                    &worst, &leak) &&
                     ok;
        std::ostringstream d;
        d << "max rel dev " << worst;
        report(5, "oracle, fast switching", ok, d.str());
    }

    { // 6: resonant Rabi calibration.
        const auto p = derive_params(0.0, 0.5);
        SwitchingProfile prof;
        prof.kind = ProfileKind::Step;
        const auto series = propagate(p, prof, psi1(), 30.0, 1e-10);
        double max_err = 0.0;
        for (std::size_t i = 0; i < series.t.size(); ++i)
            max_err = std::max(
                max_err, std::abs(std::norm(series.a[i][1]) -
                                  std::pow(std::sin(p.v_mag * series.t[i]), 2)));
        std::ostringstream d;
        d << "max |error| " << max_err;
        report(6, "resonant Rabi calibration", max_err < 1e-8, d.str());
    }

    { // 7: dressed-state linewidth endpoints.
        const double gamma = 1.0;
        const auto weak = es_linewidth(derive_params(1.0, 0.5e-3), gamma);
        // Approach to Gamma/2 goes like Gamma/(2 alpha); the 1e-6 endpoint
        // check therefore probes alpha = 1e6, with the 1/(2 sqrt(1+alpha^2))
        // rate verified separately at alpha = 1e3.
        const auto strong = es_linewidth(derive_params(1.0, 0.5e6), gamma);
        const auto mid = es_linewidth(derive_params(1.0, 500.0), gamma);
        const double rate_dev =
            std::abs(std::abs(mid.gamma_es - 0.5 * gamma) -
                     gamma / (2.0 * std::sqrt(1.0 + 1e6)));
        const bool ok = weak.gamma_es < 1e-6 * gamma &&
                        std::abs(strong.gamma_es - 0.5 * gamma) < 1e-6 * gamma &&
                        rate_dev < 1e-12 * gamma;
        std::ostringstream d;
        d << "weak " << weak.gamma_es << ", strong-limit deviation "
          << std::abs(strong.gamma_es - 0.5 * gamma);
        report(7, "linewidth endpoints", ok, d.str());
    }

    { // 8: ensemble scaling exponents.
        const auto t0 = clock::now();
        const auto p = derive_params(1.0, 0.5);
        const auto list = adiabatic_dipoles(p);
        const auto* coh = find_component(list, Element::E11, -1, 0);
        const auto* non = find_component(list, Element::E12, -1, +1);
        const std::vector<std::size_t> grid{10, 30, 100, 300, 1000};
        const Eigen::Vector3d k{0.0, 0.0, 1.0};
        const auto rc =
            scaling_exponent(*coh, 0.0, grid, 50.0, k, k, 10000, 424242);
        const auto rn =
            scaling_exponent(*non, 0.0, grid, 50.0, k, k, 10000, 424242);
        const double secs =
            std::chrono::duration<double>(clock::now() - t0).count();
        const bool ok = std::abs(rc.exponent - 2.0) < 0.05 &&
                        std::abs(rn.exponent - 1.0) < 0.05 && secs < 30.0;
        std::ostringstream d;
        d << "coherent exponent " << rc.exponent << ", noncoherent "
          << rn.exponent << ", " << secs << " s";
        report(8, "ensemble scaling", ok, d.str());
    }

    { // 9: coherence classification and qualitative structure.
        bool agree = true;
        unsigned long long seed = 2024;
        for (const double a : {0.1, 1.0, 10.0}) {
            for (const double sd : {1.0, -1.0}) {
                const auto p = derive_params(sd, 0.5 * a, 100.0, 0.3, 0.7, -0.2);
                for (const auto& list :
                     {adiabatic_dipoles(p), sudden_dipoles_exact(p)})
                    for (const auto& c : list)
                        agree = agree && classify_coherence(c) ==
                                             classify_coherence_two_draw(c, ++seed);
            }
        }
        const auto p = derive_params(1.0, 0.5);
        const auto ad = adiabatic_dipoles(p);
        const auto su = sudden_dipoles_exact(p);
        const bool structure =
            find_component(ad, Element::E11, -1, 0)->coherence() ==
                Coherence::Coherent &&
            find_component(ad, Element::E12, -1, -1)->coherence() ==
                Coherence::Noncoherent &&
            find_component(ad, Element::E12, -1, +1)->coherence() ==
                Coherence::Noncoherent &&
            find_component(su, Element::E12, -1, 0)->coherence() ==
                Coherence::Noncoherent &&
            find_component(su, Element::E11, -1, -1)->coherence() ==
                Coherence::Coherent &&
            find_component(su, Element::E11, -1, +1)->coherence() ==
                Coherence::Coherent;
        report(9, "coherence classification", agree && structure,
               agree ? "two-draw agreement 100%" : "two-draw disagreement");
    }

    { // 10: CLI determinism.
        bool ok = true;
        int idx = 0;
        for (const std::string args :
             {std::string("params --alpha-grid 0.01:100:25log"),
              std::string("table --regime sudden alpha=0.2 n_upper=1"),
              std::string("ensemble trials=500 n_grid=10,30,100 --seed 99"),
              std::string("oracle alpha=0.5 delta_tau=0.001"),
              std::string("audit --format json")}) {
            const std::string base = "/tmp/esrad_acc_" + std::to_string(idx++);
            const auto a = run_cli_capture(args, base + "_a");
            const auto b = run_cli_capture(args, base + "_b");
            ok = ok && !a.empty() && a == b;
        }
        report(10, "command-line determinism", ok);
    }

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
