#include "esrad/oracle.hpp"

#include <cmath>
#include <numbers>

namespace esrad {

namespace {

using Vec2 = Eigen::Vector2cd;

struct Rhs {
    complexd v;   // interaction matrix element |V| e^{i phi0}
    double delta;
    const SwitchingProfile* profile;

    Vec2 operator()(double t, const Vec2& a) const {
        const double f = profile->envelope(t);
        const complexd vt = v * f;
        // da/dt = -i H a
        return {complexd{0.0, -1.0} * (vt * a[1]),
                complexd{0.0, -1.0} * (std::conj(vt) * a[0] + delta * a[1])};
    }
};

// Dormand-Prince 5(4) step; returns the 5th-order solution and the embedded
// error estimate.
void dp45_step(const Rhs& rhs, double t, const Vec2& y, double h, Vec2& y5,
               Vec2& err) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    const Vec2 k1 = rhs(t, y);
    const Vec2 k2 = rhs(t + c2 * h, y + h * (1.0 / 5 * k1));
    const Vec2 k3 = rhs(t + c3 * h, y + h * (3.0 / 40 * k1 + 9.0 / 40 * k2));
    const Vec2 k4 = rhs(t + c4 * h,
                        y + h * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3));
    const Vec2 k5 =
        rhs(t + c5 * h, y + h * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 +
                                 64448.0 / 6561 * k3 - 212.0 / 729 * k4));
    const Vec2 k6 =
        rhs(t + h, y + h * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 +
                            46732.0 / 5247 * k3 + 49.0 / 176 * k4 -
                            5103.0 / 18656 * k5));
    y5 = y + h * (35.0 / 384 * k1 + 500.0 / 1113 * k3 + 125.0 / 192 * k4 -
                  2187.0 / 6784 * k5 + 11.0 / 84 * k6);
    const Vec2 k7 = rhs(t + h, y5);
    const Vec2 y4 = y + h * (5179.0 / 57600 * k1 + 7571.0 / 16695 * k3 +
                             393.0 / 640 * k4 - 92097.0 / 339200 * k5 +
                             187.0 / 2100 * k6 + 1.0 / 40 * k7);
    err = y5 - y4;
}

double error_norm(const Vec2& err, const Vec2& y, double tol) {
    double m = 0.0;
    for (int i = 0; i < 2; ++i)
        m = std::max(m, std::abs(err[i]) / (tol + tol * std::abs(y[i])));
    return m;
}

} // namespace

double SwitchingProfile::envelope(double t) const {
    switch (kind) {
    case ProfileKind::Tanh:
        return 0.5 * (1.0 + std::tanh((t - t_on) / tau));
    case ProfileKind::Exponential:
        return t < t_on ? 0.5 * std::exp((t - t_on) / tau)
                        : 1.0 - 0.5 * std::exp(-(t - t_on) / tau);
    case ProfileKind::Step:
        return t >= t_on ? 1.0 : 0.0;
    }
    return 0.0;
}

double SwitchingProfile::switch_start() const {
    return kind == ProfileKind::Step ? t_on : t_on - 10.0 * tau;
}

double SwitchingProfile::switch_end() const {
    return kind == ProfileKind::Step ? t_on : t_on + 10.0 * tau;
}

TimeSeries propagate(const DressedParams& params, const SwitchingProfile& profile,
                     const Eigen::Vector2cd& initial, double t_end, double tol,
                     std::size_t n_samples) {
    if (tol < 1e-12 || tol > 1e-6)
        throw ConfigError("tol must lie in [1e-12, 1e-6]");
    if (profile.kind != ProfileKind::Step && !(profile.tau > 0.0))
        throw ConfigError("profile tau must be > 0");
    const double t0 = profile.switch_start();
    if (!(t_end > t0))
        throw ConfigError("t_end must exceed the switch start");
    if (n_samples < 16)
        throw ConfigError("n_samples too small");

    Rhs rhs{params.v_mag * std::exp(complexd{0.0, params.phi0}), params.delta,
            &profile};

    TimeSeries out;
    out.t.resize(n_samples);
    out.a.resize(n_samples);
    const double dt = (t_end - t0) / static_cast<double>(n_samples - 1);

    double t = t0;
    Vec2 y = initial;
    const double norm0 = y.norm();
    out.t[0] = t;
    out.a[0] = y;

    double h = dt;
    const double h_min = 1e-14 * (t_end - t0);
    Vec2 y5, err;
    for (std::size_t s = 1; s < n_samples; ++s) {
        const double target = t0 + dt * static_cast<double>(s);
        while (t < target) {
            h = std::min(h, target - t);
            dp45_step(rhs, t, y, h, y5, err);
            const double e = error_norm(err, y, tol);
            if (e <= 1.0) {
                t += h;
                y = y5;
                h *= std::clamp(0.9 * std::pow(std::max(e, 1e-10), -0.2), 1.0, 5.0);
            } else {
                h *= std::max(0.9 * std::pow(e, -0.2), 0.2);
                if (h < h_min)
                    throw NumericalError("integration failure: step-size underflow");
            }
        }
        out.t[s] = target;
        out.a[s] = y;
        out.max_norm_drift =
            std::max(out.max_norm_drift, std::abs(y.norm() - norm0));
    }
    return out;
}

namespace {

struct ExpFit {
    complexd c0, cp, cm; // coefficients of 1, e^{i Om t}, e^{-i Om t}
    double rms = 0.0;
};

ExpFit fit_three_exponentials(const std::vector<double>& t,
                              const std::vector<complexd>& g, double omega_rabi) {
    const std::size_t n = t.size();
    Eigen::Matrix3cd ata = Eigen::Matrix3cd::Zero();
    Eigen::Vector3cd atb = Eigen::Vector3cd::Zero();
    for (std::size_t j = 0; j < n; ++j) {
        const complexd ep = std::exp(complexd{0.0, omega_rabi * t[j]});
        const Eigen::Vector3cd row{complexd{1.0, 0.0}, ep, std::conj(ep)};
        ata += row.conjugate() * row.transpose(); // B^H B
        atb += row.conjugate() * g[j];            // B^H g
    }
    Eigen::JacobiSVD<Eigen::Matrix3cd> svd(ata, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double cond = svd.singularValues()(0) /
                        std::max(svd.singularValues()(2), 1e-300);
    if (cond > 1e10)
        throw NumericalError("ill-conditioned spectral fit (window too short?)");
    const Eigen::Vector3cd c = svd.solve(atb);

    ExpFit f;
    f.c0 = c(0);
    f.cp = c(1);
    f.cm = c(2);
    double ss = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const complexd ep = std::exp(complexd{0.0, omega_rabi * t[j]});
        ss += std::norm(g[j] - (f.c0 + f.cp * ep + f.cm * std::conj(ep)));
    }
    f.rms = std::sqrt(ss / static_cast<double>(n));
    return f;
}

struct WindowSeries {
    std::vector<double> t;
    std::vector<complexd> g;
};

WindowSeries coherence_in_window(const TimeSeries& x, const TimeSeries& y,
                                 double w0, double w1) {
    WindowSeries w;
    for (std::size_t j = 0; j < x.t.size(); ++j) {
        if (x.t[j] < w0 || x.t[j] > w1)
            continue;
        w.t.push_back(x.t[j]);
        w.g.push_back(std::conj(x.a[j][0]) * y.a[j][1]);
    }
    if (w.t.size() < 12)
        throw NumericalError("fit window contains too few samples");
    return w;
}

double refine_omega_rabi(const WindowSeries& w, double omega0) {
    // Golden-section on the fit residual; the landscape is smooth and
    // single-welled near the true frequency when sidebands are present.
    const double gr = 0.61803398874989484820;
    double a = 0.95 * omega0, b = 1.05 * omega0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = fit_three_exponentials(w.t, w.g, x1).rms;
    double f2 = fit_three_exponentials(w.t, w.g, x2).rms;
    for (int i = 0; i < 80 && (b - a) > 1e-9 * omega0; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = fit_three_exponentials(w.t, w.g, x1).rms;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = fit_three_exponentials(w.t, w.g, x2).rms;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

OracleResult extract_components(const TimeSeries& series,
                                const DressedParams& params,
                                double window_start, double window_end,
                                bool refine_omega) {
    const auto w = coherence_in_window(series, series, window_start, window_end);

    double omega_fit = params.omega_rabi;
    ExpFit f = fit_three_exponentials(w.t, w.g, omega_fit);
    if (refine_omega) {
        const double side = std::norm(f.cp) + std::norm(f.cm);
        const double total = side + std::norm(f.c0);
        if (total > 0.0 && side / total > 1e-6) {
            omega_fit = refine_omega_rabi(w, params.omega_rabi);
            f = fit_three_exponentials(w.t, w.g, omega_fit);
        }
    }

    // Population-difference cross-check against the same model.
    std::vector<complexd> pd;
    pd.reserve(w.t.size());
    for (std::size_t j = 0; j < series.t.size(); ++j) {
        if (series.t[j] < window_start || series.t[j] > window_end)
            continue;
        pd.push_back(complexd{std::norm(series.a[j][0]) - std::norm(series.a[j][1]), 0.0});
    }
    const ExpFit fpd = fit_three_exponentials(w.t, pd, omega_fit);

    OracleResult r;
    r.amp_at["omega"] = f.c0;
    r.amp_at["omega-Omega"] = f.cp; // e^{+i Om t} e^{-i w t} = e^{-i(w-Om)t}
    r.amp_at["omega+Omega"] = f.cm;
    r.residual = f.rms;
    r.pop_residual = fpd.rms;
    r.omega_rabi_fitted = omega_fit;
    return r;
}

MatrixOracleResult matrix_element_oracle(const DressedParams& params,
                                         const SwitchingProfile& profile,
                                         double t_end, double tol,
                                         std::size_t n_samples) {
    const TimeSeries u = propagate(params, profile, psi1(), t_end, tol, n_samples);
    const TimeSeries w = propagate(params, profile, psi2(), t_end, tol, n_samples);

    const double rabi_period = 2.0 * std::numbers::pi / params.omega_rabi;
    const double w0 = profile.switch_end() + rabi_period;
    const double w1 = t_end;

    MatrixOracleResult r;
    r.max_norm_drift = std::max(u.max_norm_drift, w.max_norm_drift);
    const TimeSeries* runs[2] = {&u, &w};
    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) {
            const auto ws = coherence_in_window(*runs[i], *runs[k], w0, w1);
            const ExpFit f = fit_three_exponentials(ws.t, ws.g, params.omega_rabi);
            r.amp[i][k][0] = std::abs(f.cp); // omega - Omega
            r.amp[i][k][1] = std::abs(f.c0); // omega
            r.amp[i][k][2] = std::abs(f.cm); // omega + Omega
            r.residual = std::max(r.residual, f.rms);
        }
    }
    return r;
}

std::vector<OracleDeviation> compare_oracle(const MatrixOracleResult& oracle,
                                            const DressedParams& params,
                                            DipoleBasis basis) {
    const auto comps = basis == DipoleBasis::Adiabatic
                           ? adiabatic_dipoles(params)
                           : sudden_dipoles_exact(params);
    auto modulus = [&comps](Element e, int h) {
        const auto* c = find_component(comps, e, -1, h);
        return c ? std::abs(c->coeff) : 0.0;
    };

    std::vector<OracleDeviation> rows;
    for (int h = -1; h <= 1; ++h) {
        OracleDeviation d;
        d.what = "diagonal";
        d.harmonic = h;
        d.oracle_amp = oracle.diag(h);
        d.analytic_amp = modulus(Element::E11, h);
        rows.push_back(d);

        OracleDeviation o;
        o.what = "offdiagonal";
        o.harmonic = h;
        o.oracle_amp = oracle.offdiag_rss(h);
        o.analytic_amp = std::hypot(modulus(Element::E12, h), modulus(Element::E21, h));
        rows.push_back(o);
    }
    for (auto& d : rows) {
        if (d.analytic_amp > 1e-6) {
            d.rel_dev = std::abs(d.oracle_amp - d.analytic_amp) / d.analytic_amp;
        } else {
            d.rel_dev = d.oracle_amp; // leakage, absolute units of |d|
            d.absolute = true;
        }
    }
    return rows;
}

} // namespace esrad
