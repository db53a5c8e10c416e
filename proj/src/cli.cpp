#include "esrad/cli.hpp"

#include <clocale>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "esrad/dipole.hpp"
#include "esrad/dressed.hpp"
#include "esrad/ensemble.hpp"
#include "esrad/io.hpp"
#include "esrad/oracle.hpp"
#include "esrad/rates.hpp"

namespace esrad::cli {

namespace {

using json = nlohmann::ordered_json;

// Round-trip doubles through the 9-significant-digit formatter so JSON and
// CSV outputs agree digit for digit.
json jnum(double v) {
    if (!std::isfinite(v))
        return format_g9(v);
    return std::strtod(format_g9(v).c_str(), nullptr);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': '" + value +
                          "' is not a number");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': '" + value +
                          "' is not a nonnegative integer");
    }
}

void check_choice(const std::string& key, const std::string& value,
                  std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (value == a)
            return;
    std::string msg = "config key '" + key + "': '" + value + "' not one of {";
    bool first = true;
    for (const char* a : allowed) {
        if (!first)
            msg += ", ";
        msg += a;
        first = false;
    }
    throw ConfigError(msg + "}");
}

DressedParams resolve_params(const RunConfig& cfg) {
    double vmag = cfg.vmag;
    if (cfg.have_alpha) {
        if (cfg.delta == 0.0)
            throw ConfigError("alpha cannot set the coupling when delta = 0; "
                              "set vmag directly");
        if (cfg.alpha < 0.0)
            throw ConfigError("alpha must be >= 0");
        vmag = 0.5 * cfg.alpha * std::abs(cfg.delta);
    }
    return derive_params(cfg.delta, vmag, cfg.omega, cfg.phi, cfg.phi1, cfg.phi2);
}

std::vector<std::size_t> parse_n_grid(const std::string& spec) {
    std::vector<std::size_t> grid;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        grid.push_back(static_cast<std::size_t>(parse_u64("n_grid", item)));
    }
    if (grid.empty())
        throw ConfigError("n_grid: empty atom-count list");
    return grid;
}

std::string alpha_str(const DressedParams& p) {
    return p.alpha_infinite ? "inf" : format_g9(p.alpha);
}

json params_row_json(const DressedParams& p) {
    json row;
    row["alpha"] = p.alpha_infinite ? json("inf") : jnum(p.alpha);
    row["delta"] = jnum(p.delta);
    row["vmag"] = jnum(p.v_mag);
    row["phi0"] = jnum(p.phi0);
    row["omega_rabi"] = jnum(p.omega_rabi);
    row["lambda1"] = jnum(p.lambda1);
    row["c1"] = jnum(p.c1);
    row["re_c2"] = jnum(p.c2.real());
    row["im_c2"] = jnum(p.c2.imag());
    row["outside_model_validity"] = p.outside_model_validity;
    return row;
}

void params_row_csv(std::ostream& out, const DressedParams& p) {
    out << alpha_str(p) << ',' << format_g9(p.delta) << ',' << format_g9(p.v_mag)
        << ',' << format_g9(p.phi0) << ',' << format_g9(p.omega_rabi) << ','
        << format_g9(p.lambda1) << ',' << format_g9(p.c1) << ','
        << format_g9(p.c2.real()) << ',' << format_g9(p.c2.imag()) << ','
        << (p.outside_model_validity ? 1 : 0) << '\n';
}

json component_json(const DipoleComponent& c, const DressedParams& p) {
    json row;
    row["element"] = to_string(c.element);
    row["basis"] = to_string(c.basis);
    row["dir"] = c.dir;
    row["harmonic"] = c.harmonic;
    row["freq"] = jnum(c.freq(p));
    row["re_amp"] = jnum(c.amp(p).real());
    row["im_amp"] = jnum(c.amp(p).imag());
    row["field_exponent"] = c.field_exp;
    row["phase_exponent"] = c.phase_exp;
    row["coherence"] = to_string(c.coherence());
    return row;
}

SwitchingProfile resolve_profile(const RunConfig& cfg, const DressedParams& p) {
    SwitchingProfile prof;
    prof.kind = cfg.profile == "tanh" ? ProfileKind::Tanh
              : cfg.profile == "exp"  ? ProfileKind::Exponential
                                      : ProfileKind::Step;
    const double scale = p.delta != 0.0 ? std::abs(p.delta) : p.omega_rabi;
    prof.tau = cfg.delta_tau / scale;
    prof.t_on = 0.0;
    return prof;
}

struct Finding {
    std::string id;
    std::string description;
    double measure = 0.0; // relative size of the discrepancy the finding reports
    std::vector<std::string> evidence;
};

std::vector<Finding> run_audit() {
    std::vector<Finding> findings;
    const auto g9 = [](double v) { return format_g9(v); };

    { // Small-field sideband-shift factor in the quoted frequency curve.
        const double a_fit = 1e-4;
        const double c_fit =
            (std::sqrt(1.0 + a_fit * a_fit) - 1.0) / (a_fit * a_fit);
        const double c_quoted = 1.0;
        const double a = 0.3;
        const double exact_shift = std::sqrt(1.0 + a * a);
        const double quoted_shift = 1.0 + a * a;
        Finding f;
        f.id = "sideband-shift-small-alpha-factor";
        f.description =
            "the quoted small-alpha sideband shift factor (1 + alpha^2) "
            "overshoots the exact expansion (1 + alpha^2/2): the coefficient "
            "of alpha^2 should be 1/2, not 1";
        f.measure = std::abs(c_quoted - c_fit) / c_fit;
        f.evidence.push_back("fitted alpha^2 coefficient of Omega/|Delta| - 1 at "
                             "alpha -> 0: " + g9(c_fit) + " (quoted: 1)");
        f.evidence.push_back("alpha = 0.3: exact shift factor " + g9(exact_shift) +
                             ", quoted " + g9(quoted_shift) + ", excess " +
                             g9(quoted_shift - exact_shift) +
                             " ~ alpha^2/2 = " + g9(0.5 * a * a));
        findings.push_back(std::move(f));
    }

    { // Detuning-sign labels on the small-field coherent lower-sideband lines.
        const double a = 0.1;
        const auto pp_pos = derive_params(1.0, 0.5 * a);
        const auto pp_neg = derive_params(-1.0, 0.5 * a);
        const double exact_pos =
            pp_pos.p() * std::pow(pp_pos.q(), 3); // lower sideband, Delta > 0
        const double exact_neg = pp_neg.p() * std::pow(pp_neg.q(), 3);
        const double quoted_a6 = std::pow(a, 6) / 64.0;
        const double quoted_big = 0.25 * a * a * (1.0 - 0.5 * a * a);
        Finding f;
        f.id = "coherent-lower-sideband-sign-labels";
        f.description =
            "the two quoted small-alpha coefficients for the coherent "
            "lower-sideband spontaneous line carry detuning-sign conditions "
            "that match the exact values only when interchanged: alpha^6/64 "
            "belongs to Delta > 0 and (alpha^2/4)(1 - alpha^2/2) to Delta < 0";
        f.measure = std::abs(quoted_big - exact_pos) /
                    std::max(exact_pos, exact_neg);
        f.evidence.push_back("alpha = 0.1, Delta > 0: exact " + g9(exact_pos) +
                             " vs alpha^6/64 = " + g9(quoted_a6) +
                             " (rel err " +
                             g9(std::abs(exact_pos - quoted_a6) / exact_pos) + ")");
        f.evidence.push_back("alpha = 0.1, Delta < 0: exact " + g9(exact_neg) +
                             " vs (alpha^2/4)(1-alpha^2/2) = " + g9(quoted_big) +
                             " (rel err " +
                             g9(std::abs(exact_neg - quoted_big) / exact_neg) + ")");
        f.evidence.push_back("swapped assignment mismatches by a factor " +
                             g9(quoted_big / exact_pos));
        findings.push_back(std::move(f));
    }

    { // Which mode occupation drives the upper-sideband stimulated term.
        const double a = 0.1;
        const auto p = derive_params(-1.0, 0.5 * a);
        ProbeOccupation n;
        auto rows = sudden_table(p, n);
        const RateEntry* hi = nullptr;
        for (const auto& r : rows)
            if (r.freq_label == FreqLabel::Upper &&
                r.coherence == Coherence::Noncoherent)
                hi = &r;
        Finding f;
        f.id = "upper-sideband-occupation-argument";
        f.description =
            "one quoted noncoherent upper-sideband line writes its stimulated "
            "occupation at the central frequency; the exact net rate pairs the "
            "stimulated coefficient with the occupation of the omega+Omega "
            "mode itself";
        f.measure = hi ? std::abs(hi->exact_stim_coeff) / hi->exact_spont_coeff
                       : 0.0;
        if (hi) {
            f.evidence.push_back(
                "alpha = 0.1, Delta < 0: exact stimulated coefficient at "
                "omega+Omega is " + g9(hi->exact_stim_coeff) +
                " ~ alpha^4/16 = " + g9(std::pow(a, 4) / 16.0) +
                ", identical in form to the quoted bracket coefficient");
            f.evidence.push_back(
                "reading the occupation at the central line instead shifts the "
                "net rate by " + g9(std::abs(hi->exact_stim_coeff)) +
                " per photon, 100% of the spontaneous coefficient " +
                g9(hi->exact_spont_coeff));
        }
        findings.push_back(std::move(f));
    }

    { // Bracket structure: the small coefficient multiplies (n + 1).
        const double a = 0.1;
        const auto p = derive_params(1.0, 0.5 * a);
        ProbeOccupation n;
        auto rows = sudden_table(p, n);
        const RateEntry* hi = nullptr;
        for (const auto& r : rows)
            if (r.freq_label == FreqLabel::Upper &&
                r.coherence == Coherence::Noncoherent)
                hi = &r;
        Finding f;
        f.id = "upper-sideband-bracket-structure";
        f.description =
            "the quoted upper-sideband bracket can be read with alpha^4/16 as "
            "a spontaneous-only term; the exact stimulated coefficient "
            "P^2Q^2 - P^4 shows the alpha^4/16 piece multiplies (n + 1): "
            "stimulated emission and spontaneous emission share it";
        if (hi) {
            const double shared = hi->exact_stim_coeff + p.p() * p.p() * p.p() * p.p();
            f.measure = std::abs(shared) / hi->exact_spont_coeff;
            f.evidence.push_back("alpha = 0.1, Delta > 0: exact stimulated "
                                 "coefficient " + g9(hi->exact_stim_coeff) +
                                 " = -P^4 + " + g9(shared));
            f.evidence.push_back("the residual " + g9(shared) +
                                 " equals the spontaneous coefficient " +
                                 g9(hi->exact_spont_coeff) + " to " +
                                 g9(std::abs(shared - hi->exact_spont_coeff)));
        }
        findings.push_back(std::move(f));
    }

    { // Phase pairing in the quoted diagonal cross terms.
        const auto p = derive_params(1.0, 0.1); // alpha = 0.2
        const auto sud = sudden_dipoles_exact(p);
        const auto* side = find_component(sud, Element::E11, -1, +1);
        Finding f;
        f.id = "diagonal-cross-term-phase-pairing";
        f.description =
            "the quoted small-alpha diagonal element pairs the interaction "
            "phase with the 2->1 cross element, which would leave a random "
            "relative phase in the term; the exact congruence pairs it with "
            "the 1->2 element and the term is phase-free (coherent)";
        if (side) {
            f.measure = 1.0; // binary classification flip, amplitude-weighted below
            f.evidence.push_back("alpha = 0.2, Delta > 0: exact diagonal "
                                 "upper-sideband modulus " +
                                 g9(std::abs(side->coeff)) +
                                 ", random-phase exponent " +
                                 std::to_string(side->phase_exp) + " (coherent)");
            f.evidence.push_back(
                "the literal pairing carries random-phase exponent -2 "
                "(noncoherent); two-draw classification confirms the exact "
                "term is draw-independent");
        }
        findings.push_back(std::move(f));
    }

    return findings;
}

void write_output(const RunConfig& cfg, const std::string& doc) {
    if (cfg.out_path.empty()) {
        std::cout << doc;
        return;
    }
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot open output file: " + cfg.out_path);
    out << doc;
    if (!out)
        throw NumericalError("write failed: " + cfg.out_path);
}

} // namespace

RunConfig make_config(const std::map<std::string, std::string>& file_keys) {
    RunConfig cfg;
    for (const auto& [key, value] : file_keys) {
        if (key == "omega") cfg.omega = parse_double(key, value);
        else if (key == "delta") cfg.delta = parse_double(key, value);
        else if (key == "vmag") cfg.vmag = parse_double(key, value);
        else if (key == "alpha") {
            cfg.alpha = parse_double(key, value);
            cfg.have_alpha = true;
        }
        else if (key == "phi") cfg.phi = parse_double(key, value);
        else if (key == "phi1") cfg.phi1 = parse_double(key, value);
        else if (key == "phi2") cfg.phi2 = parse_double(key, value);
        else if (key == "n_lower") cfg.n_lower = parse_double(key, value);
        else if (key == "n_center") cfg.n_center = parse_double(key, value);
        else if (key == "n_upper") cfg.n_upper = parse_double(key, value);
        else if (key == "regime") cfg.regime = value;
        else if (key == "exact") cfg.exact_mode = parse_u64(key, value) != 0;
        else if (key == "alpha_grid") cfg.alpha_grid = value;
        else if (key == "profile") cfg.profile = value;
        else if (key == "delta_tau") cfg.delta_tau = parse_double(key, value);
        else if (key == "tol") cfg.tol = parse_double(key, value);
        else if (key == "periods_after") cfg.periods_after = parse_double(key, value);
        else if (key == "n_grid") cfg.n_grid = value;
        else if (key == "trials") cfg.trials = parse_u64(key, value);
        else if (key == "cube_side") cfg.cube_side = parse_double(key, value);
        else if (key == "direction_cos") cfg.direction_cos = parse_double(key, value);
        else if (key == "component") cfg.component = value;
        else if (key == "seed") cfg.seed = parse_u64(key, value);
        else if (key == "audit_tol") cfg.audit_tol = parse_double(key, value);
        else if (key == "format") cfg.format = value;
        else if (key == "out") cfg.out_path = value;
        else if (key == "gamma") cfg.gamma_free = parse_double(key, value);
        else
            throw ConfigError("unknown config key '" + key + "'");
    }

    check_choice("regime", cfg.regime, {"adiabatic", "sudden"});
    check_choice("format", cfg.format, {"csv", "json"});
    check_choice("profile", cfg.profile, {"tanh", "exp", "step"});
    check_choice("component", cfg.component, {"coherent", "noncoherent"});
    if (!(cfg.omega > 0.0))
        throw ConfigError("omega must be > 0");
    if (cfg.vmag < 0.0)
        throw ConfigError("vmag must be >= 0");
    if (!(cfg.delta_tau > 0.0))
        throw ConfigError("delta_tau must be > 0");
    if (!(cfg.periods_after > 0.0))
        throw ConfigError("periods_after must be > 0");
    if (cfg.trials < 1)
        throw ConfigError("trials must be >= 1");
    if (!(cfg.cube_side > 0.0))
        throw ConfigError("cube_side must be > 0");
    if (std::abs(cfg.direction_cos) > 1.0)
        throw ConfigError("direction_cos must lie in [-1, 1]");
    if (cfg.n_lower < 0.0 || cfg.n_center < 0.0 || cfg.n_upper < 0.0)
        throw ConfigError("probe occupations must be >= 0");
    if (!(cfg.audit_tol > 0.0))
        throw ConfigError("audit_tol must be > 0");
    if (cfg.gamma_free < 0.0)
        throw ConfigError("gamma must be >= 0");
    return cfg;
}

std::string params_output(const RunConfig& cfg) {
    std::vector<DressedParams> rows;
    if (cfg.alpha_grid.empty()) {
        rows.push_back(resolve_params(cfg));
    } else {
        const double dmag = std::abs(cfg.delta);
        if (dmag == 0.0)
            throw ConfigError("alpha_grid sweep requires delta != 0");
        for (double a : parse_grid(cfg.alpha_grid))
            rows.push_back(derive_params(cfg.delta, 0.5 * a * dmag, cfg.omega,
                                         cfg.phi, cfg.phi1, cfg.phi2));
    }

    if (cfg.format == "json") {
        json doc = json::array();
        for (const auto& p : rows)
            doc.push_back(params_row_json(p));
        return doc.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "alpha,delta,vmag,phi0,omega_rabi,lambda1,c1,re_c2,im_c2,"
           "outside_model_validity\n";
    for (const auto& p : rows)
        params_row_csv(out, p);
    return out.str();
}

std::string fig1_output(const RunConfig& cfg) {
    const std::string grid_spec =
        cfg.alpha_grid.empty() ? "0.01:100:61log" : cfg.alpha_grid;
    const double dmag = std::abs(cfg.delta);
    if (dmag == 0.0)
        throw ConfigError("sideband sweep requires delta != 0");
    const double sd = cfg.delta < 0.0 ? -1.0 : 1.0;

    struct Row {
        double alpha, lo, hi, slo, shi, llo, lhi;
        double r_slo, r_shi, r_llo, r_lhi, excess;
    };
    std::vector<Row> rows;
    for (double a : parse_grid(grid_spec)) {
        Row r{};
        r.alpha = a;
        const double om = dmag * std::sqrt(1.0 + a * a);
        r.lo = cfg.omega - om;
        r.hi = cfg.omega + om;
        const double small = dmag * (1.0 + a * a);
        r.slo = cfg.omega - small;
        r.shi = cfg.omega + small;
        const double large = a * dmag + sd * dmag / (2.0 * a);
        r.llo = cfg.omega - large;
        r.lhi = cfg.omega + large;
        const auto rel = [](double approx, double exact) {
            const double d = std::abs(approx - exact);
            return exact != 0.0 ? d / std::abs(exact) : d;
        };
        r.r_slo = rel(r.slo, r.lo);
        r.r_shi = rel(r.shi, r.hi);
        r.r_llo = rel(r.llo, r.lo);
        r.r_lhi = rel(r.lhi, r.hi);
        r.excess = std::abs(small - om); // ~ alpha^2/2 |Delta| at small alpha
        rows.push_back(r);
    }

    if (cfg.format == "json") {
        json doc = json::array();
        for (const auto& r : rows) {
            json j;
            j["alpha"] = jnum(r.alpha);
            j["omega_minus"] = jnum(r.lo);
            j["omega_plus"] = jnum(r.hi);
            j["small_caption_minus"] = jnum(r.slo);
            j["small_caption_plus"] = jnum(r.shi);
            j["large_caption_minus"] = jnum(r.llo);
            j["large_caption_plus"] = jnum(r.lhi);
            j["relerr_small_minus"] = jnum(r.r_slo);
            j["relerr_small_plus"] = jnum(r.r_shi);
            j["relerr_large_minus"] = jnum(r.r_llo);
            j["relerr_large_plus"] = jnum(r.r_lhi);
            j["small_shift_excess"] = jnum(r.excess);
            doc.push_back(j);
        }
        return doc.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "alpha,omega_minus,omega_plus,small_caption_minus,small_caption_plus,"
           "large_caption_minus,large_caption_plus,relerr_small_minus,"
           "relerr_small_plus,relerr_large_minus,relerr_large_plus,"
           "small_shift_excess\n";
    for (const auto& r : rows)
        out << format_g9(r.alpha) << ',' << format_g9(r.lo) << ','
            << format_g9(r.hi) << ',' << format_g9(r.slo) << ','
            << format_g9(r.shi) << ',' << format_g9(r.llo) << ','
            << format_g9(r.lhi) << ',' << format_g9(r.r_slo) << ','
            << format_g9(r.r_shi) << ',' << format_g9(r.r_llo) << ','
            << format_g9(r.r_lhi) << ',' << format_g9(r.excess) << '\n';
    return out.str();
}

std::string table_output(const RunConfig& cfg) {
    const auto p = resolve_params(cfg);
    ProbeOccupation n;
    n.at_lower = cfg.n_lower;
    n.at_center = cfg.n_center;
    n.at_upper = cfg.n_upper;
    std::vector<std::string> warnings;
    auto rows = cfg.regime == "adiabatic" ? adiabatic_table(p, n, &warnings)
                                          : sudden_table(p, n, &warnings);
    if (cfg.exact_mode) {
        for (auto& r : rows) {
            r.spont_coeff = r.exact_spont_coeff;
            r.stim_coeff = r.exact_stim_coeff;
        }
    }

    if (cfg.format == "json") {
        json doc;
        doc["regime"] = cfg.regime;
        doc["alpha"] = p.alpha_infinite ? json("inf") : jnum(p.alpha);
        doc["delta"] = jnum(p.delta);
        doc["warnings"] = warnings;
        json jrows = json::array();
        for (const auto& r : rows) {
            json j;
            j["regime"] = r.regime;
            j["transition"] = r.transition;
            j["freq_label"] = to_string(r.freq_label);
            j["freq_value"] = jnum(r.freq_value);
            j["direction"] = to_string(r.direction);
            j["spont_coeff"] = jnum(r.spont_coeff);
            j["stim_coeff"] = jnum(r.stim_coeff);
            j["exact_spont_coeff"] = jnum(r.exact_spont_coeff);
            j["exact_stim_coeff"] = jnum(r.exact_stim_coeff);
            j["coherence"] = to_string(r.coherence);
            j["validity"] = r.validity;
            j["active"] = r.active;
            jrows.push_back(j);
        }
        doc["rows"] = jrows;
        return doc.dump(2) + "\n";
    }
    std::ostringstream out;
    for (const auto& w : warnings)
        out << "# warning: " << w << '\n';
    out << table_csv(rows);
    return out.str();
}

std::string oracle_output(const RunConfig& cfg) {
    const auto p = resolve_params(cfg);
    const auto prof = resolve_profile(cfg, p);
    const double period = 2.0 * std::numbers::pi / p.omega_rabi;
    const double t_end = prof.switch_end() + cfg.periods_after * period;

    const auto m = matrix_element_oracle(p, prof, t_end, cfg.tol);
    const auto series = propagate(p, prof, psi1(), t_end, cfg.tol);
    const auto single =
        extract_components(series, p, prof.switch_end() + period, t_end);

    const auto dev_ad = compare_oracle(m, p, DipoleBasis::Adiabatic);
    const auto dev_su = compare_oracle(m, p, DipoleBasis::Sudden);
    const auto max_dev = [](const std::vector<OracleDeviation>& v) {
        double d = 0.0;
        for (const auto& x : v)
            d = std::max(d, x.rel_dev);
        return d;
    };
    const double mad = max_dev(dev_ad), msu = max_dev(dev_su);

    std::string verdict;
    const bool is_step = prof.kind == ProfileKind::Step;
    if (!is_step && cfg.delta_tau >= 10.0)
        verdict = mad < 0.02 ? "adiabatic match" : "adiabatic mismatch";
    else if (is_step || cfg.delta_tau <= 0.1)
        verdict = msu < 0.02 ? "sudden match" : "sudden mismatch";
    else
        verdict = "intermediate: no analytic match expected";

    json doc;
    doc["params"] = params_row_json(p);
    json jp;
    jp["kind"] = cfg.profile;
    jp["tau"] = jnum(prof.tau);
    jp["t_on"] = jnum(prof.t_on);
    jp["delta_tau"] = jnum(cfg.delta_tau);
    doc["profile"] = jp;
    doc["tol"] = jnum(cfg.tol);
    doc["t_end"] = jnum(t_end);
    doc["norm_drift"] = jnum(m.max_norm_drift);
    doc["fit_residual"] = jnum(m.residual);

    json js;
    js["omega_rabi_fitted"] = jnum(single.omega_rabi_fitted);
    js["residual"] = jnum(single.residual);
    js["pop_residual"] = jnum(single.pop_residual);
    json jamp;
    for (const auto& [name, amp] : single.amp_at) {
        json a;
        a["re"] = jnum(amp.real());
        a["im"] = jnum(amp.imag());
        a["abs"] = jnum(std::abs(amp));
        jamp[name] = a;
    }
    js["amp_at"] = jamp;
    doc["single_state"] = js;

    json cmp;
    for (const auto* pair : {&dev_ad, &dev_su}) {
        json arr = json::array();
        for (const auto& d : *pair) {
            json j;
            j["what"] = d.what;
            j["harmonic"] = d.harmonic;
            j["oracle_amp"] = jnum(d.oracle_amp);
            j["analytic_amp"] = jnum(d.analytic_amp);
            j["rel_dev"] = jnum(d.rel_dev);
            j["absolute"] = d.absolute;
            arr.push_back(j);
        }
        cmp[pair == &dev_ad ? "adiabatic" : "sudden"] = arr;
    }
    doc["comparison"] = cmp;
    doc["max_dev_adiabatic"] = jnum(mad);
    doc["max_dev_sudden"] = jnum(msu);
    doc["verdict"] = verdict;

    json comps;
    json jad = json::array();
    for (const auto& c : adiabatic_dipoles(p))
        jad.push_back(component_json(c, p));
    comps["adiabatic"] = jad;
    json jsu = json::array();
    for (const auto& c : sudden_dipoles_exact(p))
        jsu.push_back(component_json(c, p));
    comps["sudden"] = jsu;
    doc["analytic_components"] = comps;

    return doc.dump(2) + "\n";
}

std::string ensemble_output(const RunConfig& cfg) {
    const auto p = resolve_params(cfg);
    const auto ad = adiabatic_dipoles(p);
    const DipoleComponent* comp =
        cfg.component == "coherent" ? find_component(ad, Element::E11, -1, 0)
                                    : find_component(ad, Element::E12, -1, +1);
    if (!comp)
        throw ConfigError("selected ensemble component has zero amplitude for "
                          "this configuration");

    const Eigen::Vector3d k_in{0.0, 0.0, 1.0};
    const double c = cfg.direction_cos;
    const Eigen::Vector3d k_out{std::sqrt(std::max(0.0, 1.0 - c * c)), 0.0, c};
    const auto grid = parse_n_grid(cfg.n_grid);
    if (grid.size() < 2)
        throw ConfigError("n_grid needs at least 2 atom counts for a scaling fit");

    const auto r = scaling_exponent(*comp, cfg.phi, grid, cfg.cube_side, k_in,
                                    k_out, cfg.trials, cfg.seed);

    if (cfg.format == "json") {
        json doc;
        doc["component"] = cfg.component;
        doc["direction_cos"] = jnum(cfg.direction_cos);
        doc["trials"] = cfg.trials;
        doc["seed"] = cfg.seed;
        doc["exponent_fit"] = jnum(r.exponent);
        json rows = json::array();
        for (std::size_t i = 0; i < r.n_atoms.size(); ++i) {
            json j;
            j["n_atoms"] = r.n_atoms[i];
            j["mean_intensity"] = jnum(r.mean_intensity[i]);
            j["std_error"] = jnum(r.std_error[i]);
            rows.push_back(j);
        }
        doc["rows"] = rows;
        return doc.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "n_atoms,direction_cos,mean_intensity,std_error,exponent_fit\n";
    for (std::size_t i = 0; i < r.n_atoms.size(); ++i)
        out << r.n_atoms[i] << ',' << format_g9(cfg.direction_cos) << ','
            << format_g9(r.mean_intensity[i]) << ','
            << format_g9(r.std_error[i]) << ',' << format_g9(r.exponent)
            << '\n';
    return out.str();
}

std::string audit_output(const RunConfig& cfg) {
    auto findings = run_audit();
    std::vector<Finding> kept;
    for (auto& f : findings)
        if (f.measure > cfg.audit_tol)
            kept.push_back(std::move(f));

    if (cfg.format == "json") {
        json doc;
        doc["tolerance"] = jnum(cfg.audit_tol);
        json arr = json::array();
        for (const auto& f : kept) {
            json j;
            j["id"] = f.id;
            j["description"] = f.description;
            j["measure"] = jnum(f.measure);
            j["evidence"] = f.evidence;
            arr.push_back(j);
        }
        doc["findings"] = arr;
        return doc.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "audit: " << kept.size() << " finding(s) above tolerance "
        << format_g9(cfg.audit_tol) << "\n";
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& f = kept[i];
        out << "\n[" << i + 1 << "] " << f.id << " (measure "
            << format_g9(f.measure) << ")\n    " << f.description << "\n";
        for (const auto& e : f.evidence)
            out << "    evidence: " << e << "\n";
    }
    return out.str();
}

int run(int argc, const char* const* argv) {
    std::setlocale(LC_NUMERIC, "C");

    std::string subcommand;
    std::map<std::string, std::string> keys;
    std::string config_path;

    // Minimal deterministic argument handling: subcommand first, then
    // --config PATH, named flags, and generic key=value overrides.
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (args.empty())
            throw ConfigError(
                "usage: esrad <params|fig1|table|oracle|ensemble|audit> "
                "[--config PATH] [--out PATH] [--format csv|json] [--seed N] "
                "[--exact|--asymptotic] [--regime adiabatic|sudden] "
                "[--alpha-grid start:stop:points(log|lin)] [key=value ...]");
        subcommand = args[0];
        check_choice("subcommand", subcommand,
                     {"params", "fig1", "table", "oracle", "ensemble", "audit"});

        std::vector<std::pair<std::string, std::string>> overrides;
        for (std::size_t i = 1; i < args.size(); ++i) {
            const std::string& a = args[i];
            const auto need_value = [&](const char* flag) -> const std::string& {
                if (i + 1 >= args.size())
                    throw ConfigError(std::string(flag) + " requires a value");
                return args[++i];
            };
            if (a == "--config") config_path = need_value("--config");
            else if (a == "--out") overrides.emplace_back("out", need_value("--out"));
            else if (a == "--format") overrides.emplace_back("format", need_value("--format"));
            else if (a == "--seed") overrides.emplace_back("seed", need_value("--seed"));
            else if (a == "--regime") overrides.emplace_back("regime", need_value("--regime"));
            else if (a == "--alpha-grid") overrides.emplace_back("alpha_grid", need_value("--alpha-grid"));
            else if (a == "--exact") overrides.emplace_back("exact", "1");
            else if (a == "--asymptotic") overrides.emplace_back("exact", "0");
            else if (a.rfind("--", 0) == 0)
                throw ConfigError("unknown flag '" + a + "'");
            else if (const auto eq = a.find('='); eq != std::string::npos && eq > 0)
                overrides.emplace_back(a.substr(0, eq), a.substr(eq + 1));
            else
                throw ConfigError("expected key=value or a flag, got '" + a + "'");
        }

        if (!config_path.empty())
            keys = parse_key_value_file(config_path);
        for (const auto& [k, v] : overrides)
            keys[k] = v;

        const RunConfig cfg = make_config(keys);
        std::string doc;
        if (subcommand == "params") doc = params_output(cfg);
        else if (subcommand == "fig1") doc = fig1_output(cfg);
        else if (subcommand == "table") doc = table_output(cfg);
        else if (subcommand == "oracle") doc = oracle_output(cfg);
        else if (subcommand == "ensemble") doc = ensemble_output(cfg);
        else doc = audit_output(cfg);
        write_output(cfg, doc);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

} // namespace esrad::cli
