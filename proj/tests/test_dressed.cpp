#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "esrad/dressed.hpp"

using namespace esrad;

TEST_CASE("validate rejects bad configs") {
    SystemConfig cfg;
    cfg.e21 = 100.0;
    cfg.omega = 100.0;
    cfg.field_amp = 0.5;
    CHECK_NOTHROW(validate(cfg));

    auto bad = cfg;
    bad.e21 = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.omega = -1.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.dipole_mag = 0.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.field_amp = -0.1;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("near-resonance warning") {
    SystemConfig cfg;
    cfg.e21 = 100.0;
    cfg.omega = 80.0; // |Delta|/E21 = 0.2
    cfg.field_amp = 1.0;
    const auto warnings = validate(cfg);
    REQUIRE(warnings.size() == 1);
    CHECK(derive_params(cfg).outside_model_validity);

    cfg.omega = 99.0;
    CHECK(validate(cfg).empty());
    CHECK_FALSE(derive_params(cfg).outside_model_validity);
}

TEST_CASE("basic dressed parameters") {
    const auto p = derive_params(1.0, 0.5);
    CHECK(p.alpha == doctest::Approx(1.0));
    CHECK(p.omega_rabi == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(p.lambda1 == doctest::Approx(0.5 * (1.0 - std::sqrt(2.0))).epsilon(1e-12));
    CHECK(p.lambda1 <= 0.0);
    CHECK(p.c1 == doctest::Approx(std::sqrt(0.5 * (1.0 + 1.0 / std::sqrt(2.0)))));
    // lambda1 * lambda2 = -|V|^2 with lambda2 = lambda1 + Omega
    CHECK(p.lambda1 * (p.lambda1 + p.omega_rabi) ==
          doctest::Approx(-p.v_mag * p.v_mag).epsilon(1e-12));
}

TEST_CASE("resonant case flags alpha as infinite") {
    const auto p = derive_params(0.0, 0.5);
    CHECK(p.alpha_infinite);
    CHECK(std::isinf(p.alpha));
    CHECK(p.omega_rabi == doctest::Approx(1.0));
    CHECK(p.c1 == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(p.c2) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("zero coupling limits") {
    const auto pos = derive_params(2.0, 0.0);
    CHECK(pos.alpha == 0.0);
    CHECK(pos.c1 == doctest::Approx(1.0));
    CHECK(std::abs(pos.c2) == doctest::Approx(0.0));
    CHECK(pos.lambda1 == doctest::Approx(0.0));

    // Negative detuning: the lower dressed state is the bare upper state.
    const auto neg = derive_params(-2.0, 0.0);
    CHECK(neg.c1 == doctest::Approx(0.0));
    CHECK(std::abs(neg.c2) == doctest::Approx(1.0));
    CHECK(neg.lambda1 == doctest::Approx(-2.0));

    CHECK_THROWS_AS(derive_params(0.0, 0.0), NumericalError);
}

TEST_CASE("normalization and transform unitarity on a grid") {
    for (int i = 0; i < 200; ++i) {
        const double alpha = std::pow(10.0, -3.0 + 6.0 * i / 199.0);
        for (const double sd : {1.0, -1.0}) {
            const auto p = derive_params(sd, 0.5 * alpha);
            const double norm = p.c1 * p.c1 + std::norm(p.c2);
            CHECK(std::abs(norm - 1.0) < 1e-12);
            const Eigen::Matrix2cd u = basis_transform(p);
            const Eigen::Matrix2cd id =
                u * u.adjoint() - Eigen::Matrix2cd::Identity();
            CHECK(id.cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("transform diagonalizes the interaction Hamiltonian") {
    // H in the rotating frame: [[0, V], [V*, Delta]], V = |V| e^{i phi0}.
    for (const double delta : {0.7, -0.7, 0.0}) {
        const auto p = derive_params(delta, 0.8, 100.0, 0.3, 0.2, -0.4);
        const complexd v = p.v_mag * std::exp(complexd{0.0, p.phi0});
        Eigen::Matrix2cd h;
        h << 0.0, v, std::conj(v), p.delta;
        const Eigen::Matrix2cd u = basis_transform(p);
        const Eigen::Matrix2cd d = u * h * u.adjoint();
        CHECK(std::abs(d(0, 1)) < 1e-12);
        CHECK(std::abs(d(1, 0)) < 1e-12);
        CHECK(d(0, 0).real() == doctest::Approx(p.lambda1).epsilon(1e-12));
        CHECK(d(1, 1).real() ==
              doctest::Approx(p.lambda1 + p.omega_rabi).epsilon(1e-12));
    }
}

TEST_CASE("phase conventions carry into c2") {
    const auto p = derive_params(1.0, 0.5, 100.0, 0.3, 0.2, -0.4);
    CHECK(p.phi0 == doctest::Approx(0.3 + 0.2 + 0.4));
    CHECK(std::arg(-p.c2) == doctest::Approx(-p.phi0));
    CHECK(p.c1 > 0.0); // all phase freedom sits in c2
}

TEST_CASE("Omega is monotone in |V| and even in phase") {
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const auto p = derive_params(1.0, 0.1 * i);
        CHECK(p.omega_rabi > prev);
        prev = p.omega_rabi;
    }
    const auto a = derive_params(1.0, 0.5, 100.0, 1.0);
    const auto b = derive_params(1.0, 0.5, 100.0, -1.0);
    CHECK(a.omega_rabi == b.omega_rabi);
}

TEST_CASE("delta symmetry: p and q swap under sign flip") {
    for (const double alpha : {0.05, 0.5, 3.0, 40.0}) {
        const auto pos = derive_params(1.0, 0.5 * alpha);
        const auto neg = derive_params(-1.0, 0.5 * alpha);
        CHECK(pos.p() == doctest::Approx(neg.q()).epsilon(1e-12));
        CHECK(pos.q() == doctest::Approx(neg.p()).epsilon(1e-12));
        CHECK(pos.p() + pos.q() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("sideband frequencies") {
    const auto p = derive_params(1.0, 0.5);
    const auto f = sideband_frequencies(p);
    CHECK(f.center == doctest::Approx(100.0));
    CHECK(f.upper - f.center == doctest::Approx(p.omega_rabi));
    CHECK(f.center - f.lower == doctest::Approx(p.omega_rabi));
}
