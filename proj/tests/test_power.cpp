#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cherenkov/power.hpp"

using namespace cherenkov;
using constants::c;
using constants::hbar;

namespace {

constexpr double w0 = 1e16;
constexpr double frank_tamm_factor = 0.451303;  // 1 - 1/(n^2 beta^2), n = 1.5, beta = 0.9

LorentzMedium glass_like(double gamma_rel) { return {std::sqrt(1.25) * w0, w0, gamma_rel * w0, 0.0, 1.0, 0.0}; }

Particle electron(double beta, double lambda = 1.0) {
    Particle p;
    p.beta = beta;
    p.hbar_scale = lambda;
    return p;
}

IntegrationDomain low_band(int points = 6) {
    IntegrationDomain d;
    d.omega_min = 0.002 * w0;
    d.omega_max = 0.02 * w0;
    d.k_max = 10.0 * 1.5 * d.omega_max / c;
    d.omega_points = points;
    d.log_spacing = true;
    return d;
}

}  // namespace

TEST_CASE("weakly absorbing dielectric reproduces Frank-Tamm") {
    const Particle p = electron(0.9);
    const Spectrum s = power_classical_lossy(glass_like(1e-4), p, low_band());
    for (std::size_t i = 0; i < s.omega_grid.size(); ++i) {
        const double ft = transparent_prefactor(p) * s.omega_grid[i] * frank_tamm_factor;
        CHECK(std::abs(s.density[i] / ft - 1.0) < 0.01);
    }
    CHECK(s.cap_dependent);
    CHECK(s.regime.mechanics == Mechanics::classical);
}

TEST_CASE("no radiation below threshold") {
    const Particle slow = electron(0.5);  // n beta = 0.75
    const Spectrum s = power_classical_lossy(glass_like(1e-4), slow, low_band(3));
    for (std::size_t i = 0; i < s.omega_grid.size(); ++i)
        CHECK(s.density[i] < 1e-4 * transparent_prefactor(slow) * s.omega_grid[i]);
}

TEST_CASE("high-temperature classical weight") {
    const Particle p = electron(0.9);
    IntegrationDomain d = low_band(3);
    const double T = 10.0 * hbar * d.omega_max / constants::k_B;  // k_B T = 10 hbar w at the top of the band
    const Spectrum cold = power_classical_lossy(glass_like(1e-4), p, d);
    const Spectrum hot = power_classical_lossy(glass_like(1e-4), p, d, T);
    for (std::size_t i = 0; i < hot.omega_grid.size(); ++i) {
        const double x = hbar * hot.omega_grid[i] / (constants::k_B * T);
        CHECK(hot.density[i] / cold.density[i] == doctest::Approx(2.0 / x).epsilon(0.02));
        CHECK(hot.density[i] / cold.density[i] == doctest::Approx(coth_weight(hot.omega_grid[i], T)).epsilon(1e-12));
    }
    REQUIRE(hot.components.size() == 2);
    CHECK(hot.components[0].name == "zero_temperature");
    CHECK(hot.components[0].total == doctest::Approx(cold.total).epsilon(1e-6));
    CHECK(hot.components[0].total + hot.components[1].total == doctest::Approx(hot.total).epsilon(1e-12));
}

TEST_CASE("transparent Frank-Tamm density") {
    const Particle p = electron(0.9);
    IntegrationDomain band;
    band.omega_min = 0.5;
    band.omega_max = 1.0;
    band.omega_points = 2;
    const auto glass = TransparentMedium::constant(1.5);
    const Spectrum s = power_classical_transparent(glass, p, band);
    CHECK(s.density.back() == doctest::Approx(transparent_prefactor(p) * frank_tamm_factor).epsilon(1e-6));
    CHECK(s.total == doctest::Approx(transparent_prefactor(p) * (1.0 - 1.0 / (2.25 * 0.81)) * 0.375).epsilon(1e-9));

    const Spectrum threshold = power_classical_transparent(glass, electron(1.0 / 1.5), band);
    CHECK(threshold.density.back() == 0.0);

    const double cold_T = hbar * band.omega_min / (100.0 * constants::k_B);
    const Spectrum cool = power_classical_transparent(glass, p, band, cold_T);
    CHECK(std::abs(cool.density.back() / s.density.back() - 1.0) < 1e-12);
}

TEST_CASE("classical limit of the quantum spectrum") {
    const Particle p0 = electron(0.9, 0.0);
    IntegrationDomain d = low_band(3);
    const Spectrum cl = power_classical_lossy(glass_like(1e-3), p0, d);
    RegimeSpec r{Mechanics::nonrel_quantum, 0.0, MediumMode::lossy};
    const Spectrum q = power_quantum(glass_like(1e-3), p0, d, r);
    for (std::size_t i = 0; i < cl.density.size(); ++i)
        CHECK(q.density[i] == doctest::Approx(cl.density[i]).epsilon(1e-9));
    r.mechanics = Mechanics::rel_quantum;
    const Spectrum qr = power_quantum(glass_like(1e-3), p0, d, r);
    for (std::size_t i = 0; i < cl.density.size(); ++i)
        CHECK(qr.density[i] == doctest::Approx(cl.density[i]).epsilon(1e-9));
}

TEST_CASE("quantum transparent cutoffs") {
    const Particle p = electron(0.9);
    const auto glass = TransparentMedium::constant(1.5);
    for (Mechanics mech : {Mechanics::nonrel_quantum, Mechanics::rel_quantum}) {
        const double wc = cutoff_frequency(mech, p, 1.5);
        IntegrationDomain band;
        band.omega_min = 0.01 * wc;
        band.omega_max = 2.0 * wc;
        band.omega_points = 400;
        const Spectrum s = power_quantum_transparent(glass, p, band, {mech, 0.0, MediumMode::transparent});
        CHECK(s.cutoffs.omega_cutoff == doctest::Approx(wc));
        for (std::size_t i = 0; i < s.omega_grid.size(); ++i) {
            if (s.omega_grid[i] > wc) CHECK(s.density[i] == 0.0);
            if (s.omega_grid[i] < wc * (1.0 - 1e-6)) CHECK(s.density[i] > 0.0);
        }
        const Spectrum at = power_quantum_transparent(glass, p, {wc * 0.5, wc, 0.0, 1e-6, 3, 2},
                                                      {mech, 0.0, MediumMode::transparent});
        CHECK(at.density.back() <= 1e-12 * at.density.front());
    }
}

TEST_CASE("quantum transparent limits") {
    const Particle p = electron(0.9);
    const auto glass = TransparentMedium::constant(1.5);
    IntegrationDomain band;
    band.omega_min = 1e-6 * p.rest_energy() / hbar;
    band.omega_max = 1e-4 * p.rest_energy() / hbar;
    band.omega_points = 5;
    const Spectrum nr = power_quantum_transparent(glass, p, band, {Mechanics::nonrel_quantum, 0.0, MediumMode::transparent});
    const Spectrum rel = power_quantum_transparent(glass, p, band, {Mechanics::rel_quantum, 0.0, MediumMode::transparent});
    const Spectrum cl = power_classical_transparent(glass, p, band);
    for (std::size_t i = 0; i < band.omega_points; ++i) {
        const double eps = hbar * band.grid()[i] / p.rest_energy();
        CHECK(std::abs(rel.density[i] / nr.density[i] - 1.0) < 20.0 * eps);
        CHECK(std::abs(rel.density[i] / cl.density[i] - 1.0) < 20.0 * eps);
    }
    const Spectrum zero_hbar =
        power_quantum_transparent(glass, electron(0.9, 0.0), band, {Mechanics::rel_quantum, 0.0, MediumMode::transparent});
    for (std::size_t i = 0; i < band.omega_points; ++i) CHECK(zero_hbar.density[i] == cl.density[i]);

    IntegrationDomain mev = band;
    mev.omega_min = 0.05 * constants::MeV / hbar;
    mev.omega_max = 0.5 * constants::MeV / hbar;
    const Spectrum t0 = power_quantum_transparent(glass, p, mev, {Mechanics::rel_quantum, 0.0, MediumMode::transparent});
    const Spectrum t1 = power_quantum_transparent(glass, p, mev, {Mechanics::rel_quantum, 1e-6, MediumMode::transparent});
    for (std::size_t i = 0; i < t0.density.size(); ++i)
        CHECK(std::abs(t1.density[i] - t0.density[i]) <= 1e-12 * t0.density[i]);
}

TEST_CASE("thermal factorization of the quantum spectrum") {
    // hbar w across 1e-3 .. 1e-2 of m c^2 needs a high-frequency medium
    const double wr = 1e21;
    const LorentzMedium m{std::sqrt(1.25) * wr, wr, 1e-3 * wr, 0.0, 1.0, 0.0};
    const Particle p = electron(0.9);
    IntegrationDomain d;
    d.omega_min = 1e-3 * p.rest_energy() / hbar;
    d.omega_max = 1e-2 * p.rest_energy() / hbar;
    d.k_max = 2.0 * p.momentum() / hbar;
    d.omega_points = 4;
    const double T = 0.05 * p.rest_energy() / constants::k_B;
    const Spectrum cold = power_quantum(m, p, d, {Mechanics::rel_quantum, 0.0, MediumMode::lossy});
    const Spectrum hot = power_quantum(m, p, d, {Mechanics::rel_quantum, T, MediumMode::lossy});
    for (std::size_t i = 0; i < cold.density.size(); ++i) {
        REQUIRE(cold.density[i] > 0.0);
        const double f = f_t_factor(cold.omega_grid[i], T, p.energy());
        CHECK(std::abs(hot.density[i] / cold.density[i] / f - 1.0) < 1e-10);
    }
}

TEST_CASE("lossy density converges to the transparent one as loss vanishes") {
    const Particle p = electron(0.9);
    const double w = 0.2 * w0;
    IntegrationDomain d = low_band();
    d.k_max = 20.0 * w / c;
    const auto clear = TransparentMedium::from_lorentz(glass_like(0.0));
    const double target = power_classical_transparent(clear, p, {0.5 * w, w, 0.0, 1e-6, 3, 1}).density[0];
    double previous = 0.0;
    for (int e = 2; e <= 4; ++e) {
        const double err =
            std::abs(lossy_density(glass_like(std::pow(10.0, -e)), p, Mechanics::classical, w, d).value / target - 1.0);
        if (e > 2) CHECK(std::log10(previous / err) >= 0.9);
        previous = err;
    }
}

TEST_CASE("nonnegativity and total consistency") {
    const LorentzMedium m{1e15, 2e15, 1e14, 1e15, 2e15, 1e14};
    const Particle p = electron(0.9);
    IntegrationDomain d;
    d.omega_min = 0.0;
    d.omega_max = 6e15;
    d.k_max = 10.0 * d.omega_max / c;
    d.omega_points = 601;
    d.jobs = 2;
    const Spectrum s = power_classical_lossy(m, p, d);
    double peak = 0.0, trap = 0.0;
    for (double v : s.density) peak = std::max(peak, v);
    for (std::size_t i = 0; i < s.density.size(); ++i) {
        CHECK(s.density[i] >= -1e-12 * peak);
        if (i) trap += 0.5 * (s.omega_grid[i] - s.omega_grid[i - 1]) * (s.density[i] + s.density[i - 1]);
    }
    CHECK(trap == doctest::Approx(s.total).epsilon(2e-3));
    // magnetic loss makes the k-integral grow like log k_max
    bool capped = false;
    for (const auto& w : s.warnings) capped |= w.find("k_max") != std::string::npos;
    CHECK(capped);
}

TEST_CASE("parallel bins are deterministic") {
    const Particle p = electron(0.9);
    IntegrationDomain d = low_band(7);
    const Spectrum a = power_classical_lossy(glass_like(1e-3), p, d);
    d.jobs = 3;
    const Spectrum b = power_classical_lossy(glass_like(1e-3), p, d);
    CHECK(a.density == b.density);
    CHECK(a.error_estimate == b.error_estimate);
}

TEST_CASE("Matsubara sum") {
    const double wr = 2e15;
    const LorentzMedium m{1e15, wr, 1e14, 0.0, 1.0, 0.0};
    const Particle p = electron(0.9);
    IntegrationDomain d;
    d.omega_min = 0.0;
    d.omega_max = 5.0 * wr;
    d.k_max = 10.0 * d.omega_max / c;
    const double T = hbar * wr / constants::k_B;
    SUBCASE("agrees with the coth form") {
        const Spectrum s = power_classical_lossy(m, p, d, T);
        const MatsubaraTotal mt = power_classical_matsubara(m, p, d, {T, 2000, TailPolicy::integral_tail});
        CHECK(mt.total == doctest::Approx(s.total).epsilon(5e-3));
        CHECK(mt.tail > 0.0);
        const MatsubaraTotal bare = power_classical_matsubara(m, p, d, {T, 2000, TailPolicy::none});
        CHECK(bare.tail == 0.0);
        CHECK(bare.total < mt.total);
    }
    SUBCASE("vanishes with temperature at fixed truncation") {
        double previous = std::numeric_limits<double>::infinity();
        for (double f : {1.0, 1e-2, 1e-4}) {
            const MatsubaraTotal mt = power_classical_matsubara(m, p, d, {f * T, 50, TailPolicy::none});
            CHECK(mt.total < previous);
            previous = mt.total;
        }
        // once every retained xi_l sits far below the resonance the sum is linear in T
        const double a = power_classical_matsubara(m, p, d, {1e-5 * T, 50, TailPolicy::none}).total;
        const double b = power_classical_matsubara(m, p, d, {1e-6 * T, 50, TailPolicy::none}).total;
        CHECK(a / b == doctest::Approx(10.0).epsilon(1e-2));
    }
    CHECK_THROWS_AS(power_classical_matsubara(m, p, d, {0.0, 10, TailPolicy::none}), DomainError);
}

TEST_CASE("assembler preconditions") {
    const Particle p = electron(0.9);
    IntegrationDomain d = low_band();
    CHECK_THROWS_AS(power_classical_lossy(glass_like(0.0), p, d), DomainError);
    d.k_max = 0.0;
    CHECK_THROWS_AS(power_classical_lossy(glass_like(1e-3), p, d), DomainError);
    d = low_band();
    d.relative_tolerance = 0.5;
    CHECK_THROWS_AS(power_classical_lossy(glass_like(1e-3), p, d), DomainError);
    CHECK_THROWS_AS(power_quantum(glass_like(1e-3), p, low_band(), {Mechanics::classical, 0.0, MediumMode::lossy}),
                    DomainError);
}
