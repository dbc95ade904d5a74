#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cherenkov/errors.hpp"
#include "cherenkov/medium.hpp"
#include "cherenkov/quad.hpp"

using namespace cherenkov;
using namespace cherenkov::quad;

namespace {

double lorentzian(double x, double x0, double g) { return g / ((x - x0) * (x - x0) + g * g); }

}  // namespace

TEST_CASE("polynomial and endpoint singularity") {
    const auto r = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 1.0 / 3.0) < 1e-12);

    const auto s = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
    CHECK(std::abs(s.value - 2.0) < 1e-8);
}

TEST_CASE("Lorentzian against arctan") {
    const double x0 = 3.0, g = 1e-3;
    const auto r = integrate_adaptive([&](double x) { return lorentzian(x, x0, g); }, x0 - 1e3 * g, x0 + 1e3 * g, 1e-12);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 2.0 * std::atan(1e3)) < 1e-10);
}

TEST_CASE("semi-infinite") {
    QuadOptions o;
    o.rel_tol = 1e-12;
    CHECK(std::abs(integrate_semi_infinite([](double x) { return std::exp(-x); }, 0.0, o).value - 1.0) < 1e-11);
    CHECK(std::abs(integrate_semi_infinite([](double x) { return 1.0 / (x * x); }, 1.0, o).value - 1.0) < 1e-10);
}

TEST_CASE("principal value") {
    QuadOptions o;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-14;
    SUBCASE("constant on a symmetric interval") {
        const auto r = integrate_pv([](double) { return 1.0; }, 0.3, -0.7, 1.3, o);
        CHECK(std::abs(r.value) < 1e-13);
    }
    SUBCASE("unit interval about one half") {
        CHECK(std::abs(integrate_pv([](double) { return 1.0; }, 0.5, 0.0, 1.0, o).value) < 1e-13);
    }
    SUBCASE("asymmetric interval against the logarithm") {
        const auto r = integrate_pv([](double) { return 1.0; }, 0.2, 0.0, 1.0, o);
        CHECK(std::abs(r.value - std::log(0.8 / 0.2)) < 1e-12);
    }
    SUBCASE("odd-about-the-pole part") {
        // PV int_0^2 x^2/(x-1) = int (x+1) + PV int 1/(x-1) = 4 + 0
        const auto r = integrate_pv([](double x) { return x * x; }, 1.0, 0.0, 2.0, o);
        CHECK(std::abs(r.value - 4.0) < 1e-12);
    }
    SUBCASE("even about the pole") {
        const auto r = integrate_pv([](double x) { return std::cos(x - 2.0); }, 2.0, 1.0, 3.0, o);
        CHECK(std::abs(r.value) <= std::max(r.error_estimate, 1e-14));
    }
    SUBCASE("pole on the boundary") {
        CHECK_THROWS_AS(integrate_pv([](double) { return 1.0; }, 0.0, 0.0, 1.0, o), DomainError);
        CHECK_THROWS_AS(integrate_pv([](double) { return 1.0; }, 1.0, 0.0, 1.0, o), DomainError);
    }
}

TEST_CASE("principal value rebuilds Re chi of a Lorentz oscillator") {
    // Re chi(w) = (2/pi) PV int_0^inf w' Im chi(w') / (w'^2 - w^2) dw'
    LorentzMedium m;
    m.omega_pe = 1.0;
    m.omega_0e = 2.0;
    m.gamma_e = 0.1;
    const double W = 400.0;
    QuadOptions o;
    o.rel_tol = 1e-11;
    for (double w : {0.5, 1.9, 2.0, 2.3, 7.0}) {
        const auto s = [&](double x) { return x * im_permittivity(m, x); };
        const auto r = integrate_pv([&](double x) { return s(x) / (x + w); }, w, 0.0, W, o);
        const double tail = s(W) * W * W * inverse_square_tail(W, w);
        const double rebuilt = 2.0 / M_PI * (r.value + tail);
        CHECK(std::abs(rebuilt - chi_e(m, w).real()) < 1e-6 * std::abs(chi_e(m, w)));
    }
}

TEST_CASE("bracketed integration") {
    QuadOptions o;
    o.rel_tol = 1e-12;
    const auto two_peaks = [](double x) { return lorentzian(x, 2.0, 1e-4) + 3.0 * lorentzian(x, 7.0, 1e-5); };
    const double exact = (std::atan(2.0 / 1e-4) + std::atan(8.0 / 1e-4)) +
                         3.0 * (std::atan(7.0 / 1e-5) + std::atan(3.0 / 1e-5));
    SUBCASE("breakpoints at both centres") {
        const std::vector<double> bp{2.0, 7.0};
        const auto r = integrate_bracketed(two_peaks, bp, 0.0, 10.0, o);
        CHECK(r.converged);
        CHECK(std::abs(r.value - exact) < 1e-9 * exact);
    }
    SUBCASE("no breakpoints matches plain adaptive") {
        const auto f = [](double x) { return std::sin(3.0 * x) + x; };
        const auto a = integrate_adaptive(f, 0.0, 4.0, o);
        const auto b = integrate_bracketed(f, {}, 0.0, 4.0, o);
        CHECK(a.value == b.value);
        CHECK(a.error_estimate == b.error_estimate);
    }
    SUBCASE("outside breakpoint ignored with a warning") {
        const auto f = [](double x) { return std::exp(x); };
        const std::vector<double> bp{-1.0};
        const auto a = integrate_adaptive(f, 0.0, 1.0, o);
        const auto b = integrate_bracketed(f, bp, 0.0, 1.0, o);
        CHECK(a.value == b.value);
        REQUIRE(b.warnings.size() == 1);
        CHECK(b.warnings[0].find("outside") != std::string::npos);
    }
}

TEST_CASE("budget exhaustion is reported, not hidden") {
    QuadOptions o;
    o.rel_tol = 1e-14;
    o.max_evaluations = 200;
    const auto r = integrate_adaptive([](double x) { return std::sin(1.0 / x); }, 1e-4, 1.0, o);
    CHECK_FALSE(r.converged);
    CHECK_FALSE(r.warnings.empty());
    CHECK(r.evaluations <= 200 + 42);
}

TEST_CASE("linearity and interval additivity") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.1, 3.0);
    QuadOptions o;
    o.rel_tol = 1e-11;
    for (int trial = 0; trial < 25; ++trial) {
        const double al = u(rng), be = u(rng), x0 = pos(rng), g = 0.01 * pos(rng), c = pos(rng);
        const auto f = [&](double x) { return std::exp(-x) * std::cos(c * x); };
        const auto h = [&](double x) { return lorentzian(x, x0, g); };
        const auto F = integrate_adaptive(f, 0.0, 3.5, o), H = integrate_adaptive(h, 0.0, 3.5, o);
        const auto S = integrate_adaptive([&](double x) { return al * f(x) + be * h(x); }, 0.0, 3.5, o);
        const double combined = std::abs(al) * F.error_estimate + std::abs(be) * H.error_estimate + S.error_estimate;
        CHECK(std::abs(S.value - (al * F.value + be * H.value)) <= combined + 1e-13);

        const auto L = integrate_adaptive(h, 0.0, x0, o), R = integrate_adaptive(h, x0, 3.5, o);
        CHECK(std::abs(L.value + R.value - H.value) <= L.error_estimate + R.error_estimate + H.error_estimate + 1e-13);
    }
}

TEST_CASE("error estimates are honest on a fixed battery") {
    struct Case {
        std::function<double(double)> f;
        double a, b, exact;
    };
    std::vector<Case> battery;
    for (int p = 0; p <= 12; ++p)
        battery.push_back({[p](double x) { return std::pow(x, p); }, 0.0, 1.0, 1.0 / (p + 1)});
    for (double g : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5})
        for (double x0 : {0.3, 0.5, 0.77})
            battery.push_back({[=](double x) { return lorentzian(x, x0, g); }, 0.0, 1.0,
                               std::atan((1.0 - x0) / g) + std::atan(x0 / g)});
    for (double s : {-0.5, -0.25, 0.5, 1.5})
        battery.push_back({[s](double x) { return std::pow(x, s); }, 0.0, 1.0, 1.0 / (s + 1.0)});
    battery.push_back({[](double x) { return std::log(x); }, 0.0, 1.0, -1.0});

    int total = 0, honest = 0;
    for (const auto& c : battery)
        for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
            QuadOptions o;
            o.rel_tol = tol;
            const auto r = integrate_adaptive(c.f, c.a, c.b, o);
            ++total;
            if (std::abs(r.value - c.exact) <= 10.0 * r.error_estimate + 1e-15 * std::abs(c.exact)) ++honest;
        }
    CHECK(honest >= 0.99 * total);
}

TEST_CASE("bit-reproducible") {
    const auto f = [](double x) { return lorentzian(x, 0.4, 1e-3) * std::exp(x); };
    const auto a = integrate_adaptive(f, 0.0, 1.0, 1e-10);
    const auto b = integrate_adaptive(f, 0.0, 1.0, 1e-10);
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("Gauss-Legendre rule") {
    for (int n : {1, 2, 5, 20}) {
        const GaussRule g = gauss_legendre(n);
        double wsum = 0.0;
        for (double w : g.weights) wsum += w;
        CHECK(std::abs(wsum - 2.0) < 1e-14);
        // exact for degree 2n - 1
        const int p = 2 * n - 2;
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
        CHECK(std::abs(s - 2.0 / (p + 1)) < 1e-13);
        CHECK(std::is_sorted(g.nodes.begin(), g.nodes.end()));
    }
}
