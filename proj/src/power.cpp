#include "cherenkov/power.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "cherenkov/quad.hpp"

namespace cherenkov {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

// Resonance frequencies and widths of a Lorentz medium (where the density
// in ω is sharply structured); empty for a fixed response.
struct Resonance {
    double omega;
    double width;
};

std::vector<Resonance> resonances(const Medium& m) {
    std::vector<Resonance> out;
    if (const auto* l = std::get_if<LorentzMedium>(&m)) {
        if (l->electric_active()) {
            out.push_back({l->omega_0e, l->gamma_e});
            out.push_back({std::hypot(l->omega_0e, l->omega_pe), l->gamma_e});
        }
        if (l->magnetic_active()) {
            out.push_back({l->omega_0m, l->gamma_m});
            out.push_back({std::hypot(l->omega_0m, l->omega_pm), l->gamma_m});
        }
    }
    return out;
}

std::vector<double> omega_breakpoints(const Medium& m, double lo, double hi) {
    std::vector<double> out;
    for (const Resonance& r : resonances(m)) {
        if (r.width <= 0.0) continue;
        for (double s : {-10.0, -1.0, 0.0, 1.0, 10.0}) {
            const double w = r.omega + s * r.width;
            if (w > lo && w < hi) out.push_back(w);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> dedupe(std::vector<std::string> in) {
    std::vector<std::string> out;
    for (auto& w : in)
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(std::move(w));
    return out;
}

void check_lossy(const Medium& m, const char* who) {
    if (is_lossless(m))
        throw DomainError(std::string(who) + ": lossless medium; use the transparent assemblers");
}

struct Bins {
    std::vector<double> rho0;
    std::vector<double> error;
    std::vector<std::string> warnings;
};

// Zero-temperature densities on the output grid, plus summarised warnings.
Bins zero_temperature_bins(const Medium& m, const Particle& p, Mechanics mech, const IntegrationDomain& d,
                           const std::vector<double>& grid) {
    std::vector<DensityValue> vals(grid.size());
    parallel_for(grid.size(), d.jobs, [&](std::size_t i) { vals[i] = lossy_density(m, p, mech, grid[i], d); });
    Bins b;
    int unconverged = 0, capped = 0;
    double worst_tail = 0.0, worst_at = 0.0, first_unconverged = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        b.rho0.push_back(vals[i].value);
        b.error.push_back(vals[i].error);
        if (!vals[i].converged && unconverged++ == 0) first_unconverged = grid[i];
        if (vals[i].tail_ratio > d.relative_tolerance) {
            ++capped;
            if (vals[i].tail_ratio > worst_tail) worst_tail = vals[i].tail_ratio, worst_at = grid[i];
        }
    }
    if (unconverged)
        b.warnings.push_back("k-integral missed tolerance in " + std::to_string(unconverged) +
                             " bins (first at omega = " + fmt(first_unconverged) + " rad/s)");
    if (capped)
        b.warnings.push_back("k-integral not converged at k_max in " + std::to_string(capped) +
                             " bins; largest tail estimate " + fmt(worst_tail) + " of the value at omega = " +
                             fmt(worst_at) + " rad/s (result is cap-dependent)");
    return b;
}

struct Total {
    double value = 0.0;
    double error = 0.0;
    std::vector<std::string> warnings;
};

Total integrate_band(const std::function<double(double)>& f, const std::vector<double>& breaks, double lo, double hi,
                     double tol, const char* what) {
    Total t;
    if (!(hi > lo)) return t;
    quad::QuadOptions opts;
    opts.rel_tol = tol;
    opts.max_evaluations = 200000;
    const quad::QuadResult r = quad::integrate_bracketed(f, breaks, lo, hi, opts);
    t.value = r.value;
    t.error = r.error_estimate;
    if (!r.converged) {
        t.warnings.push_back(std::string(what) + " total missed tolerance: error estimate " + fmt(r.error_estimate) +
                             " W");
        for (const auto& w : r.warnings) t.warnings.push_back(std::string(what) + ": " + w);
    }
    return t;
}

}  // namespace

void IntegrationDomain::validate(bool need_k_max) const {
    if (!(omega_min >= 0.0)) throw DomainError("domain.omega_min: must be >= 0");
    if (!(omega_max > omega_min)) throw DomainError("domain.omega_max: must exceed domain.omega_min");
    if (need_k_max && (!(k_max > 0.0) || std::isinf(k_max))) throw DomainError("domain.k_max: must be finite and > 0");
    if (!(relative_tolerance > 1e-12 && relative_tolerance < 1e-2))
        throw DomainError("domain.tolerance: must lie in (1e-12, 1e-2)");
    if (bracket_refinement < 0) throw DomainError("domain.bracket_refinement: must be >= 0");
    if (omega_points < 1) throw DomainError("domain.omega_points: must be >= 1");
    if (log_spacing && !(omega_min > 0.0)) throw DomainError("domain.omega_min: log spacing requires > 0");
    if (jobs < 1) throw DomainError("jobs: must be >= 1");
}

std::vector<double> IntegrationDomain::grid() const {
    std::vector<double> g(static_cast<std::size_t>(omega_points));
    if (omega_points == 1) {
        g[0] = omega_max;
        return g;
    }
    const double n = omega_points - 1;
    for (int i = 0; i < omega_points; ++i) {
        const double t = i / n;
        g[static_cast<std::size_t>(i)] =
            log_spacing ? omega_min * std::pow(omega_max / omega_min, t) : omega_min + t * (omega_max - omega_min);
    }
    g.back() = omega_max;
    return g;
}

double lossy_prefactor(const Particle& p) {
    return p.charge * p.charge * p.speed() / (2.0 * constants::pi * constants::pi * constants::epsilon_0);
}

double transparent_prefactor(const Particle& p) {
    return p.charge * p.charge * p.speed() / (4.0 * constants::pi * constants::epsilon_0 * constants::c * constants::c);
}

DensityValue lossy_density(const Medium& m, const Particle& p, Mechanics mech, double omega,
                           const IntegrationDomain& domain, bool estimate_tail) {
    DensityValue out;
    if (omega <= 0.0) return out;
    const KInterval natural = admissible_k_range(mech, p, omega);
    const KInterval range = natural.intersect(0.0, domain.k_max);
    if (range.empty() || range.lo == range.hi) return out;

    const auto integrand = [&](double k) {
        const double cs = emission_angle(mech, p, omega, k);
        return k * spectral_kernel(m, omega, k) * std::max(0.0, 1.0 - cs * cs);
    };

    const Complex kr = omega / constants::c * std::sqrt(permittivity(m, Complex(omega)) * permeability(m, Complex(omega)));
    std::vector<double> breaks;
    const double re = std::abs(kr.real()), im = std::abs(kr.imag());
    auto add = [&](double k) {
        if (k > range.lo && k < range.hi) breaks.push_back(k);
    };
    // Geometric breakpoints from the peak width out to its centre distance:
    // a rule spanning many widths in one panel underestimates its own error.
    add(re);
    if (im > 0.0) {
        const double step = std::pow(10.0, 1.0 / std::max(domain.bracket_refinement, 1));
        for (double h = im; h < re; h *= step) {
            add(re - h);
            add(re + h);
        }
    }
    std::sort(breaks.begin(), breaks.end());

    quad::QuadOptions opts;
    opts.rel_tol = domain.relative_tolerance;
    opts.max_evaluations = 200000;
    const quad::QuadResult r = quad::integrate_bracketed(integrand, breaks, range.lo, range.hi, opts);
    const double pref = lossy_prefactor(p) * omega;
    out.value = pref * r.value;
    out.error = pref * r.error_estimate;
    out.converged = r.converged;

    if (estimate_tail && natural.hi > domain.k_max) {
        quad::QuadOptions topts;
        topts.rel_tol = 1e-3;
        const double hi = std::min(natural.hi, 10.0 * domain.k_max);
        const quad::QuadResult t = quad::integrate_adaptive(integrand, domain.k_max, hi, topts);
        out.tail_ratio = r.value != 0.0 ? std::abs(t.value / r.value) : (t.value != 0.0 ? inf : 0.0);
    }
    return out;
}

Spectrum power_classical_lossy(const Medium& m, const Particle& p, const IntegrationDomain& domain,
                               double temperature) {
    domain.validate();
    p.validate();
    check_lossy(m, "power_classical_lossy");
    if (!(temperature >= 0.0)) throw DomainError("regime.temperature: must be >= 0");

    Spectrum s;
    s.regime = {Mechanics::classical, temperature, MediumMode::lossy};
    s.cutoffs = {domain.omega_min, domain.omega_max, domain.k_max, inf, false};
    s.cap_dependent = true;
    s.omega_grid = domain.grid();
    Bins b = zero_temperature_bins(m, p, Mechanics::classical, domain, s.omega_grid);
    s.warnings = std::move(b.warnings);

    const auto weight = [&](double w) { return temperature > 0.0 && w > 0.0 ? coth_weight(w, temperature, p.hbar_scale) : 1.0; };
    for (std::size_t i = 0; i < s.omega_grid.size(); ++i) {
        const double f = weight(s.omega_grid[i]);
        s.density.push_back(b.rho0[i] * f);
        s.error_estimate.push_back(b.error[i] * f);
    }

    IntegrationDomain inner = domain;
    inner.relative_tolerance = std::max(domain.relative_tolerance * 0.1, 2e-12);
    const auto rho0 = [&](double w) { return lossy_density(m, p, Mechanics::classical, w, inner, false).value; };
    const auto breaks = omega_breakpoints(m, domain.omega_min, domain.omega_max);
    Total t = integrate_band([&](double w) { return rho0(w) * weight(w); }, breaks, domain.omega_min, domain.omega_max,
                             domain.relative_tolerance, "spectrum");
    s.total = t.value;
    s.total_error = t.error;
    s.warnings.insert(s.warnings.end(), t.warnings.begin(), t.warnings.end());

    if (temperature > 0.0) {
        Total t0 = integrate_band(rho0, breaks, domain.omega_min, domain.omega_max, domain.relative_tolerance,
                                  "zero-temperature component");
        s.warnings.insert(s.warnings.end(), t0.warnings.begin(), t0.warnings.end());
        SpectrumComponent zero{"zero_temperature", b.rho0, t0.value};
        SpectrumComponent thermal{"thermal", {}, s.total - t0.value};
        for (std::size_t i = 0; i < s.omega_grid.size(); ++i) thermal.density.push_back(s.density[i] - b.rho0[i]);
        s.components = {std::move(zero), std::move(thermal)};
    }
    s.warnings = dedupe(std::move(s.warnings));
    return s;
}

Spectrum power_quantum(const Medium& m, const Particle& p, const IntegrationDomain& domain, const RegimeSpec& regime) {
    domain.validate();
    p.validate();
    check_lossy(m, "power_quantum");
    if (regime.mechanics == Mechanics::classical)
        throw DomainError("regime.mechanics: power_quantum needs nonrel_quantum or rel_quantum");
    if (!(regime.temperature >= 0.0)) throw DomainError("regime.temperature: must be >= 0");
    const Mechanics mech = regime.mechanics;
    const double T = regime.temperature;
    const double eq = p.energy();

    Spectrum s;
    s.regime = {mech, T, MediumMode::lossy};
    const double w_kin = kinematic_limit_frequency(mech, p);
    const double k_kin = (mech == Mechanics::rel_quantum ? 2.0 * p.momentum() : 2.0 * p.mass * p.speed()) / p.hbar();
    s.cutoffs = {domain.omega_min, domain.omega_max, domain.k_max, w_kin, false};
    s.cap_dependent = domain.k_max < k_kin || domain.omega_max < w_kin;
    s.omega_grid = domain.grid();
    Bins b = zero_temperature_bins(m, p, mech, domain, s.omega_grid);
    s.warnings = std::move(b.warnings);

    const auto weight = [&](double w) { return T > 0.0 && w > 0.0 ? f_t_factor(w, T, eq, p.hbar_scale) : 1.0; };
    int reflected = 0;
    for (std::size_t i = 0; i < s.omega_grid.size(); ++i) {
        const double f = weight(s.omega_grid[i]);
        if (T > 0.0 && s.omega_grid[i] > 0.0 && f_t_reflected(s.omega_grid[i], eq, p.hbar_scale)) ++reflected;
        s.density.push_back(b.rho0[i] * f);
        s.error_estimate.push_back(b.error[i] * f);
    }
    if (reflected)
        s.warnings.push_back("F_T evaluated with |E_q - hbar*omega| on the reflected branch (hbar*omega > E_q) in " +
                             std::to_string(reflected) + " bins");

    IntegrationDomain inner = domain;
    inner.relative_tolerance = std::max(domain.relative_tolerance * 0.1, 2e-12);
    const auto rho0 = [&](double w) { return lossy_density(m, p, mech, w, inner, false).value; };
    const double hi = std::min(domain.omega_max, w_kin);
    const auto breaks = omega_breakpoints(m, domain.omega_min, hi);
    Total t = integrate_band([&](double w) { return rho0(w) * weight(w); }, breaks, domain.omega_min, hi,
                             domain.relative_tolerance, "spectrum");
    s.total = t.value;
    s.total_error = t.error;
    s.warnings.insert(s.warnings.end(), t.warnings.begin(), t.warnings.end());
    if (T > 0.0) {
        Total t0 = integrate_band(rho0, breaks, domain.omega_min, hi, domain.relative_tolerance,
                                  "zero-temperature component");
        s.warnings.insert(s.warnings.end(), t0.warnings.begin(), t0.warnings.end());
        SpectrumComponent zero{"zero_temperature", b.rho0, t0.value};
        SpectrumComponent thermal{"thermal", {}, s.total - t0.value};
        for (std::size_t i = 0; i < s.omega_grid.size(); ++i) thermal.density.push_back(s.density[i] - b.rho0[i]);
        s.components = {std::move(zero), std::move(thermal)};
    }
    s.warnings = dedupe(std::move(s.warnings));
    return s;
}

TransparentMedium TransparentMedium::constant(double n, double mu) {
    if (!(n > 0.0)) throw DomainError("refractive index must be > 0");
    TransparentMedium t{[n](double) { return n; }, [mu](double) { return mu; }, n};
    return t;
}

TransparentMedium TransparentMedium::from_lorentz(const LorentzMedium& m) {
    m.validate();
    if (!m.lossless()) throw DomainError("from_lorentz: medium has loss; set gamma_e = gamma_m = 0");
    TransparentMedium t;
    t.n = [m](double w) {
        const double n2 = (permittivity(m, w) * mu_and_kappa(m, w).mu).real();
        return n2 > 0.0 ? std::sqrt(n2) : 0.0;
    };
    t.mu = [m](double w) { return mu_and_kappa(m, w).mu.real(); };
    return t;
}

namespace {

Spectrum transparent_common(const TransparentMedium& m, const Particle& p, const IntegrationDomain& band,
                            const RegimeSpec& regime, const std::function<double(double)>& angle_bracket,
                            const std::function<double(double)>& thermal, double cutoff) {
    band.validate(false);
    p.validate();
    Spectrum s;
    s.regime = regime;
    s.cutoffs = {band.omega_min, band.omega_max, band.k_max, cutoff, false};
    const double pref = transparent_prefactor(p);
    const auto density = [&](double w) {
        if (w <= 0.0) return 0.0;
        const double n = m.n(w);
        if (!(n * p.beta > 1.0)) return 0.0;
        const double cs = angle_bracket(w) / (n * p.beta);
        const double val = 1.0 - cs * cs;
        if (!(val > 0.0)) return 0.0;
        return pref * w * m.mu(w) * val * thermal(w);
    };
    s.omega_grid = band.grid();
    for (double w : s.omega_grid) {
        s.density.push_back(density(w));
        s.error_estimate.push_back(0.0);
    }
    std::vector<double> breaks;
    if (std::isfinite(cutoff) && cutoff > band.omega_min && cutoff < band.omega_max) breaks.push_back(cutoff);
    Total t = integrate_band(density, breaks, band.omega_min, band.omega_max, band.relative_tolerance, "spectrum");
    s.total = t.value;
    s.total_error = t.error;
    s.warnings = std::move(t.warnings);
    return s;
}

}  // namespace

Spectrum power_classical_transparent(const TransparentMedium& m, const Particle& p, const IntegrationDomain& band,
                                     double temperature) {
    if (!(temperature >= 0.0)) throw DomainError("regime.temperature: must be >= 0");
    const RegimeSpec regime{Mechanics::classical, temperature, MediumMode::transparent};
    Spectrum s = transparent_common(
        m, p, band, regime, [](double) { return 1.0; },
        [&](double w) { return temperature > 0.0 ? coth_weight(w, temperature, p.hbar_scale) : 1.0; }, inf);
    s.cap_dependent = true;
    return s;
}

Spectrum power_quantum_transparent(const TransparentMedium& m, const Particle& p, const IntegrationDomain& band,
                                   const RegimeSpec& regime) {
    if (regime.mechanics == Mechanics::classical)
        throw DomainError("regime.mechanics: power_quantum_transparent needs a quantum regime");
    if (!(regime.temperature >= 0.0)) throw DomainError("regime.temperature: must be >= 0");
    const double mc2 = p.rest_energy();
    const double inv_gamma = std::sqrt(1.0 - p.beta * p.beta);
    const bool rel = regime.mechanics == Mechanics::rel_quantum;
    const auto bracket = [&](double w) {
        const double n = m.n(w);
        const double b = rel ? (n * n - 1.0) * inv_gamma : n * n;
        return 1.0 + p.hbar() * w * b / (2.0 * mc2);
    };
    const double eq = p.energy();
    const double T = regime.temperature;
    double cutoff = inf;
    if (m.nondispersive_index > 0.0 && m.nondispersive_index * p.beta > 1.0)
        cutoff = cutoff_frequency(regime.mechanics, p, m.nondispersive_index);
    Spectrum s = transparent_common(
        m, p, band, {regime.mechanics, T, MediumMode::transparent}, bracket,
        [&](double w) { return T > 0.0 ? f_t_factor(w, T, eq, p.hbar_scale) : 1.0; }, cutoff);
    s.cap_dependent = band.omega_max < cutoff;
    if (T > 0.0) {
        int reflected = 0;
        for (double w : s.omega_grid)
            if (w > 0.0 && f_t_reflected(w, eq, p.hbar_scale)) ++reflected;
        if (reflected)
            s.warnings.push_back("F_T evaluated with |E_q - hbar*omega| on the reflected branch (hbar*omega > E_q) in " +
                                 std::to_string(reflected) + " bins");
    }
    return s;
}

MatsubaraTotal power_classical_matsubara(const Medium& m, const Particle& p, const IntegrationDomain& domain,
                                         const ThermalState& state) {
    domain.validate();
    p.validate();
    state.validate();
    check_lossy(m, "power_classical_matsubara");
    if (!(state.temperature > 0.0)) throw DomainError("thermal.temperature: the Matsubara sum needs T > 0");
    if (!(p.hbar_scale > 0.0)) throw DomainError("particle.hbar_scale: the Matsubara sum needs hbar_scale > 0");

    // Fixed Gauss-Legendre panels: uniform over the band, refined to γ/4
    // within ±5γ of each resonance.
    const double lo = domain.omega_min, hi = domain.omega_max;
    std::vector<double> edges;
    constexpr int uniform_panels = 200;
    for (int i = 0; i <= uniform_panels; ++i) edges.push_back(lo + (hi - lo) * i / uniform_panels);
    for (const Resonance& r : resonances(m)) {
        if (r.width <= 0.0) continue;
        for (int j = -20; j <= 20; ++j) {
            const double w = r.omega + 0.25 * j * r.width;
            if (w > lo && w < hi) edges.push_back(w);
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(), [&](double a, double b) { return b - a <= 1e-12 * hi; }),
                edges.end());
    edges.back() = hi;

    const quad::GaussRule rule = quad::gauss_legendre(20);
    std::vector<double> nodes, weights;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double half = 0.5 * (edges[e + 1] - edges[e]), mid = 0.5 * (edges[e + 1] + edges[e]);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            nodes.push_back(mid + half * rule.nodes[q]);
            weights.push_back(half * rule.weights[q]);
        }
    }
    std::vector<double> rho(nodes.size());
    parallel_for(nodes.size(), domain.jobs, [&](std::size_t i) {
        rho[i] = lossy_density(m, p, Mechanics::classical, nodes[i], domain, false).value;
    });

    const double kT = constants::k_B * state.temperature;
    const double hb = p.hbar();
    const double pref = 2.0 * kT / hb;
    const double a = 2.0 * constants::pi * kT / hb;

    MatsubaraTotal out;
    out.terms = state.matsubara_count;
    const auto freqs = matsubara_frequencies(state, p.hbar_scale);
    double sum = 0.0;
    for (const MatsubaraFrequency& f : freqs) {
        double term = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            term += weights[i] * rho[i] * 2.0 * nodes[i] / (nodes[i] * nodes[i] + f.xi * f.xi);
        sum += f.weight * term;
    }
    out.mode_sum = pref * sum;

    // l ≥ L as ∫_{L−1/2}^∞ dl; the midpoint remainder is ≈ g'(L − 1/2)/24.
    const double l0 = static_cast<double>(state.matsubara_count) - 0.5;
    double tail = 0.0, slope = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double w = nodes[i], x = a * l0;
        tail += weights[i] * rho[i] * (2.0 / a) * std::atan(w / x);
        slope += weights[i] * rho[i] * 4.0 * w * a * x / ((w * w + x * x) * (w * w + x * x));
    }
    tail *= pref;
    slope *= pref;
    if (state.tail_policy == TailPolicy::integral_tail) {
        out.tail = tail;
        out.error_estimate = std::abs(slope) / 24.0;
    } else {
        out.error_estimate = std::abs(tail);
    }
    out.total = out.mode_sum + out.tail;
    if (out.error_estimate > domain.relative_tolerance * std::abs(out.total))
        out.warnings.push_back("Matsubara truncation error estimate " + fmt(out.error_estimate) + " W exceeds tolerance");
    return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace cherenkov
