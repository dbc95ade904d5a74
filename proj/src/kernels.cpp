#include "cherenkov/kernels.hpp"

#include <cmath>
#include <sstream>

namespace cherenkov {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// cos θ(k) = B / k + A k for the three regimes.
struct AngleCoefficients {
    double A = 0.0;
    double B = 0.0;
};

AngleCoefficients angle_coefficients(Mechanics mech, const Particle& p, double omega) {
    const double v = p.speed();
    switch (mech) {
        case Mechanics::classical:
            return {0.0, omega / v};
        case Mechanics::nonrel_quantum:
            return {p.hbar() / (2.0 * p.mass * v), omega / v};
        case Mechanics::rel_quantum: {
            const double a = p.hbar() * omega * std::sqrt(1.0 - p.beta * p.beta) / (2.0 * p.rest_energy());
            return {a * constants::c * constants::c / (omega * v), omega * (1.0 - a) / v};
        }
    }
    return {};
}

}  // namespace

const char* to_string(Mechanics m) {
    switch (m) {
        case Mechanics::classical: return "classical";
        case Mechanics::nonrel_quantum: return "nonrel_quantum";
        case Mechanics::rel_quantum: return "rel_quantum";
    }
    return "?";
}

const char* to_string(MediumMode m) { return m == MediumMode::lossy ? "lossy" : "transparent"; }

void Particle::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("particle.beta: must lie in (0, 1)");
    if (!(mass > 0.0)) throw DomainError("particle.mass: must be > 0");
    if (!(hbar_scale >= 0.0 && hbar_scale <= 1.0)) throw DomainError("particle.hbar_scale: must lie in [0, 1]");
}

double Particle::lorentz_factor() const { return 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta)); }

double spectral_kernel(const Medium& m, double omega, double k) {
    if (is_lossless(m)) throw DomainError("spectral_kernel: lossless medium; use transparent_weights");
    const double kc2 = k * k * constants::c * constants::c;
    Complex eps, kappa;
    double im_eps, im_kappa;
    if (const auto* l = std::get_if<LorentzMedium>(&m)) {
        eps = permittivity(*l, omega);
        kappa = mu_and_kappa(*l, omega).kappa;
        im_eps = im_permittivity(*l, omega);
        im_kappa = im_inverse_permeability(*l, omega);
    } else {
        eps = permittivity(m, Complex(omega));
        kappa = inverse_permeability(m, Complex(omega));
        im_eps = eps.imag();
        im_kappa = kappa.imag();
    }
    const Complex z = -omega * omega * eps + kc2 * kappa;
    return (omega * omega * im_eps - kc2 * im_kappa) / std::norm(z);
}

double emission_angle(Mechanics mech, const Particle& p, double omega, double k) {
    const double v = p.speed();
    const double base = omega / (k * v);
    switch (mech) {
        case Mechanics::classical:
            return base;
        case Mechanics::nonrel_quantum:
            return base * (1.0 + p.hbar() * k * k / (2.0 * p.mass * omega));
        case Mechanics::rel_quantum: {
            const double kc_w = k * constants::c / omega;
            return base * (1.0 + p.hbar() * omega / (2.0 * p.rest_energy()) * (kc_w * kc_w - 1.0) *
                                     std::sqrt(1.0 - p.beta * p.beta));
        }
    }
    return base;
}

KInterval KInterval::intersect(double lo2, double hi2) const {
    return {std::max(lo, lo2), std::min(hi, hi2)};
}

KInterval admissible_k_range(Mechanics mech, const Particle& p, double omega) {
    if (!(omega > 0.0)) throw DomainError("admissible_k_range: requires omega > 0");
    const auto [A, B] = angle_coefficients(mech, p, omega);
    if (A == 0.0) return {std::abs(B), inf};

    // cos θ ≤ 1  <=>  A k² − k + B ≤ 0
    const double disc = 1.0 - 4.0 * A * B;
    if (disc < 0.0) return {1.0, 0.0};
    const double root = std::sqrt(disc);
    KInterval out{std::max(2.0 * B / (1.0 + root), 0.0), (1.0 + root) / (2.0 * A)};
    // cos θ ≥ −1  <=>  A k² + k + B ≥ 0, binding only for B < 0
    if (B < 0.0) out.lo = std::max(out.lo, -2.0 * B / (1.0 + std::sqrt(1.0 - 4.0 * A * B)));
    if (out.empty()) return {1.0, 0.0};
    return out;
}

double kinematic_limit_frequency(Mechanics mech, const Particle& p) {
    if (mech == Mechanics::classical || p.hbar_scale == 0.0) return inf;
    const double v = p.speed();
    if (mech == Mechanics::nonrel_quantum) return p.mass * v * v / (2.0 * p.hbar());
    // 4 a (1 − a) = β²  with  a = ħω√(1−β²) / (2mc²)
    const double inv_gamma = std::sqrt(1.0 - p.beta * p.beta);
    const double a = 0.5 * p.beta * p.beta / (1.0 + inv_gamma);  // (1 − √(1−β²)) / 2, cancellation-free
    return 2.0 * p.rest_energy() * a / (p.hbar() * inv_gamma);
}

double cutoff_frequency(Mechanics mech, const Particle& p, double n) {
    if (!(n * p.beta > 1.0)) {
        std::ostringstream msg;
        msg << "cutoff_frequency: n*beta = " << n * p.beta << " <= 1, radiation requires v > c/n";
        throw NoRadiationError(msg.str());
    }
    if (mech == Mechanics::classical || p.hbar_scale == 0.0) return inf;
    const double excess = 2.0 * p.rest_energy() * (n * p.beta - 1.0) / p.hbar();
    if (mech == Mechanics::nonrel_quantum) return excess / (n * n);
    return excess / ((n * n - 1.0) * std::sqrt(1.0 - p.beta * p.beta));
}

TransparentWeights transparent_weights(const Medium& lossless, const BranchSet& set) {
    TransparentWeights out;
    for (std::size_t i = 0; i < set.branches.size(); ++i) {
        const DispersionBranch& b = set.branches[i];
        const double w = b.omega.real();
        if (std::abs(b.omega.imag()) > 1e-9 * std::abs(b.omega))
            throw DomainError("transparent_weights: branch frequencies must be real");
        const double mu = permeability(lossless, Complex(w)).real();
        const double n2 = (permittivity(lossless, Complex(w)) * mu).real();
        if (!(n2 > 0.0) || !(w > 0.0)) {
            out.weights.push_back(0.0);
            continue;
        }
        out.weights.push_back(constants::pi * mu * b.v_g.real() / (2.0 * w * std::sqrt(n2) * constants::c));
        for (std::size_t j = 0; j < i; ++j) {
            const double wj = set.branches[j].omega.real();
            if (std::abs(w - wj) <= 1e-9 * std::abs(w)) {
                std::ostringstream msg;
                msg << "degenerate branches at omega = " << w << " (k = " << set.k << ")";
                out.warnings.push_back(msg.str());
            }
        }
    }
    return out;
}

SpinSum spin_sum_factor(const Particle& p, double omega, double k, double cos_theta, const SpinSumOptions& opts) {
    (void)omega;  // photon energy enters through the on-shell final state
    const double c = constants::c;
    const double beta = p.beta;
    const double e1 = p.energy();
    const double p1 = p.momentum();
    const double hk = p.hbar() * k;
    const double mc2 = p.rest_energy();

    // E2 − E1 from |p1 − ħk|² without cancellation
    const double e2_guess = std::sqrt(std::fma(p1 - hk * cos_theta, p1 - hk * cos_theta,
                                               hk * hk * (1.0 - cos_theta * cos_theta)) * c * c +
                                      mc2 * mc2);
    const double delta_e = c * c * hk * (hk - 2.0 * p1 * cos_theta) / (e1 + e2_guess);
    const double e2 = e1 + delta_e;

    SpinSum s;
    s.leading = beta * beta * (1.0 - cos_theta * cos_theta);
    // ½{1 − m²c⁴/(E1E2) − v1·v2/c²} rewritten with 1 = (mc²/E1)² + β²
    s.correction = 0.5 * (mc2 * mc2 * delta_e / (e1 * e1 * e2) + beta * (beta * delta_e + c * hk * cos_theta) / e2);
    s.value = s.leading + (opts.include_recoil_term ? s.correction : 0.0);
    return s;
}

}  // namespace cherenkov
