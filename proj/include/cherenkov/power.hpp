#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cherenkov/kernels.hpp"
#include "cherenkov/medium.hpp"
#include "cherenkov/thermal.hpp"

namespace cherenkov {

// Frequency band, wave-number cap and accuracy for a spectrum. The classical
// k-integral diverges logarithmically with magnetic loss, so k_max is part
// of the problem, not a numerical detail.
struct IntegrationDomain {
    double omega_min = 0.0;
    double omega_max = 0.0;
    double k_max = 0.0;
    double relative_tolerance = 1e-6;
    int bracket_refinement = 3;
    int omega_points = 101;
    bool log_spacing = false;
    int jobs = 1;

    // need_k_max = false for the transparent assemblers, which never integrate over k
    void validate(bool need_k_max = true) const;
    std::vector<double> grid() const;
};

struct CutoffRecord {
    double omega_min = 0.0;
    double omega_max = 0.0;
    double k_max = 0.0;
    // kinematic or recoil cutoff of the regime; +inf when there is none
    double omega_cutoff = std::numeric_limits<double>::infinity();
    bool automatic = false;  // caps derived from the cutoff rather than user-supplied
};

struct SpectrumComponent {
    std::string name;
    std::vector<double> density;
    double total = 0.0;
};

struct Spectrum {
    std::vector<double> omega_grid;     // rad/s
    std::vector<double> density;        // dP/dω, W / (rad/s)
    std::vector<double> error_estimate;
    double total = 0.0;                 // W, adaptive quadrature over the band
    double total_error = 0.0;
    bool cap_dependent = false;         // total depends on the user's caps (classical regimes)
    RegimeSpec regime;
    CutoffRecord cutoffs;
    std::vector<SpectrumComponent> components;
    std::vector<std::string> warnings;
};

// e² v / (2π² ε₀): the prefactor of the lossy-medium k-integrals.
double lossy_prefactor(const Particle& p);
// e² v / (4π ε₀ c²): the prefactor of the transparent (Frank-Tamm) forms.
double transparent_prefactor(const Particle& p);

struct DensityValue {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    // ∫ over [k_max, 10 k_max] relative to the capped integral; 0 when the
    // admissible range ends below k_max or the tail was not requested
    double tail_ratio = 0.0;
};

/// Zero-temperature spectral density in a lossy medium,
///   dP/dω = (e²v / 2π²ε₀) ω ∫ dk k K(ω, k) (1 − cos²θ(ω, k)),
/// over admissible_k_range(ω) capped at k_max. The interval is pre-split
/// around the branch wave number k_r = (ω/c)√(εμ).
DensityValue lossy_density(const Medium& m, const Particle& p, Mechanics mech, double omega,
                           const IntegrationDomain& domain, bool estimate_tail = true);

// Classical, lossy medium; T > 0 multiplies by coth(ħω/2k_BT) and reports
// the zero-temperature and thermal parts as components.
Spectrum power_classical_lossy(const Medium& m, const Particle& p, const IntegrationDomain& domain,
                               double temperature = 0.0);

Spectrum power_quantum(const Medium& m, const Particle& p, const IntegrationDomain& domain, const RegimeSpec& regime);

// Real refractive index and permeability on the band of a lossless medium.
struct TransparentMedium {
    std::function<double(double)> n;
    std::function<double(double)> mu;
    double nondispersive_index = 0.0;  // set by constant(); enables the cutoff record

    static TransparentMedium constant(double n, double mu = 1.0);
    // n = √(εμ) where εμ > 0, else 0 (no propagating branch).
    static TransparentMedium from_lorentz(const LorentzMedium& m);
};

// Frank-Tamm density (e²v/4πε₀c²) Ω μ [coth] (1 − c²/(v²n²)), zero where nβ ≤ 1.
Spectrum power_classical_transparent(const TransparentMedium& m, const Particle& p, const IntegrationDomain& band,
                                     double temperature = 0.0);

/// Recoil-corrected transparent density, clamped at zero above the cutoff:
///   (e²v/4πε₀c²) Ω μ [F_T] (1 − cos²θ),   cos θ = (c/nv) [1 + (ħΩ/2mc²) b],
/// with b = (n² − 1)√(1 − β²) (rel) or b = n² (nonrel, on-shell cos θ).
Spectrum power_quantum_transparent(const TransparentMedium& m, const Particle& p, const IntegrationDomain& band,
                                   const RegimeSpec& regime);

struct MatsubaraTotal {
    double total = 0.0;
    double mode_sum = 0.0;  // Σ_{l<L}, ξ_0 half-weighted
    double tail = 0.0;      // continuum estimate of l ≥ L
    double error_estimate = 0.0;
    long terms = 0;
    std::vector<std::string> warnings;
};

/// Classical thermal total through the pole expansion
///   coth(ħω/2k_BT) = (2k_BT/ħ) Σ'_l 2ω / (ω² + ξ_l²),
/// applied to the zero-temperature density and summed over Matsubara
/// frequencies. With TailPolicy::integral_tail the terms l ≥ L are
/// replaced by their integral from L − 1/2, which is exact in arctan form.
MatsubaraTotal power_classical_matsubara(const Medium& m, const Particle& p, const IntegrationDomain& domain,
                                         const ThermalState& state);

// Evaluate fn(i) for i in [0, n) on up to `jobs` threads; results land at
// index i, so the outcome does not depend on scheduling. The first
// exception by index is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace cherenkov
