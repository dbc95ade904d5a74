#pragma once

#include <limits>
#include <string>
#include <vector>

#include "cherenkov/dispersion.hpp"
#include "cherenkov/medium.hpp"

namespace cherenkov {

enum class Mechanics { classical, nonrel_quantum, rel_quantum };
enum class MediumMode { lossy, transparent };

const char* to_string(Mechanics m);
const char* to_string(MediumMode m);

// A uniformly moving point charge. hbar_scale multiplies hbar wherever it
// enters (angles, cutoffs, thermal quanta); 0 is the classical limit.
struct Particle {
    double charge = constants::e;
    double mass = constants::m_e;
    double beta = 0.5;
    double hbar_scale = 1.0;

    void validate() const;
    double speed() const { return beta * constants::c; }
    double lorentz_factor() const;
    double rest_energy() const { return mass * constants::c * constants::c; }
    double energy() const { return lorentz_factor() * rest_energy(); }
    double momentum() const { return lorentz_factor() * mass * speed(); }
    double hbar() const { return hbar_scale * constants::hbar; }
};

struct RegimeSpec {
    Mechanics mechanics = Mechanics::classical;
    double temperature = 0.0;  // K
    MediumMode medium_mode = MediumMode::lossy;
};

/// Radiation kernel  K(ω, k) = Im[1 / (−ω² ε + k² c² κ)]
///                          = (ω² Im ε − k² c² Im κ) / |−ω² ε + k² c² κ|²,
/// nonnegative for a passive medium. Throws DomainError for a lossless
/// medium, whose kernel is a sum of delta functions (see transparent_weights).
double spectral_kernel(const Medium& m, double omega, double k);

// cos θ between photon wave vector and particle velocity; may exceed 1.
double emission_angle(Mechanics mech, const Particle& p, double omega, double k);

struct KInterval {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool empty() const { return !(lo <= hi); }
    bool contains(double k) const { return !empty() && k >= lo && k <= hi; }
    KInterval intersect(double lo2, double hi2) const;
};

/// Wave numbers at which |cos θ(ω, k)| ≤ 1. Classical: [ω/v, ∞) (callers
/// cap it). Quantum: bounded, and empty above kinematic_limit_frequency.
KInterval admissible_k_range(Mechanics mech, const Particle& p, double omega);

// Frequency at which the quantum admissible k-interval collapses to a point
// (nonrel: m v² / 2ħ); +inf for the classical regime or hbar_scale = 0.
double kinematic_limit_frequency(Mechanics mech, const Particle& p);

/// Recoil cutoff in a transparent nondispersive medium of index n:
///   nonrel  ω_c = 2 m c² (nβ − 1) / (ħ n²)
///   rel     ω_c = 2 m c² (nβ − 1) / (ħ (n² − 1) √(1 − β²))
/// +inf for classical mechanics or hbar_scale = 0. Throws NoRadiationError if nβ ≤ 1.
double cutoff_frequency(Mechanics mech, const Particle& p, double n);

struct TransparentWeights {
    // π μ(Ω_j) v_g^j / (2 Ω_j n(Ω_j) c), one per branch of the input set
    std::vector<double> weights;
    std::vector<std::string> warnings;
};

// Delta-function weights that replace K(ω, k) at fixed k in a lossless medium.
TransparentWeights transparent_weights(const Medium& lossless, const BranchSet& set);

struct SpinSumOptions {
    bool include_recoil_term = false;
};

struct SpinSum {
    double leading = 0.0;     // (v1²/c²)(1 − cos²θ)
    double correction = 0.0;  // ½{1 − √((1 − v1²/c²)(1 − v2²/c²)) − v1·v2/c²}
    double value = 0.0;       // leading (+ correction when requested)
};

// Polarization-summed Dirac spin factor for emission of (ω, k) at angle
// cos_theta; the final velocity v2 follows from p2 = p1 − ħk on shell.
SpinSum spin_sum_factor(const Particle& p, double omega, double k, double cos_theta,
                        const SpinSumOptions& opts = {});

}  // namespace cherenkov
