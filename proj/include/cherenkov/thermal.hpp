#pragma once

#include <vector>

namespace cherenkov {

enum class TailPolicy { none, integral_tail };

struct ThermalState {
    double temperature = 0.0;  // K
    long matsubara_count = 10000;
    TailPolicy tail_policy = TailPolicy::integral_tail;

    void validate() const;
};

// All factors take the photon energy as hbar_scale · ħω; T = 0 returns the
// zero-temperature value without touching the exponentials. A positive T
// with hbar_scale = 0 is rejected (the factors diverge classically).

double bose_occupation(double omega, double temperature, double hbar_scale = 1.0);

// 1 / (e^{E/k_BT} + 1); E in joules.
double fermi_occupation(double energy, double temperature);

// coth(ħω / 2k_BT) = 1 + 2 N(ω).
double coth_weight(double omega, double temperature, double hbar_scale = 1.0);

// 1 + 2 / (e^{ħω/2k_BT} − 1): the variant whose high-T limit is 4k_BT/ħω.
// Kept only for comparison with coth_weight; nothing else uses it.
double coth_weight_half_exponent(double omega, double temperature, double hbar_scale = 1.0);

/// Photon stimulation combined with electron Pauli blocking,
///   F_T = (N + 1)(1 − n_F) − N n_F,   n_F at |E_q − ħω|,
/// evaluated as (1 − e^{−(x+y)}) / ((1 − e^{−x})(1 + e^{−y})) with
/// x = ħω/k_BT, y = |E_q − ħω|/k_BT. Equals 1 at T = 0.
double f_t_factor(double omega, double temperature, double particle_energy, double hbar_scale = 1.0);

// True when ħω > E_q, i.e. F_T is evaluated on the reflected |E_q − ħω| branch.
bool f_t_reflected(double omega, double particle_energy, double hbar_scale = 1.0);

struct MatsubaraFrequency {
    long index = 0;
    double xi = 0.0;      // 2π k_B T l / ħ
    double weight = 1.0;  // 1/2 for l = 0
};

// ξ_0 … ξ_{L−1}.
std::vector<MatsubaraFrequency> matsubara_frequencies(const ThermalState& state, double hbar_scale = 1.0);

}  // namespace cherenkov
