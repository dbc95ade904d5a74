#include "cherenkov/thermal.hpp"

#include <cmath>
#include <limits>

#include "cherenkov/constants.hpp"
#include "cherenkov/errors.hpp"

namespace cherenkov {
namespace {

// ħω / k_BT, or +inf at T = 0.
double reduced_energy(double omega, double temperature, double hbar_scale) {
    if (!(omega > 0.0)) throw DomainError("thermal factors require omega > 0");
    if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
    if (temperature == 0.0) return std::numeric_limits<double>::infinity();
    if (!(hbar_scale > 0.0)) throw DomainError("thermal factors at T > 0 require hbar_scale > 0");
    return hbar_scale * constants::hbar * omega / (constants::k_B * temperature);
}

}  // namespace

void ThermalState::validate() const {
    if (!(temperature >= 0.0)) throw DomainError("thermal.temperature: must be >= 0");
    if (matsubara_count < 1) throw DomainError("thermal.matsubara_count: must be >= 1");
}

double bose_occupation(double omega, double temperature, double hbar_scale) {
    const double x = reduced_energy(omega, temperature, hbar_scale);
    if (std::isinf(x)) return 0.0;
    return 1.0 / std::expm1(x);
}

double fermi_occupation(double energy, double temperature) {
    if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
    if (temperature == 0.0) return energy > 0.0 ? 0.0 : (energy == 0.0 ? 0.5 : 1.0);
    const double y = energy / (constants::k_B * temperature);
    // symmetric form keeps full relative precision in both tails
    return y >= 0.0 ? std::exp(-y) / (1.0 + std::exp(-y)) : 1.0 / (1.0 + std::exp(y));
}

double coth_weight(double omega, double temperature, double hbar_scale) {
    const double x = reduced_energy(omega, temperature, hbar_scale);
    if (std::isinf(x)) return 1.0;
    return 1.0 + 2.0 / std::expm1(x);
}

double coth_weight_half_exponent(double omega, double temperature, double hbar_scale) {
    const double x = reduced_energy(omega, temperature, hbar_scale);
    if (std::isinf(x)) return 1.0;
    return 1.0 + 2.0 / std::expm1(0.5 * x);
}

double f_t_factor(double omega, double temperature, double particle_energy, double hbar_scale) {
    if (!(particle_energy > 0.0)) throw DomainError("f_t_factor requires particle energy > 0");
    const double x = reduced_energy(omega, temperature, hbar_scale);
    if (std::isinf(x)) return 1.0;
    const double y = std::abs(particle_energy - hbar_scale * constants::hbar * omega) /
                     (constants::k_B * temperature);
    return -std::expm1(-(x + y)) / (-std::expm1(-x) * (1.0 + std::exp(-y)));
}

bool f_t_reflected(double omega, double particle_energy, double hbar_scale) {
    return hbar_scale * constants::hbar * omega > particle_energy;
}

std::vector<MatsubaraFrequency> matsubara_frequencies(const ThermalState& state, double hbar_scale) {
    state.validate();
    if (state.temperature > 0.0 && !(hbar_scale > 0.0))
        throw DomainError("matsubara_frequencies at T > 0 require hbar_scale > 0");
    const double step =
        state.temperature == 0.0 ? 0.0 : 2.0 * constants::pi * constants::k_B * state.temperature / (hbar_scale * constants::hbar);
    std::vector<MatsubaraFrequency> out(static_cast<std::size_t>(state.matsubara_count));
    for (long l = 0; l < state.matsubara_count; ++l)
        out[static_cast<std::size_t>(l)] = {l, step * static_cast<double>(l), l == 0 ? 0.5 : 1.0};
    return out;
}

}  // namespace cherenkov
