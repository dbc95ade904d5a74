#pragma once

#include <Eigen/Core>
#include <span>
#include <variant>
#include <vector>

#include "cherenkov/constants.hpp"
#include "cherenkov/errors.hpp"
#include "cherenkov/quad.hpp"

namespace cherenkov {

/// Single-resonance Lorentz magnetodielectric.
///
///   eps(w) = 1 + w_pe^2 / (w_0e^2 - w^2 - i g_e w)
///   mu(w)  = 1 + w_pm^2 / (w_0m^2 - w^2 - i g_m w),   kappa = 1 / mu
///
/// All parameters are angular frequencies in rad/s. A zero coupling switches
/// the corresponding response off (eps = 1 or mu = 1 identically).
struct LorentzMedium {
    double omega_pe = 0.0;
    double omega_0e = 1.0;
    double gamma_e = 0.0;
    double omega_pm = 0.0;
    double omega_0m = 1.0;
    double gamma_m = 0.0;

    bool electric_active() const { return omega_pe > 0.0; }
    bool magnetic_active() const { return omega_pm > 0.0; }
    // No absorption anywhere: only transparent-mode evaluation is meaningful.
    bool lossless() const {
        return (!electric_active() || gamma_e == 0.0) && (!magnetic_active() || gamma_m == 0.0);
    }
    // Throws DomainError naming the offending parameter.
    void validate() const;
};

// User-pinned constant response, for textbook limits (Frank-Tamm, vacuum).
struct FixedResponse {
    Complex eps{1.0, 0.0};
    Complex mu{1.0, 0.0};
};

using Medium = std::variant<LorentzMedium, FixedResponse>;

namespace detail {
inline void check_frequency(double omega) {
    if (!(omega >= 0.0)) throw DomainError("response functions require omega >= 0");
}
inline void check_frequency(const Complex&) {}
inline constexpr Complex I{0.0, 1.0};
}  // namespace detail

// Electric susceptibility ω_pe²/(ω_0e² − ω² − iγ_e ω). Accepts real or complex ω.
template <typename Scalar>
Complex chi_e(const LorentzMedium& m, Scalar omega) {
    detail::check_frequency(omega);
    if (!m.electric_active()) return {0.0, 0.0};
    const Complex w(omega);
    return m.omega_pe * m.omega_pe / (m.omega_0e * m.omega_0e - w * w - detail::I * m.gamma_e * w);
}

template <typename Scalar>
Complex permittivity(const LorentzMedium& m, Scalar omega) {
    return 1.0 + chi_e(m, omega);
}

struct Permeability {
    Complex mu;
    Complex kappa;
};

// mu and kappa = 1/mu. Throws DegenerateModelError where |mu| < 1e-14.
template <typename Scalar>
Permeability mu_and_kappa(const LorentzMedium& m, Scalar omega) {
    detail::check_frequency(omega);
    if (!m.magnetic_active()) return {{1.0, 0.0}, {1.0, 0.0}};
    const Complex w(omega);
    const Complex mu = 1.0 + m.omega_pm * m.omega_pm / (m.omega_0m * m.omega_0m - w * w - detail::I * m.gamma_m * w);
    if (std::abs(mu) < 1e-14)
        throw DegenerateModelError("inverse permeability has a pole (mu = 0)", std::abs(w));
    return {mu, 1.0 / mu};
}

// chi_m = 1 - kappa.
template <typename Scalar>
Complex chi_m(const LorentzMedium& m, Scalar omega) {
    return 1.0 - mu_and_kappa(m, omega).kappa;
}

// Closed-form Im eps and Im kappa on the real axis; sign-exact (no cancellation).
double im_permittivity(const LorentzMedium& m, double omega);
double im_inverse_permeability(const LorentzMedium& m, double omega);

// Coupling densities f^2(w) and g^2(w) of the absorption continua (SI).
// Throw DomainError for a lossless channel.
double coupling_f_sq(const LorentzMedium& m, double omega);
double coupling_g_sq(const LorentzMedium& m, double omega);

// Generic dispatch over the medium variant (complex frequency allowed).
Complex permittivity(const Medium& m, Complex omega);
Complex permeability(const Medium& m, Complex omega);
Complex inverse_permeability(const Medium& m, Complex omega);
Complex d_permittivity(const Medium& m, Complex omega);
Complex d_inverse_permeability(const Medium& m, Complex omega);
bool is_lossless(const Medium& m);

struct ResponseSample {
    double omega = 0.0;
    Complex eps, mu, kappa, chi_e, chi_m;
};

ResponseSample sample_response(const Medium& m, double omega);
std::vector<ResponseSample> sample_response(const Medium& m, const Eigen::ArrayXd& omegas);

enum class Channel { electric, magnetic };

// A coupling density on [0, omega_max]; beyond omega_max it is continued
// with the asymptotic A / w^2 tail matched at omega_max.
struct CouplingDensity {
    quad::RealFunction density;
    double omega_max = 0.0;
    Channel channel = Channel::electric;

    static CouplingDensity electric(const LorentzMedium& m, double omega_max);
    static CouplingDensity magnetic(const LorentzMedium& m, double omega_max);
    // Spline through tabulated samples; the table must start at omega = 0.
    static CouplingDensity tabulated(std::span<const double> omega, std::span<const double> value, Channel channel);
};

/// Susceptibility rebuilt from its coupling density:
///   chi_e = (1/eps0) int f^2(w') / (w'^2 - w^2 - i0) dw'
///   chi_m = mu0      int g^2(w') / (w'^2 - w^2 - i0) dw'
/// Real part by principal value, imaginary part from the -i0 prescription.
/// Throws ConvergenceError when the quadrature misses `opts`.
Complex susceptibility_from_coupling(const CouplingDensity& coupling, double omega,
                                     const quad::QuadOptions& opts = {});

struct KkResidual {
    double absolute = 0.0;  // max |Re chi - KK(Im chi)|
    double relative = 0.0;  // same, divided by |chi| at the test frequency (0 when both vanish)
};

// Kramers-Kronig consistency of a sampled susceptibility. The grid must
// start at omega = 0; Im chi is continued past the last sample as B / w^3.
KkResidual kk_check(std::span<const ResponseSample> samples, Channel channel, std::span<const double> test_omegas,
                    const quad::QuadOptions& opts = {});
KkResidual kk_check(std::span<const double> omega, std::span<const Complex> chi, std::span<const double> test_omegas,
                    const quad::QuadOptions& opts = {});

// int_W^inf dx / (x^2 (x^2 - w^2)) for W > w >= 0.
double inverse_square_tail(double W, double omega);

}  // namespace cherenkov
