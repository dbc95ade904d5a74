#include "cherenkov/medium.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "cherenkov/interp.hpp"

namespace cherenkov {

using detail::I;

void LorentzMedium::validate() const {
    auto require = [](bool ok, const char* field, const char* why) {
        if (!ok) throw DomainError(std::string("medium.") + field + ": " + why);
    };
    require(omega_pe >= 0.0, "omega_pe", "must be >= 0");
    require(omega_0e >= 0.0, "omega_0e", "must be >= 0");
    require(gamma_e >= 0.0, "gamma_e", "must be >= 0");
    require(omega_pm >= 0.0, "omega_pm", "must be >= 0");
    require(omega_0m >= 0.0, "omega_0m", "must be >= 0");
    require(gamma_m >= 0.0, "gamma_m", "must be >= 0");
    require(!(omega_pe > 0.0) || omega_0e > 0.0, "omega_0e", "must be > 0 when omega_pe > 0");
    require(!(omega_pm > 0.0) || omega_0m > 0.0, "omega_0m", "must be > 0 when omega_pm > 0");
}

double im_permittivity(const LorentzMedium& m, double omega) {
    detail::check_frequency(omega);
    if (!m.electric_active()) return 0.0;
    const double detune = m.omega_0e * m.omega_0e - omega * omega;
    const double damp = m.gamma_e * omega;
    return m.omega_pe * m.omega_pe * damp / (detune * detune + damp * damp);
}

double im_inverse_permeability(const LorentzMedium& m, double omega) {
    detail::check_frequency(omega);
    if (!m.magnetic_active()) return 0.0;
    // kappa = D_m / (D_m + w_pm^2): a Lorentzian shifted to w_0m^2 + w_pm^2
    const double detune = m.omega_0m * m.omega_0m + m.omega_pm * m.omega_pm - omega * omega;
    const double damp = m.gamma_m * omega;
    return -m.omega_pm * m.omega_pm * damp / (detune * detune + damp * damp);
}

double coupling_f_sq(const LorentzMedium& m, double omega) {
    detail::check_frequency(omega);
    if (m.electric_active() && !(m.gamma_e > 0.0))
        throw DomainError("coupling_f_sq: gamma_e = 0 has no absorption continuum");
    if (!m.electric_active()) return 0.0;
    const double detune = m.omega_0e * m.omega_0e - omega * omega;
    const double damp = m.gamma_e * omega;
    return 2.0 * m.gamma_e * constants::epsilon_0 * m.omega_pe * m.omega_pe * omega * omega / constants::pi /
           (detune * detune + damp * damp);
}

double coupling_g_sq(const LorentzMedium& m, double omega) {
    detail::check_frequency(omega);
    if (m.magnetic_active() && !(m.gamma_m > 0.0))
        throw DomainError("coupling_g_sq: gamma_m = 0 has no absorption continuum");
    if (!m.magnetic_active()) return 0.0;
    const double detune = m.omega_0m * m.omega_0m + m.omega_pm * m.omega_pm - omega * omega;
    const double damp = m.gamma_m * omega;
    return 2.0 * m.gamma_m * m.omega_pm * m.omega_pm * omega * omega / (constants::pi * constants::mu_0) /
           (detune * detune + damp * damp);
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

Complex permittivity(const Medium& m, Complex omega) {
    return std::visit(overloaded{[&](const LorentzMedium& l) { return permittivity(l, omega); },
                                 [](const FixedResponse& f) { return f.eps; }},
                      m);
}

Complex permeability(const Medium& m, Complex omega) {
    return std::visit(overloaded{[&](const LorentzMedium& l) { return mu_and_kappa(l, omega).mu; },
                                 [](const FixedResponse& f) { return f.mu; }},
                      m);
}

Complex inverse_permeability(const Medium& m, Complex omega) {
    return std::visit(overloaded{[&](const LorentzMedium& l) { return mu_and_kappa(l, omega).kappa; },
                                 [](const FixedResponse& f) { return 1.0 / f.mu; }},
                      m);
}

Complex d_permittivity(const Medium& m, Complex omega) {
    return std::visit(overloaded{[&](const LorentzMedium& l) -> Complex {
                                     if (!l.electric_active()) return 0.0;
                                     const Complex d = l.omega_0e * l.omega_0e - omega * omega - I * l.gamma_e * omega;
                                     return l.omega_pe * l.omega_pe * (2.0 * omega + I * l.gamma_e) / (d * d);
                                 },
                                 [](const FixedResponse&) { return Complex{0.0, 0.0}; }},
                      m);
}

Complex d_inverse_permeability(const Medium& m, Complex omega) {
    return std::visit(overloaded{[&](const LorentzMedium& l) -> Complex {
                                     if (!l.magnetic_active()) return 0.0;
                                     // kappa = D/(D + p^2)  =>  kappa' = p^2 D' / (D + p^2)^2
                                     const double p2 = l.omega_pm * l.omega_pm;
                                     const Complex d = l.omega_0m * l.omega_0m - omega * omega - I * l.gamma_m * omega;
                                     const Complex dd = -2.0 * omega - I * l.gamma_m;
                                     return p2 * dd / ((d + p2) * (d + p2));
                                 },
                                 [](const FixedResponse&) { return Complex{0.0, 0.0}; }},
                      m);
}

bool is_lossless(const Medium& m) {
    return std::visit(overloaded{[](const LorentzMedium& l) { return l.lossless(); },
                                 [](const FixedResponse& f) { return f.eps.imag() == 0.0 && f.mu.imag() == 0.0; }},
                      m);
}

ResponseSample sample_response(const Medium& m, double omega) {
    detail::check_frequency(omega);
    ResponseSample s;
    s.omega = omega;
    s.eps = permittivity(m, Complex(omega));
    s.mu = permeability(m, Complex(omega));
    s.kappa = inverse_permeability(m, Complex(omega));
    s.chi_e = s.eps - 1.0;
    s.chi_m = 1.0 - s.kappa;
    return s;
}

std::vector<ResponseSample> sample_response(const Medium& m, const Eigen::ArrayXd& omegas) {
    std::vector<ResponseSample> out;
    out.reserve(static_cast<std::size_t>(omegas.size()));
    for (double w : omegas) out.push_back(sample_response(m, w));
    return out;
}

CouplingDensity CouplingDensity::electric(const LorentzMedium& m, double omega_max) {
    return {[m](double w) { return coupling_f_sq(m, w); }, omega_max, Channel::electric};
}

CouplingDensity CouplingDensity::magnetic(const LorentzMedium& m, double omega_max) {
    return {[m](double w) { return coupling_g_sq(m, w); }, omega_max, Channel::magnetic};
}

CouplingDensity CouplingDensity::tabulated(std::span<const double> omega, std::span<const double> value,
                                           Channel channel) {
    if (omega.empty() || omega.front() != 0.0)
        throw DomainError("CouplingDensity::tabulated: table must start at omega = 0");
    auto spline = std::make_shared<CubicSpline>(omega, value);
    return {[spline](double w) { return (*spline)(w); }, omega.back(), channel};
}

double inverse_square_tail(double W, double omega) {
    if (!(W > omega)) throw DomainError("inverse_square_tail: requires W > omega");
    const double r = omega / W;
    if (r < 0.5) {
        // sum_n w^(2n) / ((2n+3) W^(2n+3))
        double term = 1.0 / (W * W * W);
        double sum = 0.0;
        const double r2 = r * r;
        for (int n = 0; n < 60; ++n) {
            sum += term / (2 * n + 3);
            term *= r2;
            if (term < 1e-18 * sum) break;
        }
        return sum;
    }
    return (std::log((W + omega) / (W - omega)) / (2.0 * omega) - 1.0 / W) / (omega * omega);
}

namespace {

// PV int_0^W s(x) / (x^2 - w^2) dx + tail * inverse_square_tail(W, w).
quad::QuadResult pv_over_squares(const quad::RealFunction& s, double omega, double W, double tail_amplitude,
                                 const quad::QuadOptions& opts) {
    quad::QuadResult r;
    if (omega == 0.0) {
        r = quad::integrate_adaptive([&s](double x) { return s(x) / (x * x); }, 0.0, W, opts);
    } else {
        r = quad::integrate_pv([&s, omega](double x) { return s(x) / (x + omega); }, omega, 0.0, W, opts);
    }
    r.value += tail_amplitude * inverse_square_tail(W, omega);
    return r;
}

}  // namespace

Complex susceptibility_from_coupling(const CouplingDensity& coupling, double omega, const quad::QuadOptions& opts) {
    detail::check_frequency(omega);
    if (!(coupling.omega_max > omega))
        throw DomainError("susceptibility_from_coupling: omega must lie below the coupling grid end");
    const double scale = coupling.channel == Channel::electric ? 1.0 / constants::epsilon_0 : constants::mu_0;
    const double W = coupling.omega_max;
    const double tail = coupling.density(W) * W * W;
    const quad::QuadResult pv = pv_over_squares(coupling.density, omega, W, tail, opts);
    if (!pv.converged)
        throw ConvergenceError("susceptibility_from_coupling: principal value did not converge at omega = " +
                               std::to_string(omega));
    const double im = omega > 0.0 ? constants::pi * coupling.density(omega) / (2.0 * omega) : 0.0;
    return {scale * pv.value, scale * im};
}

KkResidual kk_check(std::span<const double> omega, std::span<const Complex> chi, std::span<const double> test_omegas,
                    const quad::QuadOptions& opts) {
    if (omega.size() != chi.size() || omega.size() < 4) throw DomainError("kk_check: need >= 4 matching samples");
    if (omega.front() != 0.0) throw DomainError("kk_check: grid must start at omega = 0");
    std::vector<double> re(chi.size()), wim(chi.size());
    for (std::size_t i = 0; i < chi.size(); ++i) {
        if (!std::isfinite(chi[i].real()) || !std::isfinite(chi[i].imag()))
            throw DomainError("kk_check: non-finite susceptibility sample");
        re[i] = chi[i].real();
        wim[i] = omega[i] * chi[i].imag();
    }
    const CubicSpline re_spline(omega, re);
    const CubicSpline wim_spline(omega, wim);
    const double W = omega.back();
    const double tail = wim.back() * W * W;  // w Im chi ~ B / w^2

    KkResidual out;
    for (double w : test_omegas) {
        if (!(w >= 0.0 && w < W)) throw DomainError("kk_check: test frequency outside the sampled grid");
        const quad::QuadResult pv = pv_over_squares(wim_spline, w, W, tail, opts);
        if (!pv.converged) throw ConvergenceError("kk_check: principal value did not converge");
        const double rebuilt = 2.0 / constants::pi * pv.value;
        const double re_w = re_spline(w);
        const double diff = std::abs(re_w - rebuilt);
        const double im_w = w > 0.0 ? wim_spline(w) / w : 0.0;
        const double mag = std::hypot(re_w, im_w);
        out.absolute = std::max(out.absolute, diff);
        out.relative = std::max(out.relative, diff == 0.0 ? 0.0 : diff / mag);
    }
    return out;
}

KkResidual kk_check(std::span<const ResponseSample> samples, Channel channel, std::span<const double> test_omegas,
                    const quad::QuadOptions& opts) {
    std::vector<double> w(samples.size());
    std::vector<Complex> chi(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        w[i] = samples[i].omega;
        chi[i] = channel == Channel::electric ? samples[i].chi_e : samples[i].chi_m;
    }
    return kk_check(w, chi, test_omegas, opts);
}

}  // namespace cherenkov
