#include "cherenkov/dispersion.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace cherenkov {
namespace {

using Poly = Eigen::VectorXcd;
constexpr Complex I{0.0, 1.0};

Poly multiply(const Poly& a, const Poly& b) {
    Poly out = Poly::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly subtract(const Poly& a, const Poly& b) {
    Poly out = Poly::Zero(std::max(a.size(), b.size()));
    out.head(a.size()) += a;
    out.head(b.size()) -= b;
    return out;
}

Poly constant(Complex c) { return Poly::Constant(1, c); }

// w0^2 - w^2 - i g w  (+ shift)
Poly oscillator(double w0, double gamma, double shift = 0.0) {
    Poly p(3);
    p << w0 * w0 + shift, -I * gamma, -1.0;
    return p;
}

Poly trim(const Poly& p) {
    Eigen::Index n = p.size();
    const double scale = p.cwiseAbs().maxCoeff();
    while (n > 1 && std::abs(p[n - 1]) <= 1e-300 * std::max(scale, 1.0)) --n;
    return p.head(n);
}

void require_causal_fixed(const Medium& m) {
    if (const auto* f = std::get_if<FixedResponse>(&m)) {
        if (f->eps.imag() != 0.0 || f->mu.imag() != 0.0)
            throw DomainError("dispersion: fixed-response mode requires real eps and mu");
    }
}

}  // namespace

Complex dispersion_function(const Medium& m, Complex omega, double k) {
    const double kc2 = k * k * constants::c * constants::c;
    return omega * omega * permittivity(m, omega) - kc2 * inverse_permeability(m, omega);
}

Complex dispersion_derivative(const Medium& m, Complex omega, double k) {
    const double kc2 = k * k * constants::c * constants::c;
    return 2.0 * omega * permittivity(m, omega) + omega * omega * d_permittivity(m, omega) -
           kc2 * d_inverse_permeability(m, omega);
}

Eigen::VectorXcd dispersion_poly(const Medium& m, double k) {
    if (!(k > 0.0)) throw DomainError("dispersion_poly: requires k > 0");
    const double kc2 = k * k * constants::c * constants::c;
    Poly w2(3);
    w2 << 0.0, 0.0, 1.0;

    if (const auto* f = std::get_if<FixedResponse>(&m)) {
        Poly p(3);
        p << -kc2 / f->mu, 0.0, f->eps;
        return p;
    }
    const auto& l = std::get<LorentzMedium>(m);
    // eps = e_num / e_den, kappa = m_num / m_den
    Poly e_num = constant(1.0), e_den = constant(1.0), m_num = constant(1.0), m_den = constant(1.0);
    if (l.electric_active()) {
        e_den = oscillator(l.omega_0e, l.gamma_e);
        e_num = oscillator(l.omega_0e, l.gamma_e, l.omega_pe * l.omega_pe);
    }
    if (l.magnetic_active()) {
        m_num = oscillator(l.omega_0m, l.gamma_m);
        m_den = oscillator(l.omega_0m, l.gamma_m, l.omega_pm * l.omega_pm);
    }
    const Poly lhs = multiply(multiply(w2, e_num), m_den);
    const Poly rhs = multiply(multiply(constant(kc2), m_num), e_den);
    return trim(subtract(lhs, rhs));
}

Eigen::VectorXcd polynomial_roots(const Eigen::VectorXcd& coeffs) {
    const Poly p = trim(coeffs);
    const Eigen::Index n = p.size() - 1;
    if (n < 1) return Eigen::VectorXcd(0);
    // Rescale ω = s z so that the roots have unit geometric-mean magnitude.
    double s = 1.0;
    if (std::abs(p[0]) > 0.0) s = std::pow(std::abs(p[0]) / std::abs(p[n]), 1.0 / static_cast<double>(n));
    Poly q(n + 1);
    double sp = 1.0;
    for (Eigen::Index i = 0; i <= n; ++i, sp *= s) q[i] = p[i] * sp;
    q /= q[n];

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -q[i];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw RootCountError("polynomial_roots: eigenvalue solver failed");
    return solver.eigenvalues() * s;
}

BranchSet solve_branches(const Medium& m, double k) {
    if (!(k > 0.0)) throw DomainError("solve_branches: requires k > 0");
    require_causal_fixed(m);
    const double kc2 = k * k * constants::c * constants::c;
    const Poly poly = dispersion_poly(m, k);
    const Eigen::VectorXcd raw = polynomial_roots(poly);

    BranchSet set;
    set.k = k;
    set.polynomial_degree = static_cast<int>(poly.size() - 1);

    std::vector<Complex> roots;
    for (Complex z : raw) {
        Complex w = z;
        bool settled = false;
        for (int it = 0; it < 50; ++it) {
            const Complex d = dispersion_function(m, w, k);
            const Complex dd = dispersion_derivative(m, w, k);
            if (!std::isfinite(std::abs(d)) || !std::isfinite(std::abs(dd)) || dd == 0.0) break;
            const Complex step = d / dd;
            w -= step;
            if (std::abs(step) <= 1e-14 * std::abs(w)) {
                settled = true;
                break;
            }
        }
        // relative to the size of the two terms that cancel at a root
        const double scale = std::abs(w * w * permittivity(m, w)) + kc2 * std::abs(inverse_permeability(m, w));
        const double residual = std::abs(dispersion_function(m, w, k)) / scale;
        if (!std::isfinite(residual)) {
            set.warnings.push_back("spurious root discarded (response pole)");
            continue;
        }
        if (!settled && residual >= 1e-10) {
            std::ostringstream msg;
            msg << "Newton polish failed near omega = " << z << " (k = " << k << ")";
            throw PolishDivergenceError(msg.str());
        }
        if (residual >= 1e-10) {
            set.warnings.push_back("spurious root discarded (residual above 1e-10)");
            continue;
        }
        if (std::abs(w - z) > 1e-6 * std::max(std::abs(z), std::sqrt(kc2)))
            throw PolishDivergenceError("Newton polish jumped away from its starting root");
        roots.push_back(w);
    }

    // Pair Ω with −Ω*; roots on the imaginary axis are their own partners.
    constexpr double axis_tol = 1e-9;
    std::vector<Complex> positive;
    int negative = 0, on_axis = 0;
    for (Complex w : roots) {
        if (std::abs(w.real()) <= axis_tol * std::abs(w))
            ++on_axis;
        else if (w.real() > 0.0)
            positive.push_back(w);
        else
            ++negative;
    }
    if (negative != static_cast<int>(positive.size()) ||
        2 * negative + on_axis != set.polynomial_degree) {
        std::ostringstream msg;
        msg << "solve_branches: " << positive.size() << " positive / " << negative << " negative / " << on_axis
            << " imaginary roots do not pair for degree " << set.polynomial_degree;
        throw RootCountError(msg.str());
    }

    auto make_branch = [&](Complex w, double weight) {
        DispersionBranch b;
        b.k = k;
        b.omega = w;
        b.kappa = inverse_permeability(m, w);
        b.v_p = w / k;
        b.v_g = 2.0 * k * constants::c * constants::c * b.kappa / dispersion_derivative(m, w, k);
        b.damping_time = w.imag() == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::abs(w.imag());
        b.weight = weight;
        return b;
    };
    for (Complex w : positive) set.branches.push_back(make_branch(w, 1.0));
    for (Complex w : roots) {
        if (std::abs(w.real()) <= axis_tol * std::abs(w)) {
            set.branches.push_back(make_branch({0.0, w.imag()}, 0.5));
            std::ostringstream msg;
            msg << "purely imaginary root " << w.imag() << "i at k = " << k << " carried with half weight";
            set.warnings.push_back(msg.str());
        }
    }
    std::sort(set.branches.begin(), set.branches.end(),
              [](const DispersionBranch& a, const DispersionBranch& b) { return a.omega.real() < b.omega.real(); });
    return set;
}

SumRuleResiduals sum_rules(const BranchSet& set) {
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
    const double c = constants::c;
    for (const DispersionBranch& b : set.branches) {
        r1 += b.weight * (b.v_g / b.v_p).real();
        r2 += b.weight * (b.v_g / (c * b.kappa)).imag();
        r3 += b.weight * (b.v_g * b.v_p / (c * c)).real();
    }
    return {std::abs(r1 - 1.0), std::abs(r2), std::abs(r3 - 1.0)};
}

BromwichCoefficients bromwich_coefficients(const BranchSet& set, double t) {
    if (!(t >= 0.0)) throw DomainError("bromwich_coefficients: requires t >= 0");
    const double c = constants::c;
    const double kc = set.k * c;
    double xi = 0.0, im_sum = 0.0;
    for (const DispersionBranch& b : set.branches) {
        const Complex phase = std::exp(-I * b.omega * t);
        xi += b.weight * (phase * b.v_g / b.v_p).real();
        im_sum += b.weight * (phase * b.v_g / (c * b.kappa)).imag();
    }
    BromwichCoefficients out;
    out.xi = xi;
    out.zeta = -im_sum / kc;
    out.eta = Complex(xi, 0.0) - I * kc * out.zeta;
    return out;
}

}  // namespace cherenkov
