#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cherenkov::quad {

using RealFunction = std::function<double(double)>;

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    long max_evaluations = 400000;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    // Set only when error_estimate <= max(abs_tol, rel_tol * |value|).
    bool converged = false;
    std::vector<std::string> warnings;
};

// Globally adaptive Gauss-Kronrod (10/21) integration over [a, b].
// The rule never evaluates the endpoints, so integrable endpoint
// singularities are allowed.
QuadResult integrate_adaptive(const RealFunction& f, double a, double b, const QuadOptions& opts);
QuadResult integrate_adaptive(const RealFunction& f, double a, double b, double rel_tol);

// Integral over [a, +inf) via x = a + t / (1 - t).
QuadResult integrate_semi_infinite(const RealFunction& f, double a, const QuadOptions& opts);

/// Cauchy principal value of  int_a^b f(x) / (x - pole) dx.
///
/// The 1/(x - pole) factor is supplied here; f must be smooth at the pole.
/// The interval symmetric about the pole is folded onto itself,
///   int_0^h [f(pole + t) - f(pole - t)] / t dt,
/// and the leftover one-sided piece is integrated directly.
/// Throws DomainError unless a < pole < b.
QuadResult integrate_pv(const RealFunction& f, double pole, double a, double b, const QuadOptions& opts);

/// Adaptive integration over [a, b] with the interval pre-split at the
/// given breakpoints, so each resonance gets its own refinement. Breakpoints
/// outside (a, b) are ignored and reported in `warnings`. On
/// non-convergence the warning names the worst subinterval.
QuadResult integrate_bracketed(const RealFunction& f, std::span<const double> breakpoints, double a, double b,
                               const QuadOptions& opts);

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule (Newton iteration on P_n).
GaussRule gauss_legendre(int n);

}  // namespace cherenkov::quad
