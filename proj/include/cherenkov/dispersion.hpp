#pragma once

#include <Eigen/Core>
#include <limits>
#include <string>
#include <vector>

#include "cherenkov/medium.hpp"

namespace cherenkov {

// One representative root Ω_j(k) of  D(ω, k) = ω² ε(ω) − k² c² κ(ω).
struct DispersionBranch {
    double k = 0.0;
    Complex omega;
    Complex v_g;    // -(dD/dk) / (dD/dω) at the root
    Complex v_p;    // omega / k
    Complex kappa;  // κ(Ω_j), kept for the sum rules
    double damping_time = std::numeric_limits<double>::infinity();
    // 1 for a {Ω, -Ω*} pair represented by Ω; 1/2 for a self-paired root on the imaginary axis.
    double weight = 1.0;
};

struct BranchSet {
    double k = 0.0;
    std::vector<DispersionBranch> branches;  // ascending Re Ω
    int polynomial_degree = 0;
    std::vector<std::string> warnings;
};

// D(ω, k) and its ω-derivative on the unfactored response functions.
Complex dispersion_function(const Medium& m, Complex omega, double k);
Complex dispersion_derivative(const Medium& m, Complex omega, double k);

/// Coefficients (ascending powers of ω) of D(ω, k) with all response
/// denominators cleared:
///   ω² (D_e + ω_pe²) N_m − k² c² D_m D_e
/// with D_e = ω_0e² − ω² − iγ_eω, D_m = ω_0m² − ω² − iγ_mω, N_m = D_m + ω_pm².
/// A switched-off channel contributes no factor, so the degree is 2, 4 or 6.
Eigen::VectorXcd dispersion_poly(const Medium& m, double k);

// All complex roots of a polynomial (ascending coefficients) from the
// eigenvalues of its companion matrix, after rescaling ω to unit magnitude.
Eigen::VectorXcd polynomial_roots(const Eigen::VectorXcd& coeffs);

/// Solve for the branch representatives at wave number k.
///
/// Companion-matrix roots are Newton-polished on the unfactored D; roots
/// whose residual |D| / (k² c²) stays above 1e-10 are discarded as spurious.
/// Throws RootCountError when the {Ω, −Ω*} pairing does not account for
/// every root, PolishDivergenceError when Newton fails within 50 steps.
BranchSet solve_branches(const Medium& m, double k);

struct SumRuleResiduals {
    double s1 = 0.0;  // |Σ Re(v_g / v_p) − 1|
    double s2 = 0.0;  // |Σ Im(v_g / (c κ))|
    double s3 = 0.0;  // |Σ Re(v_g v_p / c²) − 1|
};

SumRuleResiduals sum_rules(const BranchSet& set);

struct BromwichCoefficients {
    double xi = 0.0;    // Σ Re(e^{-iΩt} v_g / v_p)
    double zeta = 0.0;  // inverse Laplace transform of 1/(s²ε + k²c²κ); sin(ckt)/(kc) in vacuum
    Complex eta;        // xi − i k c zeta
};

BromwichCoefficients bromwich_coefficients(const BranchSet& set, double t);

}  // namespace cherenkov
