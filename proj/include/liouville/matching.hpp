#pragma once

#include <Eigen/Dense>
#include <vector>

#include "liouville/geometry.hpp"

namespace liouville {
namespace matching {

// ---------------------------------------------------------------------------
// Resonances and admissibility
// ---------------------------------------------------------------------------

/// alpha_n = (n/R) (1+q^n)/(1-q^n), strictly increasing with gap -> 1/R.
std::vector<double> resonance_sequence(const AnnulusModel& model, int N);

/// First index from which every computed gap alpha_{n+1} - alpha_n exceeds
/// 1/(4R) (empirical stand-in for the existential N_{R,q}).
int empirical_gap_index(const AnnulusModel& model, int horizon = 512);

struct AdmissibilityOptions {
    double gap = 0.0;          // 0 -> use 1/(4R)
    bool allow_near_resonance = false;   // resonance studies only
};

/// alpha > max{4R, 2/(-R log q)} and min_n |alpha_n - alpha| > 1/(4R).
bool admissible(double alpha, const AnnulusModel& model,
                const AdmissibilityOptions& opts = {});

// ---------------------------------------------------------------------------
// Per-mode matching systems
// ---------------------------------------------------------------------------

struct ModeRHS {
    int n = 0;
    cplx phi_minus = 0.0;     // Fourier coefficient of phi*- on C_R
    cplx phi_plus = 0.0;
};

/// Coefficients of one Fourier mode of the matching solution. The value
/// equations carry coefficient 1 on phi*-+ (the (wmin sharp) convention,
/// applied uniformly; see the residual checks).
struct ModeSolution {
    int n = 0;
    cplx h1 = 0.0, h2 = 0.0;
    cplx a_minus = 0.0, b_minus = 0.0;   // w~- = a r^n + b r^-n (n=0: a + b log r)
    cplx a_plus = 0.0, b_plus = 0.0;
    double residual = 0.0;               // of the full six-equation system
};

/// Throws ResonantMode0 when alpha R log(R1/R2) = 2.
ModeSolution solve_mode0(const ModeRHS& rhs, double alpha, const AnnulusModel& model);
/// Throws ResonantModeN within machine epsilon of alpha_n.
ModeSolution solve_mode_n(const ModeRHS& rhs, double alpha, const AnnulusModel& model);

/// Residual of the six defining equations, scaled per-row; used by the mode
/// solves and by the dense-solve oracle comparison.
double mode_system_residual(const ModeSolution& ms, const ModeRHS& rhs,
                            double alpha, const AnnulusModel& model);

// ---------------------------------------------------------------------------
// Grids on the two subannuli
// ---------------------------------------------------------------------------

/// Chebyshev collocation in r on [rin, rout] x uniform theta.
struct SubannulusGrid {
    double rin = 0.0, rout = 0.0;
    int nr = 32;         // polynomial degree (nr+1 radial points)
    int ntheta = 64;
    std::vector<double> r;       // nr+1 points, r[0] = rout, r[nr] = rin
    num::Chebyshev cheb{8};

    static SubannulusGrid make(double rin, double rout, int nr, int ntheta);
    double dr_factor() const { return 2.0 / (rout - rin); }
};

struct GridField {
    SubannulusGrid g;
    Eigen::MatrixXd v;    // (nr+1) x ntheta

    static GridField zero(const SubannulusGrid& g);
};

// ---------------------------------------------------------------------------
// Poisson pre-solve and the matching solve
// ---------------------------------------------------------------------------

/// Delta phi = g on each subannulus with phi = 0 on the outer/inner circle
/// and d_r phi = 0 on C_R; Fourier in theta x Chebyshev collocation in r.
std::pair<GridField, GridField> poisson_presolve(const GridField& g_plus,
                                                 const GridField& g_minus,
                                                 const AnnulusModel& model);

struct MatchNormReport {
    double h_h1 = 0.0;          // discrete H^1 norm of (h1, h2)
    double w_plus_h2 = 0.0;     // discrete H^2 norms
    double w_minus_h2 = 0.0;
    double input_l2 = 0.0;      // ||g+|| + ||g-||
    double stability_ratio = 0.0;
    double bc_value_defect = 0.0;    // sup |w-+ - (2h1 +- 2h2)| on C_R
    double bc_neumann_defect = 0.0;  // sup |d_r w-+ -+ 2 alpha h1| on C_R
};

struct MatchResult {
    std::vector<ModeSolution> modes;   // n = 0..n_modes
    GridField w_plus, w_minus;         // assembled w = w~ + phi
    GridField phi_plus, phi_minus;     // the pre-solve part
    MatchNormReport norms;

    double h1_at(double theta) const;
    double h2_at(double theta) const;
};

/// Throws ResonanceRejected for inadmissible alpha (unless the options allow
/// near-resonance solves, in which case the report carries the conditioning).
MatchResult matching_solve(const GridField& g_plus, const GridField& g_minus,
                           double alpha, const AnnulusModel& model, int n_modes,
                           const AdmissibilityOptions& opts = {});

} // namespace matching
} // namespace liouville
