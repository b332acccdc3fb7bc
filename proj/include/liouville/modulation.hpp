#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "liouville/inner_linear.hpp"
#include "liouville/profile.hpp"

namespace liouville {

// ---------------------------------------------------------------------------
// Projection matrices
// ---------------------------------------------------------------------------

/// Z and W pair the shapes (Z1,Z2)/(W1,W2) against the dual functions
///   d1 = -2 k+_omega,  d2 = -2 l_omega (omega <= eps) or -2 k-_omega.
/// The -2 scaling makes the omega = 0 duals exactly (U', eta U' + 2), so
/// Z_0 = [[8,0],[0,-8]] in closed form. Both the matrices and the measured
/// projections carry the same scaling, so modulation solves are unaffected.
struct ProjectionMatrices {
    double omega = 0.0;
    Eigen::Matrix2d Z = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d W = Eigen::Matrix2d::Zero();
    double min_singular_value = 0.0;   // of Z - omega^2 W

    Eigen::Matrix2d system() const { return Z - omega * omega * W; }
};

ProjectionMatrices projection_matrices(const ModulationShape& shapes,
                                       const FundamentalSet& fs);

struct QCalibration {
    double Q = 0.0;
    double floor = 0.0;     // min over the omega grid of min_singular_value
};

/// Scans Q_grid, evaluating the invertibility floor over a 51-point omega
/// grid on [0, omega_star]; returns the maximizing Q.
/// Throws CalibrationFailed when no Q reaches floor 1e-6.
QCalibration calibrate_Q(double omega_star,
                         const std::vector<double>& Q_grid = {2, 4, 8, 16, 32},
                         double eps = 0.05, double T = 30.0, int nsteps = 12000);

// ---------------------------------------------------------------------------
// Modulation coefficients
// ---------------------------------------------------------------------------

struct ModulationCoeffs {
    int K_alpha = -1;                 // last retained eigen-index
    std::vector<double> a, b;         // per eigen-index k = 0..K_alpha
    double Q = kQInfinite;
    const SLSpectrum* spectrum = nullptr;
    double l2_norm = 0.0;             // sqrt(sum a^2 + b^2)
    double h2_norm = 0.0;             // with (1 + w~^2 + w~^4) weights

    double a_of_xi(double xi) const;
    double b_of_xi(double xi) const;
    ModulationField field() const;
};

/// Number of retained modes for cutoff omega_star (indices with
/// omega_{alpha,k} < omega_star).
int mode_cutoff(const SLSpectrum& spectrum, double omega_star);

std::vector<FundamentalSet> build_fs_bank(const SLSpectrum& spectrum, int K_alpha,
                                          double eps, double T, int nsteps);

/// h1k = ∬ g d1 y_{alpha,k} dxi deta, h2k with d2 (dual convention above).
std::pair<std::vector<double>, std::vector<double>>
project_rhs(const CylinderField& g, const SLSpectrum& spectrum,
            const std::vector<FundamentalSet>& fs_bank, double eps = 0.05);

/// Per-mode 2x2 solves (Z - omega^2 W)(a_k,b_k)^T = (h1k, h2k).
/// Throws CalibrationFailed on a singular system.
ModulationCoeffs solve_modulation(const std::vector<double>& h1,
                                  const std::vector<double>& h2,
                                  const std::vector<ProjectionMatrices>& mats,
                                  const SLSpectrum& spectrum, double Q);

// ---------------------------------------------------------------------------
// Orthogonality-closure iteration
// ---------------------------------------------------------------------------

struct PicardOptions {
    int max_iters = 50;
    double tol = 1e-8;            // stop when max |projection| is below
    double rel_change = 1e-10;    // or the update is relatively this small
    double damping = 1.0;
};

struct PicardHistory {
    std::vector<double> projection_norms;   // max |h| per iteration
    bool converged = false;
    int iters = 0;
};

/// Damped Picard iteration driving the measured projections of the residual
/// to zero. `project` maps the current coefficients to (h1,h2) projections of
/// the full nonlinear residual; the caller owns the residual assembly.
PicardHistory picard_closure(
    const std::function<std::pair<std::vector<double>, std::vector<double>>(
        const ModulationCoeffs&)>& project,
    const std::vector<ProjectionMatrices>& mats, const SLSpectrum& spectrum,
    double Q, ModulationCoeffs& coeffs, const PicardOptions& opts = {});

} // namespace liouville
