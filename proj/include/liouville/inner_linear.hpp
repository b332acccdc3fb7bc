#pragma once

#include <Eigen/Dense>
#include <vector>

#include "liouville/geometry.hpp"
#include "liouville/profile.hpp"

namespace liouville {

// ---------------------------------------------------------------------------
// Fundamental sets of L_omega = d_eta^2 + e^U - omega^2
// ---------------------------------------------------------------------------

/// Basis of the mode operator built by inward integration from the ends.
/// k+ is recessive at -infinity and normalized by lim k+ e^{-omega eta} = 1
/// at +infinity; k- = -k+(-eta). For omega <= eps the second basis element
/// is l = (k+ - k-)/(2 omega), with the exact omega = 0 limit -(eta U'+2)/2.
///
/// Samples are stored in the scaled variables m+- = k+- e^{-+omega eta} so
/// that large omega never overflows; k evaluations recombine the factors.
struct FundamentalSet {
    double omega = 0.0;
    double eps = 0.05;
    double T = 30.0;
    std::vector<double> eta;           // uniform grid [-T, T]
    std::vector<double> mp, mp_d;      // m+ = k+ e^{-omega eta} and derivative
    std::vector<double> l, l_d;        // only for omega <= eps
    double wronskian = 0.0;            // of the branch basis (k+,k-) or (k+,l)
    double wronskian_drift = 0.0;      // max relative variation over the grid
    bool l_branch = false;
    bool degenerate = false;           // reflection basis collapsed (omega ~ 1)

    double h() const { return eta[1] - eta[0]; }
    int size() const { return static_cast<int>(eta.size()); }

    // grid-sample access; j indexes eta[j]
    double kp(int j) const { return mp[j] * std::exp(omega * eta[j]); }
    double km(int j) const {
        const int n = size();
        return -mp[n - 1 - j] * std::exp(-omega * eta[j]);
    }
    double kp_d(int j) const {
        return (mp_d[j] + omega * mp[j]) * std::exp(omega * eta[j]);
    }
    double km_d(int j) const {
        const int n = size();
        return (mp_d[n - 1 - j] + omega * mp[n - 1 - j]) * std::exp(-omega * eta[j]);
    }
    // scaled accessors m- = k- e^{+omega eta} = -m+(-eta)
    double mm(int j) const { return -mp[size() - 1 - j]; }
    double mm_d(int j) const { return mp_d[size() - 1 - j]; }

    /// L_omega applied to the branch basis, max abs over the grid
    /// (computed spectrally-free via the stored first derivatives).
    double operator_residual() const;
};

FundamentalSet fundamental_set(double omega, double eps = 0.05, double T = 30.0,
                               int nsteps = 12000);

// ---------------------------------------------------------------------------
// Ground state of -(d_eta^2 + e^U)
// ---------------------------------------------------------------------------

struct GroundState {
    double nu0 = 0.0;                 // should be -1
    std::vector<double> eta, Z0;      // L2-normalized to ||sqrt(2) sech|| = 2
    int negative_count = 0;           // inertia: # eigenvalues < 0
    double second_eigenvalue = 0.0;   // estimate of the next eigenvalue
};

GroundState ground_state(double h = 0.01, double T = 25.0);

// ---------------------------------------------------------------------------
// Mode solver (variation of parameters / Numerov, band-dependent)
// ---------------------------------------------------------------------------

struct ModeSolveReport {
    double orth_kp = 0.0, orth_second = 0.0;   // measured before projection
    bool projected = false;
    int band = 0;                              // 1..4 per the case split
    double norm_ratio = 0.0;                   // ||phi||_theta / ||g||_theta
};

struct ModeSolveResult {
    std::vector<double> phi;
    ModeSolveReport report;
};

/// Solves (d^2 + e^U - omega^2) phi = g_eff on the fs grid, where g_eff is g
/// minus the kernel projection when the orthogonality integrals exceed
/// tolerance (measured and reported, never silently).
/// Throws RequiresCompactSupport in the resonant band |omega - theta| <= eps
/// when g has visible mass outside [-0.9 T, 0.9 T]-compact support.
ModeSolveResult solve_mode(double omega, const std::vector<double>& g,
                           double theta, const FundamentalSet& fs,
                           double eps = 0.05);

// ---------------------------------------------------------------------------
// Sturm-Liouville spectrum along gamma
// ---------------------------------------------------------------------------

/// Periodic weighted problem y'' = -|d_n psi(s)|^2 w~^2 y on (0,|gamma|),
/// solved by Fourier collocation (spectral D2) as a symmetric-definite
/// generalized eigenproblem. omega_{alpha,k} = w~_k / alpha.
struct SLSpectrum {
    double alpha = 0.0;
    double glen = 0.0;                    // |gamma|
    std::vector<double> s;                // uniform grid on [0, |gamma|)
    std::vector<double> weight;           // |d_n psi(s)|^2
    std::vector<double> omegas;           // ascending, with multiplicity; [0] = 0
    Eigen::MatrixXd y;                    // column k: eigenfunction, ||y||_L2 = 1
    double orth_defect = 0.0;             // max weighted-inner-product off-diagonal

    int count() const { return static_cast<int>(omegas.size()); }
    /// Frequency of the distinct level ell (0 -> 0, ell>=1 -> pair value).
    double level_omega(int ell) const;
    /// Fourier functions of xi = alpha s: y_{alpha,k}(xi) = y_k(xi/alpha)/sqrt(alpha).
    double y_alpha(int k, double xi) const;
};

SLSpectrum sl_spectrum(const FreeBoundary& fb, double alpha, int kmax);

// ---------------------------------------------------------------------------
// Cylinder solve
// ---------------------------------------------------------------------------

struct CylinderField {
    std::vector<double> xi;      // uniform on [0, alpha |gamma|)
    std::vector<double> eta;     // uniform on [-T, T]
    Eigen::MatrixXd v;           // (neta x nxi)
    double theta = 0.3;

    double weighted_l2(double theta_exp) const;
    double sup() const { return v.cwiseAbs().maxCoeff(); }
};

struct CylinderBandReport {
    int k = 0;
    double omega = 0.0;
    int band = 0;
    double orth_kp = 0.0, orth_second = 0.0;
    bool projected = false;
};

struct CylinderSolveResult {
    CylinderField phi;
    std::vector<CylinderBandReport> bands;
};

/// Separates variables in the SL eigenbasis and applies solve_mode per band.
CylinderSolveResult solve_cylinder(const CylinderField& g, double theta,
                                   const SLSpectrum& spectrum, double eps = 0.05);

} // namespace liouville
