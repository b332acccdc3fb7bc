#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "liouville/geometry.hpp"

namespace liouville {

// ---------------------------------------------------------------------------
// One-dimensional Liouville profile  U(t) = log(2 sech^2 t)
// ---------------------------------------------------------------------------

/// Asymptotic slope/offset: U(t) = -a0|t| + b0 + O(e^{-a0|t|}).
/// b0 is the true affine intercept of log(2 sech^2 t), namely log 8:
/// sech t ~ 2 e^{-|t|} gives 2 sech^2 t ~ 8 e^{-2|t|}.
inline constexpr double kA0 = 2.0;
inline const double kB0 = std::log(8.0);

struct Bubble1DValue {
    double U, Up, Upp;
};

/// Closed-form evaluation, overflow-safe for large |t|.
inline Bubble1DValue bubble_1d(double t) {
    Bubble1DValue v;
    v.U = kB0 - 2.0 * num::log_cosh(t);
    v.Up = -2.0 * std::tanh(t);
    const double s = num::sech(t);
    v.Upp = -2.0 * s * s;   // = -e^U
    return v;
}

/// Standard 2d bubble w(r) = log(8 / (1+r^2)^2); diagnostics only.
inline double bubble_2d(double r) {
    return std::log(8.0) - 2.0 * std::log1p(r * r);
}

// ---------------------------------------------------------------------------
// Kernel of L_eta = d_eta^2 + e^U
// ---------------------------------------------------------------------------

/// phi1 = eta U' + 2, phi2 = U'; Wronskian phi1' phi2 - phi1 phi2' = 4.
struct KernelBasis {
    static double phi1(double eta) { return eta * bubble_1d(eta).Up + 2.0; }
    static double phi2(double eta) { return bubble_1d(eta).Up; }
    static double phi1_d(double eta) {
        const auto b = bubble_1d(eta);
        return b.Up + eta * b.Upp;
    }
    static double phi2_d(double eta) { return bubble_1d(eta).Upp; }
    /// Constant in eta; equals 4 identically.
    static double wronskian(double eta) {
        return phi1_d(eta) * phi2(eta) - phi1(eta) * phi2_d(eta);
    }
    /// U''' = 4 sech^2(eta) tanh(eta), differentiated directly from U''.
    static double Uppp(double eta) {
        const double s = num::sech(eta);
        return 4.0 * s * s * std::tanh(eta);
    }
    /// L_eta phi_i, should vanish.
    static double residual_phi1(double eta) {
        const auto b = bubble_1d(eta);
        const double eU = std::exp(b.U);
        return 2.0 * b.Upp + eta * Uppp(eta) + eU * phi1(eta);
    }
    static double residual_phi2(double eta) {
        const auto b = bubble_1d(eta);
        return Uppp(eta) + std::exp(b.U) * b.Up;
    }
};

// ---------------------------------------------------------------------------
// Scaling parameters
// ---------------------------------------------------------------------------

/// beta, mu_lambda(s), alpha, delta_lambda(s) for a given lambda and geometry.
/// mu and delta are sampled on the free boundary's phi grid.
struct ScalingParams {
    double lambda = 0.0;
    double beta = 0.0;          // 2 log(1/(a0 lambda)) + b0
    double alpha = 0.0;         // (beta + 2 log beta) / (a0 R log sqrt(R1/R2))
    double M = 5.0;             // inner-region width constant
    AnnulusModel model{2.0, 0.5};
    std::vector<double> mu;     // mu_lambda at fb.phi[j]
    std::vector<double> delta;  // M log(beta) / (lambda mu)
    const double* dn_psi_data = nullptr;   // borrowed from fb (same grid)

    double beta_plus() const { return beta + 2.0 * std::log(beta); }
    /// lambda * mu at a phi sample; equals alpha |d_n psi| pointwise.
    double lambda_mu(int j) const { return lambda * mu[j]; }
    double mu_max() const;
    double delta_max() const;
};

/// Throws OutOfAsymptoticRange unless 0 < lambda <= 0.1 (beta > 1).
ScalingParams scaling_params(double lambda, const FreeBoundary& fb,
                             const AnnulusModel& model, double M = 5.0);

// ---------------------------------------------------------------------------
// Modulation shape functions
// ---------------------------------------------------------------------------

inline constexpr double kQInfinite = std::numeric_limits<double>::infinity();

/// Y = tanh(eta) sech(eta/Q) and the derived shapes Z1, Z2, W1, W2.
/// All derivatives are closed forms; Q = infinity drops the sech factor.
struct ModulationShape {
    double Q = kQInfinite;

    struct YVal { double Y, Yp, Ypp, Yppp; };
    YVal y(double eta) const;

    double Z1(double eta) const;
    double Z2(double eta) const;
    double W1(double eta) const;
    double W2(double eta) const;

    // sampled copies when built over a grid
    std::vector<double> grid, z1, z2, w1, w2;
};

ModulationShape modulation_shapes(double Q, const std::vector<double>& grid = {});

/// Truncation half-width for eta-integrals against e^{-2|eta|}-class tails.
inline double eta_truncation(double tol) {
    return std::max(25.0, 10.0 + 0.5 * std::fabs(std::log(tol)));
}

// ---------------------------------------------------------------------------
// Modulated inner approximation
// ---------------------------------------------------------------------------

/// Low-mode modulation expressed as callable coefficient functions of xi.
/// Derivatives in xi are not needed for v0 evaluation.
struct ModulationField {
    std::function<double(double)> a;   // a(xi)
    std::function<double(double)> b;   // b(xi)
    double Q = kQInfinite;
};

/// v0(s,t;f) = U(eta + f) + 2 log[mu (1 + d_eta f)], eta = lambda mu t.
/// f == nullptr is the unmodulated profile of the initial approximation.
/// Throws ModulationTooLarge when 1 + d_eta f <= 0.
double inner_v0(double s_arc, double t, const ModulationField* f,
                const ScalingParams& sp, const FreeBoundary& fb);

} // namespace liouville
