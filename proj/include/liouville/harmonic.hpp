#pragma once

#include <vector>

#include "liouville/geometry.hpp"
#include "liouville/profile.hpp"

namespace liouville {

// ---------------------------------------------------------------------------
// Harmonic measures of the annulus free boundary C_R
// ---------------------------------------------------------------------------

/// H^{+-}(r) = a^{+-} + b^{+-} log r on A^+ = (R, R1), A^- = (R2, R).
/// Closed forms; b^- + b^+ = 0 and H^{+-}(R) = 1 hold exactly.
struct HarmonicMeasure {
    double a_plus, a_minus, b_plus, b_minus;
    double R1, R2;

    double R() const { return std::sqrt(R1 * R2); }
    double H_plus(double r) const { return a_plus + b_plus * std::log(r); }
    double H_minus(double r) const { return a_minus + b_minus * std::log(r); }
    double dr_plus(double r) const { return b_plus / r; }
    double dr_minus(double r) const { return b_minus / r; }
};

HarmonicMeasure harmonic_measure(const AnnulusModel& model);

// ---------------------------------------------------------------------------
// Outer approximation w0^{+-} = (beta + 2 log beta) H^{+-} + Htilde^{+-}
// ---------------------------------------------------------------------------

/// Htilde^{+-} are harmonic in their subannuli with Dirichlet data
/// 2 log(|d_n psi| b^- / R) on C_R and zero on the outer/inner circle,
/// solved per Fourier mode in closed form.
class OuterApprox {
public:
    AnnulusModel model{2.0, 0.5};
    double beta_plus = 0.0;     // beta + 2 log beta
    double b0_const = 0.0;      // b0 = log 2 (carried for defect formulas)
    HarmonicMeasure hm{};

    // mode-0 radial solutions c + d log r per side
    double c0p = 0.0, d0p = 0.0, c0m = 0.0, d0m = 0.0;
    // mode-n coefficients in the scaled bases
    //   plus side:  A (r/R1)^n + B (R/r)^n,   minus side: A (r/R)^n + B (R2/r)^n
    struct Mode {
        cplx Ap, Bp, Am, Bm;
    };
    std::vector<Mode> modes;    // n = 1 .. nmodes
    std::vector<cplx> data_cf;  // Fourier coefficients of the gamma data

    double htilde_plus(double r, double theta) const;
    double htilde_minus(double r, double theta) const;
    double dr_htilde_plus(double r, double theta) const;
    double dr_htilde_minus(double r, double theta) const;

    double w0_plus(double r, double theta) const {
        return beta_plus * hm.H_plus(r) + htilde_plus(r, theta);
    }
    double w0_minus(double r, double theta) const {
        return beta_plus * hm.H_minus(r) + htilde_minus(r, theta);
    }
    double dr_w0_plus(double r, double theta) const {
        return beta_plus * hm.dr_plus(r) + dr_htilde_plus(r, theta);
    }
    double dr_w0_minus(double r, double theta) const {
        return beta_plus * hm.dr_minus(r) + dr_htilde_minus(r, theta);
    }
    /// Second radial derivative (for residual evaluation off gamma).
    double drr_w0_plus(double r, double theta) const;
    double drr_w0_minus(double r, double theta) const;
    /// Angular derivatives.
    double dth_w0_plus(double r, double theta) const;
    double dth_w0_minus(double r, double theta) const;
    double dthth_w0_plus(double r, double theta) const;
    double dthth_w0_minus(double r, double theta) const;
};

/// Throws GeometryError if Hopf positivity (-d_n H^+ > 0) fails, i.e. if the
/// sampled |d_n psi| is not strictly positive.
OuterApprox outer_w0(const AnnulusModel& model, const ScalingParams& sp,
                     const FreeBoundary& fb, int nmodes = 64);

/// (sup |w0 - b0 - 2 log mu|, sup |d_n w0 +- a0 lambda mu|) over gamma,
/// maxima over both sides.
std::pair<double, double> matching_defects(const OuterApprox& oa,
                                           const ScalingParams& sp,
                                           const FreeBoundary& fb);

} // namespace liouville
