#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "liouville/errors.hpp"
#include "liouville/numerics.hpp"

namespace liouville {

using num::cplx;

// ---------------------------------------------------------------------------
// Boundary curves and domains
// ---------------------------------------------------------------------------

/// Closed curve represented by a truncated Fourier series
/// z(t) = sum_k c_k e^{i k t}, t in [0, 2pi).
class BoundaryCurve {
public:
    enum class Orientation { positive, negative };

    BoundaryCurve() = default;

    static BoundaryCurve circle(cplx center, double radius);
    /// Builds the series from an ordered point list (closing point optional).
    static BoundaryCurve from_points(const std::vector<cplx>& pts);
    static BoundaryCurve from_fourier(const std::vector<cplx>& coeffs);

    cplx point(double t) const { return num::fourier_eval(coef_, t); }
    cplx deriv(double t, int order = 1) const { return num::fourier_eval_deriv(coef_, t, order); }

    /// Signed enclosed area; positive for counterclockwise curves.
    double signed_area() const;
    Orientation orientation() const {
        return signed_area() > 0 ? Orientation::positive : Orientation::negative;
    }
    /// Reverses the parametrization direction.
    BoundaryCurve reversed() const;
    /// Counterclockwise copy.
    BoundaryCurve normalized_ccw() const {
        return orientation() == Orientation::positive ? *this : reversed();
    }

    /// No self-intersection at the given sample resolution.
    bool is_simple(int nsamples = 256) const;
    /// Winding-number test for a point strictly inside.
    bool contains(cplx z, int nsamples = 512) const;

    cplx centroid(int nsamples = 256) const;
    const std::vector<cplx>& coeffs() const { return coef_; }

    /// Throws InvalidDomain unless closed-simple with nonzero area.
    void validate(int nsamples = 256) const;

private:
    std::vector<cplx> coef_;
};

struct DoublyConnectedDomain {
    BoundaryCurve outer;
    BoundaryCurve inner;

    /// Checks: both curves simple, inner strictly enclosed by outer,
    /// inner area positive (bounded complement component is not a point).
    void validate(int nsamples = 256) const;
};

/// Conformal reference geometry: the annulus B_R1 \ B_R2.
struct AnnulusModel {
    double R1;
    double R2;

    AnnulusModel(double R1_, double R2_) : R1(R1_), R2(R2_) {
        if (!(R1 > R2 && R2 > 0.0))
            throw InvalidDomain("AnnulusModel requires R1 > R2 > 0");
    }
    double R() const { return std::sqrt(R1 * R2); }
    double q() const { return R2 / R1; }
    /// log sqrt(R1/R2); the half-modulus entering the harmonic measures.
    double half_log_ratio() const { return 0.5 * std::log(R1 / R2); }
};

// ---------------------------------------------------------------------------
// Harmonic solves on curve-bounded ring regions (Laurent collocation)
// ---------------------------------------------------------------------------

/// H(z) = a0 + b0 log|z-z0| + sum_n Re[ cneg_n zh^-n + cpos_n zh^n ],
/// zh = (z-z0)/scale.  Complete for harmonic functions on ring regions
/// whose harmonic continuation reaches the expansion annulus; adequate for
/// the smooth, corner-free domains this library targets.
struct RingHarmonic {
    cplx z0;
    double scale = 1.0;
    double a0 = 0.0, b0 = 0.0;
    std::vector<cplx> cneg, cpos;
    double fit_residual = 0.0;   // max boundary-data misfit at collocation pts

    double eval(cplx z) const;
    /// Complex gradient g with dH/dn = Re(g * n), n the unit normal as complex.
    cplx grad(cplx z) const;
    /// Flux of dH/dn over any curve separating z0 from infinity,
    /// with normal pointing away from z0.
    double flux() const { return 2.0 * num::pi * b0; }
};

/// Least-squares Dirichlet solve between two closed curves.
/// data_* are boundary values sampled at uniform parameter t_j = 2 pi j / n.
RingHarmonic solve_ring_dirichlet(const BoundaryCurve& outer,
                                  const BoundaryCurve& inner,
                                  const std::vector<double>& data_outer,
                                  const std::vector<double>& data_inner,
                                  int nmodes, int nsamples);

/// Logarithmic capacity of a closed curve (Robin constant of the exterior
/// Green's function), by exterior Laurent collocation.
double logarithmic_capacity(const BoundaryCurve& curve, int nmodes = 48,
                            int nsamples = 256);

// ---------------------------------------------------------------------------
// Conformal map
// ---------------------------------------------------------------------------

struct GridSpec {
    int nsamples = 256;   // boundary collocation points per curve
    int nmodes = 48;      // Laurent modes
};

/// psi = exp(F) with F(z) = a0 + b0 Log(z-z0) + sum_n (cpos_n zh^n + cneg_n zh^-n).
/// Holomorphic by construction; the quality of the map is the accuracy with
/// which the boundary curves land on |w| = R1, R2.
class ConformalMap {
public:
    cplx z0;
    double scale = 1.0;
    double a0 = 0.0;      // real additive constant (rotation fixed to zero)
    double b0 = 1.0;      // log coefficient; must be 1 for single-valuedness
    std::vector<cplx> cneg, cpos;
    AnnulusModel model{2.0, 0.5};
    DoublyConnectedDomain domain;

    double boundary_residual = 0.0;    // max | |psi| - R_i | over boundary samples
    double conj_period_defect = 0.0;   // |b0 - 1| before renormalization
    double cr_residual = 0.0;          // finite-difference Cauchy-Riemann check

    cplx F(cplx z) const;
    cplx Fp(cplx z) const;
    cplx Fpp(cplx z) const;
    cplx forward(cplx z) const { return std::exp(F(z)); }
    cplx deriv(cplx z) const { return Fp(z) * forward(z); }

    /// Newton inversion; seeds from an internal sample table.
    cplx inverse(cplx w) const;
    cplx inverse(cplx w, cplx seed) const;

    /// theta <-> curve-parameter correspondence on a boundary component.
    struct Correspondence {
        std::vector<double> t;       // curve parameter samples
        std::vector<double> theta;   // arg psi at those samples (unwrapped)
    };
    Correspondence outer_corr, inner_corr;

    std::vector<cplx> seed_points, seed_images;   // inversion seed table
};

// ---------------------------------------------------------------------------
// Free boundary
// ---------------------------------------------------------------------------

/// The curve gamma = psi^{-1}(C_R), sampled at uniform psi-angle phi_j,
/// with |d_n psi|, curvature and the arclength chart.
class FreeBoundary {
public:
    double length = 0.0;
    std::vector<double> phi;        // uniform grid on [0, 2pi)
    std::vector<double> s;          // arclength at phi_j, s[0] = 0
    std::vector<cplx> points;       // gamma(phi_j)
    std::vector<cplx> normals;      // unit, pointing toward Omega^+ (|psi| increasing)
    std::vector<double> dn_psi;     // |psi'| on gamma
    std::vector<double> kappa;      // curvature, +1/R for the identity circle

    /// The physical domain curves, kept for the balance-defect solves.
    std::optional<BoundaryCurve> outer_curve, inner_curve;

    /// Identity-map annulus: gamma is the circle |z| = R.
    static FreeBoundary circle(const AnnulusModel& m, int n = 256);

    int size() const { return static_cast<int>(phi.size()); }
    bool is_identity_circle() const { return identity_; }

    double dn_psi_at_phi(double ph) const;
    double kappa_at_phi(double ph) const;
    double s_at_phi(double ph) const;
    double phi_at_s(double sv) const;
    double dn_psi_at_s(double sv) const { return dn_psi_at_phi(phi_at_s(sv)); }
    double min_dn_psi() const;
    /// Integral of |d_n psi| ds along gamma, computed from the traced points
    /// by spectral differentiation (oracle for ell_0 = 2 pi R).
    double ell0_quadrature() const;
    /// Total curvature ∮ kappa ds (rotation index times 2 pi).
    double total_curvature() const;

    std::vector<cplx> cf_dnpsi;     // Fourier coefficients of dn_psi over phi
    std::vector<cplx> cf_kappa;
    std::vector<cplx> cf_points;
    std::vector<cplx> cf_speed;     // coefficients of |z'(phi)|
    double mean_ds_dphi = 0.0;      // length / (2 pi)

    void build_spectral_tables();

private:
    bool identity_ = false;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Conformal modulus by the capacity potential: q = exp(-2 pi / F) where F is
/// the flux of the harmonic function with h = 0 on the outer and h = 1 on the
/// inner boundary (flux measured with the normal pointing toward the hole).
/// R1 is normalized to the logarithmic capacity of the outer curve.
AnnulusModel conformal_modulus(const DoublyConnectedDomain& domain,
                               const GridSpec& res = {});

ConformalMap build_conformal_map(const DoublyConnectedDomain& domain,
                                 const GridSpec& res = {});

FreeBoundary free_boundary(const ConformalMap& map, const AnnulusModel& model,
                           int nsamples = 256);

/// max over gamma of |d_n H^+ + d_n H^-| where each harmonic measure is
/// computed by an independent Dirichlet solve in its own component of
/// Omega \ gamma. Zero to machine precision on the concentric annulus.
double normal_balance_defect(const FreeBoundary& fb, const AnnulusModel& model,
                             const GridSpec& res = {});

} // namespace liouville
