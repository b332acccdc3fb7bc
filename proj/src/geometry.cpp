#include "liouville/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace liouville {

using num::pi;

// ---------------------------------------------------------------------------
// BoundaryCurve
// ---------------------------------------------------------------------------

BoundaryCurve BoundaryCurve::circle(cplx center, double radius) {
    // z(t) = center + radius e^{it}: coefficients at k = 0 and k = 1
    std::vector<cplx> c(4, cplx(0.0));
    c[0] = center;
    c[1] = cplx(radius, 0.0);
    return from_fourier(c);
}

BoundaryCurve BoundaryCurve::from_fourier(const std::vector<cplx>& coeffs) {
    if (coeffs.empty()) throw InvalidDomain("BoundaryCurve: empty coefficients");
    BoundaryCurve b;
    b.coef_ = coeffs;
    return b;
}

BoundaryCurve BoundaryCurve::from_points(const std::vector<cplx>& pts_in) {
    std::vector<cplx> pts = pts_in;
    if (pts.size() >= 2 && std::abs(pts.front() - pts.back()) < 1e-14)
        pts.pop_back();   // drop the duplicated closing point
    if (pts.size() < 8) throw InvalidDomain("BoundaryCurve: need >= 8 points");
    BoundaryCurve b;
    b.coef_ = num::dft_coeffs(pts);
    return b;
}

double BoundaryCurve::signed_area() const {
    // (1/2) Im ∮ conj(z) z' dt, exact for trig polynomials with 4x oversampling
    const int n = std::max<int>(64, 4 * static_cast<int>(coef_.size()));
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * pi * j / n;
        s += std::imag(std::conj(point(t)) * deriv(t));
    }
    return 0.5 * s * 2.0 * pi / n;
}

BoundaryCurve BoundaryCurve::reversed() const {
    // t -> -t swaps coefficients k <-> -k
    const size_t n = coef_.size();
    std::vector<cplx> c(n);
    c[0] = coef_[0];
    for (size_t k = 1; k < n; ++k) c[k] = coef_[n - k];
    return from_fourier(c);
}

namespace {
bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
    auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}
} // namespace

bool BoundaryCurve::is_simple(int n) const {
    std::vector<cplx> p(n);
    for (int j = 0; j < n; ++j) p[j] = point(2.0 * pi * j / n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;   // adjacent through wrap
            if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

bool BoundaryCurve::contains(cplx z, int n) const {
    // winding number by angle accumulation
    double w = 0.0;
    cplx prev = point(0.0) - z;
    for (int j = 1; j <= n; ++j) {
        const cplx cur = point(2.0 * pi * j / n) - z;
        w += std::arg(cur / prev);
        prev = cur;
    }
    return std::fabs(w) > pi;    // |winding| >= 2 pi for interior points
}

cplx BoundaryCurve::centroid(int n) const {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += point(2.0 * pi * j / n);
    return s / static_cast<double>(n);
}

void BoundaryCurve::validate(int n) const {
    if (coef_.empty()) throw InvalidDomain("BoundaryCurve: empty");
    if (std::fabs(signed_area()) < 1e-12)
        throw InvalidDomain("BoundaryCurve: enclosed area is zero");
    if (!is_simple(n))
        throw InvalidDomain("BoundaryCurve: self-intersection at sample resolution");
}

void DoublyConnectedDomain::validate(int n) const {
    outer.validate(n);
    inner.validate(n);
    if (std::fabs(inner.signed_area()) < 1e-10)
        throw InvalidDomain("domain: bounded complement component is a point");
    // inner strictly enclosed by outer, no contact
    for (int j = 0; j < n; ++j) {
        const cplx z = inner.point(2.0 * pi * j / n);
        if (!outer.contains(z, n))
            throw InvalidDomain("domain: inner curve not strictly inside outer");
    }
    // curve-curve intersection test
    std::vector<cplx> po(n), qi(n);
    for (int j = 0; j < n; ++j) {
        po[j] = outer.point(2.0 * pi * j / n);
        qi[j] = inner.point(2.0 * pi * j / n);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (segments_intersect(po[i], po[(i + 1) % n], qi[j], qi[(j + 1) % n]))
                throw InvalidDomain("domain: inner and outer curves intersect");
}

// ---------------------------------------------------------------------------
// Ring-harmonic least squares
// ---------------------------------------------------------------------------

double RingHarmonic::eval(cplx z) const {
    const cplx zh = (z - z0) / scale;
    double v = a0 + b0 * std::log(std::abs(z - z0));
    cplx p(1.0, 0.0), m(1.0, 0.0);
    for (size_t n = 0; n < cpos.size(); ++n) {
        p *= zh;
        m /= zh;
        v += std::real(cpos[n] * p) + std::real(cneg[n] * m);
    }
    return v;
}

cplx RingHarmonic::grad(cplx z) const {
    // complex derivative of the holomorphic completion F with H = Re F;
    // dH/dn = Re(F'(z) n) for unit normal n as a complex number.
    const cplx zh = (z - z0) / scale;
    cplx g = b0 / (z - z0);
    cplx p(1.0, 0.0), m(1.0, 0.0);
    for (size_t n = 0; n < cpos.size(); ++n) {
        const double k = static_cast<double>(n + 1);
        g += cpos[n] * k * p / scale;
        m /= zh;
        g -= cneg[n] * k * m / zh / scale;
        p *= zh;
    }
    return g;
}

RingHarmonic solve_ring_dirichlet(const BoundaryCurve& outer,
                                  const BoundaryCurve& inner,
                                  const std::vector<double>& data_outer,
                                  const std::vector<double>& data_inner,
                                  int nmodes, int nsamples) {
    if (static_cast<int>(data_outer.size()) != nsamples ||
        static_cast<int>(data_inner.size()) != nsamples)
        throw NumericsFailure("solve_ring_dirichlet: data size mismatch");

    RingHarmonic H;
    H.z0 = inner.centroid();
    // geometric-mean radius for basis scaling
    double lg = 0.0;
    for (int j = 0; j < nsamples; ++j) {
        lg += std::log(std::abs(outer.point(2.0 * pi * j / nsamples) - H.z0));
        lg += std::log(std::abs(inner.point(2.0 * pi * j / nsamples) - H.z0));
    }
    H.scale = std::exp(lg / (2.0 * nsamples));

    // unknowns: a0, b0, Re/Im of cpos_n, cneg_n  -> 2 + 4*nmodes reals
    const int ncols = 2 + 4 * nmodes;
    const int nrows = 2 * nsamples;
    Eigen::MatrixXd A(nrows, ncols);
    Eigen::VectorXd rhs(nrows);
    for (int j = 0; j < nrows; ++j) {
        const bool on_outer = j < nsamples;
        const int jj = on_outer ? j : j - nsamples;
        const double t = 2.0 * pi * jj / nsamples;
        const cplx z = on_outer ? outer.point(t) : inner.point(t);
        const cplx zh = (z - H.z0) / H.scale;
        A(j, 0) = 1.0;
        A(j, 1) = std::log(std::abs(z - H.z0));
        cplx p(1.0, 0.0), m(1.0, 0.0);
        for (int n = 0; n < nmodes; ++n) {
            p *= zh;
            m /= zh;
            // Re[(x+iy) p] = x Re p - y Im p
            A(j, 2 + 4 * n + 0) = std::real(p);
            A(j, 2 + 4 * n + 1) = -std::imag(p);
            A(j, 2 + 4 * n + 2) = std::real(m);
            A(j, 2 + 4 * n + 3) = -std::imag(m);
        }
        rhs(j) = on_outer ? data_outer[jj] : data_inner[jj];
    }
    Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
    if (!sol.allFinite()) throw NumericsFailure("solve_ring_dirichlet: singular system");

    H.a0 = sol(0);
    H.b0 = sol(1);
    H.cpos.resize(nmodes);
    H.cneg.resize(nmodes);
    for (int n = 0; n < nmodes; ++n) {
        H.cpos[n] = cplx(sol(2 + 4 * n + 0), sol(2 + 4 * n + 1));
        H.cneg[n] = cplx(sol(2 + 4 * n + 2), sol(2 + 4 * n + 3));
    }
    Eigen::VectorXd resid = A * sol - rhs;
    H.fit_residual = resid.cwiseAbs().maxCoeff();
    return H;
}

double logarithmic_capacity(const BoundaryCurve& curve, int nmodes, int nsamples) {
    // exterior Green's function g = log|z - z0| + g0 + sum Re[c_n zh^-n],
    // g = 0 on the curve; capacity = exp(-g0).
    const cplx z0 = curve.centroid();
    double lg = 0.0;
    for (int j = 0; j < nsamples; ++j)
        lg += std::log(std::abs(curve.point(2.0 * pi * j / nsamples) - z0));
    const double scale = std::exp(lg / nsamples);

    const int ncols = 1 + 2 * nmodes;
    Eigen::MatrixXd A(nsamples, ncols);
    Eigen::VectorXd rhs(nsamples);
    for (int j = 0; j < nsamples; ++j) {
        const cplx z = curve.point(2.0 * pi * j / nsamples);
        const cplx zh = (z - z0) / scale;
        A(j, 0) = 1.0;
        cplx m(1.0, 0.0);
        for (int n = 0; n < nmodes; ++n) {
            m /= zh;
            A(j, 1 + 2 * n) = std::real(m);
            A(j, 1 + 2 * n + 1) = -std::imag(m);
        }
        rhs(j) = -std::log(std::abs(z - z0));
    }
    Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
    if (!sol.allFinite()) throw NumericsFailure("logarithmic_capacity: singular system");
    return std::exp(-sol(0));
}

// ---------------------------------------------------------------------------
// conformal_modulus / build_conformal_map
// ---------------------------------------------------------------------------

AnnulusModel conformal_modulus(const DoublyConnectedDomain& domain, const GridSpec& res) {
    if (res.nsamples < 32) throw InvalidDomain("conformal_modulus: nsamples too small");
    domain.validate(res.nsamples);
    const BoundaryCurve outer = domain.outer.normalized_ccw();
    const BoundaryCurve inner = domain.inner.normalized_ccw();

    const std::vector<double> zero(res.nsamples, 0.0), one(res.nsamples, 1.0);
    RingHarmonic h = solve_ring_dirichlet(outer, inner, zero, one, res.nmodes, res.nsamples);
    // h = 1 on the hole: b0 < 0; flux toward the hole is -2 pi b0 > 0 and
    // q = exp(-2 pi / F) = exp(1 / b0).
    if (!(h.b0 < 0.0))
        throw NumericsFailure("conformal_modulus: capacity potential has wrong flux sign");
    const double q = std::exp(1.0 / h.b0);
    if (!(q > 0.0 && q < 1.0))
        throw NumericsFailure("conformal_modulus: modulus out of (0,1)");

    const double R1 = logarithmic_capacity(outer, res.nmodes, res.nsamples);
    return AnnulusModel(R1, q * R1);
}

namespace {

void fill_correspondence(const ConformalMap& map, const BoundaryCurve& curve,
                         int nsamples, ConformalMap::Correspondence& corr) {
    corr.t.resize(nsamples);
    corr.theta.resize(nsamples);
    double prev = 0.0;
    for (int j = 0; j < nsamples; ++j) {
        const double t = 2.0 * pi * j / nsamples;
        double th = std::arg(map.forward(curve.point(t)));
        if (j > 0) {
            while (th < prev - pi) th += 2.0 * pi;
            while (th > prev + pi) th -= 2.0 * pi;
        }
        corr.t[j] = t;
        corr.theta[j] = th;
        prev = th;
    }
}

} // namespace

ConformalMap build_conformal_map(const DoublyConnectedDomain& domain, const GridSpec& res) {
    const AnnulusModel model = conformal_modulus(domain, res);
    const BoundaryCurve outer = domain.outer.normalized_ccw();
    const BoundaryCurve inner = domain.inner.normalized_ccw();

    // G harmonic with G = log R1 on outer, log R2 on inner; the conjugate of
    // b0 log|z-z0| has period 2 pi b0, so b0 must be 1 for a single-valued
    // psi = exp(G + i conj G).
    const std::vector<double> d_out(res.nsamples, std::log(model.R1));
    const std::vector<double> d_in(res.nsamples, std::log(model.R2));
    RingHarmonic G = solve_ring_dirichlet(outer, inner, d_out, d_in, res.nmodes, res.nsamples);

    ConformalMap map;
    map.domain = {outer, inner};
    map.model = model;
    map.z0 = G.z0;
    map.scale = G.scale;
    map.conj_period_defect = std::fabs(G.b0 - 1.0);
    if (map.conj_period_defect > 1e-6)
        throw NumericsFailure("build_conformal_map: conjugate-period mismatch "
                              + std::to_string(map.conj_period_defect));
    // snap b0 to 1 so exp(F) is exactly single-valued; the O(defect) boundary
    // error this introduces is recorded in boundary_residual below
    map.a0 = G.a0;
    map.b0 = 1.0;
    map.cneg = G.cneg;
    map.cpos = G.cpos;

    // boundary residual
    double bres = 0.0;
    for (int j = 0; j < res.nsamples; ++j) {
        const double t = 2.0 * pi * j / res.nsamples;
        bres = std::max(bres, std::fabs(std::abs(map.forward(outer.point(t))) - model.R1));
        bres = std::max(bres, std::fabs(std::abs(map.forward(inner.point(t))) - model.R2));
    }
    map.boundary_residual = bres;

    // finite-difference Cauchy-Riemann diagnostic on a small interior set
    double cr = 0.0;
    const double h = 1e-5;
    for (int j = 0; j < 16; ++j) {
        const double t = 2.0 * pi * j / 16;
        const cplx z = 0.5 * (outer.point(t) + inner.point(t));
        const cplx fx = (map.forward(z + h) - map.forward(z - h)) / (2.0 * h);
        const cplx fy = (map.forward(z + cplx(0, h)) - map.forward(z - cplx(0, h))) / (2.0 * h);
        // u_x - v_y and u_y + v_x
        cr = std::max(cr, std::fabs(fx.real() - fy.imag()));
        cr = std::max(cr, std::fabs(fx.imag() + fy.real()));
    }
    map.cr_residual = cr;

    fill_correspondence(map, outer, res.nsamples, map.outer_corr);
    fill_correspondence(map, inner, res.nsamples, map.inner_corr);

    // inversion seed table: blended samples between the two curves
    const int nt = 64, nr = 9;
    map.seed_points.reserve(nt * nr);
    map.seed_images.reserve(nt * nr);
    for (int i = 0; i < nt; ++i) {
        const double t = 2.0 * pi * i / nt;
        for (int k = 0; k < nr; ++k) {
            const double sgm = (k + 0.5) / nr;
            const cplx z = inner.point(t) * (1.0 - sgm) + outer.point(t) * sgm;
            map.seed_points.push_back(z);
            map.seed_images.push_back(map.forward(z));
        }
    }
    return map;
}

cplx ConformalMap::F(cplx z) const {
    const cplx zh = (z - z0) / scale;
    cplx v = a0 + b0 * std::log(z - z0);
    cplx p(1.0, 0.0), m(1.0, 0.0);
    for (size_t n = 0; n < cpos.size(); ++n) {
        p *= zh;
        m /= zh;
        v += cpos[n] * p + cneg[n] * m;
    }
    return v;
}

cplx ConformalMap::Fp(cplx z) const {
    const cplx zh = (z - z0) / scale;
    cplx v = b0 / (z - z0);
    cplx p(1.0, 0.0), m(1.0, 0.0);
    for (size_t n = 0; n < cpos.size(); ++n) {
        const double k = static_cast<double>(n + 1);
        v += cpos[n] * k * p / scale;
        m /= zh;
        v -= cneg[n] * k * m / zh / scale;
        p *= zh;
    }
    return v;
}

cplx ConformalMap::Fpp(cplx z) const {
    const cplx zh = (z - z0) / scale;
    cplx v = -b0 / ((z - z0) * (z - z0));
    const double s2 = scale * scale;
    const cplx izh = 1.0 / zh;
    cplx pk = izh;          // zh^{k-2}, starting at k = 1
    cplx mk = izh * izh * izh;   // zh^{-k-2}, starting at k = 1
    for (size_t n = 0; n < cpos.size(); ++n) {
        const double k = static_cast<double>(n + 1);
        v += cpos[n] * k * (k - 1.0) * pk / s2;
        v += cneg[n] * k * (k + 1.0) * mk / s2;
        pk *= zh;
        mk *= izh;
    }
    return v;
}

cplx ConformalMap::inverse(cplx w) const {
    // nearest seed
    size_t best = 0;
    double bd = 1e300;
    for (size_t i = 0; i < seed_images.size(); ++i) {
        const double d = std::abs(seed_images[i] - w);
        if (d < bd) { bd = d; best = i; }
    }
    return inverse(w, seed_points[best]);
}

cplx ConformalMap::inverse(cplx w, cplx seed) const {
    cplx z = seed;
    for (int it = 0; it < 60; ++it) {
        const cplx r = forward(z) - w;
        if (std::abs(r) < 1e-13 * std::abs(w)) return z;
        const cplx dz = r / deriv(z);
        // damped step, capped to stay within the seed-table scale
        cplx step = dz;
        const double cap = 0.5 * scale;
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
    }
    if (std::abs(forward(z) - w) > 1e-9 * std::abs(w))
        throw NumericsFailure("ConformalMap::inverse: Newton did not converge");
    return z;
}

// ---------------------------------------------------------------------------
// FreeBoundary
// ---------------------------------------------------------------------------

FreeBoundary FreeBoundary::circle(const AnnulusModel& m, int n) {
    FreeBoundary fb;
    fb.identity_ = true;
    const double R = m.R();
    fb.length = 2.0 * pi * R;
    fb.phi.resize(n);
    fb.s.resize(n);
    fb.points.resize(n);
    fb.normals.resize(n);
    fb.dn_psi.assign(n, 1.0);
    fb.kappa.assign(n, 1.0 / R);
    for (int j = 0; j < n; ++j) {
        const double ph = 2.0 * pi * j / n;
        fb.phi[j] = ph;
        fb.s[j] = R * ph;
        fb.points[j] = std::polar(R, ph);
        fb.normals[j] = std::polar(1.0, ph);
    }
    fb.outer_curve = BoundaryCurve::circle(0.0, m.R1);
    fb.inner_curve = BoundaryCurve::circle(0.0, m.R2);
    fb.build_spectral_tables();
    return fb;
}

void FreeBoundary::build_spectral_tables() {
    const int n = size();
    std::vector<cplx> tmp(n);
    for (int j = 0; j < n; ++j) tmp[j] = dn_psi[j];
    cf_dnpsi = num::dft_coeffs(tmp);
    for (int j = 0; j < n; ++j) tmp[j] = kappa[j];
    cf_kappa = num::dft_coeffs(tmp);
    cf_points = num::dft_coeffs(points);
    mean_ds_dphi = length / (2.0 * pi);
    for (int j = 0; j < n; ++j)
        tmp[j] = std::abs(num::fourier_eval_deriv(cf_points, phi[j]));
    cf_speed = num::dft_coeffs(tmp);
}

double FreeBoundary::dn_psi_at_phi(double ph) const {
    return std::real(num::fourier_eval(cf_dnpsi, ph));
}

double FreeBoundary::kappa_at_phi(double ph) const {
    return std::real(num::fourier_eval(cf_kappa, ph));
}

double FreeBoundary::s_at_phi(double ph) const {
    if (identity_) return mean_ds_dphi * ph;
    // s(phi) = mean * phi + oscillatory part integrated spectrally from
    // |z'(phi)| Fourier coefficients.
    double v = mean_ds_dphi * ph;
    for (size_t k = 0; k < cf_speed.size(); ++k) {
        const int m = (static_cast<long>(k) <= (static_cast<long>(cf_speed.size()) - 1) / 2)
                          ? static_cast<int>(k)
                          : static_cast<int>(k) - static_cast<int>(cf_speed.size());
        if (m == 0) continue;
        const cplx c = cf_speed[k];
        v += std::real(c * (std::polar(1.0, m * ph) - 1.0) / cplx(0.0, m));
    }
    return v;
}

double FreeBoundary::phi_at_s(double sv) const {
    if (identity_) return sv / mean_ds_dphi;
    double ph = sv / mean_ds_dphi;
    for (int it = 0; it < 50; ++it) {
        const double f = s_at_phi(ph) - sv;
        const double d = std::real(num::fourier_eval(cf_speed, ph));
        const double step = f / d;
        ph -= step;
        if (std::fabs(step) < 1e-14) break;
    }
    return ph;
}

double FreeBoundary::min_dn_psi() const {
    return *std::min_element(dn_psi.begin(), dn_psi.end());
}

double FreeBoundary::ell0_quadrature() const {
    // ∮ |d_n psi| ds with ds from spectral differentiation of the traced points
    const int n = size();
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const cplx zp = num::fourier_eval_deriv(cf_points, phi[j]);
        acc += dn_psi[j] * std::abs(zp);
    }
    return acc * 2.0 * pi / n;
}

double FreeBoundary::total_curvature() const {
    const int n = size();
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const cplx zp = num::fourier_eval_deriv(cf_points, phi[j]);
        acc += kappa[j] * std::abs(zp);
    }
    return acc * 2.0 * pi / n;
}

FreeBoundary free_boundary(const ConformalMap& map, const AnnulusModel& model, int n) {
    FreeBoundary fb;
    const double R = model.R();
    fb.phi.resize(n);
    fb.points.resize(n);
    fb.normals.resize(n);
    fb.dn_psi.resize(n);
    fb.kappa.resize(n);
    fb.s.resize(n);

    cplx z = map.inverse(std::polar(R, 0.0));
    std::vector<cplx> zs(n);
    for (int j = 0; j < n; ++j) {
        const double ph = 2.0 * pi * j / n;
        const cplx w = std::polar(R, ph);
        z = map.inverse(w, z);   // continuation seed from previous point
        zs[j] = z;
        fb.phi[j] = ph;
    }
    fb.points = zs;
    for (int j = 0; j < n; ++j) {
        const double ph = fb.phi[j];
        const cplx w = std::polar(R, ph);
        const cplx psip = map.deriv(zs[j]);
        fb.dn_psi[j] = std::abs(psip);
        const cplx Fp = map.Fp(zs[j]);
        fb.normals[j] = std::conj(Fp) / std::abs(Fp);
        // z'(phi) = i w / psi'(z); z''(phi) = (-w - i w psi''(z) z'(phi)) / psi'
        const cplx zp = cplx(0.0, 1.0) * w / psip;
        const cplx psipp = (map.Fpp(zs[j]) + Fp * Fp) * map.forward(zs[j]);
        const cplx zpp = (-w - cplx(0.0, 1.0) * w * psipp * zp) / psip;
        fb.kappa[j] = std::imag(zpp * std::conj(zp)) / std::pow(std::abs(zp), 3.0);
    }
    // arclength: speed |z'(phi)| spectrally
    std::vector<cplx> speed(n);
    fb.cf_points = num::dft_coeffs(zs);
    for (int j = 0; j < n; ++j)
        speed[j] = std::abs(num::fourier_eval_deriv(fb.cf_points, fb.phi[j]));
    fb.cf_speed = num::dft_coeffs(speed);
    fb.length = 2.0 * pi * std::real(fb.cf_speed[0]);
    fb.mean_ds_dphi = fb.length / (2.0 * pi);
    for (int j = 0; j < n; ++j) fb.s[j] = fb.s_at_phi(fb.phi[j]);

    fb.outer_curve = map.domain.outer;
    fb.inner_curve = map.domain.inner;
    // spectral tables for dn_psi and kappa (cf_points already built)
    std::vector<cplx> tmp(n);
    for (int j = 0; j < n; ++j) tmp[j] = fb.dn_psi[j];
    fb.cf_dnpsi = num::dft_coeffs(tmp);
    for (int j = 0; j < n; ++j) tmp[j] = fb.kappa[j];
    fb.cf_kappa = num::dft_coeffs(tmp);
    return fb;
}

// ---------------------------------------------------------------------------
// normal_balance_defect
// ---------------------------------------------------------------------------

double normal_balance_defect(const FreeBoundary& fb, const AnnulusModel& model,
                             const GridSpec& res) {
    if (!fb.outer_curve || !fb.inner_curve)
        throw GeometryError("normal_balance_defect: free boundary lacks domain curves");
    (void)model;
    const int n = fb.size();
    const BoundaryCurve gamma = BoundaryCurve::from_points(fb.points);

    const std::vector<double> zero(res.nsamples, 0.0), one(res.nsamples, 1.0);
    // H^+ on the region between gamma and the outer boundary
    RingHarmonic Hp = solve_ring_dirichlet(fb.outer_curve->normalized_ccw(),
                                           gamma, zero, one, res.nmodes, res.nsamples);
    // H^- on the region between the inner boundary and gamma
    RingHarmonic Hm = solve_ring_dirichlet(gamma, fb.inner_curve->normalized_ccw(),
                                           one, zero, res.nmodes, res.nsamples);
    double defect = 0.0;
    for (int j = 0; j < n; ++j) {
        const cplx z = fb.points[j];
        const cplx nv = fb.normals[j];
        const double dp = std::real(Hp.grad(z) * nv);
        const double dm = std::real(Hm.grad(z) * nv);
        defect = std::max(defect, std::fabs(dp + dm));
    }
    return defect;
}

} // namespace liouville
