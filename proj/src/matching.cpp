#include "liouville/matching.hpp"

#include <algorithm>

namespace liouville {
namespace matching {

using num::pi;

std::vector<double> resonance_sequence(const AnnulusModel& model, int N) {
    if (N < 1) throw Error("resonance_sequence: N >= 1 required");
    std::vector<double> out(N);
    const double R = model.R(), q = model.q();
    for (int n = 1; n <= N; ++n) {
        const double qn = std::pow(q, n);
        out[n - 1] = (n / R) * (1.0 + qn) / (1.0 - qn);
    }
    return out;
}

int empirical_gap_index(const AnnulusModel& model, int horizon) {
    const auto a = resonance_sequence(model, horizon);
    const double gap = 1.0 / (4.0 * model.R());
    int first = horizon;
    for (int n = horizon - 2; n >= 0; --n) {
        if (a[n + 1] - a[n] > gap)
            first = n + 1;   // 1-based index of alpha_n
        else
            break;
    }
    return first;
}

bool admissible(double alpha, const AnnulusModel& model,
                const AdmissibilityOptions& opts) {
    const double R = model.R(), q = model.q();
    const double lower = std::max(4.0 * R, 2.0 / (-R * std::log(q)));
    if (!(alpha > lower)) return false;
    const double gap = opts.gap > 0.0 ? opts.gap : 1.0 / (4.0 * R);
    // alpha_n is increasing with gaps -> 1/R; scan until past alpha + gap
    const double qd = q;
    for (int n = 1; n < 100000; ++n) {
        const double qn = std::pow(qd, n);
        const double an = (n / R) * (1.0 + qn) / (1.0 - qn);
        if (std::fabs(an - alpha) <= gap) return false;
        if (an > alpha + 1.0 + gap) break;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Mode solves
// ---------------------------------------------------------------------------

ModeSolution solve_mode0(const ModeRHS& rhs, double alpha, const AnnulusModel& model) {
    const double R = model.R(), q = model.q();
    const double hlr = model.half_log_ratio();
    const double denom = alpha * R * std::log(q) + 2.0;   // = 2 - alpha R log(R1/R2)
    if (std::fabs(denom) < 1e-10 * (alpha * R * 2.0 * hlr + 2.0))
        throw ResonantMode0("solve_mode0: alpha R log(R1/R2) = 2");

    ModeSolution ms;
    ms.n = 0;
    ms.h1 = (rhs.phi_minus + rhs.phi_plus) / (2.0 * denom);
    // first reduced equation: h1 (alpha R log(R/R2) - 1) - h2 = -phi-/2
    ms.h2 = ms.h1 * (alpha * R * hlr - 1.0) + 0.5 * rhs.phi_minus;
    // back-substitution, minus side: a + b log r, a + b log R2 = 0
    const cplx vm = 2.0 * ms.h1 + 2.0 * ms.h2 - rhs.phi_minus;
    ms.b_minus = vm / hlr;
    ms.a_minus = -ms.b_minus * std::log(model.R2);
    const cplx vp = 2.0 * ms.h1 - 2.0 * ms.h2 - rhs.phi_plus;
    ms.b_plus = -vp / hlr;
    ms.a_plus = -ms.b_plus * std::log(model.R1);
    ms.residual = mode_system_residual(ms, rhs, alpha, model);
    return ms;
}

ModeSolution solve_mode_n(const ModeRHS& rhs, double alpha, const AnnulusModel& model) {
    const int n = rhs.n;
    if (n < 1) throw Error("solve_mode_n: n >= 1 required");
    const double R = model.R(), q = model.q();
    const double qn = std::pow(q, n);
    const double alpha_n = (n / R) * (1.0 + qn) / (1.0 - qn);
    const double G = alpha / alpha_n - 1.0;
    if (std::fabs(G) < 64.0 * std::numeric_limits<double>::epsilon() * (alpha / alpha_n + 1.0))
        throw ResonantModeN("solve_mode_n: alpha at resonance alpha_" + std::to_string(n));

    ModeSolution ms;
    ms.n = n;
    // reduced system: h1 G - h2 = -phi-/2 ; h1 G + h2 = -phi+/2
    ms.h1 = -(rhs.phi_minus + rhs.phi_plus) / (4.0 * G);
    ms.h2 = (rhs.phi_minus - rhs.phi_plus) / 4.0;

    const double sqn = std::pow(std::sqrt(q), n);   // (R2/R)^n = (R/R1)^n
    const double den = 1.0 - sqn * sqn;
    // minus side in the scaled basis Am (r/R)^n + Bm (R2/r)^n
    const cplx vm = 2.0 * ms.h1 + 2.0 * ms.h2 - rhs.phi_minus;
    const cplx Am = vm / den;
    const cplx Bm = -sqn * vm / den;
    ms.a_minus = Am * std::pow(R, -n);
    ms.b_minus = Bm * std::pow(model.R2, n);
    // plus side: Ap (r/R1)^n + Bp (R/r)^n
    const cplx vp = 2.0 * ms.h1 - 2.0 * ms.h2 - rhs.phi_plus;
    const cplx Bp = vp / den;
    const cplx Ap = -sqn * vp / den;
    ms.a_plus = Ap * std::pow(model.R1, -n);
    ms.b_plus = Bp * std::pow(R, n);
    ms.residual = mode_system_residual(ms, rhs, alpha, model);
    return ms;
}

double mode_system_residual(const ModeSolution& ms, const ModeRHS& rhs,
                            double alpha, const AnnulusModel& model) {
    const double R = model.R();
    const int n = ms.n;
    const double scale = std::max({1.0, std::abs(rhs.phi_minus), std::abs(rhs.phi_plus),
                                   std::abs(ms.h1) * alpha, std::abs(ms.h2)});
    double res = 0.0;
    auto upd = [&](cplx r, double rowscale) {
        res = std::max(res, std::abs(r) / std::max(rowscale, scale));
    };
    if (n == 0) {
        upd(ms.a_minus + ms.b_minus * std::log(model.R2), 1.0);
        upd(ms.a_minus + ms.b_minus * std::log(R) -
                (2.0 * ms.h1 + 2.0 * ms.h2 - rhs.phi_minus), 1.0);
        upd(ms.b_minus / R - 2.0 * alpha * ms.h1, alpha * std::abs(ms.h1) + 1.0);
        upd(ms.a_plus + ms.b_plus * std::log(model.R1), 1.0);
        upd(ms.a_plus + ms.b_plus * std::log(R) -
                (2.0 * ms.h1 - 2.0 * ms.h2 - rhs.phi_plus), 1.0);
        upd(ms.b_plus / R + 2.0 * alpha * ms.h1, alpha * std::abs(ms.h1) + 1.0);
        return res;
    }
    const double dn = static_cast<double>(n);
    // evaluate the power basis through ratio forms to keep rows O(1)
    const double Rn = std::pow(R, n);
    upd(ms.a_minus * std::pow(model.R2, n) + ms.b_minus * std::pow(model.R2, -n), 1.0);
    upd(ms.a_minus * Rn + ms.b_minus / Rn -
            (2.0 * ms.h1 + 2.0 * ms.h2 - rhs.phi_minus), 1.0);
    upd(dn * ms.a_minus * std::pow(R, n - 1) - dn * ms.b_minus * std::pow(R, -n - 1) -
            2.0 * alpha * ms.h1, alpha * std::abs(ms.h1) + 1.0);
    upd(ms.a_plus * std::pow(model.R1, n) + ms.b_plus * std::pow(model.R1, -n), 1.0);
    upd(ms.a_plus * Rn + ms.b_plus / Rn -
            (2.0 * ms.h1 - 2.0 * ms.h2 - rhs.phi_plus), 1.0);
    upd(dn * ms.a_plus * std::pow(R, n - 1) - dn * ms.b_plus * std::pow(R, -n - 1) +
            2.0 * alpha * ms.h1, alpha * std::abs(ms.h1) + 1.0);
    return res;
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

SubannulusGrid SubannulusGrid::make(double rin, double rout, int nr, int ntheta) {
    SubannulusGrid g;
    g.rin = rin;
    g.rout = rout;
    g.nr = nr;
    g.ntheta = ntheta;
    g.cheb = num::Chebyshev(nr);
    g.r.resize(nr + 1);
    for (int i = 0; i <= nr; ++i)
        g.r[i] = 0.5 * (rout + rin) + 0.5 * (rout - rin) * g.cheb.x[i];
    return g;
}

GridField GridField::zero(const SubannulusGrid& g) {
    GridField f;
    f.g = g;
    f.v = Eigen::MatrixXd::Zero(g.nr + 1, g.ntheta);
    return f;
}

// ---------------------------------------------------------------------------
// Poisson pre-solve
// ---------------------------------------------------------------------------

namespace {

// one subannulus: phi = 0 at r = r_dirichlet, d_r phi = 0 at r = r_neumann
GridField poisson_one_side(const GridField& gf, double r_dirichlet, double r_neumann) {
    const SubannulusGrid& g = gf.g;
    const int m = g.nr + 1, nth = g.ntheta;
    // theta DFT of the right hand side, per radial row
    std::vector<std::vector<cplx>> ghat(m);
    for (int i = 0; i < m; ++i) {
        std::vector<cplx> row(nth);
        for (int j = 0; j < nth; ++j) row[j] = gf.v(i, j);
        ghat[i] = num::dft_coeffs(row);
    }
    const int idx_d = std::fabs(g.r[0] - r_dirichlet) < std::fabs(g.r[g.nr] - r_dirichlet)
                          ? 0 : g.nr;
    const int idx_n = idx_d == 0 ? g.nr : 0;
    (void)r_neumann;

    const double fac = g.dr_factor();
    Eigen::MatrixXcd phihat = Eigen::MatrixXcd::Zero(m, nth);
    const int kmax = nth / 2;
    for (int kk = 0; kk < nth; ++kk) {
        const int k = (kk <= (nth - 1) / 2) ? kk : kk - nth;
        if (std::abs(k) > kmax) continue;
        Eigen::MatrixXd A(m, m);
        Eigen::VectorXd br(m), bi(m);
        for (int i = 0; i < m; ++i) {
            const double r = g.r[i];
            for (int j = 0; j < m; ++j) {
                // L = d_rr + (1/r) d_r - k^2/r^2
                double d2 = 0.0;
                for (int l = 0; l < m; ++l) d2 += g.cheb.d(i, l) * g.cheb.d(l, j);
                const double d1 = g.cheb.d(i, j);
                A(i, j) = fac * fac * d2 + fac * d1 / r;
                if (i == j) A(i, j) -= double(k) * double(k) / (r * r);
            }
            br(i) = std::real(ghat[i][kk]);
            bi(i) = std::imag(ghat[i][kk]);
        }
        // boundary rows
        for (int j = 0; j < m; ++j) {
            A(idx_d, j) = (j == idx_d) ? 1.0 : 0.0;
            A(idx_n, j) = fac * g.cheb.d(idx_n, j);
        }
        br(idx_d) = bi(idx_d) = 0.0;
        br(idx_n) = bi(idx_n) = 0.0;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        Eigen::VectorXd xr = lu.solve(br), xi = lu.solve(bi);
        for (int i = 0; i < m; ++i) phihat(i, kk) = cplx(xr(i), xi(i));
    }
    // back to physical theta
    GridField out = GridField::zero(g);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < nth; ++j) {
            cplx s = 0.0;
            for (int kk = 0; kk < nth; ++kk) {
                const int k = (kk <= (nth - 1) / 2) ? kk : kk - nth;
                s += phihat(i, kk) * std::polar(1.0, k * 2.0 * pi * j / nth);
            }
            out.v(i, j) = std::real(s);
        }
    }
    return out;
}

} // namespace

std::pair<GridField, GridField> poisson_presolve(const GridField& g_plus,
                                                 const GridField& g_minus,
                                                 const AnnulusModel& model) {
    const double R = model.R();
    GridField pp = poisson_one_side(g_plus, model.R1, R);
    GridField pm = poisson_one_side(g_minus, model.R2, R);
    if (!pp.v.allFinite() || !pm.v.allFinite())
        throw NumericsFailure("poisson_presolve: solver breakdown");
    return {pp, pm};
}

// ---------------------------------------------------------------------------
// matching_solve
// ---------------------------------------------------------------------------

namespace {

// boundary trace Fourier coefficients at r = R (the row of the grid nearest R)
std::vector<cplx> trace_at_R(const GridField& f, double R) {
    const int m = f.g.nr;
    const int row = std::fabs(f.g.r[0] - R) < std::fabs(f.g.r[m] - R) ? 0 : m;
    std::vector<cplx> vals(f.g.ntheta);
    for (int j = 0; j < f.g.ntheta; ++j) vals[j] = f.v(row, j);
    return num::dft_coeffs(vals);
}

} // namespace

double MatchResult::h1_at(double theta) const {
    cplx s = modes[0].h1;
    for (size_t i = 1; i < modes.size(); ++i)
        s += 2.0 * (modes[i].h1 * std::polar(1.0, modes[i].n * theta)).real();
    return std::real(s);
}

double MatchResult::h2_at(double theta) const {
    cplx s = modes[0].h2;
    for (size_t i = 1; i < modes.size(); ++i)
        s += 2.0 * (modes[i].h2 * std::polar(1.0, modes[i].n * theta)).real();
    return std::real(s);
}

MatchResult matching_solve(const GridField& g_plus, const GridField& g_minus,
                           double alpha, const AnnulusModel& model, int n_modes,
                           const AdmissibilityOptions& opts) {
    if (!opts.allow_near_resonance && !admissible(alpha, model, opts))
        throw ResonanceRejected("matching_solve: alpha rejected by the gap test");
    const int nth = g_plus.g.ntheta;
    if (n_modes <= 0) n_modes = nth / 2 - 1;       // anti-aliasing default
    n_modes = std::min(n_modes, nth / 2 - 1);

    MatchResult out;
    auto [pp, pm] = poisson_presolve(g_plus, g_minus, model);
    out.phi_plus = pp;
    out.phi_minus = pm;
    const double R = model.R();
    const auto php = trace_at_R(pp, R);
    const auto phm = trace_at_R(pm, R);

    out.modes.reserve(n_modes + 1);
    for (int n = 0; n <= n_modes; ++n) {
        ModeRHS rhs;
        rhs.n = n;
        rhs.phi_minus = phm[n];
        rhs.phi_plus = php[n];
        out.modes.push_back(n == 0 ? solve_mode0(rhs, alpha, model)
                                   : solve_mode_n(rhs, alpha, model));
    }

    // assemble w = w~ + phi on the grids
    out.w_plus = GridField::zero(g_plus.g);
    out.w_minus = GridField::zero(g_minus.g);
    auto eval_wtilde = [&](const ModeSolution& ms, double r, double theta, bool plus) {
        if (ms.n == 0) {
            const cplx a = plus ? ms.a_plus : ms.a_minus;
            const cplx b = plus ? ms.b_plus : ms.b_minus;
            return std::real(a + b * std::log(r));
        }
        const cplx a = plus ? ms.a_plus : ms.a_minus;
        const cplx b = plus ? ms.b_plus : ms.b_minus;
        const double rn = std::pow(r, ms.n), rmn = std::pow(r, -ms.n);
        return 2.0 * std::real((a * rn + b * rmn) * std::polar(1.0, ms.n * theta));
    };
    for (int i = 0; i <= g_plus.g.nr; ++i)
        for (int j = 0; j < nth; ++j) {
            const double th = 2.0 * pi * j / nth;
            double s = pp.v(i, j);
            for (const auto& ms : out.modes) s += eval_wtilde(ms, g_plus.g.r[i], th, true);
            out.w_plus.v(i, j) = s;
        }
    for (int i = 0; i <= g_minus.g.nr; ++i)
        for (int j = 0; j < nth; ++j) {
            const double th = 2.0 * pi * j / nth;
            double s = pm.v(i, j);
            for (const auto& ms : out.modes) s += eval_wtilde(ms, g_minus.g.r[i], th, false);
            out.w_minus.v(i, j) = s;
        }

    // boundary-condition verification on C_R: values and Neumann data
    const int rp = std::fabs(g_plus.g.r[0] - R) < std::fabs(g_plus.g.r[g_plus.g.nr] - R)
                       ? 0 : g_plus.g.nr;
    const int rm = std::fabs(g_minus.g.r[0] - R) < std::fabs(g_minus.g.r[g_minus.g.nr] - R)
                       ? 0 : g_minus.g.nr;
    double bcv = 0.0, bcn = 0.0;
    const double facp = g_plus.g.dr_factor(), facm = g_minus.g.dr_factor();
    for (int j = 0; j < nth; ++j) {
        const double th = 2.0 * pi * j / nth;
        const double h1 = out.h1_at(th), h2 = out.h2_at(th);
        bcv = std::max(bcv, std::fabs(out.w_minus.v(rm, j) - (2.0 * h1 + 2.0 * h2)));
        bcv = std::max(bcv, std::fabs(out.w_plus.v(rp, j) - (2.0 * h1 - 2.0 * h2)));
        double dwm = 0.0, dwp = 0.0;
        for (int l = 0; l <= g_minus.g.nr; ++l) dwm += facm * g_minus.g.cheb.d(rm, l) * out.w_minus.v(l, j);
        for (int l = 0; l <= g_plus.g.nr; ++l) dwp += facp * g_plus.g.cheb.d(rp, l) * out.w_plus.v(l, j);
        bcn = std::max(bcn, std::fabs(dwm - 2.0 * alpha * h1));
        bcn = std::max(bcn, std::fabs(dwp + 2.0 * alpha * h1));
    }
    out.norms.bc_value_defect = bcv;
    out.norms.bc_neumann_defect = bcn;

    // discrete norms
    double hn = 0.0;
    for (const auto& ms : out.modes) {
        const double w = (ms.n == 0) ? 1.0 : 2.0;
        hn += w * (1.0 + ms.n * ms.n) * (std::norm(ms.h1) + std::norm(ms.h2));
    }
    out.norms.h_h1 = std::sqrt(hn);

    auto h2norm = [&](const GridField& f) {
        // quadrature of |w|^2 + |grad w|^2 + |D^2 w|^2 over the subannulus,
        // Chebyshev differentiation in r, spectral differentiation in theta
        const SubannulusGrid& g = f.g;
        const int m = g.nr + 1;
        const double fac = g.dr_factor();
        Eigen::MatrixXd wr(m, nth), wrr(m, nth);
        for (int j = 0; j < nth; ++j)
            for (int i = 0; i < m; ++i) {
                double d1 = 0.0, d2 = 0.0;
                for (int l = 0; l < m; ++l) {
                    d1 += g.cheb.d(i, l) * f.v(l, j);
                    for (int l2 = 0; l2 < m; ++l2)
                        d2 += g.cheb.d(i, l) * g.cheb.d(l, l2) * f.v(l2, j);
                }
                wr(i, j) = fac * d1;
                wrr(i, j) = fac * fac * d2;
            }
        // theta derivatives via DFT per row
        Eigen::MatrixXd wth(m, nth), wthth(m, nth);
        for (int i = 0; i < m; ++i) {
            std::vector<cplx> row(nth);
            for (int j = 0; j < nth; ++j) row[j] = f.v(i, j);
            const auto c = num::dft_coeffs(row);
            for (int j = 0; j < nth; ++j) {
                const double th = 2.0 * pi * j / nth;
                wth(i, j) = std::real(num::fourier_eval_deriv(c, th, 1));
                wthth(i, j) = std::real(num::fourier_eval_deriv(c, th, 2));
            }
        }
        // Chebyshev-Gauss-Lobatto quadrature weights via trapezoid in the
        // monotone r direction (adequate for a norm report)
        double acc = 0.0;
        for (int i = 0; i < m - 1; ++i) {
            const double dr = std::fabs(g.r[i] - g.r[i + 1]);
            for (int j = 0; j < nth; ++j) {
                const double r = 0.5 * (g.r[i] + g.r[i + 1]);
                auto sq = [](double x) { return x * x; };
                const double c0 = 0.5 * (sq(f.v(i, j)) + sq(f.v(i + 1, j)));
                const double c1 = 0.5 * (sq(wr(i, j)) + sq(wr(i + 1, j))) +
                                  0.5 * (sq(wth(i, j) / r) + sq(wth(i + 1, j) / r));
                const double c2 = 0.5 * (sq(wrr(i, j)) + sq(wrr(i + 1, j))) +
                                  0.5 * (sq(wthth(i, j) / (r * r)) + sq(wthth(i + 1, j) / (r * r)));
                acc += (c0 + c1 + c2) * r * dr * (2.0 * pi / nth);
            }
        }
        return std::sqrt(acc);
    };
    out.norms.w_plus_h2 = h2norm(out.w_plus);
    out.norms.w_minus_h2 = h2norm(out.w_minus);

    auto l2 = [&](const GridField& f) {
        double acc = 0.0;
        for (int i = 0; i < f.g.nr; ++i) {
            const double dr = std::fabs(f.g.r[i] - f.g.r[i + 1]);
            for (int j = 0; j < nth; ++j) {
                const double r = 0.5 * (f.g.r[i] + f.g.r[i + 1]);
                acc += 0.25 * (f.v(i, j) + f.v(i + 1, j)) * (f.v(i, j) + f.v(i + 1, j)) *
                       r * dr * (2.0 * pi / nth);
            }
        }
        return std::sqrt(acc);
    };
    out.norms.input_l2 = l2(g_plus) + l2(g_minus);
    const double outn = out.norms.h_h1 + out.norms.w_plus_h2 + out.norms.w_minus_h2;
    out.norms.stability_ratio = out.norms.input_l2 > 0 ? outn / out.norms.input_l2 : 0.0;
    return out;
}

} // namespace matching
} // namespace liouville
