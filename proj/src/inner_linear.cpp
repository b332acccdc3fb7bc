#include "liouville/inner_linear.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace liouville {

using num::pi;

namespace {

// 4th-order composite quadrature on uniform samples (Simpson; 3/8 tail for odd)
double integrate_uniform(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size()) - 1;   // intervals
    if (n < 3) throw NumericsFailure("integrate_uniform: too few samples");
    double s = 0.0;
    int m = n;
    int start = 0;
    if (n % 2 == 1) {
        // 3/8 rule on the first 3 intervals
        s += 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
        start = 3;
        m = n - 3;
    }
    for (int i = start; i < start + m; i += 2)
        s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    return s;
}

// 4th-order cumulative integral: out[i] = int_{x0}^{x_i} f
std::vector<double> cumulative_integral(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> out(n, 0.0);
    if (n < 4) throw NumericsFailure("cumulative_integral: too few samples");
    auto seg = [&](int i) {
        // integral over [x_i, x_{i+1}] from the cubic through 4 neighbors
        if (i == 0)
            return h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        if (i == n - 2)
            return h / 24.0 * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
        return h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    };
    for (int i = 0; i < n - 1; ++i) out[i + 1] = out[i] + seg(i);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// FundamentalSet
// ---------------------------------------------------------------------------

FundamentalSet fundamental_set(double omega, double eps, double T, int nsteps) {
    if (omega < 0.0) throw Error("fundamental_set: omega >= 0 required");
    FundamentalSet fs;
    fs.omega = omega;
    fs.eps = eps;
    fs.T = T;
    const int n = nsteps + 1;
    fs.eta.resize(n);
    fs.mp.resize(n);
    fs.mp_d.resize(n);
    const double h = 2.0 * T / nsteps;
    for (int i = 0; i < n; ++i) fs.eta[i] = -T + i * h;

    // m = k+ e^{-omega eta} solves m'' + 2 omega m' + e^U m = 0;
    // asymptotic start at -T: k+ = e^{omega eta}(1 + A e^{2 eta}), A = -2/(omega+1)
    const double A = -2.0 / (omega + 1.0);
    double y[2] = {1.0 + A * std::exp(-2.0 * T), 2.0 * A * std::exp(-2.0 * T)};
    fs.mp[0] = y[0];
    fs.mp_d[0] = y[1];
    auto rhs = [omega](double t, const double* v, double* dv) {
        const double s = num::sech(t);
        dv[0] = v[1];
        dv[1] = -2.0 * omega * v[1] - 2.0 * s * s * v[0];
    };
    for (int i = 1; i < n; ++i) {
        num::rk4_2(rhs, fs.eta[i - 1], fs.eta[i], y, 2);
        fs.mp[i] = y[0];
        fs.mp_d[i] = y[1];
    }
    // normalize so lim k+ e^{-omega eta} = 1 at +infinity
    const double mT = fs.mp[n - 1];
    double scale_max = 0.0;
    for (double v : fs.mp) scale_max = std::max(scale_max, std::fabs(v));
    if (std::fabs(mT) < 1e-8 * scale_max) {
        fs.degenerate = true;   // interior bound state (omega near 1)
    } else {
        for (int i = 0; i < n; ++i) {
            fs.mp[i] /= mT;
            fs.mp_d[i] /= mT;
        }
    }

    fs.l_branch = omega <= eps;
    if (fs.l_branch) {
        fs.l.resize(n);
        fs.l_d.resize(n);
        if (omega < 1e-8) {
            // exact omega -> 0 limit of (k+ - k-)/(2 omega): -(eta U' + 2)/2
            for (int i = 0; i < n; ++i) {
                fs.l[i] = -0.5 * KernelBasis::phi1(fs.eta[i]);
                fs.l_d[i] = -0.5 * KernelBasis::phi1_d(fs.eta[i]);
            }
        } else {
            for (int i = 0; i < n; ++i) {
                const double e = fs.eta[i];
                const double kp = fs.mp[i] * std::exp(omega * e);
                const double km = -fs.mp[n - 1 - i] * std::exp(-omega * e);
                fs.l[i] = (kp - km) / (2.0 * omega);
                const double kpd = (fs.mp_d[i] + omega * fs.mp[i]) * std::exp(omega * e);
                const double kmd = (fs.mp_d[n - 1 - i] + omega * fs.mp[n - 1 - i]) *
                                   std::exp(-omega * e);
                fs.l_d[i] = (kpd - kmd) / (2.0 * omega);
            }
        }
    }

    // Wronskian of the branch basis, exponential-free form, over the grid
    double wmin = 1e300, wmax = -1e300;
    const int mid = n / 2;
    auto w_at = [&](int j) {
        if (fs.l_branch) {
            // W(k+, l) = k+ l' - k+' l
            const double e = fs.eta[j];
            const double kp = fs.mp[j] * std::exp(omega * e);
            const double kpd = (fs.mp_d[j] + omega * fs.mp[j]) * std::exp(omega * e);
            return kp * fs.l_d[j] - kpd * fs.l[j];
        }
        // W(k+,k-) = m+ m-' - m+' m- - 2 omega m+ m-
        const double mpv = fs.mp[j], mpd = fs.mp_d[j];
        const double mmv = fs.mm(j), mmd = fs.mm_d(j);
        return mpv * mmd - mpd * mmv - 2.0 * omega * mpv * mmv;
    };
    fs.wronskian = w_at(mid);
    // sample the drift away from the far tails (the scaled variables lose
    // relative accuracy where m+ underflows against its own growth)
    for (int j = n / 10; j <= 9 * n / 10; j += std::max(1, n / 200)) {
        const double w = w_at(j);
        wmin = std::min(wmin, w);
        wmax = std::max(wmax, w);
    }
    fs.wronskian_drift = (std::fabs(fs.wronskian) > 0)
                             ? (wmax - wmin) / std::fabs(fs.wronskian)
                             : 0.0;
    if (!fs.degenerate && std::fabs(fs.wronskian) < 1e-10)
        fs.degenerate = true;
    return fs;
}

double FundamentalSet::operator_residual() const {
    // apply L_omega to k+ via the stored ODE relation: residual of the
    // integrator measured through a high-order difference of mp_d
    const int n = size();
    const double hh = h();
    double r = 0.0;
    for (int i = 2; i < n - 2; ++i) {
        const double d2 = (-mp[i - 2] + 16.0 * mp[i - 1] - 30.0 * mp[i] +
                           16.0 * mp[i + 1] - mp[i + 2]) / (12.0 * hh * hh);
        const double d1 = (mp[i - 2] - 8.0 * mp[i - 1] + 8.0 * mp[i + 1] - mp[i + 2]) /
                          (12.0 * hh);
        const double s = num::sech(eta[i]);
        r = std::max(r, std::fabs(d2 + 2.0 * omega * d1 + 2.0 * s * s * mp[i]));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Ground state
// ---------------------------------------------------------------------------

namespace {

// tridiagonal solve (Thomas), diag a, off-diag b (constant), rhs d
std::vector<double> thomas_const_off(std::vector<double> a, double b,
                                     std::vector<double> d) {
    const int n = static_cast<int>(a.size());
    std::vector<double> c(n, b);
    for (int i = 1; i < n; ++i) {
        const double w = b / a[i - 1];
        a[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / a[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (d[i] - b * x[i + 1]) / a[i];
    return x;
}

int inertia_below(const std::vector<double>& diag, double off, double sigma) {
    // count of eigenvalues < sigma via LDL pivot signs of A - sigma I
    int count = 0;
    double d = diag[0] - sigma;
    if (d < 0) ++count;
    for (size_t i = 1; i < diag.size(); ++i) {
        d = (diag[i] - sigma) - off * off / d;
        if (d < 0) ++count;
    }
    return count;
}

} // namespace

GroundState ground_state(double h, double T) {
    const int n = static_cast<int>(std::round(2.0 * T / h)) - 1;   // interior nodes
    GroundState gs;
    gs.eta.resize(n);
    std::vector<double> diag(n);
    const double off = -1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        gs.eta[i] = -T + (i + 1) * h;
        const double s = num::sech(gs.eta[i]);
        diag[i] = 2.0 / (h * h) - 2.0 * s * s;
    }
    gs.negative_count = inertia_below(diag, off, 0.0);

    // inverse iteration at shift -1.2 (the nearest eigenvalue is nu0 = -1)
    const double sigma = -1.2;
    std::vector<double> shifted(diag);
    for (double& v : shifted) v -= sigma;
    std::vector<double> x(n, 1.0);
    for (int i = 0; i < n; ++i) x[i] = num::sech(gs.eta[i]);   // rough seed
    double nu = 0.0;
    for (int it = 0; it < 60; ++it) {
        x = thomas_const_off(shifted, off, x);
        double norm = 0.0;
        for (double v : x) norm += v * v;
        norm = std::sqrt(norm);
        for (double& v : x) v /= norm;
        // Rayleigh quotient
        double num_acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double av = diag[i] * x[i];
            if (i > 0) av += off * x[i - 1];
            if (i < n - 1) av += off * x[i + 1];
            num_acc += x[i] * av;
        }
        if (std::fabs(num_acc - nu) < 1e-14) { nu = num_acc; break; }
        nu = num_acc;
    }
    gs.nu0 = nu;

    // second eigenvalue by Sturm bisection on [nu0 + 1e-6, 1]
    double lo = nu + 1e-6, hi = 1.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (inertia_below(diag, off, mid) >= 2 ? hi : lo) = mid;
    }
    gs.second_eigenvalue = 0.5 * (lo + hi);

    // normalize Z0 to L2 norm 2 (= ||sqrt(2) sech||), sign positive at center
    double l2 = 0.0;
    for (double v : x) l2 += v * v * h;
    const double scale = 2.0 / std::sqrt(l2);
    gs.Z0.resize(n);
    const double sgn = x[n / 2] >= 0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) gs.Z0[i] = sgn * scale * x[i];
    return gs;
}

// ---------------------------------------------------------------------------
// solve_mode
// ---------------------------------------------------------------------------

namespace {

// Numerov solve of phi'' = w phi + s with Dirichlet zero ends
std::vector<double> numerov_dirichlet(const std::vector<double>& eta,
                                      const std::vector<double>& w,
                                      const std::vector<double>& s) {
    const int n = static_cast<int>(eta.size());
    const double h = eta[1] - eta[0];
    const double h2 = h * h;
    const int ni = n - 2;
    std::vector<double> a(ni), bl(ni), bu(ni), d(ni);
    for (int i = 0; i < ni; ++i) {
        const int j = i + 1;
        a[i] = -2.0 * (1.0 + 5.0 * h2 * w[j] / 12.0);
        bu[i] = 1.0 - h2 * w[j + 1] / 12.0;
        bl[i] = 1.0 - h2 * w[j - 1] / 12.0;
        d[i] = h2 / 12.0 * (s[j + 1] + 10.0 * s[j] + s[j - 1]);
    }
    // Thomas with variable off-diagonals (bl = sub, bu = super)
    for (int i = 1; i < ni; ++i) {
        const double wfac = bl[i] / a[i - 1];
        a[i] -= wfac * bu[i - 1];
        d[i] -= wfac * d[i - 1];
    }
    std::vector<double> x(ni);
    x[ni - 1] = d[ni - 1] / a[ni - 1];
    for (int i = ni - 2; i >= 0; --i) x[i] = (d[i] - bu[i] * x[i + 1]) / a[i];
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < ni; ++i) out[i + 1] = x[i];
    return out;
}

} // namespace

ModeSolveResult solve_mode(double omega, const std::vector<double>& g,
                           double theta, const FundamentalSet& fs, double eps) {
    const int n = fs.size();
    if (static_cast<int>(g.size()) != n)
        throw NumericsFailure("solve_mode: grid mismatch");
    const double h = fs.h();
    ModeSolveResult res;
    auto& rep = res.report;

    // band classification per theta/eps
    if (omega > theta + eps) rep.band = 1;
    else if (omega > eps && omega < theta - eps) rep.band = 2;
    else if (std::fabs(omega - theta) <= eps) rep.band = 3;
    else rep.band = 4;   // omega <= eps

    // orthogonality integrals against the branch basis
    std::vector<double> gk = g;
    std::vector<double> f1(n), f2(n);
    for (int i = 0; i < n; ++i) {
        f1[i] = fs.kp(i) * gk[i];
        f2[i] = fs.l_branch ? fs.l[i] * gk[i] : fs.km(i) * gk[i];
    }
    rep.orth_kp = integrate_uniform(f1, h);
    rep.orth_second = integrate_uniform(f2, h);

    const bool needs_orth = rep.band >= 2;
    double gscale = 0.0;
    for (double v : gk) gscale = std::max(gscale, std::fabs(v));
    if (needs_orth && std::max(std::fabs(rep.orth_kp), std::fabs(rep.orth_second)) >
                          1e-10 * std::max(gscale, 1.0)) {
        // project the kernel contribution away with a Gaussian window
        std::vector<double> p1(n), p2(n);
        for (int i = 0; i < n; ++i) {
            const double chi = std::exp(-fs.eta[i] * fs.eta[i] / 8.0);
            p1[i] = fs.kp(i) * chi;
            p2[i] = (fs.l_branch ? fs.l[i] : fs.km(i)) * chi;
        }
        auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
            std::vector<double> prod(n);
            for (int i = 0; i < n; ++i) prod[i] = u[i] * v[i];
            return integrate_uniform(prod, h);
        };
        // Gram of (d_i, p_j)
        std::vector<double> d1(n), d2(n);
        for (int i = 0; i < n; ++i) {
            d1[i] = fs.kp(i);
            d2[i] = fs.l_branch ? fs.l[i] : fs.km(i);
        }
        Eigen::Matrix2d Gm;
        Gm(0, 0) = dot(d1, p1);
        Gm(0, 1) = dot(d1, p2);
        Gm(1, 0) = dot(d2, p1);
        Gm(1, 1) = dot(d2, p2);
        Eigen::Vector2d rhs(rep.orth_kp, rep.orth_second);
        Eigen::Vector2d c = Gm.fullPivLu().solve(rhs);
        for (int i = 0; i < n; ++i) gk[i] -= c(0) * p1[i] + c(1) * p2[i];
        rep.projected = true;
    }

    if (rep.band == 3) {
        // compact support demanded: no visible mass outside [-0.9T, 0.9T]
        const double lim = 0.9 * fs.T;
        for (int i = 0; i < n; ++i)
            if (std::fabs(fs.eta[i]) > lim && std::fabs(gk[i]) > 1e-13 * std::max(gscale, 1.0))
                throw RequiresCompactSupport("solve_mode: resonant band needs compact support");
    }

    std::vector<double> phi(n, 0.0);
    if (omega > 0.8 && !fs.l_branch) {
        // box solve; w = omega^2 - e^U, s = g
        std::vector<double> w(n), s(n);
        for (int i = 0; i < n; ++i) {
            const double sh = num::sech(fs.eta[i]);
            w[i] = omega * omega - 2.0 * sh * sh;
            s[i] = gk[i];
        }
        phi = numerov_dirichlet(fs.eta, w, s);
    } else {
        if (fs.degenerate)
            throw NumericsFailure("solve_mode: degenerate fundamental set");
        // variation of parameters:
        // phi = (1/W)[ d2(eta) int_{-T}^eta d1 g + d1(eta) int_eta^T d2 g ]
        // with (d1, d2) = (k+, k-) or (k+, l)
        std::vector<double> d1(n), d2(n);
        for (int i = 0; i < n; ++i) {
            d1[i] = fs.kp(i);
            d2[i] = fs.l_branch ? fs.l[i] : fs.km(i);
        }
        std::vector<double> f1g(n), f2g(n);
        for (int i = 0; i < n; ++i) {
            f1g[i] = d1[i] * gk[i];
            f2g[i] = d2[i] * gk[i];
        }
        const auto c1 = cumulative_integral(f1g, h);   // int_{-T}^eta k+ g
        const auto c2 = cumulative_integral(f2g, h);   // int_{-T}^eta d2 g
        const double total2 = c2[n - 1];
        const double W = fs.wronskian;
        for (int i = 0; i < n; ++i)
            phi[i] = (d2[i] * c1[i] + d1[i] * (total2 - c2[i])) / W;
    }

    // weighted norm ratio report
    auto wnorm = [&](const std::vector<double>& v) {
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i)
            f[i] = std::exp(2.0 * theta * std::fabs(fs.eta[i])) * v[i] * v[i];
        return std::sqrt(integrate_uniform(f, h));
    };
    const double gn = wnorm(gk);
    rep.norm_ratio = gn > 0 ? wnorm(phi) / gn : 0.0;
    res.phi = std::move(phi);
    return res;
}

// ---------------------------------------------------------------------------
// SL spectrum
// ---------------------------------------------------------------------------

double SLSpectrum::level_omega(int ell) const {
    if (ell == 0) return omegas[0];
    const int i = 2 * ell;
    if (i >= count()) throw Error("level_omega: level out of range");
    return 0.5 * (omegas[i - 1] + omegas[i]);
}

double SLSpectrum::y_alpha(int k, double xi) const {
    double sv = xi / alpha;
    sv -= glen * std::floor(sv / glen);
    // linear interpolation on the uniform s grid (callers align grids so this
    // path is exact at nodes)
    const int n = static_cast<int>(s.size());
    const double hs = glen / n;
    const double x = sv / hs;
    const int i = std::min(n - 1, static_cast<int>(std::floor(x)));
    const double frac = x - i;
    const double yl = y(i, k), yr = y((i + 1) % n, k);
    return (yl + frac * (yr - yl)) / std::sqrt(alpha);
}

SLSpectrum sl_spectrum(const FreeBoundary& fb, double alpha, int kmax) {
    if (kmax < 1) throw Error("sl_spectrum: kmax >= 1 required");
    SLSpectrum sp;
    sp.alpha = alpha;
    sp.glen = fb.length;
    int N = std::max(128, 8 * (kmax + 1));
    if (N % 2 == 1) ++N;
    sp.s.resize(N);
    sp.weight.resize(N);
    for (int j = 0; j < N; ++j) {
        sp.s[j] = fb.length * j / N;
        const double w = fb.dn_psi_at_s(sp.s[j]);
        sp.weight[j] = w * w;
    }

    // spectral second-derivative kernel K(d) on the periodic grid
    const double L = fb.length;
    std::vector<double> kern(N, 0.0);
    for (int d = 0; d < N; ++d) {
        double acc = 0.0;
        for (int m = -N / 2; m < N / 2; ++m) {
            const double om = 2.0 * pi * m / L;
            acc += -om * om * std::cos(2.0 * pi * m * d / N);
        }
        kern[d] = acc / N;
    }
    Eigen::MatrixXd A(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) A(i, j) = -kern[(i - j + N) % N];
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
    for (int j = 0; j < N; ++j) B(j, j) = sp.weight[j];

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    if (es.info() != Eigen::Success)
        throw NumericsFailure("sl_spectrum: eigensolver failed");

    const int keep = std::min(N, 2 * kmax + 1);
    sp.omegas.resize(keep);
    sp.y.resize(N, keep);
    const double hs = L / N;
    for (int k = 0; k < keep; ++k) {
        const double lam = std::max(0.0, es.eigenvalues()(k));
        sp.omegas[k] = std::sqrt(lam) / alpha;
        Eigen::VectorXd v = es.eigenvectors().col(k);
        const double l2 = std::sqrt(v.squaredNorm() * hs);
        v /= l2;
        if (v(0) < 0 || (std::fabs(v(0)) < 1e-12 && v(1) < 0)) v = -v;
        sp.y.col(k) = v;
    }
    // weighted orthogonality defect
    double defect = 0.0;
    for (int a = 0; a < keep; ++a)
        for (int b = a + 1; b < keep; ++b) {
            double acc = 0.0;
            for (int j = 0; j < N; ++j) acc += sp.y(j, a) * sp.y(j, b) * sp.weight[j] * hs;
            defect = std::max(defect, std::fabs(acc));
        }
    sp.orth_defect = defect;
    return sp;
}

// ---------------------------------------------------------------------------
// Cylinder solve
// ---------------------------------------------------------------------------

double CylinderField::weighted_l2(double theta_exp) const {
    const double hx = xi.size() > 1 ? xi[1] - xi[0] : 1.0;
    const double he = eta[1] - eta[0];
    double acc = 0.0;
    for (int i = 0; i < v.rows(); ++i) {
        const double w = std::exp(2.0 * theta_exp * std::fabs(eta[i]));
        for (int j = 0; j < v.cols(); ++j) acc += w * v(i, j) * v(i, j);
    }
    return std::sqrt(acc * hx * he);
}

CylinderSolveResult solve_cylinder(const CylinderField& g, double theta,
                                   const SLSpectrum& spectrum, double eps) {
    const int nxi = static_cast<int>(g.xi.size());
    const int neta = static_cast<int>(g.eta.size());
    if (nxi != static_cast<int>(spectrum.s.size()))
        throw NumericsFailure("solve_cylinder: xi grid must match the spectrum grid");
    const double T = std::max(std::fabs(g.eta.front()), std::fabs(g.eta.back()));
    const double hs = spectrum.glen / nxi;

    CylinderSolveResult out;
    out.phi.xi = g.xi;
    out.phi.eta = g.eta;
    out.phi.theta = theta;
    out.phi.v = Eigen::MatrixXd::Zero(neta, nxi);

    const int K = spectrum.count();
    // dual weights: eigenfunctions are orthogonal in the |d_n psi|^2 metric
    std::vector<double> ck(K, 0.0);
    for (int k = 0; k < K; ++k) {
        double acc = 0.0;
        for (int j = 0; j < nxi; ++j)
            acc += spectrum.y(j, k) * spectrum.y(j, k) * spectrum.weight[j] * hs;
        ck[k] = acc;
    }

    std::map<long, FundamentalSet> fs_cache;
    for (int k = 0; k < K; ++k) {
        const double omega = spectrum.omegas[k];
        // mode coefficients in the xi-normalized eigenbasis Y_k = y_k/sqrt(alpha):
        // g_k(eta) = <g, Y_k w>_dxi / c_k = sqrt(alpha) <g, y_k w>_ds / c_k
        std::vector<double> gk(neta, 0.0);
        for (int i = 0; i < neta; ++i) {
            double acc = 0.0;
            for (int j = 0; j < nxi; ++j)
                acc += g.v(i, j) * spectrum.y(j, k) * spectrum.weight[j] * hs;
            gk[i] = std::sqrt(spectrum.alpha) * acc / ck[k];
        }

        const long key = std::lround(omega * 1e12);
        auto it = fs_cache.find(key);
        if (it == fs_cache.end())
            it = fs_cache.emplace(key, fundamental_set(omega, eps, T, neta - 1)).first;

        auto ms = solve_mode(omega, gk, theta, it->second, eps);
        CylinderBandReport br;
        br.k = k;
        br.omega = omega;
        br.band = ms.report.band;
        br.orth_kp = ms.report.orth_kp;
        br.orth_second = ms.report.orth_second;
        br.projected = ms.report.projected;
        out.bands.push_back(br);
        const double inv_sqrt_alpha = 1.0 / std::sqrt(spectrum.alpha);
        for (int i = 0; i < neta; ++i)
            for (int j = 0; j < nxi; ++j)
                out.phi.v(i, j) += ms.phi[i] * spectrum.y(j, k) * inv_sqrt_alpha;
    }
    return out;
}

} // namespace liouville
