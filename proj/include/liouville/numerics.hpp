#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "liouville/errors.hpp"

namespace liouville::num {

inline constexpr double pi = 3.14159265358979323846;

/// log(cosh(x)) without overflow for large |x|.
inline double log_cosh(double x) {
    const double ax = std::fabs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

/// sech(x), overflow-safe.
inline double sech(double x) {
    const double e = std::exp(-std::fabs(x));
    return 2.0 * e / (1.0 + e * e);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature
// ---------------------------------------------------------------------------

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1,1].
/// Newton iteration on Legendre polynomials; n <= 64 is plenty here.
struct GaussLegendre {
    std::vector<double> x, w;

    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            // Chebyshev initial guess
            double xi = std::cos(pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                // Legendre P_n(xi) and derivative by recurrence
                double p0 = 1.0, p1 = xi;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
                double dx = -p1 / dp;
                xi += dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            x[i] = xi;
            w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
        }
    }
};

/// Composite Gauss-Legendre quadrature of f over [a,b] with `panels`
/// equal panels of an `order`-point rule.
template <typename F>
double integrate(F&& f, double a, double b, int panels = 64, int order = 16) {
    static thread_local int cached_order = -1;
    static thread_local GaussLegendre rule(16);
    if (order != cached_order) {
        rule = GaussLegendre(order);
        cached_order = order;
    }
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (int i = 0; i < order; ++i)
            s += rule.w[i] * f(c + 0.5 * h * rule.x[i]);
    }
    return s * 0.5 * h;
}

// ---------------------------------------------------------------------------
// C-infinity cutoff profiles
// ---------------------------------------------------------------------------

/// Smooth step built from the exp(-1/x) mollifier: 0 for x<=0, 1 for x>=1.
inline double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

/// Cutoff equal to 1 for |x| <= 1 and 0 for |x| >= 2.
inline double bump12(double x) {
    return 1.0 - smooth_step(std::fabs(x) - 1.0);
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Brent-style bisection/secant hybrid. Requires a sign change on [a,b].
template <typename F>
double brent(F&& f, double a, double b, double tol = 1e-14, int maxit = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw NumericsFailure("brent: no sign change in bracket");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < maxit; ++it) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 1e-16 * std::fabs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q, r, s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc; r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Classical RK4 for small ODE systems
// ---------------------------------------------------------------------------

/// Integrates y' = f(t, y) for a 2-vector y from t0 to t1 with n steps.
/// f signature: void(double t, const double y[2], double dy[2]).
template <typename F>
void rk4_2(F&& f, double t0, double t1, double y[2], int n) {
    const double h = (t1 - t0) / n;
    double k1[2], k2[2], k3[2], k4[2], tmp[2];
    double t = t0;
    for (int i = 0; i < n; ++i) {
        f(t, y, k1);
        tmp[0] = y[0] + 0.5 * h * k1[0]; tmp[1] = y[1] + 0.5 * h * k1[1];
        f(t + 0.5 * h, tmp, k2);
        tmp[0] = y[0] + 0.5 * h * k2[0]; tmp[1] = y[1] + 0.5 * h * k2[1];
        f(t + 0.5 * h, tmp, k3);
        tmp[0] = y[0] + h * k3[0]; tmp[1] = y[1] + h * k3[1];
        f(t + h, tmp, k4);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        t += h;
    }
}

// ---------------------------------------------------------------------------
// Least-squares line fit
// ---------------------------------------------------------------------------

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = slope*x + intercept with R^2.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw NumericsFailure("fit_line: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i]; sy += y[i];
        sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    LineFit out;
    out.slope = (n * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, ybar = sy / n;
    for (size_t i = 0; i < n; ++i) {
        const double yi = out.slope * x[i] + out.intercept;
        ss_res += (y[i] - yi) * (y[i] - yi);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    out.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

/// Two-regressor fit y = a*x1 + b*x2 + c (used for power + log-power laws).
struct PlaneFit {
    double a = 0.0, b = 0.0, c = 0.0;
};

PlaneFit fit_plane(const std::vector<double>& x1, const std::vector<double>& x2,
                   const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Discrete Fourier transform (small sizes, setup-time only)
// ---------------------------------------------------------------------------

using cplx = std::complex<double>;

/// Forward DFT: out[k] = (1/N) sum_j in[j] exp(-2 pi i j k / N).
/// Coefficient convention matches truncated Fourier series
/// f(t) = sum_k out[k] exp(i k t) on a uniform grid t_j = 2 pi j / N.
std::vector<cplx> dft_coeffs(const std::vector<cplx>& in);

/// Evaluate sum over k in [-N/2, N/2) of c[k mod N] e^{i k t}.
cplx fourier_eval(const std::vector<cplx>& c, double t);
/// Derivative of the series above.
cplx fourier_eval_deriv(const std::vector<cplx>& c, double t, int order = 1);

// ---------------------------------------------------------------------------
// Chebyshev collocation on [-1,1]
// ---------------------------------------------------------------------------

/// Chebyshev-Gauss-Lobatto points x_j = cos(pi j / n), j = 0..n, and the
/// dense spectral differentiation matrix (Trefethen's construction).
struct Chebyshev {
    int n;                       // polynomial degree; n+1 points
    std::vector<double> x;       // points, x[0] = 1, x[n] = -1
    std::vector<double> D;       // (n+1)x(n+1) row-major differentiation matrix

    explicit Chebyshev(int n);
    double d(int i, int j) const { return D[static_cast<size_t>(i) * (n + 1) + j]; }
};

} // namespace liouville::num
