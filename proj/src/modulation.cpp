#include "liouville/modulation.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace liouville {

namespace {

// 4th-order composite quadrature (Simpson with 3/8 head for odd counts)
double integrate_uniform(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size()) - 1;
    double s = 0.0;
    int start = 0, m = n;
    if (n % 2 == 1) {
        s += 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
        start = 3;
        m = n - 3;
    }
    for (int i = start; i < start + m; i += 2)
        s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    return s;
}

} // namespace

ProjectionMatrices projection_matrices(const ModulationShape& shapes,
                                       const FundamentalSet& fs) {
    ProjectionMatrices pm;
    pm.omega = fs.omega;
    const int n = fs.size();
    const double h = fs.h();

    std::vector<double> d1(n), d2(n);
    for (int i = 0; i < n; ++i) {
        d1[i] = -2.0 * fs.kp(i);
        d2[i] = fs.l_branch ? -2.0 * fs.l[i] : -2.0 * fs.km(i);
    }
    auto entry = [&](auto&& shape, const std::vector<double>& d) {
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i) f[i] = shape(fs.eta[i]) * d[i];
        return integrate_uniform(f, h);
    };
    pm.Z(0, 0) = entry([&](double e) { return shapes.Z1(e); }, d1);
    pm.Z(0, 1) = entry([&](double e) { return shapes.Z2(e); }, d1);
    pm.Z(1, 0) = entry([&](double e) { return shapes.Z1(e); }, d2);
    pm.Z(1, 1) = entry([&](double e) { return shapes.Z2(e); }, d2);
    pm.W(0, 0) = entry([&](double e) { return shapes.W1(e); }, d1);
    pm.W(0, 1) = entry([&](double e) { return shapes.W2(e); }, d1);
    pm.W(1, 0) = entry([&](double e) { return shapes.W1(e); }, d2);
    pm.W(1, 1) = entry([&](double e) { return shapes.W2(e); }, d2);

    Eigen::JacobiSVD<Eigen::Matrix2d> svd(pm.system());
    pm.min_singular_value = svd.singularValues()(1);
    return pm;
}

QCalibration calibrate_Q(double omega_star, const std::vector<double>& Q_grid,
                         double eps, double T, int nsteps) {
    if (Q_grid.empty()) throw CalibrationFailed("calibrate_Q: empty Q grid");
    // fundamental sets are Q-independent; build them once over the omega grid
    const int npts = 51;
    std::vector<FundamentalSet> bank;
    bank.reserve(npts);
    for (int i = 0; i < npts; ++i)
        bank.push_back(fundamental_set(omega_star * i / (npts - 1), eps, T, nsteps));

    QCalibration best;
    best.floor = -1.0;
    for (double Q : Q_grid) {
        ModulationShape sh;
        sh.Q = Q;
        double floor = 1e300;
        for (const auto& fs : bank) {
            const auto pm = projection_matrices(sh, fs);
            floor = std::min(floor, pm.min_singular_value);
        }
        if (floor > best.floor) {
            best.floor = floor;
            best.Q = Q;
        }
    }
    if (best.floor < 1e-6)
        throw CalibrationFailed("calibrate_Q: no Q reaches the invertibility floor");
    return best;
}

// ---------------------------------------------------------------------------
// Coefficients
// ---------------------------------------------------------------------------

double ModulationCoeffs::a_of_xi(double xi) const {
    double v = 0.0;
    for (int k = 0; k <= K_alpha; ++k) v += a[k] * spectrum->y_alpha(k, xi);
    return v;
}

double ModulationCoeffs::b_of_xi(double xi) const {
    double v = 0.0;
    for (int k = 0; k <= K_alpha; ++k) v += b[k] * spectrum->y_alpha(k, xi);
    return v;
}

ModulationField ModulationCoeffs::field() const {
    ModulationField f;
    f.Q = Q;
    f.a = [this](double xi) { return a_of_xi(xi); };
    f.b = [this](double xi) { return b_of_xi(xi); };
    return f;
}

int mode_cutoff(const SLSpectrum& spectrum, double omega_star) {
    int K = -1;
    for (int k = 0; k < spectrum.count(); ++k)
        if (spectrum.omegas[k] < omega_star) K = k;
    return K;
}

std::vector<FundamentalSet> build_fs_bank(const SLSpectrum& spectrum, int K_alpha,
                                          double eps, double T, int nsteps) {
    std::vector<FundamentalSet> bank;
    bank.reserve(K_alpha + 1);
    for (int k = 0; k <= K_alpha; ++k)
        bank.push_back(fundamental_set(spectrum.omegas[k], eps, T, nsteps));
    return bank;
}

std::pair<std::vector<double>, std::vector<double>>
project_rhs(const CylinderField& g, const SLSpectrum& spectrum,
            const std::vector<FundamentalSet>& fs_bank, double eps) {
    (void)eps;
    const int K = static_cast<int>(fs_bank.size());
    const int nxi = static_cast<int>(g.xi.size());
    const int neta = static_cast<int>(g.eta.size());
    if (nxi != static_cast<int>(spectrum.s.size()))
        throw NumericsFailure("project_rhs: xi grid must match the spectrum grid");
    const double hxi = g.xi[1] - g.xi[0];
    std::vector<double> h1(K, 0.0), h2(K, 0.0);
    for (int k = 0; k < K; ++k) {
        const auto& fs = fs_bank[k];
        if (fs.size() != neta)
            throw NumericsFailure("project_rhs: eta grid mismatch with fs bank");
        // xi-profile of g against y_{alpha,k} (plain measure, per the
        // projection definition), then eta-quadrature against the duals
        std::vector<double> geta1(neta), geta2(neta);
        const double inv_sqrt_alpha = 1.0 / std::sqrt(spectrum.alpha);
        for (int i = 0; i < neta; ++i) {
            double acc = 0.0;
            for (int j = 0; j < nxi; ++j)
                acc += g.v(i, j) * spectrum.y(j, k) * inv_sqrt_alpha;
            const double gx = acc * hxi;
            geta1[i] = gx * (-2.0 * fs.kp(i));
            geta2[i] = gx * (fs.l_branch ? -2.0 * fs.l[i] : -2.0 * fs.km(i));
        }
        h1[k] = integrate_uniform(geta1, fs.h());
        h2[k] = integrate_uniform(geta2, fs.h());
    }
    return {h1, h2};
}

ModulationCoeffs solve_modulation(const std::vector<double>& h1,
                                  const std::vector<double>& h2,
                                  const std::vector<ProjectionMatrices>& mats,
                                  const SLSpectrum& spectrum, double Q) {
    const int K = static_cast<int>(h1.size());
    if (static_cast<int>(mats.size()) < K || static_cast<int>(h2.size()) != K)
        throw Error("solve_modulation: size mismatch");
    ModulationCoeffs mc;
    mc.K_alpha = K - 1;
    mc.Q = Q;
    mc.spectrum = &spectrum;
    mc.a.resize(K);
    mc.b.resize(K);
    double l2 = 0.0, hnorm = 0.0;
    for (int k = 0; k < K; ++k) {
        const Eigen::Matrix2d S = mats[k].system();
        if (mats[k].min_singular_value < 1e-12)
            throw CalibrationFailed("solve_modulation: singular projection matrix");
        Eigen::Vector2d sol = S.fullPivLu().solve(Eigen::Vector2d(h1[k], h2[k]));
        mc.a[k] = sol(0);
        mc.b[k] = sol(1);
        l2 += sol.squaredNorm();
        const double wt = spectrum.alpha * spectrum.omegas[k];   // w~ = alpha omega
        hnorm += (1.0 + wt * wt + wt * wt * wt * wt) * sol.squaredNorm();
    }
    mc.l2_norm = std::sqrt(l2);
    mc.h2_norm = std::sqrt(hnorm);
    return mc;
}

PicardHistory picard_closure(
    const std::function<std::pair<std::vector<double>, std::vector<double>>(
        const ModulationCoeffs&)>& project,
    const std::vector<ProjectionMatrices>& mats, const SLSpectrum& spectrum,
    double Q, ModulationCoeffs& coeffs, const PicardOptions& opts) {
    PicardHistory hist;
    const int K = coeffs.K_alpha + 1;
    for (int it = 0; it < opts.max_iters; ++it) {
        auto [h1, h2] = project(coeffs);
        double pmax = 0.0;
        for (int k = 0; k < K; ++k)
            pmax = std::max({pmax, std::fabs(h1[k]), std::fabs(h2[k])});
        hist.projection_norms.push_back(pmax);
        hist.iters = it;
        if (pmax < opts.tol) {
            hist.converged = true;
            return hist;
        }
        // measured projection P = S (a,b) - h(f); drive P to zero
        ModulationCoeffs delta = solve_modulation(h1, h2, mats, spectrum, Q);
        double dmax = 0.0, cmax = 1e-300;
        for (int k = 0; k < K; ++k) {
            coeffs.a[k] -= opts.damping * delta.a[k];
            coeffs.b[k] -= opts.damping * delta.b[k];
            dmax = std::max({dmax, std::fabs(delta.a[k]), std::fabs(delta.b[k])});
            cmax = std::max({cmax, std::fabs(coeffs.a[k]), std::fabs(coeffs.b[k])});
        }
        if (dmax < opts.rel_change * cmax) {
            auto [f1, f2] = project(coeffs);
            double fmax = 0.0;
            for (int k = 0; k < K; ++k)
                fmax = std::max({fmax, std::fabs(f1[k]), std::fabs(f2[k])});
            hist.projection_norms.push_back(fmax);
            hist.converged = fmax < opts.tol;
            return hist;
        }
    }
    return hist;
}

} // namespace liouville
