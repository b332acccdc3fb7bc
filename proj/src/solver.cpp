#include "liouville/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "liouville/matching.hpp"

namespace liouville {

using num::pi;

// ---------------------------------------------------------------------------
// SolverConstants
// ---------------------------------------------------------------------------

void SolverConstants::validate() const {
    auto req = [](bool ok, const char* msg) {
        if (!ok) throw Error(std::string("SolverConstants: ") + msg);
    };
    req(M > 0, "M > 0");
    req(m1 > 2.0, "m1 > 2");
    req(m_rho > 2.0 * m1, "m_rho > 2 m1");
    req(m2 >= m_rho, "m2 >= m_rho (chi2 rho = rho)");
    req(m_rho_bar >= 2.05 * m2, "m_rho_bar >= 2.05 m2 (rho_bar chi2 = chi2)");
    req(theta > 0 && theta < 1, "theta in (0,1)");
    req(eps > 0, "eps > 0");
    req(theta + eps < omega_star, "theta + eps < omega_star");
    req(sigma > 0 && sigma < 0.25, "sigma in (0, 1/4)");
    req(k_window() > 4.0 * M, "K > 4 M");
}

std::vector<SolverConstants::ChainItem> SolverConstants::chain_report(double c) const {
    std::vector<ChainItem> out;
    auto add = [&](const std::string& name, double lhs, double rhs, bool less) {
        out.push_back({name, lhs, rhs, less ? lhs < rhs : lhs > rhs});
    };
    add("m_rho > 2 m1", m_rho, 2.0 * m1, false);
    add("m_rho/2 > m1", 0.5 * m_rho, m1, false);
    add("m1 > 10/(c M)", m1, 10.0 / (c * M), false);
    add("m2 > 6/(M theta)", m2, 6.0 / (M * theta), false);
    add("theta < 1 - 1/(m1 M)", theta, 1.0 - 1.0 / (m1 * M), true);
    add("theta < (1-sigma)/(4 m1 M)", theta, (1.0 - sigma) / (4.0 * m1 * M), true);
    add("theta < sigma/(m_rho M)", theta, sigma / (m_rho * M), true);
    add("eps < sigma/(m_rho M) - theta", eps, sigma / (m_rho * M) - theta, true);
    add("eps < 1/(8 m_rho_bar M)", eps, 1.0 / (8.0 * m_rho_bar * M), true);
    add("eps < (1-sigma)/(m1 M) - 4 theta", eps, (1.0 - sigma) / (m1 * M) - 4.0 * theta, true);
    return out;
}

SolverConstants SolverConstants::study_defaults() {
    SolverConstants sc;
    sc.M = 0.33;
    sc.m1 = 2.05;
    sc.m_rho = 4.15;
    sc.m2 = 4.2;
    sc.m_rho_bar = 8.7;
    sc.theta = 0.3;
    sc.eps = 0.05;
    sc.sigma = 0.2;
    sc.omega_star = 0.5;
    sc.K_window = 2.2;
    return sc;
}

// ---------------------------------------------------------------------------
// Cutoff
// ---------------------------------------------------------------------------

namespace {

// smooth step S and derivatives via S = 1/(1+e^phi), phi = 1/x - 1/(1-x)
void step_derivs(double x, double& S, double& S1, double& S2) {
    if (x <= 0.0) { S = 0.0; S1 = 0.0; S2 = 0.0; return; }
    if (x >= 1.0) { S = 1.0; S1 = 0.0; S2 = 0.0; return; }
    const double phi = 1.0 / x - 1.0 / (1.0 - x);
    const double e = std::exp(phi);
    S = 1.0 / (1.0 + e);
    const double p1 = -1.0 / (x * x) - 1.0 / ((1.0 - x) * (1.0 - x));
    const double p2 = 2.0 / (x * x * x) - 2.0 / ((1.0 - x) * (1.0 - x) * (1.0 - x));
    const double s1s = S * (1.0 - S);
    S1 = -s1s * p1;
    S2 = -(S1 * (1.0 - 2.0 * S) * p1 + s1s * p2);
}

} // namespace

double Cutoff::operator()(double t) const {
    double S, S1, S2;
    step_derivs((std::fabs(t) - plateau) / (support - plateau), S, S1, S2);
    return 1.0 - S;
}

double Cutoff::d1(double t) const {
    double S, S1, S2;
    const double w = support - plateau;
    step_derivs((std::fabs(t) - plateau) / w, S, S1, S2);
    const double sgn = t >= 0 ? 1.0 : -1.0;
    return -sgn * S1 / w;
}

double Cutoff::d2(double t) const {
    double S, S1, S2;
    const double w = support - plateau;
    step_derivs((std::fabs(t) - plateau) / w, S, S1, S2);
    return -S2 / (w * w);
}

// ---------------------------------------------------------------------------
// RadialAssembly
// ---------------------------------------------------------------------------

RadialAssembly RadialAssembly::build(const AnnulusModel& model, double lambda,
                                     const SolverConstants& sc, double mod_a,
                                     double mod_b, double Q) {
    RadialAssembly ra;
    ra.model = model;
    ra.sc = sc;
    ra.lambda = lambda;
    ra.mod_a = mod_a;
    ra.mod_b = mod_b;
    ra.Q = Q;

    FreeBoundary fb = FreeBoundary::circle(model, 64);
    ScalingParams sp = scaling_params(lambda, fb, model, sc.M);
    ra.beta = sp.beta;
    ra.alpha = sp.alpha;
    ra.mu = sp.mu[0];
    ra.delta = sp.delta[0];
    ra.oa = outer_w0(model, sp, fb, 8);
    ra.chi0 = Cutoff{ra.delta, 2.0 * ra.delta};

    const double width = std::min(model.R1 - model.R(), model.R() - model.R2);
    if (2.0 * ra.delta > 0.995 * width)
        throw InnerRegionTooWide("RadialAssembly: chi0 support exceeds the chart");
    return ra;
}

RadialAssembly::Value RadialAssembly::v0(double r) const {
    const double lm = lambda * mu;
    const double eta = lm * (r - model.R());
    ModulationShape sh;
    sh.Q = Q;
    const auto Y = sh.y(eta);
    const double f = (mod_a * eta + mod_b) * Y.Y;
    const double f1 = mod_a * Y.Y + (mod_a * eta + mod_b) * Y.Yp;
    const double f2 = 2.0 * mod_a * Y.Yp + (mod_a * eta + mod_b) * Y.Ypp;
    const double f3 = 3.0 * mod_a * Y.Ypp + (mod_a * eta + mod_b) * Y.Yppp;
    if (1.0 + f1 <= 0.0)
        throw ModulationTooLarge("RadialAssembly: 1 + d_eta f <= 0");
    const auto b = bubble_1d(eta + f);
    Value v;
    v.u = b.U + 2.0 * std::log(mu * (1.0 + f1));
    const double ve = b.Up * (1.0 + f1) + 2.0 * f2 / (1.0 + f1);
    const double vee = b.Upp * (1.0 + f1) * (1.0 + f1) + b.Up * f2 +
                       2.0 * f3 / (1.0 + f1) - 2.0 * f2 * f2 / ((1.0 + f1) * (1.0 + f1));
    v.ur = lm * ve;
    v.urr = lm * lm * vee;
    return v;
}

double RadialAssembly::w0(double r) const {
    return r >= model.R() ? oa.w0_plus(r, 0.0) : oa.w0_minus(r, 0.0);
}

RadialAssembly::Value RadialAssembly::u0(double r) const {
    const double t = r - model.R();
    const double c = chi0(t);
    Value out;
    if (c == 0.0) {
        out.u = w0(r);
        out.ur = r >= model.R() ? oa.dr_w0_plus(r, 0.0) : oa.dr_w0_minus(r, 0.0);
        out.urr = r >= model.R() ? oa.drr_w0_plus(r, 0.0) : oa.drr_w0_minus(r, 0.0);
        return out;
    }
    const Value vb = v0(r);
    if (c == 1.0) return vb;
    const double c1 = chi0.d1(t), c2 = chi0.d2(t);
    const double w = w0(r);
    const double wr = r >= model.R() ? oa.dr_w0_plus(r, 0.0) : oa.dr_w0_minus(r, 0.0);
    const double wrr = r >= model.R() ? oa.drr_w0_plus(r, 0.0) : oa.drr_w0_minus(r, 0.0);
    out.u = c * vb.u + (1.0 - c) * w;
    out.ur = c1 * (vb.u - w) + c * vb.ur + (1.0 - c) * wr;
    out.urr = c2 * (vb.u - w) + 2.0 * c1 * (vb.ur - wr) + c * vb.urr + (1.0 - c) * wrr;
    return out;
}

double RadialAssembly::residual_at(double r) const {
    const Value v = u0(r);
    const double lap = v.urr + v.ur / r;
    return lap + std::exp(v.u + 2.0 * std::log(lambda));
}

// ---------------------------------------------------------------------------
// PolarGrid / GlobalApprox
// ---------------------------------------------------------------------------

PolarGrid PolarGrid::graded(const AnnulusModel& m, int nr, int ntheta, double cluster) {
    PolarGrid g;
    const double T1 = std::log(m.R1), T2 = std::log(m.R2);
    const double mid = 0.5 * (T1 + T2), half = 0.5 * (T1 - T2);
    g.tau.resize(nr);
    g.r.resize(nr);
    const double sh = std::sinh(cluster);
    for (int i = 0; i < nr; ++i) {
        const double sgm = -1.0 + 2.0 * i / (nr - 1.0);
        g.tau[i] = mid + half * std::sinh(cluster * sgm) / sh;
        g.r[i] = std::exp(g.tau[i]);
    }
    g.theta.resize(std::max(1, ntheta));
    for (int j = 0; j < std::max(1, ntheta); ++j)
        g.theta[j] = 2.0 * pi * j / std::max(1, ntheta);
    return g;
}

double GlobalApprox::partition_defect() const {
    double d = 0.0;
    for (int i = 0; i < u0.rows(); ++i)
        for (int j = 0; j < u0.cols(); ++j) {
            d = std::max(d, std::fabs(chi0(i, j) + chi0p(i, j) + chi0m(i, j) - 1.0));
            d = std::max(d, std::fabs(chi1(i, j) + chi1p(i, j) + chi1m(i, j) - 1.0));
        }
    return d;
}

GlobalApprox assemble_u0(const ScalingParams& sp, const OuterApprox& oa,
                         const ModulationCoeffs* f, const SolverConstants& sc,
                         const FreeBoundary& fb, const PolarGrid& grid) {
    sc.validate();
    GlobalApprox ga;
    ga.grid = grid;
    ga.model = sp.model;
    ga.sc = sc;
    ga.lambda = sp.lambda;
    const int nr = grid.nr(), nth = grid.ntheta();
    const double R = sp.model.R();
    const double width = std::min(sp.model.R1 - R, R - sp.model.R2);
    const double bminus = 1.0 / sp.model.half_log_ratio();
    const double logbeta = std::log(sp.beta);

    auto alloc = [&](Eigen::MatrixXd& m) { m = Eigen::MatrixXd::Zero(nr, nth); };
    alloc(ga.u0); alloc(ga.u1); alloc(ga.u2);
    alloc(ga.chi0); alloc(ga.chi0p); alloc(ga.chi0m);
    alloc(ga.chi1); alloc(ga.chi1p); alloc(ga.chi1m);
    alloc(ga.chi2); alloc(ga.rho); alloc(ga.rhop); alloc(ga.rhom);
    alloc(ga.rhobar);

    ModulationField mf;
    if (f) mf = f->field();

    for (int j = 0; j < nth; ++j) {
        const double th = grid.theta[j];
        const double dnp = fb.dn_psi_at_phi(th);
        const double mu = dnp * sp.beta_plus() * bminus / (kA0 * sp.lambda * R);
        const double lm = sp.lambda * mu;
        const double delta = sp.M * logbeta / lm;
        // widest support of the cutoff stack must stay inside the chart
        const double widest = std::max({2.0, 2.0 * sc.m1, 2.0 * sc.m2, sc.m_rho,
                                        sc.m_rho_bar}) * delta;
        if (widest > 0.995 * width)
            throw InnerRegionTooWide("assemble_u0: 2 m2 delta_lambda exceeds the chart");

        const Cutoff c0{delta, 2.0 * delta};
        const Cutoff c1{sc.m1 * delta, 2.0 * sc.m1 * delta};
        const Cutoff c2{sc.m2 * delta, 2.0 * sc.m2 * delta};
        const Cutoff crho{2.0 * sc.m1 * delta, sc.m_rho * delta};
        const Cutoff crhobar{2.0 * sc.m2 * delta, sc.m_rho_bar * delta};
        const double s_arc = fb.s_at_phi(th);
        const double xi = sp.alpha * s_arc;

        for (int i = 0; i < nr; ++i) {
            const double r = grid.r[i];
            const double t = r - R;
            const double x0 = c0(t);
            ga.chi0(i, j) = x0;
            ga.chi0p(i, j) = t > 0 ? 1.0 - x0 : 0.0;
            ga.chi0m(i, j) = t < 0 ? 1.0 - x0 : 0.0;
            const double x1 = c1(t);
            ga.chi1(i, j) = x1;
            ga.chi1p(i, j) = t > 0 ? 1.0 - x1 : 0.0;
            ga.chi1m(i, j) = t < 0 ? 1.0 - x1 : 0.0;
            ga.chi2(i, j) = c2(t);
            ga.rho(i, j) = crho(t);
            ga.rhobar(i, j) = crhobar(t);
            // rho+-: 0 below delta/2, 1 beyond m1 delta, on the matching side
            double S, S1, S2;
            step_derivs((std::fabs(t) - 0.5 * delta) / ((sc.m1 - 0.5) * delta), S, S1, S2);
            ga.rhop(i, j) = t > 0 ? S : 0.0;
            ga.rhom(i, j) = t < 0 ? S : 0.0;

            double u = 0.0;
            if (x0 > 0.0) {
                const double eta = lm * t;
                double fval = 0.0, feta = 0.0;
                if (f) {
                    ModulationShape shq;
                    shq.Q = mf.Q;
                    const auto Y = shq.y(eta);
                    const double av = mf.a(xi), bv = mf.b(xi);
                    fval = (av * eta + bv) * Y.Y;
                    feta = av * Y.Y + (av * eta + bv) * Y.Yp;
                    if (1.0 + feta <= 0.0)
                        throw ModulationTooLarge("assemble_u0: 1 + d_eta f <= 0");
                }
                u += x0 * (bubble_1d(eta + fval).U + 2.0 * std::log(mu * (1.0 + feta)));
            }
            if (t > 0 && x0 < 1.0) u += (1.0 - x0) * oa.w0_plus(r, th);
            if (t < 0 && x0 < 1.0) u += (1.0 - x0) * oa.w0_minus(r, th);
            ga.u0(i, j) = u;
        }
    }
    return ga;
}

// ---------------------------------------------------------------------------
// Exact radial family
// ---------------------------------------------------------------------------

double ExactRadial::u(double r) const {
    return std::log(2.0 * c * c) - 2.0 * num::log_cosh(c * std::log(r / r0)) -
           2.0 * std::log(lambda * r);
}

double ExactRadial::du(double r) const {
    const double th = std::tanh(c * std::log(r / r0));
    return (-2.0 * c * th - 2.0) / r;
}

double ExactRadial::pde_residual(double r) const {
    const double x = c * std::log(r / r0);
    const double th = std::tanh(x);
    const double s = num::sech(x);
    const double upp = (-2.0 * c * c * s * s + 2.0 * c * th + 2.0) / (r * r);
    const double up = du(r);
    const double lap = upp + up / r;
    return lap + std::exp(u(r) + 2.0 * std::log(lambda));
}

double ExactRadial::sup_u() const {
    if (c <= 1.0) return u(std::sqrt(R1 * R2));
    const double rstar = r0 * std::exp(-std::atanh(1.0 / c) / c);
    return u(std::min(std::max(rstar, R2), R1));
}

double ExactRadial::mass_closed_form() const {
    return 4.0 * pi * c * (std::tanh(c * std::log(R1 / r0)) -
                           std::tanh(c * std::log(R2 / r0)));
}

double ExactRadial::mass_quadrature(int panels) const {
    // lambda^2 ∫ e^u dA = 4 pi c^2 ∫ sech^2(c (tau - tau0)) dtau
    const double T1 = std::log(R1), T2 = std::log(R2);
    const double tau0 = std::log(r0);
    auto f = [&](double tau) {
        const double s = num::sech(c * (tau - tau0));
        return 4.0 * pi * c * c * s * s;
    };
    return num::integrate(f, T2, T1, panels, 12);
}

namespace {

// tau0(c): unique root of logcosh(c(T2-t0)) - logcosh(c(T1-t0)) = L
double tau0_of_c(double c, const AnnulusModel& m) {
    const double T1 = std::log(m.R1), T2 = std::log(m.R2), L = T1 - T2;
    auto F = [&](double t0) {
        return 2.0 * (num::log_cosh(c * (T2 - t0)) - num::log_cosh(c * (T1 - t0))) - 2.0 * L;
    };
    const double mid = 0.5 * (T1 + T2);
    return num::brent(F, mid - 90.0, mid + 90.0, 1e-15);
}

double log_lambda_of_c(double c, const AnnulusModel& m) {
    const double T1 = std::log(m.R1);
    const double t0 = tau0_of_c(c, m);
    return 0.5 * (std::log(2.0 * c * c) - 2.0 * num::log_cosh(c * (T1 - t0))) -
           std::log(m.R1);
}

} // namespace

std::pair<double, double> radial_fold(const AnnulusModel& model) {
    // golden-section maximum of the unimodal lambda(c)
    const double L = std::log(model.R1 / model.R2);
    double a = 1.0 + 1e-10, b = std::max(8.0, 200.0 / L);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
    double f1 = log_lambda_of_c(c1, model), f2 = log_lambda_of_c(c2, model);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + b); ++it) {
        if (f1 < f2) {
            a = c1; c1 = c2; f1 = f2;
            c2 = a + gr * (b - a);
            f2 = log_lambda_of_c(c2, model);
        } else {
            b = c2; c2 = c1; f2 = f1;
            c1 = b - gr * (b - a);
            f1 = log_lambda_of_c(c1, model);
        }
    }
    const double cstar = 0.5 * (a + b);
    return {cstar, std::exp(log_lambda_of_c(cstar, model))};
}

std::vector<ExactRadial> exact_radial(double lambda, const AnnulusModel& model) {
    if (!(lambda > 0.0)) throw Error("exact_radial: lambda > 0 required");
    const auto [cstar, lmax] = radial_fold(model);
    if (lambda > lmax)
        throw NoSolution("exact_radial: lambda beyond the fold " + std::to_string(lmax));

    const double T1 = std::log(model.R1), T2 = std::log(model.R2);
    const double logl = std::log(lambda);
    // 2d Newton on F(c, tau0) = 0 from a (c, tau0) seed grid
    auto newton_from = [&](double c, double t0) -> std::optional<ExactRadial> {
        for (int it = 0; it < 80; ++it) {
            const double x1 = c * (T1 - t0), x2 = c * (T2 - t0);
            const double F1 = std::log(2.0 * c * c) - 2.0 * num::log_cosh(x1) -
                              2.0 * (logl + T1);
            const double F2 = std::log(2.0 * c * c) - 2.0 * num::log_cosh(x2) -
                              2.0 * (logl + T2);
            const double th1 = std::tanh(x1), th2 = std::tanh(x2);
            const double a11 = 2.0 / c - 2.0 * th1 * (T1 - t0);
            const double a12 = 2.0 * c * th1;
            const double a21 = 2.0 / c - 2.0 * th2 * (T2 - t0);
            const double a22 = 2.0 * c * th2;
            const double det = a11 * a22 - a12 * a21;
            if (std::fabs(det) < 1e-300) return std::nullopt;
            double dc = (F1 * a22 - F2 * a12) / det;
            double dt = (a11 * F2 - a21 * F1) / det;
            // cap the step to keep c > 1
            const double step = std::max(std::fabs(dc), std::fabs(dt));
            if (step > 2.0) { dc *= 2.0 / step; dt *= 2.0 / step; }
            c -= dc;
            t0 -= dt;
            if (c <= 1.0 + 1e-14) return std::nullopt;
            if (std::fabs(dc) + std::fabs(dt) < 1e-14 * (1.0 + std::fabs(c))) break;
        }
        const double x1 = c * (T1 - t0), x2 = c * (T2 - t0);
        const double F1 = std::log(2.0 * c * c) - 2.0 * num::log_cosh(x1) - 2.0 * (logl + T1);
        const double F2 = std::log(2.0 * c * c) - 2.0 * num::log_cosh(x2) - 2.0 * (logl + T2);
        if (std::fabs(F1) + std::fabs(F2) > 1e-10) return std::nullopt;
        ExactRadial er;
        er.c = c;
        er.r0 = std::exp(t0);
        er.lambda = lambda;
        er.R1 = model.R1;
        er.R2 = model.R2;
        return er;
    };

    std::vector<ExactRadial> roots;
    auto push_unique = [&](const ExactRadial& er) {
        for (const auto& e : roots)
            if (std::fabs(e.c - er.c) < 1e-6 * (1.0 + e.c) &&
                std::fabs(std::log(e.r0 / er.r0)) < 1e-6)
                return;
        roots.push_back(er);
    };
    // seed grid: c log-spaced on both sides of the fold, tau0 near the
    // ratio-equation curve and offset above/below
    for (int i = 0; i < 48; ++i) {
        const double fr = static_cast<double>(i) / 47.0;
        const double c = 1.0 + std::pow(10.0, -10.0 + fr * (std::log10(std::max(
                                   8.0, 300.0 / (T1 - T2)) - 1.0) + 10.0));
        double t0c;
        try {
            t0c = tau0_of_c(c, model);
        } catch (const Error&) {
            continue;
        }
        for (double off : {-1.0, 0.0, 1.0}) {
            if (auto er = newton_from(c, t0c + off)) push_unique(*er);
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](const ExactRadial& a, const ExactRadial& b) { return a.c < b.c; });
    if (roots.empty())
        throw NoSolution("exact_radial: no roots found (lambda near the fold?)");
    return roots;
}

std::vector<RadialBranchPoint> classify_roots(const std::vector<ExactRadial>& roots) {
    std::vector<RadialBranchPoint> out;
    std::vector<size_t> idx(roots.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return roots[a].sup_u() < roots[b].sup_u();
    });
    for (size_t rank = 0; rank < idx.size(); ++rank) {
        const auto& er = roots[idx[rank]];
        RadialBranchPoint p;
        p.lambda = er.lambda;
        p.c = er.c;
        p.r0 = er.r0;
        p.mass = er.mass_closed_form();
        p.normalized_mass = p.mass / (2.0 * std::log(1.0 / er.lambda));
        p.sup_u = er.sup_u();
        if (idx.size() == 1)
            p.label = BranchLabel::maximal;
        else if (rank == 0)
            p.label = BranchLabel::minimal;
        else if (rank == idx.size() - 1)
            p.label = BranchLabel::maximal;
        else
            p.label = BranchLabel::intermediate;
        out.push_back(p);
    }
    return out;
}

RadialBranch radial_branch(const AnnulusModel& model, double c_min, double c_max,
                           int npts) {
    if (!(c_min > 1.0 && c_max > c_min && npts >= 2))
        throw Error("radial_branch: need 1 < c_min < c_max, npts >= 2");
    const auto [cstar, lmax] = radial_fold(model);
    (void)lmax;
    RadialBranch br;
    for (int i = 0; i < npts; ++i) {
        const double fr = static_cast<double>(i) / (npts - 1);
        const double c = c_min * std::pow(c_max / c_min, fr);
        ExactRadial er;
        er.c = c;
        er.r0 = std::exp(tau0_of_c(c, model));
        er.lambda = std::exp(log_lambda_of_c(c, model));
        er.R1 = model.R1;
        er.R2 = model.R2;
        RadialBranchPoint p;
        p.lambda = er.lambda;
        p.c = c;
        p.r0 = er.r0;
        p.mass = er.mass_closed_form();
        p.normalized_mass = p.mass / (2.0 * std::log(1.0 / er.lambda));
        p.sup_u = er.sup_u();
        p.label = c < cstar ? BranchLabel::minimal : BranchLabel::maximal;
        br.points.push_back(p);
    }
    return br;
}

// ---------------------------------------------------------------------------
// Discrete residual and Newton
// ---------------------------------------------------------------------------

ResidualNorms residual_norms(const PolarGrid& grid, const Eigen::MatrixXd& u,
                             double lambda, const Eigen::MatrixXd& weight) {
    const int nr = grid.nr(), nth = grid.ntheta();
    const double dth = nth > 1 ? 2.0 * pi / nth : 1.0;
    ResidualNorms out;
    double l2 = 0.0;
    for (int i = 1; i < nr - 1; ++i) {
        const double hm = grid.tau[i] - grid.tau[i - 1];
        const double hp = grid.tau[i + 1] - grid.tau[i];
        const double tau = grid.tau[i];
        for (int j = 0; j < nth; ++j) {
            const int jp = (j + 1) % nth, jm = (j + nth - 1) % nth;
            double lap_tau = ((u(i + 1, j) - u(i, j)) / hp - (u(i, j) - u(i - 1, j)) / hm) *
                             2.0 / (hp + hm);
            double lap_th = nth > 1
                                ? (u(i, jp) - 2.0 * u(i, j) + u(i, jm)) / (dth * dth)
                                : 0.0;
            const double w = weight.size() > 0 ? weight(i, j) : 1.0;
            const double res = std::exp(-2.0 * tau) * (lap_tau + lap_th) +
                               std::exp(u(i, j) + 2.0 * std::log(lambda)) * w;
            out.sup = std::max(out.sup, std::fabs(res));
            // annulus measure r^2 dtau dtheta (dA = r dr dtheta = e^{2tau} dtau dtheta)
            l2 += res * res * std::exp(2.0 * tau) * 0.5 * (hp + hm) * dth;
        }
    }
    out.l2 = std::sqrt(l2);
    return out;
}

namespace {

std::vector<double> thomas(std::vector<double> dl, std::vector<double> d,
                           std::vector<double> du, std::vector<double> b) {
    const int n = static_cast<int>(d.size());
    for (int i = 1; i < n; ++i) {
        const double w = dl[i] / d[i - 1];
        d[i] -= w * du[i - 1];
        b[i] -= w * b[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = b[n - 1] / d[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (b[i] - du[i] * x[i + 1]) / d[i];
    return x;
}

} // namespace

DiscreteSolution newton_solve(const PolarGrid& grid, const Eigen::MatrixXd& initial,
                              double lambda, const Eigen::MatrixXd& weight,
                              double tol, int max_iters) {
    const int nr = grid.nr(), nth = grid.ntheta();
    DiscreteSolution sol;
    sol.grid = grid;
    sol.lambda = lambda;
    sol.u = initial;
    // Dirichlet boundary
    for (int j = 0; j < nth; ++j) {
        sol.u(0, j) = 0.0;
        sol.u(nr - 1, j) = 0.0;
    }

    auto residual_vec = [&](const Eigen::MatrixXd& u, Eigen::MatrixXd& F) {
        F.setZero(nr, nth);
        const double dth = nth > 1 ? 2.0 * pi / nth : 1.0;
        for (int i = 1; i < nr - 1; ++i) {
            const double hm = grid.tau[i] - grid.tau[i - 1];
            const double hp = grid.tau[i + 1] - grid.tau[i];
            for (int j = 0; j < nth; ++j) {
                const int jp = (j + 1) % nth, jm = (j + nth - 1) % nth;
                const double lap_tau =
                    ((u(i + 1, j) - u(i, j)) / hp - (u(i, j) - u(i - 1, j)) / hm) *
                    2.0 / (hp + hm);
                const double lap_th =
                    nth > 1 ? (u(i, jp) - 2.0 * u(i, j) + u(i, jm)) / (dth * dth) : 0.0;
                const double w = weight.size() > 0 ? weight(i, j) : 1.0;
                // equation scaled by e^{2 tau}: u_tautau + u_thth + lam^2 w e^{2tau} e^u
                F(i, j) = lap_tau + lap_th +
                          w * std::exp(u(i, j) + 2.0 * std::log(lambda) + 2.0 * grid.tau[i]);
            }
        }
    };

    auto l2norm = [&](const Eigen::MatrixXd& F) { return F.norm(); };

    Eigen::MatrixXd F(nr, nth), Fnew(nr, nth);
    residual_vec(sol.u, F);
    double fn = l2norm(F);

    for (int it = 0; it < max_iters; ++it) {
        // convergence measured on the physical residual
        const ResidualNorms rn = residual_norms(grid, sol.u, lambda, weight);
        sol.residual_norm = rn.l2;
        sol.newton_iters = it;
        if (rn.l2 < tol) return sol;

        Eigen::MatrixXd step = Eigen::MatrixXd::Zero(nr, nth);
        if (nth == 1) {
            const int ni = nr - 2;
            std::vector<double> dl(ni, 0.0), d(ni, 0.0), du(ni, 0.0), rhs(ni);
            for (int i = 1; i < nr - 1; ++i) {
                const double hm = grid.tau[i] - grid.tau[i - 1];
                const double hp = grid.tau[i + 1] - grid.tau[i];
                const double fac = 2.0 / (hp + hm);
                const int k = i - 1;
                if (k > 0) dl[k] = fac / hm;
                if (k < ni - 1) du[k] = fac / hp;
                const double w = weight.size() > 0 ? weight(i, 0) : 1.0;
                d[k] = -fac * (1.0 / hp + 1.0 / hm) +
                       w * std::exp(sol.u(i, 0) + 2.0 * std::log(lambda) + 2.0 * grid.tau[i]);
                rhs[k] = -F(i, 0);
            }
            const auto x = thomas(dl, d, du, rhs);
            for (int i = 1; i < nr - 1; ++i) step(i, 0) = x[i - 1];
        } else {
            using Trip = Eigen::Triplet<double>;
            std::vector<Trip> trips;
            const int ni = (nr - 2) * nth;
            trips.reserve(static_cast<size_t>(ni) * 5);
            const double dth = 2.0 * pi / nth;
            auto id = [&](int i, int j) { return (i - 1) * nth + ((j % nth + nth) % nth); };
            Eigen::VectorXd rhs(ni);
            for (int i = 1; i < nr - 1; ++i) {
                const double hm = grid.tau[i] - grid.tau[i - 1];
                const double hp = grid.tau[i + 1] - grid.tau[i];
                const double fac = 2.0 / (hp + hm);
                for (int j = 0; j < nth; ++j) {
                    const int row = id(i, j);
                    const double w = weight.size() > 0 ? weight(i, j) : 1.0;
                    double diag = -fac * (1.0 / hp + 1.0 / hm) - 2.0 / (dth * dth) +
                                  w * std::exp(sol.u(i, j) + 2.0 * std::log(lambda) +
                                               2.0 * grid.tau[i]);
                    trips.emplace_back(row, row, diag);
                    if (i > 1) trips.emplace_back(row, id(i - 1, j), fac / hm);
                    if (i < nr - 2) trips.emplace_back(row, id(i + 1, j), fac / hp);
                    trips.emplace_back(row, id(i, j + 1), 1.0 / (dth * dth));
                    trips.emplace_back(row, id(i, j - 1), 1.0 / (dth * dth));
                    rhs(row) = -F(i, j);
                }
            }
            Eigen::SparseMatrix<double> J(ni, ni);
            J.setFromTriplets(trips.begin(), trips.end());
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
            if (lu.info() != Eigen::Success)
                throw NewtonFailed("newton_solve: Jacobian factorization failed", fn, it);
            Eigen::VectorXd x = lu.solve(rhs);
            for (int i = 1; i < nr - 1; ++i)
                for (int j = 0; j < nth; ++j) step(i, j) = x(id(i, j));
        }

        // Armijo backtracking on the scaled residual norm
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            Eigen::MatrixXd trial = sol.u + alpha * step;
            residual_vec(trial, Fnew);
            const double fnew = l2norm(Fnew);
            if (fnew < (1.0 - 1e-4 * alpha) * fn || fnew < 1e-14) {
                sol.u = trial;
                F = Fnew;
                fn = fnew;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw NewtonFailed("newton_solve: line search stalled", fn, it);
    }
    const ResidualNorms rn = residual_norms(grid, sol.u, lambda, weight);
    sol.residual_norm = rn.l2;
    sol.newton_iters = max_iters;
    if (rn.l2 >= tol)
        throw NewtonFailed("newton_solve: max iterations", rn.l2, max_iters);
    return sol;
}

// ---------------------------------------------------------------------------
// Residual scaling study
// ---------------------------------------------------------------------------

ResidualStudy residual_scaling_study(const std::vector<double>& lambdas,
                                     const AnnulusModel& model,
                                     const SolverConstants& sc) {
    if (lambdas.size() < 4)
        throw Error("residual_scaling_study: need >= 4 lambda values");
    ResidualStudy st;
    const double R = model.R();
    const double width = std::min(model.R1 - R, R - model.R2);
    const double K = sc.k_window();

    for (double lambda : lambdas) {
        RadialAssembly ra = RadialAssembly::build(model, lambda, sc);
        const double lm = lambda * ra.mu;
        const double logbeta = std::log(ra.beta);
        const double eta_max = K * logbeta;
        if (eta_max / lm > 0.995 * width)
            throw InnerRegionTooWide("residual_scaling_study: chi window exceeds the chart");

        // inner weighted norm over the cylinder: chi plateau on supp chi0
        const Cutoff chi{2.0 * sc.M * logbeta, eta_max};
        auto f = [&](double eta) {
            const double c = chi(eta);
            if (c == 0.0) return 0.0;
            const double N = ra.residual_at(ra.r_of_eta(eta));
            return std::exp(2.0 * sc.theta * std::fabs(eta)) * c * c * N * N;
        };
        const double xi_len = 2.0 * pi * ra.alpha * R;
        const double inner =
            std::sqrt(xi_len * num::integrate(f, -eta_max, eta_max, 600, 12));

        // outer region: beyond every inner cutoff support
        const double tcut = 2.0 * sc.m2 * ra.delta;
        double osup = 0.0, ol2 = 0.0;
        auto outer_at = [&](double r) {
            return std::exp(ra.w0(r) + 2.0 * std::log(lambda));
        };
        auto accumulate = [&](double a, double b) {
            const int nsamp = 2000;
            for (int i = 0; i <= nsamp; ++i) {
                const double r = a + (b - a) * i / nsamp;
                osup = std::max(osup, std::fabs(outer_at(r)));
            }
            ol2 += num::integrate([&](double r) {
                const double v = outer_at(r);
                return v * v * r;
            }, a, b, 200, 8) * 2.0 * pi;
        };
        accumulate(model.R2, R - tcut);
        accumulate(R + tcut, model.R1);
        ol2 = std::sqrt(ol2);

        ResidualStudyRow row;
        row.lambda = lambda;
        row.beta = ra.beta;
        row.inner_norm = inner;
        row.outer_sup = osup;
        row.outer_l2 = ol2;
        row.separation = ol2 / inner;
        st.rows.push_back(row);
    }

    std::vector<double> x, xl, y, ylit;
    for (const auto& r : st.rows) {
        x.push_back(std::log(r.beta));
        xl.push_back(std::log(std::log(r.beta)));
        y.push_back(std::log(r.inner_norm));
        ylit.push_back(std::log(r.inner_norm / std::pow(std::log(r.beta), 4)));
    }
    const auto lit = num::fit_line(x, ylit);
    st.fitted_exponent = lit.slope;
    const auto two = num::fit_plane(x, xl, y);
    st.fitted_exponent_2reg = two.a;
    st.fitted_logpower = two.b;
    // R^2 of the two-regressor fit
    double ssr = 0.0, sst = 0.0, ybar = 0.0;
    for (double v : y) ybar += v;
    ybar /= y.size();
    for (size_t i = 0; i < y.size(); ++i) {
        const double fit = two.a * x[i] + two.b * xl[i] + two.c;
        ssr += (y[i] - fit) * (y[i] - fit);
        sst += (y[i] - ybar) * (y[i] - ybar);
    }
    st.r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;
    st.predicted_exponent = 1.5 + sc.theta * K;
    return st;
}

// ---------------------------------------------------------------------------
// Theorem validation (exact family)
// ---------------------------------------------------------------------------

ValidationReport validate_theorem(const std::vector<double>& lambdas,
                                  const AnnulusModel& model) {
    ValidationReport rep;
    rep.mass_limit = 4.0 * pi / model.half_log_ratio();
    const HarmonicMeasure hm = harmonic_measure(model);
    const double R = model.R();

    FreeBoundary fb = FreeBoundary::circle(model, 64);
    for (double lambda : lambdas) {
        const ScalingParams sp = scaling_params(lambda, fb, model, 1.0);
        if (!matching::admissible(sp.alpha, model))
            throw ResonanceRejected("validate_theorem: alpha(lambda) inadmissible at lambda=" +
                                    std::to_string(lambda));
        const auto roots = exact_radial(lambda, model);
        const auto pts = classify_roots(roots);
        const ExactRadial* maximal = nullptr;
        for (size_t i = 0; i < pts.size(); ++i)
            if (pts[i].label == BranchLabel::maximal)
                for (const auto& r : roots)
                    if (std::fabs(r.c - pts[i].c) < 1e-12) maximal = &r;
        if (!maximal) throw NoSolution("validate_theorem: no maximal root");

        ValidationRow row;
        row.lambda = lambda;
        row.beta = sp.beta;
        row.normalized_mass = maximal->mass_closed_form() / (2.0 * std::log(1.0 / lambda));
        // compact subsets K^+- : middle 30..80% of each subannulus
        auto defect = [&](bool plus) {
            const double lo = plus ? R + 0.3 * (model.R1 - R) : model.R2 + 0.2 * (R - model.R2);
            const double hi = plus ? R + 0.8 * (model.R1 - R) : model.R2 + 0.7 * (R - model.R2);
            double d = 0.0;
            for (int i = 0; i <= 200; ++i) {
                const double r = lo + (hi - lo) * i / 200.0;
                const double H = plus ? hm.H_plus(r) : hm.H_minus(r);
                d = std::max(d, std::fabs(maximal->u(r) / (2.0 * std::log(1.0 / lambda)) - H));
            }
            return d;
        };
        row.profile_defect_plus = defect(true);
        row.profile_defect_minus = defect(false);
        row.peak_radius = maximal->peak_radius();
        row.peak_radius_error = std::fabs(row.peak_radius - R);
        rep.rows.push_back(row);
    }
    rep.mass_monotone = true;
    rep.defect_monotone = true;
    rep.peak_monotone = true;
    for (size_t i = 1; i < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i - 1];
        const auto& b = rep.rows[i];
        if (std::fabs(b.normalized_mass - rep.mass_limit) >
            std::fabs(a.normalized_mass - rep.mass_limit) + 1e-14)
            rep.mass_monotone = false;
        if (std::max(b.profile_defect_plus, b.profile_defect_minus) >
            std::max(a.profile_defect_plus, a.profile_defect_minus) + 1e-14)
            rep.defect_monotone = false;
        if (b.peak_radius_error > a.peak_radius_error + 1e-14) rep.peak_monotone = false;
    }
    if (!rep.rows.empty())
        rep.final_mass_rel_err =
            std::fabs(rep.rows.back().normalized_mass - rep.mass_limit) / rep.mass_limit;
    return rep;
}

} // namespace liouville
