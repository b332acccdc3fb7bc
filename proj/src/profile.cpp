#include "liouville/profile.hpp"

#include <algorithm>

namespace liouville {

double ScalingParams::mu_max() const {
    return *std::max_element(mu.begin(), mu.end());
}

double ScalingParams::delta_max() const {
    return *std::max_element(delta.begin(), delta.end());
}

ScalingParams scaling_params(double lambda, const FreeBoundary& fb,
                             const AnnulusModel& model, double M) {
    if (!(lambda > 0.0) || lambda > 0.1)
        throw OutOfAsymptoticRange("scaling_params: lambda must lie in (0, 0.1]");
    if (!(M > 0.0)) throw OutOfAsymptoticRange("scaling_params: M must be positive");

    ScalingParams sp;
    sp.lambda = lambda;
    sp.M = M;
    sp.model = model;
    sp.beta = 2.0 * std::log(1.0 / (kA0 * lambda)) + kB0;
    if (sp.beta <= 1.0)
        throw OutOfAsymptoticRange("scaling_params: beta <= 1");

    const double R = model.R();
    const double bminus = 1.0 / model.half_log_ratio();   // b^- of (a+ b log r)
    sp.alpha = sp.beta_plus() / (kA0 * R * model.half_log_ratio());

    const int n = fb.size();
    sp.mu.resize(n);
    sp.delta.resize(n);
    const double logbeta = std::log(sp.beta);
    for (int j = 0; j < n; ++j) {
        // mu = |d_n psi| (beta + 2 log beta) b^- / (a0 lambda R)
        sp.mu[j] = fb.dn_psi[j] * sp.beta_plus() * bminus / (kA0 * lambda * R);
        if (!(sp.mu[j] > 0.0))
            throw GeometryError("scaling_params: mu_lambda must be positive");
        sp.delta[j] = M * logbeta / (lambda * sp.mu[j]);
        // internal identity lambda mu = alpha |d_n psi| (fa 1)
        const double lhs = lambda * sp.mu[j];
        const double rhs = sp.alpha * fb.dn_psi[j];
        if (std::fabs(lhs - rhs) > 1e-12 * std::fabs(rhs))
            throw NumericsFailure("scaling_params: lambda*mu != alpha*|d_n psi|");
    }
    return sp;
}

// ---------------------------------------------------------------------------
// Shape functions
// ---------------------------------------------------------------------------

ModulationShape::YVal ModulationShape::y(double eta) const {
    const double th = std::tanh(eta);
    const double sh2 = num::sech(eta) * num::sech(eta);
    // tanh derivatives
    const double t1 = sh2;                   // tanh'
    const double t2 = -2.0 * sh2 * th;       // tanh''
    const double t3 = sh2 * (4.0 * th * th - 2.0 * sh2);   // tanh'''
    YVal v;
    if (std::isinf(Q)) {
        v.Y = th; v.Yp = t1; v.Ypp = t2; v.Yppp = t3;
        return v;
    }
    // sech chain in x = eta/Q: with c = sech x, u = tanh x,
    //   c' = -c u,  c'' = c(2u^2 - 1),  c''' = c u (5 - 6u^2).
    const double x = eta / Q;
    const double S0 = num::sech(x);
    const double u = std::tanh(x);
    const double S1 = -S0 * u / Q;
    const double S2 = S0 * (2.0 * u * u - 1.0) / (Q * Q);
    const double S3 = S0 * u * (5.0 - 6.0 * u * u) / (Q * Q * Q);
    v.Y = th * S0;
    v.Yp = t1 * S0 + th * S1;
    v.Ypp = t2 * S0 + 2.0 * t1 * S1 + th * S2;
    v.Yppp = t3 * S0 + 3.0 * t2 * S1 + 3.0 * t1 * S2 + th * S3;
    return v;
}

double ModulationShape::Z1(double eta) const {
    const auto b = bubble_1d(eta);
    const auto Y = y(eta);
    return eta * b.Up * Y.Ypp + 2.0 * b.Up * Y.Yp + 2.0 * eta * Y.Yppp + 6.0 * Y.Ypp;
}

double ModulationShape::Z2(double eta) const {
    const auto b = bubble_1d(eta);
    const auto Y = y(eta);
    return b.Up * Y.Ypp + 2.0 * Y.Yppp;
}

double ModulationShape::W1(double eta) const {
    const auto b = bubble_1d(eta);
    const auto Y = y(eta);
    return eta * b.Up * Y.Y + 2.0 * Y.Y + 2.0 * eta * Y.Yp;
}

double ModulationShape::W2(double eta) const {
    const auto b = bubble_1d(eta);
    const auto Y = y(eta);
    return b.Up * Y.Y + 2.0 * Y.Yp;
}

ModulationShape modulation_shapes(double Q, const std::vector<double>& grid) {
    if (!(Q > 0.0)) throw Error("modulation_shapes: Q must be positive or infinite");
    ModulationShape sh;
    sh.Q = Q;
    sh.grid = grid;
    sh.z1.reserve(grid.size());
    for (double eta : grid) {
        sh.z1.push_back(sh.Z1(eta));
        sh.z2.push_back(sh.Z2(eta));
        sh.w1.push_back(sh.W1(eta));
        sh.w2.push_back(sh.W2(eta));
    }
    return sh;
}

// ---------------------------------------------------------------------------
// Modulated inner approximation
// ---------------------------------------------------------------------------

double inner_v0(double s_arc, double t, const ModulationField* f,
                const ScalingParams& sp, const FreeBoundary& fb) {
    const double phi = fb.phi_at_s(s_arc);
    const double dnp = fb.dn_psi_at_phi(phi);
    const double bminus = 1.0 / sp.model.half_log_ratio();
    const double mu = dnp * sp.beta_plus() * bminus / (kA0 * sp.lambda * sp.model.R());
    const double eta = sp.lambda * mu * t;

    if (f == nullptr) {
        return bubble_1d(eta).U + 2.0 * std::log(mu);
    }
    const double xi = sp.alpha * s_arc;
    const double a = f->a(xi), b = f->b(xi);
    ModulationShape sh;
    sh.Q = f->Q;
    const auto Y = sh.y(eta);
    const double fval = (a * eta + b) * Y.Y;
    const double feta = a * Y.Y + (a * eta + b) * Y.Yp;
    if (1.0 + feta <= 0.0)
        throw ModulationTooLarge("inner_v0: 1 + d_eta f <= 0");
    return bubble_1d(eta + fval).U + 2.0 * std::log(mu * (1.0 + feta));
}

} // namespace liouville
