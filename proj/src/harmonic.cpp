#include "liouville/harmonic.hpp"

namespace liouville {

using num::pi;

HarmonicMeasure harmonic_measure(const AnnulusModel& model) {
    HarmonicMeasure h;
    h.R1 = model.R1;
    h.R2 = model.R2;
    const double hlr = model.half_log_ratio();   // log sqrt(R1/R2)
    h.b_minus = 1.0 / hlr;
    h.b_plus = -1.0 / hlr;
    h.a_minus = -std::log(model.R2) / hlr;
    h.a_plus = std::log(model.R1) / hlr;
    return h;
}

namespace {

// signed wavenumber helper matching num::dft_coeffs layout
int signed_k(size_t k, size_t n) {
    auto ik = static_cast<long>(k);
    auto in = static_cast<long>(n);
    return static_cast<int>((ik <= (in - 1) / 2) ? ik : ik - in);
}

} // namespace

double OuterApprox::htilde_plus(double r, double theta) const {
    double v = c0p + d0p * std::log(r);
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = std::pow(r / model.R1, n);
        const double u2 = std::pow(model.R() / r, n);
        v += 2.0 * std::real((modes[i].Ap * u1 + modes[i].Bp * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

double OuterApprox::htilde_minus(double r, double theta) const {
    double v = c0m + d0m * std::log(r);
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = std::pow(r / model.R(), n);
        const double u2 = std::pow(model.R2 / r, n);
        v += 2.0 * std::real((modes[i].Am * u1 + modes[i].Bm * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

double OuterApprox::dr_htilde_plus(double r, double theta) const {
    double v = d0p / r;
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = n * std::pow(r / model.R1, n) / r;
        const double u2 = -n * std::pow(model.R() / r, n) / r;
        v += 2.0 * std::real((modes[i].Ap * u1 + modes[i].Bp * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

double OuterApprox::dr_htilde_minus(double r, double theta) const {
    double v = d0m / r;
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = n * std::pow(r / model.R(), n) / r;
        const double u2 = -n * std::pow(model.R2 / r, n) / r;
        v += 2.0 * std::real((modes[i].Am * u1 + modes[i].Bm * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

double OuterApprox::drr_w0_plus(double r, double theta) const {
    double v = -beta_plus * hm.b_plus / (r * r) - d0p / (r * r);
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = n * (n - 1.0) * std::pow(r / model.R1, n) / (r * r);
        const double u2 = n * (n + 1.0) * std::pow(model.R() / r, n) / (r * r);
        v += 2.0 * std::real((modes[i].Ap * u1 + modes[i].Bp * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

double OuterApprox::drr_w0_minus(double r, double theta) const {
    double v = -beta_plus * hm.b_minus / (r * r) - d0m / (r * r);
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = n * (n - 1.0) * std::pow(r / model.R(), n) / (r * r);
        const double u2 = n * (n + 1.0) * std::pow(model.R2 / r, n) / (r * r);
        v += 2.0 * std::real((modes[i].Am * u1 + modes[i].Bm * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

double OuterApprox::dth_w0_plus(double r, double theta) const {
    double v = 0.0;
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = std::pow(r / model.R1, n);
        const double u2 = std::pow(model.R() / r, n);
        v += 2.0 * std::real(cplx(0.0, n) * (modes[i].Ap * u1 + modes[i].Bp * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

double OuterApprox::dth_w0_minus(double r, double theta) const {
    double v = 0.0;
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = std::pow(r / model.R(), n);
        const double u2 = std::pow(model.R2 / r, n);
        v += 2.0 * std::real(cplx(0.0, n) * (modes[i].Am * u1 + modes[i].Bm * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

double OuterApprox::dthth_w0_plus(double r, double theta) const {
    double v = 0.0;
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = std::pow(r / model.R1, n);
        const double u2 = std::pow(model.R() / r, n);
        v += 2.0 * std::real(-n * n * (modes[i].Ap * u1 + modes[i].Bp * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

double OuterApprox::dthth_w0_minus(double r, double theta) const {
    double v = 0.0;
    for (size_t i = 0; i < modes.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double u1 = std::pow(r / model.R(), n);
        const double u2 = std::pow(model.R2 / r, n);
        v += 2.0 * std::real(-n * n * (modes[i].Am * u1 + modes[i].Bm * u2) *
                             std::polar(1.0, n * theta));
    }
    return v;
}

OuterApprox outer_w0(const AnnulusModel& model, const ScalingParams& sp,
                     const FreeBoundary& fb, int nmodes) {
    OuterApprox oa;
    oa.model = model;
    oa.beta_plus = sp.beta_plus();
    oa.b0_const = kB0;
    oa.hm = harmonic_measure(model);

    const int n = fb.size();
    nmodes = std::min(nmodes, n / 2 - 1);
    const double R = model.R();
    const double bminus = oa.hm.b_minus;

    // Dirichlet data on gamma: 2 log(-d_n H^+_gamma) = 2 log(|d_n psi| b^-/R)
    std::vector<cplx> data(n);
    for (int j = 0; j < n; ++j) {
        const double arg = fb.dn_psi[j] * bminus / R;
        if (!(arg > 0.0))
            throw GeometryError("outer_w0: Hopf positivity of -d_n H^+ violated");
        data[j] = 2.0 * std::log(arg);
    }
    oa.data_cf = num::dft_coeffs(data);

    const double hlr = model.half_log_ratio();
    const double g0 = std::real(oa.data_cf[0]);
    // mode 0: c + d log r vanishing at R1 (plus) / R2 (minus), g0 at R
    oa.d0p = -g0 / hlr;
    oa.c0p = -oa.d0p * std::log(model.R1);
    oa.d0m = g0 / hlr;
    oa.c0m = -oa.d0m * std::log(model.R2);

    const double sq = std::sqrt(model.q());
    oa.modes.resize(nmodes);
    for (int m = 1; m <= nmodes; ++m) {
        const cplx gn = oa.data_cf[m];   // coefficient of e^{i m theta}
        const double qp = std::pow(sq, m);   // (R/R1)^m = (R2/R)^m = q^{m/2}
        // plus side: A (r/R1)^m + B (R/r)^m with A + B qp = 0 at R1 and
        // A qp + B = gn at R
        const double den = 1.0 - qp * qp;
        oa.modes[m - 1].Bp = gn / den;
        oa.modes[m - 1].Ap = -qp * gn / den;
        // minus side: A (r/R)^m + B (R2/r)^m with A qp + B = 0 at R2 and
        // A + B qp = gn at R
        oa.modes[m - 1].Am = gn / den;
        oa.modes[m - 1].Bm = -qp * gn / den;
    }
    return oa;
}

std::pair<double, double> matching_defects(const OuterApprox& oa,
                                           const ScalingParams& sp,
                                           const FreeBoundary& fb) {
    const double R = oa.model.R();
    double dd = 0.0, nd = 0.0;
    for (int j = 0; j < fb.size(); ++j) {
        const double th = fb.phi[j];
        const double mu = sp.mu[j];
        const double lm = sp.lambda * mu;
        const double target = oa.b0_const + 2.0 * std::log(mu);
        dd = std::max(dd, std::fabs(oa.w0_plus(R, th) - target));
        dd = std::max(dd, std::fabs(oa.w0_minus(R, th) - target));
        // d_n w0 = |d_n psi| d_r w0*, defect against -+ a0 lambda mu
        const double dnp = fb.dn_psi[j] * oa.dr_w0_plus(R, th);
        const double dnm = fb.dn_psi[j] * oa.dr_w0_minus(R, th);
        nd = std::max(nd, std::fabs(dnp + kA0 * lm));
        nd = std::max(nd, std::fabs(dnm - kA0 * lm));
    }
    return {dd, nd};
}

} // namespace liouville
