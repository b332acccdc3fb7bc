#include "liouville/numerics.hpp"

#include <Eigen/Dense>

namespace liouville::num {

PlaneFit fit_plane(const std::vector<double>& x1, const std::vector<double>& x2,
                   const std::vector<double>& y) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (n < 3 || x1.size() != y.size() || x2.size() != y.size())
        throw NumericsFailure("fit_plane: need >= 3 points");
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = x1[i];
        A(i, 1) = x2[i];
        A(i, 2) = 1.0;
        b(i) = y[i];
    }
    Eigen::Vector3d sol = A.colPivHouseholderQr().solve(b);
    return {sol(0), sol(1), sol(2)};
}

std::vector<cplx> dft_coeffs(const std::vector<cplx>& in) {
    const size_t n = in.size();
    std::vector<cplx> out(n);
    const double w = -2.0 * pi / static_cast<double>(n);
    for (size_t k = 0; k < n; ++k) {
        cplx s = 0.0;
        for (size_t j = 0; j < n; ++j)
            s += in[j] * std::polar(1.0, w * static_cast<double>(j * k % n));
        out[k] = s / static_cast<double>(n);
    }
    return out;
}

namespace {
// signed wavenumber of bin k for size n (n even: k = n/2 maps to -n/2)
int signed_k(size_t k, size_t n) {
    auto ik = static_cast<long>(k);
    auto in = static_cast<long>(n);
    return static_cast<int>((ik <= (in - 1) / 2) ? ik : ik - in);
}
} // namespace

cplx fourier_eval(const std::vector<cplx>& c, double t) {
    cplx s = 0.0;
    for (size_t k = 0; k < c.size(); ++k)
        s += c[k] * std::polar(1.0, signed_k(k, c.size()) * t);
    return s;
}

cplx fourier_eval_deriv(const std::vector<cplx>& c, double t, int order) {
    cplx s = 0.0;
    for (size_t k = 0; k < c.size(); ++k) {
        const int m = signed_k(k, c.size());
        cplx f = std::pow(cplx(0.0, m), order);
        s += c[k] * f * std::polar(1.0, m * t);
    }
    return s;
}

Chebyshev::Chebyshev(int n_) : n(n_), x(n_ + 1), D(static_cast<size_t>(n_ + 1) * (n_ + 1)) {
    const int m = n + 1;
    for (int j = 0; j <= n; ++j) x[j] = std::cos(pi * j / n);
    auto cbar = [&](int i) { return (i == 0 || i == n) ? 2.0 : 1.0; };
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (i != j) {
                const double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
                D[static_cast<size_t>(i) * m + j] = cbar(i) / cbar(j) * sgn / (x[i] - x[j]);
            }
        }
    }
    // diagonal via negative row sums (exactness on constants)
    for (int i = 0; i <= n; ++i) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j)
            if (i != j) s += D[static_cast<size_t>(i) * m + j];
        D[static_cast<size_t>(i) * m + i] = -s;
    }
}

} // namespace liouville::num
