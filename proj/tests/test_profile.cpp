#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_helpers.hpp"

#include "liouville/profile.hpp"

using namespace liouville;

TEST_CASE("bubble_1d closed form") {
    const auto b0 = bubble_1d(0.0);
    CHECK(b0.U == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(b0.Up == 0.0);

    // asymptotics: U + 2|t| - b0 vanishes up to the exponential tail
    const auto b20 = bubble_1d(20.0);
    CHECK(std::fabs(b20.U + 2.0 * 20.0 - kB0) < 1e-14 + 4.0 * std::exp(-40.0));

    // defining ODE at 1000 random t
    for (int i = 0; i < 1000; ++i) {
        const double t = testutil::uniform(-30.0, 30.0);
        const auto b = bubble_1d(t);
        CHECK(std::fabs(b.Upp + std::exp(b.U)) < 1e-12);
    }
}

TEST_CASE("bubble_2d standard bubble") {
    CHECK(bubble_2d(0.0) == doctest::Approx(std::log(8.0)).epsilon(1e-15));

    // 2d radial PDE residual with test-side closed-form derivatives
    for (int i = 0; i < 200; ++i) {
        const double r = testutil::uniform(0.01, 50.0);
        const double w = bubble_2d(r);
        const double wp = -4.0 * r / (1.0 + r * r);
        const double wpp = -4.0 * (1.0 - r * r) / ((1.0 + r * r) * (1.0 + r * r));
        CHECK(std::fabs(wpp + wp / r + std::exp(w)) < 1e-12);
    }

    // total mass 8 pi: quadrature + analytic tail bound
    const double L = 1000.0;
    const double mass = num::integrate(
        [](double r) { return std::exp(bubble_2d(r)) * 2.0 * num::pi * r; }, 0.0, L,
        2000, 16);
    const double tail = 8.0 * num::pi / (L * L);   // ∫_L^inf 16 pi / r^3 dr
    CHECK(std::fabs(mass + tail - 8.0 * num::pi) / (8.0 * num::pi) < 1e-6);
}

TEST_CASE("kernel basis and Wronskian") {
    for (int i = 0; i < 1000; ++i) {
        const double eta = testutil::uniform(-25.0, 25.0);
        CHECK(std::fabs(KernelBasis::wronskian(eta) - 4.0) < 1e-10);
        CHECK(std::fabs(KernelBasis::residual_phi1(eta)) < 1e-10);
        CHECK(std::fabs(KernelBasis::residual_phi2(eta)) < 1e-10);
    }
}

TEST_CASE("scaling parameters") {
    const AnnulusModel model(2.0, 0.5);
    const FreeBoundary fb = FreeBoundary::circle(model, 64);

    SUBCASE("beta at lambda = 1e-4") {
        const auto sp = scaling_params(1e-4, fb, model, 5.0);
        CHECK(sp.beta == doctest::Approx(2.0 * std::log(5000.0) + kB0).epsilon(1e-14));
        CHECK(sp.beta == doctest::Approx(19.1139).epsilon(1e-4));
    }

    SUBCASE("mu constant on the concentric annulus") {
        const double lambda = 1e-3;
        const auto sp = scaling_params(lambda, fb, model, 5.0);
        const double expect = sp.beta_plus() / (kA0 * lambda * std::log(2.0));
        for (double m : sp.mu) CHECK(m == doctest::Approx(expect).epsilon(1e-13));
    }

    SUBCASE("alpha identity") {
        const auto sp = scaling_params(3e-3, fb, model, 5.0);
        CHECK(sp.alpha * kA0 * model.R() * model.half_log_ratio() ==
              doctest::Approx(sp.beta_plus()).epsilon(1e-14));
    }

    SUBCASE("lambda out of range") {
        CHECK_THROWS_AS(scaling_params(0.2, fb, model, 5.0), OutOfAsymptoticRange);
        CHECK_THROWS_AS(scaling_params(-1.0, fb, model, 5.0), OutOfAsymptoticRange);
    }
}

TEST_CASE("modulation shapes: Lemma-aux-1 style integrals") {
    auto phi1 = [](double e) { return KernelBasis::phi1(e); };
    auto phi2 = [](double e) { return KernelBasis::phi2(e); };

    SUBCASE("Q infinite") {
        ModulationShape sh = modulation_shapes(kQInfinite);
        CHECK(testutil::integrate_line([&](double e) { return sh.Z1(e) * phi2(e); }) ==
              doctest::Approx(8.0).epsilon(1e-8));
        CHECK(std::fabs(testutil::integrate_line(
                  [&](double e) { return sh.Z2(e) * phi2(e); })) < 1e-10);
        CHECK(std::fabs(testutil::integrate_line(
                  [&](double e) { return sh.Z1(e) * phi1(e); })) < 1e-8);
        CHECK(testutil::integrate_line([&](double e) { return sh.Z2(e) * phi1(e); }) ==
              doctest::Approx(-8.0).epsilon(1e-8));
    }

    SUBCASE("finite Q") {
        for (double Q : {2.0, 6.0, 16.0}) {
            ModulationShape sh = modulation_shapes(Q);
            const double w2u = testutil::integrate_line(
                [&](double e) { return sh.W2(e) * phi2(e); });
            CHECK(std::fabs(w2u) < 1e-10);
            const double w1p1 = testutil::integrate_line(
                [&](double e) { return sh.W1(e) * phi1(e); });
            CHECK(std::fabs(w1p1) < 1e-8);
            const double w1u = testutil::integrate_line(
                [&](double e) { return sh.W1(e) * phi2(e); });
            const double w2p1 = testutil::integrate_line(
                [&](double e) { return sh.W2(e) * phi1(e); });
            CHECK(w1u == doctest::Approx(-w2p1).epsilon(1e-8));
        }
    }

    SUBCASE("derivative chain against finite differences") {
        ModulationShape sh = modulation_shapes(6.0);
        const double h = 1e-5;
        for (double e : {-3.7, -0.4, 0.9, 2.3}) {
            const auto y0 = sh.y(e);
            const auto yp = sh.y(e + h);
            const auto ym = sh.y(e - h);
            CHECK(std::fabs((yp.Y - ym.Y) / (2 * h) - y0.Yp) < 1e-8);
            CHECK(std::fabs((yp.Yp - ym.Yp) / (2 * h) - y0.Ypp) < 1e-8);
            CHECK(std::fabs((yp.Ypp - ym.Ypp) / (2 * h) - y0.Yppp) < 1e-8);
        }
    }
}

TEST_CASE("modulated inner approximation") {
    const AnnulusModel model(2.0, 0.5);
    const FreeBoundary fb = FreeBoundary::circle(model, 64);
    const double lambda = 1e-3;
    const auto sp = scaling_params(lambda, fb, model, 5.0);
    const double mu = sp.mu[0];

    SUBCASE("unmodulated values") {
        CHECK(inner_v0(0.3, 0.0, nullptr, sp, fb) ==
              doctest::Approx(std::log(2.0 * mu * mu)).epsilon(1e-13));
        // tail: v0 + a0 lambda mu |t| - b0 - 2 log mu decays exponentially
        for (double t : {0.05, 0.1, 0.2}) {
            const double v = inner_v0(1.0, t, nullptr, sp, fb);
            const double lin = -kA0 * lambda * mu * t + kB0 + 2.0 * std::log(mu);
            CHECK(std::fabs(v - lin) < 4.0 * std::exp(-kA0 * lambda * mu * t));
        }
    }

    SUBCASE("first-order response to the modulation") {
        ModulationField f;
        f.Q = 8.0;
        const double eps = 1e-6;
        f.a = [&](double) { return 0.7 * eps; };
        f.b = [&](double) { return -0.4 * eps; };
        const double t = 0.04;
        const double eta = lambda * mu * t;
        const double v1 = inner_v0(0.5, t, &f, sp, fb);
        const double v0 = inner_v0(0.5, t, nullptr, sp, fb);
        ModulationShape sh = modulation_shapes(8.0);
        const auto Y = sh.y(eta);
        const double fv = (0.7 * eta - 0.4) * Y.Y;
        const double fe = 0.7 * Y.Y + (0.7 * eta - 0.4) * Y.Yp;
        const double predicted = bubble_1d(eta).Up * fv * eps + 2.0 * fe * eps;
        CHECK(std::fabs((v1 - v0) - predicted) < 10.0 * eps * eps);
    }

    SUBCASE("modulation too large") {
        ModulationField f;
        f.Q = kQInfinite;
        f.a = [](double) { return -2.0; };
        f.b = [](double) { return 0.0; };
        CHECK_THROWS_AS(inner_v0(0.1, 0.05, &f, sp, fb), ModulationTooLarge);
    }
}

TEST_CASE("eta truncation rule") {
    CHECK(eta_truncation(1e-8) == doctest::Approx(25.0));
    CHECK(eta_truncation(1e-40) > 25.0);
}
