#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ibc/densities.hpp"
#include "ibc/fractional.hpp"
#include "ibc/kernels.hpp"
#include "riesz_corpus.hpp"

using namespace ibc;
using namespace ibc::fractional;
using kernels::cauchy_kernel;
using kernels::gauss_kernel;

TEST_CASE("Caputo derivative annihilates constants and obeys the power rule") {
    CHECK(caputo_deriv([](double) { return 0.0; }, FracOrder(0.5), 1.0) == 0.0);

    // f(s) = s: value t^(1-nu)/Gamma(2-nu)
    for (double t : {0.5, 1.0, 2.0}) {
        const double expect = std::pow(t, 0.5) / std::tgamma(1.5);
        CHECK(caputo_deriv([](double) { return 1.0; }, FracOrder(0.5), t) ==
              doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(caputo_deriv([](double) { return 1.0; }, FracOrder(0.5), 1.0) ==
          doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-10));

    // f(s) = s^2 at nu = 1/4: 2 t^(7/4) / Gamma(11/4)
    const double expect2 = 2.0 / std::tgamma(2.75);
    CHECK(caputo_deriv([](double s) { return 2.0 * s; }, FracOrder(0.25), 1.0) ==
          doctest::Approx(expect2).epsilon(1e-9));

    // brute-force oracle straight from the definition
    auto direct = integrate_singular_endpoint(
        [](double s) { return 2.0 * s * std::pow(1.0 - s, -0.25); }, 0.0, 1.0, 0.25, {},
        SingularEnd::Upper);
    CHECK(caputo_deriv([](double s) { return 2.0 * s; }, FracOrder(0.25), 1.0) ==
          doctest::Approx(direct.value / std::tgamma(0.75)).epsilon(1e-9));

    CHECK_THROWS_AS(FracOrder(0.0), InvalidParameter);
    CHECK_THROWS_AS(FracOrder(1.5), InvalidParameter);
    CHECK_THROWS_AS(caputo_deriv([](double) { return 1.0; }, FracOrder(1.0), 1.0),
                    InvalidParameter);
}

TEST_CASE("a declared lower singularity is handled") {
    // f'(s) = s^(-3/4): Caputo integral has a closed Beta-function value
    const double t = 1.0, nu = 0.5, g = 0.75;
    const double expect = std::tgamma(1.0 - g) * std::tgamma(1.0 - nu) /
                          std::tgamma(2.0 - g - nu) / std::tgamma(1.0 - nu);
    const double got =
        caputo_deriv([](double s) { return std::pow(s, -0.75); }, FracOrder(nu), t, {}, g);
    CHECK(got == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("principal-value route recovers the Cauchy-density value") {
    auto f = [](double x) { return cauchy_kernel(x, 1.0); };
    auto fp = [](double x) { return cauchy_kernel(x, 1.0, 1, 0); };
    CHECK(riesz_deriv_definition(f, fp, 0.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-7));
    // derivative-free fallback differs only in the outer differencing
    CHECK(riesz_deriv_definition(f, nullptr, 0.5) ==
          doctest::Approx(riesz_deriv_definition(f, fp, 0.5)).epsilon(1e-6));
    CHECK_THROWS_AS(
        riesz_deriv_definition([](double x) { return 1.0 / (1.0 + std::fabs(x)); }, nullptr, 0.0),
        SlowDecay);
}

TEST_CASE("definition and centered routes agree on a Gaussian") {
    auto f = [](double x) { return gauss_kernel(x, 1.0); };
    auto fp = [](double x) { return gauss_kernel(x, 1.0, 1); };
    for (double x : {0.0, 0.5, 1.5}) {
        const double a = riesz_deriv_definition(f, fp, x);
        const double b = riesz_deriv_centered(f, x, FracOrder(1.0));
        CHECK(std::fabs(a - b) < 1e-6);
    }
}

TEST_CASE("centered-route constant in both closed forms") {
    CHECK(riesz_centered_constant(1.0) == doctest::Approx(-1.0 / M_PI).epsilon(1e-14));
    CHECK(riesz_centered_constant(0.5) == doctest::Approx(-0.19947114).epsilon(1e-7));
    for (double nu = 0.1; nu < 0.95; nu += 0.1)
        CHECK(std::fabs(riesz_centered_constant(nu) - riesz_centered_constant_gamma_form(nu)) <
              1e-12);
}

TEST_CASE("centered route matches the |beta|^nu multiplier in transform space") {
    auto f = [](double x) { return gauss_kernel(x, 1.0); };
    QuadratureConfig cfg;
    for (double nu : {0.5, 1.0}) {
        for (double beta : {0.5, 1.0, 2.0}) {
            auto transform = integrate_real_line(
                [&](double x) {
                    return std::cos(beta * x) * riesz_deriv_centered(f, x, FracOrder(nu), cfg);
                },
                cfg);
            const double expect = std::pow(beta, nu) * std::exp(-0.5 * beta * beta);
            CHECK(std::fabs(transform.value - expect) < 1e-6);
        }
    }
}

TEST_CASE("spectral route: identity limit, linearity, and the Cauchy check") {
    const double h = 0.1;
    const long n = 6000;
    std::vector<double> pc(n), dpdt(n);
    for (long i = 0; i < n; ++i) {
        const double x = -300.0 + i * h;
        pc[i] = cauchy_kernel(x, 1.0);
        dpdt[i] = cauchy_kernel(x, 1.0, 0, 1);
    }
    QuadratureConfig cfg;
    cfg.edge_tol = 1e-4;

    auto same = riesz_fourier_1d(pc, h, 0.0, cfg);
    double dmax = 0.0;
    for (long i = 0; i < n; ++i) dmax = std::max(dmax, std::fabs(same[i] - pc[i]));
    CHECK(dmax < 1e-8);

    auto riesz = riesz_fourier_1d(pc, h, 1.0, cfg);
    double emax = 0.0;
    for (long i = n / 4; i < 3 * n / 4; ++i)
        emax = std::max(emax, std::fabs(riesz[i] + dpdt[i]));
    CHECK(emax < 1e-5);

    // linearity to near round-off
    std::vector<double> g1(n), g2(n), combo(n);
    for (long i = 0; i < n; ++i) {
        const double x = -300.0 + i * h;
        g1[i] = gauss_kernel(x, 1.0);
        g2[i] = gauss_kernel(x - 0.5, 2.0);
        combo[i] = 1.7 * g1[i] - 0.4 * g2[i];
    }
    auto r1 = riesz_fourier_1d(g1, h, 0.7, cfg);
    auto r2 = riesz_fourier_1d(g2, h, 0.7, cfg);
    auto rc = riesz_fourier_1d(combo, h, 0.7, cfg);
    double lmax = 0.0;
    for (long i = 0; i < n; ++i)
        lmax = std::max(lmax, std::fabs(rc[i] - (1.7 * r1[i] - 0.4 * r2[i])));
    CHECK(lmax < 1e-10);

    // un-decayed fields are rejected
    std::vector<double> flat(512, 1.0);
    CHECK_THROWS_AS(riesz_fourier_1d(flat, 0.1, 1.0), EdgeMassTooLarge);
}

TEST_CASE("three Riesz routes agree across the corpus") {
    for (const auto& entry : riesz_corpus::corpus()) {
        const auto rows = riesz_corpus::three_routes(entry);
        for (const auto& rv : rows) {
            CHECK(std::fabs(rv.definition - rv.centered) < 1e-5);
            CHECK(std::fabs(rv.definition - rv.spectral) < 1e-5);
            CHECK(std::fabs(rv.centered - rv.spectral) < 1e-5);
        }
    }
}

TEST_CASE("Caputo Laplace symbol for exponential inputs") {
    // L[D^nu f](eta) = eta^nu F(eta) - eta^(nu-1) f(0) for f(s) = exp(-a s)
    const double nu = 0.5;
    QuadratureConfig cfg;
    for (double a : {0.5, 1.0})
        for (double eta : {1.0, 2.0}) {
            auto fdt = [a](double s) { return -a * std::exp(-a * s); };
            auto outer = [&](double t) {
                return std::exp(-eta * t) * caputo_deriv(fdt, FracOrder(nu), t, cfg.tightened(0.1));
            };
            const double numeric =
                require_converged(integrate_semi_infinite(outer, cfg)).value;
            const double expect =
                std::pow(eta, nu) / (eta + a) - std::pow(eta, nu - 1.0);
            CHECK(std::fabs(numeric - expect) < 1e-6);
        }
}

TEST_CASE("separable fields factor under the mixed spectral operator") {
    const int n = 400;
    const double h = 0.1, lo = -20.0;
    std::vector<double> fx(n), gy(n);
    for (int i = 0; i < n; ++i) {
        const double u = lo + i * h;
        fx[i] = gauss_kernel(u, 1.0);
        gy[i] = gauss_kernel(u - 0.3, 0.7);
    }
    densities::DensityField field;
    field.grid.axes = {{lo, lo + (n - 1) * h, n}, {lo, lo + (n - 1) * h, n}};
    field.t = 1.0;
    field.values.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) field.values[static_cast<size_t>(i) * n + j] = fx[i] * gy[j];

    QuadratureConfig cfg;
    auto mixed = mixed_riesz_spectral(field, 0, 1, cfg);
    auto rfx = riesz_fourier_1d(fx, h, 1.0, cfg);
    auto rgy = riesz_fourier_1d(gy, h, 1.0, cfg);
    for (int i : {150, 200, 260})
        for (int j : {170, 210, 240})
            CHECK(std::fabs(mixed.values[static_cast<size_t>(i) * n + j] - rfx[i] * rgy[j]) <
                  1e-6);

    // operator order cannot matter
    auto swapped = mixed_riesz_spectral(field, 1, 0, cfg);
    double dmax = 0.0;
    for (size_t k = 0; k < mixed.values.size(); ++k)
        dmax = std::max(dmax, std::fabs(mixed.values[k] - swapped.values[k]));
    CHECK(dmax < 1e-12);
}

TEST_CASE("nested centered mixed derivative commutes") {
    auto f = [](double x, double y) { return gauss_kernel(x, 1.0) * gauss_kernel(y, 0.8); };
    QuadratureConfig tight;
    tight.abs_tol = 1e-12;
    tight.rel_tol = 1e-11;
    const double xy = mixed_riesz_centered_nested(f, 0.5, -0.7, true, tight);
    const double yx = mixed_riesz_centered_nested(f, 0.5, -0.7, false, tight);
    CHECK(std::fabs(xy - yx) < 1e-10);
    // separable reference: product of 1-d centered derivatives
    const double ref =
        riesz_deriv_centered([](double x) { return gauss_kernel(x, 1.0); }, 0.5, FracOrder(1.0),
                             tight) *
        riesz_deriv_centered([](double y) { return gauss_kernel(y, 0.8); }, -0.7, FracOrder(1.0),
                             tight);
    CHECK(std::fabs(xy - ref) < 1e-8);
}

TEST_CASE("spectral and analytic mixed routes agree on the planar composition") {
    CompositionSpec cb2;
    cb2.outer = {ProcessKind::cauchy(), ProcessKind::cauchy()};
    cb2.inner = InnerClock::of(ProcessKind::brownian());

    const double t = 1.0;
    const double analytic = mixed_riesz_cauchy_product(cb2, 0.8, 1.2, t);

    const double h = 0.1;
    const int n = 1280;  // reaches +-64 with the probe points on nodes
    Grid g;
    g.axes = {{-64.0, -64.0 + (n - 1) * h, n}, {-64.0, -64.0 + (n - 1) * h, n}};
    QuadratureConfig cfg;
    cfg.edge_tol = 1e-3;
    auto field = densities::density_grid_2d_shared(cb2, g, t, cfg);
    auto mixed = mixed_riesz_spectral(field, 0, 1, cfg);
    const long i = std::lround((0.8 + 64.0) / h);
    const long j = std::lround((1.2 + 64.0) / h);
    const double spectral = mixed.values[i * n + j];
    CHECK(std::fabs(spectral - analytic) < 1e-4);
}
