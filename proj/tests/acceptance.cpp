// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria run at desk scale with pinned tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "ibc/densities.hpp"
#include "ibc/fractional.hpp"
#include "ibc/montecarlo.hpp"
#include "ibc/verify.hpp"
#include "riesz_corpus.hpp"

using namespace ibc;

namespace {

int failures = 0;

void report(int criterion, const std::string& label, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, label.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

CompositionSpec make_spec(ProcessKind outer, InnerClock inner, int d = 1, double lambda = 1.0) {
    CompositionSpec s;
    for (int i = 0; i < d; ++i) s.outer.push_back(outer);
    s.inner = inner;
    s.time_scale = lambda;
    return s;
}

const std::vector<double> kTimes{0.5, 1.0, 2.0};

verify::SuiteResult run_equations() {
    return verify::run_all(kTimes, {}, 0, /*with_identities=*/false);
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();

    // 1. equation suite ------------------------------------------------------
    auto suite = run_equations();
    {
        double worst = 0.0;
        std::string worst_tag;
        bool pass = true;
        for (const auto& r : suite.residuals) {
            if (r.max_rel_residual > worst) {
                worst = r.max_rel_residual;
                std::ostringstream os;
                os << to_string(r.eq) << " t=" << r.t;
                worst_tag = os.str();
            }
            pass = pass && r.max_rel_residual <= 1e-5;
        }
        std::ostringstream os;
        os << suite.residuals.size() << " reports, worst " << worst << " at " << worst_tag
           << ", " << suite.wall_seconds << " s";
        report(1, "all governing equations at t in {0.5,1,2}, max relative residual <= 1e-5",
               pass && suite.wall_seconds < 1800.0, os.str());
    }

    // 2. identity suite ------------------------------------------------------
    {
        bool pass = true;
        std::ostringstream os;
        for (EquationId id : all_identities()) {
            const auto rep = verify::run_identity(id);
            pass = pass && rep.pass;
            os << to_string(id) << "=" << rep.max_abs_err << " ";
        }
        report(2, "identity suite within stated tolerances", pass, os.str());
    }

    // 3. negative controls ---------------------------------------------------
    {
        bool pass = true;
        std::ostringstream os;
        for (EquationId eq :
             {EquationId::E1, EquationId::E2, EquationId::E10, EquationId::E13,
              EquationId::E16}) {
            const auto params = verify::verification_matrix(eq).front();
            for (int c = 0; c < verify::coefficient_count(eq); ++c) {
                const auto rep =
                    verify::residual(eq, params, 1.0, {}, verify::PerturbSpec{c, 1.1});
                pass = pass && rep.max_rel_residual > 1e-2;
                os << to_string(eq) << "[" << c << "]=" << rep.max_rel_residual << " ";
            }
        }
        report(3, "10% coefficient perturbations push residuals above 1e-2", pass, os.str());
    }

    // 4. shared-membership cross-check --------------------------------------
    {
        bool pass = true;
        std::ostringstream os;
        for (const auto& r : suite.residuals) {
            const bool e10 = r.eq == EquationId::E10;
            const bool e11_half = r.eq == EquationId::E11 && r.params.count("H") &&
                                  r.params.at("H") == 0.5;
            if (e10 || e11_half) {
                pass = pass && r.max_rel_residual <= 1e-5;
                os << to_string(r.eq) << "(t=" << r.t << ")=" << r.max_rel_residual << " ";
            }
        }
        report(4, "the Brownian-over-Cauchy density satisfies both governing forms", pass,
               os.str());
    }

    // 5. Monte Carlo oracle --------------------------------------------------
    {
        const auto t_mc = std::chrono::steady_clock::now();
        struct Case {
            const char* name;
            CompositionSpec spec;
        };
        const std::vector<Case> cases = {
            {"B(|B|)", make_spec(ProcessKind::brownian(), InnerClock::of(ProcessKind::brownian()))},
            {"B(|C|)", make_spec(ProcessKind::brownian(), InnerClock::of(ProcessKind::cauchy()))},
            {"C(|B|)", make_spec(ProcessKind::cauchy(), InnerClock::of(ProcessKind::brownian()))},
            {"C(|C|)", make_spec(ProcessKind::cauchy(), InnerClock::of(ProcessKind::cauchy()))},
            {"B_H(|C|)", make_spec(ProcessKind::fractional_brownian(0.3),
                                   InnerClock::of(ProcessKind::cauchy()))},
            {"B^mu(|B|)", make_spec(ProcessKind::brownian(0.5),
                                    InnerClock::of(ProcessKind::brownian()))},
            {"I2", make_spec(ProcessKind::brownian(), InnerClock::iterated_brownian(1))},
        };
        bool pass = true;
        std::ostringstream os;
        std::uint64_t seed = 1000;
        for (const auto& c : cases) {
            auto batch = montecarlo::sample_marginal(c.spec, 1.0, 100000, seed++);
            montecarlo::CompositionCdf cdf(c.spec, 1.0);
            std::vector<double> v(batch.n);
            for (long i = 0; i < batch.n; ++i) v[i] = batch.at(i, 0);
            const auto ks = montecarlo::ks_test(std::move(v), [&](double x) { return cdf(x); });
            pass = pass && ks.pass;
            os << c.name << " D*sqrt(n)=" << ks.statistic * std::sqrt(100000.0) << " ";
        }
        const double mc_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_mc).count();
        os << "(" << mc_seconds << " s)";
        report(5, "seven sampleable compositions pass the KS gate at alpha = 0.01",
               pass && mc_seconds < 300.0, os.str());
    }

    // 6. normalization and symmetry ------------------------------------------
    {
        struct MassCase {
            const char* name;
            CompositionSpec spec;
            double x0;
        };
        const std::vector<MassCase> mass_cases = {
            {"B(|B|)", make_spec(ProcessKind::brownian(), InnerClock::of(ProcessKind::brownian())), 9.0},
            {"B^mu(|B|)", make_spec(ProcessKind::brownian(0.5), InnerClock::of(ProcessKind::brownian())), 12.0},
            {"B(|B^mu|)", make_spec(ProcessKind::brownian(), InnerClock::of(ProcessKind::brownian(0.5))), 12.0},
            {"B(|C|)", make_spec(ProcessKind::brownian(), InnerClock::of(ProcessKind::cauchy())), 10.0},
            {"B_0.3(|C|)", make_spec(ProcessKind::fractional_brownian(0.3), InnerClock::of(ProcessKind::cauchy())), 9.0},
            {"B_0.7(|C|)", make_spec(ProcessKind::fractional_brownian(0.7), InnerClock::of(ProcessKind::cauchy())), 12.0},
            {"C(|B|)", make_spec(ProcessKind::cauchy(), InnerClock::of(ProcessKind::brownian())), 12.0},
            {"C(|C|)", make_spec(ProcessKind::cauchy(), InnerClock::of(ProcessKind::cauchy())), 12.0},
            {"C^a(|C|)", make_spec(ProcessKind::cauchy(0.7), InnerClock::of(ProcessKind::cauchy())), 12.0},
            {"I2", make_spec(ProcessKind::brownian(), InnerClock::iterated_brownian(1)), 9.0},
            {"frac_n2", make_spec(ProcessKind::brownian(), InnerClock::frac_time_product(2)), 10.0},
            {"frac_n3", make_spec(ProcessKind::brownian(), InnerClock::frac_time_product(3)), 10.0},
        };
        bool pass = true;
        std::ostringstream os;
        double worst = 0.0;
        for (const auto& c : mass_cases)
            for (double t : kTimes) {
                const double m = densities::total_mass_1d(c.spec, t, c.x0);
                const double err = std::fabs(m - 1.0);
                if (err > worst) {
                    worst = err;
                    std::ostringstream w;
                    w << "worst " << c.name << " t=" << t << " |mass-1|=" << err;
                    os.str(w.str());
                }
                pass = pass && err <= 1e-4;
            }
        const std::vector<MassCase> mass2d = {
            {"BC2", make_spec(ProcessKind::brownian(), InnerClock::of(ProcessKind::cauchy()), 2), 10.0},
            {"CB2", make_spec(ProcessKind::cauchy(), InnerClock::of(ProcessKind::brownian()), 2), 10.0},
            {"CC2", make_spec(ProcessKind::cauchy(), InnerClock::of(ProcessKind::cauchy()), 2), 10.0},
            {"BB2_lambda", make_spec(ProcessKind::brownian(), InnerClock::of(ProcessKind::brownian()), 2, 1.2), 14.0},
        };
        for (const auto& c : mass2d)
            for (double t : kTimes) {
                const double m = densities::total_mass_2d(c.spec, t, c.x0);
                const double err = std::fabs(m - 1.0);
                if (err > worst) {
                    worst = err;
                    std::ostringstream w;
                    w << "worst " << c.name << " t=" << t << " |mass-1|=" << err;
                    os.str(w.str());
                }
                pass = pass && err <= 1e-4;
            }

        // evenness of the drift/location-free laws
        double sym_worst = 0.0;
        for (const auto& c : {mass_cases[0], mass_cases[3], mass_cases[4], mass_cases[6],
                              mass_cases[7], mass_cases[10]})
            for (double t : kTimes)
                for (double x : {0.3, 0.8, 1.7}) {
                    const double diff = std::fabs(densities::density_point(c.spec, {x}, t) -
                                                  densities::density_point(c.spec, {-x}, t));
                    sym_worst = std::max(sym_worst, diff);
                }
        pass = pass && sym_worst <= 1e-10;
        std::ostringstream full;
        full << os.str() << ", symmetry worst " << sym_worst;
        report(6, "all supported densities have unit mass (1e-4) and even symmetry (1e-10)",
               pass, full.str());
    }

    // 7. fractional-operator cross-validation --------------------------------
    {
        bool pass = true;
        double worst_pair = 0.0;
        for (const auto& entry : riesz_corpus::corpus())
            for (const auto& rv : riesz_corpus::three_routes(entry)) {
                worst_pair = std::max({worst_pair, std::fabs(rv.definition - rv.centered),
                                       std::fabs(rv.definition - rv.spectral),
                                       std::fabs(rv.centered - rv.spectral)});
            }
        pass = pass && worst_pair <= 1e-5;

        QuadratureConfig tight;
        tight.abs_tol = 1e-13;
        tight.rel_tol = 1e-12;
        double caputo_worst = 0.0;
        for (double t : kTimes) {
            const double got = fractional::caputo_deriv([](double) { return 1.0; },
                                                        fractional::FracOrder(0.5), t, tight);
            caputo_worst =
                std::max(caputo_worst, std::fabs(got - std::sqrt(t) / std::tgamma(1.5)));
            const double got2 = fractional::caputo_deriv([](double s) { return 2.0 * s; },
                                                         fractional::FracOrder(0.25), t, tight);
            caputo_worst = std::max(
                caputo_worst, std::fabs(got2 - 2.0 * std::pow(t, 1.75) / std::tgamma(2.75)));
        }
        pass = pass && caputo_worst <= 1e-8;

        double symbol_worst = 0.0;
        for (double a : {0.5, 1.0})
            for (double eta : {1.0, 2.0}) {
                auto fdt = [a](double s) { return -a * std::exp(-a * s); };
                auto outer = [&](double t) {
                    return std::exp(-eta * t) *
                           fractional::caputo_deriv(fdt, fractional::FracOrder(0.5), t,
                                                    QuadratureConfig{}.tightened(0.1));
                };
                const double numeric =
                    require_converged(integrate_semi_infinite(outer, QuadratureConfig{})).value;
                const double expect = std::sqrt(eta) / (eta + a) - 1.0 / std::sqrt(eta);
                symbol_worst = std::max(symbol_worst, std::fabs(numeric - expect));
            }
        pass = pass && symbol_worst <= 1e-6;

        std::ostringstream os;
        os << "route disagreement " << worst_pair << ", power rule " << caputo_worst
           << ", Laplace symbol " << symbol_worst;
        report(7, "Riesz routes agree to 1e-5; Caputo power rule 1e-8 and symbol 1e-6", pass,
               os.str());
    }

    // 8. peak-value constant ---------------------------------------------------
    {
        bool pass = true;
        QuadratureConfig tight;
        tight.abs_tol = 1e-12;
        tight.rel_tol = 1e-11;
        double worst = 0.0, worst_scaling = 0.0;
        for (int n : {1, 2}) {
            const double base = densities::iterated_density_pn(n, 0.0, 1.0, tight);
            for (double t : kTimes) {
                const double num = densities::iterated_density_pn(n, 0.0, t, tight);
                const double formula = densities::pn_zero_formula(n, t);
                worst = std::max(worst, std::fabs(num - formula));
                const double e = std::pow(2.0, -(n + 1.0));
                worst_scaling = std::max(worst_scaling,
                                         std::fabs(num / base - std::pow(t, -e)));
            }
        }
        pass = worst <= 1e-6 && worst_scaling <= 1e-8;
        std::ostringstream os;
        os << "|numeric-formula| " << worst << ", scaling " << worst_scaling;
        report(8, "iterated-density peak matches the gamma-product constant and its t-scaling",
               pass, os.str());
    }

    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 8 criteria failed; total wall time %.1f s\n", failures, total);
    return failures == 0 ? 0 : 1;
}
