#include "ibc/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>

#include <json.hpp>

#include "ibc/densities.hpp"
#include "ibc/fractional.hpp"
#include "ibc/kernels.hpp"
#include "ibc/parallel.hpp"

namespace ibc::verify {

using kernels::cauchy_kernel;
using kernels::fbm_kernel;
using kernels::first_passage_kernel;
using kernels::gauss_drift_kernel;
using kernels::gauss_kernel;
using kernels::gauss_kernel_dv;

namespace {

constexpr double kPi = M_PI;

double quad_value(const std::function<double(double)>& f, const QuadratureConfig& cfg,
                  const char* what) {
    return require_converged(integrate_semi_infinite(f, cfg), what).value;
}

// --- analytic-under-integral building blocks --------------------------------

// iterated Brownian density partials, d = 1
double bb1(double x, double t, int k, int m, const QuadratureConfig& cfg) {
    return quad_value(
        [&](double s) { return 2.0 * gauss_kernel(x, s, k) * gauss_kernel_dv(s, t, m); }, cfg,
        "iterated Brownian integral");
}

// drifted outer coordinate
double bbmu(double x, double t, double mu, int k, int m, const QuadratureConfig& cfg) {
    return quad_value(
        [&](double s) {
            return 2.0 * gauss_drift_kernel(x, s, mu, k, 0) * gauss_kernel_dv(s, t, m);
        },
        cfg, "drifted iterated Brownian integral");
}

// planar Brownian coordinates over a Brownian clock of variance vrate * t
double bb2(double x1, double x2, double t, double vrate, int k1, int k2, int m,
           const QuadratureConfig& cfg) {
    const double chain = std::pow(vrate, m);
    return quad_value(
        [&](double w) {
            return 2.0 * gauss_kernel(x1, w, k1) * gauss_kernel(x2, w, k2) * chain *
                   gauss_kernel_dv(w, vrate * t, m);
        },
        cfg, "planar Brownian integral");
}

// Brownian coordinate over a Cauchy clock
double bc1(double x, double t, int k, int m, const QuadratureConfig& cfg) {
    return quad_value(
        [&](double s) { return 2.0 * gauss_kernel(x, s, k) * cauchy_kernel(s, t, 0, m); }, cfg,
        "Brownian-over-Cauchy integral");
}

// fractional Brownian coordinate over a Cauchy clock
double bhc(double x, double t, double hurst, int k, int m, const QuadratureConfig& cfg) {
    return quad_value(
        [&](double s) {
            return 2.0 * fbm_kernel(x, s, hurst, k, 0) * cauchy_kernel(s, t, 0, m);
        },
        cfg, "fBm-over-Cauchy integral");
}

double bc2(double x1, double x2, double t, int k1, int k2, int m, const QuadratureConfig& cfg) {
    return quad_value(
        [&](double s) {
            return 2.0 * gauss_kernel(x1, s, k1) * gauss_kernel(x2, s, k2) *
                   cauchy_kernel(s, t, 0, m);
        },
        cfg, "planar Brownian-over-Cauchy integral");
}

// Cauchy coordinate over a Brownian clock
double cb1(double x, double t, int k, int m, const QuadratureConfig& cfg) {
    return quad_value(
        [&](double s) { return 2.0 * cauchy_kernel(x, s, k, 0) * gauss_kernel_dv(s, t, m); },
        cfg, "Cauchy-over-Brownian integral");
}

// planar Cauchy coordinates over a Brownian clock; s1/s2 are clock-slot
// derivative orders of the coordinate factors (mixed-Riesz route)
double cb2(double x1, double x2, double t, int k1, int k2, int s1, int s2, int m,
           const QuadratureConfig& cfg) {
    return quad_value(
        [&](double s) {
            return 2.0 * cauchy_kernel(x1, s, k1, s1) * cauchy_kernel(x2, s, k2, s2) *
                   gauss_kernel_dv(s, t, m);
        },
        cfg, "planar Cauchy-over-Brownian integral");
}

// shifted iterated Cauchy, d = 1
double cc1(double x, double t, double a, int k, int m, const QuadratureConfig& cfg) {
    return quad_value(
        [&](double s) {
            return 2.0 * cauchy_kernel(x - a, s, k, 0) * cauchy_kernel(s, t, 0, m);
        },
        cfg, "iterated Cauchy integral");
}

double cc2(double x1, double x2, double t, int k1, int k2, int s1, int s2, int m,
           const QuadratureConfig& cfg) {
    return quad_value(
        [&](double s) {
            return 2.0 * cauchy_kernel(x1, s, k1, s1) * cauchy_kernel(x2, s, k2, s2) *
                   cauchy_kernel(s, t, 0, m);
        },
        cfg, "planar iterated Cauchy integral");
}

// Cauchy coordinate over an n-iterated Brownian clock
double ci(double x, double t, int n, int k, int m, const QuadratureConfig& cfg) {
    auto inner = cfg.tightened(0.1);
    return quad_value(
        [&](double s) {
            const double outer = cauchy_kernel(x, s, k, 0);
            if (outer == 0.0) return 0.0;
            return 2.0 * outer * densities::iterated_density_pn(n, s, t, inner, 0, m);
        },
        cfg, "Cauchy-over-iterated integral");
}

double caputo_of(const std::function<double(double)>& f_dt, double nu, double t,
                 const QuadratureConfig& cfg, double lower_gamma = 0.0) {
    return fractional::caputo_deriv(f_dt, fractional::FracOrder(nu), t, cfg, lower_gamma);
}

// --- equation table ----------------------------------------------------------

struct PointEval {
    double lhs = 0.0;
    std::vector<double> rhs;  // one entry per coefficient set
};

struct EqDef {
    std::vector<double> coeffs;
    std::map<std::string, std::vector<double>> variants;
    std::function<PointEval(const std::vector<double>&, double,
                            const std::vector<std::vector<double>>&, const QuadratureConfig&)>
        eval;
};

double param_or(const Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

EqDef make_eq(EquationId eq, const Params& params) {
    EqDef def;
    switch (eq) {
        case EquationId::E1: {
            def.coeffs = {std::pow(2.0, -1.5)};
            def.eval = [](const std::vector<double>& x, double t,
                          const std::vector<std::vector<double>>& cs,
                          const QuadratureConfig& cfg) {
                auto inner = cfg.tightened(0.1);
                PointEval pe;
                pe.lhs = caputo_of([&](double s) { return bb1(x[0], s, 0, 1, inner); }, 0.5, t,
                                   cfg);
                const double pxx = bb1(x[0], t, 2, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * pxx);
                return pe;
            };
            break;
        }
        case EquationId::E2:
        case EquationId::E8: {
            def.coeffs = {0.125};
            if (eq == EquationId::E8) def.variants["unit_coefficient"] = {1.0};
            def.eval = [](const std::vector<double>& x, double t,
                          const std::vector<std::vector<double>>& cs,
                          const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = bb1(x[0], t, 0, 1, cfg);
                const double p4 = bb1(x[0], t, 4, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * p4);
                return pe;
            };
            break;
        }
        case EquationId::E3: {
            const int n = static_cast<int>(param_or(params, "n", 1));
            const double nu = std::pow(2.0, -n);
            def.coeffs = {std::pow(2.0, nu - 2.0)};
            def.eval = [n, nu](const std::vector<double>& x, double t,
                               const std::vector<std::vector<double>>& cs,
                               const QuadratureConfig& cfg) {
                auto inner = cfg.tightened(0.1);
                PointEval pe;
                pe.lhs = caputo_of(
                    [&](double s) {
                        return densities::iterated_density_pn(n, x[0], s, inner, 0, 1);
                    },
                    nu, t, cfg);
                const double pxx = densities::iterated_density_pn(n, x[0], t, cfg, 2, 0);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * pxx);
                return pe;
            };
            break;
        }
        case EquationId::E4: {
            const double lam = param_or(params, "lambda", 1.0);
            const double vrate = 8.0 * lam * lam * lam * lam;
            def.coeffs = {lam * lam};
            def.eval = [vrate](const std::vector<double>& x, double t,
                               const std::vector<std::vector<double>>& cs,
                               const QuadratureConfig& cfg) {
                auto inner = cfg.tightened(0.1);
                PointEval pe;
                pe.lhs = caputo_of(
                    [&](double s) { return bb2(x[0], x[1], s, vrate, 0, 0, 1, inner); }, 0.5, t,
                    cfg);
                const double lap = bb2(x[0], x[1], t, vrate, 2, 0, 0, cfg) +
                                   bb2(x[0], x[1], t, vrate, 0, 2, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * lap);
                return pe;
            };
            break;
        }
        case EquationId::E5: {
            def.coeffs = {0.125};
            def.eval = [](const std::vector<double>& x, double t,
                          const std::vector<std::vector<double>>& cs,
                          const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = bb2(x[0], x[1], t, 1.0, 0, 0, 1, cfg);
                const double bi = bb2(x[0], x[1], t, 1.0, 4, 0, 0, cfg) +
                                  2.0 * bb2(x[0], x[1], t, 1.0, 2, 2, 0, cfg) +
                                  bb2(x[0], x[1], t, 1.0, 0, 4, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * bi);
                return pe;
            };
            break;
        }
        case EquationId::E6: {
            const double mu = param_or(params, "mu", 0.5);
            def.coeffs = {0.125, -0.5 * mu, 0.5 * mu * mu};
            def.eval = [mu](const std::vector<double>& x, double t,
                            const std::vector<std::vector<double>>& cs,
                            const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = bbmu(x[0], t, mu, 0, 1, cfg);
                const double p4 = bbmu(x[0], t, mu, 4, 0, cfg);
                const double p3 = bbmu(x[0], t, mu, 3, 0, cfg);
                const double p2 = bbmu(x[0], t, mu, 2, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * p4 + c[1] * p3 + c[2] * p2);
                return pe;
            };
            break;
        }
        case EquationId::E7: {
            const double mu = param_or(params, "mu", 0.5);
            def.coeffs = {std::pow(2.0, -1.5), -mu / std::sqrt(2.0)};
            def.eval = [mu](const std::vector<double>& x, double t,
                            const std::vector<std::vector<double>>& cs,
                            const QuadratureConfig& cfg) {
                auto inner = cfg.tightened(0.1);
                PointEval pe;
                pe.lhs = caputo_of([&](double s) { return bbmu(x[0], s, mu, 0, 1, inner); },
                                   0.5, t, cfg);
                const double p2 = bbmu(x[0], t, mu, 2, 0, cfg);
                const double p1 = bbmu(x[0], t, mu, 1, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * p2 + c[1] * p1);
                return pe;
            };
            break;
        }
        case EquationId::E9: {
            const int n = static_cast<int>(param_or(params, "n", 2));
            const double nu = 1.0 / n;
            def.coeffs = {0.5};
            def.eval = [n, nu](const std::vector<double>& x, double t,
                               const std::vector<std::vector<double>>& cs,
                               const QuadratureConfig& cfg) {
                auto inner = cfg.tightened(0.1);
                PointEval pe;
                pe.lhs = caputo_of(
                    [&](double s) {
                        return densities::frac_diffusion_density(n, x[0], s, inner, 0, 1);
                    },
                    nu, t, cfg);
                const double pxx = densities::frac_diffusion_density(n, x[0], t, cfg, 2, 0);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * pxx);
                return pe;
            };
            break;
        }
        case EquationId::E10: {
            def.coeffs = {-0.25};
            def.eval = [](const std::vector<double>& x, double t,
                          const std::vector<std::vector<double>>& cs,
                          const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = bc1(x[0], t, 0, 2, cfg);
                const double p4 = bc1(x[0], t, 4, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * p4);
                return pe;
            };
            break;
        }
        case EquationId::E11: {
            const double h = param_or(params, "H", 0.5);
            def.coeffs = {-h * (h - 1.0), h * h};
            def.eval = [h](const std::vector<double>& x, double t,
                           const std::vector<std::vector<double>>& cs,
                           const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = t * t * bhc(x[0], t, h, 0, 2, cfg);
                const double p = bhc(x[0], t, h, 0, 0, cfg);
                const double px = bhc(x[0], t, h, 1, 0, cfg);
                const double pxx = bhc(x[0], t, h, 2, 0, cfg);
                for (const auto& c : cs)
                    pe.rhs.push_back(c[0] * (p + x[0] * px) +
                                     c[1] * (2.0 * p + 4.0 * x[0] * px + x[0] * x[0] * pxx));
                return pe;
            };
            break;
        }
        case EquationId::E12: {
            def.coeffs = {-0.25};
            def.eval = [](const std::vector<double>& x, double t,
                          const std::vector<std::vector<double>>& cs,
                          const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = bc2(x[0], x[1], t, 0, 0, 2, cfg);
                const double bi = bc2(x[0], x[1], t, 4, 0, 0, cfg) +
                                  2.0 * bc2(x[0], x[1], t, 2, 2, 0, cfg) +
                                  bc2(x[0], x[1], t, 0, 4, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * bi);
                return pe;
            };
            break;
        }
        case EquationId::E13: {
            def.coeffs = {-0.5, 1.0 / kPi};
            def.eval = [](const std::vector<double>& x, double t,
                          const std::vector<std::vector<double>>& cs,
                          const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = cb1(x[0], t, 0, 1, cfg);
                const double pxx = cb1(x[0], t, 2, 0, cfg);
                const double forcing = 1.0 / (x[0] * x[0] * std::sqrt(2.0 * kPi * t));
                for (const auto& c : cs) pe.rhs.push_back(c[0] * pxx + c[1] * forcing);
                return pe;
            };
            break;
        }
        case EquationId::E14: {
            const int n = static_cast<int>(param_or(params, "n", 1));
            const double nu = std::pow(2.0, -n);
            const double e = std::pow(2.0, -(n + 1.0));
            def.coeffs = {-std::pow(2.0, nu - 2.0),
                          std::pow(2.0, n - 1.0 + e) * std::pow(kPi, -1.5) *
                              std::tgamma(-0.5) / std::tgamma(-e)};
            def.eval = [n, nu, e](const std::vector<double>& x, double t,
                                  const std::vector<std::vector<double>>& cs,
                                  const QuadratureConfig& cfg) {
                auto inner = cfg.tightened(0.1);
                PointEval pe;
                pe.lhs = caputo_of([&](double s) { return ci(x[0], s, n, 0, 1, inner); }, nu, t,
                                   cfg, 1.0 - e);
                const double pxx = ci(x[0], t, n, 2, 0, cfg);
                const double forcing = std::pow(t, -e) / (x[0] * x[0]);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * pxx + c[1] * forcing);
                return pe;
            };
            break;
        }
        case EquationId::E15: {
            // proof-consistent coefficients; the printed display carries an
            // extra overall factor of two and is reported as a variant
            def.coeffs = {1.0, -0.5};
            def.variants["printed_coefficients"] = {2.0, -1.0};
            def.eval = [](const std::vector<double>& x, double t,
                          const std::vector<std::vector<double>>& cs,
                          const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = cb2(x[0], x[1], t, 0, 0, 0, 0, 1, cfg);
                const double mixed = cb2(x[0], x[1], t, 0, 0, 1, 1, 0, cfg);
                const double lap = cb2(x[0], x[1], t, 2, 0, 0, 0, 0, cfg) +
                                   cb2(x[0], x[1], t, 0, 2, 0, 0, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * mixed + c[1] * lap);
                return pe;
            };
            break;
        }
        case EquationId::E16: {
            const double a = param_or(params, "a", 0.0);
            // forcing follows the closed form; the printed 1/pi constant is a
            // reported variant
            def.coeffs = {1.0, -2.0 / (kPi * kPi)};
            def.variants["printed_forcing"] = {1.0, -1.0 / kPi};
            def.eval = [a](const std::vector<double>& x, double t,
                           const std::vector<std::vector<double>>& cs,
                           const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = cc1(x[0], t, a, 0, 2, cfg);
                const double pxx = cc1(x[0], t, a, 2, 0, cfg);
                const double forcing = 1.0 / (t * (x[0] - a) * (x[0] - a));
                for (const auto& c : cs) pe.rhs.push_back(c[0] * pxx + c[1] * forcing);
                return pe;
            };
            break;
        }
        case EquationId::E17: {
            def.coeffs = {1.0, -2.0};
            def.eval = [](const std::vector<double>& x, double t,
                          const std::vector<std::vector<double>>& cs,
                          const QuadratureConfig& cfg) {
                PointEval pe;
                pe.lhs = cc2(x[0], x[1], t, 0, 0, 0, 0, 2, cfg);
                const double lap = cc2(x[0], x[1], t, 2, 0, 0, 0, 0, cfg) +
                                   cc2(x[0], x[1], t, 0, 2, 0, 0, 0, cfg);
                const double mixed = cc2(x[0], x[1], t, 0, 0, 1, 1, 0, cfg);
                for (const auto& c : cs) pe.rhs.push_back(c[0] * lap + c[1] * mixed);
                return pe;
            };
            break;
        }
        default:
            throw InvalidParameter("not a residual-checked equation: " + to_string(eq));
    }
    return def;
}

}  // namespace

int coefficient_count(EquationId eq) {
    return static_cast<int>(make_eq(eq, verification_matrix(eq).front()).coeffs.size());
}

std::vector<Params> verification_matrix(EquationId eq) {
    switch (eq) {
        case EquationId::E3: return {{{"n", 1}}, {{"n", 2}}};
        case EquationId::E4: return {{{"lambda", 1.0}}, {{"lambda", 1.2}}};
        case EquationId::E6:
        case EquationId::E7: return {{{"mu", 0.5}}};
        case EquationId::E9: return {{{"n", 2}}, {{"n", 3}}};
        case EquationId::E11: return {{{"H", 0.3}}, {{"H", 0.5}}, {{"H", 0.7}}};
        case EquationId::E14: return {{{"n", 1}}};
        case EquationId::E16: return {{{"a", 0.0}}, {{"a", 0.7}}};
        default: return {Params{}};
    }
}

Grid default_grid(EquationId eq, const Params& params, double t) {
    auto grid2d = [&](std::vector<ExclusionBand> extra = {}) {
        Grid g;
        g.axes = {{-2.2, 2.2, 7}, {-2.2, 2.2, 7}};
        g.bands = {{0, 0.0, 0.3}, {1, 0.0, 0.3}};
        for (auto& b : extra) g.bands.push_back(b);
        return g;
    };
    switch (eq) {
        case EquationId::E3:
            if (param_or(params, "n", 1) >= 2) return make_grid_1d(-2.2, 2.2, 11, {{0, 0.0, 0.3}});
            return make_grid_1d(-2.5, 2.5, 21, {{0, 0.0, 0.25}});
        case EquationId::E9:
            if (param_or(params, "n", 2) >= 3) return make_grid_1d(-2.2, 2.2, 9, {{0, 0.0, 0.3}});
            return make_grid_1d(-2.5, 2.5, 15, {{0, 0.0, 0.25}});
        case EquationId::E14:
            return make_grid_1d(-2.2, 2.2, 9, {{0, 0.0, 0.4}});
        case EquationId::E16: {
            const double a = param_or(params, "a", 0.0);
            return make_grid_1d(a - 3.0, a + 3.0, 25,
                                {{0, a, 0.3}, {0, a - t, 0.06}, {0, a + t, 0.06}});
        }
        case EquationId::E4:
        case EquationId::E5:
        case EquationId::E12:
        case EquationId::E15:
            return grid2d();
        case EquationId::E17:
            return grid2d({{0, t, 0.06}, {0, -t, 0.06}, {1, t, 0.06}, {1, -t, 0.06}});
        default:
            return make_grid_1d(-2.5, 2.5, 21, {{0, 0.0, 0.25}});
    }
}

namespace {

ResidualReport run_residual(EquationId eq, const Params& params, double t, const Grid& grid,
                            const QuadratureConfig& cfg, const PerturbSpec& perturb,
                            int threads, bool drop_e13_forcing) {
    EqDef def = make_eq(eq, params);
    if (perturb.coeff_index >= 0) {
        if (perturb.coeff_index >= static_cast<int>(def.coeffs.size()))
            throw InvalidParameter("perturbation index out of range");
        def.coeffs[perturb.coeff_index] *= perturb.factor;
    }
    if (drop_e13_forcing) def.coeffs[1] = 0.0;

    std::vector<std::vector<double>> coeff_sets{def.coeffs};
    std::vector<std::string> variant_names;
    for (const auto& [name, c] : def.variants) {
        variant_names.push_back(name);
        coeff_sets.push_back(c);
    }

    const auto points = grid.included_points();
    if (points.empty()) throw RegionViolation("grid leaves no admissible points");

    struct Row {
        std::vector<double> rel;
    };
    std::vector<Row> rows(points.size());
    parallel_for(
        static_cast<long>(points.size()),
        [&](long i) {
            const auto pe = def.eval(points[i], t, coeff_sets, cfg);
            Row row;
            for (double rhs : pe.rhs) {
                const double denom =
                    std::max(cfg.eps_floor, std::fabs(pe.lhs) + std::fabs(rhs));
                row.rel.push_back(std::fabs(pe.lhs - rhs) / denom);
            }
            rows[i] = std::move(row);
        },
        threads);

    ResidualReport rep;
    rep.eq = eq;
    rep.description = equation_description(eq);
    rep.t = t;
    rep.params = params;
    rep.grid = grid;
    rep.cfg = cfg;
    rep.included_points = static_cast<long>(points.size());
    rep.excluded_fraction = grid.excluded_fraction();
    double sum = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        const double r = rows[i].rel[0];
        sum += r;
        if (r >= rep.max_rel_residual) {
            rep.max_rel_residual = r;
            rep.worst_point = points[i];
        }
    }
    rep.mean_rel_residual = sum / static_cast<double>(points.size());
    for (size_t v = 0; v < variant_names.size(); ++v) {
        double vmax = 0.0;
        for (const auto& row : rows) vmax = std::max(vmax, row.rel[v + 1]);
        rep.variants[variant_names[v] + "_max_rel_residual"] = vmax;
    }
    return rep;
}

}  // namespace

ResidualReport residual(EquationId eq, const Params& params, double t, const Grid& grid,
                        const QuadratureConfig& cfg, const PerturbSpec& perturb, int threads) {
    return run_residual(eq, params, t, grid, cfg, perturb, threads, false);
}

ResidualReport residual(EquationId eq, const Params& params, double t,
                        const QuadratureConfig& cfg, const PerturbSpec& perturb, int threads) {
    return run_residual(eq, params, t, default_grid(eq, params, t), cfg, perturb, threads,
                        false);
}

ResidualReport residual_e13_without_forcing(double t, const QuadratureConfig& cfg,
                                            int threads) {
    return run_residual(EquationId::E13, {}, t, default_grid(EquationId::E13, {}, t), cfg, {},
                        threads, true);
}

// --- identities --------------------------------------------------------------

std::pair<std::complex<double>, std::complex<double>> fourier_laplace_check(
    double mu, double beta, double eta, const QuadratureConfig& cfg) {
    if (!(eta > 0.0)) throw InvalidParameter("Laplace variable must be positive");
    const std::complex<double> a(0.5 * beta * beta, -beta * mu);
    auto inner_cfg = cfg.tightened(0.1);
    auto transform_at = [&](double t) {
        auto f = [&](double s) {
            return 2.0 * std::exp(-a * s) * gauss_kernel(s, t);
        };
        return require_converged(integrate_semi_infinite(f, inner_cfg), "inner transform").value;
    };
    auto outer = [&](double t) { return std::exp(-eta * t) * transform_at(t); };
    const std::complex<double> lhs =
        require_converged(integrate_semi_infinite(outer, cfg), "Laplace integral").value;
    const std::complex<double> denom =
        std::complex<double>(beta * beta / std::pow(2.0, 1.5), -beta * mu / std::sqrt(2.0)) +
        std::sqrt(eta);
    const std::complex<double> rhs = 1.0 / (std::sqrt(eta) * denom);
    return {lhs, rhs};
}

std::pair<double, double> pn_zero_constant_check(int n, double t, const QuadratureConfig& cfg) {
    if (n < 1 || n > 3) throw DepthUnsupported("peak constant check covers n in 1..3");
    return {densities::iterated_density_pn(n, 0.0, t, cfg),
            densities::pn_zero_formula(n, t)};
}

std::pair<double, double> subordination_identity_check(double s, double t,
                                                       const QuadratureConfig& cfg) {
    if (!(t > 0.0)) throw InvalidParameter("identity needs t > 0");
    const double lhs = t / (kPi * (t * t + s * s));
    auto f = [&](double w) { return gauss_kernel(s, w) * first_passage_kernel(t, w); };
    const double rhs = require_converged(integrate_semi_infinite(f, cfg), "subordination").value;
    return {lhs, rhs};
}

namespace {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_double(uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace

IdentityReport run_identity(EquationId id, const QuadratureConfig& cfg) {
    IdentityReport rep;
    rep.id = id;
    rep.description = equation_description(id);
    switch (id) {
        case EquationId::I1: {
            rep.tolerance = 1e-6;
            const double pts[][3] = {{0.0, 0.0, 1.0}, {0.0, 1.0, 1.0},  {0.5, 1.0, 1.0},
                                     {0.5, 2.0, 1.5}, {-0.3, 1.0, 2.0}, {0.0, 2.0, 0.5}};
            for (const auto& p : pts) {
                auto [lhs, rhs] = fourier_laplace_check(p[0], p[1], p[2], cfg);
                rep.max_abs_err = std::max(rep.max_abs_err, std::abs(lhs - rhs));
            }
            break;
        }
        case EquationId::I2: {
            rep.tolerance = 1e-8;
            for (double s : {0.5, 1.0, 2.0})
                for (double t : {0.5, 1.0, 2.0}) {
                    auto [lhs, rhs] = subordination_identity_check(s, t, cfg);
                    rep.max_abs_err = std::max(rep.max_abs_err, std::fabs(lhs - rhs));
                }
            break;
        }
        case EquationId::I3: {
            rep.tolerance = 1e-6;
            for (int n : {1, 2}) {
                double base = 0.0;
                for (double t : {1.0, 0.5, 2.0}) {
                    auto [num, formula] = pn_zero_constant_check(n, t, cfg);
                    rep.max_abs_err = std::max(rep.max_abs_err, std::fabs(num - formula));
                    if (t == 1.0) base = num;
                    const double scaling =
                        std::fabs(num / base - std::pow(t, -std::pow(2.0, -(n + 1.0))));
                    rep.details["scaling_err_n" + std::to_string(n)] = std::max(
                        rep.details["scaling_err_n" + std::to_string(n)], scaling);
                }
            }
            break;
        }
        case EquationId::I4: {
            rep.tolerance = 1e-12;
            uint64_t state = 0x5eedULL;
            for (int i = 0; i < 100; ++i) {
                const double x = 0.1 + 4.9 * unit_double(state);
                const double s = 0.1 + 4.9 * unit_double(state);
                const double sum = cauchy_kernel(x, s, 2, 0) + cauchy_kernel(x, s, 0, 2);
                rep.max_abs_err = std::max(rep.max_abs_err, std::fabs(sum));
            }
            break;
        }
        case EquationId::I5: {
            rep.tolerance = 1e-6;
            auto f = [](double x) { return cauchy_kernel(x, 1.0); };
            for (double x : {0.0, 0.5, 1.0, 2.0}) {
                const double riesz =
                    fractional::riesz_deriv_centered(f, x, fractional::FracOrder(1.0), cfg);
                const double dpdt = cauchy_kernel(x, 1.0, 0, 1);
                rep.max_abs_err = std::max(rep.max_abs_err, std::fabs(riesz + dpdt));
            }
            break;
        }
        case EquationId::I6: {
            rep.tolerance = 1e-10;
            QuadratureConfig tight = cfg;
            tight.abs_tol = std::min(cfg.abs_tol, 1e-12);
            tight.rel_tol = std::min(cfg.rel_tol, 1e-11);
            auto f = [](double x, double y) {
                return gauss_kernel(x, 1.0) * gauss_kernel(y, 0.8);
            };
            const double xy = fractional::mixed_riesz_centered_nested(f, 0.5, -0.7, true, tight);
            const double yx = fractional::mixed_riesz_centered_nested(f, 0.5, -0.7, false, tight);
            rep.max_abs_err = std::fabs(xy - yx);
            rep.details["value"] = xy;
            break;
        }
        case EquationId::I7: {
            rep.tolerance = 1e-6;
            const double t = 1.0;
            for (double x = 0.1; x <= 3.0 + 1e-9; x += 0.1) {
                if (std::fabs(x - t) < 0.05) continue;
                const double closed = densities::cc_closed_form(x, t, 0.0);
                const double integral = cc1(x, t, 0.0, 0, 0, cfg);
                rep.max_abs_err = std::max(rep.max_abs_err, std::fabs(closed - integral));
                if (x > t + 0.5) {
                    const double alt = densities::cc_closed_form_alt(x, t, 0.0);
                    rep.details["alt_form_rel_disagreement"] =
                        std::max(rep.details["alt_form_rel_disagreement"],
                                 std::fabs(alt - integral) / std::fabs(integral));
                }
            }
            break;
        }
        default:
            throw InvalidParameter("not an identity: " + to_string(id));
    }
    rep.pass = rep.max_abs_err <= rep.tolerance;
    return rep;
}

// --- orchestration ------------------------------------------------------------

SuiteResult run_all(const std::vector<double>& ts, const QuadratureConfig& cfg, int threads,
                    bool with_identities) {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult out;
    for (EquationId eq : all_equations()) {
        for (const auto& params : verification_matrix(eq)) {
            for (double t : ts)
                out.residuals.push_back(
                    residual(eq, params, t, default_grid(eq, params, t), cfg, {}, threads));
        }
    }
    if (with_identities)
        for (EquationId id : all_identities()) out.identities.push_back(run_identity(id, cfg));
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::string report_to_json(const ResidualReport& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["equation"] = to_string(r.eq);
    j["description"] = r.description;
    j["t"] = r.t;
    j["params"] = r.params;
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : r.grid.axes) axes.push_back({{"lo", a.lo}, {"hi", a.hi}, {"n", a.n_points}});
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& b : r.grid.bands)
        bands.push_back({{"axis", b.axis}, {"center", b.center}, {"half_width", b.half_width}});
    j["region"] = {{"axes", axes}, {"exclusion_bands", bands}};
    j["max_rel_residual"] = r.max_rel_residual;
    j["mean_rel_residual"] = r.mean_rel_residual;
    j["points"] = r.included_points;
    j["excluded_fraction"] = r.excluded_fraction;
    j["worst_point"] = r.worst_point;
    j["config"] = {{"abs_tol", r.cfg.abs_tol},
                   {"rel_tol", r.cfg.rel_tol},
                   {"eps_floor", r.cfg.eps_floor},
                   {"max_depth", r.cfg.max_depth}};
    if (!r.variants.empty()) j["variants"] = r.variants;
    return j.dump(2);
}

std::string report_to_json(const IdentityReport& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["identity"] = to_string(r.id);
    j["description"] = r.description;
    j["max_abs_err"] = r.max_abs_err;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    if (!r.details.empty()) j["details"] = r.details;
    return j.dump(2);
}

}  // namespace ibc::verify
