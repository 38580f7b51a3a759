#include "ibc/densities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ibc/kernels.hpp"
#include "ibc/parallel.hpp"

namespace ibc::densities {

using kernels::cauchy_kernel;
using kernels::fbm_kernel;
using kernels::gauss_drift_kernel;
using kernels::gauss_kernel;
using kernels::gauss_kernel_dv;
using kernels::half_normal_normalizer;

namespace {

constexpr double kPi = M_PI;

double normal_survival(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct Composition {
    CompositionSpec spec;
    int d = 1;
    bool single_clock = false;  // one positive clock integrates the product of coordinates
};

Composition analyze(const CompositionSpec& raw) {
    Composition c;
    c.spec = validate_spec(raw);
    c.d = static_cast<int>(c.spec.outer.size());
    c.single_clock = !(c.spec.inner.kind == InnerKind::None ||
                       (c.spec.inner.kind == InnerKind::FracTimeProduct && c.spec.inner.n >= 3));
    return c;
}

// k-th x-derivative of the coordinate transition density at displacement x,
// clock value s
double outer_pdf(const ProcessKind& p, double x, double s, int k) {
    switch (p.family) {
        case ProcessFamily::Brownian:
            return gauss_drift_kernel(x, s, p.drift, k, 0);
        case ProcessFamily::FractionalBrownian:
            return fbm_kernel(x, s, p.hurst, k, 0);
        case ProcessFamily::Cauchy:
            return cauchy_kernel(x - p.location, s, k, 0);
    }
    return 0.0;
}

double outer_interval_mass(const ProcessKind& p, double x0, double s) {
    switch (p.family) {
        case ProcessFamily::Brownian: {
            const double rs = std::sqrt(s);
            return 1.0 - normal_survival((x0 - p.drift * s) / rs) -
                   normal_survival((x0 + p.drift * s) / rs);
        }
        case ProcessFamily::FractionalBrownian:
            return 1.0 - 2.0 * normal_survival(x0 / std::pow(s, p.hurst));
        case ProcessFamily::Cauchy:
            return (std::atan((x0 - p.location) / s) + std::atan((x0 + p.location) / s)) / kPi;
    }
    return 0.0;
}

// pdf of the positive clock value at s after elapsed time t; dt in {0,1,2}
double clock_pdf(const CompositionSpec& spec, double s, double t, int dt,
                 const QuadratureConfig& cfg) {
    switch (spec.inner.kind) {
        case InnerKind::Process: {
            const ProcessKind& in = spec.inner.process;
            if (in.family == ProcessFamily::Brownian) {
                if (in.drift != 0.0) {
                    if (dt != 0)
                        throw OrderUnsupported("drifted clock supports value evaluation only");
                    return gauss_drift_kernel(s, t, in.drift) /
                           half_normal_normalizer(t, in.drift);
                }
                // lambda = 1 is the standard clock; otherwise the scaled family
                // with variance 8 lambda^4 t
                const double lam = spec.time_scale;
                const double rate = lam == 1.0 ? 1.0 : 8.0 * lam * lam * lam * lam;
                return 2.0 * std::pow(rate, dt) * gauss_kernel_dv(s, rate * t, dt);
            }
            return 2.0 * cauchy_kernel(s, t, 0, dt);  // standard Cauchy clock
        }
        case InnerKind::IteratedBrownian:
            return 2.0 * iterated_density_pn(spec.inner.n, s, t, cfg.tightened(0.1), 0, dt);
        case InnerKind::FracTimeProduct:
            // n = 2 reduces to the half-normal clock of variance 2t
            return 2.0 * std::pow(2.0, dt) * gauss_kernel_dv(s, 2.0 * t, dt);
        default:
            throw UnsupportedComposition("no clock for a plain marginal");
    }
}

double plain_marginal(const ProcessKind& p, double x, double t, int dx, int dt) {
    switch (p.family) {
        case ProcessFamily::Brownian: {
            const double v = p.diffusion * t;
            if (dt == 0) return gauss_kernel(x - p.drift * t, v, dx);
            // d/dt = diffusion * d/dv - drift * d/dx
            if (dt == 1)
                return p.diffusion * gauss_kernel_dv(x - p.drift * t, v, 1, dx) -
                       p.drift * gauss_kernel(x - p.drift * t, v, dx + 1);
            return p.diffusion * p.diffusion * gauss_kernel_dv(x - p.drift * t, v, 2, dx) -
                   2.0 * p.drift * p.diffusion * gauss_kernel_dv(x - p.drift * t, v, 1, dx + 1) +
                   p.drift * p.drift * gauss_kernel(x - p.drift * t, v, dx + 2);
        }
        case ProcessFamily::FractionalBrownian: {
            const double h = p.hurst;
            const double v = std::pow(t, 2.0 * h);
            const double vp = 2.0 * h * std::pow(t, 2.0 * h - 1.0);
            if (dt == 0) return gauss_kernel(x, v, dx);
            if (dt == 1) return vp * gauss_kernel_dv(x, v, 1, dx);
            const double vpp = 2.0 * h * (2.0 * h - 1.0) * std::pow(t, 2.0 * h - 2.0);
            return vp * vp * gauss_kernel_dv(x, v, 2, dx) + vpp * gauss_kernel_dv(x, v, 1, dx);
        }
        case ProcessFamily::Cauchy: {
            const double c = p.scale;
            return std::pow(c, dt) * cauchy_kernel(x - p.location, c * t, dx, dt);
        }
    }
    return 0.0;
}

double product_clock_density(int n, double w1, double w2, double t, int dt) {
    // joint clock law for the order-1/n diffusion, n = 3
    (void)n;
    const double b = std::sqrt(27.0 * t);
    const double s3 = w1 * w1 * w1 + w2 * w2 * w2;
    const double base = 3.0 / (2.0 * kPi * std::sqrt(t)) * std::exp(-s3 / b) * w2;
    if (dt == 0) return base;
    if (dt == 1) return base * (s3 / (2.0 * t * b) - 0.5 / t);
    throw OrderUnsupported("product clock supports first time-derivatives only");
}

double frac_diffusion_n3(double x, double t, int dx, int dt, const QuadratureConfig& cfg) {
    auto inner_cfg = cfg.tightened(0.1);
    auto outer = [&](double w1) {
        auto f = [&](double w2) {
            const double q = product_clock_density(3, w1, w2, t, dt);
            return q == 0.0 ? 0.0 : q * gauss_kernel(x, w1 * w2, dx);
        };
        return require_converged(integrate_semi_infinite(f, inner_cfg), "product clock inner integral").value;
    };
    return require_converged(integrate_semi_infinite(outer, cfg), "product clock outer integral").value;
}

double point_impl(const Composition& c, const std::vector<double>& x, double t,
                  const std::vector<int>& dx, int dt, const QuadratureConfig& cfg) {
    if (static_cast<int>(x.size()) != c.d || static_cast<int>(dx.size()) != c.d)
        throw InvalidParameter("point dimension does not match the composition");
    if (!(t > 0.0)) throw InvalidParameter("densities are defined for t > 0");
    for (int k : dx)
        if (k < 0 || k > 4) throw OrderUnsupported("space derivative order above 4");
    if (dt < 0 || dt > 2) throw OrderUnsupported("time derivative order above 2");

    const CompositionSpec& spec = c.spec;
    if (spec.inner.kind == InnerKind::None)
        return plain_marginal(spec.outer[0], x[0], t, dx[0], dt);
    if (spec.inner.kind == InnerKind::FracTimeProduct && spec.inner.n >= 3)
        return frac_diffusion_n3(x[0], t, dx[0], dt, cfg);

    auto f = [&](double s) {
        double prod = 1.0;
        for (int j = 0; j < c.d; ++j) {
            prod *= outer_pdf(spec.outer[j], x[j], s, dx[j]);
            if (prod == 0.0) return 0.0;
        }
        return prod * clock_pdf(spec, s, t, dt, cfg);
    };
    return require_converged(integrate_semi_infinite(f, cfg), "subordination integral").value;
}

}  // namespace

long DensityField::index(const std::vector<int>& idx) const {
    long lin = 0;
    for (size_t k = 0; k < grid.axes.size(); ++k)
        lin = lin * grid.axes[k].n_points + idx[k];
    return lin;
}

double DensityField::total_mass_trapezoid() const {
    if (grid.dim() != 1) throw UnsupportedDimension("trapezoid mass is for 1-d fields");
    const double h = grid.axes[0].spacing();
    double m = 0.0;
    for (size_t i = 0; i + 1 < values.size(); ++i) {
        const double a = values[i], b = values[i + 1];
        if (std::isnan(a) || std::isnan(b)) continue;
        m += 0.5 * (a + b) * h;
    }
    return m;
}

double density_point(const CompositionSpec& spec, const std::vector<double>& x, double t,
                     const QuadratureConfig& cfg) {
    const Composition c = analyze(spec);
    return point_impl(c, x, t, std::vector<int>(c.d, 0), 0, cfg);
}

double density_deriv(const CompositionSpec& spec, const std::vector<double>& x, double t,
                     const std::vector<int>& dx_orders, int dt_order,
                     const QuadratureConfig& cfg) {
    const Composition c = analyze(spec);
    return point_impl(c, x, t, dx_orders, dt_order, cfg);
}

DensityField density_grid(const CompositionSpec& spec, const Grid& grid, double t,
                          const QuadratureConfig& cfg, const std::vector<int>& deriv_orders,
                          int threads) {
    const Composition c = analyze(spec);
    if (grid.dim() != c.d) throw InvalidParameter("grid dimension does not match the composition");
    if (!deriv_orders.empty() && c.d != 1)
        throw OrderUnsupported("derivative arrays are provided for 1-d grids");

    DensityField field;
    field.grid = grid;
    field.t = t;
    const long total = grid.total_points();
    field.values.assign(total, std::numeric_limits<double>::quiet_NaN());
    for (int k : deriv_orders)
        field.x_derivatives[k].assign(total, std::numeric_limits<double>::quiet_NaN());

    std::vector<std::vector<double>> coords(total);
    {
        std::vector<int> idx(grid.axes.size(), 0);
        for (long lin = 0; lin < total; ++lin) {
            std::vector<double> x(grid.axes.size());
            long rem = lin;
            for (int k = grid.dim() - 1; k >= 0; --k) {
                const int i = static_cast<int>(rem % grid.axes[k].n_points);
                rem /= grid.axes[k].n_points;
                x[k] = grid.axes[k].lo + i * grid.axes[k].spacing();
            }
            coords[lin] = std::move(x);
        }
        (void)idx;
    }

    parallel_for(
        total,
        [&](long lin) {
            const auto& x = coords[lin];
            if (grid.excluded(x)) return;
            // divergent points (cusps, log poles) stay NaN instead of aborting
            // the whole field
            try {
                field.values[lin] = point_impl(c, x, t, std::vector<int>(c.d, 0), 0, cfg);
            } catch (const NonFinite&) {
            } catch (const QuadratureFailure&) {
            }
            for (auto& [k, arr] : field.x_derivatives) {
                try {
                    arr[lin] = point_impl(c, x, t, {k}, 0, cfg);
                } catch (const NonFinite&) {
                } catch (const QuadratureFailure&) {
                }
            }
        },
        threads);
    return field;
}

DensityField density_grid_2d_shared(const CompositionSpec& spec, const Grid& grid, double t,
                                    const QuadratureConfig& cfg, int threads) {
    const Composition c = analyze(spec);
    if (c.d != 2 || grid.dim() != 2)
        throw UnsupportedDimension("shared-node fields are two-dimensional");
    if (!c.single_clock)
        throw UnsupportedComposition("shared-node fields need a single clock");

    const auto& ax = grid.axes[0];
    const auto& ay = grid.axes[1];
    const double span = std::max(std::fabs(ax.hi), std::fabs(ay.hi));

    // one shared node set built from adaptive partitions at probe points
    std::vector<double> cuts_near, cuts_far;
    const double probes[][2] = {{0.1, 0.1}, {0.5, 1.0}, {2.0, 3.0},
                                {0.1, 0.5 * span}, {0.5 * span, 0.5 * span}};
    for (const auto& p : probes) {
        auto f = [&](double s) {
            return outer_pdf(spec.outer[0], p[0], s, 0) * outer_pdf(spec.outer[1], p[1], s, 0) *
                   clock_pdf(spec, s, t, 0, cfg);
        };
        auto pn = adaptive_partition([&](double s) { return f(s); }, 0.0, 1.0, cfg);
        auto pf = adaptive_partition([&](double v) { return f(1.0 / v) / (v * v); }, 0.0, 1.0,
                                     cfg);
        cuts_near.insert(cuts_near.end(), pn.begin(), pn.end());
        cuts_far.insert(cuts_far.end(), pf.begin(), pf.end());
    }
    for (auto* cuts : {&cuts_near, &cuts_far}) {
        std::sort(cuts->begin(), cuts->end());
        cuts->erase(std::unique(cuts->begin(), cuts->end()), cuts->end());
    }
    SharedNodes nodes = shared_nodes_two_piece(cuts_near, cuts_far);
    const size_t K = nodes.s.size();

    std::vector<double> wc(K);
    for (size_t k = 0; k < K; ++k)
        wc[k] = nodes.w[k] * clock_pdf(spec, nodes.s[k], t, 0, cfg);

    auto table = [&](const AxisSpec& a, const ProcessKind& p) {
        std::vector<double> tab(static_cast<size_t>(a.n_points) * K);
        parallel_for(
            a.n_points,
            [&](long i) {
                const double x = a.lo + i * a.spacing();
                for (size_t k = 0; k < K; ++k)
                    tab[static_cast<size_t>(i) * K + k] = outer_pdf(p, x, nodes.s[k], 0);
            },
            threads);
        return tab;
    };
    const std::vector<double> tx = table(ax, spec.outer[0]);
    const std::vector<double> ty = table(ay, spec.outer[1]);

    DensityField field;
    field.grid = grid;
    field.t = t;
    field.values.assign(static_cast<size_t>(ax.n_points) * ay.n_points, 0.0);
    parallel_for(
        ax.n_points,
        [&](long i) {
            double* row = field.values.data() + static_cast<size_t>(i) * ay.n_points;
            const double* txi = tx.data() + static_cast<size_t>(i) * K;
            for (size_t k = 0; k < K; ++k) {
                const double f = wc[k] * txi[k];
                if (f == 0.0) continue;
                const double* tyk = ty.data();
                for (int j = 0; j < ay.n_points; ++j) row[j] += f * tyk[static_cast<size_t>(j) * K + k];
            }
        },
        threads);
    return field;
}

double cc_closed_form(double x, double t, double a) {
    if (!(t > 0.0)) throw InvalidParameter("closed form needs t > 0");
    const double r = std::fabs(x - a);
    if (r < 1e-14) throw SingularPoint("iterated Cauchy density diverges at x = a");
    const double u = (r - t) / t;
    if (std::fabs(u) < 1e-3)
        return (1.0 - u + (5.0 / 6.0) * u * u) / (kPi * kPi * t);
    return (2.0 / (kPi * kPi)) * t * std::log(t / r) / ((t - r) * (t + r));
}

double cc_closed_form_alt(double x, double t, double a) {
    if (!(t > 0.0)) throw InvalidParameter("closed form needs t > 0");
    const double r = std::fabs(x - a);
    if (r < 1e-14) throw SingularPoint("iterated Cauchy density diverges at x = a");
    return (2.0 * t / (kPi * kPi * (t * t + r * r))) * std::log(t / r);
}

double iterated_density_pn(int n, double x, double t, const QuadratureConfig& cfg, int dx_order,
                           int dt_order) {
    if (n < 0) throw InvalidParameter("iteration count must be non-negative");
    if (n > cfg.nested_budget)
        throw DepthUnsupported("iterated density depth exceeds the nested budget");
    if (!(t > 0.0)) throw InvalidParameter("iterated density needs t > 0");
    if (n == 0) return gauss_kernel_dv(x, t, dt_order, dx_order);
    auto inner_cfg = cfg.tightened(0.1);
    auto f = [&](double w) {
        const double outer = gauss_kernel(x, w, dx_order);
        if (outer == 0.0) return 0.0;
        return 2.0 * outer * iterated_density_pn(n - 1, w, t, inner_cfg, 0, dt_order);
    };
    return require_converged(integrate_semi_infinite(f, cfg), "iterated density integral").value;
}

double pn_zero_formula(int n, double t) {
    if (n < 1 || n > 4) throw DepthUnsupported("peak constant is provided for n in 1..4");
    const double e = std::pow(2.0, -(n + 1.0));  // 1/2^(n+1)
    return std::pow(2.0, n - e) / std::sqrt(kPi) * std::pow(t, -e) * std::tgamma(-0.5) /
           std::tgamma(-e);
}

double frac_diffusion_density(int n, double x, double t, const QuadratureConfig& cfg,
                              int dx_order, int dt_order) {
    if (n != 2 && n != 3)
        throw DepthUnsupported("product-clock density is evaluated for n in {2,3}");
    if (!(t > 0.0)) throw InvalidParameter("density needs t > 0");
    if (n == 3) return frac_diffusion_n3(x, t, dx_order, dt_order, cfg);
    auto f = [&](double w) {
        const double outer = gauss_kernel(x, w, dx_order);
        if (outer == 0.0) return 0.0;
        return outer * 2.0 * std::pow(2.0, dt_order) * gauss_kernel_dv(w, 2.0 * t, dt_order);
    };
    return require_converged(integrate_semi_infinite(f, cfg), "product clock integral").value;
}

double drifted_time_density(double x, double t, double mu, const QuadratureConfig& cfg) {
    if (!(t > 0.0)) throw InvalidParameter("density needs t > 0");
    const double norm = half_normal_normalizer(t, mu);
    auto f = [&](double s) { return gauss_kernel(x, s) * gauss_drift_kernel(s, t, mu); };
    return require_converged(integrate_semi_infinite(f, cfg), "drifted clock integral").value / norm;
}

double drifted_time_fourier(double beta, double t, double mu, const QuadratureConfig& cfg) {
    const double norm = half_normal_normalizer(t, mu);
    auto f = [&](double s) {
        return std::exp(-0.5 * beta * beta * s) * gauss_drift_kernel(s, t, mu);
    };
    return require_converged(integrate_semi_infinite(f, cfg), "transform integral").value / norm;
}

double drifted_time_fourier_reference(double beta, double t, double mu,
                                      const QuadratureConfig& cfg) {
    const double norm = half_normal_normalizer(t, mu);
    const double rt = std::sqrt(t);
    auto f = [&](double u) {
        return std::exp(-0.5 * beta * beta * rt * u) * gauss_kernel(u - mu * rt, 1.0);
    };
    return require_converged(integrate_semi_infinite(f, cfg), "reference transform integral").value /
           norm;
}

double clock_density(const CompositionSpec& spec, double s, double t, int dt,
                     const QuadratureConfig& cfg) {
    const Composition c = analyze(spec);
    if (!c.single_clock)
        throw UnsupportedComposition("composition has no single positive clock");
    return clock_pdf(c.spec, s, t, dt, cfg);
}

double tail_mass_outside(const CompositionSpec& spec, double x0, double t,
                         const QuadratureConfig& cfg) {
    const Composition c = analyze(spec);
    if (c.d != 1) throw UnsupportedDimension("tail mass helper is one-dimensional");
    const ProcessKind& p = c.spec.outer[0];
    if (c.spec.inner.kind == InnerKind::None) {
        if (p.family == ProcessFamily::Cauchy)
            return 1.0 - outer_interval_mass(ProcessKind::cauchy(p.location, 1.0), x0, p.scale * t);
        if (p.family == ProcessFamily::FractionalBrownian)
            return 1.0 - outer_interval_mass(p, x0, t);
        const double v = p.diffusion * t;
        return normal_survival((x0 - p.drift * t) / std::sqrt(v)) +
               normal_survival((x0 + p.drift * t) / std::sqrt(v));
    }
    if (c.spec.inner.kind == InnerKind::FracTimeProduct && c.spec.inner.n >= 3) {
        auto inner_cfg = cfg.tightened(0.1);
        auto outer = [&](double w1) {
            auto f = [&](double w2) {
                const double q = product_clock_density(3, w1, w2, t, 0);
                return q == 0.0 ? 0.0 : q * (1.0 - outer_interval_mass(p, x0, w1 * w2));
            };
            return require_converged(integrate_semi_infinite(f, inner_cfg), "tail inner").value;
        };
        return require_converged(integrate_semi_infinite(outer, cfg), "tail outer").value;
    }
    auto f = [&](double s) {
        return clock_pdf(c.spec, s, t, 0, cfg) * (1.0 - outer_interval_mass(p, x0, s));
    };
    return require_converged(integrate_semi_infinite(f, cfg), "tail integral").value;
}

double total_mass_1d(const CompositionSpec& spec, double t, double x0,
                     const QuadratureConfig& cfg) {
    const Composition c = analyze(spec);
    if (c.d != 1) throw UnsupportedDimension("use total_mass_2d for planar compositions");
    const double center = c.spec.outer[0].family == ProcessFamily::Cauchy
                              ? c.spec.outer[0].location
                              : 0.0;
    auto density_cfg = cfg.tightened(0.1);
    auto f = [&](double x) { return point_impl(c, {x}, t, {0}, 0, density_cfg); };
    const double left = require_converged(integrate_finite(f, -x0, center, cfg), "mass integral").value;
    const double right = require_converged(integrate_finite(f, center, x0, cfg), "mass integral").value;
    return left + right + tail_mass_outside(spec, x0, t, cfg);
}

double total_mass_2d(const CompositionSpec& spec, double t, double x0,
                     const QuadratureConfig& cfg) {
    const Composition c = analyze(spec);
    if (c.d != 2) throw UnsupportedDimension("total_mass_2d needs a planar composition");
    auto density_cfg = cfg.tightened(0.01);
    auto inner_cfg = cfg.tightened(0.1);
    auto row = [&](double x1) {
        auto f = [&](double x2) { return point_impl(c, {x1, x2}, t, {0, 0}, 0, density_cfg); };
        return require_converged(integrate_finite(f, -x0, 0.0, inner_cfg), "mass row").value +
               require_converged(integrate_finite(f, 0.0, x0, inner_cfg), "mass row").value;
    };
    const double square =
        require_converged(integrate_finite(row, -x0, 0.0, cfg), "mass integral").value +
        require_converged(integrate_finite(row, 0.0, x0, cfg), "mass integral").value;
    auto complement = [&](double s) {
        const double m1 = outer_interval_mass(c.spec.outer[0], x0, s);
        const double m2 = outer_interval_mass(c.spec.outer[1], x0, s);
        return clock_pdf(c.spec, s, t, 0, cfg) * (1.0 - m1 * m2);
    };
    return square +
           require_converged(integrate_semi_infinite(complement, cfg), "mass complement").value;
}

}  // namespace ibc::densities
