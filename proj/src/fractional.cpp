#include "ibc/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "ibc/kernels.hpp"

namespace ibc::fractional {

namespace {

constexpr double kPi = M_PI;

// iterative radix-2 transform; sign = -1 forward, +1 inverse (unscaled)
void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw InvalidParameter("transform length must be a power of two");
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double signed_frequency(size_t k, size_t n, double spacing) {
    const long kk = static_cast<long>(k) <= static_cast<long>(n) / 2
                        ? static_cast<long>(k)
                        : static_cast<long>(k) - static_cast<long>(n);
    return 2.0 * kPi * static_cast<double>(kk) / (static_cast<double>(n) * spacing);
}

void check_edges(const std::vector<double>& v, double edge_tol, const char* what) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::fabs(x));
    const double limit = edge_tol * std::max(1.0, peak);
    if (std::fabs(v.front()) > limit || std::fabs(v.back()) > limit)
        throw EdgeMassTooLarge(std::string(what) + ": field has not decayed at the grid edges");
}

std::vector<double> apply_multiplier_1d(const std::vector<double>& values, double spacing,
                                        const std::function<double(double)>& mult,
                                        double imag_budget) {
    const size_t n = values.size();
    const size_t p = next_pow2(2 * n);
    std::vector<std::complex<double>> buf(p, 0.0);
    for (size_t i = 0; i < n; ++i) buf[i] = values[i];
    fft_pow2(buf, -1);
    for (size_t k = 0; k < p; ++k) buf[k] *= mult(signed_frequency(k, p, spacing));
    fft_pow2(buf, +1);
    double peak = 0.0;
    for (double x : values) peak = std::max(peak, std::fabs(x));
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) {
        const auto z = buf[i] / static_cast<double>(p);
        if (std::fabs(z.imag()) > imag_budget * std::max(1.0, peak))
            throw NonFinite("spectral route produced a non-negligible imaginary residue");
        out[i] = z.real();
    }
    return out;
}

}  // namespace

double caputo_deriv(const std::function<double(double)>& f_dt, FracOrder nu, double t,
                    const QuadratureConfig& cfg, double lower_singularity) {
    const double v = nu.nu;
    if (!(t > 0.0)) throw InvalidParameter("Caputo derivative needs t > 0");
    if (v >= 1.0) throw InvalidParameter("Caputo evaluation covers orders in (0,1)");
    if (lower_singularity < 0.0 || lower_singularity >= 1.0)
        throw InvalidParameter("lower singularity exponent must lie in [0,1)");

    const double mid = 0.5 * t;
    // upper half: u = (t-s)^(1-v) removes the kernel singularity exactly
    const double qu = 1.0 / (1.0 - v);
    auto upper = [&](double u) { return f_dt(t - std::pow(u, qu)); };
    const double iu =
        require_converged(integrate_finite(upper, 0.0, std::pow(mid, 1.0 - v), cfg),
                          "Caputo upper segment").value * qu;

    double il = 0.0;
    if (lower_singularity > 0.0) {
        const double ql = 1.0 / (1.0 - lower_singularity);
        auto lower = [&](double u) {
            const double s = std::pow(u, ql);
            return f_dt(s) * std::pow(t - s, -v) * ql * std::pow(u, ql - 1.0);
        };
        il = require_converged(
                 integrate_finite(lower, 0.0, std::pow(mid, 1.0 - lower_singularity), cfg),
                 "Caputo lower segment").value;
    } else {
        auto lower = [&](double s) { return f_dt(s) * std::pow(t - s, -v); };
        il = require_converged(integrate_finite(lower, 0.0, mid, cfg), "Caputo lower segment")
                 .value;
    }
    return (il + iu) / std::tgamma(1.0 - v);
}

double riesz_deriv_definition(const std::function<double(double)>& f,
                              const std::function<double(double)>& fprime, double x,
                              const QuadratureConfig& cfg) {
    const double far = 1e6;
    if (std::fabs(f(far)) * far > 0.05 || std::fabs(f(-far)) * far > 0.05)
        throw SlowDecay("principal-value route needs decay faster than 1/|y|");

    if (fprime) {
        auto g = [&](double u) { return (fprime(x - u) - fprime(x + u)) / u; };
        return require_converged(integrate_semi_infinite(g, cfg), "principal-value integral")
                   .value / kPi;
    }
    auto bracket = [&](double xx) {
        auto g = [&](double u) { return (f(xx - u) - f(xx + u)) / u; };
        return require_converged(integrate_semi_infinite(g, cfg.tightened(0.1)),
                                 "principal-value integral").value;
    };
    const double h = 1e-4 * std::max(1.0, std::fabs(x));
    return (bracket(x + h) - bracket(x - h)) / (2.0 * h * kPi);
}

double riesz_centered_constant(double nu) {
    return -std::tgamma(1.0 + nu) * std::sin(kPi * nu / 2.0) / kPi;
}

double riesz_centered_constant_gamma_form(double nu) {
    if (nu >= 1.0) throw InvalidParameter("the Gamma(-nu) form is defined for nu < 1");
    return 1.0 / (2.0 * std::tgamma(-nu) * std::cos(kPi * nu / 2.0));
}

double riesz_deriv_centered(const std::function<double(double)>& f, double x, FracOrder nu,
                            const QuadratureConfig& cfg) {
    const double v = nu.nu;
    const double scale = std::max(1.0, std::fabs(x));
    const double delta = 1e-5 * scale;

    // second derivative estimate covers the (0, delta) sliver analytically
    const double h = 1e-3 * scale;
    const double fxx = (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) -
                        f(x + 2 * h)) / (12 * h * h);
    const double near = fxx * std::pow(delta, 2.0 - v) / (2.0 - v);

    const double fx2 = 2.0 * f(x);
    auto g = [&](double y) {
        return (f(x - y) - fx2 + f(x + y)) / std::pow(y, 1.0 + v);
    };
    const double main =
        require_converged(integrate_from(g, delta, cfg), "centered Riesz integral").value;
    return riesz_centered_constant(v) * (main + near);
}

std::vector<double> riesz_fourier_1d(const std::vector<double>& values, double spacing,
                                     double nu, const QuadratureConfig& cfg) {
    if (nu < 0.0 || nu > 1.0) throw InvalidParameter("spectral route covers orders in [0,1]");
    if (values.size() < 4) throw InvalidParameter("field too small for the spectral route");
    check_edges(values, cfg.edge_tol, "spectral Riesz");
    auto mult = [nu](double beta) { return std::pow(std::fabs(beta), nu); };
    return apply_multiplier_1d(values, spacing, mult, 1e-9);
}

densities::DensityField riesz_deriv_fourier(const densities::DensityField& field, double nu,
                                            int axis, const QuadratureConfig& cfg) {
    const int d = field.grid.dim();
    if (axis < 0 || axis >= d) throw InvalidParameter("axis out of range");
    densities::DensityField out = field;
    if (d == 1) {
        out.values = riesz_fourier_1d(field.values, field.grid.axes[0].spacing(), nu, cfg);
        return out;
    }
    if (d != 2) throw UnsupportedDimension("spectral route covers 1-d and 2-d fields");
    const int n0 = field.grid.axes[0].n_points;
    const int n1 = field.grid.axes[1].n_points;
    const double h = field.grid.axes[axis].spacing();
    if (axis == 1) {
        for (int i = 0; i < n0; ++i) {
            std::vector<double> row(field.values.begin() + static_cast<long>(i) * n1,
                                    field.values.begin() + static_cast<long>(i + 1) * n1);
            auto r = riesz_fourier_1d(row, h, nu, cfg);
            std::copy(r.begin(), r.end(), out.values.begin() + static_cast<long>(i) * n1);
        }
    } else {
        std::vector<double> col(n0);
        for (int j = 0; j < n1; ++j) {
            for (int i = 0; i < n0; ++i) col[i] = field.values[static_cast<long>(i) * n1 + j];
            auto r = riesz_fourier_1d(col, h, nu, cfg);
            for (int i = 0; i < n0; ++i) out.values[static_cast<long>(i) * n1 + j] = r[i];
        }
    }
    return out;
}

densities::DensityField mixed_riesz_spectral(const densities::DensityField& field, int axis_k,
                                             int axis_j, const QuadratureConfig& cfg) {
    if (field.grid.dim() != 2) throw UnsupportedDimension("mixed operator needs a 2-d field");
    if (axis_k == axis_j) throw InvalidParameter("mixed operator needs distinct axes");
    auto once = riesz_deriv_fourier(field, 1.0, axis_k, cfg);
    return riesz_deriv_fourier(once, 1.0, axis_j, cfg);
}

double mixed_riesz_cauchy_product(const CompositionSpec& spec, double x1, double x2, double t,
                                  const QuadratureConfig& cfg) {
    const CompositionSpec s = validate_spec(spec);
    if (s.outer.size() != 2 || s.outer[0].family != ProcessFamily::Cauchy)
        throw UnsupportedComposition("analytic mixed route needs two Cauchy coordinates");
    auto f = [&](double w) {
        // d/d|x| of each Cauchy factor equals -d/dw of that factor
        return kernels::cauchy_kernel(x1, w, 0, 1) * kernels::cauchy_kernel(x2, w, 0, 1) *
               densities::clock_density(s, w, t, 0, cfg);
    };
    return require_converged(integrate_semi_infinite(f, cfg), "analytic mixed integral").value;
}

double mixed_riesz_centered_nested(const std::function<double(double, double)>& f, double x,
                                   double y, bool x_first, const QuadratureConfig& cfg) {
    auto inner_cfg = cfg.tightened(0.1);
    if (x_first) {
        auto g = [&](double yy) {
            return riesz_deriv_centered([&](double xx) { return f(xx, yy); }, x, FracOrder(1.0),
                                        inner_cfg);
        };
        return riesz_deriv_centered(g, y, FracOrder(1.0), cfg);
    }
    auto g = [&](double xx) {
        return riesz_deriv_centered([&](double yy) { return f(xx, yy); }, y, FracOrder(1.0),
                                    inner_cfg);
    };
    return riesz_deriv_centered(g, x, FracOrder(1.0), cfg);
}

}  // namespace ibc::fractional
