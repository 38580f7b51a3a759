#ifndef IBC_DENSITIES_HPP
#define IBC_DENSITIES_HPP

// Exact densities of the composed processes, evaluated by quadrature of the
// closed-form kernels, with analytic space/time derivatives taken under the
// integral sign. Closed forms are provided where they exist.

#include <complex>
#include <map>
#include <vector>

#include "ibc/model.hpp"
#include "ibc/quad.hpp"

namespace ibc::densities {

struct DensityField {
    Grid grid;
    double t = 0.0;
    std::vector<double> values;  // row-major, NaN inside exclusion bands
    std::map<int, std::vector<double>> x_derivatives;  // 1-d fields only

    long index(const std::vector<int>& idx) const;
    double total_mass_trapezoid() const;  // 1-d, NaN-skipping trapezoid
};

/// Density of the composed process at a point; x.size() must match the spec's
/// dimension. Throws QuadratureFailure when the integral does not converge.
double density_point(const CompositionSpec& spec, const std::vector<double>& x, double t,
                     const QuadratureConfig& cfg = {});

/// Partial derivative of the density, all orders taken under the integral:
/// dx_orders[j] <= 4 per axis, dt_order <= 2.
double density_deriv(const CompositionSpec& spec, const std::vector<double>& x, double t,
                     const std::vector<int>& dx_orders, int dt_order,
                     const QuadratureConfig& cfg = {});

/// Field over the grid; derivative arrays (1-d grids) come from the analytic
/// x-derivatives, never from differencing values.
DensityField density_grid(const CompositionSpec& spec, const Grid& grid, double t,
                          const QuadratureConfig& cfg = {},
                          const std::vector<int>& deriv_orders = {}, int threads = 0);

/// Fast 2-d field over one shared quadrature node set (single-clock
/// compositions only); used to feed the spectral operators.
DensityField density_grid_2d_shared(const CompositionSpec& spec, const Grid& grid, double t,
                                    const QuadratureConfig& cfg = {}, int threads = 0);

/// Closed form of the iterated Cauchy density with position parameter a:
/// (2/pi^2) t ln(t/|x-a|) / (t^2 - (x-a)^2), removable point |x-a| = t
/// evaluated by series. Throws SingularPoint at x = a.
double cc_closed_form(double x, double t, double a = 0.0);

/// The (t^2 + x^2)-denominator variant kept for the cross-check report; it
/// goes negative for |x-a| > t and is not used by any verified equation.
double cc_closed_form_alt(double x, double t, double a = 0.0);

/// Density of the n-times iterated Brownian motion (nested quadrature),
/// with optional outer x-derivative and first/second clock time-derivative.
double iterated_density_pn(int n, double x, double t, const QuadratureConfig& cfg = {},
                           int dx_order = 0, int dt_order = 0);

/// Gamma-product constant: value of the n-iterated density at x = 0.
double pn_zero_formula(int n, double t);

/// Density of the product-clock (order 1/n) diffusion, n in {2,3};
/// dt_order <= 1 is taken on the clock density analytically.
double frac_diffusion_density(int n, double x, double t, const QuadratureConfig& cfg = {},
                              int dx_order = 0, int dt_order = 0);

/// Density of the composition with a drifted clock, normalized by
/// C(t) = P(clock > 0).
double drifted_time_density(double x, double t, double mu, const QuadratureConfig& cfg = {});

/// Fourier transform (in x) of the drifted-clock density, and the reference
/// single-integral form it must equal.
double drifted_time_fourier(double beta, double t, double mu, const QuadratureConfig& cfg = {});
double drifted_time_fourier_reference(double beta, double t, double mu,
                                      const QuadratureConfig& cfg = {});

/// Density of the positive clock value at s after elapsed time t, with
/// analytic time-derivatives (dt <= 2); single-clock compositions only.
double clock_density(const CompositionSpec& spec, double s, double t, int dt = 0,
                     const QuadratureConfig& cfg = {});

/// Mass of the density outside [-x0, x0] (d = 1), with the outer tail handled
/// by the analytic survival function of the coordinate process.
double tail_mass_outside(const CompositionSpec& spec, double x0, double t,
                         const QuadratureConfig& cfg = {});

/// Total mass of a 1-d density: adaptive x-integral over (-x0, x0) plus the
/// analytic-survival tail term.
double total_mass_1d(const CompositionSpec& spec, double t, double x0,
                     const QuadratureConfig& cfg = {});

/// Total mass of a 2-d density over the plane (square quadrature + exact
/// complement through the clock integral).
double total_mass_2d(const CompositionSpec& spec, double t, double x0,
                     const QuadratureConfig& cfg = {});

}  // namespace ibc::densities

#endif
