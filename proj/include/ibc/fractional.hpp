#ifndef IBC_FRACTIONAL_HPP
#define IBC_FRACTIONAL_HPP

// Fractional differential operators: the Caputo time-fractional derivative,
// and the Riesz space-fractional derivative in three cross-validating
// implementations (principal-value definition, centered second-difference,
// spectral multiplier), plus the mixed second-order Riesz derivative.

#include <functional>

#include "ibc/densities.hpp"
#include "ibc/model.hpp"
#include "ibc/quad.hpp"

namespace ibc::fractional {

struct FracOrder {
    double nu;
    explicit FracOrder(double v) : nu(v) {
        if (!(v > 0.0 && v <= 1.0)) throw InvalidParameter("fractional order must lie in (0,1]");
    }
};

/// Caputo derivative (1/Gamma(1-nu)) int_0^t f'(s) (t-s)^(-nu) ds, evaluated
/// from the analytic time-derivative f'. The kernel singularity at s = t is
/// removed exactly by the substitution u = (t-s)^(1-nu); a known algebraic
/// blow-up of f' at s = 0 can be declared through lower_singularity.
double caputo_deriv(const std::function<double(double)>& f_dt, FracOrder nu, double t,
                    const QuadratureConfig& cfg = {}, double lower_singularity = 0.0);

/// First-order Riesz derivative from the principal-value definition
/// (1/pi) d/dx [ int f(y)/(x-y) dy - int f(y)/(y-x) dy ]. When fprime is
/// provided the outer d/dx is taken analytically, otherwise by central
/// differencing of the inner integral.
double riesz_deriv_definition(const std::function<double(double)>& f,
                              const std::function<double(double)>& fprime, double x,
                              const QuadratureConfig& cfg = {});

/// Centered-difference Riesz derivative of order nu in (0,1]:
/// c(nu) int_0^inf (f(x-y) - 2 f(x) + f(x+y)) / y^(1+nu) dy with
/// c(nu) = -Gamma(1+nu) sin(pi nu / 2) / pi.
double riesz_deriv_centered(const std::function<double(double)>& f, double x, FracOrder nu,
                            const QuadratureConfig& cfg = {});

/// The constant c(nu) above, and its Gamma(-nu) reflection form.
double riesz_centered_constant(double nu);
double riesz_centered_constant_gamma_form(double nu);

/// Spectral route on a sampled field: forward transform, multiply by
/// |beta|^nu (positive-multiplier convention), inverse transform. nu = 0 is
/// the identity. Throws EdgeMassTooLarge when the field has not decayed at
/// the grid edges to cfg.edge_tol (relative to the field maximum).
std::vector<double> riesz_fourier_1d(const std::vector<double>& values, double spacing,
                                     double nu, const QuadratureConfig& cfg = {});

densities::DensityField riesz_deriv_fourier(const densities::DensityField& field, double nu,
                                            int axis, const QuadratureConfig& cfg = {});

/// Mixed second-order Riesz derivative of a 2-d field by the spectral route,
/// multiplier |beta_k| |beta_j| applied in the given axis order.
densities::DensityField mixed_riesz_spectral(const densities::DensityField& field, int axis_k,
                                             int axis_j, const QuadratureConfig& cfg = {});

/// Mixed second-order Riesz derivative of a Cauchy-coordinate composition,
/// taken analytically under the clock integral through the identity
/// d/d|x| (Cauchy factor in x at clock s) = -d/ds (that factor).
double mixed_riesz_cauchy_product(const CompositionSpec& spec, double x1, double x2, double t,
                                  const QuadratureConfig& cfg = {});

/// Nested application of the centered route in two coordinates; used for the
/// commutativity identity.
double mixed_riesz_centered_nested(const std::function<double(double, double)>& f, double x,
                                   double y, bool x_first, const QuadratureConfig& cfg = {});

}  // namespace ibc::fractional

#endif
