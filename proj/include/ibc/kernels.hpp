#ifndef IBC_KERNELS_HPP
#define IBC_KERNELS_HPP

// Closed-form kernels appearing inside the subordination integrals, together
// with their exact partial derivatives. Space derivatives come from Hermite or
// rational recurrences, never from finite differences, so downstream residuals
// inherit only quadrature error.

namespace ibc::kernels {

/// Probabilists' Hermite polynomial He_n(z).
double hermite_prob(int n, double z);

/// Gaussian density in x with the given variance; dx_order <= 6.
double gauss_kernel(double x, double variance, int dx_order = 0);

/// Variance-slot derivatives of the Gaussian density (dv_order <= 2).
/// For dx_order > 0 the heat identity d/dv = (1/2) d2/dx2 is used.
double gauss_kernel_dv(double x, double variance, int dv_order, int dx_order = 0);

/// Transition density of Brownian motion with drift, exp(-(x-mu s)^2/2s)/sqrt(2 pi s),
/// with exact partials; dx_order <= 4, ds_order <= 2.
double gauss_drift_kernel(double x, double s, double mu, int dx_order = 0, int ds_order = 0);

/// Cauchy kernel s/(pi (s^2 + x^2)) with exact rational partials,
/// dx_order <= 2 (internally up to 4), ds_order <= 2.
double cauchy_kernel(double x, double s, int dx_order = 0, int ds_order = 0);

/// Fractional Brownian marginal kernel exp(-x^2/2 s^(2H))/sqrt(2 pi s^(2H));
/// dx_order <= 4, ds_order <= 2.
double fbm_kernel(double x, double s, double hurst, int dx_order = 0, int ds_order = 0);

/// First-passage density s exp(-s^2/2w)/sqrt(2 pi w^3).
double first_passage_kernel(double s, double w);

/// C(t) = P(B^mu(t) > 0), the normalizer of the drifted-clock density.
double half_normal_normalizer(double t, double mu);

}  // namespace ibc::kernels

#endif
