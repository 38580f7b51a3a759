#ifndef IBC_VERIFY_HPP
#define IBC_VERIFY_HPP

// Equation registry and residual engine. Each governing equation assembles
// its two sides from analytic-under-integral pieces on an exclusion-aware
// grid and reports pointwise and maximum relative residuals.

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "ibc/model.hpp"
#include "ibc/quad.hpp"

namespace ibc::verify {

using Params = std::map<std::string, double>;

struct PerturbSpec {
    int coeff_index = -1;  // < 0: no perturbation
    double factor = 1.0;
};

struct ResidualReport {
    EquationId eq{};
    std::string description;
    double t = 0.0;
    Params params;
    Grid grid;
    QuadratureConfig cfg;
    double max_rel_residual = 0.0;
    double mean_rel_residual = 0.0;
    long included_points = 0;
    double excluded_fraction = 0.0;
    std::vector<double> worst_point;
    std::map<std::string, double> variants;  // flagged alternative-constant residuals
};

struct IdentityReport {
    EquationId id{};
    std::string description;
    double max_abs_err = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::map<std::string, double> details;
};

/// Number of perturbable coefficients in the registered equation.
int coefficient_count(EquationId eq);

/// Curated parameter sets exercised by `verify all`.
std::vector<Params> verification_matrix(EquationId eq);

/// Default residual grid (region and exclusion bands) for the equation.
Grid default_grid(EquationId eq, const Params& params, double t);

/// Evaluates the equation residual over the grid. The perturbation multiplies
/// one registered coefficient (negative-control hook). Forcing terms that are
/// pointwise finite are part of the residual; delta-supported terms are
/// excluded by the grid bands.
ResidualReport residual(EquationId eq, const Params& params, double t, const Grid& grid,
                        const QuadratureConfig& cfg = {}, const PerturbSpec& perturb = {},
                        int threads = 0);

ResidualReport residual(EquationId eq, const Params& params, double t,
                        const QuadratureConfig& cfg = {}, const PerturbSpec& perturb = {},
                        int threads = 0);

/// E13 with the forcing dropped; stays well above any pass threshold and
/// demonstrates that the non-homogeneous term matters.
ResidualReport residual_e13_without_forcing(double t, const QuadratureConfig& cfg = {},
                                            int threads = 0);

// --- identity checks -------------------------------------------------------

std::pair<std::complex<double>, std::complex<double>> fourier_laplace_check(
    double mu, double beta, double eta, const QuadratureConfig& cfg = {});

std::pair<double, double> pn_zero_constant_check(int n, double t,
                                                 const QuadratureConfig& cfg = {});

std::pair<double, double> subordination_identity_check(double s, double t,
                                                       const QuadratureConfig& cfg = {});

IdentityReport run_identity(EquationId id, const QuadratureConfig& cfg = {});

// --- orchestration ----------------------------------------------------------

struct SuiteResult {
    std::vector<ResidualReport> residuals;
    std::vector<IdentityReport> identities;
    double wall_seconds = 0.0;
};

/// The curated desk-scale matrix: every equation at each t, plus the identity
/// suite when with_identities is set.
SuiteResult run_all(const std::vector<double>& ts, const QuadratureConfig& cfg = {},
                    int threads = 0, bool with_identities = true);

std::string report_to_json(const ResidualReport& r);
std::string report_to_json(const IdentityReport& r);

}  // namespace ibc::verify

#endif
