#ifndef IBC_MODEL_HPP
#define IBC_MODEL_HPP

// Domain types, the equation registry and validation of composition specs.
// Owns no numerics; validated values are immutable and safe to share.

#include <string>
#include <vector>

#include "ibc/errors.hpp"

namespace ibc {

enum class ProcessFamily { Brownian, FractionalBrownian, Cauchy };

struct ProcessKind {
    ProcessFamily family = ProcessFamily::Brownian;
    double drift = 0.0;      // Brownian only, per unit time
    double diffusion = 1.0;  // Brownian variance rate
    double hurst = 0.5;      // FractionalBrownian only
    double location = 0.0;   // Cauchy only
    double scale = 1.0;      // Cauchy scale rate

    static ProcessKind brownian(double mu = 0.0, double diffusion = 1.0);
    static ProcessKind fractional_brownian(double hurst);
    static ProcessKind cauchy(double location = 0.0, double scale = 1.0);

    bool standard() const;
};

enum class InnerKind { None, Process, IteratedBrownian, FracTimeProduct };

struct InnerClock {
    InnerKind kind = InnerKind::None;
    ProcessKind process;  // for kind == Process
    int n = 1;            // iteration count / product order

    static InnerClock none();
    static InnerClock of(const ProcessKind& p);
    static InnerClock iterated_brownian(int n);
    static InnerClock frac_time_product(int n);
};

struct CompositionSpec {
    std::vector<ProcessKind> outer;  // d identical-variant coordinates
    InnerClock inner;
    double time_scale = 1.0;  // lambda; enters the inner clock variance as 8 lambda^4 t
};

struct ValidationLimits {
    int max_iterated_n = 4;
    int max_frac_time_n = 4;
};

/// Normalizes and checks a composition spec; throws InvalidParameter or
/// UnsupportedComposition. Idempotent on its own output.
CompositionSpec validate_spec(const CompositionSpec& spec, const ValidationLimits& limits = {});

// ---------------------------------------------------------------------------

enum class EquationId {
    E1, E2, E3, E4, E5, E6, E7, E8, E9, E10, E11, E12, E13, E14, E15, E16, E17,
    I1, I2, I3, I4, I5, I6, I7,
};

constexpr int kEquationCount = 17;
constexpr int kIdentityCount = 7;

std::vector<EquationId> all_equations();
std::vector<EquationId> all_identities();

std::string to_string(EquationId id);
EquationId equation_from_string(const std::string& tag);

/// One-line registry description of the governing relation or identity.
std::string equation_description(EquationId id);

// ---------------------------------------------------------------------------

struct AxisSpec {
    double lo = 0.0;
    double hi = 1.0;
    int n_points = 2;
    double spacing() const { return (hi - lo) / (n_points - 1); }
};

struct ExclusionBand {
    int axis = 0;
    double center = 0.0;
    double half_width = 0.0;
};

struct Grid {
    std::vector<AxisSpec> axes;
    std::vector<ExclusionBand> bands;

    int dim() const { return static_cast<int>(axes.size()); }
    long total_points() const;
    bool excluded(const std::vector<double>& x) const;
    /// All grid points outside the exclusion bands, row-major.
    std::vector<std::vector<double>> included_points() const;
    double excluded_fraction() const;
};

Grid make_grid_1d(double lo, double hi, int n, std::vector<ExclusionBand> bands = {});

}  // namespace ibc

#endif
