#ifndef IBC_ERRORS_HPP
#define IBC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ibc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParameter : Error { using Error::Error; };
struct UnsupportedComposition : Error { using Error::Error; };
struct UnsupportedDimension : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct DepthUnsupported : Error { using Error::Error; };
struct OrderUnsupported : Error { using Error::Error; };
struct SingularPoint : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct SlowDecay : Error { using Error::Error; };
struct EdgeMassTooLarge : Error { using Error::Error; };
struct NonMonotoneCdf : Error { using Error::Error; };
struct RegionViolation : Error { using Error::Error; };

}  // namespace ibc

#endif
