#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside the documented domain of an operation.
struct DomainError : Error { using Error::Error; };
// A product factor or fraction denominator vanished; signals a parameter error.
struct PoleError : Error { using Error::Error; };
// Series or continued fraction failed to meet tolerance within its budget.
struct NonConvergence : Error { using Error::Error; };
// Queried point is not a member of the time scale.
struct MembershipError : Error { using Error::Error; };
struct OrderError : Error { using Error::Error; };
// rho/sigma does not exist (scale bounded on the queried side).
struct UnboundedError : Error { using Error::Error; };
struct MissingDerivative : Error { using Error::Error; };
// Tail hypotheses required for a continued-fraction value were not certified.
struct RegimeError : Error { using Error::Error; };

} // namespace qbm
