#pragma once

#include <stdexcept>
#include <string>

namespace covertsense {

// Each failure mode gets its own type so callers and tests can catch precisely.

struct NonHermitianError : std::runtime_error { using std::runtime_error::runtime_error; };
struct NotPsdError : std::runtime_error { using std::runtime_error::runtime_error; };
struct TraceMismatchError : std::runtime_error { using std::runtime_error::runtime_error; };
struct NonFiniteError : std::runtime_error { using std::runtime_error::runtime_error; };
struct DimensionMismatchError : std::runtime_error { using std::runtime_error::runtime_error; };

struct SupportViolationError : std::runtime_error { using std::runtime_error::runtime_error; };

struct UnknownParameterError : std::runtime_error { using std::runtime_error::runtime_error; };
struct UnknownSymbolError : std::runtime_error { using std::runtime_error::runtime_error; };

struct EmptyTypeBallError : std::runtime_error { using std::runtime_error::runtime_error; };
struct ScaleExceededError : std::runtime_error { using std::runtime_error::runtime_error; };
struct AssumptionViolatedError : std::runtime_error { using std::runtime_error::runtime_error; };
struct NoZeroEquivalentPairError : std::runtime_error { using std::runtime_error::runtime_error; };
struct DegenerateAlphaError : std::runtime_error { using std::runtime_error::runtime_error; };

struct NotClassicalError : std::runtime_error { using std::runtime_error::runtime_error; };

struct IdentityUnitaryError : std::runtime_error { using std::runtime_error::runtime_error; };
struct OrthogonalizerNotFoundError : std::runtime_error { using std::runtime_error::runtime_error; };
struct BlockTooLongError : std::runtime_error { using std::runtime_error::runtime_error; };

struct ParseError : std::runtime_error { using std::runtime_error::runtime_error; };

} // namespace covertsense
