#pragma once

#include <stdexcept>
#include <string>

namespace qtm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};
struct HermiticityError : Error {
    using Error::Error;
};
struct SingularSystemError : Error {
    using Error::Error;
};
struct DegenerateSteadyStateError : Error {
    using Error::Error;
};
struct NumericalPSDError : Error {
    using Error::Error;
};
struct NotXStateError : Error {
    using Error::Error;
};
struct NonFiniteBetaError : Error {
    using Error::Error;
};
struct UnknownBathError : Error {
    using Error::Error;
};
struct MissingBetaError : Error {
    using Error::Error;
};
struct TimestepError : Error {
    using Error::Error;
};
struct BoundaryWeightError : Error {
    using Error::Error;
};
struct InconsistentEnsembleError : Error {
    using Error::Error;
};
struct MapUndefinedError : Error {
    using Error::Error;
};
struct NoConvergenceError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct ColumnError : Error {
    using Error::Error;
};

} // namespace qtm
