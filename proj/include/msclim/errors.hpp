#pragma once

#include <stdexcept>
#include <string>

namespace msclim {

/// Base class for all numerical failures raised by this library.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepLimitExceeded : NumericError {
    double last_good_time;
    explicit StepLimitExceeded(double t)
        : NumericError("integrator step limit exceeded at t=" + std::to_string(t)),
          last_good_time(t) {}
};

struct NonFiniteState : NumericError {
    double last_good_time;
    explicit NonFiniteState(double t)
        : NumericError("state left the finite domain; last good t=" + std::to_string(t)),
          last_good_time(t) {}
};

struct NotConverged : NumericError {
    using NumericError::NumericError;
};

struct NoCycleFound : NumericError {
    using NumericError::NumericError;
};

struct NonConvergentReturns : NumericError {
    using NumericError::NumericError;
};

struct QuadratureNotConverged : NumericError {
    using NumericError::NumericError;
};

struct DetectorFailed : NumericError {
    using NumericError::NumericError;
};

struct NotOnHopfCurve : NumericError {
    using NumericError::NumericError;
};

struct AtThreshold : NumericError {
    using NumericError::NumericError;
};

}  // namespace msclim
