#pragma once

#include <stdexcept>
#include <string>

namespace specv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonMonotoneScheme : Error { using Error::Error; };
struct DegenerateStep : Error { using Error::Error; };
struct BadGeometry : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };
struct TooFewObservations : Error { using Error::Error; };
struct DegenerateDenominator : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };
struct NonPositiveInputs : Error { using Error::Error; };
struct ToleranceNotMet : Error { using Error::Error; };
struct BadLag : Error { using Error::Error; };
struct WeightConstraintViolation : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace specv
