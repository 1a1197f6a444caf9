// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rfil {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotExact : Error { using Error::Error; };
struct ExponentOutOfRange : Error { using Error::Error; };
struct ExponentTooLow : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct BaseMismatch : Error { using Error::Error; };
struct OrderUnsupported : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct InsufficientSmoothness : Error { using Error::Error; };
struct DegenerateCurve : Error { using Error::Error; };
struct StepRejected : Error { using Error::Error; };
struct BlowUpSuspected : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace rfil
