#pragma once

#include <stdexcept>
#include <string>

namespace snapout {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidCurveError : Error { using Error::Error; };
struct InvalidEnvironmentError : Error { using Error::Error; };
struct InvalidMeasureError : Error { using Error::Error; };
struct InvalidInputError : Error { using Error::Error; };
struct InvalidInitialConditionError : Error { using Error::Error; };
struct StepTooLargeError : Error { using Error::Error; };
struct DegenerateDomainError : Error { using Error::Error; };
struct MissingTraceError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IngestError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace snapout
