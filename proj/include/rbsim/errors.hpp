#pragma once

#include <stdexcept>
#include <string>

namespace rbsim {

// Base class for all toolkit errors so callers can catch by domain.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid run configuration or plan (bad parameter ranges, unknown keys, ...).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// File could not be read, written, or parsed at the byte level.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// A twirled channel failed the depolarizing-form assertion.
struct NotDepolarizing : Error {
    explicit NotDepolarizing(const std::string& msg) : Error(msg) {}
};

// Dataset is missing up- or down-target records at some length.
struct MissingDirection : Error {
    explicit MissingDirection(const std::string& msg) : Error(msg) {}
};

// Requested sequence length is not present in the dataset.
struct LengthNotFound : Error {
    explicit LengthNotFound(const std::string& msg) : Error(msg) {}
};

// Fewer distinct lengths than model parameters.
struct DegenerateData : Error {
    explicit DegenerateData(const std::string& msg) : Error(msg) {}
};

// Two fit results do not refer to the same fitted series.
struct SeriesMismatch : Error {
    explicit SeriesMismatch(const std::string& msg) : Error(msg) {}
};

// Interleaved/reference polarization ratio too far above 1.
struct RatioOutOfRange : Error {
    explicit RatioOutOfRange(const std::string& msg) : Error(msg) {}
};

// Internal consistency failure (corrupted group table and the like).
struct InternalError : Error {
    explicit InternalError(const std::string& msg) : Error(msg) {}
};

}  // namespace rbsim
