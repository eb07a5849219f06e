#pragma once

#include <stdexcept>
#include <string>

namespace qpi {

// Base for all library errors. CLI maps subtypes onto process exit codes:
// input/calibration problems exit 2, stage failures exit 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or out-of-contract inputs: wrong grid sizes, bad dtype, missing
// file, invalid flag combination.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Configuration values that cannot produce a valid run (zero tilt, sideband
// window overlapping DC, nonpositive radius, ...).
class InvalidConfigurationError : public Error {
public:
    using Error::Error;
};

// Calibration could not locate a usable carrier peak.
class CalibrationFailureError : public Error {
public:
    using Error::Error;
};

// Numerically degenerate input for an otherwise valid call (constant field
// where a spread is required, empty value set, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Optimization produced persistent non-finite cost.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// No usable nucleus mask could be produced for a ROI.
class SegmentationFailureError : public Error {
public:
    using Error::Error;
};

// A feature has no defined value for this input (empty mask, nonpositive
// phase mass, mask lost at the smallest pyramid scale, ...).
class FeatureUndefinedError : public Error {
public:
    using Error::Error;
};

// Correlation matrix not invertible to working precision.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

// Fewer observations than the statistic requires.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

} // namespace qpi
