#pragma once

#include <stdexcept>
#include <string>

namespace dropmeter {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Out-of-range thresholds, bad geometry, malformed generator specs. CLI exit code 2.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Unreadable files, undecodable images, inconsistent inputs. CLI exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

// Physical card and image aspect ratios disagree (image is not orthogonal to the card).
class DistortionError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

class SpecError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

// Random disk placement gave up before fitting every disk.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Fractal dimension requested for a mask without foreground.
class UndefinedDimensionError : public Error {
public:
    using Error::Error;
};

}  // namespace dropmeter
