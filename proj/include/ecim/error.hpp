#pragma once

#include <stdexcept>
#include <string>

namespace ecim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or mismatched problem data (dimensions, non-finite entries, bad spins).
class InstanceError : public Error {
public:
    using Error::Error;
};

/// An argument outside its admissible range (step size, mu, epsilon, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Exhaustive routines refuse instances larger than they can enumerate.
class UnsupportedSizeError : public Error {
public:
    using Error::Error;
};

/// Every PL sample sat at the optimum; the ratio is undefined.
class FlatObjectiveError : public Error {
public:
    using Error::Error;
};

class WindowError : public Error {
public:
    using Error::Error;
};

class HorizonError : public Error {
public:
    using Error::Error;
};

/// Problems reading or writing the on-disk formats. The message names the field.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace ecim
