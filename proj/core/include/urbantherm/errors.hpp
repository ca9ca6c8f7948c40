#pragma once

#include <stdexcept>
#include <string>

namespace urbantherm {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Calibration constants, emissivities or run options violate their invariants.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed file content (raster, mask, sidecar, manifest).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A value cannot be represented (e.g. temperature outside the 16-bit count range).
class RangeError : public Error {
public:
    using Error::Error;
};

/// Operation applied in the wrong processing state (e.g. double emissivity correction).
class StateError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A metric has nothing to average over.
class DegenerateResultError : public Error {
public:
    using Error::Error;
};

class CatalogError : public Error {
public:
    using Error::Error;
};

/// Selection or configuration leaves nothing to process.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace urbantherm
