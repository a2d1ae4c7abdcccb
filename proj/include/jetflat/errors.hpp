#pragma once

#include <stdexcept>
#include <string>

namespace jetflat {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point has the wrong number of coordinates for the function's domain.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Two objects that must live on the same manifold do not.
class DomainMismatch : public Error {
public:
    using Error::Error;
};

/// Knot/time lists of an isotopy path are inconsistent.
class MalformedPath : public Error {
public:
    using Error::Error;
};

/// The displacement x -> x + f(x) fails 1 + f' > 0 somewhere.
class NotADiffeomorphism : public Error {
public:
    using Error::Error;
};

/// Malformed JSON document or out-of-range field.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace jetflat
