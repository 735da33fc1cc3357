#pragma once

#include <stdexcept>
#include <string>

namespace skelact {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroValidKeypoints : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class StaleCache : public Error { using Error::Error; };
class UnknownLabel : public Error { using Error::Error; };
class EmptyMatrix : public Error { using Error::Error; };
class TooFewClips : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class SchemaError : public Error { using Error::Error; };
class VersionError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

/// Every candidate subsequence of a clip fell below the minimum length.
class EmptyResult : public Error { using Error::Error; };

} // namespace skelact
