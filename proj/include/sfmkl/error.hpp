#pragma once

#include <stdexcept>
#include <string>

namespace sfmkl {

    /// Base class for every error raised by the library.
    class Error : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Invalid argument or violated precondition.
    class InvalidInput : public Error {
    public:
        using Error::Error;
    };

    /// A numerical routine could not produce a trustworthy result.
    class NumericalError : public Error {
    public:
        using Error::Error;
    };

    /// Malformed experiment configuration.
    class ConfigError : public Error {
    public:
        using Error::Error;
    };

}  // namespace sfmkl
