#ifndef AWSGD_ERRORS_HPP_
#define AWSGD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace awsgd {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampler construction/draw failures.
struct EmptyClassError : Error {
    using Error::Error;
};
struct AtomOutOfRangeError : Error {
    using Error::Error;
};
struct DensityFloorError : Error {
    using Error::Error;
};
struct NumericOverflowError : Error {
    using Error::Error;
};

// Optimizer failures.
struct NonFiniteUpdateError : Error {
    using Error::Error;
};
struct InsufficientSamplesError : Error {
    using Error::Error;
};
struct SpaceTooLargeError : Error {
    using Error::Error;
};
struct WeightOverflowError : Error {
    using Error::Error;
};

// Data and IO failures.
struct BadMagicError : Error {
    using Error::Error;
};
struct TruncatedPayloadError : Error {
    using Error::Error;
};
struct DimensionMismatchError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

// CLI/config failures.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace awsgd

#endif  // AWSGD_ERRORS_HPP_
