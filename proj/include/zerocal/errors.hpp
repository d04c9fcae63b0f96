#ifndef ZEROCAL_ERRORS_HPP
#define ZEROCAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace zerocal {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : Error {
    using Error::Error;
};

struct JointLimitError : Error {
    using Error::Error;
};

struct UnknownToolPointError : Error {
    using Error::Error;
};

struct NonOrthonormalError : Error {
    using Error::Error;
};

struct UnreachableError : Error {
    using Error::Error;
};

struct TopologyError : Error {
    using Error::Error;
};

struct CollinearPointsError : Error {
    using Error::Error;
};

// Sampled pose whose facing axis is parallel to the base Z axis; the caller
// is expected to resample.
struct DegeneratePoseError : Error {
    using Error::Error;
};

struct EmptyMetricError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace zerocal

#endif  // ZEROCAL_ERRORS_HPP
