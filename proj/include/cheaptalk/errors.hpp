#pragma once

#include <stdexcept>
#include <string>

namespace cheaptalk {

/// Argument outside the domain of a closed-form evaluator (e.g. x < -1/e for
/// the Lambert W function, b <= 0 for the infinite-bin length).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// P(a < M < b) fell below the mass floor, or the interval is empty.
class ZeroMassInterval : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quantizer bin lost its mass, left the support, or merged with a neighbour.
class BinCollapse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonPositiveDensity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed custom-density file or configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cheaptalk
