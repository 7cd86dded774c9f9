#pragma once

#include <stdexcept>
#include <string>

namespace qmr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadruple with repeated indices.
class InvalidQuadruple : public Error { using Error::Error; };
/// Out-of-range numeric parameter (eps, radius grid, budgets, ...).
class ParameterError : public Error { using Error::Error; };
/// Mismatched point counts or malformed correspondences.
class ShapeError : public Error { using Error::Error; };
/// Input outside the domain of a map (non-unit boundary point, pole, ...).
class DomainError : public Error { using Error::Error; };
/// Sample too coarse for the requested scale.
class ResolutionError : public Error { using Error::Error; };
/// Violated configuration invariants (sphere configs, group models, campaigns).
class ConfigError : public Error { using Error::Error; };
/// Input data failing validation (metric axioms, cover coverage, generator specs).
class ValidationError : public Error { using Error::Error; };

}  // namespace qmr
