#pragma once

#include <stdexcept>
#include <string>

namespace phe {

/// Matrix with zero determinant cannot be the linearisation of a local
/// diffeomorphism.
class InvalidLinearisation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation requires a specific spectrum class (usually hyperbolic).
class UnsupportedClass : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter outside its admissible range (e.g. Moebius |c| >= 1).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation requested inside the exclusion radius of a singular circle.
class SingularInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The requested truncation depth cannot produce a finite tail bound.
class InsufficientDepth : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Newton inversion of the lifted map did not converge.
class InversionFailure : public std::runtime_error {
public:
    InversionFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Backward-iterated leaf could not be resampled into a valid polyline.
class DegenerateLeaf : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iteration did not become Cauchy within the allowed depth.
class ConvergenceFailure : public std::runtime_error {
public:
    ConvergenceFailure(const std::string& what, double last_gap)
        : std::runtime_error(what), last_gap_(last_gap) {}
    double last_gap() const { return last_gap_; }

private:
    double last_gap_;
};

/// No admissible rational seed slope clears the unstable cone.
class SeedSelectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Provided leaves are too short to certify the requested quantity.
class InsufficientWindow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Leaf does not extend far enough past the base point for the average.
class ExtensionRequired : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Branching certificate could not be assembled at the requested depth.
class CertificateFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace phe
