#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gameopt {

/// Largest state dimension supported. Vectors and matrices use fixed-capacity
/// storage of this size so that per-step arithmetic never touches the heap.
inline constexpr int kMaxDim = 8;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension or matrix-shape disagreement between model pieces.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed input: bad law, bad parameters, bad file contents.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A requested computation does not fit under the configured node or
/// enumeration budget. Carries the size that would have been required.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, double required)
        : Error(what), required_(required) {}
    double required() const noexcept { return required_; }

private:
    double required_;
};

/// Operation requires a feature of the innovation law that it lacks.
class UnsupportedLaw : public Error {
public:
    using Error::Error;
};

inline Vector zero_vector(int dim) { return Vector::Zero(dim); }

inline void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim)
        throw ShapeError("dimension " + std::to_string(dim) + " outside [1, " +
                         std::to_string(kMaxDim) + "]");
}

}  // namespace gameopt
