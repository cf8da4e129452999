#ifndef IKHAM_ERROR_HPP
#define IKHAM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ikham {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields defined on different grids were combined.
class GridMismatch : public Error {
 public:
  GridMismatch() : Error("fields live on different grids") {}
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// The water depth 1 + eta - b dropped below the configured floor.
class InvalidGeometry : public Error {
 public:
  InvalidGeometry(double min_depth, double floor)
      : Error("depth floor violated: min H = " + std::to_string(min_depth) +
              " < c0 = " + std::to_string(floor)),
        min_depth_(min_depth) {}

  double min_depth() const noexcept { return min_depth_; }

 private:
  double min_depth_;
};

/// An iterative or direct solve did not reach its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace ikham

#endif  // IKHAM_ERROR_HPP
