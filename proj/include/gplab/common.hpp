#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace gplab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Allocations of state tensors / kernels above this limit are refused with
// a SizeError naming the limiting parameter.
inline constexpr std::size_t kMemoryBudgetBytes = std::size_t{2} << 30;

// Zero-energy solution crossed zero: the potential supports a two-body
// bound state and f = 1 - w is no longer positive.
struct BoundStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solver (shooting bracket, imaginary-time flow) failed to
// converge; the message carries the diagnostic.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested tensor exceeds the memory budget.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration file problem; message names the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gplab
