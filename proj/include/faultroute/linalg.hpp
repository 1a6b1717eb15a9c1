#pragma once

#include <array>
#include <cstddef>

namespace faultroute::linalg {

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;
template <std::size_t N>
using Vector = std::array<double, N>;

/// Gaussian elimination with partial pivoting. Throws NumericalError when a
/// pivot falls below `pivot_tolerance` times the largest entry of the matrix.
Vector<4> solve(Matrix<4> a, Vector<4> b, double pivot_tolerance = 1e-13);

/// max_i |(a x - b)_i|
double residual(const Matrix<4>& a, const Vector<4>& x, const Vector<4>& b);

}  // namespace faultroute::linalg
