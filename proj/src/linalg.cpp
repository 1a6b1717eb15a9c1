#include "faultroute/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "faultroute/errors.hpp"

namespace faultroute::linalg {

Vector<4> solve(Matrix<4> a, Vector<4> b, double pivot_tolerance) {
  constexpr std::size_t n = 4;
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw NumericalError("linear solve: zero matrix");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= pivot_tolerance * scale)
      throw NumericalError("linear solve: singular matrix");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      if (m == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  Vector<4> x{};
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

double residual(const Matrix<4>& a, const Vector<4>& x, const Vector<4>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double acc = -b[i];
    for (std::size_t j = 0; j < 4; ++j) acc += a[i][j] * x[j];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

}  // namespace faultroute::linalg
