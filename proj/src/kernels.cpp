#include "faultroute/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "faultroute/stability.hpp"

namespace faultroute::kernels {

std::vector<double> log_uniform_axis(std::size_t n, double z_floor) {
  if (n < 2) throw std::invalid_argument("axis needs at least two points");
  if (!(z_floor > 0.0 && z_floor < 1.0)) throw std::invalid_argument("z_floor must lie in (0, 1)");
  std::vector<double> axis(n);
  const double lo = std::log(z_floor);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    axis[i] = std::exp(lo * (1.0 - t));
  }
  axis.front() = z_floor;
  axis.back() = 1.0;
  return axis;
}

namespace {

void check_sizes(std::span<const double> axis, std::span<double> out) {
  if (out.size() != axis.size() * axis.size()) throw std::invalid_argument("drift grid: output size mismatch");
}

std::vector<double> thetas(std::span<const double> axis) {
  std::vector<double> t(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) t[i] = axis[i] >= 1.0 ? 0.0 : -std::log(axis[i]);
  return t;
}

}  // namespace

void drift_grid_serial(const NetworkParams& params, const ModeDistribution& p,
                       std::span<const double> axis, std::span<double> out) {
  check_sizes(axis, out);
  const auto t = thetas(axis);
  const std::size_t n = axis.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = sufficient_value(params, p, {t[i], t[j]});
}

void drift_grid_parallel(const NetworkParams& params, const ModeDistribution& p,
                         std::span<const double> axis, std::span<double> out) {
  check_sizes(axis, out);
  const auto t = thetas(axis);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(axis.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = 0; j < n; ++j)
      out[static_cast<std::size_t>(i * n + j)] =
          sufficient_value(params, p, {t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)]});
}

std::size_t argmin_first(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmin of empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  return best;
}

}  // namespace faultroute::kernels
