#pragma once

// Data-parallel inner loops. Every kernel has a serial reference; the OpenMP
// path writes each output slot independently, so both produce bitwise-equal
// results and reductions run serially afterwards in index order.

#include <cstddef>
#include <span>
#include <vector>

#include "faultroute/model.hpp"

namespace faultroute {

enum class Execution { kSerial, kParallel };

namespace kernels {

/// n points with ln z evenly spaced on [ln z_floor, 0]; axis.front() == z_floor,
/// axis.back() == 1.
std::vector<double> log_uniform_axis(std::size_t n, double z_floor);

/// out[i * n + j] = sufficient drift at theta = (-ln axis[i], -ln axis[j]).
void drift_grid_serial(const NetworkParams& params, const ModeDistribution& p,
                       std::span<const double> axis, std::span<double> out);
void drift_grid_parallel(const NetworkParams& params, const ModeDistribution& p,
                         std::span<const double> axis, std::span<double> out);

inline void drift_grid(Execution exec, const NetworkParams& params, const ModeDistribution& p,
                       std::span<const double> axis, std::span<double> out) {
  if (exec == Execution::kParallel)
    drift_grid_parallel(params, p, axis, out);
  else
    drift_grid_serial(params, p, axis, out);
}

/// Index of the smallest value; ties resolve to the lowest index.
std::size_t argmin_first(std::span<const double> values);

}  // namespace kernels
}  // namespace faultroute
