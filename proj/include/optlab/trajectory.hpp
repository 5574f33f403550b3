#pragma once

#include <cstdint>

#include "optlab/optim.hpp"

namespace optlab {

// One logged row. Row k describes x^(k); step statistics are those of the
// step that produced it (zero for k = 0).
struct TrajectoryRecord {
  std::int64_t k = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double step_min = 0.0;
  double step_max = 0.0;
  double step_mean = 0.0;
  double delta_norm = 0.0;
  double adaptive_fraction = 0.0;
  Vector x;
};

}  // namespace optlab
