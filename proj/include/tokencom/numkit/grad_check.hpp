#pragma once

#include <functional>

#include "tokencom/numkit/tensor.hpp"

namespace tokencom::numkit {

// Compares the analytic gradient of a scalar-valued function against central
// finite differences at step eps. Returns the maximum over coordinates of
// |analytic - cd| / max(|analytic|, |cd|, 1e-8). Throws std::invalid_argument
// when f does not produce a scalar or eps <= 0.
double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double eps);

}  // namespace tokencom::numkit
