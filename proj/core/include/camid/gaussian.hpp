#pragma once

#include <vector>

#include "camid/types.hpp"

namespace camid {

// 1-D kernel of radius ceil(4*sigma), weights exp(-t^2 / 2 sigma^2)
// normalized to sum 1. Throws ConfigError for sigma <= 0.
std::vector<double> gaussian_kernel_1d(double sigma);

// Separable Gaussian convolution with reflect (half-sample symmetric)
// borders. Each pass evaluates out = p + sum_i w_i * (p_i - p), which is the
// same quadrature as the direct weighted sum but preserves constant inputs
// bitwise.
Grid gaussian_filter(const Grid& in, double sigma);

}  // namespace camid
