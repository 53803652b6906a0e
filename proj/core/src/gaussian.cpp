#include "camid/gaussian.hpp"

#include <cmath>

namespace camid {

namespace {

// Half-sample symmetric reflection: ..., 2, 1, 0 | 0, 1, 2, ...
int reflect_index(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

// One separable pass in the constant-preserving difference form.
void pass_rows(const Grid& in, Grid& out, const std::vector<double>& kernel) {
    const int radius = static_cast<int>(kernel.size() / 2);
    for (int r = 0; r < in.rows; ++r) {
        for (int c = 0; c < in.cols; ++c) {
            const double center = in.at(r, c);
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const double p = in.at(r, reflect_index(c + k, in.cols));
                acc += kernel[k + radius] * (p - center);
            }
            out.at(r, c) = center + acc;
        }
    }
}

void pass_cols(const Grid& in, Grid& out, const std::vector<double>& kernel) {
    const int radius = static_cast<int>(kernel.size() / 2);
    for (int r = 0; r < in.rows; ++r) {
        for (int c = 0; c < in.cols; ++c) {
            const double center = in.at(r, c);
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const double p = in.at(reflect_index(r + k, in.rows), c);
                acc += kernel[k + radius] * (p - center);
            }
            out.at(r, c) = center + acc;
        }
    }
}

}  // namespace

std::vector<double> gaussian_kernel_1d(double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("gaussian sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double w = std::exp(-(static_cast<double>(t) * t) / (2.0 * sigma * sigma));
        kernel[t + radius] = w;
        sum += w;
    }
    for (double& w : kernel) w /= sum;
    return kernel;
}

Grid gaussian_filter(const Grid& in, double sigma) {
    const std::vector<double> kernel = gaussian_kernel_1d(sigma);
    Grid tmp = Grid::zeros(in.rows, in.cols);
    Grid out = Grid::zeros(in.rows, in.cols);
    pass_rows(in, tmp, kernel);
    pass_cols(tmp, out, kernel);
    return out;
}

}  // namespace camid
