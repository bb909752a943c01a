#pragma once

#include <array>
#include <span>

namespace ghostfd {

/// One-dimensional quartic interpolation weights on the 5-node stencil
/// x_0 .. x_4 at normalized offset theta = (x* - x_0)/h.
struct QuarticWeights {
    double theta = 0.0;
    std::array<double, 5> c{};
};

inline QuarticWeights quartic_value_weights(double t) {
    QuarticWeights w{t, {}};
    w.c[0] = (t - 4) * (t - 3) * (t - 2) * (t - 1) / 24.0;
    w.c[1] = -(t - 4) * (t - 3) * (t - 2) * t / 6.0;
    w.c[2] = (t - 4) * (t - 3) * (t - 1) * t / 4.0;
    w.c[3] = -(t - 4) * (t - 2) * (t - 1) * t / 6.0;
    w.c[4] = (t - 3) * (t - 2) * (t - 1) * t / 24.0;
    return w;
}

/// Weights for the first derivative: w'(x*) = (1/h) sum_p c'_p(theta) w_p.
inline QuarticWeights quartic_derivative_weights(double t) {
    QuarticWeights w{t, {}};
    w.c[0] = (2 * t - 5) * (5 - 5 * t + t * t) / 12.0;
    w.c[1] = (24 - 52 * t + 27 * t * t - 4 * t * t * t) / 6.0;
    w.c[2] = (t - 2) * (3 - 8 * t + 2 * t * t) / 2.0;
    w.c[3] = (8 - 28 * t + 21 * t * t - 4 * t * t * t) / 6.0;
    w.c[4] = (2 * t - 3) * (1 - 3 * t + t * t) / 12.0;
    return w;
}

/// Tensor-product biquartic interpolation. values[p + 5q] holds the sample at
/// stencil position (p,q), p,q in {0..4}.
inline double biquartic_eval(std::span<const double, 25> values, double tx, double ty) {
    const auto cx = quartic_value_weights(tx).c;
    const auto cy = quartic_value_weights(ty).c;
    double acc = 0.0;
    for (int q = 0; q < 5; ++q) {
        double row = 0.0;
        for (int p = 0; p < 5; ++p) row += cx[p] * values[p + 5 * q];
        acc += cy[q] * row;
    }
    return acc;
}

struct Gradient2 {
    double dx = 0.0;
    double dy = 0.0;
};

/// Gradient of the biquartic interpolant on an upwind stencil with direction
/// signs (sx,sy) and steps (rx,ry). The x-coordinate of stencil column p is
/// x_anchor + sx*rx*p*h, so d/dx carries the factor sx/(rx*h) by the chain rule
/// (and symmetrically in y).
inline Gradient2 biquartic_grad(std::span<const double, 25> values, double tx, double ty,
                                int sx, int sy, int rx, int ry, double h) {
    const auto cx = quartic_value_weights(tx).c;
    const auto cy = quartic_value_weights(ty).c;
    const auto dx = quartic_derivative_weights(tx).c;
    const auto dy = quartic_derivative_weights(ty).c;
    double sum_dx = 0.0, sum_dy = 0.0;
    for (int q = 0; q < 5; ++q) {
        for (int p = 0; p < 5; ++p) {
            const double v = values[p + 5 * q];
            sum_dx += dx[p] * cy[q] * v;
            sum_dy += cx[p] * dy[q] * v;
        }
    }
    return {sx * sum_dx / (rx * h), sy * sum_dy / (ry * h)};
}

}  // namespace ghostfd
