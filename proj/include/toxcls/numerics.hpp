#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "toxcls/error.hpp"

namespace toxcls {

/// Numerically safe softmax: the maximum is subtracted before
/// exponentiation so large inputs cannot overflow.
inline std::vector<double> softmax(const std::vector<double>& v) {
    if (v.empty()) throw ArgumentError("softmax: empty input");
    double mx = v[0];
    for (const double x : v) {
        if (!std::isfinite(x)) throw NumericError("softmax: non-finite input");
        mx = std::max(mx, x);
    }
    std::vector<double> out(v.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - mx);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
    return out;
}

/// Central finite differences: (f(x + eps*e_i) - f(x - eps*e_i)) / (2 eps).
/// Test oracle for analytic gradients.
inline std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double eps) {
    if (eps <= 0.0) throw ArgumentError("finite_diff_gradient: eps must be positive");
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + eps;
        const double fplus = f(x);
        x[i] = xi - eps;
        const double fminus = f(x);
        x[i] = xi;
        if (!std::isfinite(fplus) || !std::isfinite(fminus))
            throw NumericError("finite_diff_gradient: objective returned a non-finite value");
        grad[i] = (fplus - fminus) / (2.0 * eps);
    }
    return grad;
}

} // namespace toxcls
