#pragma once

#include <functional>

#include "qdx/common.hpp"

namespace qdx {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
    int panels = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-6;
    double abs_tol = 0.0;   // secondary floor; 0 disables
    int max_depth = 40;
    int max_panels = 200000;
};

// Globally adaptive Gauss-Kronrod 7/15: always split the panel with the largest
// error until the summed error estimate meets rel_tol * |integral| (or abs_tol).
// Throws GridTooCoarse when the panel budget or depth cap is exhausted first.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opt = {});

}  // namespace qdx
