#pragma once

#include <cmath>
#include <functional>

#include "specv/errors.hpp"

namespace specv {

/// Adaptive Simpson quadrature on [a,b] with absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 60);

/// Fixed composite Simpson with `nodes` equally spaced evaluation points
/// (nodes must be odd, >= 3).
double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         int nodes);

namespace detail {

inline double simpson_rule(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth);

}  // namespace detail

}  // namespace specv
