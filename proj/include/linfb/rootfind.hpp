#pragma once

#include <functional>

namespace linfb {

// Bisection on [lo, hi] assuming f(lo) <= 0 < f(hi) (or the reverse).
// Runs until the bracket stops shrinking or max_iter is hit.
double bisect(const std::function<double(double)>& f, double lo, double hi, int max_iter = 200);

struct Extremum {
    double x;
    double value;
};

// Golden-section maximization of f on [lo, hi] down to interval width tol.
Extremum golden_max(const std::function<double(double)>& f, double lo, double hi,
                    double tol = 1e-10);

// Coarse grid of n points on [lo, hi] followed by golden refinement around the
// best grid point. Endpoint values are kept if they beat the refined one.
Extremum grid_golden_max(const std::function<double(double)>& f, double lo, double hi, int n,
                         double tol = 1e-10);

}  // namespace linfb
