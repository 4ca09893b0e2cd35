#include "linfb/rootfind.hpp"

#include <algorithm>
#include <cmath>

namespace linfb {

double bisect(const std::function<double(double)>& f, double lo, double hi, int max_iter) {
    const bool rising = f(lo) <= 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if ((fm <= 0.0) == rising)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Extremum golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        if (x1 >= x2) break;
    }
    return f1 >= f2 ? Extremum{x1, f1} : Extremum{x2, f2};
}

Extremum grid_golden_max(const std::function<double(double)>& f, double lo, double hi, int n,
                         double tol) {
    n = std::max(n, 2);
    int best = 0;
    double best_v = f(lo);
    for (int k = 1; k < n; ++k) {
        const double x = lo + (hi - lo) * k / (n - 1);
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best = k;
        }
    }
    const double h = (hi - lo) / (n - 1);
    const double a = std::max(lo, lo + h * (best - 1));
    const double b = std::min(hi, lo + h * (best + 1));
    Extremum e = golden_max(f, a, b, tol);
    const double xb = lo + h * best;
    if (best_v > e.value) e = {xb, best_v};
    return e;
}

}  // namespace linfb
