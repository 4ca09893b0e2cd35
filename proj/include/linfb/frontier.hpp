#pragma once

#include <string>
#include <utility>
#include <vector>

namespace linfb {

struct RatePair {
    double R1 = 0.0;
    double R2 = 0.0;
};

using Meta = std::vector<std::pair<std::string, std::string>>;

struct RegionFrontier {
    std::vector<RatePair> points;  // ascending R1, descending R2
    Meta meta;

    void set_meta(const std::string& key, const std::string& value);
    const std::string* find_meta(const std::string& key) const;
    RatePair max_sum_point() const;
};

// Keeps the Pareto-dominant points (ties within tol collapse), sorted by R1.
// Negative coordinates are clamped to zero.
std::vector<RatePair> pareto_filter(std::vector<RatePair> pts, double tol = 1e-12);

// Largest R2 among frontier points with R1 >= r1 - tol; -1 if none.
double staircase_r2(const RegionFrontier& f, double r1, double tol = 0.0);

// Symmetric Hausdorff distance between two point sets (Euclidean).
double hausdorff(const std::vector<RatePair>& a, const std::vector<RatePair>& b);

std::string fmt_g(double v, int digits = 12);

}  // namespace linfb
