#include "linfb/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace linfb {

void RegionFrontier::set_meta(const std::string& key, const std::string& value) {
    for (auto& kv : meta)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    meta.emplace_back(key, value);
}

const std::string* RegionFrontier::find_meta(const std::string& key) const {
    for (const auto& kv : meta)
        if (kv.first == key) return &kv.second;
    return nullptr;
}

RatePair RegionFrontier::max_sum_point() const {
    RatePair best{};
    double s = -1.0;
    for (const auto& p : points)
        if (p.R1 + p.R2 > s) {
            s = p.R1 + p.R2;
            best = p;
        }
    return best;
}

std::vector<RatePair> pareto_filter(std::vector<RatePair> pts, double tol) {
    for (auto& p : pts) {
        p.R1 = std::max(0.0, p.R1);
        p.R2 = std::max(0.0, p.R2);
    }
    std::sort(pts.begin(), pts.end(), [](const RatePair& a, const RatePair& b) {
        return a.R1 != b.R1 ? a.R1 > b.R1 : a.R2 > b.R2;
    });
    std::vector<RatePair> out;
    double best_r2 = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts)
        if (p.R2 > best_r2 + tol) {
            out.push_back(p);
            best_r2 = p.R2;
        }
    std::reverse(out.begin(), out.end());
    return out;
}

double staircase_r2(const RegionFrontier& f, double r1, double tol) {
    double best = -1.0;
    for (const auto& p : f.points)
        if (p.R1 >= r1 - tol) best = std::max(best, p.R2);
    return best;
}

namespace {

double directed(const std::vector<RatePair>& a, const std::vector<RatePair>& b) {
    double worst = 0.0;
    for (const auto& p : a) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& q : b) d = std::min(d, std::hypot(p.R1 - q.R1, p.R2 - q.R2));
        worst = std::max(worst, d);
    }
    return worst;
}

}  // namespace

double hausdorff(const std::vector<RatePair>& a, const std::vector<RatePair>& b) {
    if (a.empty() || b.empty())
        return a.empty() && b.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    return std::max(directed(a, b), directed(b, a));
}

std::string fmt_g(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace linfb
