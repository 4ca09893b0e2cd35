#include "linfb/siso_capacity.hpp"

#include <algorithm>
#include <cmath>

#include "linfb/errors.hpp"
#include "linfb/parallel.hpp"
#include "linfb/rootfind.hpp"

namespace linfb {

double half_log2_1p(double x) { return 0.5 * std::log1p(x) / std::log(2.0); }

double rho_star_lhs(double h1, double h2, double P1, double P2, double rho) {
    const double a = h1 * h1 * P1, b = h2 * h2 * P2;
    return 1.0 + a + b + 2.0 * std::sqrt(a * b) * rho;
}

double rho_star_residual(double h1, double h2, double P1, double P2, double rho) {
    const double a = h1 * h1 * P1, b = h2 * h2 * P2;
    const double q = 1.0 - rho * rho;
    return rho_star_lhs(h1, h2, P1, P2, rho) - (1.0 + a * q) * (1.0 + b * q);
}

double rho_star(double h1, double h2, double P1, double P2) {
    const double a = h1 * h1 * P1, b = h2 * h2 * P2;
    if (!(a > 0.0) || !(b > 0.0)) return 0.0;
    auto g = [&](double r) { return rho_star_residual(h1, h2, P1, P2, r); };
    double r = bisect(g, 0.0, 1.0, 200);
    // one Newton step; kept only if it lowers the residual
    const double q = 1.0 - r * r;
    const double dg = 2.0 * std::sqrt(a * b) + 2.0 * r * (a * (1.0 + b * q) + b * (1.0 + a * q));
    if (dg > 0.0) {
        const double rn = r - g(r) / dg;
        if (rn >= 0.0 && rn <= 1.0 && std::abs(g(rn)) < std::abs(g(r))) r = rn;
    }
    return r;
}

PentagonBounds ozarow_bounds(double h1, double h2, double P1, double P2, double rho) {
    const double a = h1 * h1 * P1, b = h2 * h2 * P2;
    const double q = 1.0 - rho * rho;
    return {half_log2_1p(a * q), half_log2_1p(b * q),
            half_log2_1p(a + b + 2.0 * std::sqrt(a * b) * rho)};
}

std::vector<RatePair> pentagon_corners(const PentagonBounds& b) {
    const double c1 = std::min(b.r1, b.sum), c2 = std::min(b.r2, b.sum);
    return {{c1, 0.0},
            {c1, std::max(0.0, std::min(c2, b.sum - c1))},
            {std::max(0.0, std::min(c1, b.sum - c2)), c2},
            {0.0, c2}};
}

namespace {

void check_rho(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("rho", "must lie in [0,1]");
}

void check_power(double P) {
    if (!(P > 0.0) || !std::isfinite(P)) throw ValidationError("power", "must be positive");
}

void check_grid(int n, const char* name) {
    if (n < 2) throw ValidationError(name, "grid needs at least 2 points");
}

// Split k of n: (P1, P2) with 1 - alpha formed from the complementary index
// so that splits k and n-1-k are exact mirrors.
std::pair<double, double> split(double P, int k, int n) {
    const double d = static_cast<double>(n - 1);
    return {P * (k / d), P * ((n - 1 - k) / d)};
}

std::vector<double> unit_grid(int n) {
    std::vector<double> g(n);
    for (int j = 0; j < n; ++j) g[j] = static_cast<double>(j) / (n - 1);
    return g;
}

RegionFrontier collect(std::vector<std::vector<RatePair>>& slots) {
    std::vector<RatePair> all;
    for (auto& s : slots) all.insert(all.end(), s.begin(), s.end());
    RegionFrontier f;
    f.points = pareto_filter(std::move(all));
    return f;
}

}  // namespace

RegionFrontier ozarow_pentagon(double h1, double h2, double P1, double P2, double rho) {
    check_rho(rho);
    RegionFrontier f;
    f.points = pareto_filter(pentagon_corners(ozarow_bounds(h1, h2, P1, P2, rho)));
    f.set_meta("rho", fmt_g(rho));
    return f;
}

RegionFrontier mac_siso_region(double h1, double h2, double P, int alpha_grid, int rho_grid) {
    check_power(P);
    check_grid(alpha_grid, "alpha-grid");
    check_grid(rho_grid, "rho-grid");
    const auto rhos = unit_grid(rho_grid);
    std::vector<std::vector<RatePair>> slots(alpha_grid);
    parallel_for(alpha_grid, [&](std::size_t k) {
        const auto [P1, P2] = split(P, static_cast<int>(k), alpha_grid);
        auto local = rhos;
        local.push_back(rho_star(h1, h2, P1, P2));
        for (double r : local) {
            const auto c = pentagon_corners(ozarow_bounds(h1, h2, P1, P2, r));
            slots[k].insert(slots[k].end(), c.begin(), c.end());
        }
    });
    RegionFrontier f = collect(slots);
    f.set_meta("model", "siso");
    f.set_meta("h1", fmt_g(h1));
    f.set_meta("h2", fmt_g(h2));
    f.set_meta("power", fmt_g(P));
    f.set_meta("alpha_grid", std::to_string(alpha_grid));
    f.set_meta("rho_grid", std::to_string(rho_grid));
    return f;
}

RegionFrontier mac_siso_nofb_region(double h1, double h2, double P, int alpha_grid) {
    check_power(P);
    check_grid(alpha_grid, "alpha-grid");
    std::vector<std::vector<RatePair>> slots(alpha_grid);
    for (int k = 0; k < alpha_grid; ++k) {
        const auto [P1, P2] = split(P, k, alpha_grid);
        slots[k] = pentagon_corners(ozarow_bounds(h1, h2, P1, P2, 0.0));
    }
    RegionFrontier f = collect(slots);
    f.set_meta("model", "siso-nofb");
    f.set_meta("alpha_grid", std::to_string(alpha_grid));
    return f;
}

double mac_siso_sum_rate_at(double h1, double h2, double P, double alpha) {
    const double P1 = alpha * P, P2 = (1.0 - alpha) * P;
    return ozarow_bounds(h1, h2, P1, P2, rho_star(h1, h2, P1, P2)).sum;
}

double mac_siso_sum_capacity(double h1, double h2, double P) {
    check_power(P);
    auto f = [&](double a) { return mac_siso_sum_rate_at(h1, h2, P, a); };
    return grid_golden_max(f, 0.0, 1.0, 129, 1e-10).value;
}

double symmetric_sum_capacity(double h, double P) {
    check_power(P);
    return half_log2_1p(h * h * P * (1.0 + rho_star(h, h, P / 2, P / 2)));
}

double zeta(double alpha, double h, double P) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha", "must lie in [0,1]");
    const double beta = 1.0 - alpha;
    return std::sqrt(alpha * beta) * rho_star(h, h, alpha * P, beta * P);
}

double vector_norm(const std::vector<double>& v, const char* name) {
    double s = 0.0;
    for (double x : v) s += x * x;
    if (v.empty() || !(s > 0.0)) throw ZeroVector(std::string(name) + " is the zero vector");
    return std::sqrt(s);
}

RegionFrontier miso_mac_region(const std::vector<double>& h1vec, const std::vector<double>& h2vec,
                               double P, int alpha_grid, int rho_grid) {
    RegionFrontier f = mac_siso_region(vector_norm(h1vec, "h1"), vector_norm(h2vec, "h2"), P,
                                       alpha_grid, rho_grid);
    f.set_meta("model", "miso");
    return f;
}

PentagonBounds jafar_bounds(double g1, double g2, double P1, double P2, double rho, double beta) {
    const double a = g1 * g1 * P1, b = g2 * g2 * P2;
    const double q = 1.0 - rho * rho;
    return {half_log2_1p(a * q), half_log2_1p(b * q),
            half_log2_1p(a + b + 2.0 * rho * beta * std::sqrt(a * b) + a * b * q * (1.0 - beta * beta))};
}

RegionFrontier simo_mac_region(const std::vector<double>& h1vec, const std::vector<double>& h2vec,
                               double P, int alpha_grid, int rho_grid, int beta_grid) {
    const double g1 = vector_norm(h1vec, "h1"), g2 = vector_norm(h2vec, "h2");
    check_power(P);
    check_grid(alpha_grid, "alpha-grid");
    check_grid(rho_grid, "rho-grid");
    check_grid(beta_grid, "beta-grid");
    const auto rhos = unit_grid(rho_grid);
    std::vector<double> betas(beta_grid);
    for (int j = 0; j < beta_grid; ++j)
        betas[j] = -1.0 + 2.0 * static_cast<double>(j) / (beta_grid - 1);
    std::vector<std::vector<RatePair>> slots(alpha_grid);
    parallel_for(alpha_grid, [&](std::size_t k) {
        const auto [P1, P2] = split(P, static_cast<int>(k), alpha_grid);
        const double ab = g1 * g1 * P1 * g2 * g2 * P2;
        auto local_rho = rhos;
        local_rho.push_back(rho_star(g1, g2, P1, P2));
        for (double r : local_rho) {
            auto local_beta = betas;
            // sum-bound maximizer in beta for this rho
            const double den = std::sqrt(ab) * (1.0 - r * r);
            local_beta.push_back(den > 0.0 ? std::clamp(r / den, -1.0, 1.0) : 1.0);
            for (double be : local_beta) {
                const auto c = pentagon_corners(jafar_bounds(g1, g2, P1, P2, r, be));
                slots[k].insert(slots[k].end(), c.begin(), c.end());
            }
        }
    });
    RegionFrontier f = collect(slots);
    f.set_meta("model", "simo");
    f.set_meta("h1_norm", fmt_g(g1));
    f.set_meta("h2_norm", fmt_g(g2));
    f.set_meta("power", fmt_g(P));
    f.set_meta("alpha_grid", std::to_string(alpha_grid));
    f.set_meta("rho_grid", std::to_string(rho_grid));
    f.set_meta("beta_grid", std::to_string(beta_grid));
    return f;
}

PhiVariant parse_phi_variant(const std::string& s) {
    if (s == "printed") return PhiVariant::printed;
    if (s == "exponent-K" || s == "exponent-k") return PhiVariant::exponent_k;
    throw ValidationError("variant", "expected printed or exponent-K, got '" + s + "'");
}

std::string to_string(PhiVariant v) {
    return v == PhiVariant::printed ? "printed" : "exponent-K";
}

double phi_residual(int K, double P, double phi, PhiVariant variant) {
    const double lhs = (K - 1) * std::log1p(P * phi);
    const double inner = std::log1p((P / K) * phi * (K - phi));
    return lhs - (variant == PhiVariant::printed ? inner : K * inner);
}

double phi_k(int K, double P, PhiVariant variant) {
    if (K < 2) throw ValidationError("k", "must be >= 2");
    check_power(P);
    auto f = [&](double phi) { return phi_residual(K, P, phi, variant); };
    const double f_lo = f(1.0), f_hi = f(static_cast<double>(K));
    if (f_lo == 0.0) return 1.0;
    if (f_hi == 0.0) return K;
    if ((f_lo < 0.0) == (f_hi < 0.0))
        throw NoRootInInterval("phi_k(" + to_string(variant) + "): residual has no sign change on [1," +
                               std::to_string(K) + "] (f(1)=" + fmt_g(f_lo) +
                               ", f(K)=" + fmt_g(f_hi) + ")");
    return bisect(f, 1.0, static_cast<double>(K), 200);
}

double k_user_symmetric_sum_capacity(int K, double P, PhiVariant variant) {
    return half_log2_1p(P * phi_k(K, P, variant));
}

RegionFrontier nofb_bc_siso_region(double h1, double h2, double P, int grid) {
    check_power(P);
    check_grid(grid, "grid");
    const bool one_strong = std::abs(h1) >= std::abs(h2);
    const double g2 = std::max(h1 * h1, h2 * h2), w2 = std::min(h1 * h1, h2 * h2);
    std::vector<RatePair> pts;
    for (int k = 0; k < grid; ++k) {
        const auto [ps, pw] = split(P, k, grid);
        const double rs = half_log2_1p(g2 * ps);
        const double rw = half_log2_1p(w2 * pw / (1.0 + w2 * ps));
        pts.push_back(one_strong ? RatePair{rs, rw} : RatePair{rw, rs});
    }
    RegionFrontier f;
    f.points = pareto_filter(std::move(pts));
    f.set_meta("model", "bc-nofb-superposition");
    f.set_meta("grid", std::to_string(grid));
    return f;
}

namespace {

// Best R2 at a fixed split given R1 >= r1; -1 if infeasible.
double best_r2_fixed_split(double h1, double h2, double P1, double P2, double r1) {
    const double a = h1 * h1 * P1;
    const double need = std::exp2(2.0 * r1) - 1.0;
    if (need > a * (1.0 + 1e-15) + 1e-300) return -1.0;
    const double rho_max = a > 0.0 ? std::sqrt(std::max(0.0, 1.0 - need / a)) : 0.0;
    auto value = [&](double r) {
        const auto bd = ozarow_bounds(h1, h2, P1, P2, r);
        return std::min(bd.r2, bd.sum - r1);
    };
    // r2 bound falls in rho, sum bound rises: maximize the min at the crossing
    auto gap = [&](double r) {
        const auto bd = ozarow_bounds(h1, h2, P1, P2, r);
        return (bd.sum - r1) - bd.r2;
    };
    double r_opt;
    if (gap(0.0) >= 0.0)
        r_opt = 0.0;
    else if (gap(rho_max) <= 0.0)
        r_opt = rho_max;
    else
        r_opt = bisect(gap, 0.0, rho_max, 200);
    return value(r_opt);
}

}  // namespace

double mac_siso_max_r2_given_r1(double h1, double h2, double P, double r1) {
    check_power(P);
    auto f = [&](double alpha) {
        return best_r2_fixed_split(h1, h2, alpha * P, (1.0 - alpha) * P, r1);
    };
    return grid_golden_max(f, 0.0, 1.0, 513, 1e-12).value;
}

}  // namespace linfb
