#pragma once

#include <string>
#include <vector>

#include "linfb/frontier.hpp"

namespace linfb {

// 0.5 * log2(1 + x)
double half_log2_1p(double x);

// Root in [0,1] of Ozarow's quartic; 0 when h1*h2*P1*P2 == 0.
double rho_star(double h1, double h2, double P1, double P2);

// LHS - RHS of the quartic at rho, and the LHS alone.
double rho_star_residual(double h1, double h2, double P1, double P2, double rho);
double rho_star_lhs(double h1, double h2, double P1, double P2, double rho);

struct PentagonBounds {
    double r1;
    double r2;
    double sum;
};

PentagonBounds ozarow_bounds(double h1, double h2, double P1, double P2, double rho);

// Corner points (including axis points) of the polymatroid {R1<=r1, R2<=r2, R1+R2<=sum}.
std::vector<RatePair> pentagon_corners(const PentagonBounds& b);

RegionFrontier ozarow_pentagon(double h1, double h2, double P1, double P2, double rho);

struct SisoGrids {
    int alpha = 101;
    int rho = 101;
    int beta = 41;
};

// Union over power splits and rho of Ozarow pentagons. Each split's rho grid
// is augmented with that split's rho*.
RegionFrontier mac_siso_region(double h1, double h2, double P, int alpha_grid, int rho_grid);

// Same union with rho pinned to 0: the no-feedback sum-power MAC.
RegionFrontier mac_siso_nofb_region(double h1, double h2, double P, int alpha_grid);

double mac_siso_sum_capacity(double h1, double h2, double P);
double mac_siso_sum_rate_at(double h1, double h2, double P, double alpha);

double symmetric_sum_capacity(double h, double P);

double zeta(double alpha, double h, double P);

double vector_norm(const std::vector<double>& v, const char* name);

RegionFrontier miso_mac_region(const std::vector<double>& h1vec, const std::vector<double>& h2vec,
                               double P, int alpha_grid, int rho_grid);

PentagonBounds jafar_bounds(double g1, double g2, double P1, double P2, double rho, double beta);

RegionFrontier simo_mac_region(const std::vector<double>& h1vec, const std::vector<double>& h2vec,
                               double P, int alpha_grid, int rho_grid, int beta_grid);

enum class PhiVariant { printed, exponent_k };

PhiVariant parse_phi_variant(const std::string& s);
std::string to_string(PhiVariant v);

// Log-domain residual of the fixed-point equation at phi.
double phi_residual(int K, double P, double phi, PhiVariant variant);

double phi_k(int K, double P, PhiVariant variant);

// P is the effective h^2 * P product.
double k_user_symmetric_sum_capacity(int K, double P, PhiVariant variant);

// Superposition coding region of the degraded BC without feedback.
RegionFrontier nofb_bc_siso_region(double h1, double h2, double P, int grid);

// Largest R2 such that (r1, R2) lies in the union of Ozarow pentagons over
// all power splits and rho. Returns -1 when r1 is not achievable.
double mac_siso_max_r2_given_r1(double h1, double h2, double P, double r1);

}  // namespace linfb
