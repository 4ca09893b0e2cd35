#pragma once

#include <Eigen/Dense>

#include "linfb/mimo_regions.hpp"
#include "linfb/rng.hpp"

namespace linfb {

using Vector = Eigen::VectorXd;

struct BcBlockSample {
    Vector U, Z1, Z2, X, Y1, Y2;
};

struct MacBlockSample {
    Vector U1, U2, Z, X1, X2, Y;
};

// Feedback-of-outputs encoder: X = (I - A1 H1B - A2 H2B) U + A1 Y1 + A2 Y2,
// evaluated one sub-block at a time.
BcBlockSample simulate_bc_block(const BlockTriangularSet& A1, const BlockTriangularSet& A2,
                                const ChannelSpec& spec, const Vector& U, const Vector& Z1,
                                const Vector& Z2);

// Feedback-of-noises encoder: X_t = U_t + sum_{tau<t} B1 Z1_tau + B2 Z2_tau,
// with each noise recovered from the fed-back output.
BcBlockSample simulate_bc_block_noise_form(const BlockTriangularSet& B1,
                                           const BlockTriangularSet& B2, const ChannelSpec& spec,
                                           const Vector& U, const Vector& Z1, const Vector& Z2);

BcBlockSample draw_bc_block(const BlockTriangularSet& A1, const BlockTriangularSet& A2,
                            const ChannelSpec& spec, GaussianSampler& rng);

// X_i = Q_i^{-1} U_i + C_i Y evaluated one sub-block at a time; Q_i from the
// induced D-form design.
MacBlockSample simulate_mac_block(const BlockTriangularSet& C1, const BlockTriangularSet& C2,
                                  const ChannelSpec& spec, const Vector& U1, const Vector& U2,
                                  const Vector& Z);

MacBlockSample draw_mac_block(const BlockTriangularSet& C1, const BlockTriangularSet& C2,
                              const ChannelSpec& spec, GaussianSampler& rng);

struct PowerReport {
    double empirical = 0.0;         // mean of |X1|^2 + |X2|^2
    double analytic = 0.0;          // tr K1 + tr K2 + tr D1 D1^T + tr D2 D2^T
    double covariance_algebra = 0.0;  // exact second moment from the closed form
    double std_error = 0.0;
    double gap = 0.0;  // |empirical - analytic|
    double relative_gap = 0.0;
    long trials = 0;
    bool pass = false;  // gap < 3 std_error
};

// MAC forms (C/D): U_i ~ N(0, K_i), checks E|X1|^2 + E|X2|^2 against
// tr K1 + tr K2 + tr D1 D1^T + tr D2 D2^T. BC forms (A/B): U ~ N(0, K1),
// checks E|X|^2 against tr K + tr B1 B1^T + tr B2 B2^T.
// Empty covariances default to (budget / total input dim) * I.
PowerReport verify_power_lemma(const FeedbackDesign& design, const ChannelSpec& spec, long trials,
                               const RngSpec& rng, const DenseMatrix& K1 = {},
                               const DenseMatrix& K2 = {});

// Pairwise (cascade) sum.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace linfb
