#include "linfb/simkit.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "linfb/errors.hpp"
#include "linfb/parallel.hpp"

namespace linfb {

namespace {

void check_len(const Vector& v, Eigen::Index n, const char* name) {
    if (v.size() != n)
        throw DimensionMismatch(std::string(name) + " has length " + std::to_string(v.size()) +
                                ", expected " + std::to_string(n));
}

void check_bc(const BlockTriangularSet& X1, const BlockTriangularSet& X2, const ChannelSpec& s) {
    if (X1.eta() != X2.eta() || X1.block_rows() != s.kappa() || X2.block_rows() != s.kappa() ||
        X1.block_cols() != s.nu1() || X2.block_cols() != s.nu2())
        throw DimensionMismatch("BC design blocks must be kappa x nu_i");
}

void check_mac(const BlockTriangularSet& X1, const BlockTriangularSet& X2, const ChannelSpec& s) {
    if (X1.eta() != X2.eta() || X1.block_cols() != s.kappa() || X2.block_cols() != s.kappa() ||
        X1.block_rows() != s.nu1() || X2.block_rows() != s.nu2())
        throw DimensionMismatch("MAC design blocks must be nu_i x kappa");
}

// Spectral square root of a PSD matrix, tolerant of zero eigenvalues.
DenseMatrix psd_factor(const DenseMatrix& K) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (K + K.transpose()));
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

}  // namespace

BcBlockSample simulate_bc_block(const BlockTriangularSet& A1, const BlockTriangularSet& A2,
                                const ChannelSpec& spec, const Vector& U, const Vector& Z1,
                                const Vector& Z2) {
    check_bc(A1, A2, spec);
    const int eta = A1.eta(), k = spec.kappa(), n1 = spec.nu1(), n2 = spec.nu2();
    check_len(U, eta * k, "U");
    check_len(Z1, eta * n1, "Z1");
    check_len(Z2, eta * n2, "Z2");
    const DenseMatrix T = DenseMatrix::Identity(eta * k, eta * k) -
                          A1.materialize() * lifted(spec.H1, eta) -
                          A2.materialize() * lifted(spec.H2, eta);
    const Vector pre = T * U;  // the codeword is known ahead of the block
    BcBlockSample s{U, Z1, Z2, Vector::Zero(eta * k), Vector::Zero(eta * n1), Vector::Zero(eta * n2)};
    for (int t = 1; t <= eta; ++t) {
        Vector x = pre.segment((t - 1) * k, k);
        for (int tau = 1; tau < t; ++tau) {
            x += A1.block(t, tau) * s.Y1.segment((tau - 1) * n1, n1);
            x += A2.block(t, tau) * s.Y2.segment((tau - 1) * n2, n2);
        }
        s.X.segment((t - 1) * k, k) = x;
        s.Y1.segment((t - 1) * n1, n1) = spec.H1 * x + Z1.segment((t - 1) * n1, n1);
        s.Y2.segment((t - 1) * n2, n2) = spec.H2 * x + Z2.segment((t - 1) * n2, n2);
    }
    return s;
}

BcBlockSample simulate_bc_block_noise_form(const BlockTriangularSet& B1,
                                           const BlockTriangularSet& B2, const ChannelSpec& spec,
                                           const Vector& U, const Vector& Z1, const Vector& Z2) {
    check_bc(B1, B2, spec);
    const int eta = B1.eta(), k = spec.kappa(), n1 = spec.nu1(), n2 = spec.nu2();
    check_len(U, eta * k, "U");
    check_len(Z1, eta * n1, "Z1");
    check_len(Z2, eta * n2, "Z2");
    BcBlockSample s{U, Z1, Z2, Vector::Zero(eta * k), Vector::Zero(eta * n1), Vector::Zero(eta * n2)};
    Vector z1hat = Vector::Zero(eta * n1), z2hat = Vector::Zero(eta * n2);
    for (int t = 1; t <= eta; ++t) {
        Vector x = U.segment((t - 1) * k, k);
        for (int tau = 1; tau < t; ++tau) {
            x += B1.block(t, tau) * z1hat.segment((tau - 1) * n1, n1);
            x += B2.block(t, tau) * z2hat.segment((tau - 1) * n2, n2);
        }
        s.X.segment((t - 1) * k, k) = x;
        const Vector y1 = spec.H1 * x + Z1.segment((t - 1) * n1, n1);
        const Vector y2 = spec.H2 * x + Z2.segment((t - 1) * n2, n2);
        s.Y1.segment((t - 1) * n1, n1) = y1;
        s.Y2.segment((t - 1) * n2, n2) = y2;
        // the transmitter knows x, so feedback reveals the noise
        z1hat.segment((t - 1) * n1, n1) = y1 - spec.H1 * x;
        z2hat.segment((t - 1) * n2, n2) = y2 - spec.H2 * x;
    }
    return s;
}

BcBlockSample draw_bc_block(const BlockTriangularSet& A1, const BlockTriangularSet& A2,
                            const ChannelSpec& spec, GaussianSampler& rng) {
    const int eta = A1.eta();
    const Vector U = rng.normal_matrix(eta * spec.kappa(), 1);
    const Vector Z1 = rng.normal_matrix(eta * spec.nu1(), 1);
    const Vector Z2 = rng.normal_matrix(eta * spec.nu2(), 1);
    return simulate_bc_block(A1, A2, spec, U, Z1, Z2);
}

namespace {

struct MacPrecoders {
    DenseMatrix Q1inv;
    DenseMatrix Q2inv;
};

MacPrecoders mac_precoders(const BlockTriangularSet& C1, const BlockTriangularSet& C2,
                           const ChannelSpec& spec) {
    const int eta = C1.eta();
    const DenseMatrix H1t = lifted_t(spec.H1, eta), H2t = lifted_t(spec.H2, eta);
    const auto D = omega_tilde(C1, C2, H1t, H2t);
    const auto [M1, M2] = mac_M_matrices(D.first, D.second, H1t, H2t);
    const DenseMatrix Q1 = psd_sqrt(M1), Q2 = psd_sqrt(M2);
    return {Q1.llt().solve(DenseMatrix::Identity(Q1.rows(), Q1.cols())),
            Q2.llt().solve(DenseMatrix::Identity(Q2.rows(), Q2.cols()))};
}

MacBlockSample run_mac(const BlockTriangularSet& C1, const BlockTriangularSet& C2,
                       const ChannelSpec& spec, const MacPrecoders& pc, const Vector& U1,
                       const Vector& U2, const Vector& Z) {
    const int eta = C1.eta(), k = spec.kappa(), n1 = spec.nu1(), n2 = spec.nu2();
    check_len(U1, eta * n1, "U1");
    check_len(U2, eta * n2, "U2");
    check_len(Z, eta * k, "Z");
    const Vector V1 = pc.Q1inv * U1, V2 = pc.Q2inv * U2;
    MacBlockSample s{U1, U2, Z, Vector::Zero(eta * n1), Vector::Zero(eta * n2), Vector::Zero(eta * k)};
    for (int t = 1; t <= eta; ++t) {
        Vector x1 = V1.segment((t - 1) * n1, n1), x2 = V2.segment((t - 1) * n2, n2);
        for (int tau = 1; tau < t; ++tau) {
            const auto y = s.Y.segment((tau - 1) * k, k);
            x1 += C1.block(t, tau) * y;
            x2 += C2.block(t, tau) * y;
        }
        s.X1.segment((t - 1) * n1, n1) = x1;
        s.X2.segment((t - 1) * n2, n2) = x2;
        s.Y.segment((t - 1) * k, k) =
            spec.H1.transpose() * x1 + spec.H2.transpose() * x2 + Z.segment((t - 1) * k, k);
    }
    return s;
}

}  // namespace

MacBlockSample simulate_mac_block(const BlockTriangularSet& C1, const BlockTriangularSet& C2,
                                  const ChannelSpec& spec, const Vector& U1, const Vector& U2,
                                  const Vector& Z) {
    check_mac(C1, C2, spec);
    return run_mac(C1, C2, spec, mac_precoders(C1, C2, spec), U1, U2, Z);
}

MacBlockSample draw_mac_block(const BlockTriangularSet& C1, const BlockTriangularSet& C2,
                              const ChannelSpec& spec, GaussianSampler& rng) {
    const int eta = C1.eta();
    const Vector U1 = rng.normal_matrix(eta * spec.nu1(), 1);
    const Vector U2 = rng.normal_matrix(eta * spec.nu2(), 1);
    const Vector Z = rng.normal_matrix(eta * spec.kappa(), 1);
    return simulate_mac_block(C1, C2, spec, U1, U2, Z);
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

namespace {

PowerReport summarize(std::vector<double>& vals, PowerReport rep) {
    const double n = static_cast<double>(vals.size());
    rep.trials = static_cast<long>(vals.size());
    rep.empirical = pairwise_sum(vals.data(), vals.size()) / n;
    for (double& v : vals) v = (v - rep.empirical) * (v - rep.empirical);
    const double var = pairwise_sum(vals.data(), vals.size()) / (n - 1.0);
    rep.std_error = std::sqrt(var / n);
    rep.gap = std::abs(rep.empirical - rep.analytic);
    rep.relative_gap = rep.analytic > 0.0 ? rep.gap / rep.analytic : rep.gap;
    rep.pass = rep.gap < 3.0 * rep.std_error || rep.gap == 0.0;
    return rep;
}

constexpr long kChunk = 4096;

PowerReport verify_power_bc(const FeedbackDesign& design, const ChannelSpec& spec, long trials,
                            const RngSpec& rng, const DenseMatrix& Kin) {
    const FeedbackDesign d = to_noise_form(design, spec);
    const int eta = d.eta, n = eta * spec.kappa();
    const auto A = omega_inv(d.M1, d.M2, lifted(spec.H1, eta), lifted(spec.H2, eta));
    const double budget = eta * spec.P - d.trace_cost();
    if (budget < 0.0) throw InfeasibleBudget("design exceeds eta*P");
    const DenseMatrix K = Kin.size() ? Kin : DenseMatrix((budget / n) * DenseMatrix::Identity(n, n));
    if (K.rows() != n) throw DimensionMismatch("verify_power_lemma: covariance dims");
    const DenseMatrix b1 = d.M1.materialize(), b2 = d.M2.materialize();
    PowerReport rep;
    rep.analytic = K.trace() + b1.squaredNorm() + b2.squaredNorm();
    // X = U + B1 Z1 + B2 Z2 with independent terms
    rep.covariance_algebra = K.trace() + (b1 * b1.transpose()).trace() + (b2 * b2.transpose()).trace();
    const DenseMatrix L = psd_factor(K);
    const long chunks = (trials + kChunk - 1) / kChunk;
    std::vector<double> vals(trials);
    parallel_for(chunks, [&](std::size_t c) {
        GaussianSampler g({rng.seed, rng.stream + "/chunk" + std::to_string(c)});
        const long lo = static_cast<long>(c) * kChunk, hi = std::min(trials, lo + kChunk);
        for (long t = lo; t < hi; ++t) {
            const Vector U = L * g.normal_matrix(n, 1);
            const Vector Z1 = g.normal_matrix(eta * spec.nu1(), 1);
            const Vector Z2 = g.normal_matrix(eta * spec.nu2(), 1);
            vals[t] = simulate_bc_block(A.first, A.second, spec, U, Z1, Z2).X.squaredNorm();
        }
    });
    return summarize(vals, rep);
}

}  // namespace

PowerReport verify_power_lemma(const FeedbackDesign& design, const ChannelSpec& spec, long trials,
                               const RngSpec& rng, const DenseMatrix& K1in, const DenseMatrix& K2in) {
    if (trials < 2) throw ValidationError("trials", "need at least 2 trials");
    if (design.form == Form::A || design.form == Form::B)
        return verify_power_bc(design, spec, trials, rng, K1in);
    const FeedbackDesign d = to_noise_form(design, spec);
    const int eta = d.eta;
    const DenseMatrix H1t = lifted_t(spec.H1, eta), H2t = lifted_t(spec.H2, eta);
    const auto C = omega_tilde_inv(d.M1, d.M2, H1t, H2t);
    const int n1 = eta * spec.nu1(), n2 = eta * spec.nu2();

    const double budget = eta * spec.P - d.trace_cost();
    if (budget < 0.0) throw InfeasibleBudget("design exceeds eta*P");
    const double s = budget / static_cast<double>(n1 + n2);
    const DenseMatrix K1 = K1in.size() ? K1in : DenseMatrix(s * DenseMatrix::Identity(n1, n1));
    const DenseMatrix K2 = K2in.size() ? K2in : DenseMatrix(s * DenseMatrix::Identity(n2, n2));
    if (K1.rows() != n1 || K2.rows() != n2)
        throw DimensionMismatch("verify_power_lemma: covariance dims");

    PowerReport rep;
    const DenseMatrix d1 = d.M1.materialize(), d2 = d.M2.materialize();
    rep.analytic = K1.trace() + K2.trace() + d1.squaredNorm() + d2.squaredNorm();

    const MacPrecoders pc = mac_precoders(C.first, C.second, spec);
    {
        // X_i = T_i1 U1 + T_i2 U2 + D_i Z
        const DenseMatrix T11 = pc.Q1inv + d1 * H1t * pc.Q1inv, T12 = d1 * H2t * pc.Q2inv;
        const DenseMatrix T21 = d2 * H1t * pc.Q1inv, T22 = pc.Q2inv + d2 * H2t * pc.Q2inv;
        rep.covariance_algebra = (T11 * K1 * T11.transpose()).trace() +
                                 (T12 * K2 * T12.transpose()).trace() +
                                 (T21 * K1 * T21.transpose()).trace() +
                                 (T22 * K2 * T22.transpose()).trace() + d1.squaredNorm() +
                                 d2.squaredNorm();
    }

    const DenseMatrix L1 = psd_factor(K1), L2 = psd_factor(K2);
    const long chunks = (trials + kChunk - 1) / kChunk;
    std::vector<double> vals(trials);
    parallel_for(chunks, [&](std::size_t c) {
        GaussianSampler g({rng.seed, rng.stream + "/chunk" + std::to_string(c)});
        const long lo = static_cast<long>(c) * kChunk, hi = std::min(trials, lo + kChunk);
        for (long t = lo; t < hi; ++t) {
            const Vector U1 = L1 * g.normal_matrix(n1, 1);
            const Vector U2 = L2 * g.normal_matrix(n2, 1);
            const Vector Z = g.normal_matrix(eta * spec.kappa(), 1);
            const auto smp = run_mac(C.first, C.second, spec, pc, U1, U2, Z);
            vals[t] = smp.X1.squaredNorm() + smp.X2.squaredNorm();
        }
    });
    return summarize(vals, rep);
}

}  // namespace linfb
