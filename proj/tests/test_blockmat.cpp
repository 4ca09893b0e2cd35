#include <doctest.h>

#include <random>

#include "linfb/blockmat.hpp"
#include "linfb/errors.hpp"
#include "oracles.hpp"

using namespace linfb;

namespace {

BlockTriangularSet random_set(std::mt19937_64& g, int eta, int br, int bc, double scale = 0.5) {
    return BlockTriangularSet::from_dense(oracle::random_strict_lower(g, eta, br, bc, scale), eta, br, bc);
}

}  // namespace

TEST_CASE("exchange matrix") {
    CHECK(exchange_matrix(1) == DenseMatrix::Identity(1, 1));
    DenseMatrix E3(3, 3);
    E3 << 0, 0, 1, 0, 1, 0, 1, 0, 0;
    CHECK(exchange_matrix(3) == E3);
    DenseMatrix E2(2, 2);
    E2 << 0, 1, 1, 0;
    CHECK(exchange_matrix(2) == E2);
    for (int d = 1; d <= 6; ++d) {
        const DenseMatrix E = exchange_matrix(d);
        CHECK(E == E.transpose());
        CHECK(E * E == DenseMatrix::Identity(d, d));
    }
}

TEST_CASE("reverse image") {
    DenseMatrix A(2, 2);
    A << 1, 2, 3, 4;
    DenseMatrix R(2, 2);
    R << 4, 2, 3, 1;
    CHECK(reverse(A) == R);

    std::mt19937_64 g(7);
    for (int t = 0; t < 50; ++t) {
        const DenseMatrix X = oracle::random_matrix(g, 3, 5);
        CHECK(reverse(X).rows() == 5);
        CHECK(reverse(reverse(X)) == X);
        CHECK(max_abs(reverse(X) - oracle::reverse(X)) == 0.0);
        const DenseMatrix Y = oracle::random_matrix(g, 5, 4);
        // rev(Y) rev(X) = rev(X Y)
        CHECK(max_abs(reverse(Y) * reverse(X) - reverse(X * Y)) < 1e-12);
        const DenseMatrix S = oracle::random_matrix(g, 4, 4) + 4.0 * DenseMatrix::Identity(4, 4);
        CHECK(max_abs(reverse(DenseMatrix(S.inverse())) - reverse(S).inverse()) < 1e-9);
    }
}

TEST_CASE("kron lift") {
    DenseMatrix h = DenseMatrix::Constant(1, 1, 2.0);
    CHECK(kron_lift(h, 2) == 2.0 * DenseMatrix::Identity(2, 2));
    CHECK(kron_lift(DenseMatrix::Identity(2, 2), 1) == DenseMatrix::Identity(2, 2));
    std::mt19937_64 g(3);
    for (int eta = 1; eta <= 4; ++eta) {
        const DenseMatrix H = oracle::random_matrix(g, 2, 3);
        CHECK(kron_lift(H, eta) == oracle::kron_identity(H, eta));
        CHECK(max_abs(reverse(kron_lift(H, eta)) - kron_lift(reverse(H), eta)) == 0.0);
    }
}

TEST_CASE("block set materialize and structure") {
    std::mt19937_64 g(11);
    const DenseMatrix M = oracle::random_strict_lower(g, 3, 2, 1);
    const auto S = BlockTriangularSet::from_dense(M, 3, 2, 1);
    CHECK(S.materialize() == M);
    CHECK(S.free_count() == 3 * 2);
    CHECK(S.block(3, 1) == M.block(4, 0, 2, 1));
    CHECK_THROWS_AS(S.block(2, 2), IndexOutOfRange);
    DenseMatrix bad = M;
    bad(0, 0) = 1.0;
    CHECK_THROWS_AS(BlockTriangularSet::from_dense(bad, 3, 2, 1), StructureError);
    CHECK_THROWS_AS(BlockTriangularSet::from_dense(M, 2, 2, 1), DimensionMismatch);

    // reversing swaps block dims and keeps strict lower structure
    const auto R = reverse(S);
    CHECK(R.block_rows() == 1);
    CHECK(R.block_cols() == 2);
    CHECK(R.materialize() == oracle::reverse(M));
    CHECK(strict_lower_residual(oracle::reverse(M), 3, 1, 2) < 1e-12);
}

TEST_CASE("omega on small cases") {
    const DenseMatrix one = DenseMatrix::Identity(2, 2);
    SUBCASE("zero maps to zero") {
        const auto Z = BlockTriangularSet::zero(3, 1, 1);
        const DenseMatrix H = kron_lift(DenseMatrix::Identity(1, 1), 3);
        const auto B = omega(Z, Z, H, H);
        CHECK(max_abs(B.first.materialize()) == 0.0);
        CHECK(max_abs(B.second.materialize()) == 0.0);
        const auto A = omega_inv(Z, Z, H, H);
        CHECK(max_abs(A.first.materialize()) == 0.0);
        const auto D = omega_tilde(Z, Z, H, H);
        CHECK(max_abs(D.second.materialize()) == 0.0);
        CHECK(max_abs(omega_tilde_inv(Z, Z, H, H).first.materialize()) == 0.0);
    }
    SUBCASE("eta=2 scalar blocks pass through") {
        BlockTriangularSet A1(2, 1, 1), A2(2, 1, 1);
        A1.set_block(2, 1, DenseMatrix::Constant(1, 1, 0.7));
        A2.set_block(2, 1, DenseMatrix::Constant(1, 1, -1.3));
        const auto B = omega(A1, A2, one, one);
        CHECK(B.first.block(2, 1)(0, 0) == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(B.second.block(2, 1)(0, 0) == doctest::Approx(-1.3).epsilon(1e-15));
    }
    SUBCASE("dimension mismatch") {
        BlockTriangularSet A1(2, 2, 1), A2(2, 2, 1);
        CHECK_THROWS_AS(omega(A1, A2, one, one), DimensionMismatch);
        CHECK_THROWS_AS(omega_tilde(A1, A2, one, one), DimensionMismatch);
    }
}

TEST_CASE("omega and omega_tilde round trips") {
    std::mt19937_64 g(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int eta = 1 + trial % 4, kappa = 1 + trial % 2, nu1 = 1 + (trial / 2) % 2, nu2 = 2;
        const DenseMatrix H1 = oracle::random_matrix(g, nu1, kappa), H2 = oracle::random_matrix(g, nu2, kappa);
        const DenseMatrix H1B = kron_lift(H1, eta), H2B = kron_lift(H2, eta);
        const auto A1 = random_set(g, eta, kappa, nu1), A2 = random_set(g, eta, kappa, nu2);
        const auto B = omega(A1, A2, H1B, H2B);
        // direct formula
        const DenseMatrix T = DenseMatrix::Identity(eta * kappa, eta * kappa) - A1.materialize() * H1B -
                              A2.materialize() * H2B;
        CHECK(max_abs(B.first.materialize() - T.inverse() * A1.materialize()) < 1e-10);
        const auto A = omega_inv(B.first, B.second, H1B, H2B);
        CHECK(max_abs(A.first.materialize() - A1.materialize()) < 1e-10);
        CHECK(max_abs(A.second.materialize() - A2.materialize()) < 1e-10);

        const DenseMatrix H1t = kron_lift(H1.transpose(), eta), H2t = kron_lift(H2.transpose(), eta);
        const auto C1 = random_set(g, eta, nu1, kappa), C2 = random_set(g, eta, nu2, kappa);
        const auto D = omega_tilde(C1, C2, H1t, H2t);
        const DenseMatrix Tm = DenseMatrix::Identity(eta * kappa, eta * kappa) - H1t * C1.materialize() -
                               H2t * C2.materialize();
        CHECK(max_abs(D.second.materialize() - C2.materialize() * Tm.inverse()) < 1e-10);
        const auto C = omega_tilde_inv(D.first, D.second, H1t, H2t);
        CHECK(max_abs(C.first.materialize() - C1.materialize()) < 1e-10);
        CHECK(max_abs(C.second.materialize() - C2.materialize()) < 1e-10);
    }
}

TEST_CASE("one-sided design keeps the silent side at zero") {
    std::mt19937_64 g(5);
    const DenseMatrix H = kron_lift(oracle::random_matrix(g, 1, 1), 3);
    const auto C1 = random_set(g, 3, 1, 1);
    const auto Z = BlockTriangularSet::zero(3, 1, 1);
    CHECK(max_abs(omega_tilde(C1, Z, H, H).second.materialize()) == 0.0);
    CHECK(max_abs(omega(C1, Z, H, H).second.materialize()) == 0.0);
}

TEST_CASE("psd_sqrt") {
    CHECK(max_abs(psd_sqrt(DenseMatrix::Identity(3, 3)) - DenseMatrix::Identity(3, 3)) < 1e-15);
    DenseMatrix M(2, 2);
    M << 4, 0, 0, 9;
    DenseMatrix R(2, 2);
    R << 2, 0, 0, 3;
    CHECK(max_abs(psd_sqrt(M) - R) < 1e-14);
    std::mt19937_64 g(99);
    for (int t = 0; t < 100; ++t) {
        const DenseMatrix G = oracle::random_matrix(g, 4, 4);
        const DenseMatrix S = G.transpose() * G + DenseMatrix::Identity(4, 4);
        const DenseMatrix Q = psd_sqrt(S);
        CHECK(max_abs(Q * Q - S) < 1e-9 * (1.0 + S.cwiseAbs().rowwise().sum().maxCoeff()));
        CHECK(max_abs(Q - Q.transpose()) == 0.0);
    }
    const DenseMatrix S2 = oracle::random_matrix(g, 2, 2);
    const DenseMatrix P2 = S2 * S2.transpose() + DenseMatrix::Identity(2, 2);
    CHECK(max_abs(psd_sqrt(P2) - oracle::sqrt2x2(P2)) < 1e-12);
    DenseMatrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK_THROWS_AS(psd_sqrt(asym), NotSymmetric);
    DenseMatrix indef(2, 2);
    indef << 1, 2, 2, 1;
    CHECK_THROWS_AS(psd_sqrt(indef), NotPositiveDefinite);
}

TEST_CASE("M and N matrices") {
    SUBCASE("zero design gives identity") {
        const auto Z = BlockTriangularSet::zero(2, 1, 1);
        const DenseMatrix H = DenseMatrix::Identity(2, 2);
        const auto [M1, M2] = mac_M_matrices(Z, Z, H, H);
        CHECK(M1 == DenseMatrix::Identity(2, 2));
        CHECK(M2 == DenseMatrix::Identity(2, 2));
        const auto [N1, N2] = bc_N_matrices(Z, Z, H, H);
        CHECK(N1 == DenseMatrix::Identity(2, 2));
    }
    SUBCASE("eta=2 hand expansion") {
        const double d1 = 0.8, d2 = -1.7;
        BlockTriangularSet D1(2, 1, 1), D2(2, 1, 1);
        D1.set_block(2, 1, DenseMatrix::Constant(1, 1, d1));
        D2.set_block(2, 1, DenseMatrix::Constant(1, 1, d2));
        const DenseMatrix H = DenseMatrix::Identity(2, 2);
        const auto [M1, M2] = mac_M_matrices(D1, D2, H, H);
        DenseMatrix want(2, 2);
        want << 1 + d1 * d1 + d2 * d2, d1, d1, 1;
        CHECK(max_abs(M1 - want) < 1e-15);
        DenseMatrix want2(2, 2);
        want2 << 1 + d2 * d2 + d1 * d1, d2, d2, 1;
        CHECK(max_abs(M2 - want2) < 1e-15);
    }
    SUBCASE("N_i = E M_i E on reversed channels") {
        std::mt19937_64 g(17);
        for (int t = 0; t < 30; ++t) {
            const int eta = 1 + t % 3;
            const DenseMatrix H1 = oracle::random_matrix(g, 2, 3), H2 = oracle::random_matrix(g, 1, 3);
            const DenseMatrix H1B = kron_lift(H1, eta), H2B = kron_lift(H2, eta);
            const auto D1 = random_set(g, eta, 2, 3), D2 = random_set(g, eta, 1, 3);
            const auto [M1, M2] = mac_M_matrices(D1, D2, oracle::reverse(H1B), oracle::reverse(H2B));
            const auto [N1, N2] = bc_N_matrices(reverse(D1), reverse(D2), H1B, H2B);
            const DenseMatrix E1 = oracle::exchange(2 * eta), E2 = oracle::exchange(eta);
            CHECK(max_abs(N1 - E1 * M1 * E1) < 1e-10);
            CHECK(max_abs(N2 - E2 * M2 * E2) < 1e-10);
            CHECK(max_abs(N1 - N1.transpose()) < 1e-12);
            Eigen::SelfAdjointEigenSolver<DenseMatrix> es(M1);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}
