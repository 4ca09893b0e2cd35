#include "linfb/blockmat.hpp"

#include <cmath>
#include <string>

#include "linfb/errors.hpp"

namespace linfb {

namespace {

std::string dims(const DenseMatrix& M) {
    return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

DenseMatrix identity(Eigen::Index n) { return DenseMatrix::Identity(n, n); }

void check_pair(const BlockTriangularSet& X1, const BlockTriangularSet& X2) {
    if (X1.eta() != X2.eta())
        throw DimensionMismatch("block sets disagree on eta");
}

// Unit lower block-triangular, so LU never meets a zero pivot.
DenseMatrix solve_left(const DenseMatrix& T, const DenseMatrix& R) {
    return T.partialPivLu().solve(R);
}

DenseMatrix solve_right(const DenseMatrix& L, const DenseMatrix& T) {
    // L * T^{-1} = (T^{-T} L^T)^T
    return T.transpose().partialPivLu().solve(L.transpose()).transpose();
}

}  // namespace

DenseMatrix exchange_matrix(int d) {
    if (d < 1) throw DimensionMismatch("exchange_matrix: d must be >= 1");
    DenseMatrix E = DenseMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) E(i, d - 1 - i) = 1.0;
    return E;
}

DenseMatrix reverse(const DenseMatrix& A) {
    // Pure index permutation: rev(A)(i, j) = A(r-1-j, c-1-i).
    const auto r = A.rows(), c = A.cols();
    DenseMatrix R(c, r);
    for (Eigen::Index i = 0; i < c; ++i)
        for (Eigen::Index j = 0; j < r; ++j) R(i, j) = A(r - 1 - j, c - 1 - i);
    return R;
}

DenseMatrix kron_lift(const DenseMatrix& H, int eta) {
    if (eta < 1) throw DimensionMismatch("kron_lift: eta must be >= 1");
    const auto r = H.rows(), c = H.cols();
    DenseMatrix L = DenseMatrix::Zero(eta * r, eta * c);
    for (int k = 0; k < eta; ++k) L.block(k * r, k * c, r, c) = H;
    return L;
}

double max_abs(const DenseMatrix& A) {
    return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

BlockTriangularSet::BlockTriangularSet(int eta, int block_rows, int block_cols)
    : eta_(eta), block_rows_(block_rows), block_cols_(block_cols) {
    if (eta < 1 || block_rows < 1 || block_cols < 1)
        throw DimensionMismatch("BlockTriangularSet: eta and block dims must be positive");
    for (int l = 2; l <= eta; ++l)
        for (int tau = 1; tau < l; ++tau)
            blocks_[{l, tau}] = DenseMatrix::Zero(block_rows, block_cols);
}

void BlockTriangularSet::check_index(int l, int tau) const {
    if (!(1 <= tau && tau < l && l <= eta_))
        throw IndexOutOfRange("block (" + std::to_string(l) + "," + std::to_string(tau) +
                              ") outside 1 <= tau < l <= " + std::to_string(eta_));
}

const DenseMatrix& BlockTriangularSet::block(int l, int tau) const {
    check_index(l, tau);
    return blocks_.at({l, tau});
}

void BlockTriangularSet::set_block(int l, int tau, const DenseMatrix& b) {
    check_index(l, tau);
    if (b.rows() != block_rows_ || b.cols() != block_cols_)
        throw DimensionMismatch("set_block: got " + dims(b) + ", expected " +
                                std::to_string(block_rows_) + "x" + std::to_string(block_cols_));
    if (!b.allFinite()) throw StructureError("set_block: non-finite entry");
    blocks_[{l, tau}] = b;
}

DenseMatrix BlockTriangularSet::materialize() const {
    DenseMatrix M = DenseMatrix::Zero(rows(), cols());
    for (const auto& [key, b] : blocks_)
        M.block((key.first - 1) * block_rows_, (key.second - 1) * block_cols_, block_rows_,
                block_cols_) = b;
    return M;
}

BlockTriangularSet BlockTriangularSet::from_dense(const DenseMatrix& M, int eta, int block_rows,
                                                  int block_cols, double tol) {
    BlockTriangularSet S(eta, block_rows, block_cols);
    if (M.rows() != S.rows() || M.cols() != S.cols())
        throw DimensionMismatch("from_dense: got " + dims(M) + ", expected " +
                                std::to_string(S.rows()) + "x" + std::to_string(S.cols()));
    const double off = strict_lower_residual(M, eta, block_rows, block_cols);
    if (off > tol * std::max(1.0, max_abs(M)))
        throw StructureError("from_dense: entry " + std::to_string(off) +
                             " on or above the block diagonal");
    for (auto& [key, b] : S.blocks_)
        b = M.block((key.first - 1) * block_rows, (key.second - 1) * block_cols, block_rows,
                    block_cols);
    return S;
}

int BlockTriangularSet::free_count() const {
    return static_cast<int>(blocks_.size()) * block_rows_ * block_cols_;
}

double BlockTriangularSet::free_entry(int k) const {
    const int per = block_rows_ * block_cols_;
    if (k < 0 || k >= free_count()) throw IndexOutOfRange("free_entry");
    auto it = std::next(blocks_.begin(), k / per);
    const int r = (k % per) / block_cols_, c = (k % per) % block_cols_;
    return it->second(r, c);
}

void BlockTriangularSet::set_free_entry(int k, double v) {
    const int per = block_rows_ * block_cols_;
    if (k < 0 || k >= free_count()) throw IndexOutOfRange("set_free_entry");
    auto it = std::next(blocks_.begin(), k / per);
    const int r = (k % per) / block_cols_, c = (k % per) % block_cols_;
    it->second(r, c) = v;
}

double strict_lower_residual(const DenseMatrix& M, int eta, int block_rows, int block_cols) {
    if (M.rows() != eta * block_rows || M.cols() != eta * block_cols)
        throw DimensionMismatch("strict_lower_residual: " + dims(M));
    double worst = 0.0;
    for (int l = 1; l <= eta; ++l)
        for (int tau = l; tau <= eta; ++tau)
            worst = std::max(worst, max_abs(M.block((l - 1) * block_rows, (tau - 1) * block_cols,
                                                    block_rows, block_cols)));
    return worst;
}

BlockTriangularSet reverse(const BlockTriangularSet& S) {
    const int eta = S.eta();
    BlockTriangularSet R(eta, S.block_cols(), S.block_rows());
    // Block (l, tau) of the reversed matrix is rev of block (eta+1-tau, eta+1-l).
    for (int l = 2; l <= eta; ++l)
        for (int tau = 1; tau < l; ++tau)
            R.set_block(l, tau, reverse(S.block(eta + 1 - tau, eta + 1 - l)));
    return R;
}

SetPair omega(const BlockTriangularSet& A1, const BlockTriangularSet& A2, const DenseMatrix& H1B,
              const DenseMatrix& H2B) {
    check_pair(A1, A2);
    if (A1.rows() != A2.rows() || A1.cols() != H1B.rows() || A2.cols() != H2B.rows() ||
        H1B.cols() != A1.rows() || H2B.cols() != A1.rows())
        throw DimensionMismatch("omega: A blocks do not conform with H1B " + dims(H1B) +
                                ", H2B " + dims(H2B));
    const DenseMatrix a1 = A1.materialize(), a2 = A2.materialize();
    const DenseMatrix T = identity(a1.rows()) - a1 * H1B - a2 * H2B;
    return {BlockTriangularSet::from_dense(solve_left(T, a1), A1.eta(), A1.block_rows(),
                                           A1.block_cols()),
            BlockTriangularSet::from_dense(solve_left(T, a2), A2.eta(), A2.block_rows(),
                                           A2.block_cols())};
}

SetPair omega_inv(const BlockTriangularSet& B1, const BlockTriangularSet& B2,
                  const DenseMatrix& H1B, const DenseMatrix& H2B) {
    check_pair(B1, B2);
    if (B1.rows() != B2.rows() || B1.cols() != H1B.rows() || B2.cols() != H2B.rows() ||
        H1B.cols() != B1.rows() || H2B.cols() != B1.rows())
        throw DimensionMismatch("omega_inv: B blocks do not conform with H1B " + dims(H1B) +
                                ", H2B " + dims(H2B));
    const DenseMatrix b1 = B1.materialize(), b2 = B2.materialize();
    const DenseMatrix T = identity(b1.rows()) + b1 * H1B + b2 * H2B;
    return {BlockTriangularSet::from_dense(solve_left(T, b1), B1.eta(), B1.block_rows(),
                                           B1.block_cols()),
            BlockTriangularSet::from_dense(solve_left(T, b2), B2.eta(), B2.block_rows(),
                                           B2.block_cols())};
}

namespace {

void check_mac(const char* who, const BlockTriangularSet& X1, const BlockTriangularSet& X2,
               const DenseMatrix& H1Bt, const DenseMatrix& H2Bt) {
    check_pair(X1, X2);
    if (X1.cols() != X2.cols() || X1.rows() != H1Bt.cols() || X2.rows() != H2Bt.cols() ||
        H1Bt.rows() != X1.cols() || H2Bt.rows() != X1.cols())
        throw DimensionMismatch(std::string(who) + ": blocks do not conform with H1Bt " +
                                dims(H1Bt) + ", H2Bt " + dims(H2Bt));
}

}  // namespace

SetPair omega_tilde(const BlockTriangularSet& C1, const BlockTriangularSet& C2,
                    const DenseMatrix& H1Bt, const DenseMatrix& H2Bt) {
    check_mac("omega_tilde", C1, C2, H1Bt, H2Bt);
    const DenseMatrix c1 = C1.materialize(), c2 = C2.materialize();
    const DenseMatrix T = identity(c1.cols()) - H1Bt * c1 - H2Bt * c2;
    return {BlockTriangularSet::from_dense(solve_right(c1, T), C1.eta(), C1.block_rows(),
                                           C1.block_cols()),
            BlockTriangularSet::from_dense(solve_right(c2, T), C2.eta(), C2.block_rows(),
                                           C2.block_cols())};
}

SetPair omega_tilde_inv(const BlockTriangularSet& D1, const BlockTriangularSet& D2,
                        const DenseMatrix& H1Bt, const DenseMatrix& H2Bt) {
    check_mac("omega_tilde_inv", D1, D2, H1Bt, H2Bt);
    const DenseMatrix d1 = D1.materialize(), d2 = D2.materialize();
    const DenseMatrix T = identity(d1.cols()) + H1Bt * d1 + H2Bt * d2;
    return {BlockTriangularSet::from_dense(solve_right(d1, T), D1.eta(), D1.block_rows(),
                                           D1.block_cols()),
            BlockTriangularSet::from_dense(solve_right(d2, T), D2.eta(), D2.block_rows(),
                                           D2.block_cols())};
}

DenseMatrix psd_sqrt(const DenseMatrix& M) {
    if (M.rows() != M.cols() || M.rows() == 0)
        throw DimensionMismatch("psd_sqrt: matrix is " + dims(M));
    if (!M.allFinite()) throw NotPositiveDefinite("psd_sqrt: non-finite entry");
    const double asym = max_abs(M - M.transpose());
    if (asym >= 1e-9 * std::max(1.0, max_abs(M)))
        throw NotSymmetric("psd_sqrt: asymmetry " + std::to_string(asym));
    const DenseMatrix S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(S);
    if (es.info() != Eigen::Success) throw NotPositiveDefinite("psd_sqrt: eigensolver failed");
    const double floor = 1e-12 * S.trace() / static_cast<double>(S.rows());
    const auto& lam = es.eigenvalues();
    if (!(lam.minCoeff() > floor))
        throw NotPositiveDefinite("psd_sqrt: smallest eigenvalue " +
                                  std::to_string(lam.minCoeff()));
    const auto& V = es.eigenvectors();
    DenseMatrix Q = V * lam.cwiseSqrt().asDiagonal() * V.transpose();
    return 0.5 * (Q + Q.transpose());
}

std::pair<DenseMatrix, DenseMatrix> mac_M_matrices(const BlockTriangularSet& D1,
                                                   const BlockTriangularSet& D2,
                                                   const DenseMatrix& H1Bt,
                                                   const DenseMatrix& H2Bt) {
    check_mac("mac_M_matrices", D1, D2, H1Bt, H2Bt);
    const DenseMatrix d1 = D1.materialize(), d2 = D2.materialize();
    const DenseMatrix a11 = identity(d1.rows()) + d1 * H1Bt, a21 = d2 * H1Bt;
    const DenseMatrix a22 = identity(d2.rows()) + d2 * H2Bt, a12 = d1 * H2Bt;
    DenseMatrix M1 = a11.transpose() * a11 + a21.transpose() * a21;
    DenseMatrix M2 = a22.transpose() * a22 + a12.transpose() * a12;
    return {0.5 * (M1 + M1.transpose()), 0.5 * (M2 + M2.transpose())};
}

std::pair<DenseMatrix, DenseMatrix> bc_N_matrices(const BlockTriangularSet& B1,
                                                  const BlockTriangularSet& B2,
                                                  const DenseMatrix& H1B,
                                                  const DenseMatrix& H2B) {
    check_pair(B1, B2);
    if (B1.rows() != B2.rows() || B1.cols() != H1B.rows() || B2.cols() != H2B.rows() ||
        H1B.cols() != B1.rows() || H2B.cols() != B1.rows())
        throw DimensionMismatch("bc_N_matrices: B blocks do not conform with H1B " + dims(H1B) +
                                ", H2B " + dims(H2B));
    const DenseMatrix b1 = B1.materialize(), b2 = B2.materialize();
    const DenseMatrix a11 = identity(H1B.rows()) + H1B * b1, a12 = H1B * b2;
    const DenseMatrix a22 = identity(H2B.rows()) + H2B * b2, a21 = H2B * b1;
    DenseMatrix N1 = a11 * a11.transpose() + a12 * a12.transpose();
    DenseMatrix N2 = a22 * a22.transpose() + a21 * a21.transpose();
    return {0.5 * (N1 + N1.transpose()), 0.5 * (N2 + N2.transpose())};
}

}  // namespace linfb
