#pragma once

#include <map>
#include <utility>

#include <Eigen/Dense>

namespace linfb {

using DenseMatrix = Eigen::MatrixXd;

DenseMatrix exchange_matrix(int d);

// E_{cols} * A^T * E_{rows}
DenseMatrix reverse(const DenseMatrix& A);

// I_eta (x) H
DenseMatrix kron_lift(const DenseMatrix& H, int eta);

double max_abs(const DenseMatrix& A);

// Strictly-lower block-triangular matrix with eta x eta blocks of a fixed
// size. Blocks are keyed by (row l, col tau), 1 <= tau < l <= eta.
class BlockTriangularSet {
public:
    BlockTriangularSet() = default;
    BlockTriangularSet(int eta, int block_rows, int block_cols);

    static BlockTriangularSet zero(int eta, int block_rows, int block_cols) {
        return BlockTriangularSet(eta, block_rows, block_cols);
    }
    // Rejects matrices with entries on or above the block diagonal larger
    // than tol * max(1, max|M|).
    static BlockTriangularSet from_dense(const DenseMatrix& M, int eta, int block_rows,
                                         int block_cols, double tol = 1e-12);

    int eta() const { return eta_; }
    int block_rows() const { return block_rows_; }
    int block_cols() const { return block_cols_; }
    int rows() const { return eta_ * block_rows_; }
    int cols() const { return eta_ * block_cols_; }

    const DenseMatrix& block(int l, int tau) const;
    void set_block(int l, int tau, const DenseMatrix& b);

    const std::map<std::pair<int, int>, DenseMatrix>& blocks() const { return blocks_; }

    DenseMatrix materialize() const;

    // Number of free scalar entries.
    int free_count() const;
    double free_entry(int k) const;
    void set_free_entry(int k, double v);

private:
    void check_index(int l, int tau) const;

    int eta_ = 0;
    int block_rows_ = 0;
    int block_cols_ = 0;
    std::map<std::pair<int, int>, DenseMatrix> blocks_;
};

// Largest entry on or above the block diagonal.
double strict_lower_residual(const DenseMatrix& M, int eta, int block_rows, int block_cols);

// reverse() of a block set; blocks swap to block_cols x block_rows.
BlockTriangularSet reverse(const BlockTriangularSet& S);

struct SetPair {
    BlockTriangularSet first;
    BlockTriangularSet second;
};

// BC side: A-form <-> B-form. H1B, H2B are the lifted (eta nu_i x eta kappa) channels.
SetPair omega(const BlockTriangularSet& A1, const BlockTriangularSet& A2,
              const DenseMatrix& H1B, const DenseMatrix& H2B);
SetPair omega_inv(const BlockTriangularSet& B1, const BlockTriangularSet& B2,
                  const DenseMatrix& H1B, const DenseMatrix& H2B);

// MAC side: C-form <-> D-form. H1Bt, H2Bt are the MAC channel matrices
// (eta kappa x eta nu_i).
SetPair omega_tilde(const BlockTriangularSet& C1, const BlockTriangularSet& C2,
                    const DenseMatrix& H1Bt, const DenseMatrix& H2Bt);
SetPair omega_tilde_inv(const BlockTriangularSet& D1, const BlockTriangularSet& D2,
                        const DenseMatrix& H1Bt, const DenseMatrix& H2Bt);

DenseMatrix psd_sqrt(const DenseMatrix& M);

std::pair<DenseMatrix, DenseMatrix> mac_M_matrices(const BlockTriangularSet& D1,
                                                   const BlockTriangularSet& D2,
                                                   const DenseMatrix& H1Bt,
                                                   const DenseMatrix& H2Bt);

std::pair<DenseMatrix, DenseMatrix> bc_N_matrices(const BlockTriangularSet& B1,
                                                  const BlockTriangularSet& B2,
                                                  const DenseMatrix& H1B,
                                                  const DenseMatrix& H2B);

}  // namespace linfb
