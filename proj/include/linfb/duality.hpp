#pragma once

#include <map>
#include <string>
#include <tuple>

#include "linfb/mimo_regions.hpp"

namespace linfb {

struct DualityReport {
    double residual_S_eq_EQE = 0.0;
    double residual_channel_identity = 0.0;
    double residual_trace_equality = 0.0;
    int eta = 0;
    std::string spec_digest;

    double worst() const;
    bool pass(double tol = 1e-8) const { return worst() < tol; }
};

// D_i = rev(B_i) and back; the two maps are the same involution.
SetPair map_bc_to_mac_params(const BlockTriangularSet& B1, const BlockTriangularSet& B2);
SetPair map_mac_to_bc_params(const BlockTriangularSet& D1, const BlockTriangularSet& D2);

// Blocks keyed by (i, tau, l) with 1 <= tau < l <= eta, tau the earlier
// (column) index as in the scheme's A_{i,tau,l} notation.
using IndexedBlocks = std::map<std::tuple<int, int, int>, DenseMatrix>;

IndexedBlocks to_indexed(const BlockTriangularSet& S1, const BlockTriangularSet& S2);
SetPair from_indexed(const IndexedBlocks& blocks, int eta, int r1, int c1, int r2, int c2);

// Per-block map as printed: A_{i,tau,l} = rev(C_{i, eta-tau, eta-l+2}).
// Throws IndexOutOfRange when the source index leaves 1 <= tau' < l' <= eta.
IndexedBlocks map_scheme_params_corollary5(const IndexedBlocks& C, int eta);

// Per-block form of A = rev(C) on whole matrices:
// A_{i,tau,l} = rev(C_{i, eta+1-l, eta+1-tau}).
IndexedBlocks map_scheme_params_whole(const IndexedBlocks& C, int eta);

// Checks the identities behind the region duality for a D-form design on
// spec: B_i = rev(D_i); N_i, S_i on H_iB; M_i, Q_i on the reversed
// channels rev(H_iB).
DualityReport verify_duality_identities(const FeedbackDesign& design, const ChannelSpec& spec);

// Same checks with an explicitly supplied B-side design (negative controls).
DualityReport verify_duality_identities(const FeedbackDesign& design, const ChannelSpec& spec,
                                        const BlockTriangularSet& B1, const BlockTriangularSet& B2);

}  // namespace linfb
