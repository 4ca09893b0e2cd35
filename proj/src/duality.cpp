#include "linfb/duality.hpp"

#include <algorithm>
#include <cmath>

#include "linfb/errors.hpp"

namespace linfb {

double DualityReport::worst() const {
    return std::max({residual_S_eq_EQE, residual_channel_identity, residual_trace_equality});
}

SetPair map_bc_to_mac_params(const BlockTriangularSet& B1, const BlockTriangularSet& B2) {
    return {reverse(B1), reverse(B2)};
}

SetPair map_mac_to_bc_params(const BlockTriangularSet& D1, const BlockTriangularSet& D2) {
    return {reverse(D1), reverse(D2)};
}

IndexedBlocks to_indexed(const BlockTriangularSet& S1, const BlockTriangularSet& S2) {
    IndexedBlocks out;
    for (const auto& [key, b] : S1.blocks()) out[{1, key.second, key.first}] = b;
    for (const auto& [key, b] : S2.blocks()) out[{2, key.second, key.first}] = b;
    return out;
}

SetPair from_indexed(const IndexedBlocks& blocks, int eta, int r1, int c1, int r2, int c2) {
    SetPair p{BlockTriangularSet(eta, r1, c1), BlockTriangularSet(eta, r2, c2)};
    for (const auto& [key, b] : blocks) {
        const auto [i, tau, l] = key;
        if (i == 1)
            p.first.set_block(l, tau, b);
        else if (i == 2)
            p.second.set_block(l, tau, b);
        else
            throw IndexOutOfRange("user index " + std::to_string(i));
    }
    return p;
}

namespace {

void check_index(int i, int tau, int l, int eta, const char* what) {
    if ((i != 1 && i != 2) || !(1 <= tau && tau < l && l <= eta))
        throw IndexOutOfRange(std::string(what) + " (i=" + std::to_string(i) +
                              ", tau=" + std::to_string(tau) + ", l=" + std::to_string(l) +
                              ") outside 1 <= tau < l <= " + std::to_string(eta));
}

template <class IndexFn>
IndexedBlocks map_blocks(const IndexedBlocks& C, int eta, IndexFn src) {
    IndexedBlocks A;
    for (int i = 1; i <= 2; ++i)
        for (int l = 2; l <= eta; ++l)
            for (int tau = 1; tau < l; ++tau) {
                const auto [ts, ls] = src(tau, l);
                check_index(i, ts, ls, eta, "mapped source index");
                auto it = C.find({i, ts, ls});
                if (it == C.end()) continue;
                A[{i, tau, l}] = reverse(it->second);
            }
    for (const auto& [key, b] : C) {
        const auto [i, tau, l] = key;
        check_index(i, tau, l, eta, "input index");
    }
    return A;
}

}  // namespace

IndexedBlocks map_scheme_params_corollary5(const IndexedBlocks& C, int eta) {
    return map_blocks(C, eta, [eta](int tau, int l) { return std::pair{eta - tau, eta - l + 2}; });
}

IndexedBlocks map_scheme_params_whole(const IndexedBlocks& C, int eta) {
    return map_blocks(C, eta, [eta](int tau, int l) { return std::pair{eta + 1 - l, eta + 1 - tau}; });
}

DualityReport verify_duality_identities(const FeedbackDesign& design, const ChannelSpec& spec) {
    const FeedbackDesign d = to_noise_form(design, spec);
    if (d.form != Form::D) throw StructureError("verify_duality_identities needs a C- or D-form design");
    const auto B = map_mac_to_bc_params(d.M1, d.M2);
    return verify_duality_identities(d, spec, B.first, B.second);
}

DualityReport verify_duality_identities(const FeedbackDesign& design, const ChannelSpec& spec,
                                        const BlockTriangularSet& B1, const BlockTriangularSet& B2) {
    const FeedbackDesign d = to_noise_form(design, spec);
    if (d.form != Form::D) throw StructureError("verify_duality_identities needs a C- or D-form design");
    const int eta = d.eta;
    const DenseMatrix H1B = lifted(spec.H1, eta), H2B = lifted(spec.H2, eta);
    const DenseMatrix H1r = reverse(H1B), H2r = reverse(H2B);

    const auto [N1, N2] = bc_N_matrices(B1, B2, H1B, H2B);
    const auto [M1, M2] = mac_M_matrices(d.M1, d.M2, H1r, H2r);
    const DenseMatrix S1 = psd_sqrt(N1), S2 = psd_sqrt(N2);
    const DenseMatrix Q1 = psd_sqrt(M1), Q2 = psd_sqrt(M2);
    const DenseMatrix E1 = exchange_matrix(static_cast<int>(S1.rows()));
    const DenseMatrix E2 = exchange_matrix(static_cast<int>(S2.rows()));
    const DenseMatrix Ek = exchange_matrix(static_cast<int>(H1B.cols()));

    DualityReport rep;
    rep.eta = eta;
    rep.spec_digest = spec.digest();
    rep.residual_S_eq_EQE = std::max(max_abs(S1 - E1 * Q1 * E1), max_abs(S2 - E2 * Q2 * E2));

    auto channel_residual = [&](const DenseMatrix& S, const DenseMatrix& Q, const DenseMatrix& H,
                                const DenseMatrix& Hr, const DenseMatrix& E) {
        const DenseMatrix bc = E * S.llt().solve(H) * Ek;
        const DenseMatrix mac = Q.llt().solve(Hr.transpose());  // (Hr Q^{-1})^T
        return max_abs(bc - mac);
    };
    rep.residual_channel_identity = std::max(channel_residual(S1, Q1, H1B, H1r, E1),
                                             channel_residual(S2, Q2, H2B, H2r, E2));

    const DenseMatrix b1 = B1.materialize(), b2 = B2.materialize();
    const DenseMatrix d1 = d.M1.materialize(), d2 = d.M2.materialize();
    rep.residual_trace_equality = std::max(std::abs((b1 * b1.transpose()).trace() - (d1 * d1.transpose()).trace()),
                                           std::abs((b2 * b2.transpose()).trace() - (d2 * d2.transpose()).trace()));
    return rep;
}

}  // namespace linfb
