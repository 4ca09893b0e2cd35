#pragma once

#include <string>
#include <vector>

#include "linfb/blockmat.hpp"
#include "linfb/frontier.hpp"

namespace linfb {

enum class Direction { mac, bc };

std::string to_string(Direction d);

// H1 is nu1 x kappa, H2 is nu2 x kappa. In the MAC direction the channel
// matrices seen by the receiver are H1^T and H2^T.
struct ChannelSpec {
    DenseMatrix H1;
    DenseMatrix H2;
    double P = 1.0;
    Direction direction = Direction::mac;

    int nu1() const { return static_cast<int>(H1.rows()); }
    int nu2() const { return static_cast<int>(H2.rows()); }
    int kappa() const { return static_cast<int>(H1.cols()); }

    void validate() const;
    std::string digest() const;
};

ChannelSpec make_siso_spec(double h1, double h2, double P, Direction d = Direction::mac);

// H_i -> E H_i E with the direction flipped. The MAC of the result has
// channel matrices rev(H_i), the pairing under which a D-form design and
// its reverse B-form design give identical regions.
ChannelSpec reversed_dual(const ChannelSpec& spec);

enum class Form { A, B, C, D };

std::string to_string(Form f);
Form parse_form(const std::string& s);

struct FeedbackDesign {
    int eta = 1;
    Form form = Form::D;
    BlockTriangularSet M1;
    BlockTriangularSet M2;

    static FeedbackDesign zero(Form form, int eta, const ChannelSpec& spec);

    // Shape checks against spec (block dims by form).
    void validate(const ChannelSpec& spec) const;
    double trace_cost() const;  // tr(M1 M1^T) + tr(M2 M2^T)
};

// Lifted channels.
DenseMatrix lifted(const DenseMatrix& H, int eta);
DenseMatrix lifted_t(const DenseMatrix& H, int eta);

// Converts A->B or C->D using spec's channels; B and D pass through.
FeedbackDesign to_noise_form(const FeedbackDesign& design, const ChannelSpec& spec);

struct EffectiveChannel {
    DenseMatrix G1;
    DenseMatrix G2;
    double budget = 0.0;
    DenseMatrix R1;  // Q_i for MAC, S_i for BC
    DenseMatrix R2;
    std::string note;
};

// MAC: G_i = H_iB^T Q_i^{-1}; G_i are receiver x input (MAC orientation).
EffectiveChannel effective_mac_channel(const FeedbackDesign& design, const ChannelSpec& spec);
// BC: G_i = S_i^{-1} H_iB; G_i are receiver-i x transmitter (BC orientation).
EffectiveChannel effective_bc_channel(const FeedbackDesign& design, const ChannelSpec& spec);

struct CovariancePair {
    DenseMatrix K1;
    DenseMatrix K2;
};

struct MacRates {
    double I1 = 0.0;
    double I2 = 0.0;
    double Isum = 0.0;
};

MacRates mac_nofb_pentagon(const DenseMatrix& G1, const DenseMatrix& G2, const CovariancePair& cov);

struct OptResult {
    CovariancePair cov;
    double value = 0.0;  // objective in bits
    MacRates rates;
    bool converged = false;
    int iterations = 0;
};

struct OptOptions {
    int iters = 2000;
    double step = 1.0;
    double tol = 1e-6;
};

// Jointly projects (K1, K2) onto {PSD, tr K1 + tr K2 <= budget} in Frobenius norm.
CovariancePair project_covariances(const CovariancePair& cov, double budget);

// Maximizes mu1 R1 + mu2 R2 at the Gaussian-input MAC corner that decodes the
// higher-weight user last. mu1 = mu2 gives the sum rate.
OptResult maximize_weighted_rate(const DenseMatrix& G1, const DenseMatrix& G2, double budget,
                                 double mu1, double mu2, const OptOptions& opt = {});

OptResult maximize_sum_rate(const DenseMatrix& G1, const DenseMatrix& G2, double budget,
                            int iters = 2000, double step = 1.0);

// MAC-orientation channels and budget for either direction.
EffectiveChannel mac_view(const FeedbackDesign& design, const ChannelSpec& spec);

RegionFrontier multiletter_inner_bound(const ChannelSpec& spec, const FeedbackDesign& design,
                                       int rate_grid = 65);

// Max sum rate of the design divided by eta.
double design_sum_rate(const ChannelSpec& spec, const FeedbackDesign& design);

class GaussianSampler;

// D-form design with Gaussian direction over all free entries and trace
// cost u^2 * eta * P, u uniform in [0,1). form must be B or D.
FeedbackDesign random_noise_design(const ChannelSpec& spec, int eta, Form form, GaussianSampler& rng);

struct SearchResult {
    FeedbackDesign best;
    double best_rate = 0.0;
    RegionFrontier frontier;
    std::vector<double> trial_rates;  // one per random trial
    double max_evaluated = 0.0;       // over every design evaluated
    int evaluations = 0;
};

SearchResult search_feedback_design(const ChannelSpec& spec, int eta, int trials,
                                    std::uint64_t seed, int rate_grid = 65);

}  // namespace linfb
