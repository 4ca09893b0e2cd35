#include "linfb/mimo_regions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "linfb/errors.hpp"
#include "linfb/parallel.hpp"
#include "linfb/rng.hpp"

namespace linfb {

namespace {

const double kHalfLog2e = 0.5 / std::numbers::ln2;

double logdet_spd(const DenseMatrix& A) {
    Eigen::LLT<DenseMatrix> llt(A);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("logdet: matrix not SPD");
    const auto& L = llt.matrixL();
    double s = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) s += std::log(L(i, i));
    return 2.0 * s;
}

DenseMatrix spd_inverse(const DenseMatrix& A) {
    return A.llt().solve(DenseMatrix::Identity(A.rows(), A.cols()));
}

void check_psd(const DenseMatrix& K, const char* name) {
    if (K.rows() != K.cols()) throw DimensionMismatch(std::string(name) + " is not square");
    const double scale = std::max(1.0, max_abs(K));
    if (max_abs(K - K.transpose()) > 1e-9 * scale)
        throw NotSymmetric(std::string(name) + " is not symmetric");
    if (K.rows() == 0) return;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (K + K.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
        throw NotPositiveDefinite(std::string(name) + " has a negative eigenvalue");
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::mac ? "mac" : "bc"; }

void ChannelSpec::validate() const {
    if (H1.size() == 0 || H2.size() == 0) throw ValidationError("channel", "empty channel matrix");
    if (H1.cols() != H2.cols())
        throw ValidationError("channel", "H1 and H2 must share the transmitter dimension");
    if (!H1.allFinite() || !H2.allFinite()) throw ValidationError("channel", "non-finite entry");
    if (max_abs(H1) == 0.0 && max_abs(H2) == 0.0)
        throw ValidationError("channel", "both channel matrices are zero");
    if (!(P > 0.0) || !std::isfinite(P)) throw ValidationError("power", "must be positive");
}

std::string ChannelSpec::digest() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(direction) << ';' << P << ';' << H1.rows() << 'x' << H1.cols();
    for (Eigen::Index i = 0; i < H1.size(); ++i) os << ',' << H1.data()[i];
    os << ';' << H2.rows() << 'x' << H2.cols();
    for (Eigen::Index i = 0; i < H2.size(); ++i) os << ',' << H2.data()[i];
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
    return buf;
}

ChannelSpec make_siso_spec(double h1, double h2, double P, Direction d) {
    ChannelSpec s;
    s.H1 = DenseMatrix::Constant(1, 1, h1);
    s.H2 = DenseMatrix::Constant(1, 1, h2);
    s.P = P;
    s.direction = d;
    return s;
}

ChannelSpec reversed_dual(const ChannelSpec& spec) {
    ChannelSpec r = spec;
    const DenseMatrix Ek = exchange_matrix(spec.kappa());
    r.H1 = exchange_matrix(spec.nu1()) * spec.H1 * Ek;
    r.H2 = exchange_matrix(spec.nu2()) * spec.H2 * Ek;
    r.direction = spec.direction == Direction::mac ? Direction::bc : Direction::mac;
    return r;
}

std::string to_string(Form f) {
    switch (f) {
        case Form::A: return "A";
        case Form::B: return "B";
        case Form::C: return "C";
        case Form::D: return "D";
    }
    return "?";
}

Form parse_form(const std::string& s) {
    if (s == "A") return Form::A;
    if (s == "B") return Form::B;
    if (s == "C") return Form::C;
    if (s == "D") return Form::D;
    throw ValidationError("form", "expected A, B, C or D, got '" + s + "'");
}

namespace {

bool bc_side(Form f) { return f == Form::A || f == Form::B; }

}  // namespace

FeedbackDesign FeedbackDesign::zero(Form form, int eta, const ChannelSpec& spec) {
    FeedbackDesign d;
    d.eta = eta;
    d.form = form;
    if (bc_side(form)) {
        d.M1 = BlockTriangularSet::zero(eta, spec.kappa(), spec.nu1());
        d.M2 = BlockTriangularSet::zero(eta, spec.kappa(), spec.nu2());
    } else {
        d.M1 = BlockTriangularSet::zero(eta, spec.nu1(), spec.kappa());
        d.M2 = BlockTriangularSet::zero(eta, spec.nu2(), spec.kappa());
    }
    return d;
}

void FeedbackDesign::validate(const ChannelSpec& spec) const {
    if (M1.eta() != eta || M2.eta() != eta)
        throw DimensionMismatch("design: block sets disagree on eta");
    const bool bc = bc_side(form);
    const int r1 = bc ? spec.kappa() : spec.nu1(), c1 = bc ? spec.nu1() : spec.kappa();
    const int r2 = bc ? spec.kappa() : spec.nu2(), c2 = bc ? spec.nu2() : spec.kappa();
    if (M1.block_rows() != r1 || M1.block_cols() != c1 || M2.block_rows() != r2 ||
        M2.block_cols() != c2)
        throw DimensionMismatch("design: " + to_string(form) +
                                "-form block dims do not match the channel");
}

double FeedbackDesign::trace_cost() const {
    return M1.materialize().squaredNorm() + M2.materialize().squaredNorm();
}

DenseMatrix lifted(const DenseMatrix& H, int eta) { return kron_lift(H, eta); }
DenseMatrix lifted_t(const DenseMatrix& H, int eta) { return kron_lift(H.transpose(), eta); }

FeedbackDesign to_noise_form(const FeedbackDesign& design, const ChannelSpec& spec) {
    design.validate(spec);
    FeedbackDesign out = design;
    if (design.form == Form::A) {
        auto r = omega(design.M1, design.M2, lifted(spec.H1, design.eta), lifted(spec.H2, design.eta));
        out.M1 = r.first;
        out.M2 = r.second;
        out.form = Form::B;
    } else if (design.form == Form::C) {
        auto r = omega_tilde(design.M1, design.M2, lifted_t(spec.H1, design.eta),
                             lifted_t(spec.H2, design.eta));
        out.M1 = r.first;
        out.M2 = r.second;
        out.form = Form::D;
    }
    return out;
}

namespace {

double budget_of(const FeedbackDesign& d, const ChannelSpec& spec) {
    const double b = d.eta * spec.P - d.trace_cost();
    if (b < 0.0)
        throw InfeasibleBudget("design consumes " + fmt_g(d.trace_cost()) + " > eta*P = " +
                               fmt_g(d.eta * spec.P));
    return b;
}

}  // namespace

EffectiveChannel effective_mac_channel(const FeedbackDesign& design, const ChannelSpec& spec) {
    const FeedbackDesign d = to_noise_form(design, spec);
    if (d.form != Form::D) throw StructureError("effective_mac_channel needs a C- or D-form design");
    const DenseMatrix H1t = lifted_t(spec.H1, d.eta), H2t = lifted_t(spec.H2, d.eta);
    const auto [M1, M2] = mac_M_matrices(d.M1, d.M2, H1t, H2t);
    EffectiveChannel e;
    e.budget = budget_of(d, spec);
    e.R1 = psd_sqrt(M1);
    e.R2 = psd_sqrt(M2);
    // H^T Q^{-1} = (Q^{-1} H)^T since Q is symmetric
    e.G1 = e.R1.llt().solve(H1t.transpose()).transpose();
    e.G2 = e.R2.llt().solve(H2t.transpose()).transpose();
    e.note = "output multiplier (I + H1B^T D1 + H2B^T D2) dropped (invertible)";
    return e;
}

EffectiveChannel effective_bc_channel(const FeedbackDesign& design, const ChannelSpec& spec) {
    const FeedbackDesign d = to_noise_form(design, spec);
    if (d.form != Form::B) throw StructureError("effective_bc_channel needs an A- or B-form design");
    const DenseMatrix H1 = lifted(spec.H1, d.eta), H2 = lifted(spec.H2, d.eta);
    const auto [N1, N2] = bc_N_matrices(d.M1, d.M2, H1, H2);
    EffectiveChannel e;
    e.budget = budget_of(d, spec);
    e.R1 = psd_sqrt(N1);
    e.R2 = psd_sqrt(N2);
    e.G1 = e.R1.llt().solve(H1);
    e.G2 = e.R2.llt().solve(H2);
    e.note = "noise whitened by S_i^{-1} (invertible)";
    return e;
}

MacRates mac_nofb_pentagon(const DenseMatrix& G1, const DenseMatrix& G2, const CovariancePair& cov) {
    if (G1.rows() != G2.rows() || cov.K1.rows() != G1.cols() || cov.K2.rows() != G2.cols())
        throw DimensionMismatch("mac_nofb_pentagon: covariances do not conform with channels");
    check_psd(cov.K1, "K1");
    check_psd(cov.K2, "K2");
    const auto I = DenseMatrix::Identity(G1.rows(), G1.rows());
    const DenseMatrix S1 = G1 * cov.K1 * G1.transpose(), S2 = G2 * cov.K2 * G2.transpose();
    MacRates r;
    r.I1 = kHalfLog2e * logdet_spd(I + S1);
    r.I2 = kHalfLog2e * logdet_spd(I + S2);
    r.Isum = kHalfLog2e * logdet_spd(I + S1 + S2);
    return r;
}

CovariancePair project_covariances(const CovariancePair& cov, double budget) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> e1(0.5 * (cov.K1 + cov.K1.transpose()));
    Eigen::SelfAdjointEigenSolver<DenseMatrix> e2(0.5 * (cov.K2 + cov.K2.transpose()));
    const Eigen::Index n1 = cov.K1.rows(), n2 = cov.K2.rows();
    Eigen::VectorXd lam(n1 + n2);
    lam << e1.eigenvalues(), e2.eigenvalues();
    Eigen::VectorXd clipped = lam.cwiseMax(0.0);
    if (clipped.sum() > budget) {
        // Euclidean projection onto {x >= 0, sum x = budget}
        std::vector<double> s(lam.data(), lam.data() + lam.size());
        std::sort(s.begin(), s.end(), std::greater<>());
        double cum = 0.0, theta = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            cum += s[k];
            const double t = (cum - budget) / static_cast<double>(k + 1);
            if (k + 1 == s.size() || s[k + 1] <= t) {
                theta = t;
                break;
            }
        }
        clipped = (lam.array() - theta).cwiseMax(0.0);
    }
    CovariancePair out;
    out.K1 = e1.eigenvectors() * clipped.head(n1).asDiagonal() * e1.eigenvectors().transpose();
    out.K2 = e2.eigenvectors() * clipped.tail(n2).asDiagonal() * e2.eigenvectors().transpose();
    out.K1 = 0.5 * (out.K1 + out.K1.transpose());
    out.K2 = 0.5 * (out.K2 + out.K2.transpose());
    return out;
}

namespace {

struct Objective {
    const DenseMatrix& G1;
    const DenseMatrix& G2;
    double mu1;
    double mu2;

    // Returns value; fills gradients if requested.
    double eval(const CovariancePair& c, DenseMatrix* g1, DenseMatrix* g2) const {
        const auto I = DenseMatrix::Identity(G1.rows(), G1.rows());
        const DenseMatrix S1 = G1 * c.K1 * G1.transpose(), S2 = G2 * c.K2 * G2.transpose();
        const DenseMatrix A = I + S1 + S2;
        const bool first_last = mu1 >= mu2;  // user 1 decoded last
        const DenseMatrix Aj = I + (first_last ? S1 : S2);
        const double lo = std::min(mu1, mu2), hi_minus_lo = std::abs(mu1 - mu2);
        const double v = kHalfLog2e * (lo * logdet_spd(A) + hi_minus_lo * logdet_spd(Aj));
        if (g1 && g2) {
            const DenseMatrix Ai = spd_inverse(A), Aji = spd_inverse(Aj);
            *g1 = kHalfLog2e * lo * G1.transpose() * Ai * G1;
            *g2 = kHalfLog2e * lo * G2.transpose() * Ai * G2;
            if (first_last)
                *g1 += kHalfLog2e * hi_minus_lo * G1.transpose() * Aji * G1;
            else
                *g2 += kHalfLog2e * hi_minus_lo * G2.transpose() * Aji * G2;
        }
        return v;
    }
};

double frob_diff(const CovariancePair& a, const CovariancePair& b) {
    return std::sqrt((a.K1 - b.K1).squaredNorm() + (a.K2 - b.K2).squaredNorm());
}

}  // namespace

OptResult maximize_weighted_rate(const DenseMatrix& G1, const DenseMatrix& G2, double budget,
                                 double mu1, double mu2, const OptOptions& opt) {
    if (G1.rows() != G2.rows()) throw DimensionMismatch("maximize: channels disagree on receiver dim");
    if (!(budget >= 0.0)) throw InfeasibleBudget("maximize: negative budget");
    const Eigen::Index n1 = G1.cols(), n2 = G2.cols();
    OptResult res;
    const double s = budget / static_cast<double>(n1 + n2);
    res.cov.K1 = s * DenseMatrix::Identity(n1, n1);
    res.cov.K2 = s * DenseMatrix::Identity(n2, n2);
    const Objective obj{G1, G2, mu1, mu2};
    if (budget == 0.0) {
        res.converged = true;
        res.value = 0.0;
        res.rates = mac_nofb_pentagon(G1, G2, res.cov);
        return res;
    }
    DenseMatrix g1, g2;
    double f = obj.eval(res.cov, &g1, &g2);
    double t = opt.step;
    int it = 0;
    for (; it < opt.iters; ++it) {
        const CovariancePair unit =
            project_covariances({res.cov.K1 + g1, res.cov.K2 + g2}, budget);
        if (frob_diff(unit, res.cov) < opt.tol) {
            res.converged = true;
            break;
        }
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            const CovariancePair trial =
                project_covariances({res.cov.K1 + t * g1, res.cov.K2 + t * g2}, budget);
            const double dir = (g1.cwiseProduct(trial.K1 - res.cov.K1)).sum() +
                               (g2.cwiseProduct(trial.K2 - res.cov.K2)).sum();
            const double ft = obj.eval(trial, nullptr, nullptr);
            if (ft >= f + 1e-4 * dir && ft >= f) {
                res.cov = trial;
                f = obj.eval(res.cov, &g1, &g2);
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) {
            res.converged = true;  // no ascent left at machine precision
            break;
        }
        t = std::min(t * 2.0, 1e6);
    }
    res.iterations = it;
    res.value = f;
    res.rates = mac_nofb_pentagon(G1, G2, res.cov);
    return res;
}

OptResult maximize_sum_rate(const DenseMatrix& G1, const DenseMatrix& G2, double budget, int iters,
                            double step) {
    OptOptions o;
    o.iters = iters;
    o.step = step;
    return maximize_weighted_rate(G1, G2, budget, 1.0, 1.0, o);
}

EffectiveChannel mac_view(const FeedbackDesign& design, const ChannelSpec& spec) {
    if (spec.direction == Direction::mac) return effective_mac_channel(design, spec);
    // BC: the no-feedback BC region equals the MAC region on the transposed
    // channels under the same sum power.
    EffectiveChannel e = effective_bc_channel(design, spec);
    e.G1.transposeInPlace();
    e.G2.transposeInPlace();
    e.note += "; evaluated on dual MAC";
    return e;
}

RegionFrontier multiletter_inner_bound(const ChannelSpec& spec, const FeedbackDesign& design,
                                       int rate_grid) {
    spec.validate();
    if (rate_grid < 2) throw ValidationError("rate-grid", "needs at least 2 weights");
    const EffectiveChannel e = mac_view(design, spec);
    const double eta = design.eta;
    std::vector<std::vector<RatePair>> slots(rate_grid);
    parallel_for(rate_grid, [&](std::size_t j) {
        const double th = 0.5 * std::numbers::pi * static_cast<double>(j) / (rate_grid - 1);
        const double mu1 = j + 1 == static_cast<std::size_t>(rate_grid) ? 0.0 : std::cos(th);
        const double mu2 = j == 0 ? 0.0 : std::sin(th);
        const auto r = maximize_weighted_rate(e.G1, e.G2, e.budget, mu1, mu2).rates;
        slots[j] = {{r.I1 / eta, 0.0},
                    {r.I1 / eta, (r.Isum - r.I1) / eta},
                    {(r.Isum - r.I2) / eta, r.I2 / eta},
                    {0.0, r.I2 / eta}};
    });
    std::vector<RatePair> all;
    for (auto& s : slots) all.insert(all.end(), s.begin(), s.end());
    RegionFrontier f;
    f.points = pareto_filter(std::move(all));
    f.set_meta("direction", to_string(spec.direction));
    f.set_meta("eta", std::to_string(design.eta));
    f.set_meta("rate_grid", std::to_string(rate_grid));
    f.set_meta("budget", fmt_g(e.budget));
    f.set_meta("spec_digest", spec.digest());
    f.set_meta("note", e.note);
    return f;
}

double design_sum_rate(const ChannelSpec& spec, const FeedbackDesign& design) {
    const EffectiveChannel e = mac_view(design, spec);
    return maximize_sum_rate(e.G1, e.G2, e.budget).value / design.eta;
}

FeedbackDesign random_noise_design(const ChannelSpec& spec, int eta, Form form, GaussianSampler& rng) {
    if (form != Form::B && form != Form::D) throw StructureError("random_noise_design: form must be B or D");
    FeedbackDesign d = FeedbackDesign::zero(form, eta, spec);
    const int n1 = d.M1.free_count(), n2 = d.M2.free_count();
    if (n1 + n2 == 0) return d;
    Eigen::VectorXd v(n1 + n2);
    for (int k = 0; k < n1 + n2; ++k) v[k] = rng.normal();
    const double radius = rng.uniform() * std::sqrt(eta * spec.P);
    v *= radius / v.norm();
    for (int k = 0; k < n1; ++k) d.M1.set_free_entry(k, v[k]);
    for (int k = 0; k < n2; ++k) d.M2.set_free_entry(k, v[n1 + k]);
    return d;
}

namespace {

FeedbackDesign random_design(const ChannelSpec& spec, int eta, std::uint64_t seed) {
    GaussianSampler rng({seed, "search"});
    return random_noise_design(spec, eta, Form::D, rng);
}

double get_coord(const FeedbackDesign& d, int k) {
    const int n1 = d.M1.free_count();
    return k < n1 ? d.M1.free_entry(k) : d.M2.free_entry(k - n1);
}

void set_coord(FeedbackDesign& d, int k, double v) {
    const int n1 = d.M1.free_count();
    if (k < n1)
        d.M1.set_free_entry(k, v);
    else
        d.M2.set_free_entry(k - n1, v);
}

}  // namespace

SearchResult search_feedback_design(const ChannelSpec& spec, int eta, int trials, std::uint64_t seed,
                                    int rate_grid) {
    spec.validate();
    if (eta < 1 || eta > 4) throw ValidationError("eta", "must be in {1,2,3,4}");
    if (trials < 1) throw ValidationError("trials", "must be >= 1");
    if (spec.direction == Direction::bc) {
        // Search the reversed dual MAC and map the winner back.
        SearchResult r = search_feedback_design(reversed_dual(spec), eta, trials, seed, rate_grid);
        r.best.M1 = reverse(r.best.M1);
        r.best.M2 = reverse(r.best.M2);
        r.best.form = Form::B;
        r.frontier = multiletter_inner_bound(spec, r.best, rate_grid);
        return r;
    }
    SearchResult res;
    res.trial_rates.assign(trials, 0.0);
    std::vector<FeedbackDesign> designs(trials);
    parallel_for(trials, [&](std::size_t t) {
        designs[t] = t == 0 ? FeedbackDesign::zero(Form::D, eta, spec)
                            : random_design(spec, eta, seed + t);
        res.trial_rates[t] = design_sum_rate(spec, designs[t]);
    });
    std::size_t best = 0;
    for (std::size_t t = 1; t < designs.size(); ++t)
        if (res.trial_rates[t] > res.trial_rates[best]) best = t;
    res.best = designs[best];
    res.best_rate = res.trial_rates[best];
    res.max_evaluated = *std::max_element(res.trial_rates.begin(), res.trial_rates.end());
    res.evaluations = trials;

    // Coordinate refinement with a halving step.
    const int n = res.best.M1.free_count() + res.best.M2.free_count();
    const double cap = eta * spec.P;
    double step = 0.25 * std::sqrt(cap);
    for (int sweep = 0; n > 0 && step > 1e-4 && sweep < 400; ++sweep) {
        bool improved = false;
        for (int k = 0; k < n; ++k)
            for (double sign : {1.0, -1.0}) {
                FeedbackDesign cand = res.best;
                set_coord(cand, k, get_coord(cand, k) + sign * step);
                if (cand.trace_cost() >= cap) continue;
                const double r = design_sum_rate(spec, cand);
                ++res.evaluations;
                res.max_evaluated = std::max(res.max_evaluated, r);
                if (r > res.best_rate + 1e-12) {
                    res.best = cand;
                    res.best_rate = r;
                    improved = true;
                }
            }
        if (!improved) step *= 0.5;
    }
    res.frontier = multiletter_inner_bound(spec, res.best, rate_grid);
    res.frontier.set_meta("trials", std::to_string(trials));
    res.frontier.set_meta("seed", std::to_string(seed));
    res.frontier.set_meta("best_sum_rate", fmt_g(res.best_rate));
    return res;
}

}  // namespace linfb
