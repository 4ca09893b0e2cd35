// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "linfb/blockmat.hpp"
#include "linfb/cli.hpp"
#include "linfb/duality.hpp"
#include "linfb/errors.hpp"
#include "linfb/io.hpp"
#include "linfb/mimo_regions.hpp"
#include "linfb/rng.hpp"
#include "linfb/simkit.hpp"
#include "linfb/siso_capacity.hpp"
#include "oracles.hpp"

using namespace linfb;
using oracle::Mat;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 means no runtime limit
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

ChannelSpec random_spec(std::mt19937_64& g, int nu1, int nu2, int kappa, double P = 10.0) {
    ChannelSpec s;
    s.H1 = oracle::random_matrix(g, nu1, kappa);
    s.H2 = oracle::random_matrix(g, nu2, kappa);
    s.P = P;
    return s;
}

BlockTriangularSet random_set(std::mt19937_64& g, int eta, int br, int bc, double scale, bool zero) {
    if (zero) return BlockTriangularSet::zero(eta, br, bc);
    return BlockTriangularSet::from_dense(oracle::random_strict_lower(g, eta, br, bc, scale), eta, br, bc);
}

Mat spd_sqrt_inv(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

// 1: reverse-image operator algebra
Outcome operator_suite(bool one_sided) {
    std::mt19937_64 g(one_sided ? 101 : 1);
    std::uniform_int_distribution<int> dim(1, 6);
    double prod = 0, inv = 0;
    bool exact = true, structure = true;
    for (int t = 0; t < 500; ++t) {
        const Mat X = oracle::random_matrix(g, dim(g), dim(g));
        exact &= reverse(reverse(X)) == X && reverse(X) == oracle::reverse(X);
        const Mat Y = oracle::random_matrix(g, static_cast<int>(X.cols()), dim(g));
        prod = std::max(prod, max_abs(reverse(Y) * reverse(X) - reverse(Mat(X * Y))));
        const int n = dim(g);
        const Mat S = oracle::random_matrix(g, n, n) + 4.0 * Mat::Identity(n, n);
        inv = std::max(inv, max_abs(reverse(Mat(S.inverse())) - reverse(S).inverse()));

        const int eta = 1 + t % 4, br = 1 + t % 3, bc = 1 + (t / 3) % 3;
        const auto A1 = random_set(g, eta, br, bc, 1.0, false);
        const auto A2 = random_set(g, eta, bc, br, 1.0, one_sided);
        for (const auto* A : {&A1, &A2}) {
            const auto R = reverse(*A);
            const Mat Rd = reverse(A->materialize());
            structure &= R.block_rows() == A->block_cols() && R.block_cols() == A->block_rows();
            structure &= strict_lower_residual(Rd, eta, A->block_cols(), A->block_rows()) == 0.0;
            structure &= R.materialize() == Rd;
        }
        if (one_sided) structure &= max_abs(reverse(A2).materialize()) == 0.0;
    }
    Outcome o;
    o.ok = exact && structure && prod < 1e-12 && inv < 1e-9;
    o.detail = std::string("double_reverse=") + (exact ? "exact" : "inexact") +
               " product=" + fmt("%.3g", prod) + " inverse=" + fmt("%.3g", inv) +
               " structure=" + (structure ? "ok" : "broken");
    return o;
}

// 2: omega / omega-tilde round trips
Outcome bijection_suite(bool one_sided) {
    std::mt19937_64 g(one_sided ? 102 : 2);
    double worst = 0, zero_block = 0;
    for (int t = 0; t < 200; ++t) {
        const int eta = 1 + t % 4;
        const auto spec = random_spec(g, 1 + t % 2, 1 + (t / 2) % 2, 1 + (t / 4) % 2);
        const int k = spec.kappa(), n1 = spec.nu1(), n2 = spec.nu2();
        const Mat H1B = lifted(spec.H1, eta), H2B = lifted(spec.H2, eta);
        const Mat H1t = lifted_t(spec.H1, eta), H2t = lifted_t(spec.H2, eta);

        const auto A1 = random_set(g, eta, k, n1, 0.5, false);
        const auto A2 = random_set(g, eta, k, n2, 0.5, one_sided);
        const auto B = omega(A1, A2, H1B, H2B);
        const auto A = omega_inv(B.first, B.second, H1B, H2B);
        worst = std::max({worst, max_abs(A.first.materialize() - A1.materialize()),
                          max_abs(A.second.materialize() - A2.materialize())});
        const auto D1 = random_set(g, eta, n1, k, 0.5, false);
        const auto D2 = random_set(g, eta, n2, k, 0.5, one_sided);
        const auto C = omega_tilde_inv(D1, D2, H1t, H2t);
        const auto D = omega_tilde(C.first, C.second, H1t, H2t);
        worst = std::max({worst, max_abs(D.first.materialize() - D1.materialize()),
                          max_abs(D.second.materialize() - D2.materialize())});
        if (one_sided)
            zero_block = std::max({zero_block, max_abs(B.second.materialize()),
                                   max_abs(C.second.materialize()), max_abs(A.second.materialize()),
                                   max_abs(D.second.materialize())});
    }
    Outcome o;
    o.ok = worst < 1e-10 && zero_block == 0.0;
    o.detail = "designs=200 max_roundtrip=" + fmt("%.3g", worst);
    if (one_sided) o.detail += " zero_block=" + fmt("%g", zero_block);
    return o;
}

// 3: causal simulation against closed forms
Outcome inner_code_suite(bool one_sided) {
    std::mt19937_64 g(one_sided ? 103 : 3);
    double worst = 0;
    int samples = 0;
    for (int t = 0; t < 20; ++t) {
        const int eta = 1 + t % 4;
        const auto spec = random_spec(g, 1 + t % 2, 1 + (t / 4) % 2, 1 + (t / 2) % 2);
        const int k = spec.kappa(), n1 = spec.nu1(), n2 = spec.nu2();
        const Mat I1 = Mat::Identity(eta * n1, eta * n1), I2 = Mat::Identity(eta * n2, eta * n2);
        GaussianSampler rng({static_cast<std::uint64_t>(t), one_sided ? "acc3-one" : "acc3"});
        if (t % 2 == 0) {
            const Mat a1 = oracle::random_strict_lower(g, eta, k, n1, 0.4);
            const Mat a2 = one_sided ? Mat::Zero(eta * k, eta * n2) : oracle::random_strict_lower(g, eta, k, n2, 0.4);
            const auto A1 = BlockTriangularSet::from_dense(a1, eta, k, n1);
            const auto A2 = BlockTriangularSet::from_dense(a2, eta, k, n2);
            const Mat H1B = oracle::kron_identity(spec.H1, eta), H2B = oracle::kron_identity(spec.H2, eta);
            const Mat Ti = (Mat::Identity(eta * k, eta * k) - a1 * H1B - a2 * H2B).inverse();
            const Mat b1 = Ti * a1, b2 = Ti * a2;
            const auto B1 = BlockTriangularSet::from_dense(b1, eta, k, n1);
            const auto B2 = BlockTriangularSet::from_dense(b2, eta, k, n2);
            for (int s = 0; s < 50; ++s, ++samples) {
                const auto m = draw_bc_block(A1, A2, spec, rng);
                const auto nf = simulate_bc_block_noise_form(B1, B2, spec, m.U, m.Z1, m.Z2);
                worst = std::max({worst, max_abs(m.X - (m.U + b1 * m.Z1 + b2 * m.Z2)),
                                  max_abs(m.Y1 - (H1B * m.U + (I1 + H1B * b1) * m.Z1 + H1B * b2 * m.Z2)),
                                  max_abs(m.Y2 - (H2B * m.U + (I2 + H2B * b2) * m.Z2 + H2B * b1 * m.Z1)),
                                  max_abs(nf.X - m.X)});
            }
        } else {
            const Mat c1 = oracle::random_strict_lower(g, eta, n1, k, 0.4);
            const Mat c2 = one_sided ? Mat::Zero(eta * n2, eta * k) : oracle::random_strict_lower(g, eta, n2, k, 0.4);
            const auto C1 = BlockTriangularSet::from_dense(c1, eta, n1, k);
            const auto C2 = BlockTriangularSet::from_dense(c2, eta, n2, k);
            const Mat H1t = oracle::kron_identity(spec.H1.transpose(), eta);
            const Mat H2t = oracle::kron_identity(spec.H2.transpose(), eta);
            const Mat Ti = (Mat::Identity(eta * k, eta * k) - H1t * c1 - H2t * c2).inverse();
            const Mat d1 = c1 * Ti, d2 = c2 * Ti;
            const Mat M1 = (I1 + d1 * H1t).transpose() * (I1 + d1 * H1t) + (d2 * H1t).transpose() * (d2 * H1t);
            const Mat M2 = (I2 + d2 * H2t).transpose() * (I2 + d2 * H2t) + (d1 * H2t).transpose() * (d1 * H2t);
            const Mat Q1i = spd_sqrt_inv(M1), Q2i = spd_sqrt_inv(M2);
            for (int s = 0; s < 50; ++s, ++samples) {
                const auto m = draw_mac_block(C1, C2, spec, rng);
                const Eigen::VectorXd w = H1t * Q1i * m.U1 + H2t * Q2i * m.U2 + m.Z;
                worst = std::max({worst, max_abs(m.X1 - (Q1i * m.U1 + d1 * w)),
                                  max_abs(m.X2 - (Q2i * m.U2 + d2 * w)), max_abs(m.Y - Ti * w)});
            }
        }
    }
    Outcome o;
    o.ok = worst < 1e-10 && samples == 1000;
    o.detail = "designs=20 samples=" + std::to_string(samples) + " max_error=" + fmt("%.3g", worst);
    return o;
}

// 4: power accounting, exact algebra and Monte-Carlo
Outcome power_suite(bool one_sided) {
    std::mt19937_64 g(one_sided ? 104 : 4);
    double algebra = 0, worst_sigma = 0;
    bool mc = true;
    const long trials = 100000;
    for (int t = 0; t < 4; ++t) {
        const bool bc = t == 3;
        const int eta = 2 + t % 2;
        auto spec = t == 2 ? random_spec(g, 2, 2, 2) : make_siso_spec(1.0, 0.6, 10.0);
        if (bc) spec.direction = Direction::bc;
        GaussianSampler drng({static_cast<std::uint64_t>(t), "acc4-design"});
        auto design = random_noise_design(spec, eta, bc ? Form::B : Form::D, drng);
        if (one_sided) design.M2 = BlockTriangularSet::zero(eta, design.M2.block_rows(), design.M2.block_cols());
        const auto r = verify_power_lemma(design, spec, trials, {static_cast<std::uint64_t>(t), "acc4"});
        algebra = std::max(algebra, std::abs(r.covariance_algebra - r.analytic));
        mc &= r.pass;
        worst_sigma = std::max(worst_sigma, r.gap / r.std_error);
    }
    Outcome o;
    o.ok = algebra < 1e-9 && mc;
    o.detail = "designs=4 trials=100000 algebra_residual=" + fmt("%.3g", algebra) +
               " worst_gap_sigma=" + fmt("%.3f", worst_sigma);
    return o;
}

// 5: duality identities
Outcome duality_suite(bool one_sided) {
    std::mt19937_64 g(one_sided ? 105 : 5);
    double a = 0, b = 0, c = 0;
    for (int t = 0; t < 100; ++t) {
        const int eta = 1 + t % 3;
        const auto spec = t % 2 ? random_spec(g, 2, 2, 2) : random_spec(g, 1, 1, 1);
        GaussianSampler rng({static_cast<std::uint64_t>(t), one_sided ? "acc5-one" : "acc5"});
        auto D = random_noise_design(spec, eta, Form::D, rng);
        if (one_sided) D.M2 = BlockTriangularSet::zero(eta, D.M2.block_rows(), D.M2.block_cols());
        const auto r = verify_duality_identities(D, spec);
        a = std::max(a, r.residual_S_eq_EQE);
        b = std::max(b, r.residual_channel_identity);
        c = std::max(c, r.residual_trace_equality);
        if (one_sided && max_abs(map_mac_to_bc_params(D.M1, D.M2).second.materialize()) != 0.0) c = 1.0;
    }
    Outcome o;
    o.ok = a < 1e-8 && b < 1e-8 && c < 1e-8;
    o.detail = "designs=100 S_eq_EQE=" + fmt("%.3g", a) + " channel=" + fmt("%.3g", b) + " trace=" + fmt("%.3g", c);
    return o;
}

Outcome rho_star_suite() {
    double worst = 0;
    int points = 0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j, ++points) {
            const double h1 = 0.2 + 0.15 * i, h2 = 1.0;
            const double P1 = 10.0 * (j + 0.5) / 10.0, P2 = 10.0 - P1;
            const double r = rho_star(h1, h2, P1, P2);
            worst = std::max(worst, std::abs(rho_star_residual(h1, h2, P1, P2, r)));
        }
    }
    const bool boundary = rho_star(0, 1, 5, 5) == 0.0 && rho_star(1, 0, 5, 5) == 0.0 &&
                          rho_star(1, 1, 0, 5) == 0.0 && rho_star(1, 1, 5, 0) == 0.0;
    Outcome o;
    o.ok = worst < 1e-12 && boundary && points == 100;
    o.detail = "points=100 max_residual=" + fmt("%.3g", worst) + " boundary=" + (boundary ? "zero" : "nonzero");
    return o;
}

Outcome zeta_suite() {
    const double cases[][2] = {{1, 1}, {1, 10}, {0.3, 100}};
    bool argmax = true;
    double sym = 0;
    for (const auto& c : cases) {
        std::vector<double> z(1001);
        for (int i = 0; i <= 1000; ++i) z[i] = zeta(i / 1000.0, c[0], c[1]);
        for (int i = 0; i <= 1000; ++i) {
            argmax &= z[i] <= z[500];
            sym = std::max(sym, std::abs(z[i] - z[1000 - i]));
        }
    }
    Outcome o;
    o.ok = argmax && sym < 1e-10;
    o.detail = std::string("argmax_at_half=") + (argmax ? "yes" : "no") + " symmetry=" + fmt("%.3g", sym);
    return o;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "linfb");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome figure3() {
    const auto dir = std::filesystem::temp_directory_path() / "linfb_acceptance";
    std::filesystem::create_directories(dir);
    const auto mac = (dir / "fig3_mac.csv").string(), bc = (dir / "fig3_bc.csv").string();
    const int c1 = cli({"region", "--channel", "mac", "--h1", "1", "--h2", "1", "--power", "10", "--out", mac});
    const int c2 = cli({"region", "--channel", "bc", "--h1", "1", "--h2", "1", "--power", "10", "--out", bc});
    Outcome o;
    if (c1 || c2) return {false, "cli exit codes " + std::to_string(c1) + "," + std::to_string(c2)};
    const bool same = read_file(mac) == read_file(bc);
    const auto m = frontier_from_csv(read_file(mac)).max_sum_point();
    const double target = 0.5 * std::log2(1.0 + 10.0 * (1.0 + oracle::rho_star(1, 1, 5, 5)));
    const double err = std::abs(m.R1 + m.R2 - target);
    o.ok = same && err < 1e-4;
    o.detail = std::string("files_identical=") + (same ? "yes" : "no") + " max_sum=" + fmt("%.10f", m.R1 + m.R2) +
               " target=" + fmt("%.10f", target) + " error=" + fmt("%.3g", err);
    return o;
}

Outcome figure4() {
    const double h1 = 1.0 / std::sqrt(5.0), h2 = 1.0, P = 10.0;
    const auto region = mac_siso_region(h1, h2, P, 101, 101);
    const auto base = nofb_bc_siso_region(h1, h2, P, 201);
    double slack = 1e300;
    for (const auto& p : base.points) slack = std::min(slack, mac_siso_max_r2_given_r1(h1, h2, P, p.R1) - p.R2);
    Outcome o;
    o.ok = !region.points.empty() && slack >= -1e-9;
    o.detail = "region_points=" + std::to_string(region.points.size()) + " baseline_points=" +
               std::to_string(base.points.size()) + " min_slack=" + fmt("%.3g", slack);
    return o;
}

Outcome sandwich() {
    const auto spec = make_siso_spec(1, 1, 10);
    const double nofb = 0.5 * std::log2(11.0), ozarow = oracle::sum_capacity_dense(1, 1, 10);
    const auto s1 = search_feedback_design(spec, 1, 200, 1);
    const auto s2 = search_feedback_design(spec, 2, 2000, 1);
    double top = std::max(s1.max_evaluated, s2.max_evaluated);
    for (double r : s2.trial_rates) top = std::max(top, r);
    Outcome o;
    o.ok = std::abs(s1.best_rate - nofb) < 1e-6 && s2.best_rate > nofb && top <= ozarow + 1e-6;
    o.detail = "eta1=" + fmt("%.9f", s1.best_rate) + " nofb=" + fmt("%.9f", nofb) + " eta2=" +
               fmt("%.9f", s2.best_rate) + " max_evaluated=" + fmt("%.9f", top) + " ozarow=" + fmt("%.9f", ozarow);
    return o;
}

Outcome k_user() {
    double worst = 0;
    for (double P : {1.0, 10.0, 100.0})
        worst = std::max(worst, std::abs(k_user_symmetric_sum_capacity(2, P, PhiVariant::exponent_k) -
                                         symmetric_sum_capacity(1.0, P)));
    std::string diag;
    try {
        phi_k(2, 10.0, PhiVariant::printed);
        diag = "printed_root_found";
    } catch (const NoRootInInterval&) {
        diag = "printed_no_root residual_at_1=" + fmt("%.6g", phi_residual(2, 10.0, 1.0, PhiVariant::printed)) +
               " residual_at_K=" + fmt("%.6g", phi_residual(2, 10.0, 2.0, PhiVariant::printed));
    }
    Outcome o;
    o.ok = worst < 1e-8;
    o.detail = "exponent_K_error=" + fmt("%.3g", worst) + " " + diag;
    return o;
}

Outcome one_sided() {
    const std::function<Outcome(bool)> suites[] = {operator_suite, bijection_suite, inner_code_suite,
                                                   power_suite, duality_suite};
    Outcome o;
    for (int i = 0; i < 5; ++i) {
        const auto r = suites[i](true);
        o.ok &= r.ok;
        o.detail += (i ? " | " : "") + std::to_string(i + 1) + (r.ok ? ":ok " : ":fail ") + r.detail;
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "operator algebra", 5, [] { return operator_suite(false); }},
        {2, "bijections", 5, [] { return bijection_suite(false); }},
        {3, "inner-code identities", 10, [] { return inner_code_suite(false); }},
        {4, "power accounting", 30, [] { return power_suite(false); }},
        {5, "duality identities", 20, [] { return duality_suite(false); }},
        {6, "rho* solver", 1, rho_star_suite},
        {7, "zeta argmax and symmetry", 0, zeta_suite},
        {8, "symmetric region", 30, figure3},
        {9, "asymmetric region dominance", 0, figure4},
        {10, "multi-letter sandwich", 120, sandwich},
        {11, "k-user consistency", 1, k_user},
        {12, "one-sided feedback", 0, one_sided},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.limit_s == 0 || secs < c.limit_s;
        const bool ok = o.ok && in_time;
        failed += !ok;
        std::printf("%s %2d %s: %s time=%.3fs%s\n", ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    in_time ? "" : " (over limit)");
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
