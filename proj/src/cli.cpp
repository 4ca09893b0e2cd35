#include "linfb/cli.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "linfb/duality.hpp"
#include "linfb/errors.hpp"
#include "linfb/io.hpp"
#include "linfb/siso_capacity.hpp"
#include "linfb/simkit.hpp"

namespace linfb {

namespace {

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        write_file(path, content);
}

double scalar_flag(const std::string& text, const std::string& flag) {
    const auto v = parse_vector(text, flag);
    if (v.size() != 1) throw ValidationError(flag, "expected a single number");
    return v[0];
}

void require_positive(double v, const std::string& flag) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(flag, "must be positive");
}

void require_nonnegative(double v, const std::string& flag) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(flag, "must be nonnegative");
}

void require_grid(int n, const std::string& flag) {
    if (n < 2) throw ValidationError(flag, "must be at least 2");
}

std::string render(const RegionFrontier& f, const std::string& format, const std::string& title) {
    if (format == "csv") return frontier_to_csv(f);
    if (format == "json") return dump_json(frontier_to_json(f));
    return frontier_to_svg(f, title);
}

ChannelSpec spec_from_flags(const std::string& h1, const std::string& h2, double power,
                            Direction dir) {
    ChannelSpec s;
    s.H1 = parse_matrix(h1, "--h1");
    s.H2 = parse_matrix(h2, "--h2");
    require_positive(power, "--power");
    s.P = power;
    s.direction = dir;
    if (s.H1.cols() != s.H2.cols())
        throw ValidationError("--h2", "must have as many columns as --h1");
    s.validate();
    return s;
}

struct RegionArgs {
    std::string channel = "mac", model = "siso", h1, h2, format = "csv", out;
    double power = 10.0;
    int alpha_grid = 101, rho_grid = 101, beta_grid = 41;
};

int cmd_region(const RegionArgs& a, std::ostream& out) {
    require_positive(a.power, "--power");
    require_grid(a.alpha_grid, "--alpha-grid");
    require_grid(a.rho_grid, "--rho-grid");
    require_grid(a.beta_grid, "--beta-grid");
    const auto v1 = parse_vector(a.h1, "--h1");
    const auto v2 = parse_vector(a.h2, "--h2");
    const bool bc = a.channel == "bc";
    // The BC region is computed as the region of its dual MAC: a MISO BC
    // dualizes to a SIMO MAC and vice versa.
    std::string mac_model = a.model;
    if (bc && a.model == "miso") mac_model = "simo";
    if (bc && a.model == "simo") mac_model = "miso";
    RegionFrontier f;
    if (mac_model == "siso") {
        if (v1.size() != 1) throw ValidationError("--h1", "siso expects a single gain");
        if (v2.size() != 1) throw ValidationError("--h2", "siso expects a single gain");
        f = mac_siso_region(v1[0], v2[0], a.power, a.alpha_grid, a.rho_grid);
    } else {
        for (const auto& [v, flag] : {std::pair{&v1, "--h1"}, std::pair{&v2, "--h2"}})
            if (std::all_of(v->begin(), v->end(), [](double x) { return x == 0.0; }))
                throw ValidationError(flag, "must be a nonzero vector");
        if (mac_model == "miso")
            f = miso_mac_region(v1, v2, a.power, a.alpha_grid, a.rho_grid);
        else
            f = simo_mac_region(v1, v2, a.power, a.alpha_grid, a.rho_grid, a.beta_grid);
    }
    f.set_meta("channel", a.channel);
    f.set_meta("requested_model", a.model);
    if (bc) f.set_meta("via", "duality");
    emit(a.out, render(f, a.format, a.channel + " " + a.model + " linear-feedback region"), out);
    return 0;
}

struct NofbArgs {
    std::string h1, h2, format = "csv", out;
    double power = 10.0;
    int grid = 201;
};

int cmd_nofb(const NofbArgs& a, std::ostream& out) {
    require_positive(a.power, "--power");
    require_grid(a.grid, "--grid");
    RegionFrontier f =
        nofb_bc_siso_region(scalar_flag(a.h1, "--h1"), scalar_flag(a.h2, "--h2"), a.power, a.grid);
    emit(a.out, render(f, a.format, "bc without feedback"), out);
    return 0;
}

struct SumArgs {
    std::string model = "siso", h1 = "1", h2 = "1", variant = "exponent-K";
    double h = 1.0, power = 10.0;
    int k = 2;
};

int cmd_sum(const SumArgs& a, std::ostream& out) {
    require_positive(a.power, "--power");
    if (a.model == "siso") {
        const double h1 = scalar_flag(a.h1, "--h1"), h2 = scalar_flag(a.h2, "--h2");
        out << "sum_capacity=" << fmt_g(mac_siso_sum_capacity(h1, h2, a.power)) << "\n";
        return 0;
    }
    if (a.k < 2) throw ValidationError("--k", "must be >= 2");
    const PhiVariant v = [&] {
        try {
            return parse_phi_variant(a.variant);
        } catch (const ValidationError&) {
            throw ValidationError("--variant", "expected printed or exponent-K");
        }
    }();
    const double P = a.h * a.h * a.power;  // effective h^2 P
    out << "variant=" << to_string(v) << "\n"
        << "effective_power=" << fmt_g(P) << "\n"
        << "residual_at_1=" << fmt_g(phi_residual(a.k, P, 1.0, v)) << "\n"
        << "residual_at_K=" << fmt_g(phi_residual(a.k, P, a.k, v)) << "\n";
    if (a.k == 2 && P > 0.0)
        out << "ozarow_symmetric=" << fmt_g(symmetric_sum_capacity(1.0, P)) << "\n";
    try {
        const double phi = phi_k(a.k, P, v);
        out << "phi=" << fmt_g(phi) << "\n"
            << "residual=" << fmt_g(phi_residual(a.k, P, phi, v), 3) << "\n"
            << "sum_capacity=" << fmt_g(0.5 * std::log2(1.0 + P * phi)) << "\n";
        return 0;
    } catch (const NoRootInInterval& e) {
        out << "no_root: " << e.what() << "\n";
        return 1;
    }
}

struct DualityArgs {
    int eta = 3, trials = 100;
    std::string dims = "1x1x1;2x2x2", out;
    std::uint64_t seed = 1;
    double power = 10.0;
    bool corrupt = false;
};

struct Dims {
    int nu1, nu2, kappa;
};

std::vector<Dims> parse_dims(const std::string& text) {
    std::vector<Dims> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ';')) {
        Dims d{};
        char x1 = 0, x2 = 0;
        std::istringstream t(tok);
        if (!(t >> d.nu1 >> x1 >> d.nu2 >> x2 >> d.kappa) || x1 != 'x' || x2 != 'x' || d.nu1 < 1 ||
            d.nu2 < 1 || d.kappa < 1)
            throw ValidationError("--dims", "expected entries like 2x2x2 (nu1 x nu2 x kappa)");
        out.push_back(d);
    }
    if (out.empty()) throw ValidationError("--dims", "empty");
    return out;
}

int cmd_duality(const DualityArgs& a, std::ostream& out) {
    if (a.eta < 1 || a.eta > 4) throw ValidationError("--eta", "must be in 1..4");
    if (a.trials < 1) throw ValidationError("--trials", "must be >= 1");
    require_positive(a.power, "--power");
    const auto dims = parse_dims(a.dims);
    const char* names[3] = {"residual_S_eq_EQE", "residual_channel_identity", "residual_trace_equality"};
    double maxima[3] = {0, 0, 0};
    double worst = -1.0;
    ojson worst_j;
    for (int t = 0; t < a.trials; ++t) {
        const Dims d = dims[t % dims.size()];
        const int eta = 1 + (t / static_cast<int>(dims.size())) % a.eta;
        GaussianSampler rng({a.seed + static_cast<std::uint64_t>(t), "duality-check"});
        ChannelSpec spec;
        spec.H1 = rng.normal_matrix(d.nu1, d.kappa);
        spec.H2 = rng.normal_matrix(d.nu2, d.kappa);
        spec.P = a.power;
        const FeedbackDesign D = random_noise_design(spec, eta, Form::D, rng);
        DualityReport rep;
        if (a.corrupt && D.M1.free_count() > 0) {
            const auto B = map_mac_to_bc_params(D.M1, D.M2);
            FeedbackDesign bent = D;
            bent.M1.set_free_entry(0, bent.M1.free_entry(0) + 1e-3);
            rep = verify_duality_identities(bent, spec, B.first, B.second);
        } else {
            rep = verify_duality_identities(D, spec);
        }
        const double r[3] = {rep.residual_S_eq_EQE, rep.residual_channel_identity,
                             rep.residual_trace_equality};
        for (int k = 0; k < 3; ++k) {
            maxima[k] = std::max(maxima[k], r[k]);
            if (r[k] > worst) {
                worst = r[k];
                worst_j = ojson{{"trial", t},
                                {"eta", eta},
                                {"dims", std::to_string(d.nu1) + "x" + std::to_string(d.nu2) + "x" +
                                             std::to_string(d.kappa)},
                                {"residual", names[k]},
                                {"value", r[k]},
                                {"spec_digest", rep.spec_digest}};
            }
        }
    }
    const bool pass = std::max({maxima[0], maxima[1], maxima[2]}) < 1e-8;
    ojson j;
    j["trials"] = a.trials;
    j["eta_max"] = a.eta;
    j["dims"] = a.dims;
    j["seed"] = a.seed;
    j["corrupt"] = a.corrupt;
    j["tolerance"] = 1e-8;
    for (int k = 0; k < 3; ++k) j["max"][names[k]] = maxima[k];
    j["worst"] = worst_j;
    j["pass"] = pass;
    if (!a.out.empty()) write_file(a.out, dump_json(j));
    out << (pass ? "PASS" : "FAIL") << " worst " << worst_j["residual"].get<std::string>() << "="
        << fmt_g(worst, 3) << " (trial " << worst_j["trial"].get<int>() << ", eta "
        << worst_j["eta"].get<int>() << ", dims " << worst_j["dims"].get<std::string>() << ")\n";
    return pass ? 0 : 1;
}

struct SearchArgs {
    int eta = 2, trials = 2000, rate_grid = 65;
    std::uint64_t seed = 1;
    std::string h1 = "1", h2 = "1", out_prefix;
    double power = 10.0;
};

int cmd_search(const SearchArgs& a, std::ostream& out) {
    if (a.eta < 1 || a.eta > 4) throw ValidationError("--eta", "must be in 1..4");
    if (a.trials < 1) throw ValidationError("--trials", "must be >= 1");
    require_grid(a.rate_grid, "--rate-grid");
    const ChannelSpec spec = spec_from_flags(a.h1, a.h2, a.power, Direction::mac);
    const SearchResult r = search_feedback_design(spec, a.eta, a.trials, a.seed, a.rate_grid);
    const double nofb = design_sum_rate(spec, FeedbackDesign::zero(Form::D, 1, spec));
    ojson j;
    j["eta"] = a.eta;
    j["trials"] = a.trials;
    j["seed"] = a.seed;
    j["spec_digest"] = spec.digest();
    j["best_sum_rate"] = round12(r.best_rate);
    j["nofb_sum_rate"] = round12(nofb);
    j["max_evaluated_sum_rate"] = round12(r.max_evaluated);
    j["evaluations"] = r.evaluations;
    bool ok = true;
    if (spec.H1.size() == 1 && spec.H2.size() == 1) {
        const double oz = mac_siso_sum_capacity(spec.H1(0, 0), spec.H2(0, 0), spec.P);
        j["ozarow_sum_capacity"] = round12(oz);
        ok = r.max_evaluated <= oz + 1e-6;
        j["within_ozarow"] = ok;
    }
    if (!a.out_prefix.empty()) {
        write_file(a.out_prefix + ".design.json", dump_json(design_to_json(r.best)));
        write_file(a.out_prefix + ".frontier.csv", frontier_to_csv(r.frontier));
        write_file(a.out_prefix + ".summary.json", dump_json(j));
    }
    out << dump_json(j);
    return ok ? 0 : 1;
}

struct SimArgs {
    std::string design, h1 = "1", h2 = "1", out;
    long trials = 100000;
    std::uint64_t seed = 1;
    double power = 10.0;
};

int cmd_simulate(const SimArgs& a, std::ostream& out) {
    if (a.trials < 2) throw ValidationError("--trials", "must be >= 2");
    const ChannelSpec spec = spec_from_flags(a.h1, a.h2, a.power, Direction::mac);
    const ojson dj = [&] {
        try {
            return ojson::parse(read_file(a.design));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("--design", e.what());
        } catch (const ValidationError& e) {
            throw ValidationError("--design", e.what());
        }
    }();
    const FeedbackDesign design = design_from_json(dj, spec);
    const FeedbackDesign nf = to_noise_form(design, spec);
    if (nf.trace_cost() > nf.eta * spec.P)
        throw ValidationError("--design", "trace cost exceeds eta * power");
    const int eta = design.eta;
    const bool mac = design.form == Form::C || design.form == Form::D;

    // Causal recursion against the closed forms, per sample.
    double id_err = 0.0;
    GaussianSampler g({a.seed, "simulate/identity"});
    const long n_id = std::min<long>(a.trials, 1000);
    if (mac) {
        const DenseMatrix H1t = lifted_t(spec.H1, eta), H2t = lifted_t(spec.H2, eta);
        const auto C = omega_tilde_inv(nf.M1, nf.M2, H1t, H2t);
        const EffectiveChannel e = effective_mac_channel(nf, spec);
        const DenseMatrix d1 = nf.M1.materialize(), d2 = nf.M2.materialize();
        const DenseMatrix T = DenseMatrix::Identity(H1t.rows(), H1t.rows()) - H1t * C.first.materialize() -
                              H2t * C.second.materialize();
        for (long t = 0; t < n_id; ++t) {
            const auto s = draw_mac_block(C.first, C.second, spec, g);
            const Vector v1 = e.R1.llt().solve(s.U1), v2 = e.R2.llt().solve(s.U2);
            const Vector w = H1t * v1 + H2t * v2 + s.Z;
            id_err = std::max({id_err, max_abs(s.X1 - (v1 + d1 * w)), max_abs(s.X2 - (v2 + d2 * w)),
                               max_abs(s.Y - T.partialPivLu().solve(w))});
        }
    } else {
        const auto A = omega_inv(nf.M1, nf.M2, lifted(spec.H1, eta), lifted(spec.H2, eta));
        const DenseMatrix b1 = nf.M1.materialize(), b2 = nf.M2.materialize();
        for (long t = 0; t < n_id; ++t) {
            const auto s = draw_bc_block(A.first, A.second, spec, g);
            const auto n = simulate_bc_block_noise_form(nf.M1, nf.M2, spec, s.U, s.Z1, s.Z2);
            id_err = std::max({id_err, max_abs(s.X - (s.U + b1 * s.Z1 + b2 * s.Z2)), max_abs(s.X - n.X)});
        }
    }
    const PowerReport p = verify_power_lemma(design, spec, a.trials, {a.seed, "simulate/power"});
    const double alg_err = std::abs(p.covariance_algebra - p.analytic);
    const bool pass = id_err < 1e-10 && alg_err < 1e-9 * std::max(1.0, p.analytic) && p.pass;
    ojson j;
    j["form"] = to_string(design.form);
    j["eta"] = eta;
    j["trials"] = a.trials;
    j["seed"] = a.seed;
    j["identity_samples"] = n_id;
    j["identity_max_error"] = id_err;
    j["power_empirical"] = round12(p.empirical);
    j["power_analytic"] = round12(p.analytic);
    j["power_covariance_algebra"] = round12(p.covariance_algebra);
    j["power_std_error"] = round12(p.std_error);
    j["power_relative_gap"] = round12(p.relative_gap);
    j["power_within_3sigma"] = p.pass;
    j["pass"] = pass;
    emit(a.out, dump_json(j), out);
    return pass ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linear-feedback capacity regions and MAC-BC duality checks", "linfb"};
    app.require_subcommand(1);

    double rh1 = 1, rh2 = 1, p1 = 1, p2 = 1;
    auto* rho = app.add_subcommand("rho-star", "Solve the correlation quartic");
    rho->add_option("--h1", rh1)->required();
    rho->add_option("--h2", rh2)->required();
    rho->add_option("--p1", p1)->required();
    rho->add_option("--p2", p2)->required();

    RegionArgs ra;
    auto* region = app.add_subcommand("region", "Linear-feedback capacity region frontier");
    region->add_option("--channel", ra.channel)->check(CLI::IsMember({"mac", "bc"}));
    region->add_option("--model", ra.model)->check(CLI::IsMember({"siso", "miso", "simo"}));
    region->add_option("--h1", ra.h1, "gain or comma-separated vector")->required();
    region->add_option("--h2", ra.h2)->required();
    region->add_option("--power", ra.power);
    region->add_option("--alpha-grid", ra.alpha_grid);
    region->add_option("--rho-grid", ra.rho_grid);
    region->add_option("--beta-grid", ra.beta_grid);
    region->add_option("--format", ra.format)->check(CLI::IsMember({"csv", "json", "svg"}));
    region->add_option("--out", ra.out);

    NofbArgs na;
    auto* nofb = app.add_subcommand("nofb-region", "SISO BC superposition region without feedback");
    nofb->add_option("--h1", na.h1)->required();
    nofb->add_option("--h2", na.h2)->required();
    nofb->add_option("--power", na.power);
    nofb->add_option("--grid", na.grid);
    nofb->add_option("--format", na.format)->check(CLI::IsMember({"csv", "json", "svg"}));
    nofb->add_option("--out", na.out);

    SumArgs sa;
    auto* sum = app.add_subcommand("sum-capacity", "Linear-feedback sum-capacity");
    sum->set_help_flag("--help", "Print this help message and exit");
    sum->add_option("--model", sa.model)->check(CLI::IsMember({"siso", "k-user"}));
    sum->add_option("--h1", sa.h1);
    sum->add_option("--h2", sa.h2);
    sum->add_option("--h", sa.h, "common gain for k-user");
    sum->add_option("--power", sa.power);
    sum->add_option("--k", sa.k);
    sum->add_option("--variant", sa.variant);

    DualityArgs da;
    auto* dual = app.add_subcommand("duality-check", "Verify the duality identities on random designs");
    dual->add_option("--eta", da.eta, "largest block length");
    dual->add_option("--dims", da.dims, "nu1 x nu2 x kappa list, e.g. 1x1x1;2x2x2");
    dual->add_option("--trials", da.trials);
    dual->add_option("--seed", da.seed);
    dual->add_option("--power", da.power);
    dual->add_flag("--corrupt", da.corrupt, "perturb D after forming B (negative control)");
    dual->add_option("--out", da.out);

    SearchArgs se;
    auto* search = app.add_subcommand("search", "Random search over feedback designs");
    search->add_option("--eta", se.eta);
    search->add_option("--trials", se.trials);
    search->add_option("--seed", se.seed);
    search->add_option("--h1", se.h1, "matrix rows separated by ';'");
    search->add_option("--h2", se.h2);
    search->add_option("--power", se.power);
    search->add_option("--rate-grid", se.rate_grid);
    search->add_option("--out-prefix", se.out_prefix);

    SimArgs si;
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo check of a feedback design");
    sim->add_option("--design", si.design)->required();
    sim->add_option("--trials", si.trials);
    sim->add_option("--seed", si.seed);
    sim->add_option("--h1", si.h1);
    sim->add_option("--h2", si.h2);
    sim->add_option("--power", si.power);
    sim->add_option("--out", si.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*rho) {
            require_nonnegative(p1, "--p1");
            require_nonnegative(p2, "--p2");
            if (!std::isfinite(rh1)) throw ValidationError("--h1", "must be finite");
            if (!std::isfinite(rh2)) throw ValidationError("--h2", "must be finite");
            const double r = rho_star(rh1, rh2, p1, p2);
            out << "rho=" << fmt_g(r, 15) << "\n"
                << "residual=" << fmt_g(rho_star_residual(rh1, rh2, p1, p2, r), 3) << "\n";
            return 0;
        }
        if (*region) return cmd_region(ra, out);
        if (*nofb) return cmd_nofb(na, out);
        if (*sum) return cmd_sum(sa, out);
        if (*dual) return cmd_duality(da, out);
        if (*search) return cmd_search(se, out);
        if (*sim) return cmd_simulate(si, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace linfb
