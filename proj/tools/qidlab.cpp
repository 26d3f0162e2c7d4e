#include "qidlab/charfn.hpp"
#include "qidlab/dist_model.hpp"
#include "qidlab/errors.hpp"
#include "qidlab/harness.hpp"
#include "qidlab/infimum.hpp"
#include "qidlab/io_json.hpp"
#include "qidlab/spectral.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace qid;

constexpr double kTwoPi = 6.283185307179586;

struct GridConfig {
    double tmin = 0.0;
    double tmax = kTwoPi;
    int npoints = 1024;
};

// Half-open convention: n points starting at tmin with step (tmax - tmin)/n.
std::vector<double> make_grid(const GridConfig& g) {
    if (g.npoints < 2)
        throw SpecError("grid requires n_points >= 2");
    if (!(g.tmin < g.tmax))
        throw SpecError("grid requires t_min < t_max");
    const double step = (g.tmax - g.tmin) / g.npoints;
    std::vector<double> ts(static_cast<std::size_t>(g.npoints));
    for (int i = 0; i < g.npoints; ++i)
        ts[static_cast<std::size_t>(i)] = g.tmin + step * i;
    return ts;
}

void check_tol(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw SpecError("tol must be positive");
}

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SpecError("cannot write output file: " + path);
    out << text;
    if (!out)
        throw SpecError("failed writing output file: " + path);
}

void ensure_roundtrip(const std::string& text, const std::string& reparsed, const char* what) {
    if (text != reparsed)
        throw Error(std::string("internal: ") + what + " JSON does not round-trip");
}

Part parse_part(const std::string& s) {
    if (s == "full")
        return Part::Full;
    if (s == "d")
        return Part::Discrete;
    if (s == "a")
        return Part::AbsCont;
    if (s == "s")
        return Part::Singular;
    if (s == "c")
        return Part::Continuous;
    throw SpecError("unknown part '" + s + "' (expected full, d, a, s, c)");
}

// ------------------------------------------------------------------ eval

int run_eval(const std::string& spec_path, const std::string& part_s, const GridConfig& grid,
             const std::string& out_path) {
    DistributionSpec spec = load_spec_file(spec_path);
    Part part = parse_part(part_s);
    std::vector<double> ts = make_grid(grid);
    std::vector<std::complex<double>> vals(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
        vals[i] = eval_part(spec, part, ts[i]);
    write_output(eval_csv(ts, vals), out_path);
    return 0;
}

// -------------------------------------------------------------- spectral

int run_spectral(const std::string& spec_path, const std::string& out_path) {
    DistributionSpec spec = load_spec_file(spec_path);
    if (spec.c_d != 1.0 || !spec.discrete)
        throw SpecError("spectral extraction requires a purely discrete spec (c_d = 1)");
    LatticeExtraction ex = extract_lattice_spectral(*spec.discrete);
    std::string text = pair_to_json(ex.pair);
    ensure_roundtrip(text, pair_to_json(parse_pair_json(text)), "pair");
    write_output(text, out_path);
    return 0;
}

// ----------------------------------------------------------------- synth

int run_synth(const std::string& pair_path, const GridConfig& grid,
              const std::string& out_path) {
    SpectralPair pair = load_pair_file(pair_path);
    std::vector<double> ts = make_grid(grid);
    std::vector<std::complex<double>> vals(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
        vals[i] = lk_charfn(pair, ts[i]);
    write_output(eval_csv(ts, vals), out_path);
    return 0;
}

// ------------------------------------------------------------------- inf

std::string cert_phrase(const InfCertificate& c) {
    std::string s = "[" + fmt_double(c.lower_bound) + ", " + fmt_double(c.upper_bound) + "]";
    if (c.zero_hit)
        s += " (zero hit)";
    if (!c.converged)
        s += " (node budget exhausted)";
    return s;
}

int run_inf(const std::string& spec_path, const std::string& target, double tol,
            const std::string& out_path) {
    check_tol(tol);
    DistributionSpec spec = load_spec_file(spec_path);
    InfReport rep;
    rep.target = target;
    if (target == "d") {
        MuDEstimate m = estimate_mu_d(spec, tol);
        rep.lattice = m.lattice;
        rep.period = m.period;
        rep.certificates = m.ladder;
        const InfCertificate& fin = m.final_cert();
        if (m.lattice)
            rep.summary = "inf |f_d| over one exact period " + fmt_double(m.period) + ": " +
                          cert_phrase(fin);
        else
            rep.summary = "inf |f_d| on [-" + fmt_double(fin.window_T) + ", " +
                          fmt_double(fin.window_T) + "]: " + cert_phrase(fin) +
                          "; no global claim for non-lattice atoms";
    } else if (target == "full") {
        MuEstimate m = estimate_mu(spec, tol);
        rep.certificates = m.ladder;
        rep.asymptotic = m.asymptotic;
        rep.global_lower = m.global_lower;
        rep.global_valid = m.global_valid;
        const InfCertificate& fin = m.final_cert();
        rep.summary = "inf |f| on [-" + fmt_double(fin.window_T) + ", " + fmt_double(fin.window_T) +
                      "]: " + cert_phrase(fin);
        if (m.global_valid)
            rep.summary += "; certified global lower bound " + fmt_double(m.global_lower);
        else
            rep.summary += "; " + m.asymptotic.note;
    } else {
        throw SpecError("unknown target '" + target + "' (expected full or d)");
    }
    std::string text = inf_report_to_json(rep);
    ensure_roundtrip(text, inf_report_to_json(parse_inf_report_json(text)), "inf report");
    write_output(text, out_path);
    return 0;
}

// ----------------------------------------------------------------- check

int run_check(const std::string& spec_path, double tol, const std::string& out_path) {
    check_tol(tol);
    DistributionSpec spec = load_spec_file(spec_path);
    CheckReport rep;
    rep.report = check_conditions(spec, tol);
    rep.summary = std::string("verdict ") + to_string(rep.report.verdict) + ": " +
                  rep.report.context;
    std::string text = check_report_to_json(rep);
    ensure_roundtrip(text, check_report_to_json(parse_check_report_json(text)), "check report");
    write_output(text, out_path);
    return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyConfig {
    std::string spec_path;
    std::string pair_path;
    int lemma = 0;
    bool integrals = false;
    bool parseval = false;
    bool translations = false;
    GridConfig grid{-8.0, 8.0, 32};
    double hmax = 4.0;
    double t = 0.5;
    double tau = 10.0;
    double epsilon = 0.1;
    double mu = 0.0;
    double window = 100.0;
    std::string out_path;
    std::string csv_path;
};

SpectralPair verify_pair(const VerifyConfig& cfg) {
    if (!cfg.pair_path.empty())
        return load_pair_file(cfg.pair_path);
    if (cfg.spec_path.empty())
        throw SpecError("verify --lemma 1 needs --pair or a purely discrete --spec");
    DistributionSpec spec = load_spec_file(cfg.spec_path);
    if (spec.c_d != 1.0 || !spec.discrete)
        throw SpecError("verify --lemma 1 via --spec requires a purely discrete spec (c_d = 1)");
    return extract_lattice_spectral(*spec.discrete).pair;
}

DistributionSpec verify_spec(const VerifyConfig& cfg, const char* what) {
    if (cfg.spec_path.empty())
        throw SpecError(std::string("verify ") + what + " needs --spec");
    return load_spec_file(cfg.spec_path);
}

int run_verify_lemma1(const VerifyConfig& cfg) {
    SpectralPair pair = verify_pair(cfg);
    QuotientGridReport rep;
    rep.t_grid = make_grid(cfg.grid);
    if (!(cfg.hmax > 0.0))
        throw SpecError("--hmax must be positive");
    GridConfig hg{0.0, cfg.hmax, cfg.grid.npoints};
    rep.h_grid = make_grid(hg);
    rep.constants_paper = bound_constants_paper(pair.G);
    rep.constants_corrected = bound_constants_corrected(pair.G);
    rep.max_residual_paper = 0.0;
    rep.max_residual_corrected = 0.0;
    double min_margin_p = std::numeric_limits<double>::infinity();
    double min_margin_c = std::numeric_limits<double>::infinity();
    for (double t : rep.t_grid)
        for (double h : rep.h_grid) {
            QuotientCheck q = quotient_check(pair, t, h);
            rep.rows.push_back(q);
            rep.max_residual_paper = std::max(rep.max_residual_paper, q.identity_residual_paper);
            rep.max_residual_corrected =
                std::max(rep.max_residual_corrected, q.identity_residual_corrected);
            if (q.bound_margin_paper < 0.0)
                ++rep.violations_paper;
            if (q.bound_margin_corrected < 0.0)
                ++rep.violations_corrected;
            min_margin_p = std::min(min_margin_p, q.bound_margin_paper);
            min_margin_c = std::min(min_margin_c, q.bound_margin_corrected);
        }
    rep.min_margin_paper = min_margin_p;
    rep.min_margin_corrected = min_margin_c;
    const bool k1 = rep.max_residual_paper < 1e-9;
    const bool k2 = rep.max_residual_corrected < 1e-9;
    rep.matched_kappa = k2 ? 2 : (k1 ? 1 : 0);
    rep.summary = "identity matches kappa=" + std::to_string(rep.matched_kappa) +
                  " (residuals: paper " + fmt_double(rep.max_residual_paper) + ", corrected " +
                  fmt_double(rep.max_residual_corrected) + "); bound violations: paper " +
                  std::to_string(rep.violations_paper) + ", corrected " +
                  std::to_string(rep.violations_corrected);
    std::string text = quotient_report_to_json(rep);
    ensure_roundtrip(text, quotient_report_to_json(parse_quotient_report_json(text)),
                     "quotient report");
    write_output(text, cfg.out_path);
    if (!cfg.csv_path.empty())
        write_output(quotient_report_to_csv(rep), cfg.csv_path);
    return 0;
}

int run_verify_lemma2(const VerifyConfig& cfg) {
    DistributionSpec spec = verify_spec(cfg, "--lemma 2");
    DecayReport rep;
    rep.report = lemma2_decay(spec, make_grid(cfg.grid), {10.0, 100.0, 1000.0});
    rep.summary = "max mean of |f_c|^2 over the t-grid:";
    for (const auto& row : rep.report.rows)
        rep.summary += " T=" + fmt_double(row.T) + " -> " + fmt_double(row.max_mean) + ";";
    std::string text = decay_report_to_json(rep);
    ensure_roundtrip(text, decay_report_to_json(parse_decay_report_json(text)), "decay report");
    write_output(text, cfg.out_path);
    if (!cfg.csv_path.empty())
        write_output(decay_report_to_csv(rep), cfg.csv_path);
    return 0;
}

int run_verify_integrals(const VerifyConfig& cfg) {
    DistributionSpec spec = verify_spec(cfg, "--integrals");
    IntegralsReport rep;
    rep.integrals = proof_integrals(spec, cfg.t, cfg.tau);
    const ProofIntegrals& p = rep.integrals;
    if (p.ill_conditioned)
        rep.summary = "|f(t)| below 1e-12; I skipped, J computed directly";
    else
        rep.summary = std::string("identity ") + (p.identity_ok ? "ok" : "FAILED") +
                      " (residual " + fmt_double(p.identity_residual) + "); chain " +
                      (p.chain_ok ? "ok" : "FAILED") + " (margin " + fmt_double(p.chain_margin) +
                      ")";
    std::string text = integrals_report_to_json(rep);
    ensure_roundtrip(text, integrals_report_to_json(parse_integrals_report_json(text)),
                     "integrals report");
    write_output(text, cfg.out_path);
    if (!cfg.csv_path.empty())
        write_output(integrals_report_to_csv(rep), cfg.csv_path);
    return 0;
}

int run_verify_parseval(const VerifyConfig& cfg) {
    DistributionSpec spec = verify_spec(cfg, "--parseval");
    if (!spec.discrete)
        throw SpecError("verify --parseval requires a spec with a discrete part");
    TrigPoly phi = trig_poly_of_discrete(*spec.discrete);
    ParsevalDoc rep;
    rep.report = parseval_A(phi, {100.0, 1000.0, 10000.0});
    rep.summary = "A_exact = " + fmt_double(rep.report.A_exact);
    if (!rep.report.A_means.empty())
        rep.summary += "; |A_mean(T_max) - A_exact| = " +
                       fmt_double(std::fabs(rep.report.A_means.back() - rep.report.A_exact));
    std::string text = parseval_report_to_json(rep);
    ensure_roundtrip(text, parseval_report_to_json(parse_parseval_report_json(text)),
                     "parseval report");
    write_output(text, cfg.out_path);
    if (!cfg.csv_path.empty())
        write_output(parseval_report_to_csv(rep), cfg.csv_path);
    return 0;
}

int run_verify_translations(const VerifyConfig& cfg) {
    DistributionSpec spec = verify_spec(cfg, "--translations");
    if (!spec.discrete)
        throw SpecError("verify --translations requires a spec with a discrete part");
    double mu = cfg.mu;
    if (!(mu > 0.0)) {
        MuDEstimate est = estimate_mu_d(spec);
        mu = est.final_cert().lower_bound;
        if (!(mu > 0.0))
            throw SpecError("could not certify mu > 0 for f_d; pass --mu explicitly");
    }
    TranslationReport rep;
    rep.structure = translation_numbers(*spec.discrete, cfg.epsilon, mu, cfg.window);
    const TranslationStructure& s = rep.structure;
    rep.summary = std::to_string(s.taus.size()) + " translation numbers on [0, " +
                  fmt_double(s.window) + "], ell = " + fmt_double(s.ell) + ", delta = " +
                  fmt_double(s.delta);
    if (s.window_too_small)
        rep.summary += "; window too small (single tau)";
    if (s.chain_checked)
        rep.summary += std::string("; smallness chain ") + (s.chain_ok ? "ok" : "FAILED");
    std::string text = translation_report_to_json(rep);
    ensure_roundtrip(text, translation_report_to_json(parse_translation_report_json(text)),
                     "translation report");
    write_output(text, cfg.out_path);
    if (!cfg.csv_path.empty())
        write_output(translation_report_to_csv(rep), cfg.csv_path);
    return 0;
}

int run_verify(const VerifyConfig& cfg) {
    int modes = (cfg.lemma != 0) + cfg.integrals + cfg.parseval + cfg.translations;
    if (modes != 1)
        throw SpecError(
            "verify: choose exactly one of --lemma, --integrals, --parseval, --translations");
    if (cfg.lemma == 1)
        return run_verify_lemma1(cfg);
    if (cfg.lemma == 2)
        return run_verify_lemma2(cfg);
    if (cfg.lemma != 0)
        throw SpecError("--lemma takes 1 or 2");
    if (cfg.integrals)
        return run_verify_integrals(cfg);
    if (cfg.parseval)
        return run_verify_parseval(cfg);
    return run_verify_translations(cfg);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qid-lab: decomposition, spectral extraction, and zero-separation "
                 "certificates for characteristic functions"};
    app.require_subcommand(1);

    std::string spec_path, pair_path, out_path, part = "full", target = "full";
    GridConfig grid;
    double tol = 1e-6;

    auto* eval = app.add_subcommand("eval", "evaluate a characteristic function on a grid (CSV)");
    eval->add_option("--spec", spec_path, "distribution spec JSON")->required();
    eval->add_option("--part", part, "part: full, d, a, s, c");
    eval->add_option("--tmin", grid.tmin, "grid start (default 0)");
    eval->add_option("--tmax", grid.tmax, "grid end, excluded (default 2*pi)");
    eval->add_option("--npoints", grid.npoints, "grid size (default 1024)");
    eval->add_option("--out", out_path, "output file (default stdout)");

    auto* spectral = app.add_subcommand("spectral", "extract the exponent pair of a lattice f_d");
    spectral->add_option("--spec", spec_path, "distribution spec JSON")->required();
    spectral->add_option("--out", out_path, "output file (default stdout)");

    auto* synth = app.add_subcommand("synth", "evaluate exp of an exponent pair on a grid (CSV)");
    synth->add_option("--pair", pair_path, "exponent pair JSON")->required();
    synth->add_option("--tmin", grid.tmin, "grid start (default 0)");
    synth->add_option("--tmax", grid.tmax, "grid end, excluded (default 2*pi)");
    synth->add_option("--npoints", grid.npoints, "grid size (default 1024)");
    synth->add_option("--out", out_path, "output file (default stdout)");

    auto* inf = app.add_subcommand("inf", "certified infimum bracket for |f| or |f_d|");
    inf->add_option("--spec", spec_path, "distribution spec JSON")->required();
    inf->add_option("--target", target, "full or d (default full)");
    inf->add_option("--tol", tol, "bracket tolerance (default 1e-6)");
    inf->add_option("--out", out_path, "output file (default stdout)");

    auto* check = app.add_subcommand("check", "membership conditions and verdict");
    check->add_option("--spec", spec_path, "distribution spec JSON")->required();
    check->add_option("--tol", tol, "infimum tolerance (default 1e-6)");
    check->add_option("--out", out_path, "output file (default stdout)");

    VerifyConfig vc;
    auto* verify = app.add_subcommand("verify", "identity, bound, and proof-step checks");
    verify->add_option("--spec", vc.spec_path, "distribution spec JSON");
    verify->add_option("--pair", vc.pair_path, "exponent pair JSON (lemma 1)");
    verify->add_option("--lemma", vc.lemma, "1 = quotient identity/bound, 2 = mean decay");
    verify->add_flag("--integrals", vc.integrals, "proof integrals at (--t, --tau)");
    verify->add_flag("--parseval", vc.parseval, "Parseval constant of f_d");
    verify->add_flag("--translations", vc.translations, "translation numbers of f_d");
    verify->add_option("--tmin", vc.grid.tmin, "t-grid start (default -8)");
    verify->add_option("--tmax", vc.grid.tmax, "t-grid end, excluded (default 8)");
    verify->add_option("--npoints", vc.grid.npoints, "grid size (default 32)");
    verify->add_option("--hmax", vc.hmax, "h-grid end for lemma 1 (default 4)");
    verify->add_option("--t", vc.t, "evaluation point for --integrals (default 0.5)");
    verify->add_option("--tau", vc.tau, "half-width for --integrals (default 10)");
    verify->add_option("--epsilon", vc.epsilon, "epsilon for --translations (default 0.1)");
    verify->add_option("--mu", vc.mu, "mu for --translations (default: certified inf |f_d|)");
    verify->add_option("--window", vc.window, "search window for --translations (default 100)");
    verify->add_option("--out", vc.out_path, "output file (default stdout)");
    verify->add_option("--csv", vc.csv_path, "also write per-row CSV to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (eval->parsed())
            return run_eval(spec_path, part, grid, out_path);
        if (spectral->parsed())
            return run_spectral(spec_path, out_path);
        if (synth->parsed())
            return run_synth(pair_path, grid, out_path);
        if (inf->parsed())
            return run_inf(spec_path, target, tol, out_path);
        if (check->parsed())
            return run_check(spec_path, tol, out_path);
        if (verify->parsed())
            return run_verify(vc);
        throw SpecError("unknown subcommand");
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
}
