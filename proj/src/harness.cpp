#include "qidlab/harness.hpp"

#include "qidlab/errors.hpp"
#include "qidlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace qid {
namespace {

using cplx = std::complex<double>;

constexpr double kFreqMergeTol = 1e-12;
constexpr double kFreqCollisionBand = 1e-9;
constexpr double kIllThreshold = 1e-12;

double mean_of(const std::function<double(double)>& f, double lo, double hi,
               double abs_tol_mean, double& err_out) {
    double len = hi - lo;
    int initial = (int)std::clamp(0.5 * len, 1.0, 20000.0);
    QuadResult q = integrate(f, lo, hi, abs_tol_mean * len, 60000, initial);
    err_out = q.error / len;
    return q.value / len;
}

} // namespace

int thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QIDLAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1)
            hw = std::min<unsigned>(hw, (unsigned)v);
    }
    return (int)hw;
}

QuotientCheck quotient_check(const SpectralPair& pair, double t, double h) {
    QuotientCheck qc;
    qc.t = t;
    qc.h = h;
    cplx f0 = lk_charfn(pair, t);
    cplx fm = lk_charfn(pair, t - h);
    cplx fp = lk_charfn(pair, t + h);
    qc.quotient = fm * fp / (f0 * f0);
    qc.ratio = std::abs(qc.quotient);

    cplx iq = quotient_exponent_integral(pair.G, t, h);
    qc.identity_residual_paper = std::abs(qc.quotient - std::exp(-iq));
    qc.identity_residual_corrected = std::abs(qc.quotient - std::exp(-2.0 * iq));

    BoundConstants bp = bound_constants_paper(pair.G);
    BoundConstants bc = bound_constants_corrected(pair.G);
    qc.bound_margin_paper = bp.C * std::exp(bp.B * h * h) - qc.ratio;
    qc.bound_margin_corrected = bc.C * std::exp(bc.B * h * h) - qc.ratio;
    return qc;
}

double elem_inequality_scan(const std::vector<double>& h_grid,
                            const std::vector<double>& x_grid) {
    const int workers =
        std::min(thread_budget(), (int)std::max<std::size_t>(h_grid.size(), 1));
    auto scan_rows = [&](std::size_t begin, std::size_t end) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = begin; i < end; ++i) {
            const double h = h_grid[i];
            const double rhs = 0.5 * h * h + 2.0;
            for (double x : x_grid)
                worst = std::max(worst, cos_defect_kernel(h, x) - rhs);
        }
        return worst;
    };
    if (workers <= 1)
        return scan_rows(0, h_grid.size());

    std::vector<double> partial(workers, -std::numeric_limits<double>::infinity());
    std::vector<std::thread> pool;
    const std::size_t chunk = (h_grid.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t b = std::min(h_grid.size(), w * chunk);
        std::size_t e = std::min(h_grid.size(), b + chunk);
        pool.emplace_back([&, w, b, e] { partial[w] = scan_rows(b, e); });
    }
    for (auto& th : pool)
        th.join();
    double worst = -std::numeric_limits<double>::infinity();
    for (double v : partial)
        worst = std::max(worst, v);
    return worst;
}

ProofIntegrals proof_integrals(const DistributionSpec& spec, double t, double tau,
                               double quad_tol) {
    if (!std::isfinite(t) || !(tau > 0.0) || !std::isfinite(tau))
        throw SpecError("proof_integrals requires finite t and tau > 0");
    if (!(quad_tol > 0.0))
        throw SpecError("proof_integrals requires quad_tol > 0");

    ProofIntegrals out;
    out.t = t;
    out.tau = tau;

    const cplx ft = eval_part(spec, Part::Full, t);
    const double aft = std::abs(ft);
    out.ill_conditioned = aft <= kIllThreshold;

    double errJ = 0.0, errI = 0.0, errJd = 0.0, errJc = 0.0;
    auto prod = [&](double hh) {
        return std::abs(eval_part(spec, Part::Full, t - hh) *
                        eval_part(spec, Part::Full, t + hh));
    };
    out.J = mean_of(prod, -tau, tau, quad_tol, errJ);

    if (!out.ill_conditioned) {
        const double scale = aft * aft;
        auto ratio = [&](double hh) { return prod(hh) / scale; };
        // Tolerance scaled so the reconstructed J-error stays ~quad_tol.
        out.I = mean_of(ratio, -tau, tau, quad_tol / std::min(1.0, scale), errI);
        out.identity_residual = std::abs(out.J - out.I * scale);
        out.identity_ok = out.identity_residual <= kIdentityTol;
    }

    if (spec.c_d > 0.0) {
        auto prod_d = [&](double hh) {
            return std::abs(eval_part(spec, Part::Discrete, t - hh) *
                            eval_part(spec, Part::Discrete, t + hh));
        };
        out.J_d = mean_of(prod_d, -tau, tau, quad_tol, errJd);
    }
    if (spec.c_d < 1.0) {
        auto mod_c = [&](double hh) {
            return std::abs(eval_part(spec, Part::Continuous, t + hh));
        };
        out.J_c = mean_of(mod_c, -tau, tau, quad_tol, errJc);
    }
    if (spec.discrete) {
        ParsevalReport pr = parseval_A(trig_poly_of_discrete(*spec.discrete), {});
        out.A = pr.A_exact;
    }

    out.quad_error = std::max({errJ, errI * (out.ill_conditioned ? 0.0 : aft * aft),
                               errJd, errJc});
    out.chain_margin = out.J - (spec.c_d * spec.c_d * out.J_d - out.J_c);
    out.chain_ok = out.chain_margin >= -kChainTol;
    return out;
}

TrigPoly trig_poly_of_discrete(const DiscretePart& d) {
    TrigPoly p;
    p.freqs.reserve(d.atoms.size());
    p.coeffs.reserve(d.atoms.size());
    for (const Atom& a : d.atoms) {
        p.freqs.push_back(a.location);
        p.coeffs.push_back(cplx{a.mass, 0.0});
    }
    return p;
}

ParsevalReport parseval_A(const TrigPoly& phi, const std::vector<double>& T_ladder) {
    if (phi.freqs.size() != phi.coeffs.size())
        throw SpecError("trig poly frequency/coefficient size mismatch");
    ParsevalReport rep;

    // phi(h) phi(-h) = sum_{j,k} a_j a_k e^{i (nu_j - nu_k) h}: collect
    // the difference frequencies and merge coincident ones.
    const std::size_t n = phi.freqs.size();
    std::vector<std::pair<double, cplx>> terms;
    terms.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            terms.emplace_back(phi.freqs[j] - phi.freqs[k],
                               phi.coeffs[j] * phi.coeffs[k]);
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& l, const auto& r) { return l.first < r.first; });

    for (std::size_t i = 0; i < terms.size();) {
        double lead = terms[i].first;
        double last = lead;
        cplx sum{0.0, 0.0};
        double center = 0.0;
        std::size_t count = 0;
        while (i < terms.size() && terms[i].first - last <= kFreqMergeTol) {
            last = terms[i].first;
            center += terms[i].first;
            sum += terms[i].second;
            ++count;
            ++i;
        }
        rep.diff_freqs.push_back(center / (double)count);
        rep.diff_coeffs.push_back(sum);
    }
    for (std::size_t i = 1; i < rep.diff_freqs.size(); ++i) {
        double gap = rep.diff_freqs[i] - rep.diff_freqs[i - 1];
        if (gap < kFreqCollisionBand)
            throw NumericalError("parseval frequency collision near the merge tolerance");
    }
    for (const cplx& b : rep.diff_coeffs)
        rep.A_exact += std::norm(b);

    for (double T : T_ladder) {
        if (!(T > 0.0))
            throw SpecError("parseval T ladder values must be positive");
        auto mod2 = [&](double h) {
            cplx v{0.0, 0.0};
            for (std::size_t i = 0; i < rep.diff_freqs.size(); ++i)
                v += rep.diff_coeffs[i] * std::polar(1.0, rep.diff_freqs[i] * h);
            return std::norm(v);
        };
        double err = 0.0;
        double mean = mean_of(mod2, -T, T, 1e-8, err);
        rep.T_ladder.push_back(T);
        rep.A_means.push_back(mean);
        rep.quad_errors.push_back(err);
    }
    return rep;
}

MeanDecayReport lemma2_decay(const DistributionSpec& spec,
                             const std::vector<double>& t_grid,
                             const std::vector<double>& T_ladder) {
    if (t_grid.empty() || T_ladder.empty())
        throw SpecError("lemma2_decay requires non-empty grids");
    MeanDecayReport rep;
    rep.t_grid = t_grid;
    for (double T : T_ladder) {
        MeanDecayRow row;
        row.T = T;
        row.argmax_t = t_grid.front();
        for (double t : t_grid) {
            MeanValue mv = mean_value(spec, t, T);
            if (mv.value > row.max_mean) {
                row.max_mean = mv.value;
                row.argmax_t = t;
            }
            row.max_quad_error = std::max(row.max_quad_error, mv.quadrature_error);
        }
        rep.rows.push_back(row);
    }
    return rep;
}

TranslationStructure translation_numbers(const DiscretePart& d, double epsilon,
                                         double mu, double window,
                                         std::optional<double> t_epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 0.25))
        throw SpecError("translation_numbers requires 0 < epsilon < 1/4");
    if (!(mu > 0.0))
        throw SpecError("translation_numbers requires mu > 0");
    if (!(window > 0.0))
        throw SpecError("translation_numbers requires a positive window");
    if (d.atoms.empty())
        throw SpecError("translation_numbers requires atoms");

    TranslationStructure ts;
    ts.epsilon = epsilon;
    ts.mu = mu;
    ts.window = window;

    double lip = 0.0;
    for (const Atom& a : d.atoms)
        lip += a.mass * std::abs(a.location);

    const double target = epsilon * mu;
    // Rigorous dominating bound for sup_t |f_d(t+tau) - f_d(t)|.
    auto bound = [&](double tau) {
        double s = 0.0;
        for (const Atom& a : d.atoms)
            s += 2.0 * a.mass * std::abs(std::sin(0.5 * a.location * tau));
        return s;
    };

    if (lip == 0.0) {
        // f_d is constant: every tau is a translation number.
        ts.taus = {0.0};
        ts.tau_bounds = {0.0};
        ts.tau_sups = {0.0};
        ts.delta = window;
        ts.ell = 0.0;
        return ts;
    }

    ts.scan_step = target / (10.0 * lip);
    const std::size_t steps = (std::size_t)std::floor(window / ts.scan_step);

    // Group qualifying grid points into runs; keep each run's best tau.
    bool in_run = false;
    double best_tau = 0.0, best_val = 0.0;
    auto flush = [&]() {
        if (in_run) {
            ts.taus.push_back(best_tau);
            ts.tau_bounds.push_back(best_val);
            in_run = false;
        }
    };
    for (std::size_t i = 0; i <= steps; ++i) {
        double tau = (double)i * ts.scan_step;
        double v = bound(tau);
        if (v < target) {
            if (!in_run || v < best_val) {
                best_tau = tau;
                best_val = v;
                in_run = true;
            }
        } else {
            flush();
        }
    }
    flush();

    if (ts.taus.size() < 2) {
        ts.window_too_small = true;
        ts.ell = 0.0;
    } else {
        double max_gap = 0.0, min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < ts.taus.size(); ++i) {
            double g = ts.taus[i] - ts.taus[i - 1];
            max_gap = std::max(max_gap, g);
            min_gap = std::min(min_gap, g);
        }
        ts.ell = max_gap;
        ts.delta = std::min(target / lip, 0.49 * min_gap);
    }
    if (ts.taus.size() < 2)
        ts.delta = target / lip;

    // Sampled sup over a dense t-grid for every stored tau.
    ts.sup_grid_step = target / (10.0 * lip);
    ts.sup_span = std::min(window, 200.0);
    const std::size_t tsteps = (std::size_t)std::floor(ts.sup_span / ts.sup_grid_step);
    for (double tau : ts.taus) {
        double sup = 0.0;
        for (std::size_t i = 0; i <= tsteps; ++i) {
            double t = (double)i * ts.sup_grid_step;
            sup = std::max(sup, std::abs(cf_discrete(d, t + tau) - cf_discrete(d, t)));
        }
        ts.tau_sups.push_back(sup);
    }

    if (t_epsilon) {
        ts.chain_checked = true;
        ts.t_epsilon = *t_epsilon;
        ts.t_epsilon_value = std::abs(cf_discrete(d, *t_epsilon));
        for (double tau : ts.taus)
            ts.chain_max = std::max(
                ts.chain_max, std::abs(cf_discrete(d, *t_epsilon + tau + ts.delta)));
        ts.chain_ok = ts.chain_max < 3.0 * target;
    }
    return ts;
}

} // namespace qid
