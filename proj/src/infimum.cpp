#include "qidlab/infimum.hpp"

#include "qidlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace qid {
namespace {

struct Node {
    double lb;
    double a, b;
};

// Min-heap on the interval lower bound; leftmost interval wins ties so
// the search order (and therefore argmin tie-breaking) is deterministic.
struct NodeOrder {
    bool operator()(const Node& l, const Node& r) const {
        if (l.lb != r.lb)
            return l.lb > r.lb;
        return l.a > r.a;
    }
};

std::optional<LatticeHint> lattice_of(const DistributionSpec& spec) {
    if (!(spec.c_d > 0.0) || !spec.discrete)
        return std::nullopt;
    if (spec.discrete->lattice_hint)
        return spec.discrete->lattice_hint;
    return infer_lattice(*spec.discrete);
}

} // namespace

const char* to_string(Tri v) {
    switch (v) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    default: return "inconclusive";
    }
}

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::MemberByCriterion: return "member_by_criterion";
    case Verdict::NecessaryConditionsFail: return "necessary_conditions_fail";
    default: return "necessary_hold_sufficiency_unknown";
    }
}

InfCertificate certify_inf(const std::function<double(double)>& modulus,
                           double lipschitz, InfMode mode, double lo, double hi,
                           double tol, std::uint64_t node_cap, const InfSeed* seed) {
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw SpecError("certify_inf requires tol > 0");
    if (!std::isfinite(lipschitz) || lipschitz < 0.0)
        throw SpecError("certify_inf requires a finite Lipschitz bound >= 0");
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw SpecError("certify_inf requires a finite domain");

    InfCertificate cert;
    cert.mode = mode;
    cert.domain_lo = lo;
    cert.domain_hi = hi;
    if (mode == InfMode::Window)
        cert.window_T = hi;
    else
        cert.period = hi - lo;
    cert.lipschitz_L = lipschitz;
    cert.tol = tol;

    double U = std::numeric_limits<double>::infinity();
    double arg = lo;
    auto offer = [&](double v, double t) {
        if (v < U || (v == U && t < arg)) {
            U = v;
            arg = t;
        }
    };
    if (seed && std::isfinite(seed->upper))
        offer(seed->upper, seed->argmin);

    double v_lo = modulus(lo);
    offer(v_lo, lo);
    cert.nodes = 1;

    if (lipschitz == 0.0 || hi == lo) {
        cert.lower_bound = U;
        cert.upper_bound = U;
        cert.argmin_t = arg;
        cert.gap = 0.0;
        cert.converged = true;
        cert.zero_hit = U < kZeroHitThreshold;
        return cert;
    }

    offer(modulus(hi), hi);
    double mid = 0.5 * (lo + hi);
    double v_mid = modulus(mid);
    offer(v_mid, mid);
    cert.nodes = 3;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> heap;
    heap.push({std::max(0.0, v_mid - lipschitz * 0.5 * (hi - lo)), lo, hi});

    double final_lb = U;
    bool budget_ok = true;
    while (!heap.empty()) {
        if (U < kZeroHitThreshold) {
            // Effectively a zero; no point tightening the bracket further.
            final_lb = heap.top().lb;
            break;
        }
        Node n = heap.top();
        if (n.lb >= U - tol && (n.lb > 0.0 || U >= tol)) {
            // Children never have a smaller bound than their parent, so
            // every remaining interval is within tol of the incumbent.
            // When U < tol with a zero bound we keep drilling instead,
            // until the modulus is either pinned below the zero-hit
            // threshold or certified positive.
            final_lb = n.lb;
            break;
        }
        if (cert.nodes >= node_cap) {
            final_lb = n.lb;
            budget_ok = false;
            break;
        }
        heap.pop();
        double m = 0.5 * (n.a + n.b);
        double ml = 0.5 * (n.a + m);
        double mr = 0.5 * (m + n.b);
        double vl = modulus(ml);
        double vr = modulus(mr);
        cert.nodes += 2;
        offer(vl, ml);
        offer(vr, mr);
        double rho = 0.25 * (n.b - n.a);
        heap.push({std::max({0.0, n.lb, vl - lipschitz * rho}), n.a, m});
        heap.push({std::max({0.0, n.lb, vr - lipschitz * rho}), m, n.b});
    }

    cert.upper_bound = U;
    cert.argmin_t = arg;
    cert.lower_bound = std::min(U, final_lb);
    cert.gap = cert.upper_bound - cert.lower_bound;
    cert.converged = budget_ok;
    cert.zero_hit = cert.upper_bound < kZeroHitThreshold;
    return cert;
}

MuDEstimate estimate_mu_d(const DistributionSpec& spec, double tol,
                          const std::vector<double>& window_ladder,
                          std::uint64_t node_cap) {
    if (!(spec.c_d > 0.0) || !spec.discrete)
        throw SpecError("estimate_mu_d requires a spec with c_d > 0");
    const double L = lipschitz_const(spec, Part::Discrete);
    auto modulus = [&spec](double t) {
        return std::abs(eval_part(spec, Part::Discrete, t));
    };

    MuDEstimate out;
    if (auto hint = lattice_of(spec)) {
        out.lattice = true;
        out.period = 2.0 * M_PI / hint->h;
        InfCertificate c = certify_inf(modulus, L, InfMode::ExactPeriod,
                                       0.0, out.period, tol, node_cap);
        c.target = InfTarget::Discrete;
        out.ladder.push_back(c);
        return out;
    }

    InfSeed seed;
    const InfSeed* sp = nullptr;
    for (double T : window_ladder) {
        InfCertificate c = certify_inf(modulus, L, InfMode::Window,
                                       -T, T, tol, node_cap, sp);
        c.target = InfTarget::Discrete;
        seed = InfSeed{c.upper_bound, c.argmin_t};
        sp = &seed;
        out.ladder.push_back(c);
    }
    return out;
}

MuEstimate estimate_mu(const DistributionSpec& spec, double tol,
                       const std::vector<double>& window_ladder,
                       std::uint64_t node_cap) {
    if (window_ladder.empty())
        throw SpecError("estimate_mu requires a non-empty window ladder");
    const double L = lipschitz_const(spec, Part::Full);
    auto modulus = [&spec](double t) {
        return std::abs(eval_part(spec, Part::Full, t));
    };

    MuEstimate out;
    InfSeed seed;
    const InfSeed* sp = nullptr;
    for (double T : window_ladder) {
        InfCertificate c = certify_inf(modulus, L, InfMode::Window,
                                       -T, T, tol, node_cap, sp);
        c.target = InfTarget::Full;
        seed = InfSeed{c.upper_bound, c.argmin_t};
        sp = &seed;
        out.ladder.push_back(c);
    }

    auto hint = lattice_of(spec);
    double mu_d_lb = 0.0;
    if (hint) {
        MuDEstimate md = estimate_mu_d(spec, tol, window_ladder, node_cap);
        mu_d_lb = md.final_cert().lower_bound;
    }

    auto tail_beyond = [&](double T) {
        double v = spec.c_d * mu_d_lb - spec.c_s;
        if (spec.c_a > 0.0 && spec.abscont)
            v -= spec.c_a * tail_sup_abscont(*spec.abscont, T);
        return v;
    };

    AsymptoticTier tier;
    tier.beyond_T = window_ladder.back();
    if (hint && spec.c_s == 0.0) {
        tier.status = TierStatus::Valid;
        tier.lower = tail_beyond(tier.beyond_T);
        tier.note = "for |t| > T, |f| >= c_d*mu_d - c_a*sup|f_a|; mu_d certified over one period";
        double best = 0.0;
        for (const InfCertificate& c : out.ladder)
            best = std::max(best, std::min(c.lower_bound, tail_beyond(c.window_T)));
        out.global_lower = std::max(0.0, best);
        out.global_valid = true;
    } else {
        tier.status = TierStatus::Inconclusive;
        tier.lower = hint ? tail_beyond(tier.beyond_T) : 0.0;
        tier.note = hint ? "inconclusive: c_s > 0 keeps the tier outside its validity scope"
                         : "inconclusive: asymptotic bound requires a lattice discrete part";
    }
    out.asymptotic = tier;
    return out;
}

ConditionReport check_conditions(const DistributionSpec& spec, double tol) {
    if (spec.c_d > 0.0 && !spec.discrete)
        throw SpecError("check_conditions: c_d > 0 but the discrete part is missing");
    ConditionReport rep;
    rep.mu = estimate_mu(spec, tol);
    if (spec.c_d > 0.0 && spec.discrete)
        rep.mu_d = estimate_mu_d(spec, tol);

    if (spec.discrete)
        for (const Atom& a : spec.discrete->atoms)
            if (spec.c_d * a.mass > 0.5)
                rep.mass_over_half = true;

    // cond1: zero-freeness of f on the scanned windows.
    rep.cond1 = Cond1::HoldsOnWindow;
    rep.cond1_window_T = rep.mu.ladder.back().window_T;
    for (const InfCertificate& c : rep.mu.ladder) {
        if (c.zero_hit) {
            rep.cond1 = Cond1::ViolatedAt;
            rep.cond1_violation_t = c.argmin_t;
            break;
        }
    }

    // cond2: mu_d > 0.
    if (!(spec.c_d > 0.0)) {
        rep.cond2_mu_d_positive = Tri::No;
    } else {
        const MuDEstimate& md = *rep.mu_d;
        bool hit = false;
        for (const InfCertificate& c : md.ladder)
            hit = hit || c.zero_hit;
        if (hit)
            rep.cond2_mu_d_positive = Tri::No;
        else if (md.lattice && md.final_cert().converged &&
                 md.final_cert().lower_bound > 0.0)
            rep.cond2_mu_d_positive = Tri::Yes;
        else
            rep.cond2_mu_d_positive = Tri::Inconclusive;
    }

    // Beyond-window bound |f| >= c_d*mu_d - c_a*sup|f_a| - c_s for
    // |t| > T; rigorous for lattice discrete parts since |f_s| <= 1.
    double mu_d_lb = 0.0;
    bool mu_d_global = false;
    if (rep.mu_d && rep.mu_d->lattice && rep.mu_d->final_cert().converged) {
        mu_d_lb = rep.mu_d->final_cert().lower_bound;
        mu_d_global = true;
    }
    if (mu_d_global) {
        double T = rep.mu.ladder.back().window_T;
        double tail = (spec.c_a > 0.0 && spec.abscont)
                          ? tail_sup_abscont(*spec.abscont, T)
                          : 0.0;
        rep.beyond_window_lower = spec.c_d * mu_d_lb - spec.c_a * tail - spec.c_s;
        rep.beyond_window_valid = true;
    }

    // cond3: mu > 0.
    bool window_zero = rep.cond1 == Cond1::ViolatedAt;
    double window_lower = rep.mu.ladder.back().lower_bound;
    double global_positive_lb = 0.0;
    if (rep.mu.global_valid)
        global_positive_lb = rep.mu.global_lower;
    else if (rep.beyond_window_valid)
        global_positive_lb = std::max(0.0, std::min(window_lower, rep.beyond_window_lower));
    if (window_zero)
        rep.cond3_mu_positive = Tri::No;
    else if (global_positive_lb > 0.0)
        rep.cond3_mu_positive = Tri::Yes;
    else
        rep.cond3_mu_positive = Tri::Inconclusive;

    // Dominated singular part: c_s < c_d*mu_d strictly (c_s = 0 counts
    // only if mu_d is not certified away from zero).
    if (rep.cond2_mu_d_positive == Tri::Yes && mu_d_global) {
        double ub = rep.mu_d->final_cert().upper_bound;
        if (spec.c_s < spec.c_d * mu_d_lb)
            rep.dominated_singular = Tri::Yes;
        else if (spec.c_s >= spec.c_d * ub)
            rep.dominated_singular = Tri::No;
        else
            rep.dominated_singular = Tri::Inconclusive;
    } else if (rep.cond2_mu_d_positive == Tri::No) {
        rep.dominated_singular = spec.c_s == 0.0 ? Tri::Yes : Tri::No;
    } else {
        rep.dominated_singular = Tri::Inconclusive;
    }

    std::ostringstream ctx;
    if (!(spec.c_d > 0.0)) {
        rep.verdict = Verdict::NecessaryConditionsFail;
        ctx << "c_d = 0: the separation conditions target laws with a discrete part; ";
        if (rep.cond3_mu_positive == Tri::No)
            ctx << "cond3 fails (|f| drops below the zero-hit threshold at t = "
                << rep.mu.ladder.back().argmin_t << ")";
        else
            ctx << "cond2 fails";
    } else if (rep.cond2_mu_d_positive == Tri::No || rep.cond3_mu_positive == Tri::No) {
        rep.verdict = Verdict::NecessaryConditionsFail;
        if (rep.cond2_mu_d_positive == Tri::No)
            ctx << "cond2 fails: |f_d| is not separated from zero; ";
        if (rep.cond3_mu_positive == Tri::No)
            ctx << "cond3 fails: |f| is not separated from zero";
    } else if (rep.mass_over_half) {
        rep.verdict = Verdict::MemberByCriterion;
        ctx << "an atom of F carries mass > 1/2";
    } else if (spec.c_s == 0.0 && rep.cond2_mu_d_positive == Tri::Yes &&
               rep.cond1 == Cond1::HoldsOnWindow && rep.cond3_mu_positive == Tri::Yes) {
        rep.verdict = Verdict::MemberByCriterion;
        ctx << "c_s = 0, f zero-free (certified globally, lower bound "
            << global_positive_lb << ") and mu_d > 0";
    } else if (spec.c_s > 0.0 && rep.dominated_singular == Tri::Yes &&
               rep.cond2_mu_d_positive == Tri::Yes &&
               rep.cond1 == Cond1::HoldsOnWindow && global_positive_lb > 0.0) {
        rep.verdict = Verdict::MemberByCriterion;
        ctx << "dominated singular part: c_s < c_d*mu_d with f zero-free "
            << "(certified globally, lower bound " << global_positive_lb << ")";
    } else {
        rep.verdict = Verdict::NecessaryHoldSufficiencyUnknown;
        ctx << "necessary conditions hold as far as certified";
        if (rep.cond2_mu_d_positive == Tri::Inconclusive)
            ctx << "; mu_d inconclusive (non-lattice window bounds only)";
        if (rep.cond3_mu_positive == Tri::Inconclusive)
            ctx << "; mu inconclusive";
    }
    rep.context = ctx.str();
    return rep;
}

} // namespace qid
