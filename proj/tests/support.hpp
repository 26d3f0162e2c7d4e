#pragma once

// Shared test fixtures: the reference spec catalog, a few spectral
// pairs, and small self-contained oracles (closed-form characteristic
// functions, Simpson quadrature, dense scans) used to cross-check
// library output.  Everything here is deliberately written from the
// defining formulas, independent of the library code paths.

#include "qidlab/dist_model.hpp"
#include "qidlab/spectral.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace qt {

using cplx = std::complex<double>;

// ---------------------------------------------------------------- specs

inline qid::DistributionSpec discrete_spec(std::vector<qid::Atom> atoms) {
    qid::DistributionSpec s;
    s.c_d = 1.0;
    s.discrete = qid::DiscretePart{std::move(atoms), std::nullopt};
    return s;
}

inline qid::DistributionSpec abscont_spec(qid::AbsContKind kind) {
    qid::DistributionSpec s;
    s.c_a = 1.0;
    s.abscont = qid::AbsContPart{{qid::AbsContComponent{std::move(kind), 1.0}}};
    return s;
}

inline qid::DistributionSpec bernoulli(double p) {
    return discrete_spec({{0.0, 1.0 - p}, {1.0, p}});
}

// Poisson(1) truncated at k = 17, the smallest cutoff with tail mass
// below 1e-16; the smallest kept atom is e^{-1}/17! ~ 1.03e-15.
inline qid::DistributionSpec poisson1() {
    std::vector<qid::Atom> atoms;
    double pk = std::exp(-1.0);
    for (int k = 0; k <= 17; ++k) {
        atoms.push_back({static_cast<double>(k), pk});
        pk /= static_cast<double>(k + 1);
    }
    return discrete_spec(std::move(atoms));
}

inline qid::DistributionSpec point_mass(double x = 0.0) {
    return discrete_spec({{x, 1.0}});
}

// f_d(t) = cos^2(t/2): touches zero at odd multiples of pi.
inline qid::DistributionSpec three_atom_sym() {
    return discrete_spec({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}});
}

// mu_d = |0.6 - 0.4| = 0.2 at t = pi.
inline qid::DistributionSpec two_atom_asym() {
    return discrete_spec({{0.0, 0.6}, {1.0, 0.4}});
}

// Locations {0, 1, sqrt 2} admit no common span; inf |f_d| over R is 0
// but it is never attained, and no window certificate can decide it.
inline qid::DistributionSpec nonlattice3() {
    return discrete_spec({{0.0, 0.5}, {1.0, 0.25}, {std::sqrt(2.0), 0.25}});
}

inline qid::DistributionSpec gaussian_std() { return abscont_spec(qid::Gaussian{0.0, 1.0}); }
inline qid::DistributionSpec uniform01() { return abscont_spec(qid::Uniform{0.0, 1.0}); }
inline qid::DistributionSpec exponential1() { return abscont_spec(qid::Exponential{1.0}); }
inline qid::DistributionSpec laplace_std() { return abscont_spec(qid::Laplace{0.0, 1.0}); }

inline qid::DistributionSpec cantor_pure() {
    qid::DistributionSpec s;
    s.c_s = 1.0;
    s.singular = qid::SingularPart{qid::CantorLaw{0.0, 1.0}};
    return s;
}

// 0.6 Bernoulli(0.25) + 0.4 N(0,1): largest atom mass of F is 0.45, so
// membership must come from the c_s = 0 tier, not the mass tier.
inline qid::DistributionSpec mixed_bg() {
    qid::DistributionSpec s;
    s.c_d = 0.6;
    s.c_a = 0.4;
    s.discrete = qid::DiscretePart{{{0.0, 0.75}, {1.0, 0.25}}, std::nullopt};
    s.abscont = qid::AbsContPart{{qid::AbsContComponent{qid::Gaussian{0.0, 1.0}, 1.0}}};
    return s;
}

// c_s = 0.1 < c_d * mu_d = 0.7 * 0.2 = 0.14 and largest atom mass of F
// is 0.42: exercises the dominated-singular membership tier.
inline qid::DistributionSpec dominated_mix() {
    qid::DistributionSpec s;
    s.c_d = 0.7;
    s.c_a = 0.2;
    s.c_s = 0.1;
    s.discrete = qid::DiscretePart{{{0.0, 0.6}, {1.0, 0.4}}, std::nullopt};
    s.abscont = qid::AbsContPart{{qid::AbsContComponent{qid::Gaussian{0.0, 1.0}, 1.0}}};
    s.singular = qid::SingularPart{qid::CantorLaw{0.0, 1.0}};
    return s;
}

// |f| = |0.5 f_d + 0.5 f_a| dips below 1e-9 near t = 3pi, where the
// Gaussian factor has died but |f_d| still vanishes.
inline qid::DistributionSpec zero_hit_mix() {
    qid::DistributionSpec s;
    s.c_d = 0.5;
    s.c_a = 0.5;
    s.discrete = qid::DiscretePart{{{0.0, 0.5}, {1.0, 0.5}}, std::nullopt};
    s.abscont = qid::AbsContPart{{qid::AbsContComponent{qid::Gaussian{0.0, 1.0}, 1.0}}};
    return s;
}

struct CatalogEntry {
    std::string name;
    qid::DistributionSpec spec;
};

inline const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"bernoulli_quarter", bernoulli(0.25)},
        {"bernoulli_half", bernoulli(0.5)},
        {"poisson1", poisson1()},
        {"point_mass", point_mass(0.0)},
        {"two_atom_asym", two_atom_asym()},
        {"three_atom_sym", three_atom_sym()},
        {"nonlattice3", nonlattice3()},
        {"gaussian_std", gaussian_std()},
        {"uniform01", uniform01()},
        {"exponential1", exponential1()},
        {"laplace_std", laplace_std()},
        {"cantor_pure", cantor_pure()},
        {"mixed_bg", mixed_bg()},
        {"dominated_mix", dominated_mix()},
        {"zero_hit_mix", zero_hit_mix()},
    };
    return entries;
}

// ---------------------------------------------------------------- pairs

inline qid::SpectralPair make_pair(double gamma, std::vector<qid::MeasureAtom> atoms,
                                   std::vector<qid::DensitySegment> segments = {}) {
    qid::SpectralPair p;
    p.gamma = gamma;
    p.G.atoms = std::move(atoms);
    p.G.segments = std::move(segments);
    return p;
}

inline qid::SpectralPair zero_pair() { return qid::SpectralPair{}; }

// exp-of-exponent equals exp(e^{it} - 1), the Poisson(1) CF.
inline qid::SpectralPair poisson_pair() {
    return make_pair(std::sin(1.0), {{1.0, 0.5}});
}

// Negated Poisson: |f| = exp(1 - cos t) >= 1; its symmetric quotient
// exceeds the published bound constants at (t, h) = (0, 2).
inline qid::SpectralPair negated_poisson_pair() {
    return make_pair(-std::sin(1.0), {{1.0, -0.5}});
}

// Atom at the origin contributes the Gaussian exponent -t^2/2.
inline qid::SpectralPair gaussian_pair() {
    return make_pair(0.0, {{0.0, 1.0}});
}

inline qid::SpectralPair signed_atoms_pair() {
    return make_pair(0.2, {{-1.5, 0.4}, {1.0, 0.5}, {2.0, -0.3}});
}

inline qid::SpectralPair segment_pair() {
    return make_pair(-0.1, {{1.0, 0.3}},
                     {{0.0, 1.0, 0.5}, {-2.0, -1.0, -0.25}});
}

inline const std::vector<std::pair<std::string, qid::SpectralPair>>& pair_catalog() {
    static const std::vector<std::pair<std::string, qid::SpectralPair>> entries = {
        {"zero", zero_pair()},
        {"poisson", poisson_pair()},
        {"negated_poisson", negated_poisson_pair()},
        {"gaussian", gaussian_pair()},
        {"signed_atoms", signed_atoms_pair()},
        {"segment", segment_pair()},
    };
    return entries;
}

// ------------------------------------------------------------------ rng

// splitmix64: fixed-seed fixtures must not depend on the standard
// library's distribution implementations.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uni(double a, double b) { return a + (b - a) * u01(); }
    int pick(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
    bool flip() { return (next() & 1u) != 0; }
};

// Mixed-sign atoms with optional density segment; magnitudes are kept
// small enough that |exp(exponent)| stays well-conditioned on [-3, 3].
inline qid::SpectralPair random_signed_pair(Rng& rng, bool with_segment) {
    qid::SpectralPair p;
    p.gamma = rng.uni(-1.0, 1.0);
    int n = 3 + rng.pick(2);
    double loc = rng.uni(-4.0, -2.0);
    bool has_negative = false;
    for (int i = 0; i < n; ++i) {
        loc += rng.uni(0.5, 1.6);
        double w = rng.uni(0.1, 0.35) * (rng.flip() ? 1.0 : -1.0);
        if (i + 1 == n && !has_negative)
            w = -std::abs(w);
        has_negative = has_negative || w < 0.0;
        p.G.atoms.push_back({loc, w});
    }
    if (with_segment) {
        double a = rng.uni(-2.0, 0.5);
        double b = a + rng.uni(0.5, 1.5);
        double level = rng.uni(0.05, 0.3) * (rng.flip() ? 1.0 : -1.0);
        p.G.segments.push_back({a, b, level});
    }
    return p;
}

// -------------------------------------------------------------- oracles

inline cplx o_cf_atoms(const qid::DiscretePart& d, double t) {
    cplx s{0.0, 0.0};
    for (const qid::Atom& a : d.atoms)
        s += a.mass * std::polar(1.0, t * a.location);
    return s;
}

inline cplx o_cf_gauss(double t, double mean, double var) {
    return std::exp(-0.5 * var * t * t) * std::polar(1.0, mean * t);
}

inline cplx o_cf_uniform(double t, double a, double b) {
    if (t == 0.0)
        return cplx{1.0, 0.0};
    cplx num = std::polar(1.0, t * b) - std::polar(1.0, t * a);
    return num / cplx{0.0, t * (b - a)};
}

inline cplx o_cf_exponential(double t, double rate) {
    return rate / cplx{rate, -t};
}

inline cplx o_cf_laplace(double t, double mean, double scale) {
    return std::polar(1.0, mean * t) / (1.0 + scale * scale * t * t);
}

inline cplx o_cf_cantor(double t, double offset, double scale, int depth = 60) {
    cplx v = std::polar(1.0, t * (offset + 0.5 * scale));
    double pow3 = 1.0;
    for (int k = 1; k <= depth; ++k) {
        pow3 *= 3.0;
        v *= std::cos(scale * t / pow3);
    }
    return v;
}

inline cplx o_cf_kind(const qid::AbsContKind& kind, double t) {
    if (const auto* g = std::get_if<qid::Gaussian>(&kind))
        return o_cf_gauss(t, g->mean, g->variance);
    if (const auto* u = std::get_if<qid::Uniform>(&kind))
        return o_cf_uniform(t, u->a, u->b);
    if (const auto* e = std::get_if<qid::Exponential>(&kind))
        return o_cf_exponential(t, e->rate);
    const auto& l = std::get<qid::Laplace>(kind);
    return o_cf_laplace(t, l.mean, l.scale);
}

inline cplx o_cf_spec(const qid::DistributionSpec& s, double t) {
    cplx v{0.0, 0.0};
    if (s.c_d > 0.0 && s.discrete)
        v += s.c_d * o_cf_atoms(*s.discrete, t);
    if (s.c_a > 0.0 && s.abscont)
        for (const auto& c : s.abscont->components)
            v += s.c_a * c.weight * o_cf_kind(c.kind, t);
    if (s.c_s > 0.0 && s.singular)
        v += s.c_s * o_cf_cantor(t, s.singular->cantor.offset, s.singular->cantor.scale);
    return v;
}

// Composite Simpson on n panels (n even); works for real- and
// complex-valued integrands.
template <class F>
inline auto simpson(F&& f, double a, double b, int n) -> decltype(f(0.0) + f(0.0)) {
    double h = (b - a) / n;
    auto s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 != 0 ? 4.0 : 2.0);
    return s * (h / 3.0);
}

inline double scan_min(const std::function<double(double)>& f, double a, double b,
                       double step, double* arg = nullptr) {
    double best = f(a);
    double best_t = a;
    for (double t = a + step; t <= b; t += step) {
        double v = f(t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    if (arg)
        *arg = best_t;
    return best;
}

} // namespace qt
