#include "qidlab/charfn.hpp"

#include "qidlab/errors.hpp"
#include "qidlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace qid {
namespace {

using cplx = std::complex<double>;

constexpr double kMeanQuadTarget = 1e-9;
constexpr double kMeanQuadFail = 1e-6;

void require_finite_t(double t) {
    if (!std::isfinite(t))
        throw SpecError("characteristic function argument must be finite");
}

double sinc(double u) {
    if (std::abs(u) < 1e-8)
        return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
}

const DiscretePart& need_discrete(const DistributionSpec& s) {
    if (!s.discrete)
        throw SpecError("spec has no discrete part");
    return *s.discrete;
}

const AbsContPart& need_abscont(const DistributionSpec& s) {
    if (!s.abscont)
        throw SpecError("spec has no absolutely continuous part");
    return *s.abscont;
}

const SingularPart& need_singular(const DistributionSpec& s) {
    if (!s.singular)
        throw SpecError("spec has no singular part");
    return *s.singular;
}

cplx cf_abscont_part(const AbsContPart& p, double t) {
    cplx s{0.0, 0.0};
    for (const auto& c : p.components)
        s += c.weight * cf_abscont_kind(c.kind, t);
    return s;
}

cplx cf_continuous(const DistributionSpec& spec, double t) {
    ContinuousMix m = continuous_mix(spec);
    cplx s{0.0, 0.0};
    if (m.w_abscont > 0.0)
        s += m.w_abscont * cf_abscont_part(need_abscont(spec), t);
    if (m.w_singular > 0.0)
        s += m.w_singular * cf_cantor(need_singular(spec).cantor, t);
    return s;
}

} // namespace

std::complex<double> cf_discrete(const DiscretePart& d, double t) {
    cplx s{0.0, 0.0};
    for (const Atom& a : d.atoms)
        s += a.mass * std::polar(1.0, t * a.location);
    return s;
}

std::complex<double> cf_abscont_kind(const AbsContKind& kind, double t) {
    if (const auto* g = std::get_if<Gaussian>(&kind)) {
        double amp = std::exp(-0.5 * g->variance * t * t);
        return amp * std::polar(1.0, t * g->mean);
    }
    if (const auto* u = std::get_if<Uniform>(&kind)) {
        double mid = 0.5 * (u->a + u->b);
        double half = 0.5 * (u->b - u->a);
        return sinc(t * half) * std::polar(1.0, t * mid);
    }
    if (const auto* e = std::get_if<Exponential>(&kind)) {
        // rate / (rate - it)
        double den = e->rate * e->rate + t * t;
        return cplx{e->rate * e->rate / den, e->rate * t / den};
    }
    const auto& l = std::get<Laplace>(kind);
    double amp = 1.0 / (1.0 + l.scale * l.scale * t * t);
    return amp * std::polar(1.0, t * l.mean);
}

std::complex<double> cf_cantor(const CantorLaw& law, double t) {
    // Product formula: the Cantor law on [0, 1] is the distribution of
    // sum_{k>=1} 2 e_k / 3^k with e_k iid Bernoulli(1/2), hence its
    // characteristic function is prod cos(t / 3^k) times the phase of
    // the mean 1/2; truncation once the angle drops below 1e-8 leaves
    // a relative tail under 1e-16.
    double u = law.scale * t;
    double prod = 1.0;
    for (int k = 1; k <= 64; ++k) {
        u /= 3.0;
        if (std::abs(u) < 1e-8)
            break;
        prod *= std::cos(u);
    }
    return prod * std::polar(1.0, t * (law.offset + 0.5 * law.scale));
}

std::complex<double> eval_part(const DistributionSpec& spec, Part part, double t) {
    require_finite_t(t);
    switch (part) {
    case Part::Discrete:
        return cf_discrete(need_discrete(spec), t);
    case Part::AbsCont:
        return cf_abscont_part(need_abscont(spec), t);
    case Part::Singular:
        return cf_cantor(need_singular(spec).cantor, t);
    case Part::Continuous:
        return cf_continuous(spec, t);
    case Part::Full: {
        cplx s{0.0, 0.0};
        if (spec.c_d > 0.0)
            s += spec.c_d * cf_discrete(need_discrete(spec), t);
        if (spec.c_a > 0.0)
            s += spec.c_a * cf_abscont_part(need_abscont(spec), t);
        if (spec.c_s > 0.0)
            s += spec.c_s * cf_cantor(need_singular(spec).cantor, t);
        return s;
    }
    }
    throw SpecError("unknown part selector");
}

CFValue eval_with_bound(const DistributionSpec& spec, Part part, double t) {
    return CFValue{eval_part(spec, part, t), lipschitz_const(spec, part)};
}

double symmetrized_modulus_sq(const DistributionSpec& spec, double t) {
    require_finite_t(t);
    return std::norm(cf_continuous(spec, t));
}

double abs_first_moment(const AbsContKind& kind) {
    if (const auto* g = std::get_if<Gaussian>(&kind)) {
        double sigma = std::sqrt(g->variance);
        double m = g->mean;
        return sigma * std::sqrt(2.0 / M_PI) * std::exp(-m * m / (2.0 * g->variance)) +
               m * std::erf(m / (sigma * std::sqrt(2.0)));
    }
    if (const auto* u = std::get_if<Uniform>(&kind)) {
        if (u->a >= 0.0 || u->b <= 0.0)
            return std::abs(u->a + u->b) * 0.5;
        return (u->a * u->a + u->b * u->b) / (2.0 * (u->b - u->a));
    }
    if (const auto* e = std::get_if<Exponential>(&kind))
        return 1.0 / e->rate;
    const auto& l = std::get<Laplace>(kind);
    return std::abs(l.mean) + l.scale * std::exp(-std::abs(l.mean) / l.scale);
}

double lipschitz_const(const DistributionSpec& spec, Part part) {
    auto moment_d = [&]() {
        double s = 0.0;
        for (const Atom& a : need_discrete(spec).atoms)
            s += a.mass * std::abs(a.location);
        return s;
    };
    auto moment_a = [&]() {
        double s = 0.0;
        for (const auto& c : need_abscont(spec).components)
            s += c.weight * abs_first_moment(c.kind);
        return s;
    };
    auto moment_s = [&]() {
        // Support bound: |X| <= |offset| + scale on [offset, offset+scale].
        const CantorLaw& c = need_singular(spec).cantor;
        return std::abs(c.offset) + c.scale;
    };
    switch (part) {
    case Part::Discrete:
        return moment_d();
    case Part::AbsCont:
        return moment_a();
    case Part::Singular:
        return moment_s();
    case Part::Continuous: {
        ContinuousMix m = continuous_mix(spec);
        double s = 0.0;
        if (m.w_abscont > 0.0)
            s += m.w_abscont * moment_a();
        if (m.w_singular > 0.0)
            s += m.w_singular * moment_s();
        return s;
    }
    case Part::Full: {
        double s = 0.0;
        if (spec.c_d > 0.0)
            s += spec.c_d * moment_d();
        if (spec.c_a > 0.0)
            s += spec.c_a * moment_a();
        if (spec.c_s > 0.0)
            s += spec.c_s * moment_s();
        return s;
    }
    }
    throw SpecError("unknown part selector");
}

double tail_sup_abscont(const AbsContPart& part, double T) {
    if (!(T > 0.0))
        return 1.0;
    double s = 0.0;
    for (const auto& c : part.components) {
        double env = 1.0;
        if (const auto* g = std::get_if<Gaussian>(&c.kind)) {
            env = std::exp(-0.5 * g->variance * T * T);
        } else if (const auto* u = std::get_if<Uniform>(&c.kind)) {
            env = std::min(1.0, 2.0 / (T * (u->b - u->a)));
        } else if (const auto* e = std::get_if<Exponential>(&c.kind)) {
            env = e->rate / std::sqrt(e->rate * e->rate + T * T);
        } else if (const auto* l = std::get_if<Laplace>(&c.kind)) {
            env = 1.0 / (1.0 + l->scale * l->scale * T * T);
        }
        s += c.weight * env;
    }
    return s;
}

MeanValue mean_value(const DistributionSpec& spec, double t, double T) {
    require_finite_t(t);
    if (!std::isfinite(T) || !(T > 0.0))
        throw SpecError("mean_value requires T > 0");
    ContinuousMix mix = continuous_mix(spec); // rejects c_d == 1

    MeanValue out;
    out.t = t;
    out.T = T;

    // Single Gaussian continuous part: |f_c(u)|^2 = exp(-v u^2), which
    // integrates in closed form.
    if (mix.w_singular == 0.0 && spec.abscont &&
        spec.abscont->components.size() == 1) {
        if (const auto* g = std::get_if<Gaussian>(&spec.abscont->components[0].kind)) {
            double v = g->variance;
            double rv = std::sqrt(v);
            double integral =
                0.5 * std::sqrt(M_PI / v) *
                (std::erf(rv * (t + T)) - std::erf(rv * (t - T)));
            out.value = integral / (2.0 * T);
            out.exact = true;
            return out;
        }
    }

    auto f = [&](double u) { return std::norm(cf_continuous(spec, u)); };
    int initial = (int)std::clamp(T, 1.0, 20000.0);
    QuadResult q = integrate(f, t - T, t + T, kMeanQuadTarget * 2.0 * T, 60000, initial);
    out.value = q.value / (2.0 * T);
    out.quadrature_error = q.error / (2.0 * T);
    if (out.quadrature_error > kMeanQuadFail)
        throw NumericalError("mean_value quadrature error above 1e-6");
    return out;
}

} // namespace qid
