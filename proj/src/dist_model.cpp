#include "qidlab/dist_model.hpp"

#include "qidlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

namespace qid {
namespace {

constexpr double kCoeffTol = 1e-12;
constexpr double kMassTol = 1e-12;
constexpr double kMinMass = 1e-15;
constexpr double kDetectTol = 1e-9;  // lattice detection, relative to max(1, |x|)
constexpr double kHintTol = 1e-12;   // stored-hint fit, relative to max(1, |x|)
constexpr long long kMaxDenom = 4096;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Best rational approximation p/q of x with 1 <= q <= qmax, by walking
// the continued fraction expansion.
bool approx_rational(double x, long long qmax, long long& p_out, long long& q_out) {
    long long p0 = 1, q0 = 0;            // h_{-1}, k_{-1}
    long long p1 = (long long)std::floor(x), q1 = 1;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (frac < 1e-15)
            break;
        double inv = 1.0 / frac;
        double a_f = std::floor(inv);
        if (a_f > 1e18)
            break;
        long long a = (long long)a_f;
        long long p2 = a * p1 + p0;
        long long q2 = a * q1 + q0;
        if (q2 > qmax)
            break;
        p0 = p1; q0 = q1;
        p1 = p2; q1 = q2;
        frac = inv - a_f;
    }
    p_out = p1;
    q_out = q1;
    return q1 >= 1;
}

bool fits_grid(const std::vector<Atom>& atoms, double r, double h,
               double rel_tol, double* worst = nullptr) {
    double w = 0.0;
    for (const Atom& a : atoms) {
        double k = std::round((a.location - r) / h);
        double res = std::abs(a.location - (r + k * h));
        double scale = std::max(1.0, std::abs(a.location));
        w = std::max(w, res / scale);
        if (res > rel_tol * scale) {
            if (worst) *worst = w;
            return false;
        }
    }
    if (worst) *worst = w;
    return true;
}

void check_abscont_kind(const AbsContKind& kind, std::size_t idx,
                        std::vector<std::string>& out) {
    auto bad = [&](const char* what) {
        out.push_back("abscont component " + std::to_string(idx) + ": " + what);
    };
    if (const auto* g = std::get_if<Gaussian>(&kind)) {
        if (!std::isfinite(g->mean) || !std::isfinite(g->variance)) bad("non-finite gaussian parameter");
        else if (g->variance <= 0.0) bad("gaussian variance must be positive");
    } else if (const auto* u = std::get_if<Uniform>(&kind)) {
        if (!std::isfinite(u->a) || !std::isfinite(u->b)) bad("non-finite uniform endpoint");
        else if (!(u->a < u->b)) bad("uniform requires a < b");
    } else if (const auto* e = std::get_if<Exponential>(&kind)) {
        if (!std::isfinite(e->rate)) bad("non-finite exponential rate");
        else if (e->rate <= 0.0) bad("exponential rate must be positive");
    } else if (const auto* l = std::get_if<Laplace>(&kind)) {
        if (!std::isfinite(l->mean) || !std::isfinite(l->scale)) bad("non-finite laplace parameter");
        else if (l->scale <= 0.0) bad("laplace scale must be positive");
    }
}

} // namespace

std::optional<LatticeHint> infer_lattice(const DiscretePart& d) {
    const auto& atoms = d.atoms;
    if (atoms.empty())
        return std::nullopt;
    const double r = atoms.front().location;
    if (atoms.size() == 1)
        return LatticeHint{r, 1.0}; // any step works; pick the unit grid

    const std::size_t n = atoms.size();
    const double d1 = atoms[1].location - r;
    if (!(d1 > 0.0))
        return std::nullopt;

    // Reconstruct each difference ratio as a fraction, then put all
    // locations on the grid of step d1 / lcm(denominators).
    long long lcm_q = 1;
    for (std::size_t i = 2; i < n; ++i) {
        double ratio = (atoms[i].location - r) / d1;
        long long p = 0, q = 1;
        if (!approx_rational(ratio, kMaxDenom, p, q))
            return std::nullopt;
        lcm_q = std::lcm(lcm_q, q);
        if (lcm_q > kMaxDenom)
            return std::nullopt;
    }

    double h = d1 / (double)lcm_q;
    if (!fits_grid(atoms, r, h, kDetectTol))
        return std::nullopt;

    // Integer multipliers, reduced so the grid is as coarse as possible.
    std::vector<long long> ks(n);
    long long g = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ks[i] = (long long)std::llround((atoms[i].location - r) / h);
        g = std::gcd(g, ks[i]);
    }
    if (g > 1) {
        h *= (double)g;
        for (auto& k : ks)
            k /= g;
    }

    // Least-squares refinement of the step against the exact multipliers.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        num += (double)ks[i] * (atoms[i].location - r);
        den += (double)ks[i] * (double)ks[i];
    }
    if (den > 0.0)
        h = num / den;

    if (!fits_grid(atoms, r, h, kHintTol))
        return std::nullopt; // detected but too noisy to certify as exact
    return LatticeHint{r, h};
}

ValidationResult validate(const DistributionSpec& spec) {
    ValidationResult res;
    res.normalized = spec;
    auto& out = res.violations;
    DistributionSpec& s = res.normalized;

    for (auto [name, v] : {std::pair{"c_d", s.c_d}, {"c_a", s.c_a}, {"c_s", s.c_s}}) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            out.push_back(std::string(name) + " = " + fmt(v) + " outside [0, 1]");
    }
    double csum = s.c_d + s.c_a + s.c_s;
    if (std::abs(csum - 1.0) > kCoeffTol)
        out.push_back("c_d + c_a + c_s = " + fmt(csum) + ", expected 1 within 1e-12");

    // Presence must match coefficients exactly; no silent dropping.
    if ((s.c_d > 0.0) != s.discrete.has_value())
        out.push_back(s.discrete ? "discrete part present but c_d = 0"
                                 : "c_d > 0 but discrete part missing");
    if ((s.c_a > 0.0) != s.abscont.has_value())
        out.push_back(s.abscont ? "abscont part present but c_a = 0"
                                : "c_a > 0 but abscont part missing");
    if ((s.c_s > 0.0) != s.singular.has_value())
        out.push_back(s.singular ? "singular part present but c_s = 0"
                                 : "c_s > 0 but singular part missing");

    if (s.discrete) {
        auto& d = *s.discrete;
        if (d.atoms.empty()) {
            out.push_back("discrete part has no atoms");
        } else {
            bool finite_locs = true;
            for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                if (!std::isfinite(d.atoms[i].location)) {
                    out.push_back("atom " + std::to_string(i) + " has non-finite location");
                    finite_locs = false;
                }
            }
            if (finite_locs)
                std::stable_sort(d.atoms.begin(), d.atoms.end(),
                                 [](const Atom& a, const Atom& b) { return a.location < b.location; });
            double msum = 0.0;
            for (std::size_t i = 0; i < d.atoms.size(); ++i) {
                const Atom& a = d.atoms[i];
                if (!std::isfinite(a.mass) || a.mass < kMinMass)
                    out.push_back("atom " + std::to_string(i) + " mass " + fmt(a.mass) +
                                  " below 1e-15");
                if (i > 0 && !(d.atoms[i - 1].location < a.location))
                    out.push_back("atom locations not strictly increasing at index " +
                                  std::to_string(i));
                msum += a.mass;
            }
            if (std::abs(msum - 1.0) > kMassTol)
                out.push_back("discrete masses sum to " + fmt(msum) +
                              ", expected 1 within 1e-12");

            if (out.empty()) {
                if (d.lattice_hint) {
                    const auto& hint = *d.lattice_hint;
                    double worst = 0.0;
                    if (!std::isfinite(hint.r) || !std::isfinite(hint.h) || hint.h <= 0.0)
                        out.push_back("lattice_hint requires finite r and h > 0");
                    else if (!fits_grid(d.atoms, hint.r, hint.h, kHintTol, &worst))
                        out.push_back("lattice_hint does not fit atom locations "
                                      "(worst relative residual " + fmt(worst) + ")");
                } else {
                    d.lattice_hint = infer_lattice(d);
                }
            }
        }
    }

    if (s.abscont) {
        auto& a = *s.abscont;
        if (a.components.empty()) {
            out.push_back("abscont part has no components");
        } else {
            double wsum = 0.0;
            for (std::size_t i = 0; i < a.components.size(); ++i) {
                const auto& c = a.components[i];
                if (!std::isfinite(c.weight) || c.weight <= 0.0)
                    out.push_back("abscont component " + std::to_string(i) +
                                  " weight must be positive");
                check_abscont_kind(c.kind, i, out);
                wsum += c.weight;
            }
            if (std::abs(wsum - 1.0) > kMassTol)
                out.push_back("abscont weights sum to " + fmt(wsum) +
                              ", expected 1 within 1e-12");
        }
    }

    if (s.singular) {
        const auto& c = s.singular->cantor;
        if (!std::isfinite(c.offset) || !std::isfinite(c.scale))
            out.push_back("cantor parameters must be finite");
        else if (c.scale <= 0.0)
            out.push_back("cantor scale must be positive");
    }

    res.ok = out.empty();
    return res;
}

ContinuousMix continuous_mix(const DistributionSpec& spec) {
    double cc = spec.c_a + spec.c_s;
    if (!(cc > 0.0))
        throw SpecError("continuous_mix: spec has no continuous part (c_d = 1)");
    ContinuousMix m;
    m.weight = cc;
    m.w_abscont = spec.c_a / cc;
    m.w_singular = spec.c_s / cc;
    return m;
}

} // namespace qid
