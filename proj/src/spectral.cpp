#include "qidlab/spectral.hpp"

#include "qidlab/charfn.hpp"
#include "qidlab/errors.hpp"
#include "qidlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qid {
namespace {

using cplx = std::complex<double>;

constexpr double kSegmentQuadTol = 1e-10;
constexpr double kZeroHit = 1e-9;
constexpr double kTrailingTol = 1e-10;
constexpr double kCoeffDrop = 1e-14;
constexpr double kImagTol = 1e-9;
constexpr int kMaxGrid = 1 << 16;

double sinc(double u) {
    if (std::abs(u) < 1e-8)
        return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
}

// sin(u) - u, stable near zero.
double sin_defect(double u) {
    if (std::abs(u) < 0.1) {
        double u2 = u * u;
        return u * u2 *
               (-1.0 / 6.0 +
                u2 * (1.0 / 120.0 + u2 * (-1.0 / 5040.0 + u2 / 362880.0)));
    }
    return std::sin(u) - u;
}

int initial_panels_for(double t, double a, double b) {
    double cycles = std::abs(t) * (b - a) / (2.0 * M_PI);
    return (int)std::clamp(4.0 * cycles + 1.0, 1.0, 4096.0);
}

// In-place radix-2 forward FFT, X_m = sum_j x_j e^{-2 pi i j m / N}.
void fft_forward(std::vector<cplx>& x) {
    const std::size_t n = x.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / (double)len;
        const cplx wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = x[i + k];
                cplx v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

int next_pow2(int n) {
    int p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

} // namespace

std::vector<std::string> measure_violations(const SignedMeasure& g) {
    std::vector<std::string> out;
    std::vector<double> locs;
    for (std::size_t i = 0; i < g.atoms.size(); ++i) {
        const auto& a = g.atoms[i];
        if (!std::isfinite(a.location) || !std::isfinite(a.weight)) {
            out.push_back("measure atom " + std::to_string(i) + " has non-finite data");
            continue;
        }
        locs.push_back(a.location);
    }
    std::sort(locs.begin(), locs.end());
    if (std::adjacent_find(locs.begin(), locs.end()) != locs.end())
        out.push_back("measure atoms at duplicate locations");

    std::vector<DensitySegment> segs;
    for (std::size_t i = 0; i < g.segments.size(); ++i) {
        const auto& s = g.segments[i];
        if (!std::isfinite(s.a) || !std::isfinite(s.b) || !std::isfinite(s.level)) {
            out.push_back("segment " + std::to_string(i) + " has non-finite data");
            continue;
        }
        if (!(s.a < s.b)) {
            out.push_back("segment " + std::to_string(i) + " requires a < b");
            continue;
        }
        segs.push_back(s);
    }
    std::sort(segs.begin(), segs.end(),
              [](const DensitySegment& l, const DensitySegment& r) { return l.a < r.a; });
    for (std::size_t i = 1; i < segs.size(); ++i)
        if (segs[i].a < segs[i - 1].b - 1e-15)
            out.push_back("segments overlap near x = " + std::to_string(segs[i].a));
    return out;
}

double total_variation(const SignedMeasure& g) {
    double tv = 0.0;
    for (const auto& a : g.atoms)
        tv += std::abs(a.weight);
    for (const auto& s : g.segments)
        tv += std::abs(s.level) * (s.b - s.a);
    return tv;
}

bool is_zero_measure(const SignedMeasure& g) {
    return total_variation(g) == 0.0;
}

BoundConstants bound_constants_paper(const SignedMeasure& g) {
    double tv = total_variation(g);
    return BoundConstants{0.5 * tv, std::exp(2.0 * tv), "paper"};
}

BoundConstants bound_constants_corrected(const SignedMeasure& g) {
    double tv = total_variation(g);
    return BoundConstants{tv, std::exp(4.0 * tv), "corrected"};
}

std::complex<double> lk_kernel(double t, double x) {
    if (x == 0.0)
        return cplx{-0.5 * t * t, 0.0};
    const double w = 1.0 + x * x;
    const double s = sinc(0.5 * t * x);
    const double re = -0.5 * t * t * s * s * w;
    const double im = (sin_defect(t * x) - t * sin_defect(x)) * w / (x * x);
    return cplx{re, im};
}

double cos_defect_kernel(double h, double x) {
    const double s = sinc(0.5 * h * x);
    return 0.5 * h * h * s * s * (1.0 + x * x);
}

std::complex<double> lk_exponent(const SpectralPair& pair, double t) {
    if (!std::isfinite(t))
        throw SpecError("lk_exponent requires finite t");
    cplx acc{0.0, t * pair.gamma};
    for (const auto& a : pair.G.atoms)
        acc += a.weight * lk_kernel(t, a.location);
    for (const auto& s : pair.G.segments) {
        auto integrand = [&](double x) { return lk_kernel(t, x); };
        QuadResultC q = integrate_complex(integrand, s.a, s.b, kSegmentQuadTol,
                                          20000, initial_panels_for(t, s.a, s.b));
        if (!q.converged)
            throw NumericalError("lk_exponent segment quadrature did not converge");
        acc += s.level * q.value;
    }
    return acc;
}

std::complex<double> lk_charfn(const SpectralPair& pair, double t) {
    cplx e = lk_exponent(pair, t);
    if (e.real() > 700.0)
        throw NumericalError("lk_charfn overflow: exponent real part above 700");
    return std::exp(e);
}

std::complex<double> quotient_exponent_integral(const SignedMeasure& g, double t, double h) {
    cplx acc{0.0, 0.0};
    for (const auto& a : g.atoms)
        acc += a.weight * std::polar(1.0, t * a.location) *
               cos_defect_kernel(h, a.location);
    for (const auto& s : g.segments) {
        auto integrand = [&](double x) {
            return std::polar(1.0, t * x) * cos_defect_kernel(h, x);
        };
        QuadResultC q = integrate_complex(integrand, s.a, s.b, kSegmentQuadTol,
                                          20000,
                                          initial_panels_for(std::abs(t) + std::abs(h), s.a, s.b));
        if (!q.converged)
            throw NumericalError("quotient integral quadrature did not converge");
        acc += s.level * q.value;
    }
    return acc;
}

std::pair<SpectralPair, SpectralPair> hahn_jordan(const SpectralPair& pair) {
    SpectralPair plus, minus;
    plus.gamma = pair.gamma;
    minus.gamma = 0.0;
    for (const auto& a : pair.G.atoms) {
        if (a.weight > 0.0)
            plus.G.atoms.push_back(a);
        else if (a.weight < 0.0)
            minus.G.atoms.push_back({a.location, -a.weight});
    }
    for (const auto& s : pair.G.segments) {
        if (s.level > 0.0)
            plus.G.segments.push_back(s);
        else if (s.level < 0.0)
            minus.G.segments.push_back({s.a, s.b, -s.level});
    }
    return {plus, minus};
}

LatticeExtraction extract_lattice_spectral(const DiscretePart& d) {
    if (d.atoms.empty())
        throw SpecError("extraction requires a non-empty discrete part");
    auto hint = d.lattice_hint ? d.lattice_hint : infer_lattice(d);
    if (!hint)
        throw SpecError("extraction unsupported: discrete part is not lattice");

    const double r = hint->r;
    const double h = hint->h;
    const std::size_t n = d.atoms.size();

    // Integer multipliers of the step; exact lattice arithmetic below
    // works on these, so irrational r or h cost no accuracy.
    std::vector<long long> ks(n);
    double lg = 0.0; // Lipschitz bound of g(t) = f_d(t) e^{-irt}
    for (std::size_t i = 0; i < n; ++i) {
        double k = std::round((d.atoms[i].location - r) / h);
        if (std::abs(d.atoms[i].location - (r + k * h)) >
            1e-9 * std::max(1.0, std::abs(d.atoms[i].location)))
            throw SpecError("extraction: lattice hint does not fit atom locations");
        ks[i] = (long long)k;
        lg += d.atoms[i].mass * std::abs(k) * h;
    }

    int N = next_pow2(std::max<int>(256, 8 * (int)n));
    std::vector<cplx> g;
    double ming = 0.0;
    const double period = 2.0 * M_PI / h;
    for (;;) {
        // g_j = sum_m p_m e^{2 pi i j k_m / N} on the period grid.
        std::vector<cplx> tw(N);
        for (int l = 0; l < N; ++l)
            tw[l] = std::polar(1.0, 2.0 * M_PI * l / N);
        g.assign(N, cplx{0.0, 0.0});
        for (std::size_t m = 0; m < n; ++m) {
            long long k = ((ks[m] % N) + N) % N;
            for (int j = 0; j < N; ++j)
                g[j] += d.atoms[m].mass * tw[(std::size_t)((j * k) % N)];
        }
        ming = std::abs(g[0]);
        for (const cplx& v : g)
            ming = std::min(ming, std::abs(v));
        if (ming <= kZeroHit)
            throw NumericalError("extraction zero-hit: |f_d| vanishes on the period grid");
        // Keep per-step phase motion under pi/2 so unwrapping is safe:
        // |d arg g / dt| <= L_g / min|g|.
        double needed = 2.0 * period * lg / (M_PI * ming);
        if ((double)N >= needed)
            break;
        if (N >= kMaxGrid)
            throw NumericalError("extraction aliasing: phase cannot be tracked on the maximal grid");
        N *= 2;
    }

    // Unwrap the phase and strip the winding to get a periodic log.
    std::vector<double> theta(N + 1);
    theta[0] = std::arg(g[0]);
    for (int j = 1; j <= N; ++j) {
        const cplx cur = g[j % N];
        const cplx prev = g[j - 1];
        theta[j] = theta[j - 1] + std::arg(cur * std::conj(prev));
    }
    const long long w = (long long)std::llround((theta[N] - theta[0]) / (2.0 * M_PI));

    std::vector<cplx> psi(N);
    for (int j = 0; j < N; ++j)
        psi[j] = cplx{std::log(std::abs(g[j])),
                      theta[j] - 2.0 * M_PI * (double)w * (double)j / (double)N};

    fft_forward(psi);

    LatticeExtraction out;
    out.r = r;
    out.h = h;
    out.winding = w;
    out.grid_size = N;

    auto coeff = [&](long long k) {
        long long m = ((k % N) + N) % N;
        return psi[(std::size_t)m] / (double)N;
    };

    for (long long k = N / 4 + 1; k <= N / 2; ++k) {
        out.max_trailing = std::max(out.max_trailing, std::abs(coeff(k)));
        out.max_trailing = std::max(out.max_trailing, std::abs(coeff(-k)));
    }
    if (out.max_trailing > kTrailingTol)
        throw NumericalError("extraction aliasing: trailing coefficients above 1e-10");

    double gamma = r + h * (double)w;
    for (long long k = -N / 4; k <= N / 4; ++k) {
        if (k == 0)
            continue;
        cplx c = coeff(k);
        if (std::abs(c) <= kCoeffDrop)
            continue;
        out.max_imag = std::max(out.max_imag, std::abs(c.imag()));
        double x = h * (double)k;
        out.coeffs.emplace_back(k, c.real());
        out.pair.G.atoms.push_back({x, c.real() * x * x / (1.0 + x * x)});
        gamma += c.real() * std::sin(x);
    }
    if (out.max_imag > kImagTol)
        throw NumericalError("extraction produced non-real log coefficients");
    out.pair.gamma = gamma;
    return out;
}

} // namespace qid
