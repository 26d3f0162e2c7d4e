#include "qidlab/quadrature.hpp"

#include "qidlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace qid {
namespace {

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
// iteration on the Legendre polynomial.  Machine-precision accurate
// for the small orders used here; avoids hardcoded coefficient tables.
struct GLRule {
    std::vector<double> x;
    std::vector<double> w;
};

GLRule make_rule(int n) {
    GLRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Tricomi-style initial guess, then Newton.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                // one polishing step after convergence
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

const GLRule& rule7() {
    static const GLRule r = make_rule(7);
    return r;
}

const GLRule& rule15() {
    static const GLRule r = make_rule(15);
    return r;
}

template <typename T>
struct Panel {
    double a, b;
    T value;      // 15-point estimate
    double err;   // |15-point - 7-point|
};

template <typename T, typename F>
Panel<T> eval_panel(const F& f, double a, double b) {
    const GLRule& lo = rule7();
    const GLRule& hi = rule15();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T s7{};
    for (int i = 0; i < 7; ++i)
        s7 += lo.w[i] * f(mid + half * lo.x[i]);
    T s15{};
    for (int i = 0; i < 15; ++i)
        s15 += hi.w[i] * f(mid + half * hi.x[i]);
    s7 *= half;
    s15 *= half;
    return {a, b, s15, std::abs(s15 - s7)};
}

template <typename T, typename F>
void run(const F& f, double a, double b, double abs_tol,
         int max_panels, int initial_panels,
         T& value_out, double& err_out, bool& conv_out, int& panels_out) {
    if (!std::isfinite(a) || !std::isfinite(b) || a > b)
        throw SpecError("integrate requires a finite range with a <= b");
    if (!(abs_tol > 0.0))
        throw SpecError("integrate requires abs_tol > 0");
    if (a == b) {
        value_out = T{};
        err_out = 0.0;
        conv_out = true;
        panels_out = 0;
        return;
    }
    initial_panels = std::clamp(initial_panels, 1, std::max(1, max_panels));

    using P = Panel<T>;
    auto worse = [](const P& l, const P& r) {
        if (l.err != r.err) return l.err < r.err;
        return l.a > r.a; // deterministic tie-break
    };
    std::priority_queue<P, std::vector<P>, decltype(worse)> heap(worse);

    double total_err = 0.0;
    const double w = (b - a) / initial_panels;
    for (int i = 0; i < initial_panels; ++i) {
        double pa = a + i * w;
        double pb = (i + 1 == initial_panels) ? b : a + (i + 1) * w;
        P p = eval_panel<T>(f, pa, pb);
        total_err += p.err;
        heap.push(p);
    }

    int panels = initial_panels;
    while (total_err > abs_tol && panels < max_panels) {
        P p = heap.top();
        heap.pop();
        total_err -= p.err;
        double m = 0.5 * (p.a + p.b);
        P l = eval_panel<T>(f, p.a, m);
        P r = eval_panel<T>(f, m, p.b);
        total_err += l.err + r.err;
        heap.push(l);
        heap.push(r);
        ++panels;
    }

    T sum{};
    // Sum panels in a fixed (position) order so the result does not
    // depend on heap internals.
    std::vector<P> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const P& l, const P& r) { return l.a < r.a; });
    for (const P& p : all)
        sum += p.value;

    value_out = sum;
    err_out = total_err;
    conv_out = total_err <= abs_tol;
    panels_out = panels;
}

} // namespace

QuadResult integrate(const std::function<double(double)>& f,
                     double a, double b, double abs_tol,
                     int max_panels, int initial_panels) {
    QuadResult r;
    run<double>(f, a, b, abs_tol, max_panels, initial_panels,
                r.value, r.error, r.converged, r.panels);
    return r;
}

QuadResultC integrate_complex(const std::function<std::complex<double>(double)>& f,
                              double a, double b, double abs_tol,
                              int max_panels, int initial_panels) {
    QuadResultC r;
    run<std::complex<double>>(f, a, b, abs_tol, max_panels, initial_panels,
                              r.value, r.error, r.converged, r.panels);
    return r;
}

} // namespace qid
