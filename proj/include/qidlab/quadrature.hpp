#pragma once

#include <complex>
#include <functional>

namespace qid {

// Result of an adaptive quadrature run.  `error` is the accumulated
// error estimate (sum of per-panel estimates), `panels` the number of
// panels in the final subdivision.
struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    int panels = 0;
};

struct QuadResultC {
    std::complex<double> value{0.0, 0.0};
    double error = 0.0;
    bool converged = false;
    int panels = 0;
};

// Adaptive Gauss-Legendre quadrature on [a, b] with an embedded 7/15
// point pair per panel.  Panels with the largest error estimate are
// split first until the total estimate drops below abs_tol or the
// panel budget runs out.  `initial_panels` pre-splits the interval,
// which matters for long oscillatory ranges where a single panel
// would alias the integrand.
QuadResult integrate(const std::function<double(double)>& f,
                     double a, double b, double abs_tol,
                     int max_panels = 20000, int initial_panels = 1);

QuadResultC integrate_complex(const std::function<std::complex<double>(double)>& f,
                              double a, double b, double abs_tol,
                              int max_panels = 20000, int initial_panels = 1);

} // namespace qid
