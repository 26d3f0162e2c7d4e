#pragma once

#include "qidlab/dist_model.hpp"

#include <complex>

namespace qid {

// Which factor of the decomposition to evaluate.  Continuous is the
// normalized remainder (c_a f_a + c_s f_s) / (c_a + c_s).
enum class Part { Full, Discrete, AbsCont, Singular, Continuous };

// Pointwise characteristic function value together with a global
// derivative bound (the Lipschitz constant of the part).
struct CFValue {
    std::complex<double> value;
    double deriv_bound = 0.0;
};

std::complex<double> eval_part(const DistributionSpec& spec, Part part, double t);
CFValue eval_with_bound(const DistributionSpec& spec, Part part, double t);

// |f_c(t)|^2 of the continuous remainder.
double symmetrized_modulus_sq(const DistributionSpec& spec, double t);

// Mean value M(t, T) = (1/2T) * integral over [t-T, t+T] of |f_c|^2.
// Closed form when the continuous part is a single Gaussian; adaptive
// quadrature (target 1e-9) otherwise.
struct MeanValue {
    double t = 0.0;
    double T = 0.0;
    double value = 0.0;
    double quadrature_error = 0.0; // 0 when exact
    bool exact = false;
};

MeanValue mean_value(const DistributionSpec& spec, double t, double T);

// Global Lipschitz constant of the part's characteristic function,
// i.e. the first absolute moment of the corresponding law (an upper
// bound for the singular factor).
double lipschitz_const(const DistributionSpec& spec, Part part);

// sup over |t| >= T of |f_a(t)|, from per-family monotone envelopes.
double tail_sup_abscont(const AbsContPart& part, double T);

// Component-level helpers shared with the spectral and harness code.
std::complex<double> cf_discrete(const DiscretePart& d, double t);
std::complex<double> cf_abscont_kind(const AbsContKind& kind, double t);
std::complex<double> cf_cantor(const CantorLaw& law, double t);
double abs_first_moment(const AbsContKind& kind);

} // namespace qid
