#pragma once

#include "qidlab/dist_model.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qid {

struct MeasureAtom {
    double location = 0.0;
    double weight = 0.0; // signed
};

// Constant density level on [a, b); levels may be negative.
struct DensitySegment {
    double a = 0.0;
    double b = 0.0;
    double level = 0.0;
};

/// Finite signed measure of bounded variation: atoms plus a
// piecewise-constant density part.
struct SignedMeasure {
    std::vector<MeasureAtom> atoms;
    std::vector<DensitySegment> segments;
};

std::vector<std::string> measure_violations(const SignedMeasure& g);
double total_variation(const SignedMeasure& g);
bool is_zero_measure(const SignedMeasure& g);

// Exponent data (gamma, G) of the representation
//   f(t) = exp{ i t gamma + integral (e^{itx} - 1 - i t sin x) (1+x^2)/x^2 dG(x) }.
struct SpectralPair {
    double gamma = 0.0;
    SignedMeasure G;
};

// Constants of the quotient bound ratio <= C e^{B h^2}, in the
// published normalization (B = ||G||/2, C = e^{2||G||}) and in the
// corrected one (B = ||G||, C = e^{4||G||}).
struct BoundConstants {
    double B = 0.0;
    double C = 1.0;
    std::string variant;
};

BoundConstants bound_constants_paper(const SignedMeasure& g);
BoundConstants bound_constants_corrected(const SignedMeasure& g);

// Kernel (e^{itx} - 1 - i t sin x)(1+x^2)/x^2 with its continuous
// extension -t^2/2 at x = 0.
std::complex<double> lk_kernel(double t, double x);

// (1 - cos(hx)) (1+x^2)/x^2, extended by h^2/2 at x = 0.
double cos_defect_kernel(double h, double x);

std::complex<double> lk_exponent(const SpectralPair& pair, double t);

// exp of the exponent; overflow (real part above 700) is reported.
std::complex<double> lk_charfn(const SpectralPair& pair, double t);

// integral of e^{itx} (1 - cos(hx)) (1+x^2)/x^2 dG(x).
std::complex<double> quotient_exponent_integral(const SignedMeasure& g, double t, double h);

// Hahn-Jordan split: first component carries (gamma, G+), second
// (0, G-), so lk_charfn(first) / lk_charfn(second) reproduces the pair.
std::pair<SpectralPair, SpectralPair> hahn_jordan(const SpectralPair& pair);

// Spectral data recovered from a lattice discrete law via the
// log-characteristic-function Fourier coefficients on one period.
struct LatticeExtraction {
    SpectralPair pair;
    double r = 0.0;
    double h = 1.0;
    long long winding = 0;
    std::vector<std::pair<long long, double>> coeffs; // k -> c_k (real part)
    int grid_size = 0;
    double max_trailing = 0.0; // aliasing guard band, must stay <= 1e-10
    double max_imag = 0.0;     // largest |Im c_k| among retained coefficients
};

LatticeExtraction extract_lattice_spectral(const DiscretePart& d);

} // namespace qid
