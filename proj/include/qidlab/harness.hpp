#pragma once

#include "qidlab/charfn.hpp"
#include "qidlab/spectral.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace qid {

// Tolerances used by the identity/inequality verdicts below.
inline constexpr double kIdentityTol = 1e-9;
inline constexpr double kChainTol = 1e-9;

// Worker cap honored by grid scans (QIDLAB_THREADS, hardware limit).
int thread_budget();

// Diagnostics of the symmetric quotient f(t-h)f(t+h)/f(t)^2 for a
// spectral pair: the directly computed quotient, residuals against the
// exponential formula exp{-kappa * integral e^{itx}(1-cos hx)(1+x^2)/x^2 dG}
// under kappa = 1 (published constants) and kappa = 2 (corrected), and
// margins of the bound ratio <= C e^{B h^2} under both constant sets.
struct QuotientCheck {
    double t = 0.0;
    double h = 0.0;
    double ratio = 0.0;
    std::complex<double> quotient;
    double identity_residual_paper = 0.0;
    double identity_residual_corrected = 0.0;
    double bound_margin_paper = 0.0;
    double bound_margin_corrected = 0.0;
};

QuotientCheck quotient_check(const SpectralPair& pair, double t, double h);

// Max over the grid of (1 - cos(hx))(1+x^2)/x^2 - (h^2/2 + 2); the
// x = 0 entries use the continuity value h^2/2.
double elem_inequality_scan(const std::vector<double>& h_grid,
                            const std::vector<double>& x_grid);

/// Mean-value integrals from the zero-separation proof machinery:
//   I(t,tau) = (1/2tau) int |f(t-h)f(t+h)| / |f(t)|^2 dh
//   J(t,tau) = I * |f(t)|^2,  J_d, J_c analogous for the factors.
struct ProofIntegrals {
    double t = 0.0;
    double tau = 0.0;
    double I = 0.0;
    double J = 0.0;
    double J_d = 0.0; // 0 when c_d = 0
    double J_c = 0.0; // 0 when c_d = 1
    std::optional<double> A;
    double quad_error = 0.0;
    bool ill_conditioned = false; // |f(t)| <= 1e-12, I not computed
    double identity_residual = 0.0;
    bool identity_ok = false; // |J - I |f|^2| <= 1e-9
    double chain_margin = 0.0;
    bool chain_ok = false; // J >= c_d^2 J_d - J_c - 1e-9
};

ProofIntegrals proof_integrals(const DistributionSpec& spec, double t, double tau,
                               double quad_tol = 1e-10);

// Finite trigonometric polynomial sum_j coeffs[j] e^{i freqs[j] t}.
struct TrigPoly {
    std::vector<double> freqs;
    std::vector<std::complex<double>> coeffs;
};

TrigPoly trig_poly_of_discrete(const DiscretePart& d);

// Parseval constant A = sum |Fourier coefficients of phi(h) phi(-h)|^2,
// computed symbolically from the frequency-difference algebra, plus
// mean-value approximations (1/2T) int |phi(h)phi(-h)|^2 dh.
struct ParsevalReport {
    double A_exact = 0.0;
    std::vector<double> diff_freqs;
    std::vector<std::complex<double>> diff_coeffs;
    std::vector<double> T_ladder;
    std::vector<double> A_means;
    std::vector<double> quad_errors;
};

ParsevalReport parseval_A(const TrigPoly& phi, const std::vector<double>& T_ladder);

/// Decay of the mean value M(t, T) of |f_c|^2: max over a t-grid, per T.
struct MeanDecayRow {
    double T = 0.0;
    double max_mean = 0.0;
    double argmax_t = 0.0;
    double max_quad_error = 0.0;
};

struct MeanDecayReport {
    std::vector<double> t_grid;
    std::vector<MeanDecayRow> rows;
};

MeanDecayReport lemma2_decay(const DistributionSpec& spec,
                             const std::vector<double>& t_grid,
                             const std::vector<double>& T_ladder);

// epsilon-translation numbers of f_d found by scanning [0, window]
// with the rigorous bound D(tau) = sum_j 2 p_j |sin(x_j tau / 2)|,
// which dominates sup_t |f_d(t+tau) - f_d(t)|.  Every stored tau is
// also verified against a dense t-grid sample of the sup.
struct TranslationStructure {
    double epsilon = 0.0;
    double mu = 0.0;
    double window = 0.0;
    double scan_step = 0.0;
    double sup_grid_step = 0.0;
    double sup_span = 0.0;
    std::vector<double> taus;       // taus[0] = 0
    std::vector<double> tau_bounds; // D(tau), rigorous
    std::vector<double> tau_sups;   // sampled sup on the t-grid
    double ell = 0.0;   // empirical inclusion length (max gap)
    double delta = 0.0; // continuity radius, capped for disjointness
    bool window_too_small = false;
    bool chain_checked = false;
    double t_epsilon = 0.0;
    double t_epsilon_value = 0.0; // |f_d(t_epsilon)|
    double chain_max = 0.0;       // max_k |f_d(t_epsilon + tau_k + delta)|
    bool chain_ok = false;        // chain_max < 3 epsilon mu
};

TranslationStructure translation_numbers(const DiscretePart& d, double epsilon,
                                         double mu, double window,
                                         std::optional<double> t_epsilon = std::nullopt);

} // namespace qid
