#pragma once

#include "qidlab/charfn.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qid {

inline constexpr double kZeroHitThreshold = 1e-9;
inline constexpr double kDefaultInfTol = 1e-6;
inline constexpr std::uint64_t kDefaultNodeCap = 10000000;

enum class InfTarget { Full, Discrete };
enum class InfMode { ExactPeriod, Window };

// Certified bracket for an infimum of a modulus function.  In
// exact_period mode the bracket is valid for the infimum over all of
// R (the modulus is periodic); in window mode it only covers
// [-window_T, window_T].
struct InfCertificate {
    InfTarget target = InfTarget::Full;
    InfMode mode = InfMode::Window;
    double window_T = 0.0;  // window mode
    double period = 0.0;    // exact_period mode
    double domain_lo = 0.0;
    double domain_hi = 0.0;
    double lower_bound = 0.0; // certified
    double upper_bound = 0.0; // best evaluation found
    double argmin_t = 0.0;
    double lipschitz_L = 0.0;
    double tol = 0.0;
    double gap = 0.0;
    std::uint64_t nodes = 0;
    bool converged = false; // false only on node-cap exhaustion
    bool zero_hit = false;  // upper_bound below the zero-hit threshold
};

// Optional warm start: a known modulus value reached at argmin.
struct InfSeed {
    double upper = 0.0;
    double argmin = 0.0;
};

// Lipschitz branch-and-bound: on any subinterval with midpoint m and
// half-width rho the modulus is at least |f(m)| - L*rho.  Best-first
// subdivision until the gap drops below tol or the node cap is hit.
InfCertificate certify_inf(const std::function<double(double)>& modulus,
                           double lipschitz, InfMode mode, double lo, double hi,
                           double tol, std::uint64_t node_cap = kDefaultNodeCap,
                           const InfSeed* seed = nullptr);

// mu_d = inf |f_d|.  Lattice parts get a single exact-period
// certificate, valid on all of R; non-lattice parts get a window
// ladder with monotone upper bounds, and no global claim.
struct MuDEstimate {
    bool lattice = false;
    double period = 0.0;
    std::vector<InfCertificate> ladder;
    const InfCertificate& final_cert() const { return ladder.back(); }
};

MuDEstimate estimate_mu_d(const DistributionSpec& spec, double tol = kDefaultInfTol,
                          const std::vector<double>& window_ladder = {100.0, 1000.0, 10000.0},
                          std::uint64_t node_cap = kDefaultNodeCap);

// Asymptotic tier of the mu estimate: beyond the window,
// |f| >= c_d*mu_d - c_a*sup|f_a| - c_s.  Only flagged valid when the
// discrete part is lattice (so mu_d is certified globally) and
// c_s = 0; otherwise reported inconclusive.
enum class TierStatus { Valid, Inconclusive };

struct AsymptoticTier {
    TierStatus status = TierStatus::Inconclusive;
    double beyond_T = 0.0;
    double lower = 0.0;
    std::string note;
};

struct MuEstimate {
    std::vector<InfCertificate> ladder;
    AsymptoticTier asymptotic;
    double global_lower = 0.0; // certified bound for inf over R, when valid
    bool global_valid = false;
    const InfCertificate& final_cert() const { return ladder.back(); }
};

MuEstimate estimate_mu(const DistributionSpec& spec, double tol = kDefaultInfTol,
                       const std::vector<double>& window_ladder = {10.0, 100.0, 1000.0},
                       std::uint64_t node_cap = kDefaultNodeCap);

enum class Cond1 { HoldsOnWindow, ViolatedAt };
enum class Tri { Yes, No, Inconclusive };
enum class Verdict { MemberByCriterion, NecessaryConditionsFail, NecessaryHoldSufficiencyUnknown };

const char* to_string(Tri v);
const char* to_string(Verdict v);

// Separation conditions and membership tiers.  cond1 is zero-freeness
// of f (certified on the scanned window, globally when the asymptotic
// machinery applies), cond2 is mu_d > 0, cond3 is mu > 0.
struct ConditionReport {
    Cond1 cond1 = Cond1::HoldsOnWindow;
    double cond1_window_T = 0.0;
    double cond1_violation_t = 0.0; // when violated
    Tri cond2_mu_d_positive = Tri::Inconclusive;
    Tri cond3_mu_positive = Tri::Inconclusive;
    Tri dominated_singular = Tri::Inconclusive; // c_s < c_d*mu_d strictly
    bool mass_over_half = false;   // some atom of F carries mass > 1/2
    Verdict verdict = Verdict::NecessaryHoldSufficiencyUnknown;
    std::string context;
    std::optional<MuDEstimate> mu_d;
    MuEstimate mu;
    // Beyond-window lower bound c_d*mu_d_lb - c_a*tail - c_s used by the
    // dominated-singular tier; negative values mean no information.
    double beyond_window_lower = 0.0;
    bool beyond_window_valid = false;
};

ConditionReport check_conditions(const DistributionSpec& spec, double tol = kDefaultInfTol);

} // namespace qid
