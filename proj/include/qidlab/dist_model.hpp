#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qid {

// Lattice structure of a purely atomic law: every atom location equals
// r + h*k for an integer k.
struct LatticeHint {
    double r = 0.0;
    double h = 1.0;
};

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

struct DiscretePart {
    std::vector<Atom> atoms; // strictly increasing locations, masses sum to 1
    std::optional<LatticeHint> lattice_hint;
};

// Absolutely continuous catalog.  Every member has a closed-form
// characteristic function and finite first absolute moment.
struct Gaussian {
    double mean = 0.0;
    double variance = 1.0;
};

struct Uniform {
    double a = 0.0;
    double b = 1.0;
};

struct Exponential {
    double rate = 1.0;
};

struct Laplace {
    double mean = 0.0;
    double scale = 1.0;
};

using AbsContKind = std::variant<Gaussian, Uniform, Exponential, Laplace>;

struct AbsContComponent {
    AbsContKind kind;
    double weight = 1.0; // weights sum to 1 across the a.c. part
};

struct AbsContPart {
    std::vector<AbsContComponent> components;
};

/// Continuous singular catalog: affine images of the Cantor law,
// supported on offset + scale * C with C the middle-thirds Cantor set.
struct CantorLaw {
    double offset = 0.0;
    double scale = 1.0;
};

struct SingularPart {
    CantorLaw cantor;
};

// Three-part Lebesgue decomposition F = c_d F_d + c_a F_a + c_s F_s.
// A part is present exactly when its coefficient is positive.
struct DistributionSpec {
    double c_d = 0.0;
    double c_a = 0.0;
    double c_s = 0.0;
    std::optional<DiscretePart> discrete;
    std::optional<AbsContPart> abscont;
    std::optional<SingularPart> singular;
};

struct ValidationResult {
    bool ok = false;
    std::vector<std::string> violations;
    // Canonical form of the input: atoms sorted, lattice hint attached
    // when one is detected and survives refinement.
    DistributionSpec normalized;
};

ValidationResult validate(const DistributionSpec& spec);

// Weights of the continuous remainder F_c = (c_a F_a + c_s F_s) / (c_a + c_s).
// Throws SpecError when c_d == 1 (no continuous part exists).
struct ContinuousMix {
    double weight = 0.0;     // 1 - c_d
    double w_abscont = 0.0;  // c_a / (c_a + c_s)
    double w_singular = 0.0; // c_s / (c_a + c_s)
};

ContinuousMix continuous_mix(const DistributionSpec& spec);

// Rational-reconstruction lattice detection on atom locations.
// Returns a hint only when an integer grid fits every location to
// 1e-12 * max(1, |location|) after least-squares refinement of the step.
std::optional<LatticeHint> infer_lattice(const DiscretePart& d);

} // namespace qid
