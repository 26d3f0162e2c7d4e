#pragma once

#include "qidlab/dist_model.hpp"
#include "qidlab/harness.hpp"
#include "qidlab/infimum.hpp"
#include "qidlab/spectral.hpp"

#include <string>
#include <vector>

namespace qid {

// Shortest-exact rendering used everywhere a double is emitted (JSON
// and CSV): 17 significant digits, so parse(print(x)) == x.
std::string fmt_double(double v);

// Insertion-ordered JSON document tree with deterministic rendering.
class Json {
  public:
    static Json null();
    static Json boolean(bool v);
    static Json integer(long long v);
    static Json real(double v);
    static Json str(std::string v);
    static Json array();
    static Json object();

    Json& push(Json v);                    // arrays
    Json& set(std::string key, Json v);    // objects

    std::string dump() const; // pretty, 2-space indent, trailing newline

  private:
    enum class Kind { Null, Bool, Int, Real, Str, Arr, Obj };
    Kind kind_ = Kind::Null;
    bool b_ = false;
    long long i_ = 0;
    double d_ = 0.0;
    std::string s_;
    std::vector<Json> arr_;
    std::vector<std::pair<std::string, Json>> obj_;

    void render(std::string& out, int depth) const;
    bool scalar() const { return kind_ != Kind::Arr && kind_ != Kind::Obj; }
};

// Distribution spec documents.
DistributionSpec parse_spec_json(const std::string& text);
std::string spec_to_json(const DistributionSpec& spec);
DistributionSpec load_spec_file(const std::string& path); // parse + validate

// Spectral pair documents: {gamma, atoms: [[x, weight], ...], segments: [[a, b, level], ...]}.
SpectralPair parse_pair_json(const std::string& text);
std::string pair_to_json(const SpectralPair& pair);
SpectralPair load_pair_file(const std::string& path);

// Report document for `qidlab inf`.
struct InfReport {
    std::string target; // "full" or "d"
    bool lattice = false;
    double period = 0.0;
    std::vector<InfCertificate> certificates;
    AsymptoticTier asymptotic; // target "full" only
    double global_lower = 0.0;
    bool global_valid = false;
    std::string summary;
};

std::string inf_report_to_json(const InfReport& r);
InfReport parse_inf_report_json(const std::string& text);

// Report document for `qidlab check`.
struct CheckReport {
    ConditionReport report;
    std::string summary;
};

std::string check_report_to_json(const CheckReport& r);
CheckReport parse_check_report_json(const std::string& text);

// Quotient-identity grid sweep with both constant normalizations.
struct QuotientGridReport {
    std::vector<double> t_grid;
    std::vector<double> h_grid;
    BoundConstants constants_paper;
    BoundConstants constants_corrected;
    std::vector<QuotientCheck> rows; // t-major, then h
    double max_residual_paper = 0.0;
    double max_residual_corrected = 0.0;
    int matched_kappa = 0; // 1 or 2; 0 when neither residual stays below 1e-9
    long long violations_paper = 0;
    long long violations_corrected = 0;
    double min_margin_paper = 0.0;
    double min_margin_corrected = 0.0;
    std::string summary;
};

std::string quotient_report_to_json(const QuotientGridReport& r);
QuotientGridReport parse_quotient_report_json(const std::string& text);
std::string quotient_report_to_csv(const QuotientGridReport& r);

// Mean-value decay rows for a window ladder.
struct DecayReport {
    MeanDecayReport report;
    std::string summary;
};

std::string decay_report_to_json(const DecayReport& r);
DecayReport parse_decay_report_json(const std::string& text);
std::string decay_report_to_csv(const DecayReport& r);

// Proof-integral identity/chain check at one (t, tau).
struct IntegralsReport {
    ProofIntegrals integrals;
    std::string summary;
};

std::string integrals_report_to_json(const IntegralsReport& r);
IntegralsReport parse_integrals_report_json(const std::string& text);
std::string integrals_report_to_csv(const IntegralsReport& r);

// Parseval constant report.
struct ParsevalDoc {
    ParsevalReport report;
    std::string summary;
};

std::string parseval_report_to_json(const ParsevalDoc& r);
ParsevalDoc parse_parseval_report_json(const std::string& text);
std::string parseval_report_to_csv(const ParsevalDoc& r);

// Translation-number report.
struct TranslationReport {
    TranslationStructure structure;
    std::string summary;
};

std::string translation_report_to_json(const TranslationReport& r);
TranslationReport parse_translation_report_json(const std::string& text);
std::string translation_report_to_csv(const TranslationReport& r);

// Grid evaluation CSV: header t,re,im,abs.
std::string eval_csv(const std::vector<double>& ts,
                     const std::vector<std::complex<double>>& values);

} // namespace qid
