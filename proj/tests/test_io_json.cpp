#include "doctest.h"

#include "qidlab/errors.hpp"
#include "qidlab/harness.hpp"
#include "qidlab/io_json.hpp"

#include "support.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

using qid::fmt_double;
using qid::Json;

namespace {

bool spec_error_with(const std::function<void()>& fn, const char* needle) {
    try {
        fn();
    } catch (const qid::SpecError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    } catch (...) {
        return false;
    }
    return false;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

qid::InfCertificate sample_cert() {
    qid::InfCertificate c;
    c.target = qid::InfTarget::Discrete;
    c.mode = qid::InfMode::ExactPeriod;
    c.window_T = M_PI;
    c.period = 2.0 * M_PI;
    c.domain_lo = 0.0;
    c.domain_hi = 2.0 * M_PI;
    c.lower_bound = 0.5 - 1e-7;
    c.upper_bound = 0.5;
    c.argmin_t = M_PI;
    c.lipschitz_L = 0.25;
    c.tol = 1e-6;
    c.gap = 1e-7;
    c.nodes = 12345;
    c.converged = true;
    c.zero_hit = false;
    return c;
}

qid::InfCertificate sample_window_cert() {
    qid::InfCertificate c = sample_cert();
    c.target = qid::InfTarget::Full;
    c.mode = qid::InfMode::Window;
    c.window_T = 100.0;
    c.period = 0.0;
    c.domain_lo = -100.0;
    c.domain_hi = 100.0;
    c.lower_bound = 0.2992;
    c.upper_bound = 0.3;
    c.argmin_t = -41.337;
    c.lipschitz_L = 1.75;
    c.nodes = 99881;
    return c;
}

} // namespace

TEST_CASE("fmt_double round-trips every double through 17 digits") {
    const double values[] = {
        0.0,
        -0.0,
        1.0,
        -1.0,
        0.1,
        1.0 / 3.0,
        M_PI,
        std::sqrt(2.0),
        0.4609375,
        4097.0 / 4096.0,
        6.02214076e23,
        -2.2250738585072014e-308, // smallest normal, negated
        5e-324,                   // smallest subnormal
        1.7976931348623157e308,   // largest finite
        2.0 * M_PI * 1e-17,
    };
    for (double v : values) {
        std::string s = fmt_double(v);
        double back = std::strtod(s.c_str(), nullptr);
        // Bit-exact, including the sign of zero.
        CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
}

TEST_CASE("fmt_double rejects non-finite values") {
    CHECK_THROWS_AS(fmt_double(std::numeric_limits<double>::infinity()), qid::Error&);
    CHECK_THROWS_AS(fmt_double(-std::numeric_limits<double>::infinity()), qid::Error&);
    CHECK_THROWS_AS(fmt_double(std::numeric_limits<double>::quiet_NaN()), qid::Error&);
}

TEST_CASE("json documents render with deterministic shape") {
    Json doc = Json::object();
    doc.set("count", Json::integer(3));
    doc.set("flag", Json::boolean(true));
    doc.set("nothing", Json::null());
    doc.set("vals", Json::array()
                        .push(Json::real(1.5))
                        .push(Json::real(2.0))
                        .push(Json::real(-0.25)));
    doc.set("name", Json::str("qid\"\\\n"));
    Json rows = Json::array();
    Json row = Json::object();
    row.set("a", Json::integer(1));
    rows.push(std::move(row));
    rows.push(Json::integer(2));
    doc.set("rows", std::move(rows));
    doc.set("empty_arr", Json::array());
    doc.set("empty_obj", Json::object());

    const std::string expected = "{\n"
                                 "  \"count\": 3,\n"
                                 "  \"flag\": true,\n"
                                 "  \"nothing\": null,\n"
                                 "  \"vals\": [1.5, 2, -0.25],\n"
                                 "  \"name\": \"qid\\\"\\\\\\n\",\n"
                                 "  \"rows\": [\n"
                                 "    {\n"
                                 "      \"a\": 1\n"
                                 "    },\n"
                                 "    2\n"
                                 "  ],\n"
                                 "  \"empty_arr\": [],\n"
                                 "  \"empty_obj\": {}\n"
                                 "}\n";
    CHECK(doc.dump() == expected);
}

TEST_CASE("json builders reject kind mismatches") {
    CHECK_THROWS_AS(Json::object().push(Json::null()), qid::Error&);
    CHECK_THROWS_AS(Json::array().set("k", Json::null()), qid::Error&);
}

TEST_CASE("spec documents round-trip bit-equal over the catalog") {
    for (const auto& entry : qt::catalog()) {
        CAPTURE(entry.name);
        std::string text = qid::spec_to_json(entry.spec);
        qid::DistributionSpec parsed = qid::parse_spec_json(text);
        CHECK(qid::spec_to_json(parsed) == text);
        CHECK(parsed.c_d == entry.spec.c_d);
        CHECK(parsed.c_a == entry.spec.c_a);
        CHECK(parsed.c_s == entry.spec.c_s);
        CHECK(parsed.discrete.has_value() == entry.spec.discrete.has_value());
        CHECK(parsed.abscont.has_value() == entry.spec.abscont.has_value());
        CHECK(parsed.singular.has_value() == entry.spec.singular.has_value());
    }
}

TEST_CASE("spec parser defaults omitted fields") {
    auto s = qid::parse_spec_json(R"({"c_a": 1.0, "abscont": {"components":
        [{"family": "exponential", "rate": 2.0}]}})");
    CHECK(s.c_d == 0.0);
    CHECK(s.c_s == 0.0);
    CHECK(s.c_a == 1.0);
    REQUIRE(s.abscont.has_value());
    REQUIRE(s.abscont->components.size() == 1);
    CHECK(s.abscont->components[0].weight == 1.0);
    const auto* ex = std::get_if<qid::Exponential>(&s.abscont->components[0].kind);
    REQUIRE(ex != nullptr);
    CHECK(ex->rate == 2.0);
}

TEST_CASE("spec parser rejects malformed documents") {
    CHECK(spec_error_with([] { qid::parse_spec_json("{"); }, "malformed JSON"));
    CHECK(spec_error_with([] { qid::parse_spec_json("[]"); }, "expected an object"));
    CHECK(spec_error_with([] { qid::parse_spec_json(R"({"c_d": 1.0, "zeta": 3})"); },
                          "unknown key 'zeta'"));
    CHECK(spec_error_with(
        [] {
            qid::parse_spec_json(
                R"({"c_d": 1.0, "discrete": {"atoms": [[0, 1]], "step": 2}})");
        },
        "unknown key 'step'"));
    CHECK(spec_error_with([] { qid::parse_spec_json(R"({"c_d": "one"})"); },
                          "expected a number"));
    CHECK(spec_error_with(
        [] { qid::parse_spec_json(R"({"discrete": {"atoms": [[1]]}})"); },
        "[location, mass] pairs"));
    CHECK(spec_error_with(
        [] {
            qid::parse_spec_json(
                R"({"discrete": {"atoms": [], "lattice_hint": {"h": 1.0}}})");
        },
        "missing key 'r'"));
    CHECK(spec_error_with(
        [] {
            qid::parse_spec_json(
                R"({"abscont": {"components": [{"family": "beta"}]}})");
        },
        "unknown family 'beta'"));
    CHECK(spec_error_with(
        [] {
            qid::parse_spec_json(
                R"({"abscont": {"components": [{"family": "gaussian", "sigma": 1}]}})");
        },
        "unknown key 'sigma'"));
}

TEST_CASE("pair documents round-trip bit-equal") {
    for (const auto& [name, pair] : qt::pair_catalog()) {
        CAPTURE(name);
        std::string text = qid::pair_to_json(pair);
        qid::SpectralPair parsed = qid::parse_pair_json(text);
        CHECK(qid::pair_to_json(parsed) == text);
        CHECK(parsed.gamma == pair.gamma);
        CHECK(parsed.G.atoms.size() == pair.G.atoms.size());
        CHECK(parsed.G.segments.size() == pair.G.segments.size());
    }
}

TEST_CASE("pair parser rejects malformed documents") {
    CHECK(spec_error_with([] { qid::parse_pair_json(R"({"atoms": []})"); },
                          "missing key 'gamma'"));
    CHECK(spec_error_with(
        [] { qid::parse_pair_json(R"({"gamma": 0, "atoms": [[1, 2, 3]]})"); },
        "[x, weight] pairs"));
    CHECK(spec_error_with(
        [] { qid::parse_pair_json(R"({"gamma": 0, "atoms": [], "segments": [[0, 1]]})"); },
        "[a, b, level] triples"));
    CHECK(spec_error_with(
        [] { qid::parse_pair_json(R"({"gamma": 0, "atoms": [], "mass": 1})"); },
        "unknown key 'mass'"));
}

TEST_CASE("spec and pair file loaders validate on load") {
    const std::string good = "tmp_iojson_good_spec.json";
    const std::string bad = "tmp_iojson_bad_spec.json";
    const std::string pairf = "tmp_iojson_bad_pair.json";
    write_file(good, qid::spec_to_json(qt::catalog()[0].spec));
    write_file(bad, R"({"c_d": 0.5})");
    write_file(pairf, R"({"gamma": 0, "atoms": [[1.0, 0.5], [1.0, 0.25]]})");

    qid::DistributionSpec s = qid::load_spec_file(good);
    CHECK(s.c_d + s.c_a + s.c_s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spec_error_with([&] { qid::load_spec_file(bad); }, "invalid spec"));
    CHECK(spec_error_with([&] { qid::load_pair_file(pairf); }, "invalid pair"));
    CHECK(spec_error_with([] { qid::load_spec_file("definitely_not_here.json"); },
                          "cannot open file"));

    std::remove(good.c_str());
    std::remove(bad.c_str());
    std::remove(pairf.c_str());
}

TEST_CASE("inf reports round-trip bit-equal for both targets") {
    qid::InfReport rd;
    rd.target = "d";
    rd.lattice = true;
    rd.period = 2.0 * M_PI;
    rd.certificates = {sample_cert()};
    rd.summary = "inf over one period";
    std::string text = qid::inf_report_to_json(rd);
    qid::InfReport back = qid::parse_inf_report_json(text);
    CHECK(qid::inf_report_to_json(back) == text);
    REQUIRE(back.certificates.size() == 1);
    CHECK(back.certificates[0].nodes == 12345);
    CHECK(back.certificates[0].upper_bound == 0.5);
    CHECK(back.certificates[0].lower_bound == rd.certificates[0].lower_bound);
    CHECK(back.period == rd.period);

    qid::InfReport rf;
    rf.target = "full";
    rf.certificates = {sample_window_cert()};
    rf.asymptotic.status = qid::TierStatus::Valid;
    rf.asymptotic.beyond_T = 1000.0;
    rf.asymptotic.lower = 0.29;
    rf.asymptotic.note = "for |t| > T, ...";
    rf.global_lower = 0.29;
    rf.global_valid = true;
    rf.summary = "global floor";
    std::string textf = qid::inf_report_to_json(rf);
    qid::InfReport backf = qid::parse_inf_report_json(textf);
    CHECK(qid::inf_report_to_json(backf) == textf);
    CHECK(backf.global_lower == 0.29);
    CHECK(backf.asymptotic.status == qid::TierStatus::Valid);
}

TEST_CASE("inf report parser rejects bad documents") {
    CHECK(spec_error_with(
        [] {
            qid::parse_inf_report_json(
                R"({"target": "q", "certificates": [], "summary": ""})");
        },
        "unknown target 'q'"));

    qid::InfReport rd;
    rd.target = "d";
    rd.lattice = false;
    rd.period = 0.0;
    rd.certificates = {sample_cert()};
    rd.summary = "";
    std::string text = qid::inf_report_to_json(rd);
    auto pos = text.find("\"nodes\"");
    REQUIRE(pos != std::string::npos);
    std::string mutated = text;
    mutated.replace(pos, 7, "\"knots\"");
    CHECK(spec_error_with([&] { qid::parse_inf_report_json(mutated); },
                          "unknown key 'knots'"));
}

TEST_CASE("check reports round-trip bit-equal") {
    qid::CheckReport cr;
    qid::ConditionReport& c = cr.report;
    c.cond1 = qid::Cond1::ViolatedAt;
    c.cond1_window_T = 30.0;
    c.cond1_violation_t = 1.5 * M_PI;
    c.cond2_mu_d_positive = qid::Tri::No;
    c.cond3_mu_positive = qid::Tri::Inconclusive;
    c.dominated_singular = qid::Tri::Yes;
    c.mass_over_half = true;
    c.verdict = qid::Verdict::NecessaryConditionsFail;
    c.context = "cond2 fails: example";
    qid::MuDEstimate mud;
    mud.lattice = true;
    mud.period = 2.0 * M_PI;
    mud.ladder = {sample_cert()};
    c.mu_d = mud;
    c.mu.ladder = {sample_window_cert()};
    c.mu.asymptotic.status = qid::TierStatus::Inconclusive;
    c.mu.asymptotic.beyond_T = 100.0;
    c.mu.asymptotic.lower = 0.0;
    c.mu.asymptotic.note = "inconclusive: example";
    c.mu.global_lower = 0.0;
    c.mu.global_valid = false;
    c.beyond_window_lower = 0.04;
    c.beyond_window_valid = true;
    cr.summary = "verdict: necessary_conditions_fail";

    std::string text = qid::check_report_to_json(cr);
    qid::CheckReport back = qid::parse_check_report_json(text);
    CHECK(qid::check_report_to_json(back) == text);
    CHECK(back.report.cond1 == qid::Cond1::ViolatedAt);
    CHECK(back.report.cond1_violation_t == c.cond1_violation_t);
    CHECK(back.report.verdict == qid::Verdict::NecessaryConditionsFail);
    REQUIRE(back.report.mu_d.has_value());
    CHECK(back.report.mu_d->period == mud.period);
    CHECK(back.report.beyond_window_lower == 0.04);

    // Absent mu_d serializes as null and parses back as absent.
    c.mu_d.reset();
    std::string text2 = qid::check_report_to_json(cr);
    CHECK(text2.find("\"mu_d\": null") != std::string::npos);
    qid::CheckReport back2 = qid::parse_check_report_json(text2);
    CHECK(!back2.report.mu_d.has_value());

    // Unknown verdict strings are rejected.
    std::string mutated = text2;
    auto pos = mutated.find("\"necessary_conditions_fail\"");
    REQUIRE(pos != std::string::npos);
    mutated.replace(pos, std::strlen("\"necessary_conditions_fail\""), "\"maybe\"");
    CHECK(spec_error_with([&] { qid::parse_check_report_json(mutated); },
                          "unknown verdict 'maybe'"));
}

TEST_CASE("quotient grid reports round-trip and print the pinned CSV header") {
    const qid::SpectralPair* poisson = nullptr;
    for (const auto& [name, pair] : qt::pair_catalog())
        if (name == "poisson")
            poisson = &pair;
    REQUIRE(poisson != nullptr);

    qid::QuotientGridReport r;
    r.t_grid = {0.0, 0.7};
    r.h_grid = {0.0, 2.0};
    r.constants_paper = qid::bound_constants_paper(poisson->G);
    r.constants_corrected = qid::bound_constants_corrected(poisson->G);
    for (double t : r.t_grid)
        for (double h : r.h_grid) {
            auto qc = qid::quotient_check(*poisson, t, h);
            r.max_residual_paper = std::max(r.max_residual_paper, qc.identity_residual_paper);
            r.max_residual_corrected =
                std::max(r.max_residual_corrected, qc.identity_residual_corrected);
            r.rows.push_back(qc);
        }
    r.matched_kappa = 2;
    r.min_margin_paper = -1.0;
    r.min_margin_corrected = 0.5;
    r.violations_paper = 1;
    r.summary = "matched kappa = 2";

    std::string text = qid::quotient_report_to_json(r);
    qid::QuotientGridReport back = qid::parse_quotient_report_json(text);
    CHECK(qid::quotient_report_to_json(back) == text);
    REQUIRE(back.rows.size() == 4);
    CHECK(back.rows[3].ratio == r.rows[3].ratio);
    CHECK(back.rows[3].quotient.real() == r.rows[3].quotient.real());
    CHECK(back.matched_kappa == 2);
    CHECK(back.violations_paper == 1);

    std::string csv = qid::quotient_report_to_csv(r);
    auto rows = lines_of(csv);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "t,h,ratio,identity_residual_paper,identity_residual_corrected,"
                     "bound_margin_paper,bound_margin_corrected");
    CHECK(rows[1].rfind("0,0,1,", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(split_csv_row(rows[i]).size() == 7);

    std::string mutated = text;
    auto pos = mutated.find("\"quotient_grid\"");
    REQUIRE(pos != std::string::npos);
    mutated.replace(pos, std::strlen("\"quotient_grid\""), "\"quotient\"");
    CHECK(spec_error_with([&] { qid::parse_quotient_report_json(mutated); },
                          "wrong check tag"));

    CHECK(spec_error_with(
        [] {
            qid::parse_quotient_report_json(R"({"check": "quotient_grid",
                "t_grid": [0], "h_grid": [1],
                "constants_paper": {"variant": "paper", "B": 0.25, "C": 2.7},
                "constants_corrected": {"variant": "corrected", "B": 0.5, "C": 7.4},
                "columns": [], "rows": [[1, 2, 3]],
                "max_residual_paper": 0, "max_residual_corrected": 0,
                "matched_kappa": 2, "violations_paper": 0, "violations_corrected": 0,
                "min_margin_paper": 0, "min_margin_corrected": 0, "summary": ""})");
        },
        "rows carry 9 columns"));
}

TEST_CASE("decay reports round-trip and print the pinned CSV header") {
    const qid::DistributionSpec* gauss = nullptr;
    for (const auto& e : qt::catalog())
        if (e.name == "gaussian_std")
            gauss = &e.spec;
    REQUIRE(gauss != nullptr);

    qid::DecayReport r;
    r.report = qid::lemma2_decay(*gauss, {0.0, 1.0}, {10.0, 100.0});
    r.summary = "decay ladder";
    std::string text = qid::decay_report_to_json(r);
    qid::DecayReport back = qid::parse_decay_report_json(text);
    CHECK(qid::decay_report_to_json(back) == text);
    REQUIRE(back.report.rows.size() == 2);
    CHECK(back.report.rows[0].max_mean == r.report.rows[0].max_mean);

    std::string csv = qid::decay_report_to_csv(r);
    auto rows = lines_of(csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "T,max_mean,argmax_t,max_quad_error");
    auto fields = split_csv_row(rows[1]);
    REQUIRE(fields.size() == 4);
    CHECK(fields[0] == "10");
    CHECK(fields[2] == "0"); // argmax at t = 0 for the Gaussian
    CHECK(fields[3] == "0"); // closed form, no quadrature error
}

TEST_CASE("integrals reports round-trip; CSV leaves A empty when absent") {
    const qid::DistributionSpec* point = nullptr;
    const qid::DistributionSpec* gauss = nullptr;
    for (const auto& e : qt::catalog()) {
        if (e.name == "point_mass")
            point = &e.spec;
        if (e.name == "gaussian_std")
            gauss = &e.spec;
    }
    REQUIRE(point != nullptr);
    REQUIRE(gauss != nullptr);

    qid::IntegralsReport r;
    r.integrals = qid::proof_integrals(*point, 0.3, 2.0);
    r.summary = "identity and chain";
    std::string text = qid::integrals_report_to_json(r);
    qid::IntegralsReport back = qid::parse_integrals_report_json(text);
    CHECK(qid::integrals_report_to_json(back) == text);
    REQUIRE(back.integrals.A.has_value());
    CHECK(*back.integrals.A == *r.integrals.A);
    CHECK(back.integrals.J == r.integrals.J);

    std::string csv = qid::integrals_report_to_csv(r);
    auto rows = lines_of(csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "t,tau,I,J,J_d,J_c,A,quad_error,identity_residual,chain_margin");
    auto fields = split_csv_row(rows[1]);
    REQUIRE(fields.size() == 10);
    CHECK(fields[6] != "");

    qid::IntegralsReport rg;
    rg.integrals = qid::proof_integrals(*gauss, 0.5, 1.0);
    rg.summary = "continuous only";
    std::string textg = qid::integrals_report_to_json(rg);
    CHECK(textg.find("\"A\": null") != std::string::npos);
    qid::IntegralsReport backg = qid::parse_integrals_report_json(textg);
    CHECK(!backg.integrals.A.has_value());
    auto fieldsg = split_csv_row(lines_of(qid::integrals_report_to_csv(rg))[1]);
    REQUIRE(fieldsg.size() == 10);
    CHECK(fieldsg[6] == "");
}

TEST_CASE("parseval reports round-trip and print the pinned CSV header") {
    qid::TrigPoly phi;
    phi.freqs = {0.0, 1.0};
    phi.coeffs = {{0.75, 0.0}, {0.25, 0.0}};
    qid::ParsevalDoc r;
    r.report = qid::parseval_A(phi, {5.0, 50.0});
    r.summary = "parseval ladder";
    std::string text = qid::parseval_report_to_json(r);
    qid::ParsevalDoc back = qid::parse_parseval_report_json(text);
    CHECK(qid::parseval_report_to_json(back) == text);
    CHECK(back.report.A_exact == r.report.A_exact);
    REQUIRE(back.report.diff_coeffs.size() == r.report.diff_coeffs.size());
    CHECK(back.report.diff_coeffs[0] == r.report.diff_coeffs[0]);

    std::string csv = qid::parseval_report_to_csv(r);
    auto rows = lines_of(csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "T,A_mean,abs_error,quad_error");
    auto fields = split_csv_row(rows[1]);
    REQUIRE(fields.size() == 4);
    CHECK(fields[0] == "5");
}

TEST_CASE("translation reports round-trip and print the pinned CSV header") {
    qid::DiscretePart bern;
    bern.atoms = {{0.0, 0.75}, {1.0, 0.25}};

    qid::TranslationReport r;
    r.structure = qid::translation_numbers(bern, 0.1, 0.5, 3.0);
    r.summary = "window too small";
    std::string text = qid::translation_report_to_json(r);
    qid::TranslationReport back = qid::parse_translation_report_json(text);
    CHECK(qid::translation_report_to_json(back) == text);
    CHECK(back.structure.delta == r.structure.delta);
    CHECK(back.structure.window_too_small == r.structure.window_too_small);

    // One anchor tau at 0 with a zero bound and zero sampled sup.
    CHECK(qid::translation_report_to_csv(r) == "tau,bound,sampled_sup\n0,0,0\n");
}

TEST_CASE("eval_csv prints the pinned header and exact fields") {
    std::vector<double> ts = {0.0, 0.5};
    std::vector<std::complex<double>> vals = {{1.0, 0.0}, {0.25, -0.5}};
    std::string csv = qid::eval_csv(ts, vals);
    auto rows = lines_of(csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "t,re,im,abs");
    CHECK(rows[1] == "0,1,0,1");
    auto fields = split_csv_row(rows[2]);
    REQUIRE(fields.size() == 4);
    CHECK(fields[0] == "0.5");
    CHECK(fields[1] == "0.25");
    CHECK(fields[2] == "-0.5");
    double abs_back = std::strtod(fields[3].c_str(), nullptr);
    CHECK(abs_back == std::abs(vals[1]));

    CHECK_THROWS_AS(qid::eval_csv({0.0}, {}), qid::Error&);
}
