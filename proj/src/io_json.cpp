#include "qidlab/io_json.hpp"

#include "qidlab/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

namespace qid {

namespace {

namespace nj = ::nlohmann;

[[noreturn]] void fail(const std::string& msg) { throw SpecError(msg); }

nj::json parse_text(const std::string& text) {
    try {
        return nj::json::parse(text);
    } catch (const nj::json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
}

const nj::json& need(const nj::json& o, const char* key, const char* ctx) {
    auto it = o.find(key);
    if (it == o.end())
        fail(std::string(ctx) + ": missing key '" + key + "'");
    return *it;
}

double as_num(const nj::json& v, const char* ctx) {
    if (!v.is_number())
        fail(std::string(ctx) + ": expected a number");
    return v.get<double>();
}

long long as_int(const nj::json& v, const char* ctx) {
    if (!v.is_number_integer())
        fail(std::string(ctx) + ": expected an integer");
    return v.get<long long>();
}

bool as_bool(const nj::json& v, const char* ctx) {
    if (!v.is_boolean())
        fail(std::string(ctx) + ": expected a boolean");
    return v.get<bool>();
}

std::string as_str(const nj::json& v, const char* ctx) {
    if (!v.is_string())
        fail(std::string(ctx) + ": expected a string");
    return v.get<std::string>();
}

const nj::json& as_obj(const nj::json& v, const char* ctx) {
    if (!v.is_object())
        fail(std::string(ctx) + ": expected an object");
    return v;
}

const nj::json& as_arr(const nj::json& v, const char* ctx) {
    if (!v.is_array())
        fail(std::string(ctx) + ": expected an array");
    return v;
}

void check_keys(const nj::json& o, std::initializer_list<const char*> allowed, const char* ctx) {
    for (auto it = o.begin(); it != o.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            fail(std::string(ctx) + ": unknown key '" + it.key() + "'");
    }
}

std::vector<double> num_vec(const nj::json& v, const char* ctx) {
    std::vector<double> out;
    for (const auto& e : as_arr(v, ctx))
        out.push_back(as_num(e, ctx));
    return out;
}

Json num_vec_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v)
        a.push(Json::real(x));
    return a;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void escape(const std::string& s, std::string& out) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (c < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += static_cast<char>(c);
            }
        }
    }
    out += '"';
}

} // namespace

std::string fmt_double(double v) {
    if (!std::isfinite(v))
        throw Error("non-finite value in serialized output");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json Json::null() { return Json{}; }

Json Json::boolean(bool v) {
    Json j;
    j.kind_ = Kind::Bool;
    j.b_ = v;
    return j;
}

Json Json::integer(long long v) {
    Json j;
    j.kind_ = Kind::Int;
    j.i_ = v;
    return j;
}

Json Json::real(double v) {
    Json j;
    j.kind_ = Kind::Real;
    j.d_ = v;
    return j;
}

Json Json::str(std::string v) {
    Json j;
    j.kind_ = Kind::Str;
    j.s_ = std::move(v);
    return j;
}

Json Json::array() {
    Json j;
    j.kind_ = Kind::Arr;
    return j;
}

Json Json::object() {
    Json j;
    j.kind_ = Kind::Obj;
    return j;
}

Json& Json::push(Json v) {
    if (kind_ != Kind::Arr)
        throw Error("Json::push on a non-array");
    arr_.push_back(std::move(v));
    return *this;
}

Json& Json::set(std::string key, Json v) {
    if (kind_ != Kind::Obj)
        throw Error("Json::set on a non-object");
    obj_.emplace_back(std::move(key), std::move(v));
    return *this;
}

void Json::render(std::string& out, int depth) const {
    auto pad = [&out](int d) { out.append(static_cast<std::size_t>(d) * 2, ' '); };
    switch (kind_) {
    case Kind::Null: out += "null"; return;
    case Kind::Bool: out += b_ ? "true" : "false"; return;
    case Kind::Int: out += std::to_string(i_); return;
    case Kind::Real: out += fmt_double(d_); return;
    case Kind::Str: escape(s_, out); return;
    case Kind::Arr: {
        if (arr_.empty()) {
            out += "[]";
            return;
        }
        bool flat = true;
        for (const auto& e : arr_)
            if (!e.scalar()) {
                flat = false;
                break;
            }
        if (flat) {
            out += '[';
            for (std::size_t i = 0; i < arr_.size(); ++i) {
                if (i)
                    out += ", ";
                arr_[i].render(out, depth);
            }
            out += ']';
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < arr_.size(); ++i) {
            pad(depth + 1);
            arr_[i].render(out, depth + 1);
            if (i + 1 < arr_.size())
                out += ',';
            out += '\n';
        }
        pad(depth);
        out += ']';
        return;
    }
    case Kind::Obj: {
        if (obj_.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        for (std::size_t i = 0; i < obj_.size(); ++i) {
            pad(depth + 1);
            escape(obj_[i].first, out);
            out += ": ";
            obj_[i].second.render(out, depth + 1);
            if (i + 1 < obj_.size())
                out += ',';
            out += '\n';
        }
        pad(depth);
        out += '}';
        return;
    }
    }
}

std::string Json::dump() const {
    std::string out;
    render(out, 0);
    out += '\n';
    return out;
}

// ---------------------------------------------------------------- specs

DistributionSpec parse_spec_json(const std::string& text) {
    nj::json j = parse_text(text);
    const auto& o = as_obj(j, "spec");
    check_keys(o, {"c_d", "c_a", "c_s", "discrete", "abscont", "singular"}, "spec");
    DistributionSpec s;
    if (o.contains("c_d"))
        s.c_d = as_num(o.at("c_d"), "spec.c_d");
    if (o.contains("c_a"))
        s.c_a = as_num(o.at("c_a"), "spec.c_a");
    if (o.contains("c_s"))
        s.c_s = as_num(o.at("c_s"), "spec.c_s");
    if (o.contains("discrete")) {
        const auto& d = as_obj(o.at("discrete"), "spec.discrete");
        check_keys(d, {"atoms", "lattice_hint"}, "spec.discrete");
        DiscretePart part;
        for (const auto& a : as_arr(need(d, "atoms", "spec.discrete"), "spec.discrete.atoms")) {
            const auto& e = as_arr(a, "spec.discrete.atoms entry");
            if (e.size() != 2)
                fail("spec.discrete.atoms: entries are [location, mass] pairs");
            part.atoms.push_back({as_num(e[0], "spec.discrete atom location"),
                                  as_num(e[1], "spec.discrete atom mass")});
        }
        if (d.contains("lattice_hint")) {
            const auto& h = as_obj(d.at("lattice_hint"), "spec.discrete.lattice_hint");
            check_keys(h, {"r", "h"}, "spec.discrete.lattice_hint");
            part.lattice_hint =
                LatticeHint{as_num(need(h, "r", "spec.discrete.lattice_hint"), "lattice_hint.r"),
                            as_num(need(h, "h", "spec.discrete.lattice_hint"), "lattice_hint.h")};
        }
        s.discrete = std::move(part);
    }
    if (o.contains("abscont")) {
        const auto& aj = as_obj(o.at("abscont"), "spec.abscont");
        check_keys(aj, {"components"}, "spec.abscont");
        AbsContPart part;
        for (const auto& cj0 :
             as_arr(need(aj, "components", "spec.abscont"), "spec.abscont.components")) {
            const auto& cj = as_obj(cj0, "spec.abscont.components entry");
            const std::string fam =
                as_str(need(cj, "family", "spec.abscont component"), "component.family");
            AbsContComponent comp;
            if (cj.contains("weight"))
                comp.weight = as_num(cj.at("weight"), "component.weight");
            const char* ctx = "spec.abscont component";
            if (fam == "gaussian") {
                check_keys(cj, {"family", "weight", "mean", "variance"}, ctx);
                Gaussian g;
                if (cj.contains("mean"))
                    g.mean = as_num(cj.at("mean"), "gaussian.mean");
                if (cj.contains("variance"))
                    g.variance = as_num(cj.at("variance"), "gaussian.variance");
                comp.kind = g;
            } else if (fam == "uniform") {
                check_keys(cj, {"family", "weight", "a", "b"}, ctx);
                Uniform u;
                if (cj.contains("a"))
                    u.a = as_num(cj.at("a"), "uniform.a");
                if (cj.contains("b"))
                    u.b = as_num(cj.at("b"), "uniform.b");
                comp.kind = u;
            } else if (fam == "exponential") {
                check_keys(cj, {"family", "weight", "rate"}, ctx);
                Exponential ex;
                if (cj.contains("rate"))
                    ex.rate = as_num(cj.at("rate"), "exponential.rate");
                comp.kind = ex;
            } else if (fam == "laplace") {
                check_keys(cj, {"family", "weight", "mean", "scale"}, ctx);
                Laplace l;
                if (cj.contains("mean"))
                    l.mean = as_num(cj.at("mean"), "laplace.mean");
                if (cj.contains("scale"))
                    l.scale = as_num(cj.at("scale"), "laplace.scale");
                comp.kind = l;
            } else {
                fail("spec.abscont: unknown family '" + fam + "'");
            }
            part.components.push_back(std::move(comp));
        }
        s.abscont = std::move(part);
    }
    if (o.contains("singular")) {
        const auto& sj = as_obj(o.at("singular"), "spec.singular");
        check_keys(sj, {"cantor"}, "spec.singular");
        const auto& cj = as_obj(need(sj, "cantor", "spec.singular"), "spec.singular.cantor");
        check_keys(cj, {"offset", "scale"}, "spec.singular.cantor");
        CantorLaw law;
        if (cj.contains("offset"))
            law.offset = as_num(cj.at("offset"), "cantor.offset");
        if (cj.contains("scale"))
            law.scale = as_num(cj.at("scale"), "cantor.scale");
        s.singular = SingularPart{law};
    }
    return s;
}

namespace {

struct KindToJson {
    Json* obj;
    void operator()(const Gaussian& g) const {
        obj->set("family", Json::str("gaussian"));
        obj->set("mean", Json::real(g.mean));
        obj->set("variance", Json::real(g.variance));
    }
    void operator()(const Uniform& u) const {
        obj->set("family", Json::str("uniform"));
        obj->set("a", Json::real(u.a));
        obj->set("b", Json::real(u.b));
    }
    void operator()(const Exponential& e) const {
        obj->set("family", Json::str("exponential"));
        obj->set("rate", Json::real(e.rate));
    }
    void operator()(const Laplace& l) const {
        obj->set("family", Json::str("laplace"));
        obj->set("mean", Json::real(l.mean));
        obj->set("scale", Json::real(l.scale));
    }
};

} // namespace

std::string spec_to_json(const DistributionSpec& s) {
    Json o = Json::object();
    o.set("c_d", Json::real(s.c_d));
    o.set("c_a", Json::real(s.c_a));
    o.set("c_s", Json::real(s.c_s));
    if (s.discrete) {
        Json d = Json::object();
        Json atoms = Json::array();
        for (const auto& a : s.discrete->atoms) {
            Json row = Json::array();
            row.push(Json::real(a.location));
            row.push(Json::real(a.mass));
            atoms.push(std::move(row));
        }
        d.set("atoms", std::move(atoms));
        if (s.discrete->lattice_hint) {
            Json h = Json::object();
            h.set("r", Json::real(s.discrete->lattice_hint->r));
            h.set("h", Json::real(s.discrete->lattice_hint->h));
            d.set("lattice_hint", std::move(h));
        }
        o.set("discrete", std::move(d));
    }
    if (s.abscont) {
        Json a = Json::object();
        Json comps = Json::array();
        for (const auto& c : s.abscont->components) {
            Json cj = Json::object();
            std::visit(KindToJson{&cj}, c.kind);
            cj.set("weight", Json::real(c.weight));
            comps.push(std::move(cj));
        }
        a.set("components", std::move(comps));
        o.set("abscont", std::move(a));
    }
    if (s.singular) {
        Json sj = Json::object();
        Json cj = Json::object();
        cj.set("offset", Json::real(s.singular->cantor.offset));
        cj.set("scale", Json::real(s.singular->cantor.scale));
        sj.set("cantor", std::move(cj));
        o.set("singular", std::move(sj));
    }
    return o.dump();
}

DistributionSpec load_spec_file(const std::string& path) {
    DistributionSpec raw = parse_spec_json(read_file(path));
    ValidationResult vr = validate(raw);
    if (!vr.ok) {
        std::string msg = "invalid spec " + path + ":";
        for (const auto& v : vr.violations)
            msg += "\n  - " + v;
        fail(msg);
    }
    return vr.normalized;
}

// ---------------------------------------------------------------- pairs

SpectralPair parse_pair_json(const std::string& text) {
    nj::json j = parse_text(text);
    const auto& o = as_obj(j, "pair");
    check_keys(o, {"gamma", "atoms", "segments"}, "pair");
    SpectralPair p;
    p.gamma = as_num(need(o, "gamma", "pair"), "pair.gamma");
    for (const auto& a : as_arr(need(o, "atoms", "pair"), "pair.atoms")) {
        const auto& e = as_arr(a, "pair.atoms entry");
        if (e.size() != 2)
            fail("pair.atoms: entries are [x, weight] pairs");
        p.G.atoms.push_back(
            {as_num(e[0], "pair atom location"), as_num(e[1], "pair atom weight")});
    }
    if (o.contains("segments")) {
        for (const auto& sgj : as_arr(o.at("segments"), "pair.segments")) {
            const auto& e = as_arr(sgj, "pair.segments entry");
            if (e.size() != 3)
                fail("pair.segments: entries are [a, b, level] triples");
            p.G.segments.push_back({as_num(e[0], "segment a"), as_num(e[1], "segment b"),
                                    as_num(e[2], "segment level")});
        }
    }
    return p;
}

std::string pair_to_json(const SpectralPair& p) {
    Json o = Json::object();
    o.set("gamma", Json::real(p.gamma));
    Json atoms = Json::array();
    for (const auto& a : p.G.atoms) {
        Json row = Json::array();
        row.push(Json::real(a.location));
        row.push(Json::real(a.weight));
        atoms.push(std::move(row));
    }
    o.set("atoms", std::move(atoms));
    Json segs = Json::array();
    for (const auto& sg : p.G.segments) {
        Json row = Json::array();
        row.push(Json::real(sg.a));
        row.push(Json::real(sg.b));
        row.push(Json::real(sg.level));
        segs.push(std::move(row));
    }
    o.set("segments", std::move(segs));
    return o.dump();
}

SpectralPair load_pair_file(const std::string& path) {
    SpectralPair p = parse_pair_json(read_file(path));
    auto viol = measure_violations(p.G);
    if (!viol.empty()) {
        std::string msg = "invalid pair " + path + ":";
        for (const auto& v : viol)
            msg += "\n  - " + v;
        fail(msg);
    }
    return p;
}

// ---------------------------------------------------------------- enums

namespace {

const char* target_str(InfTarget t) { return t == InfTarget::Discrete ? "d" : "full"; }

InfTarget target_from(const std::string& s, const char* ctx) {
    if (s == "d")
        return InfTarget::Discrete;
    if (s == "full")
        return InfTarget::Full;
    fail(std::string(ctx) + ": unknown target '" + s + "'");
}

const char* mode_str(InfMode m) { return m == InfMode::ExactPeriod ? "exact_period" : "window"; }

InfMode mode_from(const std::string& s, const char* ctx) {
    if (s == "exact_period")
        return InfMode::ExactPeriod;
    if (s == "window")
        return InfMode::Window;
    fail(std::string(ctx) + ": unknown mode '" + s + "'");
}

const char* tier_str(TierStatus s) { return s == TierStatus::Valid ? "valid" : "inconclusive"; }

TierStatus tier_from(const std::string& s, const char* ctx) {
    if (s == "valid")
        return TierStatus::Valid;
    if (s == "inconclusive")
        return TierStatus::Inconclusive;
    fail(std::string(ctx) + ": unknown tier status '" + s + "'");
}

Tri tri_from(const std::string& s, const char* ctx) {
    if (s == "yes")
        return Tri::Yes;
    if (s == "no")
        return Tri::No;
    if (s == "inconclusive")
        return Tri::Inconclusive;
    fail(std::string(ctx) + ": unknown value '" + s + "'");
}

const char* cond1_str(Cond1 c) {
    return c == Cond1::HoldsOnWindow ? "holds_on_window" : "violated_at";
}

Cond1 cond1_from(const std::string& s, const char* ctx) {
    if (s == "holds_on_window")
        return Cond1::HoldsOnWindow;
    if (s == "violated_at")
        return Cond1::ViolatedAt;
    fail(std::string(ctx) + ": unknown cond1 value '" + s + "'");
}

Verdict verdict_from(const std::string& s, const char* ctx) {
    if (s == "member_by_criterion")
        return Verdict::MemberByCriterion;
    if (s == "necessary_conditions_fail")
        return Verdict::NecessaryConditionsFail;
    if (s == "necessary_hold_sufficiency_unknown")
        return Verdict::NecessaryHoldSufficiencyUnknown;
    fail(std::string(ctx) + ": unknown verdict '" + s + "'");
}

// ----------------------------------------------------------- certificates

Json cert_to_json(const InfCertificate& c) {
    Json o = Json::object();
    o.set("target", Json::str(target_str(c.target)));
    o.set("mode", Json::str(mode_str(c.mode)));
    o.set("window_T", Json::real(c.window_T));
    o.set("period", Json::real(c.period));
    o.set("domain_lo", Json::real(c.domain_lo));
    o.set("domain_hi", Json::real(c.domain_hi));
    o.set("lower_bound", Json::real(c.lower_bound));
    o.set("upper_bound", Json::real(c.upper_bound));
    o.set("argmin_t", Json::real(c.argmin_t));
    o.set("lipschitz_L", Json::real(c.lipschitz_L));
    o.set("tol", Json::real(c.tol));
    o.set("gap", Json::real(c.gap));
    o.set("nodes", Json::integer(static_cast<long long>(c.nodes)));
    o.set("converged", Json::boolean(c.converged));
    o.set("zero_hit", Json::boolean(c.zero_hit));
    return o;
}

InfCertificate cert_from(const nj::json& v, const char* ctx) {
    const auto& o = as_obj(v, ctx);
    check_keys(o,
               {"target", "mode", "window_T", "period", "domain_lo", "domain_hi", "lower_bound",
                "upper_bound", "argmin_t", "lipschitz_L", "tol", "gap", "nodes", "converged",
                "zero_hit"},
               ctx);
    InfCertificate c;
    c.target = target_from(as_str(need(o, "target", ctx), ctx), ctx);
    c.mode = mode_from(as_str(need(o, "mode", ctx), ctx), ctx);
    c.window_T = as_num(need(o, "window_T", ctx), ctx);
    c.period = as_num(need(o, "period", ctx), ctx);
    c.domain_lo = as_num(need(o, "domain_lo", ctx), ctx);
    c.domain_hi = as_num(need(o, "domain_hi", ctx), ctx);
    c.lower_bound = as_num(need(o, "lower_bound", ctx), ctx);
    c.upper_bound = as_num(need(o, "upper_bound", ctx), ctx);
    c.argmin_t = as_num(need(o, "argmin_t", ctx), ctx);
    c.lipschitz_L = as_num(need(o, "lipschitz_L", ctx), ctx);
    c.tol = as_num(need(o, "tol", ctx), ctx);
    c.gap = as_num(need(o, "gap", ctx), ctx);
    c.nodes = static_cast<std::uint64_t>(as_int(need(o, "nodes", ctx), ctx));
    c.converged = as_bool(need(o, "converged", ctx), ctx);
    c.zero_hit = as_bool(need(o, "zero_hit", ctx), ctx);
    return c;
}

Json certs_to_json(const std::vector<InfCertificate>& certs) {
    Json a = Json::array();
    for (const auto& c : certs)
        a.push(cert_to_json(c));
    return a;
}

std::vector<InfCertificate> certs_from(const nj::json& v, const char* ctx) {
    std::vector<InfCertificate> out;
    for (const auto& e : as_arr(v, ctx))
        out.push_back(cert_from(e, ctx));
    return out;
}

Json tier_to_json(const AsymptoticTier& a) {
    Json o = Json::object();
    o.set("status", Json::str(tier_str(a.status)));
    o.set("beyond_T", Json::real(a.beyond_T));
    o.set("lower", Json::real(a.lower));
    o.set("note", Json::str(a.note));
    return o;
}

AsymptoticTier tier_from_json(const nj::json& v, const char* ctx) {
    const auto& o = as_obj(v, ctx);
    check_keys(o, {"status", "beyond_T", "lower", "note"}, ctx);
    AsymptoticTier a;
    a.status = tier_from(as_str(need(o, "status", ctx), ctx), ctx);
    a.beyond_T = as_num(need(o, "beyond_T", ctx), ctx);
    a.lower = as_num(need(o, "lower", ctx), ctx);
    a.note = as_str(need(o, "note", ctx), ctx);
    return a;
}

Json mu_d_to_json(const MuDEstimate& m) {
    Json o = Json::object();
    o.set("lattice", Json::boolean(m.lattice));
    o.set("period", Json::real(m.period));
    o.set("certificates", certs_to_json(m.ladder));
    return o;
}

MuDEstimate mu_d_from_json(const nj::json& v, const char* ctx) {
    const auto& o = as_obj(v, ctx);
    check_keys(o, {"lattice", "period", "certificates"}, ctx);
    MuDEstimate m;
    m.lattice = as_bool(need(o, "lattice", ctx), ctx);
    m.period = as_num(need(o, "period", ctx), ctx);
    m.ladder = certs_from(need(o, "certificates", ctx), ctx);
    return m;
}

Json mu_to_json(const MuEstimate& m) {
    Json o = Json::object();
    o.set("certificates", certs_to_json(m.ladder));
    o.set("asymptotic", tier_to_json(m.asymptotic));
    o.set("global_lower", Json::real(m.global_lower));
    o.set("global_valid", Json::boolean(m.global_valid));
    return o;
}

MuEstimate mu_from_json(const nj::json& v, const char* ctx) {
    const auto& o = as_obj(v, ctx);
    check_keys(o, {"certificates", "asymptotic", "global_lower", "global_valid"}, ctx);
    MuEstimate m;
    m.ladder = certs_from(need(o, "certificates", ctx), ctx);
    m.asymptotic = tier_from_json(need(o, "asymptotic", ctx), ctx);
    m.global_lower = as_num(need(o, "global_lower", ctx), ctx);
    m.global_valid = as_bool(need(o, "global_valid", ctx), ctx);
    return m;
}

} // namespace

// ---------------------------------------------------------------- reports

std::string inf_report_to_json(const InfReport& r) {
    Json o = Json::object();
    o.set("target", Json::str(r.target));
    if (r.target == "d") {
        o.set("lattice", Json::boolean(r.lattice));
        o.set("period", Json::real(r.period));
    }
    o.set("certificates", certs_to_json(r.certificates));
    if (r.target == "full") {
        o.set("asymptotic", tier_to_json(r.asymptotic));
        o.set("global_lower", Json::real(r.global_lower));
        o.set("global_valid", Json::boolean(r.global_valid));
    }
    o.set("summary", Json::str(r.summary));
    return o.dump();
}

InfReport parse_inf_report_json(const std::string& text) {
    nj::json j = parse_text(text);
    const auto& o = as_obj(j, "inf report");
    InfReport r;
    r.target = as_str(need(o, "target", "inf report"), "inf report.target");
    if (r.target == "d") {
        check_keys(o, {"target", "lattice", "period", "certificates", "summary"}, "inf report");
        r.lattice = as_bool(need(o, "lattice", "inf report"), "inf report.lattice");
        r.period = as_num(need(o, "period", "inf report"), "inf report.period");
    } else if (r.target == "full") {
        check_keys(o,
                   {"target", "certificates", "asymptotic", "global_lower", "global_valid",
                    "summary"},
                   "inf report");
        r.asymptotic = tier_from_json(need(o, "asymptotic", "inf report"), "inf report.asymptotic");
        r.global_lower = as_num(need(o, "global_lower", "inf report"), "inf report.global_lower");
        r.global_valid = as_bool(need(o, "global_valid", "inf report"), "inf report.global_valid");
    } else {
        fail("inf report: unknown target '" + r.target + "'");
    }
    r.certificates = certs_from(need(o, "certificates", "inf report"), "inf report.certificates");
    r.summary = as_str(need(o, "summary", "inf report"), "inf report.summary");
    return r;
}

std::string check_report_to_json(const CheckReport& r) {
    const ConditionReport& c = r.report;
    Json o = Json::object();
    o.set("cond1", Json::str(cond1_str(c.cond1)));
    o.set("cond1_window_T", Json::real(c.cond1_window_T));
    o.set("cond1_violation_t", Json::real(c.cond1_violation_t));
    o.set("cond2_mu_d_positive", Json::str(to_string(c.cond2_mu_d_positive)));
    o.set("cond3_mu_positive", Json::str(to_string(c.cond3_mu_positive)));
    o.set("dominated_singular", Json::str(to_string(c.dominated_singular)));
    o.set("mass_over_half", Json::boolean(c.mass_over_half));
    o.set("verdict", Json::str(to_string(c.verdict)));
    o.set("context", Json::str(c.context));
    o.set("mu_d", c.mu_d ? mu_d_to_json(*c.mu_d) : Json::null());
    o.set("mu", mu_to_json(c.mu));
    o.set("beyond_window_lower", Json::real(c.beyond_window_lower));
    o.set("beyond_window_valid", Json::boolean(c.beyond_window_valid));
    o.set("summary", Json::str(r.summary));
    return o.dump();
}

CheckReport parse_check_report_json(const std::string& text) {
    nj::json j = parse_text(text);
    const char* ctx = "check report";
    const auto& o = as_obj(j, ctx);
    check_keys(o,
               {"cond1", "cond1_window_T", "cond1_violation_t", "cond2_mu_d_positive",
                "cond3_mu_positive", "dominated_singular", "mass_over_half", "verdict", "context",
                "mu_d", "mu", "beyond_window_lower", "beyond_window_valid", "summary"},
               ctx);
    CheckReport r;
    ConditionReport& c = r.report;
    c.cond1 = cond1_from(as_str(need(o, "cond1", ctx), ctx), ctx);
    c.cond1_window_T = as_num(need(o, "cond1_window_T", ctx), ctx);
    c.cond1_violation_t = as_num(need(o, "cond1_violation_t", ctx), ctx);
    c.cond2_mu_d_positive = tri_from(as_str(need(o, "cond2_mu_d_positive", ctx), ctx), ctx);
    c.cond3_mu_positive = tri_from(as_str(need(o, "cond3_mu_positive", ctx), ctx), ctx);
    c.dominated_singular = tri_from(as_str(need(o, "dominated_singular", ctx), ctx), ctx);
    c.mass_over_half = as_bool(need(o, "mass_over_half", ctx), ctx);
    c.verdict = verdict_from(as_str(need(o, "verdict", ctx), ctx), ctx);
    c.context = as_str(need(o, "context", ctx), ctx);
    const auto& mud = need(o, "mu_d", ctx);
    if (!mud.is_null())
        c.mu_d = mu_d_from_json(mud, "check report.mu_d");
    c.mu = mu_from_json(need(o, "mu", ctx), "check report.mu");
    c.beyond_window_lower = as_num(need(o, "beyond_window_lower", ctx), ctx);
    c.beyond_window_valid = as_bool(need(o, "beyond_window_valid", ctx), ctx);
    r.summary = as_str(need(o, "summary", ctx), ctx);
    return r;
}

namespace {

Json bc_to_json(const BoundConstants& b) {
    Json o = Json::object();
    o.set("variant", Json::str(b.variant));
    o.set("B", Json::real(b.B));
    o.set("C", Json::real(b.C));
    return o;
}

BoundConstants bc_from_json(const nj::json& v, const char* ctx) {
    const auto& o = as_obj(v, ctx);
    check_keys(o, {"variant", "B", "C"}, ctx);
    BoundConstants b;
    b.variant = as_str(need(o, "variant", ctx), ctx);
    b.B = as_num(need(o, "B", ctx), ctx);
    b.C = as_num(need(o, "C", ctx), ctx);
    return b;
}

const char* const kQuotientColumns[] = {
    "t",
    "h",
    "ratio",
    "quotient_re",
    "quotient_im",
    "identity_residual_paper",
    "identity_residual_corrected",
    "bound_margin_paper",
    "bound_margin_corrected",
};

} // namespace

std::string quotient_report_to_json(const QuotientGridReport& r) {
    Json o = Json::object();
    o.set("check", Json::str("quotient_grid"));
    o.set("t_grid", num_vec_json(r.t_grid));
    o.set("h_grid", num_vec_json(r.h_grid));
    o.set("constants_paper", bc_to_json(r.constants_paper));
    o.set("constants_corrected", bc_to_json(r.constants_corrected));
    Json cols = Json::array();
    for (const char* c : kQuotientColumns)
        cols.push(Json::str(c));
    o.set("columns", std::move(cols));
    Json rows = Json::array();
    for (const auto& q : r.rows) {
        Json row = Json::array();
        row.push(Json::real(q.t));
        row.push(Json::real(q.h));
        row.push(Json::real(q.ratio));
        row.push(Json::real(q.quotient.real()));
        row.push(Json::real(q.quotient.imag()));
        row.push(Json::real(q.identity_residual_paper));
        row.push(Json::real(q.identity_residual_corrected));
        row.push(Json::real(q.bound_margin_paper));
        row.push(Json::real(q.bound_margin_corrected));
        rows.push(std::move(row));
    }
    o.set("rows", std::move(rows));
    o.set("max_residual_paper", Json::real(r.max_residual_paper));
    o.set("max_residual_corrected", Json::real(r.max_residual_corrected));
    o.set("matched_kappa", Json::integer(r.matched_kappa));
    o.set("violations_paper", Json::integer(r.violations_paper));
    o.set("violations_corrected", Json::integer(r.violations_corrected));
    o.set("min_margin_paper", Json::real(r.min_margin_paper));
    o.set("min_margin_corrected", Json::real(r.min_margin_corrected));
    o.set("summary", Json::str(r.summary));
    return o.dump();
}

QuotientGridReport parse_quotient_report_json(const std::string& text) {
    nj::json j = parse_text(text);
    const char* ctx = "quotient report";
    const auto& o = as_obj(j, ctx);
    check_keys(o,
               {"check", "t_grid", "h_grid", "constants_paper", "constants_corrected", "columns",
                "rows", "max_residual_paper", "max_residual_corrected", "matched_kappa",
                "violations_paper", "violations_corrected", "min_margin_paper",
                "min_margin_corrected", "summary"},
               ctx);
    if (as_str(need(o, "check", ctx), ctx) != "quotient_grid")
        fail("quotient report: wrong check tag");
    QuotientGridReport r;
    r.t_grid = num_vec(need(o, "t_grid", ctx), ctx);
    r.h_grid = num_vec(need(o, "h_grid", ctx), ctx);
    r.constants_paper = bc_from_json(need(o, "constants_paper", ctx), ctx);
    r.constants_corrected = bc_from_json(need(o, "constants_corrected", ctx), ctx);
    for (const auto& rowj : as_arr(need(o, "rows", ctx), ctx)) {
        std::vector<double> v = num_vec(rowj, "quotient report row");
        if (v.size() != 9)
            fail("quotient report: rows carry 9 columns");
        QuotientCheck q;
        q.t = v[0];
        q.h = v[1];
        q.ratio = v[2];
        q.quotient = {v[3], v[4]};
        q.identity_residual_paper = v[5];
        q.identity_residual_corrected = v[6];
        q.bound_margin_paper = v[7];
        q.bound_margin_corrected = v[8];
        r.rows.push_back(q);
    }
    r.max_residual_paper = as_num(need(o, "max_residual_paper", ctx), ctx);
    r.max_residual_corrected = as_num(need(o, "max_residual_corrected", ctx), ctx);
    r.matched_kappa = static_cast<int>(as_int(need(o, "matched_kappa", ctx), ctx));
    r.violations_paper = as_int(need(o, "violations_paper", ctx), ctx);
    r.violations_corrected = as_int(need(o, "violations_corrected", ctx), ctx);
    r.min_margin_paper = as_num(need(o, "min_margin_paper", ctx), ctx);
    r.min_margin_corrected = as_num(need(o, "min_margin_corrected", ctx), ctx);
    r.summary = as_str(need(o, "summary", ctx), ctx);
    return r;
}

std::string quotient_report_to_csv(const QuotientGridReport& r) {
    std::string out = "t,h,ratio,identity_residual_paper,identity_residual_corrected,"
                      "bound_margin_paper,bound_margin_corrected\n";
    for (const auto& q : r.rows) {
        out += fmt_double(q.t);
        out += ',';
        out += fmt_double(q.h);
        out += ',';
        out += fmt_double(q.ratio);
        out += ',';
        out += fmt_double(q.identity_residual_paper);
        out += ',';
        out += fmt_double(q.identity_residual_corrected);
        out += ',';
        out += fmt_double(q.bound_margin_paper);
        out += ',';
        out += fmt_double(q.bound_margin_corrected);
        out += '\n';
    }
    return out;
}

std::string decay_report_to_json(const DecayReport& r) {
    Json o = Json::object();
    o.set("check", Json::str("mean_decay"));
    o.set("t_grid", num_vec_json(r.report.t_grid));
    Json rows = Json::array();
    for (const auto& row : r.report.rows) {
        Json rj = Json::object();
        rj.set("T", Json::real(row.T));
        rj.set("max_mean", Json::real(row.max_mean));
        rj.set("argmax_t", Json::real(row.argmax_t));
        rj.set("max_quad_error", Json::real(row.max_quad_error));
        rows.push(std::move(rj));
    }
    o.set("rows", std::move(rows));
    o.set("summary", Json::str(r.summary));
    return o.dump();
}

DecayReport parse_decay_report_json(const std::string& text) {
    nj::json j = parse_text(text);
    const char* ctx = "decay report";
    const auto& o = as_obj(j, ctx);
    check_keys(o, {"check", "t_grid", "rows", "summary"}, ctx);
    if (as_str(need(o, "check", ctx), ctx) != "mean_decay")
        fail("decay report: wrong check tag");
    DecayReport r;
    r.report.t_grid = num_vec(need(o, "t_grid", ctx), ctx);
    for (const auto& rowj : as_arr(need(o, "rows", ctx), ctx)) {
        const auto& ro = as_obj(rowj, "decay report row");
        check_keys(ro, {"T", "max_mean", "argmax_t", "max_quad_error"}, "decay report row");
        MeanDecayRow row;
        row.T = as_num(need(ro, "T", ctx), ctx);
        row.max_mean = as_num(need(ro, "max_mean", ctx), ctx);
        row.argmax_t = as_num(need(ro, "argmax_t", ctx), ctx);
        row.max_quad_error = as_num(need(ro, "max_quad_error", ctx), ctx);
        r.report.rows.push_back(row);
    }
    r.summary = as_str(need(o, "summary", ctx), ctx);
    return r;
}

std::string decay_report_to_csv(const DecayReport& r) {
    std::string out = "T,max_mean,argmax_t,max_quad_error\n";
    for (const auto& row : r.report.rows) {
        out += fmt_double(row.T);
        out += ',';
        out += fmt_double(row.max_mean);
        out += ',';
        out += fmt_double(row.argmax_t);
        out += ',';
        out += fmt_double(row.max_quad_error);
        out += '\n';
    }
    return out;
}

std::string integrals_report_to_json(const IntegralsReport& r) {
    const ProofIntegrals& p = r.integrals;
    Json o = Json::object();
    o.set("check", Json::str("proof_integrals"));
    o.set("t", Json::real(p.t));
    o.set("tau", Json::real(p.tau));
    o.set("I", Json::real(p.I));
    o.set("J", Json::real(p.J));
    o.set("J_d", Json::real(p.J_d));
    o.set("J_c", Json::real(p.J_c));
    o.set("A", p.A ? Json::real(*p.A) : Json::null());
    o.set("quad_error", Json::real(p.quad_error));
    o.set("ill_conditioned", Json::boolean(p.ill_conditioned));
    o.set("identity_residual", Json::real(p.identity_residual));
    o.set("identity_ok", Json::boolean(p.identity_ok));
    o.set("chain_margin", Json::real(p.chain_margin));
    o.set("chain_ok", Json::boolean(p.chain_ok));
    o.set("summary", Json::str(r.summary));
    return o.dump();
}

IntegralsReport parse_integrals_report_json(const std::string& text) {
    nj::json j = parse_text(text);
    const char* ctx = "integrals report";
    const auto& o = as_obj(j, ctx);
    check_keys(o,
               {"check", "t", "tau", "I", "J", "J_d", "J_c", "A", "quad_error", "ill_conditioned",
                "identity_residual", "identity_ok", "chain_margin", "chain_ok", "summary"},
               ctx);
    if (as_str(need(o, "check", ctx), ctx) != "proof_integrals")
        fail("integrals report: wrong check tag");
    IntegralsReport r;
    ProofIntegrals& p = r.integrals;
    p.t = as_num(need(o, "t", ctx), ctx);
    p.tau = as_num(need(o, "tau", ctx), ctx);
    p.I = as_num(need(o, "I", ctx), ctx);
    p.J = as_num(need(o, "J", ctx), ctx);
    p.J_d = as_num(need(o, "J_d", ctx), ctx);
    p.J_c = as_num(need(o, "J_c", ctx), ctx);
    const auto& a = need(o, "A", ctx);
    if (!a.is_null())
        p.A = as_num(a, ctx);
    p.quad_error = as_num(need(o, "quad_error", ctx), ctx);
    p.ill_conditioned = as_bool(need(o, "ill_conditioned", ctx), ctx);
    p.identity_residual = as_num(need(o, "identity_residual", ctx), ctx);
    p.identity_ok = as_bool(need(o, "identity_ok", ctx), ctx);
    p.chain_margin = as_num(need(o, "chain_margin", ctx), ctx);
    p.chain_ok = as_bool(need(o, "chain_ok", ctx), ctx);
    r.summary = as_str(need(o, "summary", ctx), ctx);
    return r;
}

std::string integrals_report_to_csv(const IntegralsReport& r) {
    const ProofIntegrals& p = r.integrals;
    std::string out = "t,tau,I,J,J_d,J_c,A,quad_error,identity_residual,chain_margin\n";
    out += fmt_double(p.t);
    out += ',';
    out += fmt_double(p.tau);
    out += ',';
    out += fmt_double(p.I);
    out += ',';
    out += fmt_double(p.J);
    out += ',';
    out += fmt_double(p.J_d);
    out += ',';
    out += fmt_double(p.J_c);
    out += ',';
    if (p.A)
        out += fmt_double(*p.A);
    out += ',';
    out += fmt_double(p.quad_error);
    out += ',';
    out += fmt_double(p.identity_residual);
    out += ',';
    out += fmt_double(p.chain_margin);
    out += '\n';
    return out;
}

std::string parseval_report_to_json(const ParsevalDoc& r) {
    const ParsevalReport& p = r.report;
    Json o = Json::object();
    o.set("check", Json::str("parseval"));
    o.set("A_exact", Json::real(p.A_exact));
    o.set("diff_freqs", num_vec_json(p.diff_freqs));
    Json coeffs = Json::array();
    for (const auto& c : p.diff_coeffs) {
        Json row = Json::array();
        row.push(Json::real(c.real()));
        row.push(Json::real(c.imag()));
        coeffs.push(std::move(row));
    }
    o.set("diff_coeffs", std::move(coeffs));
    o.set("T_ladder", num_vec_json(p.T_ladder));
    o.set("A_means", num_vec_json(p.A_means));
    o.set("quad_errors", num_vec_json(p.quad_errors));
    o.set("summary", Json::str(r.summary));
    return o.dump();
}

ParsevalDoc parse_parseval_report_json(const std::string& text) {
    nj::json j = parse_text(text);
    const char* ctx = "parseval report";
    const auto& o = as_obj(j, ctx);
    check_keys(o,
               {"check", "A_exact", "diff_freqs", "diff_coeffs", "T_ladder", "A_means",
                "quad_errors", "summary"},
               ctx);
    if (as_str(need(o, "check", ctx), ctx) != "parseval")
        fail("parseval report: wrong check tag");
    ParsevalDoc r;
    r.report.A_exact = as_num(need(o, "A_exact", ctx), ctx);
    r.report.diff_freqs = num_vec(need(o, "diff_freqs", ctx), ctx);
    for (const auto& cj : as_arr(need(o, "diff_coeffs", ctx), ctx)) {
        std::vector<double> v = num_vec(cj, "parseval report coeff");
        if (v.size() != 2)
            fail("parseval report: coefficients are [re, im] pairs");
        r.report.diff_coeffs.emplace_back(v[0], v[1]);
    }
    r.report.T_ladder = num_vec(need(o, "T_ladder", ctx), ctx);
    r.report.A_means = num_vec(need(o, "A_means", ctx), ctx);
    r.report.quad_errors = num_vec(need(o, "quad_errors", ctx), ctx);
    r.summary = as_str(need(o, "summary", ctx), ctx);
    return r;
}

std::string parseval_report_to_csv(const ParsevalDoc& r) {
    const ParsevalReport& p = r.report;
    std::string out = "T,A_mean,abs_error,quad_error\n";
    for (std::size_t i = 0; i < p.T_ladder.size(); ++i) {
        out += fmt_double(p.T_ladder[i]);
        out += ',';
        out += fmt_double(p.A_means[i]);
        out += ',';
        out += fmt_double(std::fabs(p.A_means[i] - p.A_exact));
        out += ',';
        out += fmt_double(p.quad_errors[i]);
        out += '\n';
    }
    return out;
}

std::string translation_report_to_json(const TranslationReport& r) {
    const TranslationStructure& s = r.structure;
    Json o = Json::object();
    o.set("check", Json::str("translations"));
    o.set("epsilon", Json::real(s.epsilon));
    o.set("mu", Json::real(s.mu));
    o.set("window", Json::real(s.window));
    o.set("scan_step", Json::real(s.scan_step));
    o.set("sup_grid_step", Json::real(s.sup_grid_step));
    o.set("sup_span", Json::real(s.sup_span));
    o.set("taus", num_vec_json(s.taus));
    o.set("tau_bounds", num_vec_json(s.tau_bounds));
    o.set("tau_sups", num_vec_json(s.tau_sups));
    o.set("ell", Json::real(s.ell));
    o.set("delta", Json::real(s.delta));
    o.set("window_too_small", Json::boolean(s.window_too_small));
    o.set("chain_checked", Json::boolean(s.chain_checked));
    o.set("t_epsilon", Json::real(s.t_epsilon));
    o.set("t_epsilon_value", Json::real(s.t_epsilon_value));
    o.set("chain_max", Json::real(s.chain_max));
    o.set("chain_ok", Json::boolean(s.chain_ok));
    o.set("summary", Json::str(r.summary));
    return o.dump();
}

TranslationReport parse_translation_report_json(const std::string& text) {
    nj::json j = parse_text(text);
    const char* ctx = "translation report";
    const auto& o = as_obj(j, ctx);
    check_keys(o,
               {"check", "epsilon", "mu", "window", "scan_step", "sup_grid_step", "sup_span",
                "taus", "tau_bounds", "tau_sups", "ell", "delta", "window_too_small",
                "chain_checked", "t_epsilon", "t_epsilon_value", "chain_max", "chain_ok",
                "summary"},
               ctx);
    if (as_str(need(o, "check", ctx), ctx) != "translations")
        fail("translation report: wrong check tag");
    TranslationReport r;
    TranslationStructure& s = r.structure;
    s.epsilon = as_num(need(o, "epsilon", ctx), ctx);
    s.mu = as_num(need(o, "mu", ctx), ctx);
    s.window = as_num(need(o, "window", ctx), ctx);
    s.scan_step = as_num(need(o, "scan_step", ctx), ctx);
    s.sup_grid_step = as_num(need(o, "sup_grid_step", ctx), ctx);
    s.sup_span = as_num(need(o, "sup_span", ctx), ctx);
    s.taus = num_vec(need(o, "taus", ctx), ctx);
    s.tau_bounds = num_vec(need(o, "tau_bounds", ctx), ctx);
    s.tau_sups = num_vec(need(o, "tau_sups", ctx), ctx);
    s.ell = as_num(need(o, "ell", ctx), ctx);
    s.delta = as_num(need(o, "delta", ctx), ctx);
    s.window_too_small = as_bool(need(o, "window_too_small", ctx), ctx);
    s.chain_checked = as_bool(need(o, "chain_checked", ctx), ctx);
    s.t_epsilon = as_num(need(o, "t_epsilon", ctx), ctx);
    s.t_epsilon_value = as_num(need(o, "t_epsilon_value", ctx), ctx);
    s.chain_max = as_num(need(o, "chain_max", ctx), ctx);
    s.chain_ok = as_bool(need(o, "chain_ok", ctx), ctx);
    r.summary = as_str(need(o, "summary", ctx), ctx);
    return r;
}

std::string translation_report_to_csv(const TranslationReport& r) {
    const TranslationStructure& s = r.structure;
    std::string out = "tau,bound,sampled_sup\n";
    for (std::size_t i = 0; i < s.taus.size(); ++i) {
        out += fmt_double(s.taus[i]);
        out += ',';
        out += fmt_double(s.tau_bounds[i]);
        out += ',';
        out += fmt_double(s.tau_sups[i]);
        out += '\n';
    }
    return out;
}

std::string eval_csv(const std::vector<double>& ts,
                     const std::vector<std::complex<double>>& values) {
    if (ts.size() != values.size())
        throw Error("eval_csv: mismatched column lengths");
    std::string out = "t,re,im,abs\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out += fmt_double(ts[i]);
        out += ',';
        out += fmt_double(values[i].real());
        out += ',';
        out += fmt_double(values[i].imag());
        out += ',';
        out += fmt_double(std::abs(values[i]));
        out += '\n';
    }
    return out;
}

} // namespace qid
