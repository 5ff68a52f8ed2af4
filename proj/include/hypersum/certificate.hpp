#pragma once

// Portable proof objects for the three telescoping engines, plus boundary
// analysis of the telescoped antidifference G = R * t.
//
// A certificate is stored and exchanged as rendered text so that it can be
// written to a file, diffed, and checked by an independent reader.  The
// verifier re-parses every field and replays the defining identity with
// exact arithmetic; it never trusts the producer.

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hypersum/gosper.hpp"
#include "hypersum/parse.hpp"
#include "hypersum/pgosper.hpp"
#include "hypersum/zeilberger.hpp"

namespace hypersum {

// ---------------------------------------------------------------------------
// boundary analysis

// Largest k with a potentially nonzero term, read off the first rising
// factorial with a k-free argument in the numerator: Poch(arg, k) kills every
// k >= 1 - arg, so the support ends at k = -arg.
inline std::optional<Poly> termination_bound(const HyperTerm& t) {
    VarId k = t.sumvar();
    for (const auto& a : t.pochs())
        if (a.power > 0 && a.arg.degree(k) <= 0) return -a.arg;
    return std::nullopt;
}

// What happens to G = R * t at the ends of the summation range.  All claims
// are generic in the parameters: "zero" and "pole" mean identically so.
// Factors of t that are k-free, and the empty products at k = 0, are
// generically finite and nonzero, so the k = 0 behaviour of G is read off
// H = R * prefactor(t) alone.
struct BoundaryReport {
    bool lower_zero = false;  // G(0) = 0
    bool lower_pole = false;  // G has a pole at k = 0
    std::optional<Poly> upper_bound;       // support ends at this k, if detected
    std::vector<long> poles;               // unconditional poles of R at k >= 0
    std::vector<std::string> side_conditions;
    bool clean = false;       // lower_zero, no lower pole, no poles on the support

    std::string note() const {
        std::string s;
        if (lower_pole)
            s = "G has a pole at k = 0";
        else
            s = lower_zero ? "G(0) = 0" : "G(0) != 0";
        if (poles.empty()) {
            s += "; no certificate poles for k >= 0";
        } else {
            s += "; certificate poles at k = ";
            for (std::size_t i = 0; i < poles.size(); ++i) {
                if (i) s += ", ";
                s += std::to_string(poles[i]);
            }
        }
        if (upper_bound)
            s += "; support ends at k = " + upper_bound->str();
        else
            s += "; no upper support bound detected";
        if (!side_conditions.empty())
            s += "; " + std::to_string(side_conditions.size()) + " side condition(s)";
        return s;
    }
};

inline BoundaryReport boundary_report(const HyperTerm& t, const RatFun& R,
                                      std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed ^ 0xa0761d6478bd642full);
    VarId k = t.sumvar();
    BoundaryReport out;

    RatFun h = R * t.prefactor();
    Poly num0 = h.num().subst(k, Poly(0));
    Poly den0 = h.den().subst(k, Poly(0));
    out.lower_pole = den0.is_zero();
    out.lower_zero = num0.is_zero() && !out.lower_pole;
    for (const auto& f : t.facts())
        if (f.shift < 0) {
            out.side_conditions.push_back(
                "lower boundary check ignores the factorial singularity of fact(k - " +
                std::to_string(-f.shift) + ")");
            break;
        }

    out.upper_bound = termination_bound(t);

    // poles of R at nonnegative integers: candidates from a random parameter
    // specialization, kept only when the root is unconditional
    Poly den = R.den();
    if (den.degree(k) > 0) {
        std::set<VarId> params;
        for (VarId v : den.variables())
            if (v != k) params.insert(v);
        Poly dh = den;
        if (!params.empty()) {
            std::uniform_int_distribution<long> pick(101, 997);
            for (int attempt = 0;; ++attempt) {
                if (attempt > 64)
                    throw DomainViolation("boundary_report: failed to specialize parameters");
                Poly d = den;
                for (VarId v : params) d = d.subst(v, Poly(Rat(pick(rng))));
                if (d.degree(k) == den.degree(k)) {
                    dh = d;
                    break;
                }
            }
        }
        for (const Int& r : detail::integer_roots(dh, k)) {
            if (r < 0) continue;
            long m = r.convert_to<long>();
            Poly at = den.subst(k, Poly(Rat(m)));
            if (at.is_zero())
                out.poles.push_back(m);
            else
                out.side_conditions.push_back("nonzero: " + at.str());
        }
    }

    out.clean = out.lower_zero && !out.lower_pole && out.poles.empty();
    return out;
}

// ---------------------------------------------------------------------------
// certificates

enum class CertKind { gosper, zeilberger, param_gosper };

inline std::string_view kind_name(CertKind k) {
    switch (k) {
    case CertKind::gosper: return "gosper";
    case CertKind::zeilberger: return "zeilberger";
    case CertKind::param_gosper: return "param_gosper";
    }
    return "?";
}

struct TelescopeCertificate {
    CertKind kind = CertKind::gosper;
    std::string sumvar;
    std::string recvar;               // zeilberger only
    long order = -1;                  // zeilberger only
    std::vector<std::string> inputs;  // rendered terms; one, except param_gosper
    std::vector<std::string> sigma;   // zeilberger recurrence coefficients
    std::vector<std::string> coeffs;  // param_gosper dependency coefficients
    std::string R;
    std::vector<std::string> side_conditions;
    std::string boundary;             // optional boundary note to re-derive

    std::string to_text() const {
        std::ostringstream out;
        out << "certificate v1\n";
        out << "kind: " << kind_name(kind) << "\n";
        out << "sumvar: " << sumvar << "\n";
        if (kind == CertKind::zeilberger) {
            out << "recvar: " << recvar << "\n";
            out << "order: " << order << "\n";
        }
        for (std::size_t i = 0; i < inputs.size(); ++i)
            out << "input " << i << ": " << inputs[i] << "\n";
        for (std::size_t i = 0; i < sigma.size(); ++i)
            out << "sigma " << i << ": " << sigma[i] << "\n";
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            out << "coeff " << i << ": " << coeffs[i] << "\n";
        out << "R: " << R << "\n";
        for (std::size_t i = 0; i < side_conditions.size(); ++i)
            out << "side " << i << ": " << side_conditions[i] << "\n";
        if (!boundary.empty()) out << "boundary: " << boundary << "\n";
        return out.str();
    }

    static TelescopeCertificate from_text(std::string_view text);
};

namespace detail {

inline std::size_t indexed_key(std::string_view key, std::string_view word, std::size_t line_pos,
                               std::size_t expected) {
    std::string_view tail = key.substr(word.size());
    if (tail.empty() || tail.find_first_not_of("0123456789") != std::string_view::npos)
        throw ParseError("malformed certificate key", line_pos);
    std::size_t idx = 0;
    for (char c : tail) idx = idx * 10 + static_cast<std::size_t>(c - '0');
    if (idx != expected) throw ParseError("certificate entries out of order", line_pos);
    return idx;
}

} // namespace detail

inline TelescopeCertificate TelescopeCertificate::from_text(std::string_view text) {
    TelescopeCertificate cert;
    std::size_t pos = 0, line_no = 0;
    bool have_kind = false, have_r = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        std::size_t line_pos = pos;
        pos = eol + 1;
        if (line.empty()) continue;
        if (line_no++ == 0) {
            if (line != "certificate v1")
                throw ParseError("not a certificate (missing header)", line_pos);
            continue;
        }
        std::size_t colon = line.find(": ");
        if (colon == std::string_view::npos)
            throw ParseError("certificate line has no key", line_pos);
        std::string_view key = line.substr(0, colon);
        std::string value(line.substr(colon + 2));
        if (key == "kind") {
            if (value == "gosper") cert.kind = CertKind::gosper;
            else if (value == "zeilberger") cert.kind = CertKind::zeilberger;
            else if (value == "param_gosper") cert.kind = CertKind::param_gosper;
            else throw ParseError("unknown certificate kind", line_pos);
            have_kind = true;
        } else if (key == "sumvar") {
            cert.sumvar = value;
        } else if (key == "recvar") {
            cert.recvar = value;
        } else if (key == "order") {
            cert.order = std::stol(value);
        } else if (key.starts_with("input ")) {
            detail::indexed_key(key, "input ", line_pos, cert.inputs.size());
            cert.inputs.push_back(value);
        } else if (key.starts_with("sigma ")) {
            detail::indexed_key(key, "sigma ", line_pos, cert.sigma.size());
            cert.sigma.push_back(value);
        } else if (key.starts_with("coeff ")) {
            detail::indexed_key(key, "coeff ", line_pos, cert.coeffs.size());
            cert.coeffs.push_back(value);
        } else if (key == "R") {
            cert.R = value;
            have_r = true;
        } else if (key.starts_with("side ")) {
            detail::indexed_key(key, "side ", line_pos, cert.side_conditions.size());
            cert.side_conditions.push_back(value);
        } else if (key == "boundary") {
            cert.boundary = value;
        } else {
            throw ParseError("unknown certificate key", line_pos);
        }
    }
    if (line_no == 0) throw ParseError("not a certificate (missing header)", 0);
    if (!have_kind) throw ParseError("certificate has no kind", 0);
    if (cert.sumvar.empty()) throw ParseError("certificate has no sumvar", 0);
    if (cert.inputs.empty()) throw ParseError("certificate has no inputs", 0);
    if (!have_r) throw ParseError("certificate has no R", 0);
    if (cert.kind == CertKind::zeilberger) {
        if (cert.recvar.empty()) throw ParseError("zeilberger certificate has no recvar", 0);
        if (cert.inputs.size() != 1 || cert.sigma.empty() ||
            cert.order != static_cast<long>(cert.sigma.size()) - 1 || !cert.coeffs.empty())
            throw ParseError("malformed zeilberger certificate", 0);
    } else if (cert.kind == CertKind::gosper) {
        if (cert.inputs.size() != 1 || !cert.sigma.empty() || !cert.coeffs.empty())
            throw ParseError("malformed gosper certificate", 0);
    } else {
        if (cert.coeffs.size() != cert.inputs.size() || !cert.sigma.empty())
            throw ParseError("malformed param_gosper certificate", 0);
    }
    return cert;
}

// ---------------------------------------------------------------------------
// certificate construction

inline TelescopeCertificate certificate_for(const HyperTerm& t, const GosperResult& g) {
    if (!g.summable) throw DomainViolation("term is not summable; nothing to certify");
    TelescopeCertificate cert;
    cert.kind = CertKind::gosper;
    cert.sumvar = std::string(var_name(t.sumvar()));
    cert.inputs.push_back(t.str());
    cert.R = g.R.str();
    cert.side_conditions = g.side_conditions;
    cert.boundary = boundary_report(t, g.R).note();
    return cert;
}

inline TelescopeCertificate certificate_for(const HyperTerm& t, const Recurrence& rec) {
    TelescopeCertificate cert;
    cert.kind = CertKind::zeilberger;
    cert.sumvar = std::string(var_name(t.sumvar()));
    cert.recvar = std::string(var_name(rec.recvar));
    cert.order = rec.order;
    cert.inputs.push_back(t.str());
    for (const Poly& s : rec.sigma) cert.sigma.push_back(s.str());
    cert.R = rec.R.str();
    cert.side_conditions = rec.side_conditions;
    cert.boundary = boundary_report(t, rec.R).note();
    return cert;
}

inline TelescopeCertificate certificate_for(const std::vector<HyperTerm>& ts,
                                            const Dependency& dep,
                                            const std::vector<std::string>& side = {}) {
    if (ts.empty() || ts.size() != dep.coeffs.size())
        throw DomainViolation("dependency does not match the given terms");
    TelescopeCertificate cert;
    cert.kind = CertKind::param_gosper;
    cert.sumvar = std::string(var_name(ts[0].sumvar()));
    for (const HyperTerm& t : ts) cert.inputs.push_back(t.str());
    for (const Poly& c : dep.coeffs) cert.coeffs.push_back(c.str());
    cert.R = dep.R.str();
    cert.side_conditions = side;
    cert.boundary = boundary_report(ts[0], dep.R).note();
    return cert;
}

// ---------------------------------------------------------------------------
// verification

struct VerifyOutcome {
    bool ok = false;
    std::string detail;
};

// Re-parse every field and replay the telescoping identity exactly.  The
// boundary note, when present, is re-derived and must match verbatim.
inline VerifyOutcome verify_certificate(const TelescopeCertificate& cert) {
    try {
        std::vector<HyperTerm> ts;
        ts.reserve(cert.inputs.size());
        for (const std::string& src : cert.inputs) ts.push_back(parse_term(src, cert.sumvar));
        RatFun r = parse_ratfun(cert.R);
        VarId k = ts[0].sumvar();
        RatFun rho = ts[0].ratio();
        RatFun rhs = r.shift(k, Rat(1)) * rho - r;

        RatFun lhs;
        if (cert.kind == CertKind::gosper) {
            lhs = RatFun(1);
        } else if (cert.kind == CertKind::zeilberger) {
            VarId recvar = var(cert.recvar);
            if (recvar == k) return {false, "recurrence variable equals the summation variable"};
            if (cert.order != static_cast<long>(cert.sigma.size()) - 1)
                return {false, "order field does not match the coefficient count"};
            for (std::size_t j = 0; j < cert.sigma.size(); ++j) {
                Poly sj = parse_poly(cert.sigma[j]);
                if (sj.contains(k))
                    return {false, "sigma " + std::to_string(j) + " depends on the summation variable"};
                RatFun rj = j == 0
                                ? RatFun(1)
                                : cross_ratio(ts[0].shift_param(recvar, static_cast<long>(j)), ts[0]);
                lhs = lhs + RatFun(sj) * rj;
            }
            if (parse_poly(cert.sigma.back()).is_zero())
                return {false, "leading recurrence coefficient is zero"};
        } else {
            bool nontrivial = false;
            for (std::size_t i = 0; i < cert.coeffs.size(); ++i) {
                Poly ci = parse_poly(cert.coeffs[i]);
                if (ci.contains(k))
                    return {false, "coeff " + std::to_string(i) + " depends on the summation variable"};
                if (!ci.is_zero()) nontrivial = true;
                RatFun si = i == 0 ? RatFun(1) : cross_ratio(ts[i], ts[0]);
                lhs = lhs + RatFun(ci) * si;
            }
            if (!nontrivial) return {false, "all dependency coefficients are zero"};
        }
        if (!(lhs == rhs)) return {false, "telescoping identity does not hold"};

        if (!cert.boundary.empty()) {
            std::string note = boundary_report(ts[0], r).note();
            if (note != cert.boundary)
                return {false, "boundary note does not match: derived \"" + note + "\""};
        }
        std::string msg = "verified ";
        msg += kind_name(cert.kind);
        msg += " certificate over ";
        msg += std::to_string(cert.inputs.size());
        msg += cert.inputs.size() == 1 ? " term" : " terms";
        return {true, msg};
    } catch (const ParseError& e) {
        return {false, std::string("unparseable certificate field: ") + e.what()};
    } catch (const NotSimilar& e) {
        return {false, std::string("inputs are not similar: ") + e.what()};
    } catch (const DomainViolation& e) {
        return {false, std::string("domain violation: ") + e.what()};
    }
}

} // namespace hypersum
