#include "jetflat/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "jetflat/errors.hpp"

namespace jetflat::io {

namespace {

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(where + ": non-finite value");
    return v;
}

std::vector<double> number_array(const json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing \"" + key + "\"");
    return *it;
}

double optional_number(const json& j, const char* key, const std::string& where) {
    const auto it = j.find(key);
    return it == j.end() ? 0.0 : number(*it, where + "." + key);
}

// Square (D+1)x(D+1) matrix flattened row-major; D inferred from the row count.
std::vector<double> square(const json& j, const std::string& where, int& degree) {
    if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty array of rows");
    const int n = static_cast<int>(j.size());
    if (degree >= 0 && n != degree + 1) throw ParseError(where + ": size differs from the other coefficient arrays");
    degree = n - 1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r) {
        const auto row = number_array(j[static_cast<std::size_t>(r)], where + "[" + std::to_string(r) + "]");
        if (static_cast<int>(row.size()) != n) throw ParseError(where + ": rows must have " + std::to_string(n) + " entries");
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

json matrix(std::span<const double> flat, int degree) {
    const auto n = static_cast<std::size_t>(degree + 1);
    json rows = json::array();
    for (std::size_t r = 0; r < n; ++r)
        rows.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(r * n),
                                           flat.begin() + static_cast<std::ptrdiff_t>((r + 1) * n)));
    return rows;
}

std::vector<double> times_of(const json& j, const std::string& where) {
    return number_array(field(j, "times", where), where + ".times");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

FourierFunction function_from_json(const json& j) {
    const std::string where = "function";
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    std::string domain = "S1";
    if (const auto it = j.find("domain"); it != j.end()) {
        if (!it->is_string()) throw ParseError(where + ".domain: expected \"S1\" or \"T2\"");
        domain = it->get<std::string>();
    }
    if (domain != "S1" && domain != "T2") throw ParseError(where + ".domain: unknown domain \"" + domain + "\"");

    if (const auto it = j.find("coeffs"); it != j.end()) {
        if (domain != "T2") throw ParseError(where + ": \"coeffs\" requires domain T2");
        const json& c = *it;
        if (!c.is_object()) throw ParseError(where + ".coeffs: expected an object");
        int degree = -1;
        std::vector<double> m[4];
        const char* names[4] = {"cc", "cs", "sc", "ss"};
        for (int i = 0; i < 4; ++i)
            if (const auto e = c.find(names[i]); e != c.end()) m[i] = square(*e, where + ".coeffs." + names[i], degree);
        if (degree < 0) degree = 0;
        const auto n = static_cast<std::size_t>((degree + 1) * (degree + 1));
        for (auto& v : m)
            if (v.empty()) v.assign(n, 0.0);
        const double a0 = optional_number(c, "a0", where + ".coeffs") + optional_number(j, "a0", where);
        return FourierFunction::torus(a0, degree, m[0], m[1], m[2], m[3]);
    }

    const double a0 = optional_number(j, "a0", where);
    std::vector<double> cs, ss;
    if (const auto it = j.find("cos"); it != j.end()) cs = number_array(*it, where + ".cos");
    if (const auto it = j.find("sin"); it != j.end()) ss = number_array(*it, where + ".sin");
    const std::size_t d = std::max(cs.size(), ss.size());
    cs.resize(d, 0.0);
    ss.resize(d, 0.0);
    if (domain == "S1") return FourierFunction::circle(a0, cs, ss);

    const auto n = d + 1;
    std::vector<double> cc(n * n, 0.0), cs2(n * n, 0.0), sc(n * n, 0.0), ss2(n * n, 0.0);
    for (std::size_t k = 1; k <= d; ++k) {
        cc[k * n] = cs[k - 1];
        sc[k * n] = ss[k - 1];
    }
    return FourierFunction::torus(a0, static_cast<int>(d), cc, cs2, sc, ss2);
}

json to_json(const FourierFunction& f) {
    if (f.domain() == Domain::Circle) {
        return {{"domain", "S1"},
                {"a0", f.mean()},
                {"cos", std::vector<double>(f.cos_coefficients().begin(), f.cos_coefficients().end())},
                {"sin", std::vector<double>(f.sin_coefficients().begin(), f.sin_coefficients().end())}};
    }
    const int d = f.degree();
    return {{"domain", "T2"},
            {"coeffs",
             {{"a0", f.mean()},
              {"cc", matrix(f.cc(), d)},
              {"cs", matrix(f.cs(), d)},
              {"sc", matrix(f.sc(), d)},
              {"ss", matrix(f.ss(), d)}}}};
}

IsotopyPath path_from_json(const json& j) {
    const std::vector<double> times = times_of(j, "path");
    const json& ks = field(j, "knots", "path");
    if (!ks.is_array()) throw ParseError("path.knots: expected an array");
    std::vector<FourierFunction> knots;
    for (const json& k : ks) knots.push_back(function_from_json(k));
    if (knots.empty()) throw MalformedPath("path: no knots");
    // domain mismatches between knots are reported as such, not as malformed paths
    for (const auto& k : knots)
        if (k.domain() != knots.front().domain()) throw DomainMismatch("path: knots live on different domains");
    return IsotopyPath(std::move(knots), times);
}

json to_json(const IsotopyPath& p) {
    json knots = json::array();
    for (const auto& k : p.knots()) knots.push_back(to_json(k));
    return {{"times", p.times()}, {"knots", knots}};
}

CircleContactomorphism contactomorphism_from_json(const json& j) {
    FourierFunction f = function_from_json(field(j, "displacement", "contactomorphism"));
    if (f.domain() != Domain::Circle) throw DomainMismatch("contactomorphism: displacement must live on S1");
    return CircleContactomorphism(std::move(f));
}

json to_json(const CircleContactomorphism& phi) { return {{"displacement", to_json(phi.displacement())}}; }

ContactPath contact_path_from_json(const json& j) {
    ContactPath out;
    out.times = times_of(j, "contact path");
    const json& ks = field(j, "knots", "contact path");
    if (!ks.is_array()) throw ParseError("contact path.knots: expected an array");
    std::vector<FourierFunction> fs;
    for (const json& k : ks) {
        out.knots.push_back(contactomorphism_from_json(k));
        fs.push_back(out.knots.back().displacement());
    }
    (void)IsotopyPath(std::move(fs), out.times);
    return out;
}

SampledFamily family_from_json(const json& j) {
    SampledFamily out;
    out.times = times_of(j, "family");
    const json& ss = field(j, "samples", "family");
    if (!ss.is_array()) throw ParseError("family.samples: expected an array");
    for (const json& s : ss) out.samples.push_back(function_from_json(s));
    for (const auto& s : out.samples)
        if (s.domain() != out.samples.front().domain()) throw DomainMismatch("family: samples live on different domains");
    return out;
}

json to_json(Point p, Domain d) {
    if (d == Domain::Circle) return json::array({p.q1});
    return json::array({p.q1, p.q2});
}

json to_json(const SelectorReport& r) {
    return {{"ell_plus", r.ell_plus},
            {"ell_minus", r.ell_minus},
            {"d_spec", r.d_spec},
            {"spectrum_membership", {{"ell_plus", r.plus_in_spectrum}, {"ell_minus", r.minus_in_spectrum}}},
            {"spectrum", r.spectrum}};
}

json to_json(const ChordSpectrum& s, Domain d) {
    json points = json::array();
    for (const Point& p : s.source.points) points.push_back(to_json(p, d));
    return {{"lengths", s.lengths}, {"plateau", s.plateau}, {"critical_points", points}};
}

json to_json(const QAWitness& w, Domain d) {
    json path = json::array();
    for (const JetPoint& x : w.jet_path) {
        const auto n = static_cast<std::size_t>(dimension(d));
        path.push_back({{"q", std::vector<double>(x.q.begin(), x.q.begin() + n)},
                        {"p", std::vector<double>(x.p.begin(), x.p.begin() + n)},
                        {"z", x.z}});
    }
    return {{"epsilon", w.epsilon},
            {"base_point", to_json(w.base_point, d)},
            {"per_knot_residuals", w.per_knot_residuals},
            {"jet_path", path}};
}

json to_json(const CommonWitness& w, Domain d) {
    return {{"epsilon", w.epsilon}, {"point", to_json(w.point, d)}, {"residuals", w.residuals}};
}

json to_json(const Segmentation& s) {
    json intervals = json::array();
    for (const auto& [a, b] : s.intervals) intervals.push_back({a, b});
    return {{"intervals", intervals},
            {"covers_all_segments", s.covers_all_segments},
            {"is_geodesic", s.is_geodesic},
            {"window_gaps", s.window_gaps}};
}

json to_json(const GeodesicReport& r, Domain d) {
    return {{"length", r.length},
            {"d_spec", r.d_spec},
            {"gap", r.gap},
            {"sub_gaps", r.sub_gaps},
            {"max_sub_gap", r.max_sub_gap},
            {"minimizing", r.minimizing},
            {"qa_witness", r.qa_witness ? to_json(*r.qa_witness, d) : json(nullptr)},
            {"segmentation", to_json(r.segmentation)},
            {"cross_check_mismatch", r.cross_check_mismatch}};
}

json to_json(const OptimizeResult& r) {
    return {{"best_length", r.best_length},
            {"lower_bound", r.lower_bound},
            {"excess", r.best_length - r.lower_bound},
            {"restart_lengths", r.restart_lengths},
            {"best_path", to_json(r.best_path)}};
}

json to_json(const MonotoneReport& r) {
    return {{"monotone", r.monotone},
            {"order_verdict", r.order_verdict},
            {"segment_minima", r.segment_minima},
            {"equivalence_violation", r.equivalence_violation}};
}

json to_json(const MetricLength& m) {
    return {{"value", m.value}, {"depth", m.depth}, {"converged", m.converged}};
}

json to_json(const HamiltonianBounds& b) {
    return {{"integral_min", b.integral_min},
            {"ell_minus", b.ell_minus},
            {"ell_plus", b.ell_plus},
            {"integral_max", b.integral_max},
            {"violations", b.violations},
            {"holds", b.holds()}};
}

json to_json(const IntegralCriterion& c, Domain d) {
    return {{"lhs", c.lhs},
            {"rhs", c.rhs},
            {"gap", c.gap},
            {"condition1", c.condition1},
            {"condition2", c.witness.has_value()},
            {"witness", c.witness ? to_json(*c.witness, d) : json(nullptr)},
            {"equivalence_violation", c.equivalence_violation}};
}

json to_json(const AxiomReport& r) {
    json axioms = json::array();
    for (const AxiomResult& a : r.axioms)
        axioms.push_back({{"name", a.name},
                          {"checks", a.checks},
                          {"failures", a.failures},
                          {"passed", a.passed()},
                          {"counterexamples", a.counterexamples}});
    return {{"axioms", axioms}, {"all_passed", r.all_passed()}};
}

json to_json(const SpectralNorm& n) {
    return {{"c_plus", n.c_plus},
            {"c_minus", n.c_minus},
            {"norm", n.norm},
            {"spectrum_membership", {{"c_plus", n.plus_in_spectrum}, {"c_minus", n.minus_in_spectrum}}},
            {"advisory", n.advisory}};
}

json to_json(const TranslatedPoints& t, const CircleContactomorphism& phi) {
    std::vector<double> translations;
    for (double x : t.points) translations.push_back(phi.displacement()(x));
    return {{"points", t.points},
            {"translations", translations},
            {"chord_spectrum", t.spectrum.lengths},
            {"coherent", t.coherent}};
}

json to_json(const ContactQA& q) {
    return {{"witness", q.witness ? to_json(*q.witness, Domain::Circle) : json(nullptr)},
            {"translated_point_verdict", q.translated_point_verdict},
            {"cross_check_mismatch", q.cross_check_mismatch}};
}

json to_json(const ShelukhinBound& b) {
    return {{"upper", b.upper}, {"spectral_norm", b.spectral_norm}, {"gap", b.gap}, {"below_norm", b.below_norm}};
}

std::string to_csv(const std::vector<CsvRow>& rows) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const CsvRow& r : rows)
        out << r.case_id << ',' << fmt(r.report.ell_plus) << ',' << fmt(r.report.ell_minus) << ','
            << fmt(r.report.d_spec) << ',' << (r.report.plus_in_spectrum && r.report.minus_in_spectrum ? 1 : 0)
            << '\n';
    return out.str();
}

}  // namespace jetflat::io
