#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "jetflat/contact_product.hpp"
#include "jetflat/errors.hpp"
#include "jetflat/geodesics.hpp"
#include "jetflat/serialize.hpp"
#include "jetflat/spectral_metric.hpp"

namespace jetflat::cli {

using io::json;

void RunConfig::validate() const {
    if (grid_size < 64 || (grid_size & (grid_size - 1)) != 0)
        throw ParseError("--grid must be a power of two >= 64, got " + std::to_string(grid_size));
    if (!(tolerance > 0.0 && tolerance <= 1e-3)) throw ParseError("--tol must lie in (0, 1e-3]");
    if (truncation_degree < 1) throw ParseError("--degree must be >= 1");
}

ScanOptions RunConfig::scan() const {
    ScanOptions s;
    s.circle_grid = grid_size;
    s.torus_grid = std::max(16, grid_size / 16);
    return s;
}

namespace {

const char* const kFooter = R"(Inputs are JSON file paths, or inline JSON when the argument starts with '{'.
  function: {"domain":"S1","a0":0,"cos":[...],"sin":[...]}
            {"domain":"T2","coeffs":{"a0":0,"cc":[[...]],"cs":[[...]],"sc":[[...]],"ss":[[...]]}}
  path:     {"times":[0,...,1],"knots":[<function>,...]}
  contactomorphism: {"displacement":<function on S1>}
  contact path:     {"times":[...],"knots":[<contactomorphism>,...]}
  family:   {"times":[...],"samples":[<function>,...]}

--format csv (dist, props) prints one row per pair with columns
  case_id,ell_plus,ell_minus,d_spec,in_spectrum
where in_spectrum is 1 when both selectors are chord lengths.

--grid sets the circle scan; the torus scan uses max(16, grid/16) points per axis.
--degree is the truncation degree of randomly generated functions (props).
JETFLAT_THREADS caps the number of worker threads.

Exit codes: 0 all asserted properties hold, 1 a property failed,
2 invalid input, 3 domain mismatch, 4 internal error.)";

std::string load_text(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && arg[first] == '{') return arg;
    std::ifstream in(arg);
    if (!in) throw ParseError("cannot read input file '" + arg + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json load(const std::string& arg) { return io::parse_document(load_text(arg)); }

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

struct Inputs {
    std::string a, b;
    std::string mode = "check";
    std::string kind;
    std::string domain = "S1";
    int count = 20;
    int knots = 6;
    int restarts = 16;
    bool translates = false;
};

int cmd_dist(const RunConfig& cfg, const Inputs& in, std::ostream& out) {
    const JetLegendrian L1(io::function_from_json(load(in.a)));
    const JetLegendrian L0(io::function_from_json(load(in.b)));
    const ScanOptions opts = cfg.scan();
    const SelectorReport r = selectors(L1, L0, opts, cfg.tolerance);
    const double direct = spectral_distance(L1.generator(), L0.generator(), opts);
    const double flatness = std::abs(direct - r.d_spec);
    const bool ok = r.plus_in_spectrum && r.minus_in_spectrum && flatness <= 1e-12;
    if (cfg.output_format == OutputFormat::Csv) {
        out << io::to_csv({{"0", r}});
    } else {
        json j = io::to_json(r);
        j["sup_norm_difference"] = direct;
        j["flatness_residual"] = flatness;
        emit(out, j);
    }
    return ok ? kExitOk : kExitPropertyFailed;
}

int cmd_spectrum(const RunConfig& cfg, const Inputs& in, std::ostream& out) {
    const JetLegendrian L1(io::function_from_json(load(in.a)));
    const JetLegendrian L0(io::function_from_json(load(in.b)));
    ScanOptions opts = cfg.scan();
    opts.cluster_tolerance = cfg.tolerance;
    const ChordSpectrum s = chord_spectrum(L1, L0, opts);
    emit(out, io::to_json(s, L1.domain()));
    return s.lengths.empty() ? kExitPropertyFailed : kExitOk;
}

int cmd_geodesic(const RunConfig& cfg, const Inputs& in, std::ostream& out, std::ostream& err) {
    const IsotopyPath path = io::path_from_json(load(in.a));
    const ScanOptions opts = cfg.scan();
    if (in.mode == "check") {
        const GeodesicReport r = minimizing_geodesic_check(path, cfg.tolerance, opts);
        emit(out, io::to_json(r, path.domain()));
        return r.cross_check_mismatch ? kExitPropertyFailed : kExitOk;
    }
    OptimizeOptions o;
    o.scan = opts;
    const OptimizeResult r = optimize_path(path.front(), path.back(), in.knots, in.restarts, cfg.seed, o);
    for (const std::string& line : r.log) err << line << '\n';
    const double excess = r.best_length - r.lower_bound;
    emit(out, io::to_json(r));
    return excess >= -1e-9 && excess <= kOptimizerTolerance ? kExitOk : kExitPropertyFailed;
}

int cmd_props(const RunConfig& cfg, const Inputs& in, std::ostream& out) {
    if (in.count < 2) throw ParseError("--count must be >= 2");
    const Domain d = in.domain == "T2" ? Domain::Torus2 : Domain::Circle;
    std::mt19937_64 rng(cfg.seed);
    std::vector<JetLegendrian> sample;
    if (in.translates) {
        const FourierFunction f = random_fourier(d, cfg.truncation_degree, rng);
        std::uniform_real_distribution<double> shift(-1.0, 1.0);
        sample.emplace_back(f);
        for (int i = 1; i < in.count; ++i) sample.push_back(reeb_translate(sample.front(), shift(rng)));
    } else {
        for (int i = 0; i < in.count; ++i) sample.emplace_back(random_fourier(d, cfg.truncation_degree, rng));
    }
    const ScanOptions opts = cfg.scan();
    const AxiomReport r = axiom_suite(sample, cfg.tolerance, opts);
    if (cfg.output_format == OutputFormat::Csv) {
        std::vector<io::CsvRow> rows;
        for (std::size_t i = 0; i < sample.size(); ++i)
            for (std::size_t j = 0; j < sample.size(); ++j)
                if (i != j)
                    rows.push_back({std::to_string(i) + "-" + std::to_string(j),
                                    selectors(sample[i], sample[j], opts, cfg.tolerance)});
        out << io::to_csv(rows);
    } else {
        json j = io::to_json(r);
        j["sample"] = {{"count", in.count},
                       {"seed", cfg.seed},
                       {"degree", cfg.truncation_degree},
                       {"domain", in.domain},
                       {"reeb_translates", in.translates}};
        emit(out, j);
    }
    return r.all_passed() ? kExitOk : kExitPropertyFailed;
}

int cmd_monotone(const RunConfig& cfg, const Inputs& in, std::ostream& out) {
    const IsotopyPath path = io::path_from_json(load(in.a));
    const MonotoneReport r = monotone_check(path, cfg.tolerance, cfg.scan());
    emit(out, io::to_json(r));
    return r.equivalence_violation ? kExitPropertyFailed : kExitOk;
}

int cmd_length(const RunConfig& cfg, const Inputs& in, std::ostream& out) {
    const IsotopyPath path = io::path_from_json(load(in.a));
    const ScanOptions opts = cfg.scan();
    const double sch = sch_length(path, opts);
    const double d = spectral_distance(path.back(), path.front(), opts);
    const MetricLength spec_m = metric_length(path, Metric::Spec, opts);
    const MetricLength sch_m = metric_length(path, Metric::Sch, opts);
    const HamiltonianBounds b = hamiltonian_bounds_check(path, opts, cfg.tolerance);
    const bool ok = b.holds() && sch >= d - cfg.tolerance && spec_m.value <= sch_m.value + cfg.tolerance;
    emit(out, {{"sch_length", sch},
               {"d_spec", d},
               {"metric_length", {{"spec", io::to_json(spec_m)}, {"sch", io::to_json(sch_m)}}},
               {"hamiltonian_bounds", io::to_json(b)}});
    return ok ? kExitOk : kExitPropertyFailed;
}

int cmd_integral(const RunConfig& cfg, const Inputs& in, std::ostream& out) {
    const io::SampledFamily fam = io::family_from_json(load(in.a));
    const IntegralCriterion c = integral_criterion(fam.times, fam.samples, cfg.tolerance, cfg.scan());
    emit(out, io::to_json(c, fam.samples.front().domain()));
    return c.equivalence_violation ? kExitPropertyFailed : kExitOk;
}

int cmd_contact(const RunConfig& cfg, const Inputs& in, std::ostream& out) {
    const ScanOptions opts = cfg.scan();
    if (in.kind == "qa") {
        const io::ContactPath p = io::contact_path_from_json(load(in.a));
        const ContactQA q = contact_qa_check(p.knots, p.times, cfg.tolerance, opts);
        emit(out, io::to_json(q));
        return q.cross_check_mismatch ? kExitPropertyFailed : kExitOk;
    }
    const CircleContactomorphism phi = io::contactomorphism_from_json(load(in.a));
    if (in.kind == "norm") {
        const SpectralNorm n = spectral_norm(phi, opts);
        emit(out, io::to_json(n));
        return n.advisory || (n.plus_in_spectrum && n.minus_in_spectrum) ? kExitOk : kExitPropertyFailed;
    }
    if (in.kind == "translated") {
        const TranslatedPoints t = translated_points(phi, opts, cfg.tolerance);
        emit(out, io::to_json(t, phi));
        return t.coherent ? kExitOk : kExitPropertyFailed;
    }
    OptimizeOptions o;
    o.scan = opts;
    const ShelukhinBound b = shelukhin_norm_upper(phi, in.knots, in.restarts, cfg.seed, o);
    emit(out, io::to_json(b));
    return !b.below_norm && b.gap <= kOptimizerTolerance ? kExitOk : kExitPropertyFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    Inputs in;
    std::string format = "json";

    CLI::App app{"Spectral distances, lengths and geodesics of Legendrian 1-jet graphs over S1 and T2", "jetflat"};
    app.footer(kFooter);
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--grid", cfg.grid_size, "scan grid size (power of two >= 64)")->capture_default_str();
    app.add_option("--tol", cfg.tolerance, "tolerance for witnesses, axioms and spectrum membership")
        ->capture_default_str();
    app.add_option("--degree", cfg.truncation_degree, "truncation degree of random functions")->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed of every randomized computation")->capture_default_str();
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--knots", in.knots, "knots of optimized paths")->check(CLI::Range(2, 64))->capture_default_str();
    app.add_option("--restarts", in.restarts, "optimizer restarts")->check(CLI::Range(1, 1024))->capture_default_str();

    auto* dist = app.add_subcommand("dist", "selectors l+, l- and d_spec from g to f");
    dist->add_option("f", in.a, "function")->required();
    dist->add_option("g", in.b, "function")->required();

    auto* spectrum = app.add_subcommand("spectrum", "Reeb chord lengths from j1 g to j1 f");
    spectrum->add_option("f", in.a, "function")->required();
    spectrum->add_option("g", in.b, "function")->required();

    auto* geodesic = app.add_subcommand("geodesic", "minimizing geodesic check, or optimize between the path's ends");
    geodesic->add_option("path", in.a, "path")->required();
    geodesic->add_option("--mode", in.mode, "check or optimize")
        ->check(CLI::IsMember({"check", "optimize"}))
        ->capture_default_str();

    auto* props = app.add_subcommand("props", "selector axiom suite on random Legendrians");
    props->add_option("--count", in.count, "sample size (>= 2)")->capture_default_str();
    props->add_option("--domain", in.domain, "S1 or T2")->check(CLI::IsMember({"S1", "T2"}))->capture_default_str();
    props->add_flag("--translates", in.translates, "one random Legendrian and its Reeb translates");

    auto* monotone = app.add_subcommand("monotone", "monotone isotopy vs non-negative Hamiltonian");
    monotone->add_option("path", in.a, "path")->required();

    auto* length = app.add_subcommand("length", "SCH length, metric lengths and Hamiltonian bounds of a path");
    length->add_option("path", in.a, "path")->required();

    auto* integral = app.add_subcommand("integral-criterion", "integral criterion on a time-sampled family");
    integral->add_option("family", in.a, "family")->required();

    auto* contact = app.add_subcommand("contact", "circle contactomorphisms: norm, translated, qa, upper");
    contact->add_option("kind", in.kind, "norm | translated | qa | upper")
        ->required()
        ->check(CLI::IsMember({"norm", "translated", "qa", "upper"}));
    contact->add_option("input", in.a, "contactomorphism (contact path for qa)")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        cfg.output_format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
        cfg.validate();
        if (cfg.output_format == OutputFormat::Csv && !dist->parsed() && !props->parsed())
            throw ParseError("--format csv is only available for dist and props");
        if (dist->parsed()) return cmd_dist(cfg, in, out);
        if (spectrum->parsed()) return cmd_spectrum(cfg, in, out);
        if (geodesic->parsed()) return cmd_geodesic(cfg, in, out, err);
        if (props->parsed()) return cmd_props(cfg, in, out);
        if (monotone->parsed()) return cmd_monotone(cfg, in, out);
        if (length->parsed()) return cmd_length(cfg, in, out);
        if (integral->parsed()) return cmd_integral(cfg, in, out);
        return cmd_contact(cfg, in, out);
    } catch (const DomainMismatch& e) {
        err << "jetflat: domain mismatch: " << e.what() << '\n';
        return kExitDomain;
    } catch (const ParseError& e) {
        err << "jetflat: " << e.what() << '\n';
        return kExitParse;
    } catch (const MalformedPath& e) {
        err << "jetflat: malformed path: " << e.what() << '\n';
        return kExitParse;
    } catch (const NotADiffeomorphism& e) {
        err << "jetflat: not a diffeomorphism: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        err << "jetflat: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace jetflat::cli
