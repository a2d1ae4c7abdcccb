#include "jetflat/spectral_metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "jetflat/errors.hpp"
#include "jetflat/parallel.hpp"

namespace jetflat {

namespace {

constexpr std::size_t kMaxCounterexamples = 10;

std::string fmt(const char* pattern, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

void record(AxiomResult& r, bool ok, const std::string& detail) {
    ++r.checks;
    if (ok) return;
    ++r.failures;
    if (r.counterexamples.size() < kMaxCounterexamples) r.counterexamples.push_back(detail);
}

std::string pair_tag(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

/// 1 + cos(2 pi q1): non-negative, used to push a Legendrian down in the order.
FourierFunction bump(Domain d) {
    if (d == Domain::Circle) return FourierFunction::circle(1.0, {1.0}, {0.0});
    std::vector<double> cc(4, 0.0), zero(4, 0.0);
    cc[2] = 1.0;
    return FourierFunction::torus(1.0, 1, cc, zero, zero, zero);
}

FourierFunction fiber_shift(Domain d) {
    if (d == Domain::Circle) return FourierFunction::circle(0.1, {0.0, -0.2}, {0.4, 0.0});
    std::vector<double> cc(4, 0.0), cs(4, 0.0), sc(4, 0.0), ss(4, 0.0);
    sc[2] = 0.4;
    cs[1] = -0.2;
    ss[3] = 0.15;
    return FourierFunction::torus(0.1, 1, cc, cs, sc, ss);
}

struct PairSelectors {
    double plus = 0.0, minus = 0.0;
};

PairSelectors raw_selectors(const FourierFunction& diff, const ScanOptions& opts) {
    return {extremum(diff, ExtremumMode::Max, opts).value, extremum(diff, ExtremumMode::Min, opts).value};
}

}  // namespace

SelectorReport selectors(const JetLegendrian& L1, const JetLegendrian& L0, const ScanOptions& opts,
                         double membership_tol) {
    if (L1.domain() != L0.domain()) throw DomainMismatch("selectors between Legendrians of different bases");
    const FourierFunction diff = L1.generator() - L0.generator();
    SelectorReport r;
    const PairSelectors s = raw_selectors(diff, opts);
    r.ell_plus = s.plus;
    r.ell_minus = s.minus;
    r.d_spec = std::max(r.ell_plus, -r.ell_minus);
    const ChordSpectrum spec = chord_spectrum(L1, L0, opts);
    r.spectrum = spec.lengths;
    r.plus_in_spectrum = in_spectrum(spec, r.ell_plus, membership_tol);
    r.minus_in_spectrum = in_spectrum(spec, r.ell_minus, membership_tol);
    return r;
}

double spectral_distance(const FourierFunction& f1, const FourierFunction& f0, const ScanOptions& opts) {
    if (f1.domain() != f0.domain()) throw DomainMismatch("distance between functions on different domains");
    return sup_norm(f1 - f0, opts).value;
}

double sch_length(const IsotopyPath& path, const ScanOptions& opts) {
    double total = 0.0;
    for (std::size_t k = 0; k < path.segment_count(); ++k) total += sup_norm(path.segment(k), opts).value;
    return total;
}

double sch_distance(const FourierFunction& f1, const FourierFunction& f0, const ScanOptions& opts) {
    if (f1.domain() != f0.domain()) throw DomainMismatch("distance between functions on different domains");
    return sch_length(IsotopyPath::straight(f0, f1), opts);
}

MetricLength metric_length(const IsotopyPath& path, Metric metric, const ScanOptions& opts) {
    auto distance = [&](const FourierFunction& a, const FourierFunction& b) {
        return metric == Metric::Spec ? spectral_distance(b, a, opts) : sch_distance(b, a, opts);
    };
    MetricLength out;
    double previous = 0.0;
    for (int depth = 0; depth <= kMetricMaxDepth; ++depth) {
        std::set<double> grid(path.times().begin(), path.times().end());
        const double n = std::ldexp(1.0, depth);
        for (int j = 0; j <= (1 << depth); ++j) grid.insert(j / n);
        std::vector<double> t(grid.begin(), grid.end());
        double sum = 0.0;
        FourierFunction prev = path.at(t.front());
        for (std::size_t i = 1; i < t.size(); ++i) {
            FourierFunction cur = path.at(t[i]);
            sum += distance(prev, cur);
            prev = std::move(cur);
        }
        out.value = sum;
        out.depth = depth;
        if (depth > 0 && std::abs(sum - previous) < kMetricTolerance) {
            out.converged = true;
            break;
        }
        previous = sum;
    }
    return out;
}

HamiltonianBounds hamiltonian_bounds_check(const IsotopyPath& path, const ScanOptions& opts, double tol) {
    HamiltonianBounds b;
    for (std::size_t k = 0; k < path.segment_count(); ++k) {
        const PairSelectors s = raw_selectors(path.segment(k), opts);
        b.integral_min += s.minus;
        b.integral_max += s.plus;
    }
    const PairSelectors ends = raw_selectors(path.back() - path.front(), opts);
    b.ell_minus = ends.minus;
    b.ell_plus = ends.plus;
    if (b.integral_min > b.ell_minus + tol) b.violations.push_back(fmt("int min H %.17g > l- %.17g", b.integral_min, b.ell_minus));
    if (b.ell_minus > b.ell_plus + tol) b.violations.push_back(fmt("l- %.17g > l+ %.17g", b.ell_minus, b.ell_plus));
    if (b.ell_plus > b.integral_max + tol) b.violations.push_back(fmt("l+ %.17g > int max H %.17g", b.ell_plus, b.integral_max));
    return b;
}

bool AxiomReport::all_passed() const noexcept {
    return std::all_of(axioms.begin(), axioms.end(), [](const AxiomResult& a) { return a.passed(); });
}

const AxiomResult* AxiomReport::find(const std::string& name) const {
    for (const auto& a : axioms)
        if (a.name == name) return &a;
    return nullptr;
}

AxiomReport axiom_suite(const std::vector<JetLegendrian>& sample, double tol, const ScanOptions& opts) {
    const std::size_t n = sample.size();
    for (const auto& L : sample)
        if (L.domain() != sample.front().domain()) throw DomainMismatch("axiom sample mixes domains");
    const Domain dom = n ? sample.front().domain() : Domain::Circle;

    // Everything expensive is computed per ordered pair, in parallel, into slot i*n+j.
    struct PairData {
        PairSelectors s;
        double sup = 0.0;
        double nonconstant_coefficient = 0.0;
        bool plus_spectral = false, minus_spectral = false;
        PairSelectors shifted[2];
        PairSelectors fiber, translated;
        PairSelectors lowered;
        bool leq = false;
    };
    const double shifts[2] = {0.75, -1.3};
    const FourierFunction g = fiber_shift(dom);
    const Point tau{0.3125, 0.7};
    std::vector<FourierFunction> lowered(n);
    for (std::size_t i = 0; i < n; ++i) lowered[i] = sample[i].generator() - 0.3 * bump(dom);

    std::vector<PairData> data(n * n);
    parallel_for(n * n, [&](std::size_t idx) {
        const std::size_t i = idx / n, j = idx % n;
        const FourierFunction& fi = sample[i].generator();
        const FourierFunction& fj = sample[j].generator();
        PairData& d = data[idx];
        const FourierFunction diff = fi - fj;
        d.s = raw_selectors(diff, opts);
        d.sup = sup_norm(diff, opts).value;
        d.nonconstant_coefficient = (diff + (-diff.mean())).max_abs_coefficient();
        const ChordSpectrum spec = chord_spectrum(sample[i], sample[j], opts);
        d.plus_spectral = in_spectrum(spec, d.s.plus, tol);
        d.minus_spectral = in_spectrum(spec, d.s.minus, tol);
        for (int k = 0; k < 2; ++k) d.shifted[k] = raw_selectors((fi + shifts[k]) - fj, opts);
        d.fiber = raw_selectors((fi + g) - (fj + g), opts);
        d.translated = raw_selectors(fi.translated(tau) - fj.translated(tau), opts);
        d.lowered = raw_selectors(lowered[i] - fj, opts);
        d.leq = pointwise_leq(sample[i], sample[j], kOrderTolerance, opts).leq;
    });
    auto at = [&](std::size_t i, std::size_t j) -> const PairData& { return data[i * n + j]; };

    AxiomReport report;
    auto axiom = [](const char* name) {
        AxiomResult r;
        r.name = name;
        return r;
    };
    AxiomResult normalization = axiom("normalization"), reeb = axiom("reeb_shift"), mono = axiom("monotonicity"), tri_plus = axiom("triangle_plus"),
        tri_minus = axiom("triangle_minus"), duality = axiom("poincare_duality"), compat = axiom("compatibility"), nondeg = axiom("non_degeneracy"),
        spectral = axiom("spectrality"), flat = axiom("flatness");

    for (std::size_t i = 0; i < n; ++i) {
        const PairData& d = at(i, i);
        record(normalization, d.s.plus == 0.0 && d.s.minus == 0.0,
               pair_tag(i, i) + fmt(": l+ = %.3g, l- = %.3g", d.s.plus, d.s.minus));
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const PairData& d = at(i, j);
            const std::string tag = pair_tag(i, j);
            for (int k = 0; k < 2; ++k) {
                const double ep = d.shifted[k].plus - (shifts[k] + d.s.plus);
                const double em = d.shifted[k].minus - (shifts[k] + d.s.minus);
                record(reeb, std::abs(ep) <= tol && std::abs(em) <= tol, tag + fmt(": errors %.3g, %.3g", ep, em));
            }
            record(duality, d.s.plus == -at(j, i).s.minus,
                   tag + fmt(": l+ = %.17g, -l-(swapped) = %.17g", d.s.plus, -at(j, i).s.minus));
            record(compat,
                   std::abs(d.fiber.plus - d.s.plus) <= tol && std::abs(d.fiber.minus - d.s.minus) <= tol,
                   tag + fmt(": fiber shift moved selectors by %.3g, %.3g", d.fiber.plus - d.s.plus,
                             d.fiber.minus - d.s.minus));
            record(compat,
                   std::abs(d.translated.plus - d.s.plus) <= tol &&
                       std::abs(d.translated.minus - d.s.minus) <= tol,
                   tag + fmt(": base translation moved selectors by %.3g, %.3g", d.translated.plus - d.s.plus,
                             d.translated.minus - d.s.minus));
            // l+ = l- forces a constant difference; quantitatively each
            // non-constant coefficient is bounded by 4 (l+ - l-).
            const double spread = d.s.plus - d.s.minus;
            record(nondeg, spread >= -tol, tag + ": l- exceeds l+");
            record(nondeg, d.nonconstant_coefficient <= 4.0 * spread + tol,
                   tag + fmt(": coefficient %.3g exceeds 4 (l+ - l-) = %.3g", d.nonconstant_coefficient, 4 * spread));
            record(spectral, d.plus_spectral && d.minus_spectral,
                   tag + fmt(": l+ = %.12g, l- = %.12g not both chord lengths", d.s.plus, d.s.minus));
            const double dspec = std::max(d.s.plus, -d.s.minus);
            record(flat, std::abs(dspec - d.sup) <= tol, tag + fmt(": selector %.17g vs sup %.17g", dspec, d.sup));

            // Lowered copy of L_i sits below L_i; selectors against L_j must not grow.
            record(mono, d.lowered.plus <= d.s.plus + tol && d.lowered.minus <= d.s.minus + tol,
                   tag + fmt(": lowered selectors exceed by %.3g, %.3g", d.lowered.plus - d.s.plus,
                             d.lowered.minus - d.s.minus));
            if (i != j && d.leq) {
                for (std::size_t k = 0; k < n; ++k) {
                    const PairData& a = at(i, k);
                    const PairData& b = at(j, k);
                    record(mono, a.s.plus <= b.s.plus + tol && a.s.minus <= b.s.minus + tol,
                           tag + "/" + std::to_string(k) + fmt(": excess %.3g, %.3g", a.s.plus - b.s.plus,
                                                                  a.s.minus - b.s.minus));
                }
            }
        }
    }

    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                const std::string tag = "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
                const double lhs_p = at(a, c).s.plus, rhs_p = at(a, b).s.plus + at(b, c).s.plus;
                record(tri_plus, lhs_p <= rhs_p + tol, tag + fmt(": %.17g > %.17g", lhs_p, rhs_p));
                const double lhs_m = at(a, c).s.minus, rhs_m = at(a, b).s.minus + at(b, c).s.minus;
                record(tri_minus, lhs_m >= rhs_m - tol, tag + fmt(": %.17g < %.17g", lhs_m, rhs_m));
            }

    report.axioms = {normalization, reeb, mono, tri_plus, tri_minus, duality, compat, nondeg, spectral, flat};
    return report;
}

}  // namespace jetflat
