#include "jetflat/contact_product.hpp"

#include <algorithm>
#include <cmath>

#include "jetflat/errors.hpp"
#include "jetflat/spectral_metric.hpp"

namespace jetflat {

CircleContactomorphism::CircleContactomorphism(FourierFunction displacement, const ScanOptions& opts)
    : f_(std::move(displacement)) {
    if (f_.domain() != Domain::Circle) throw DomainMismatch("circle contactomorphisms need a circle displacement");
    const FourierFunction d = f_.derivative();
    const double lowest = extremum(d, ExtremumMode::Min, opts).value;
    if (1.0 + lowest <= 0.0) throw NotADiffeomorphism("1 + f' reaches " + std::to_string(1.0 + lowest));
    max_slope_ = sup_norm(d, opts).value;
}

double CircleContactomorphism::conformal_factor(double x) const {
    return std::log1p(f_.local_jet({x, 0.0}).grad[0]);
}

CircleContactomorphism CircleContactomorphism::then_rotate(double t) const { return CircleContactomorphism(f_ + t); }

JetPoint ProductChartMap::to_jet(const ProductPoint& a) {
    JetPoint j;
    j.q[0] = a.x;
    j.p[0] = std::expm1(a.s);
    j.z = a.y - a.x;
    return j;
}

ProductPoint ProductChartMap::from_jet(const JetPoint& j) { return {j.q[0], j.z + j.q[0], std::log1p(j.p[0])}; }

JetPoint ProductChartMap::push_forward(const ProductPoint& a, const ProductVector& v) {
    JetPoint d;
    d.q[0] = v.dx;
    d.p[0] = std::exp(a.s) * v.ds;
    d.z = v.dy - v.dx;
    return d;
}

double ProductChartMap::beta(const ProductPoint& a, const ProductVector& v) { return v.dy - std::exp(a.s) * v.dx; }

double ProductChartMap::jet_form(const JetPoint& j, const JetPoint& v) { return v.z - j.p[0] * v.q[0]; }

double ProductChartMap::pullback_residual(std::mt19937_64& rng, int samples) {
    std::uniform_real_distribution<double> unit(0.0, 1.0), s(-1.0, 1.0), comp(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const ProductPoint a{unit(rng), unit(rng), s(rng)};
        const ProductVector v{comp(rng), comp(rng), comp(rng)};
        const double lhs = jet_form(to_jet(a), push_forward(a, v));
        worst = std::max(worst, std::abs(lhs - beta(a, v)));
    }
    return worst;
}

GraphResidual graph_residual(const CircleContactomorphism& phi, std::mt19937_64& rng, int samples) {
    std::uniform_real_distribution<double> unit(0.0, 1.0), scale(-1.0, 1.0);
    const FourierFunction& f = phi.displacement();
    GraphResidual r;
    for (int i = 0; i < samples; ++i) {
        const double x = unit(rng);
        const LocalJet j = f.local_jet({x, 0.0});
        const double g = std::log1p(j.grad[0]);
        const ProductPoint a{x, x + j.value, g};
        // tangent of x -> (x, x + f(x), log(1 + f'(x))), scaled
        const double c = scale(rng);
        const ProductVector v{c, c * (1.0 + j.grad[0]), c * j.hess[0] / (1.0 + j.grad[0])};
        r.beta = std::max(r.beta, std::abs(ProductChartMap::beta(a, v)));
        const JetPoint jp = ProductChartMap::to_jet(a);
        r.chart = std::max({r.chart, std::abs(jp.p[0] - j.grad[0]), std::abs(jp.z - j.value)});
    }
    return r;
}

JetLegendrian graph_of(const CircleContactomorphism& phi) { return JetLegendrian(phi.displacement()); }

TranslatedPoints translated_points(const CircleContactomorphism& phi, const ScanOptions& opts, double tol) {
    const FourierFunction& f = phi.displacement();
    TranslatedPoints out;
    auto g = [&](double x) { return phi.conformal_factor(x); };
    std::vector<double> values;
    if (f.is_constant()) {
        out.spectrum.plateau = true;
        out.points.push_back(0.0);
        values.push_back(f.mean());
    } else {
        const int n = opts.circle_grid;
        const std::vector<double> slope = f.derivative().sample_grid(n);
        for (int i = 0; i < n; ++i) {
            const double a = static_cast<double>(i) / n, b = static_cast<double>(i + 1) / n;
            const double ga = std::log1p(slope[static_cast<std::size_t>(i)]);
            const double gb = std::log1p(slope[static_cast<std::size_t>((i + 1) % n)]);
            double x;
            if (ga == 0.0) {
                x = a;
            } else if ((ga < 0.0) != (gb < 0.0) && gb != 0.0) {
                double lo = a, hi = b, glo = ga;
                for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = g(mid);
                    if (gm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if ((gm < 0.0) == (glo < 0.0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                x = 0.5 * (lo + hi);
            } else {
                continue;
            }
            out.points.push_back(x);
            values.push_back(f(x));
        }
    }
    out.spectrum.lengths = cluster_values(values, opts.cluster_tolerance);
    for (double x : out.points) out.spectrum.source.points.push_back({x, 0.0});
    out.spectrum.source.values = out.spectrum.lengths;
    out.spectrum.source.plateau = out.spectrum.plateau;
    out.spectrum.source.tolerance = opts.point_tolerance;

    const ChordSpectrum chords = chord_spectrum(graph_of(phi), zero_section(Domain::Circle), opts);
    out.coherent = chords.lengths.size() == out.spectrum.lengths.size() && chords.plateau == out.spectrum.plateau;
    for (std::size_t i = 0; out.coherent && i < chords.lengths.size(); ++i)
        out.coherent = std::abs(chords.lengths[i] - out.spectrum.lengths[i]) <= tol;
    return out;
}

SpectralNorm spectral_norm(const CircleContactomorphism& phi, const ScanOptions& opts) {
    SpectralNorm r;
    const FourierFunction& f = phi.displacement();
    r.c_plus = extremum(f, ExtremumMode::Max, opts).value;
    r.c_minus = extremum(f, ExtremumMode::Min, opts).value;
    r.norm = std::max(r.c_plus, -r.c_minus);
    const TranslatedPoints tp = translated_points(phi, opts);
    r.plus_in_spectrum = in_spectrum(tp.spectrum, r.c_plus, kWitnessTolerance);
    r.minus_in_spectrum = in_spectrum(tp.spectrum, r.c_minus, kWitnessTolerance);
    r.advisory = !phi.c1_small();
    return r;
}

ContactQA contact_qa_check(const std::vector<CircleContactomorphism>& knots, const std::vector<double>& times,
                           double tol, const ScanOptions& opts) {
    std::vector<FourierFunction> fs;
    for (const auto& k : knots) fs.push_back(k.displacement());
    const IsotopyPath path(fs, times);
    ContactQA r;
    r.witness = quasi_autonomy_check(path, tol, opts);
    if (r.witness) {
        const double x = r.witness->base_point.q1;
        const double eps = r.witness->epsilon;
        bool ok = true;
        for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
            const FourierFunction d = fs[k + 1] - fs[k];
            if (sup_norm(d, opts).value <= tol) continue;
            // conformal factors agree, so x is translated by phi_{k+1} phi_k^{-1} ...
            const double dg = knots[k + 1].conformal_factor(x) - knots[k].conformal_factor(x);
            // ... by the Reeb time phi_{k+1}(x) - phi_k(x), which must be eps * max |f_{k+1} - f_k|.
            const double shift = knots[k + 1](x) - knots[k](x);
            ok = ok && std::abs(dg) <= tol && eps * shift >= sup_norm(d, opts).value - tol;
        }
        r.translated_point_verdict = ok;
    }
    r.cross_check_mismatch = r.witness.has_value() != r.translated_point_verdict;
    return r;
}

ShelukhinBound shelukhin_norm_upper(const CircleContactomorphism& phi, int knots, int restarts, std::uint64_t seed,
                                    const OptimizeOptions& opts) {
    const FourierFunction zero = FourierFunction::constant(Domain::Circle, 0.0);
    const OptimizeResult res = optimize_path(zero, phi.displacement(), knots, restarts, seed, opts);
    ShelukhinBound b;
    b.upper = res.best_length;
    b.spectral_norm = spectral_norm(phi, opts.scan).norm;
    b.gap = b.upper - b.spectral_norm;
    b.below_norm = b.gap < -1e-9;
    return b;
}

CircleContactomorphism random_contactomorphism(std::mt19937_64& rng, int degree, double max_slope) {
    for (;;) {
        const FourierFunction f = random_fourier(Domain::Circle, degree, rng);
        const double slope = sup_norm(f.derivative()).value;
        if (slope == 0.0) continue;
        std::uniform_real_distribution<double> target(0.2 * max_slope, 0.9 * max_slope);
        return CircleContactomorphism((target(rng) / slope) * f);
    }
}

}  // namespace jetflat
