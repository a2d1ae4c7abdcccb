#include "jetflat/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

#include "jetflat/errors.hpp"
#include "jetflat/parallel.hpp"
#include "jetflat/spectral_metric.hpp"

namespace jetflat {

namespace {

constexpr double kPolishStep = 1e-4;
constexpr double kPrefilter = 1e-6;
// A restart stops once it is this close (relative) to the lower bound.
constexpr double kConverged = 1e-13;

double gradient_norm(const LocalJet& j, Domain d) {
    return d == Domain::Circle ? std::abs(j.grad[0]) : std::hypot(j.grad[0], j.grad[1]);
}

/// Newton iterations towards a critical point of s near q, each step capped.
Point polish(const FourierFunction& s, Point q) {
    const Domain d = s.domain();
    Point start = q;
    for (int it = 0; it < 30; ++it) {
        const LocalJet j = s.local_jet(q);
        Point next = q;
        if (d == Domain::Circle) {
            if (j.hess[0] == 0.0) break;
            next.q1 -= j.grad[0] / j.hess[0];
        } else {
            const double det = j.hess[0] * j.hess[2] - j.hess[1] * j.hess[1];
            if (det == 0.0) break;
            next.q1 -= (j.hess[2] * j.grad[0] - j.hess[1] * j.grad[1]) / det;
            next.q2 -= (j.hess[0] * j.grad[1] - j.hess[1] * j.grad[0]) / det;
        }
        if (std::abs(next.q1 - start.q1) > kPolishStep || std::abs(next.q2 - start.q2) > kPolishStep) break;
        if (gradient_norm(s.local_jet(next), d) >= gradient_norm(j, d)) break;
        q = next;
    }
    return wrap(q);
}

bool point_less(Point a, Point b) { return a.q1 != b.q1 ? a.q1 < b.q1 : a.q2 < b.q2; }

}  // namespace

std::optional<CommonWitness> find_common_witness(const std::vector<FourierFunction>& fs, double tol,
                                                 const ScanOptions& opts) {
    if (fs.empty()) return CommonWitness{};
    const Domain d = fs.front().domain();
    for (const auto& f : fs)
        if (f.domain() != d) throw DomainMismatch("witness search over functions on different domains");

    std::vector<double> sups(fs.size());
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        sups[k] = sup_norm(fs[k], opts).value;
        if (sups[k] > tol) active.push_back(k);
    }
    auto residuals_at = [&](int eps, Point q) {
        std::vector<double> r(fs.size());
        for (std::size_t k = 0; k < fs.size(); ++k) r[k] = eps * fs[k](q) - sups[k];
        return r;
    };
    if (active.empty()) return CommonWitness{1, Point{}, residuals_at(1, Point{})};

    std::vector<Point> candidates;
    for (std::size_t k : active) {
        auto pts = sup_attaining_points(fs[k], tol, opts);
        candidates.insert(candidates.end(), pts.begin(), pts.end());
    }
    std::sort(candidates.begin(), candidates.end(), point_less);

    std::optional<CommonWitness> best;
    for (int eps : {1, -1}) {
        FourierFunction sum = FourierFunction::constant(d, 0.0);
        for (std::size_t k : active) sum += fs[k];
        if (eps < 0) sum *= -1.0;
        for (Point q : candidates) {
            bool near = true;
            for (std::size_t k : active)
                if (eps * fs[k](q) - sups[k] < -kPrefilter) {
                    near = false;
                    break;
                }
            if (!near) continue;
            const Point p = polish(sum, q);
            bool ok = true;
            for (std::size_t k : active) {
                if (eps * fs[k](p) - sups[k] < -tol || gradient_norm(fs[k].local_jet(p), d) > tol) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (!best || point_less(p, best->point)) best = CommonWitness{eps, p, residuals_at(eps, p)};
            break;  // candidates are sorted; later ones cannot win for this eps
        }
    }
    return best;
}

std::optional<QAWitness> quasi_autonomy_check(const IsotopyPath& path, double tol, const ScanOptions& opts) {
    const auto w = find_common_witness(path.segments(), tol, opts);
    if (!w) return std::nullopt;
    QAWitness out;
    out.epsilon = w->epsilon;
    out.base_point = w->point;
    out.per_knot_residuals = w->residuals;
    const LocalJet j0 = path.front().local_jet(w->point);
    for (const auto& f : path.knots()) {
        JetPoint x;
        x.q = {w->point.q1, path.domain() == Domain::Torus2 ? w->point.q2 : 0.0};
        x.p = j0.grad;
        x.z = f(w->point);
        out.jet_path.push_back(x);
    }
    return out;
}

Segmentation local_quasi_autonomy_check(const IsotopyPath& path, double tol, const ScanOptions& opts) {
    const std::size_t K = path.segment_count();
    const auto segs = path.segments();
    std::vector<double> sups(K);
    for (std::size_t k = 0; k < K; ++k) sups[k] = sup_norm(segs[k], opts).value;

    auto qa = [&](std::size_t a, std::size_t b) {
        std::vector<FourierFunction> part(segs.begin() + static_cast<std::ptrdiff_t>(a),
                                          segs.begin() + static_cast<std::ptrdiff_t>(b));
        return find_common_witness(part, tol, opts).has_value();
    };

    Segmentation s;
    // Two pointers: the reach of a quasi-autonomous interval never decreases with its start.
    std::size_t reach = 0;
    for (std::size_t a = 0; a < K; ++a) {
        std::size_t b = std::max(reach, a);
        if (b == a) {
            if (!qa(a, a + 1)) continue;
            b = a + 1;
        }
        while (b < K && qa(a, b + 1)) ++b;
        if (b > reach) {
            s.intervals.emplace_back(a, b);
            reach = b;
        }
    }

    std::vector<bool> seg_covered(K, false), knot_inside(K + 1, false);
    for (auto [a, b] : s.intervals) {
        for (std::size_t k = a; k < b; ++k) seg_covered[k] = true;
        for (std::size_t k = a + 1; k < b; ++k) knot_inside[k] = true;
    }
    s.covers_all_segments = std::all_of(seg_covered.begin(), seg_covered.end(), [](bool v) { return v; });
    s.is_geodesic = s.covers_all_segments;
    for (std::size_t k = 1; k < K; ++k) s.is_geodesic = s.is_geodesic && knot_inside[k];

    for (std::size_t k = 1; k < K; ++k) {
        const double d = sup_norm(segs[k - 1] + segs[k], opts).value;
        s.window_gaps.push_back(sups[k - 1] + sups[k] - d);
    }
    return s;
}

IntegralCriterion integral_criterion(const std::vector<double>& times, const std::vector<FourierFunction>& samples,
                                     double tol, const ScanOptions& opts) {
    if (samples.size() < 2 || times.size() != samples.size())
        throw MalformedPath("integral criterion needs at least two samples with one time each");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw MalformedPath("sample times must be strictly increasing");
    const Domain d = samples.front().domain();
    for (const auto& g : samples)
        if (g.domain() != d) throw DomainMismatch("time samples on different domains");

    const std::size_t n = samples.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = 0.5 * (times[i + 1] - times[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    IntegralCriterion r;
    FourierFunction integral = FourierFunction::constant(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        r.lhs += w[i] * sup_norm(samples[i], opts).value;
        integral += w[i] * samples[i];
    }
    r.rhs = sup_norm(integral, opts).value;
    r.gap = r.lhs - r.rhs;
    r.condition1 = r.gap <= tol;
    r.witness = find_common_witness(samples, tol, opts);
    r.equivalence_violation = r.condition1 != r.witness.has_value();
    return r;
}

GeodesicReport minimizing_geodesic_check(const IsotopyPath& path, double tol, const ScanOptions& opts) {
    GeodesicReport r;
    const std::size_t K = path.segment_count();
    std::vector<double> sups(K);
    for (std::size_t k = 0; k < K; ++k) sups[k] = sup_norm(path.segment(k), opts).value;
    r.sub_gaps.resize(K);
    for (std::size_t i = 0; i < K; ++i) {
        double len = 0.0;
        for (std::size_t j = i + 1; j <= K; ++j) {
            len += sups[j - 1];
            const double gap = len - spectral_distance(path.knots()[j], path.knots()[i], opts);
            r.sub_gaps[i].push_back(gap);
            r.max_sub_gap = std::max(r.max_sub_gap, gap);
            if (i == 0 && j == K) {
                r.length = len;
                r.gap = gap;
                r.d_spec = len - gap;
            }
        }
    }
    r.minimizing = r.max_sub_gap <= tol;
    r.qa_witness = quasi_autonomy_check(path, tol, opts);
    r.segmentation = local_quasi_autonomy_check(path, tol, opts);
    r.cross_check_mismatch = r.minimizing != r.qa_witness.has_value();
    return r;
}

namespace {

struct Objective {
    double value = 0.0;
    std::vector<double> subgradient;  // over interior coefficients
};

Objective evaluate_path(const std::vector<FourierFunction>& knots, std::size_t ncoef, const ScanOptions& opts) {
    const std::size_t K = knots.size() - 1;
    Objective o;
    o.subgradient.assign((K - 1) * ncoef, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        const SupNorm s = sup_norm(knots[k + 1] - knots[k], opts);
        o.value += s.value;
        const std::vector<double> b = knots[k].basis_at(s.point);
        // d/d(knot k+1) of |f_{k+1} - f_k|(q*) is sign * basis; minus for knot k.
        if (k + 1 < K)
            for (std::size_t c = 0; c < ncoef; ++c) o.subgradient[k * ncoef + c] += s.sign * b[c];
        if (k >= 1)
            for (std::size_t c = 0; c < ncoef; ++c) o.subgradient[(k - 1) * ncoef + c] -= s.sign * b[c];
    }
    return o;
}

/// Euclidean projection of v onto the probability simplex.
void project_simplex(std::vector<double>& v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cum += u[i];
        const double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    for (double& x : v) x = std::max(x - theta, 0.0);
}

/// Approximate minimum-norm element of sum_k conv(groups[k]) by projected
/// gradient on the product of simplices.
std::vector<double> min_norm_direction(const std::vector<std::vector<std::vector<double>>>& groups, std::size_t dim) {
    std::vector<std::vector<double>> lambda;
    for (const auto& g : groups) lambda.emplace_back(g.size(), 1.0 / static_cast<double>(g.size()));
    auto combine = [&] {
        std::vector<double> d(dim, 0.0);
        for (std::size_t k = 0; k < groups.size(); ++k)
            for (std::size_t j = 0; j < groups[k].size(); ++j)
                for (std::size_t c = 0; c < dim; ++c) d[c] += lambda[k][j] * groups[k][j][c];
        return d;
    };
    double lip = 0.0;
    for (const auto& g : groups) {
        double worst = 0.0;
        for (const auto& v : g) {
            double n2 = 0.0;
            for (double x : v) n2 += x * x;
            worst = std::max(worst, n2);
        }
        lip += worst;
    }
    if (lip == 0.0) return combine();
    const double step = 0.5 / lip;
    for (int it = 0; it < 100; ++it) {
        const std::vector<double> d = combine();
        bool moved = false;
        for (std::size_t k = 0; k < groups.size(); ++k) {
            if (groups[k].size() < 2) continue;
            for (std::size_t j = 0; j < groups[k].size(); ++j) {
                double grad = 0.0;
                for (std::size_t c = 0; c < dim; ++c) grad += groups[k][j][c] * d[c];
                lambda[k][j] -= step * 2.0 * grad;
            }
            project_simplex(lambda[k]);
            moved = true;
        }
        if (!moved) break;
    }
    return combine();
}

}  // namespace

OptimizeResult optimize_path(const FourierFunction& f0, const FourierFunction& f1, int knots, int restarts,
                             std::uint64_t seed, const OptimizeOptions& opts) {
    if (knots < 2) throw MalformedPath("optimize_path needs at least two knots");
    if (f0.domain() != f1.domain()) throw DomainMismatch("endpoints on different domains");
    restarts = std::max(restarts, 1);
    const int degree = std::max(f0.degree(), f1.degree());
    const FourierFunction a = f0.padded(degree), b = f1.padded(degree);
    const std::size_t ncoef = a.coefficient_count();
    const auto K = static_cast<std::size_t>(knots - 1);

    std::vector<FourierFunction> straight;
    for (std::size_t k = 0; k <= K; ++k) straight.push_back(a + (static_cast<double>(k) / K) * (b - a));
    straight.back() = b;

    const double lower = sup_norm(b - a, opts.scan).value;
    struct Run {
        std::vector<FourierFunction> best;
        double length = std::numeric_limits<double>::infinity();
    };
    std::vector<Run> runs(static_cast<std::size_t>(restarts));

    parallel_for(runs.size(), [&](std::size_t r) {
        std::mt19937_64 rng(seed + r);
        std::normal_distribution<double> noise(0.0, opts.sigma);
        std::vector<std::vector<double>> x;
        for (std::size_t k = 1; k < K; ++k) {
            auto c = straight[k].coefficients();
            for (double& v : c) v += noise(rng);
            x.push_back(std::move(c));
        }
        std::vector<FourierFunction> path = straight;
        auto load = [&] {
            for (std::size_t k = 1; k < K; ++k) path[k] = a.with_coefficients(x[k - 1]);
        };
        load();
        Run& run = runs[r];
        for (int it = 1; it <= opts.iterations; ++it) {
            const Objective o = evaluate_path(path, ncoef, opts.search);
            if (o.value < run.length) {
                run.length = o.value;
                run.best = path;
            }
            if (K < 2 || o.value - lower <= kConverged * std::max(1.0, lower)) break;
            std::vector<double> dir = o.subgradient;
            double gap = o.value - lower;
            if (opts.rule == StepRule::Polyak) {
                // near-active points of every segment within eta of its sup; half Polyak step
                const double eta = 0.5 * gap;
                std::vector<std::vector<std::vector<double>>> groups(K);
                for (std::size_t k = 0; k < K; ++k) {
                    const FourierFunction d = path[k + 1] - path[k];
                    for (const SupNorm& m : near_sup_points(d, eta, opts.search)) {
                        const double sign = m.sign;
                        const std::vector<double> b = a.basis_at(m.point);
                        std::vector<double> v((K - 1) * ncoef, 0.0);
                        for (std::size_t c = 0; c < ncoef; ++c) {
                            if (k + 1 < K) v[k * ncoef + c] += sign * b[c];
                            if (k >= 1) v[(k - 1) * ncoef + c] -= sign * b[c];
                        }
                        groups[k].push_back(std::move(v));
                    }
                }
                dir = min_norm_direction(groups, (K - 1) * ncoef);
                gap *= 0.5;
            }
            double norm2 = 0.0;
            for (double g : dir) norm2 += g * g;
            if (norm2 == 0.0) break;
            const double step = opts.rule == StepRule::Polyak ? gap / norm2
                                                              : opts.step / std::sqrt(static_cast<double>(it));
            for (std::size_t k = 0; k + 1 < K; ++k)
                for (std::size_t c = 0; c < ncoef; ++c) x[k][c] -= step * dir[k * ncoef + c];
            load();
        }
    });

    parallel_for(runs.size(), [&](std::size_t r) {
        runs[r].length = sch_length(IsotopyPath::uniform(runs[r].best), opts.scan);
    });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].length < runs[best].length) best = r;
    OptimizeResult out{IsotopyPath::uniform(runs[best].best), runs[best].length, lower, {}, {}};
    for (const auto& run : runs) out.restart_lengths.push_back(run.length);
    char buf[200];
    std::snprintf(buf, sizeof buf, "best restart %zu: length %.12g, lower bound %.12g, excess %.3g", best,
                  out.best_length, lower, out.best_length - lower);
    out.log.emplace_back(buf);
    if (out.best_length - lower > 1e-4) out.log.emplace_back("no restart came within 1e-4 of the lower bound");
    return out;
}

MonotoneReport monotone_check(const IsotopyPath& path, double tol, const ScanOptions& opts) {
    MonotoneReport r;
    r.monotone = true;
    r.order_verdict = true;
    for (std::size_t k = 0; k < path.segment_count(); ++k) {
        const double m = extremum(path.segment(k), ExtremumMode::Min, opts).value;
        r.segment_minima.push_back(m);
        r.monotone = r.monotone && m >= -tol;
        const JetLegendrian lo(path.knots()[k]), hi(path.knots()[k + 1]);
        r.order_verdict = r.order_verdict && pointwise_leq(lo, hi, tol, opts).leq;
    }
    r.equivalence_violation = r.monotone != r.order_verdict;
    return r;
}

}  // namespace jetflat
