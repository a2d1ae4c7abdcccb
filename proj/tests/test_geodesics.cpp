#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jetflat/errors.hpp"
#include "jetflat/geodesics.hpp"
#include "jetflat/spectral_metric.hpp"
#include "oracles.hpp"

using namespace jetflat;
using doctest::Approx;

namespace {

FourierFunction circ(double a0, std::vector<double> c, std::vector<double> s = {}) {
    return FourierFunction::circle(a0, std::move(c), std::move(s));
}

// 0.2 cos(2 pi (q - k/K)), k = 0..K
IsotopyPath rotating_bump(int K) {
    std::vector<FourierFunction> k;
    for (int i = 0; i <= K; ++i) {
        const double a = 2.0 * std::numbers::pi * i / K;
        k.push_back(circ(0.0, {0.2 * std::cos(a)}, {0.2 * std::sin(a)}));
    }
    return IsotopyPath::uniform(std::move(k));
}

// Segments eps (A_k - r_k (1 - cos 2pi(q - q0)) - s_k (1 - cos 4pi(q - q0))) with r_k + s_k <= A_k:
// each attains +-A_k exactly at q0 and nowhere exceeds A_k in absolute value.
IsotopyPath quasi_autonomous_path(std::mt19937_64& rng, int segments, double q0, int eps) {
    std::uniform_real_distribution<double> amp(0.2, 1.5), frac(0.05, 1.0);
    const double w = 2.0 * std::numbers::pi * q0;
    std::vector<FourierFunction> knots{random_fourier(Domain::Circle, 3, rng)};
    for (int k = 0; k < segments; ++k) {
        const double A = amp(rng);
        const double r = A * frac(rng) * 0.5, s = A * frac(rng) * 0.5;
        const FourierFunction seg =
            circ(A - r - s, {r * std::cos(w), s * std::cos(2 * w)}, {r * std::sin(w), s * std::sin(2 * w)});
        knots.push_back(knots.back() + static_cast<double>(eps) * seg);
    }
    return IsotopyPath::uniform(std::move(knots));
}

}  // namespace

TEST_CASE("witness product helper matches pointwise evaluation") {
    std::mt19937_64 rng(1);
    const IsotopyPath p = quasi_autonomous_path(rng, 3, 0.3, 1);
    for (std::size_t k = 0; k < p.segment_count(); ++k) {
        const FourierFunction d = p.segment(k);
        CHECK(oracle::circle_max(d, 1 << 14).second == Approx(0.3).epsilon(1e-9));
    }
}

TEST_CASE("quasi-autonomy examples") {
    const FourierFunction h = circ(0.1, {0.5}, {0.2});
    const FourierFunction f = circ(0.3, {0.0, 0.1}, {-0.2});
    const auto w = quasi_autonomy_check(IsotopyPath::uniform({f, f + 0.5 * h, f + h}));
    REQUIRE(w.has_value());
    CHECK(w->epsilon == 1);
    CHECK(w->base_point.q1 == Approx(oracle::circle_max(h, 1 << 14).second).epsilon(1e-9));
    for (double r : w->per_knot_residuals) CHECK(r >= -1e-12);
    // the witness path lies on the Legendrians j^1 f_t
    REQUIRE(w->jet_path.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const FourierFunction fk = f + (0.5 * k) * h;
        CHECK(w->jet_path[k].p[0] == Approx(fk.derivative()(w->base_point.q1)).epsilon(1e-9));
        CHECK(w->jet_path[k].z == Approx(fk(w->base_point.q1)).epsilon(1e-14));
    }

    CHECK_FALSE(quasi_autonomy_check(rotating_bump(8)).has_value());
    CHECK_FALSE(quasi_autonomy_check(IsotopyPath::uniform({f, f + h, f})).has_value());

    const auto constant = quasi_autonomy_check(IsotopyPath::uniform({f, f, f}));
    REQUIRE(constant.has_value());
    CHECK(constant->epsilon == 1);

    // repeated knots are skipped
    CHECK(quasi_autonomy_check(IsotopyPath::uniform({f, f, f + h, f + h})).has_value());

    // negative autonomous path picks eps = -1
    const auto neg = quasi_autonomy_check(IsotopyPath::uniform({f, f - h}));
    REQUIRE(neg.has_value());
    CHECK(neg->epsilon == -1);
}

TEST_CASE("quasi-autonomy on the torus") {
    std::vector<double> cc(4, 0.0);
    cc[2] = 1.0;
    cc[1] = 0.5;
    const FourierFunction h = FourierFunction::torus(0.0, 1, cc, {}, {}, {});
    const FourierFunction f = random_fourier(Domain::Torus2, 2, *std::make_unique<std::mt19937_64>(4));
    const auto w = quasi_autonomy_check(IsotopyPath::uniform({f, f + h, f + 3.0 * h}));
    REQUIRE(w.has_value());
    CHECK(w->base_point.q1 == Approx(0.0).epsilon(1e-12));
    CHECK(w->base_point.q2 == Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(quasi_autonomy_check(IsotopyPath::uniform({f, f + h, f})).has_value());
}

TEST_CASE("segmentation: covering versus geodesic windows") {
    const FourierFunction h = circ(0.0, {0.4}, {0.1});
    const FourierFunction f = circ(0.2, {0.1, 0.1});
    const auto straight = local_quasi_autonomy_check(IsotopyPath::uniform({f, f + 0.3 * h, f + h}));
    REQUIRE(straight.intervals.size() == 1);
    CHECK(straight.intervals[0] == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(straight.is_geodesic);

    const auto rev = local_quasi_autonomy_check(IsotopyPath::uniform({f, f + h, f}));
    CHECK(rev.intervals.size() == 2);
    CHECK(rev.covers_all_segments);
    CHECK_FALSE(rev.is_geodesic);
    REQUIRE(rev.window_gaps.size() == 1);
    CHECK(rev.window_gaps[0] == Approx(2.0 * oracle::circle_sup(h, 1 << 14)).epsilon(1e-11));

    const auto bump = local_quasi_autonomy_check(rotating_bump(8));
    CHECK(bump.intervals.size() == 8);
    for (auto [a, b] : bump.intervals) CHECK(b - a == 1);
    CHECK_FALSE(bump.is_geodesic);

    // two straight pieces with a common argmax at the joint but a turn in between
    const FourierFunction g = circ(0.0, {0.0, 0.3});  // cos 4 pi q, max at 0 and 1/2
    const auto turn = local_quasi_autonomy_check(IsotopyPath::uniform({f, f + h, f + h + g, f + h + g - h}));
    CHECK(turn.covers_all_segments);
}

TEST_CASE("integral criterion examples") {
    std::vector<double> times;
    for (int i = 0; i <= 64; ++i) times.push_back(i / 64.0);

    const FourierFunction g = circ(0.0, {-0.3}, {0.4});
    const auto fixed = integral_criterion(times, std::vector<FourierFunction>(65, g));
    CHECK(fixed.holds());
    CHECK_FALSE(fixed.equivalence_violation);
    REQUIRE(fixed.witness.has_value());
    const auto sup = sup_norm(g);
    CHECK(fixed.witness->epsilon == sup.sign);
    CHECK(fixed.witness->point.q1 == Approx(sup.point.q1).epsilon(1e-9));

    std::vector<FourierFunction> flip, grow;
    for (double t : times) {
        flip.push_back(FourierFunction::constant(Domain::Circle, 2.0 * t - 1.0));
        grow.push_back(circ(0.0, {1.0 + t}));
    }
    const auto f = integral_criterion(times, flip);
    CHECK(f.lhs == 0.5);
    CHECK(f.rhs == 0.0);
    CHECK_FALSE(f.condition1);
    CHECK_FALSE(f.witness.has_value());
    CHECK_FALSE(f.equivalence_violation);

    const auto gr = integral_criterion(times, grow);
    CHECK(gr.holds());
    REQUIRE(gr.witness.has_value());
    CHECK(gr.witness->epsilon == 1);
    CHECK(gr.witness->point.q1 == Approx(0.0).epsilon(1e-12));
    CHECK(gr.lhs == Approx(1.5).epsilon(1e-14));

    CHECK_THROWS_AS((void)integral_criterion({0.0}, {g}), MalformedPath);
    CHECK_THROWS_AS((void)integral_criterion({0.0, 0.0}, {g, g}), MalformedPath);
}

TEST_CASE("minimizing geodesic check") {
    const FourierFunction f = circ(0.1, {0.3}, {0.2});
    const FourierFunction g = circ(-0.2, {0.0, 0.4});
    const auto s = minimizing_geodesic_check(IsotopyPath::straight(f, g));
    CHECK(s.minimizing);
    CHECK(std::abs(s.gap) <= 1e-12);
    CHECK(s.qa_witness.has_value());
    CHECK_FALSE(s.cross_check_mismatch);

    const FourierFunction h = circ(0.0, {0.4}, {0.1});
    const auto r = minimizing_geodesic_check(IsotopyPath::uniform({f, f + h, f}));
    CHECK_FALSE(r.minimizing);
    CHECK(r.gap == Approx(2.0 * oracle::circle_sup(h, 1 << 14)).epsilon(1e-11));
    CHECK(r.segmentation.covers_all_segments);
    CHECK_FALSE(r.cross_check_mismatch);

    const IsotopyPath bump = rotating_bump(8);
    const auto b = minimizing_geodesic_check(bump);
    double sum = 0.0;
    for (std::size_t k = 0; k < 8; ++k) sum += oracle::circle_sup(bump.segment(k), 1 << 14);
    const double expected = sum - oracle::circle_sup(bump.back() - bump.front(), 1 << 14);
    CHECK(expected > 0.1);
    CHECK(b.gap == Approx(expected).epsilon(1e-11));
    CHECK_FALSE(b.minimizing);
    CHECK_FALSE(b.cross_check_mismatch);
}

TEST_CASE("discrete flatness lemma on random paths") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const bool build_qa = trial % 2 == 0;
        IsotopyPath p = build_qa ? quasi_autonomous_path(rng, 3, u(rng), trial % 4 == 0 ? 1 : -1)
                                 : IsotopyPath::uniform({random_fourier(Domain::Circle, 4, rng),
                                                         random_fourier(Domain::Circle, 4, rng),
                                                         random_fourier(Domain::Circle, 4, rng),
                                                         random_fourier(Domain::Circle, 4, rng)});
        const auto rep = minimizing_geodesic_check(p);
        CHECK(rep.gap >= -1e-12);
        CHECK(rep.minimizing == rep.qa_witness.has_value());
        CHECK(rep.minimizing == build_qa);
        if (rep.qa_witness) {
            CHECK(rep.gap <= 1e-9);
            for (double r : rep.qa_witness->per_knot_residuals) CHECK(r >= -1e-12);
        }
        // geodesic windows agree with the segmentation
        bool windows = true;
        for (double w : rep.segmentation.window_gaps) windows = windows && w <= kWitnessTolerance;
        CHECK(windows == rep.segmentation.is_geodesic);
        // reparametrization
        CHECK(sch_length(p.refined(1)) == Approx(sch_length(p)).epsilon(1e-12));
        CHECK(minimizing_geodesic_check(p.refined(1)).minimizing == rep.minimizing);
    }
}

TEST_CASE("optimizer examples") {
    const FourierFunction zero = FourierFunction::constant(Domain::Circle, 0.0);
    const auto c = optimize_path(zero, FourierFunction::constant(Domain::Circle, -0.4), 4, 2, 1);
    CHECK(c.best_length == Approx(0.4).epsilon(1e-12));

    const auto cosine = optimize_path(zero, circ(0.0, {0.5}), 6, 16, 3);
    CHECK(cosine.best_length >= 0.5 - 1e-9);
    CHECK(cosine.best_length <= 0.5 + 1e-4);
    CHECK(cosine.best_path.knot_count() == 6);
    CHECK(sch_length(cosine.best_path) == Approx(cosine.best_length).epsilon(1e-12));
    CHECK(cosine.best_path.front() == zero.padded(1));

    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 3; ++trial) {
        const auto f0 = random_fourier(Domain::Circle, 8, rng), f1 = random_fourier(Domain::Circle, 8, rng);
        const auto r = optimize_path(f0, f1, 6, 16, 100 + trial);
        CHECK(r.lower_bound == Approx(oracle::circle_sup(f1 - f0, 1 << 14)).epsilon(1e-11));
        CHECK(r.best_length - r.lower_bound >= -1e-9);
        CHECK(r.best_length - r.lower_bound <= 1e-4);
        for (double l : r.restart_lengths) CHECK(l >= r.lower_bound - 1e-9);
    }
}

TEST_CASE("optimizer is reproducible and thread-count independent") {
    std::mt19937_64 rng(9);
    const auto f0 = random_fourier(Domain::Circle, 5, rng), f1 = random_fourier(Domain::Circle, 5, rng);
    const auto a = optimize_path(f0, f1, 5, 4, 42);
    setenv("JETFLAT_THREADS", "1", 1);
    const auto b = optimize_path(f0, f1, 5, 4, 42);
    unsetenv("JETFLAT_THREADS");
    CHECK(a.restart_lengths == b.restart_lengths);
    CHECK(a.best_length == b.best_length);
}

TEST_CASE("monotone check") {
    const FourierFunction zero = FourierFunction::constant(Domain::Circle, 0.0);
    const auto up = monotone_check(IsotopyPath::straight(zero, FourierFunction::constant(Domain::Circle, 0.3)));
    CHECK(up.monotone);
    CHECK(up.order_verdict);
    const auto sine = monotone_check(IsotopyPath::straight(zero, circ(0.0, {0.0}, {1.0})));
    CHECK_FALSE(sine.monotone);
    CHECK_FALSE(sine.order_verdict);
    CHECK(sine.segment_minima[0] == Approx(-1.0).epsilon(1e-12));

    const FourierFunction a = circ(0.0, {0.2}, {0.1});
    const FourierFunction bump = circ(1.0, {1.0});
    const IsotopyPath first = IsotopyPath::straight(a, a + 0.3 * bump);
    const IsotopyPath second = IsotopyPath::straight(a + 0.3 * bump, a + 0.3 * bump + 0.1);
    const auto both = monotone_check(first.then(second));
    CHECK(both.monotone);
    CHECK_FALSE(both.equivalence_violation);
}
