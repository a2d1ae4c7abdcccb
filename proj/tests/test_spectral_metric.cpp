#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "jetflat/errors.hpp"
#include "jetflat/spectral_metric.hpp"
#include "oracles.hpp"

using namespace jetflat;
using doctest::Approx;

namespace {

FourierFunction circ(double a0, std::vector<double> c, std::vector<double> s = {}) {
    return FourierFunction::circle(a0, std::move(c), std::move(s));
}

IsotopyPath random_path(std::mt19937_64& rng, int knots, int degree, Domain d = Domain::Circle) {
    std::vector<FourierFunction> k;
    for (int i = 0; i < knots; ++i) k.push_back(random_fourier(d, degree, rng));
    return IsotopyPath::uniform(std::move(k));
}

}  // namespace

TEST_CASE("selectors examples") {
    const JetLegendrian L(circ(0.4, {0.2, -0.1}, {0.05, 0.3}));
    const auto same = selectors(L, L);
    CHECK(same.ell_plus == 0.0);
    CHECK(same.ell_minus == 0.0);
    CHECK(same.d_spec == 0.0);
    CHECK(same.plus_in_spectrum);

    for (double c : {0.7, -1.25}) {
        const auto r = selectors(reeb_translate(L, c), L);
        CHECK(r.ell_plus == Approx(c).epsilon(1e-14));
        CHECK(r.ell_minus == Approx(c).epsilon(1e-14));
        CHECK(r.d_spec == Approx(std::abs(c)).epsilon(1e-14));
    }

    const auto amp = selectors(JetLegendrian(circ(0.0, {0.3}, {-0.1})), zero_section(Domain::Circle));
    const double expected = oracle::circle_max(circ(0.0, {0.3}, {-0.1}), 1 << 16).first;
    CHECK(expected == Approx(0.3162278).epsilon(1e-7));
    CHECK(amp.ell_plus == Approx(expected).epsilon(1e-12));
    CHECK(amp.ell_minus == Approx(-expected).epsilon(1e-12));
    CHECK(amp.plus_in_spectrum);
    CHECK(amp.minus_in_spectrum);

    CHECK_THROWS_AS((void)selectors(L, zero_section(Domain::Torus2)), DomainMismatch);
}

TEST_CASE("flatness identity through two code paths, circle and torus") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Domain d = trial % 4 == 3 ? Domain::Torus2 : Domain::Circle;
        const FourierFunction f = random_fourier(d, d == Domain::Circle ? 8 : 4, rng);
        const FourierFunction g = random_fourier(d, d == Domain::Circle ? 8 : 4, rng);
        const auto r = selectors(JetLegendrian(f), JetLegendrian(g));
        CHECK(r.ell_minus <= r.ell_plus);
        CHECK(r.d_spec == Approx(spectral_distance(f, g)).epsilon(1e-12));
        CHECK(r.d_spec == Approx(sch_distance(f, g)).epsilon(1e-12));
        if (d == Domain::Circle) {
            CHECK(r.ell_plus == Approx(oracle::circle_max(f - g, 1 << 14).first).epsilon(1e-11));
            CHECK(r.d_spec == Approx(oracle::circle_sup(f - g, 1 << 14)).epsilon(1e-11));
        } else {
            CHECK(r.ell_plus >= oracle::torus_grid_max(f - g, 128) - 1e-12);
        }
    }
}

TEST_CASE("sch_length examples and reparametrization") {
    const FourierFunction f = circ(0.1, {0.4}, {0.2});
    const FourierFunction g = circ(-0.3, {0.0, 0.25}, {0.1});
    CHECK(sch_length(IsotopyPath::straight(f, g)) == Approx(oracle::circle_sup(f - g, 1 << 14)).epsilon(1e-12));
    CHECK(sch_length(IsotopyPath::uniform({f, f, f})) == 0.0);

    const FourierFunction h = circ(0.0, {0.3, 0.1}, {-0.2});
    const IsotopyPath detour = IsotopyPath::uniform({f, f + h, f});
    CHECK(sch_length(detour) == Approx(2.0 * oracle::circle_sup(h, 1 << 14)).epsilon(1e-12));
    CHECK(sch_length(IsotopyPath::straight(f, f + h).then(IsotopyPath::straight(f + h, f))) ==
          Approx(2.0 * sch_length(IsotopyPath::straight(f, f + h))).epsilon(1e-14));

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const IsotopyPath p = random_path(rng, 5, 6);
        CHECK(sch_length(p.refined(2)) == Approx(sch_length(p)).epsilon(1e-12));
        CHECK(sch_length(p) >= spectral_distance(p.back(), p.front()) - 1e-12);
    }

    CHECK_THROWS_AS(IsotopyPath({f, FourierFunction::constant(Domain::Torus2, 0.0)}, {0.0, 1.0}), MalformedPath);
    CHECK_THROWS_AS(IsotopyPath({f}, {0.0}), MalformedPath);
    CHECK_THROWS_AS(IsotopyPath({f, g}, {0.0, 0.5, 1.0}), MalformedPath);
    CHECK_THROWS_AS(IsotopyPath({f, g, f}, {0.0, 0.7, 0.7}), MalformedPath);
    CHECK_THROWS_AS(IsotopyPath({f, g}, {0.1, 1.0}), MalformedPath);
}

TEST_CASE("metric_length on piecewise-linear paths") {
    const FourierFunction f = circ(0.1, {0.4}, {0.2});
    const FourierFunction g = circ(-0.3, {0.0, 0.25}, {0.1});
    const auto straight = metric_length(IsotopyPath::straight(f, g), Metric::Spec);
    CHECK(straight.converged);
    CHECK(straight.value == Approx(sch_length(IsotopyPath::straight(f, g))).epsilon(1e-12));
    CHECK(metric_length(IsotopyPath::uniform({f, f}), Metric::Spec).value == 0.0);

    // Knots at irregular times, including a loop: the knot times must enter the partition.
    const IsotopyPath loop({f, g, f}, {0.0, 0.3, 1.0});
    const auto m = metric_length(loop, Metric::Spec);
    CHECK(m.converged);
    CHECK(m.value == Approx(2.0 * spectral_distance(f, g)).epsilon(1e-12));

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        const IsotopyPath p = random_path(rng, 4, 5);
        const auto spec = metric_length(p, Metric::Spec);
        const auto sch = metric_length(p, Metric::Sch);
        CHECK(spec.converged);
        CHECK(spec.value <= sch.value + 1e-12);
        CHECK(spec.value == Approx(sch_length(p)).epsilon(1e-11));
    }
}

TEST_CASE("hamiltonian bounds chain") {
    const FourierFunction f = circ(0.1, {0.4}, {0.2});
    const FourierFunction g = circ(-0.3, {0.0, 0.25}, {0.1});
    const auto one = hamiltonian_bounds_check(IsotopyPath::straight(f, g));
    CHECK(one.holds());
    CHECK(one.integral_min == Approx(one.ell_minus).epsilon(1e-15));
    CHECK(one.integral_max == Approx(one.ell_plus).epsilon(1e-15));

    const FourierFunction h = circ(0.0, {0.3, 0.1}, {-0.2});
    const auto det = hamiltonian_bounds_check(IsotopyPath::uniform({f, f + h, f}));
    CHECK(det.holds());
    CHECK(det.ell_plus == 0.0);
    CHECK(det.ell_minus == 0.0);
    CHECK(det.integral_min < -0.1);
    CHECK(det.integral_max > 0.1);
    CHECK(det.integral_max ==
          Approx(oracle::circle_max(h, 1 << 14).first + oracle::circle_max(-h, 1 << 14).first).epsilon(1e-11));

    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const IsotopyPath p = random_path(rng, 5, 6);
        const auto b = hamiltonian_bounds_check(p);
        CHECK(b.holds());
        double lo = 0.0, hi = 0.0;
        for (std::size_t k = 0; k < p.segment_count(); ++k) {
            hi += oracle::circle_max(p.segment(k), 1 << 13).first;
            lo -= oracle::circle_max(-p.segment(k), 1 << 13).first;
        }
        CHECK(b.integral_max == Approx(hi).epsilon(1e-11));
        CHECK(b.integral_min == Approx(lo).epsilon(1e-11));
        CHECK(lo <= b.ell_minus + 1e-11);
        CHECK(b.ell_plus <= hi + 1e-11);
    }
}

TEST_CASE("axiom suite on Reeb translates and a scaled triple") {
    const JetLegendrian z = zero_section(Domain::Circle);
    const auto trivial = axiom_suite({z, reeb_translate(z, 0.6)});
    CHECK(trivial.all_passed());
    REQUIRE(trivial.axioms.size() == 10);
    for (const auto& a : trivial.axioms) CHECK_MESSAGE(a.checks > 0, a.name);

    const FourierFunction f = circ(0.0, {0.5, 0.1}, {0.2});
    const auto tight = axiom_suite({z, JetLegendrian(f), JetLegendrian(2.0 * f)});
    CHECK(tight.all_passed());
    const double mf = selectors(JetLegendrian(f), z).ell_plus;
    CHECK(selectors(JetLegendrian(2.0 * f), z).ell_plus == Approx(2.0 * mf).epsilon(1e-14));
    CHECK(selectors(JetLegendrian(2.0 * f), JetLegendrian(f)).ell_plus + mf == Approx(2.0 * mf).epsilon(1e-14));
}

TEST_CASE("axiom suite on random samples, circle and torus") {
    std::mt19937_64 rng(2024);
    std::vector<JetLegendrian> circle, torus;
    for (int i = 0; i < 10; ++i) circle.emplace_back(random_fourier(Domain::Circle, 8, rng));
    for (int i = 0; i < 4; ++i) torus.emplace_back(random_fourier(Domain::Torus2, 3, rng));
    for (const auto* s : {&circle, &torus}) {
        const auto r = axiom_suite(*s);
        for (const auto& a : r.axioms) {
            CHECK_MESSAGE(a.passed(), a.name, ": ", a.counterexamples.empty() ? "" : a.counterexamples.front());
            CHECK(a.checks > 0);
        }
    }
    CHECK_THROWS_AS((void)axiom_suite({circle[0], torus[0]}), DomainMismatch);
}
