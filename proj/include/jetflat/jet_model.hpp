#pragma once

// The 1-jet space J^1 N = T*N x R with contact form dz - p dq, N = S^1 or T^2.
// A Legendrian here is always a 1-jet graph j^1 f = {(q, df(q), f(q))}; the
// Reeb flow is translation in z, so Reeb chords from j^1 f0 to j^1 f1 sit over
// the critical points of f1 - f0.

#include <array>
#include <vector>

#include "jetflat/manifold_fn.hpp"

namespace jetflat {

/// A point (q, p, z) of J^1 N; q and p have dimension(domain) meaningful entries.
struct JetPoint {
    std::array<double, 2> q{};
    std::array<double, 2> p{};
    double z = 0.0;
};

class JetLegendrian {
public:
    explicit JetLegendrian(FourierFunction generator) : generator_(std::move(generator)) {}

    [[nodiscard]] const FourierFunction& generator() const noexcept { return generator_; }
    [[nodiscard]] Domain domain() const noexcept { return generator_.domain(); }
    [[nodiscard]] JetPoint point_over(Point q) const;

    friend bool operator==(const JetLegendrian& a, const JetLegendrian& b) { return a.generator_ == b.generator_; }

private:
    FourierFunction generator_;
};

[[nodiscard]] inline JetLegendrian zero_section(Domain d) {
    return JetLegendrian(FourierFunction::constant(d, 0.0));
}

/// Time-t Reeb flow: z -> z + t, i.e. f -> f + t.
[[nodiscard]] JetLegendrian reeb_translate(const JetLegendrian& L, double t);

struct ChordSpectrum {
    std::vector<double> lengths;
    CriticalSet source;
    bool plateau = false;
};

/// Lengths of Reeb chords from L0 to L1: the critical values of f1 - f0.
[[nodiscard]] ChordSpectrum chord_spectrum(const JetLegendrian& L1, const JetLegendrian& L0,
                                           const ScanOptions& opts = {});

/// True when `length` is within tol of some chord length.
[[nodiscard]] bool in_spectrum(const ChordSpectrum& spectrum, double length, double tol);

struct OrderVerdict {
    bool leq = false;
    /// max(f1 - f0) is within the tolerance band around 0.
    bool marginal = false;
    double max_difference = 0.0;
};

inline constexpr double kOrderTolerance = 1e-12;

/// L1 <= L0 in the contact partial order, realized in the chart as f1 <= f0.
[[nodiscard]] OrderVerdict pointwise_leq(const JetLegendrian& L1, const JetLegendrian& L0,
                                         double tol = kOrderTolerance, const ScanOptions& opts = {});

}  // namespace jetflat
