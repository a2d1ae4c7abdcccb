#pragma once

// Contactomorphisms of the circle (alpha = dtheta) seen through their graphs
// in the contact product S^1 x S^1 x R with beta = dy - e^s dx. The chart
//   (x, y, s) -> (q, p, z) = (x, e^s - 1, y - x)
// pulls dz - p dq back to beta and sends the graph {(x, x + f(x), log(1 + f'(x)))}
// of phi(x) = x + f(x) to j^1 f.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "jetflat/geodesics.hpp"
#include "jetflat/jet_model.hpp"

namespace jetflat {

inline constexpr double kC1SmallThreshold = 0.5;

class CircleContactomorphism {
public:
    /// Throws NotADiffeomorphism when min(1 + f') <= 0, DomainMismatch off the circle.
    explicit CircleContactomorphism(FourierFunction displacement, const ScanOptions& opts = {});

    [[nodiscard]] const FourierFunction& displacement() const noexcept { return f_; }
    /// x + f(x) on the universal cover.
    [[nodiscard]] double operator()(double x) const { return x + f_(x); }
    /// log(1 + f'(x)): phi^* dtheta = e^g dtheta.
    [[nodiscard]] double conformal_factor(double x) const;
    [[nodiscard]] double max_slope() const noexcept { return max_slope_; }
    [[nodiscard]] bool c1_small(double threshold = kC1SmallThreshold) const noexcept {
        return max_slope_ < threshold;
    }
    /// Followed by the rotation (Reeb flow) by t.
    [[nodiscard]] CircleContactomorphism then_rotate(double t) const;

private:
    FourierFunction f_;
    double max_slope_ = 0.0;
};

struct ProductPoint {
    double x = 0.0, y = 0.0, s = 0.0;
};

struct ProductVector {
    double dx = 0.0, dy = 0.0, ds = 0.0;
};

struct ProductChartMap {
    [[nodiscard]] static JetPoint to_jet(const ProductPoint& a);
    [[nodiscard]] static ProductPoint from_jet(const JetPoint& j);
    /// Differential of to_jet at a, as (dq, dp, dz) packed into a JetPoint.
    [[nodiscard]] static JetPoint push_forward(const ProductPoint& a, const ProductVector& v);
    [[nodiscard]] static double beta(const ProductPoint& a, const ProductVector& v);
    /// (dz - p dq) evaluated on a jet tangent vector at base point j.
    [[nodiscard]] static double jet_form(const JetPoint& j, const JetPoint& v);
    /// max |(to_jet^* (dz - p dq))(v) - beta(v)| over `samples` random points and vectors.
    [[nodiscard]] static double pullback_residual(std::mt19937_64& rng, int samples);
};

/// max |beta(v)| over `samples` random tangent vectors of the graph, plus
/// the chart identity e^{log(1+f')} - 1 = f' at the same points.
struct GraphResidual {
    double beta = 0.0;
    double chart = 0.0;
};
[[nodiscard]] GraphResidual graph_residual(const CircleContactomorphism& phi, std::mt19937_64& rng, int samples);

[[nodiscard]] JetLegendrian graph_of(const CircleContactomorphism& phi);

struct TranslatedPoints {
    /// x with f'(x) = 0; translation t = f(x).
    std::vector<double> points;
    ChordSpectrum spectrum;
    /// Agrees with chord_spectrum(graph_of(phi), zero section).
    bool coherent = false;
};

/// Zeros of the conformal factor found directly (grid sign changes of
/// log(1 + f'), bisection), then compared with the chord spectrum of the graph.
[[nodiscard]] TranslatedPoints translated_points(const CircleContactomorphism& phi, const ScanOptions& opts = {},
                                                 double tol = kWitnessTolerance);

struct SpectralNorm {
    double c_plus = 0.0;
    double c_minus = 0.0;
    double norm = 0.0;
    bool plus_in_spectrum = false;
    bool minus_in_spectrum = false;
    /// max |f'| >= 0.5: outside the regime where the chart formula is trusted.
    bool advisory = false;
};

[[nodiscard]] SpectralNorm spectral_norm(const CircleContactomorphism& phi, const ScanOptions& opts = {});

struct ContactQA {
    std::optional<QAWitness> witness;
    /// q0 is a translated point of every phi_k relative to phi_0 (same
    /// conformal factor) and the translations move by eps * max |f_{k+1} - f_k|.
    bool translated_point_verdict = false;
    bool cross_check_mismatch = false;
};

[[nodiscard]] ContactQA contact_qa_check(const std::vector<CircleContactomorphism>& knots,
                                         const std::vector<double>& times, double tol = kWitnessTolerance,
                                         const ScanOptions& opts = {});

struct ShelukhinBound {
    double upper = 0.0;
    double spectral_norm = 0.0;
    double gap = 0.0;
    /// upper < spectral_norm - 1e-9: would contradict the certified lower bound.
    bool below_norm = false;
};

[[nodiscard]] ShelukhinBound shelukhin_norm_upper(const CircleContactomorphism& phi, int knots, int restarts,
                                                  std::uint64_t seed, const OptimizeOptions& opts = {});

/// Random displacement of the given degree rescaled so that max |f'| equals
/// a uniform draw from [0.2, 0.9] * max_slope.
[[nodiscard]] CircleContactomorphism random_contactomorphism(std::mt19937_64& rng, int degree,
                                                             double max_slope = 0.45);

}  // namespace jetflat
