#pragma once

// Geodesics of the spectral / SCH metrics on piecewise-linear isotopies.
// A PL path minimizes exactly when its segment differences share one point
// q0 and one sign eps with eps * df_k(q0) = max |df_k| for every segment k
// (a quasi-autonomy witness); it is a geodesic when every knot has a window
// on which this holds.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jetflat/isotopy_path.hpp"
#include "jetflat/jet_model.hpp"

namespace jetflat {

inline constexpr double kWitnessTolerance = 1e-9;

/// Common sup-attaining point of a list of functions.
struct CommonWitness {
    int epsilon = 1;
    Point point;
    /// eps * g_k(point) - max |g_k|, one per function.
    std::vector<double> residuals;
};

/// Searches the refined sup-attaining points of every function (functions
/// with sup norm <= tol are ignored) for a point where all of them attain
/// +sup (eps = +1) or all attain -sup (eps = -1) with vanishing gradient.
/// Ties are broken by the smallest point, then eps = +1.
[[nodiscard]] std::optional<CommonWitness> find_common_witness(const std::vector<FourierFunction>& fs,
                                                               double tol = kWitnessTolerance,
                                                               const ScanOptions& opts = {});

struct QAWitness {
    int epsilon = 1;
    Point base_point;
    std::vector<double> per_knot_residuals;
    /// x_k = (q0, df_0(q0), f_k(q0)) for each knot.
    std::vector<JetPoint> jet_path;
};

[[nodiscard]] std::optional<QAWitness> quasi_autonomy_check(const IsotopyPath& path, double tol = kWitnessTolerance,
                                                            const ScanOptions& opts = {});

struct Segmentation {
    /// Maximal knot-index intervals [a, b] on which the sub-path is quasi-autonomous.
    std::vector<std::pair<std::size_t, std::size_t>> intervals;
    /// Every segment lies in some interval.
    bool covers_all_segments = false;
    /// Every interior knot lies strictly inside some interval, i.e. each
    /// two-segment window around a knot is quasi-autonomous.
    bool is_geodesic = false;
    /// sch_length - d_spec of the two-segment window around knot k, k = 1..K-1.
    std::vector<double> window_gaps;
};

[[nodiscard]] Segmentation local_quasi_autonomy_check(const IsotopyPath& path, double tol = kWitnessTolerance,
                                                      const ScanOptions& opts = {});

struct IntegralCriterion {
    double lhs = 0.0;  // integral of max |g_t|
    double rhs = 0.0;  // max |integral of g_t|
    double gap = 0.0;
    bool condition1 = false;
    std::optional<CommonWitness> witness;  // condition (2)
    bool equivalence_violation = false;
    [[nodiscard]] bool holds() const noexcept { return condition1 && witness.has_value(); }
};

/// Time integrals use the trapezoid rule on the given sample times.
[[nodiscard]] IntegralCriterion integral_criterion(const std::vector<double>& times,
                                                   const std::vector<FourierFunction>& samples,
                                                   double tol = kWitnessTolerance, const ScanOptions& opts = {});

struct GeodesicReport {
    double length = 0.0;
    double d_spec = 0.0;
    double gap = 0.0;
    /// gaps[i][j - i - 1] for the sub-path between knots i < j.
    std::vector<std::vector<double>> sub_gaps;
    double max_sub_gap = 0.0;
    bool minimizing = false;
    std::optional<QAWitness> qa_witness;
    Segmentation segmentation;
    bool cross_check_mismatch = false;
};

[[nodiscard]] GeodesicReport minimizing_geodesic_check(const IsotopyPath& path, double tol = kWitnessTolerance,
                                                       const ScanOptions& opts = {});

enum class StepRule {
    /// step / sqrt(iteration)
    Diminishing,
    /// (F - F*) / |g|^2 with F* = max |f1 - f0|, the certified lower bound.
    Polyak,
};

struct OptimizeOptions {
    int iterations = 500;
    StepRule rule = StepRule::Polyak;
    double sigma = 0.2;
    double step = 0.1;
    /// Scan used inside the iterations; coarser grids only add refinement
    /// candidates, they do not change the refined values.
    ScanOptions search = coarse_scan();
    /// Scan used for the lower bound and the reported lengths.
    ScanOptions scan;

    static ScanOptions coarse_scan() {
        ScanOptions s;
        s.circle_grid = 1024;
        s.torus_grid = 64;
        return s;
    }
};

struct OptimizeResult {
    IsotopyPath best_path;
    double best_length = 0.0;
    /// max |f1 - f0|: no path can be shorter.
    double lower_bound = 0.0;
    std::vector<double> restart_lengths;
    std::vector<std::string> log;
};

/// Multi-start subgradient descent on the interior knots of a
/// `knots`-knot path from f0 to f1. Restart r starts from the straight path
/// with N(0, sigma^2) noise on every interior coefficient, seeded by seed + r.
[[nodiscard]] OptimizeResult optimize_path(const FourierFunction& f0, const FourierFunction& f1, int knots,
                                           int restarts, std::uint64_t seed, const OptimizeOptions& opts = {});

struct MonotoneReport {
    bool monotone = false;
    /// Same verdict through pointwise_leq(knot_k, knot_{k+1}).
    bool order_verdict = false;
    std::vector<double> segment_minima;
    bool equivalence_violation = false;
};

[[nodiscard]] MonotoneReport monotone_check(const IsotopyPath& path, double tol = kWitnessTolerance,
                                            const ScanOptions& opts = {});

}  // namespace jetflat
