#pragma once

// Order spectral selectors and the lengths built from them. In the 1-jet chart
//   l+(j^1 f1, j^1 f0) = max(f1 - f0),  l- = min(f1 - f0),
//   d_spec = max(l+, -l-) = max |f1 - f0|,
// and the SCH length of a piecewise-linear path is the sum of the segment
// sup norms.

#include <cstddef>
#include <string>
#include <vector>

#include "jetflat/isotopy_path.hpp"
#include "jetflat/jet_model.hpp"

namespace jetflat {

inline constexpr double kAxiomTolerance = 1e-9;

struct SelectorReport {
    double ell_plus = 0.0;
    double ell_minus = 0.0;
    double d_spec = 0.0;
    bool plus_in_spectrum = false;
    bool minus_in_spectrum = false;
    std::vector<double> spectrum;
};

[[nodiscard]] SelectorReport selectors(const JetLegendrian& L1, const JetLegendrian& L0,
                                       const ScanOptions& opts = {}, double membership_tol = kAxiomTolerance);

/// d_spec without the spectrum (one sup-norm evaluation).
[[nodiscard]] double spectral_distance(const FourierFunction& f1, const FourierFunction& f0,
                                       const ScanOptions& opts = {});

/// Sum over segments of max |f_{k+1} - f_k|.
[[nodiscard]] double sch_length(const IsotopyPath& path, const ScanOptions& opts = {});

/// SCH distance between two Legendrians, realized by the straight path.
[[nodiscard]] double sch_distance(const FourierFunction& f1, const FourierFunction& f0,
                                  const ScanOptions& opts = {});

enum class Metric { Spec, Sch };

struct MetricLength {
    double value = 0.0;
    int depth = 0;
    bool converged = false;
};

inline constexpr int kMetricMaxDepth = 12;
inline constexpr double kMetricTolerance = 1e-9;

/// Partition sums of the chosen distance over the knot times united with the
/// dyadic points j / 2^depth, for depth = 0, 1, ... until two successive
/// sums differ by less than kMetricTolerance or the depth cap is reached.
[[nodiscard]] MetricLength metric_length(const IsotopyPath& path, Metric metric, const ScanOptions& opts = {});

struct HamiltonianBounds {
    double integral_min = 0.0;
    double ell_minus = 0.0;
    double ell_plus = 0.0;
    double integral_max = 0.0;
    std::vector<std::string> violations;
    [[nodiscard]] bool holds() const noexcept { return violations.empty(); }
};

/// integral min H <= l-(ends) <= l+(ends) <= integral max H.
[[nodiscard]] HamiltonianBounds hamiltonian_bounds_check(const IsotopyPath& path, const ScanOptions& opts = {},
                                                         double tol = kAxiomTolerance);

struct AxiomResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::vector<std::string> counterexamples;
    [[nodiscard]] bool passed() const noexcept { return failures == 0; }
};

struct AxiomReport {
    std::vector<AxiomResult> axioms;
    [[nodiscard]] bool all_passed() const noexcept;
    [[nodiscard]] const AxiomResult* find(const std::string& name) const;
};

/// Checks every selector property over all pairs and triples of the sample:
/// normalization, reeb_shift, monotonicity, triangle_plus, triangle_minus,
/// poincare_duality, compatibility, non_degeneracy, spectrality, flatness.
[[nodiscard]] AxiomReport axiom_suite(const std::vector<JetLegendrian>& sample, double tol = kAxiomTolerance,
                                      const ScanOptions& opts = {});

}  // namespace jetflat
