#pragma once

// Smooth functions on the closed manifolds S^1 and T^2, stored as truncated
// Fourier series so that every derivative is exact.
//
// Circle, degree D:
//   f(q) = a0 + sum_{k=1..D} cos_k cos(2 pi k q) + sin_k sin(2 pi k q)
// Torus, degree D, indices j, k in 0..D:
//   f(q1,q2) = a0 + sum cc[j][k] cos(2 pi j q1) cos(2 pi k q2)
//                 + cs[j][k] cos(2 pi j q1) sin(2 pi k q2)
//                 + sc[j][k] sin(2 pi j q1) cos(2 pi k q2)
//                 + ss[j][k] sin(2 pi j q1) sin(2 pi k q2)
// Torus coefficients are kept normalized: cc[0][0] is folded into a0 and
// entries multiplying sin(0) are zero.

#include <array>
#include <compare>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace jetflat {

enum class Domain { Circle, Torus2 };

[[nodiscard]] constexpr int dimension(Domain d) noexcept { return d == Domain::Circle ? 1 : 2; }
[[nodiscard]] std::string_view to_string(Domain d) noexcept;

/// A point of S^1 (q2 unused) or T^2, coordinates of period 1.
struct Point {
    double q1 = 0.0;
    double q2 = 0.0;

    auto operator<=>(const Point&) const = default;
};

/// Reduce both coordinates into [0, 1).
[[nodiscard]] Point wrap(Point p) noexcept;

/// Distance on the flat unit circle/torus.
[[nodiscard]] double periodic_distance(Point a, Point b, Domain d) noexcept;

/// Value, gradient and Hessian (h11, h12, h22) at one point.
struct LocalJet {
    double value = 0.0;
    std::array<double, 2> grad{};
    std::array<double, 3> hess{};
};

class FourierFunction {
public:
    /// The zero function on the circle.
    FourierFunction();

    static FourierFunction constant(Domain domain, double c);
    static FourierFunction circle(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);
    /// Row-major (degree+1)^2 arrays indexed [j * (degree+1) + k].
    static FourierFunction torus(double a0, int degree, std::vector<double> cc, std::vector<double> cs,
                                 std::vector<double> sc, std::vector<double> ss);

    [[nodiscard]] Domain domain() const noexcept { return domain_; }
    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] double mean() const noexcept { return a0_; }
    [[nodiscard]] bool is_constant() const noexcept;

    [[nodiscard]] std::span<const double> cos_coefficients() const noexcept { return c_; }
    [[nodiscard]] std::span<const double> sin_coefficients() const noexcept { return s_; }
    [[nodiscard]] std::span<const double> cc() const noexcept { return cc_; }
    [[nodiscard]] std::span<const double> cs() const noexcept { return cs_; }
    [[nodiscard]] std::span<const double> sc() const noexcept { return sc_; }
    [[nodiscard]] std::span<const double> ss() const noexcept { return ss_; }

    [[nodiscard]] double operator()(double q) const;
    [[nodiscard]] double operator()(double q1, double q2) const;
    [[nodiscard]] double operator()(Point p) const;
    /// Throws DimensionMismatch when x.size() differs from the domain dimension.
    [[nodiscard]] double evaluate(std::span<const double> x) const;
    [[nodiscard]] LocalJet local_jet(Point p) const;

    /// d/dq on the circle, d/dq_{axis+1} on the torus.
    [[nodiscard]] FourierFunction partial(int axis = 0) const;
    [[nodiscard]] FourierFunction derivative() const { return partial(0); }

    /// x -> f(x - shift).
    [[nodiscard]] FourierFunction translated(Point shift) const;
    [[nodiscard]] FourierFunction padded(int degree) const;

    /// Flat coefficient layout: [a0, cos..., sin...] or [a0, cc, cs, sc, ss].
    [[nodiscard]] std::vector<double> coefficients() const;
    [[nodiscard]] FourierFunction with_coefficients(std::span<const double> flat) const;
    /// Gradient of p -> f(p) with respect to the flat coefficients.
    [[nodiscard]] std::vector<double> basis_at(Point p) const;
    [[nodiscard]] std::size_t coefficient_count() const noexcept;

    /// Values on the uniform grid i/n (circle) or (i/n, j/n) stored at i*n + j (torus).
    [[nodiscard]] std::vector<double> sample_grid(int n) const;

    /// sum |c| (2 pi |freq|)^order: an upper bound for the sup of any
    /// order-th derivative (Hessian norm on the torus for order 2).
    [[nodiscard]] double derivative_bound(int order) const noexcept;
    [[nodiscard]] double max_abs_coefficient() const noexcept;

    FourierFunction& operator+=(const FourierFunction& other);
    FourierFunction& operator-=(const FourierFunction& other);
    FourierFunction& operator*=(double s) noexcept;
    FourierFunction& operator+=(double c) noexcept;

    friend FourierFunction operator+(FourierFunction a, const FourierFunction& b) { return a += b; }
    friend FourierFunction operator-(FourierFunction a, const FourierFunction& b) { return a -= b; }
    friend FourierFunction operator*(double s, FourierFunction a) { return a *= s; }
    friend FourierFunction operator*(FourierFunction a, double s) { return a *= s; }
    friend FourierFunction operator+(FourierFunction a, double c) { return a += c; }
    friend FourierFunction operator-(FourierFunction a) { return a *= -1.0; }

    /// Exact coefficient equality after zero padding to a common degree.
    friend bool operator==(const FourierFunction& a, const FourierFunction& b);

private:
    void check_same_domain(const FourierFunction& other) const;

    Domain domain_ = Domain::Circle;
    int degree_ = 0;
    double a0_ = 0.0;
    std::vector<double> c_, s_;
    std::vector<double> cc_, cs_, sc_, ss_;
};

/// Grid resolutions and tolerances of the scan-and-refine algorithms.
struct ScanOptions {
    int circle_grid = 4096;
    int torus_grid = 256;
    double newton_residual = 1e-12;
    int newton_max_iter = 50;
    /// A refined critical point is kept only when |grad f| is below this.
    double point_tolerance = 1e-9;
    double cluster_tolerance = 1e-9;
    double plateau_fraction = 0.01;
    double degeneracy_tolerance = 1e-8;
    /// Extremum values closer than this count as ties (smallest point wins).
    double tie_tolerance = 1e-12;
};

enum class ExtremumMode { Max, Min };

struct Extremum {
    double value = 0.0;
    Point point;
};

[[nodiscard]] Extremum extremum(const FourierFunction& f, ExtremumMode mode, const ScanOptions& opts = {});

struct SupNorm {
    double value = 0.0;
    Point point;
    /// +1 when f(point) = value, -1 when f(point) = -value.
    int sign = 1;
};

/// max |f|, computed directly on |f| rather than through the extrema of f.
[[nodiscard]] SupNorm sup_norm(const FourierFunction& f, const ScanOptions& opts = {});

/// Refined local maxima of |f| whose value is within `slack` of the sup
/// norm, seeded from the grid scan only (no full critical-point search).
[[nodiscard]] std::vector<SupNorm> near_sup_points(const FourierFunction& f, double slack,
                                                   const ScanOptions& opts = {});

struct CriticalSet {
    std::vector<Point> points;
    std::vector<double> values;
    double tolerance = 0.0;
    /// Set when a positive fraction of the scan is flat; the plateau value
    /// is reported once.
    bool plateau = false;
};

[[nodiscard]] CriticalSet critical_set(const FourierFunction& f, const ScanOptions& opts = {});
[[nodiscard]] bool is_morse(const FourierFunction& f, const ScanOptions& opts = {});

/// Points where |f| is within `slack` of its sup norm: refined critical
/// points plus the sup_norm point, sorted and deduplicated.
[[nodiscard]] std::vector<Point> sup_attaining_points(const FourierFunction& f, double slack,
                                                      const ScanOptions& opts = {});

/// Sort and merge values whose consecutive gaps are <= tol.
[[nodiscard]] std::vector<double> cluster_values(std::vector<double> values, double tol);

/// Coefficients uniform in [-amplitude, amplitude] damped by 1/(1 + |freq|^2).
[[nodiscard]] FourierFunction random_fourier(Domain domain, int degree, std::mt19937_64& rng,
                                             double amplitude = 1.0);

}  // namespace jetflat
