#pragma once

// Piecewise-linear isotopies t -> j^1 f_t. Knots are interpolated linearly in
// coefficient space, so the Hamiltonian is constant on each segment and
// equals (f_{k+1} - f_k) / (t_{k+1} - t_k).

#include <cstddef>
#include <vector>

#include "jetflat/manifold_fn.hpp"

namespace jetflat {

class IsotopyPath {
public:
    /// Throws MalformedPath unless there are >= 2 knots, times has the same
    /// length, starts at 0, ends at 1 and is strictly increasing, and every
    /// knot lives on one domain.
    IsotopyPath(std::vector<FourierFunction> knots, std::vector<double> times);

    /// Knots at t_k = k / (K - 1).
    [[nodiscard]] static IsotopyPath uniform(std::vector<FourierFunction> knots);
    [[nodiscard]] static IsotopyPath straight(const FourierFunction& from, const FourierFunction& to);

    [[nodiscard]] const std::vector<FourierFunction>& knots() const noexcept { return knots_; }
    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
    [[nodiscard]] std::size_t knot_count() const noexcept { return knots_.size(); }
    [[nodiscard]] std::size_t segment_count() const noexcept { return knots_.size() - 1; }
    [[nodiscard]] Domain domain() const noexcept { return knots_.front().domain(); }
    [[nodiscard]] const FourierFunction& front() const noexcept { return knots_.front(); }
    [[nodiscard]] const FourierFunction& back() const noexcept { return knots_.back(); }

    /// f_{k+1} - f_k.
    [[nodiscard]] FourierFunction segment(std::size_t k) const;
    [[nodiscard]] std::vector<FourierFunction> segments() const;

    /// f_t for t in [0, 1].
    [[nodiscard]] FourierFunction at(double t) const;

    /// Sub-path between knot indices i < j, times rescaled to [0, 1].
    [[nodiscard]] IsotopyPath slice(std::size_t i, std::size_t j) const;

    /// Inserts the interpolated knot at every midpoint of every segment,
    /// `levels` times over.
    [[nodiscard]] IsotopyPath refined(int levels = 1) const;

    /// this followed by other (other must start where this ends); each half
    /// is squeezed into [0, 1/2] and [1/2, 1].
    [[nodiscard]] IsotopyPath then(const IsotopyPath& other) const;

private:
    std::vector<FourierFunction> knots_;
    std::vector<double> times_;
};

}  // namespace jetflat
