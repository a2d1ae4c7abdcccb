#include "jetflat/isotopy_path.hpp"

#include <algorithm>
#include <string>

#include "jetflat/errors.hpp"

namespace jetflat {

IsotopyPath::IsotopyPath(std::vector<FourierFunction> knots, std::vector<double> times)
    : knots_(std::move(knots)), times_(std::move(times)) {
    if (knots_.size() < 2) throw MalformedPath("a path needs at least two knots");
    if (times_.size() != knots_.size())
        throw MalformedPath("knot count " + std::to_string(knots_.size()) + " differs from time count " +
                            std::to_string(times_.size()));
    if (times_.front() != 0.0 || times_.back() != 1.0) throw MalformedPath("times must start at 0 and end at 1");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1])) throw MalformedPath("times must be strictly increasing");
    for (const auto& f : knots_)
        if (f.domain() != knots_.front().domain()) throw MalformedPath("knots live on different domains");
}

IsotopyPath IsotopyPath::uniform(std::vector<FourierFunction> knots) {
    const std::size_t n = knots.size();
    std::vector<double> times(n);
    for (std::size_t k = 0; k < n; ++k) times[k] = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
    if (n > 1) times.back() = 1.0;
    return IsotopyPath(std::move(knots), std::move(times));
}

IsotopyPath IsotopyPath::straight(const FourierFunction& from, const FourierFunction& to) {
    return IsotopyPath({from, to}, {0.0, 1.0});
}

FourierFunction IsotopyPath::segment(std::size_t k) const { return knots_.at(k + 1) - knots_.at(k); }

std::vector<FourierFunction> IsotopyPath::segments() const {
    std::vector<FourierFunction> out;
    out.reserve(segment_count());
    for (std::size_t k = 0; k < segment_count(); ++k) out.push_back(segment(k));
    return out;
}

FourierFunction IsotopyPath::at(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) return knots_.back();
    const auto k = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double s = (t - times_[k]) / (times_[k + 1] - times_[k]);
    if (s == 0.0) return knots_[k];
    return knots_[k] + s * segment(k);
}

IsotopyPath IsotopyPath::slice(std::size_t i, std::size_t j) const {
    if (!(i < j && j < knots_.size())) throw MalformedPath("bad slice bounds");
    std::vector<FourierFunction> k(knots_.begin() + static_cast<std::ptrdiff_t>(i),
                                   knots_.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    std::vector<double> t;
    const double a = times_[i], b = times_[j];
    for (std::size_t m = i; m <= j; ++m) t.push_back((times_[m] - a) / (b - a));
    t.front() = 0.0;
    t.back() = 1.0;
    return IsotopyPath(std::move(k), std::move(t));
}

IsotopyPath IsotopyPath::refined(int levels) const {
    IsotopyPath p = *this;
    for (int l = 0; l < levels; ++l) {
        std::vector<FourierFunction> k;
        std::vector<double> t;
        for (std::size_t m = 0; m + 1 < p.knots_.size(); ++m) {
            k.push_back(p.knots_[m]);
            t.push_back(p.times_[m]);
            k.push_back(p.knots_[m] + 0.5 * p.segment(m));
            t.push_back(0.5 * (p.times_[m] + p.times_[m + 1]));
        }
        k.push_back(p.knots_.back());
        t.push_back(1.0);
        p = IsotopyPath(std::move(k), std::move(t));
    }
    return p;
}

IsotopyPath IsotopyPath::then(const IsotopyPath& other) const {
    if (other.domain() != domain()) throw MalformedPath("cannot concatenate paths on different domains");
    if (!(other.front() == back())) throw MalformedPath("concatenated path does not start where this one ends");
    std::vector<FourierFunction> k = knots_;
    std::vector<double> t;
    for (double s : times_) t.push_back(0.5 * s);
    for (std::size_t m = 1; m < other.knots_.size(); ++m) {
        k.push_back(other.knots_[m]);
        t.push_back(0.5 + 0.5 * other.times_[m]);
    }
    t.back() = 1.0;
    return IsotopyPath(std::move(k), std::move(t));
}

}  // namespace jetflat
