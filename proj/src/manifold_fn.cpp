#include "jetflat/manifold_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "jetflat/errors.hpp"

namespace jetflat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct TrigTable {
    std::vector<double> c;
    std::vector<double> s;
};

// cos/sin(2 pi m / n) for m in [0, n); multiples of a grid angle are looked
// up by index (k * i mod n) so grid scans need no trig calls.
const TrigTable& trig_table(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<TrigTable>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<TrigTable>();
        slot->c.resize(static_cast<std::size_t>(n));
        slot->s.resize(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) {
            const double a = kTwoPi * static_cast<double>(m) / static_cast<double>(n);
            slot->c[static_cast<std::size_t>(m)] = std::cos(a);
            slot->s[static_cast<std::size_t>(m)] = std::sin(a);
        }
    }
    return *slot;
}

void multiples(double q, int degree, std::vector<double>& c, std::vector<double>& s) {
    c.resize(static_cast<std::size_t>(degree + 1));
    s.resize(static_cast<std::size_t>(degree + 1));
    for (int k = 0; k <= degree; ++k) {
        const double a = kTwoPi * static_cast<double>(k) * q;
        c[static_cast<std::size_t>(k)] = std::cos(a);
        s[static_cast<std::size_t>(k)] = std::sin(a);
    }
}

double wrap1(double q) noexcept {
    double r = q - std::floor(q);
    if (r >= 1.0) r = 0.0;
    return r;
}

std::size_t idx(int j, int k, int degree) {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(degree + 1) + static_cast<std::size_t>(k);
}

void normalize_torus(double& a0, int degree, std::vector<double>& cc, std::vector<double>& cs,
                     std::vector<double>& sc, std::vector<double>& ss) {
    a0 += cc[0];
    cc[0] = 0.0;
    for (int j = 0; j <= degree; ++j) {
        cs[idx(j, 0, degree)] = 0.0;
        ss[idx(j, 0, degree)] = 0.0;
        sc[idx(0, j, degree)] = 0.0;
        ss[idx(0, j, degree)] = 0.0;
    }
}

std::vector<double> pad_matrix(const std::vector<double>& m, int from, int to) {
    std::vector<double> out(static_cast<std::size_t>((to + 1) * (to + 1)), 0.0);
    for (int j = 0; j <= from; ++j)
        for (int k = 0; k <= from; ++k) out[idx(j, k, to)] = m[idx(j, k, from)];
    return out;
}

}  // namespace

std::string_view to_string(Domain d) noexcept { return d == Domain::Circle ? "S1" : "T2"; }

Point wrap(Point p) noexcept { return {wrap1(p.q1), wrap1(p.q2)}; }

double periodic_distance(Point a, Point b, Domain d) noexcept {
    auto axis = [](double x, double y) {
        double t = std::abs(wrap1(x) - wrap1(y));
        return std::min(t, 1.0 - t);
    };
    const double d1 = axis(a.q1, b.q1);
    if (d == Domain::Circle) return d1;
    return std::hypot(d1, axis(a.q2, b.q2));
}

// ---------------------------------------------------------------------------
// FourierFunction
// ---------------------------------------------------------------------------

FourierFunction::FourierFunction() = default;

FourierFunction FourierFunction::constant(Domain domain, double c) {
    FourierFunction f;
    f.domain_ = domain;
    f.a0_ = c;
    if (domain == Domain::Torus2) f.cc_ = f.cs_ = f.sc_ = f.ss_ = std::vector<double>(1, 0.0);
    return f;
}

FourierFunction FourierFunction::circle(double a0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
    FourierFunction f;
    f.domain_ = Domain::Circle;
    f.a0_ = a0;
    const std::size_t d = std::max(cos_coeffs.size(), sin_coeffs.size());
    cos_coeffs.resize(d, 0.0);
    sin_coeffs.resize(d, 0.0);
    f.degree_ = static_cast<int>(d);
    f.c_ = std::move(cos_coeffs);
    f.s_ = std::move(sin_coeffs);
    return f;
}

FourierFunction FourierFunction::torus(double a0, int degree, std::vector<double> cc, std::vector<double> cs,
                                       std::vector<double> sc, std::vector<double> ss) {
    if (degree < 0) throw Error("torus degree must be non-negative");
    const auto n = static_cast<std::size_t>((degree + 1) * (degree + 1));
    for (auto* m : {&cc, &cs, &sc, &ss}) {
        if (m->empty()) m->assign(n, 0.0);
        if (m->size() != n) throw Error("torus coefficient array has wrong size");
    }
    FourierFunction f;
    f.domain_ = Domain::Torus2;
    f.degree_ = degree;
    f.a0_ = a0;
    normalize_torus(f.a0_, degree, cc, cs, sc, ss);
    f.cc_ = std::move(cc);
    f.cs_ = std::move(cs);
    f.sc_ = std::move(sc);
    f.ss_ = std::move(ss);
    return f;
}

bool FourierFunction::is_constant() const noexcept {
    auto zero = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    };
    return zero(c_) && zero(s_) && zero(cc_) && zero(cs_) && zero(sc_) && zero(ss_);
}

double FourierFunction::operator()(double q) const {
    if (domain_ != Domain::Circle) throw DimensionMismatch("torus function evaluated at a 1-D point");
    return (*this)(Point{q, 0.0});
}

double FourierFunction::operator()(double q1, double q2) const {
    if (domain_ != Domain::Torus2) throw DimensionMismatch("circle function evaluated at a 2-D point");
    return (*this)(Point{q1, q2});
}

double FourierFunction::operator()(Point p) const {
    p = wrap(p);
    thread_local std::vector<double> c1, s1, c2, s2;
    multiples(p.q1, degree_, c1, s1);
    if (domain_ == Domain::Circle) {
        double v = a0_;
        for (int k = 1; k <= degree_; ++k) {
            const auto u = static_cast<std::size_t>(k);
            v += c_[u - 1] * c1[u] + s_[u - 1] * s1[u];
        }
        return v;
    }
    multiples(p.q2, degree_, c2, s2);
    double v = a0_;
    for (int j = 0; j <= degree_; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        for (int k = 0; k <= degree_; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            const auto i = idx(j, k, degree_);
            v += c1[uj] * (cc_[i] * c2[uk] + cs_[i] * s2[uk]) + s1[uj] * (sc_[i] * c2[uk] + ss_[i] * s2[uk]);
        }
    }
    return v;
}

double FourierFunction::evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension(domain_))
        throw DimensionMismatch("point has " + std::to_string(x.size()) + " coordinates, domain " +
                                std::string(to_string(domain_)) + " needs " + std::to_string(dimension(domain_)));
    return domain_ == Domain::Circle ? (*this)(Point{x[0], 0.0}) : (*this)(Point{x[0], x[1]});
}

LocalJet FourierFunction::local_jet(Point p) const {
    p = wrap(p);
    thread_local std::vector<double> c1, s1, c2, s2;
    multiples(p.q1, degree_, c1, s1);
    LocalJet jet;
    jet.value = a0_;
    if (domain_ == Domain::Circle) {
        for (int k = 1; k <= degree_; ++k) {
            const auto u = static_cast<std::size_t>(k);
            const double w = kTwoPi * k;
            const double a = c_[u - 1], b = s_[u - 1];
            jet.value += a * c1[u] + b * s1[u];
            jet.grad[0] += w * (b * c1[u] - a * s1[u]);
            jet.hess[0] -= w * w * (a * c1[u] + b * s1[u]);
        }
        return jet;
    }
    multiples(p.q2, degree_, c2, s2);
    for (int j = 0; j <= degree_; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double wj = kTwoPi * j;
        for (int k = 0; k <= degree_; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            const double wk = kTwoPi * k;
            const auto i = idx(j, k, degree_);
            const double cjck = c1[uj] * c2[uk], cjsk = c1[uj] * s2[uk];
            const double sjck = s1[uj] * c2[uk], sjsk = s1[uj] * s2[uk];
            const double term = cc_[i] * cjck + cs_[i] * cjsk + sc_[i] * sjck + ss_[i] * sjsk;
            jet.value += term;
            jet.grad[0] += wj * (-cc_[i] * sjck - cs_[i] * sjsk + sc_[i] * cjck + ss_[i] * cjsk);
            jet.grad[1] += wk * (-cc_[i] * cjsk + cs_[i] * cjck - sc_[i] * sjsk + ss_[i] * sjck);
            jet.hess[0] -= wj * wj * term;
            jet.hess[1] += wj * wk * (cc_[i] * sjsk - cs_[i] * sjck - sc_[i] * cjsk + ss_[i] * cjck);
            jet.hess[2] -= wk * wk * term;
        }
    }
    return jet;
}

FourierFunction FourierFunction::partial(int axis) const {
    if (axis < 0 || axis >= dimension(domain_)) throw DimensionMismatch("partial derivative axis out of range");
    FourierFunction d = *this;
    d.a0_ = 0.0;
    if (domain_ == Domain::Circle) {
        for (int k = 1; k <= degree_; ++k) {
            const auto u = static_cast<std::size_t>(k - 1);
            const double w = kTwoPi * k;
            d.c_[u] = w * s_[u];
            d.s_[u] = -w * c_[u];
        }
        return d;
    }
    for (int j = 0; j <= degree_; ++j) {
        for (int k = 0; k <= degree_; ++k) {
            const auto i = idx(j, k, degree_);
            if (axis == 0) {
                const double w = kTwoPi * j;
                d.cc_[i] = w * sc_[i];
                d.cs_[i] = w * ss_[i];
                d.sc_[i] = -w * cc_[i];
                d.ss_[i] = -w * cs_[i];
            } else {
                const double w = kTwoPi * k;
                d.cc_[i] = w * cs_[i];
                d.cs_[i] = -w * cc_[i];
                d.sc_[i] = w * ss_[i];
                d.ss_[i] = -w * sc_[i];
            }
        }
    }
    normalize_torus(d.a0_, degree_, d.cc_, d.cs_, d.sc_, d.ss_);
    return d;
}

FourierFunction FourierFunction::translated(Point shift) const {
    FourierFunction g = *this;
    if (domain_ == Domain::Circle) {
        for (int k = 1; k <= degree_; ++k) {
            const auto u = static_cast<std::size_t>(k - 1);
            const double th = kTwoPi * k * shift.q1;
            const double ct = std::cos(th), st = std::sin(th);
            g.c_[u] = c_[u] * ct - s_[u] * st;
            g.s_[u] = c_[u] * st + s_[u] * ct;
        }
        return g;
    }
    // rotate (cos, sin) pairs along q1, then along q2
    for (int j = 0; j <= degree_; ++j) {
        const double th = kTwoPi * j * shift.q1;
        const double ct = std::cos(th), st = std::sin(th);
        for (int k = 0; k <= degree_; ++k) {
            const auto i = idx(j, k, degree_);
            const double a = g.cc_[i], b = g.sc_[i], c = g.cs_[i], e = g.ss_[i];
            g.cc_[i] = a * ct - b * st;
            g.sc_[i] = a * st + b * ct;
            g.cs_[i] = c * ct - e * st;
            g.ss_[i] = c * st + e * ct;
        }
    }
    for (int k = 0; k <= degree_; ++k) {
        const double th = kTwoPi * k * shift.q2;
        const double ct = std::cos(th), st = std::sin(th);
        for (int j = 0; j <= degree_; ++j) {
            const auto i = idx(j, k, degree_);
            const double a = g.cc_[i], b = g.cs_[i], c = g.sc_[i], e = g.ss_[i];
            g.cc_[i] = a * ct - b * st;
            g.cs_[i] = a * st + b * ct;
            g.sc_[i] = c * ct - e * st;
            g.ss_[i] = c * st + e * ct;
        }
    }
    normalize_torus(g.a0_, degree_, g.cc_, g.cs_, g.sc_, g.ss_);
    return g;
}

FourierFunction FourierFunction::padded(int degree) const {
    if (degree <= degree_) return *this;
    FourierFunction g = *this;
    g.degree_ = degree;
    if (domain_ == Domain::Circle) {
        g.c_.resize(static_cast<std::size_t>(degree), 0.0);
        g.s_.resize(static_cast<std::size_t>(degree), 0.0);
    } else {
        g.cc_ = pad_matrix(cc_, degree_, degree);
        g.cs_ = pad_matrix(cs_, degree_, degree);
        g.sc_ = pad_matrix(sc_, degree_, degree);
        g.ss_ = pad_matrix(ss_, degree_, degree);
    }
    return g;
}

std::size_t FourierFunction::coefficient_count() const noexcept {
    if (domain_ == Domain::Circle) return 1 + 2 * static_cast<std::size_t>(degree_);
    return 1 + 4 * static_cast<std::size_t>((degree_ + 1) * (degree_ + 1));
}

std::vector<double> FourierFunction::coefficients() const {
    std::vector<double> out;
    out.reserve(coefficient_count());
    out.push_back(a0_);
    for (const auto* v : {&c_, &s_, &cc_, &cs_, &sc_, &ss_}) out.insert(out.end(), v->begin(), v->end());
    return out;
}

FourierFunction FourierFunction::with_coefficients(std::span<const double> flat) const {
    if (flat.size() != coefficient_count()) throw Error("coefficient vector has wrong length");
    FourierFunction g = *this;
    g.a0_ = flat[0];
    std::size_t pos = 1;
    for (auto* v : {&g.c_, &g.s_, &g.cc_, &g.cs_, &g.sc_, &g.ss_}) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), v->size(), v->begin());
        pos += v->size();
    }
    if (domain_ == Domain::Torus2) normalize_torus(g.a0_, degree_, g.cc_, g.cs_, g.sc_, g.ss_);
    return g;
}

std::vector<double> FourierFunction::basis_at(Point p) const {
    p = wrap(p);
    std::vector<double> c1, s1, c2, s2;
    multiples(p.q1, degree_, c1, s1);
    std::vector<double> out;
    out.reserve(coefficient_count());
    out.push_back(1.0);
    if (domain_ == Domain::Circle) {
        out.insert(out.end(), c1.begin() + 1, c1.end());
        out.insert(out.end(), s1.begin() + 1, s1.end());
        return out;
    }
    multiples(p.q2, degree_, c2, s2);
    const std::vector<double>* rows[4][2] = {{&c1, &c2}, {&c1, &s2}, {&s1, &c2}, {&s1, &s2}};
    for (auto& rc : rows) {
        for (int j = 0; j <= degree_; ++j)
            for (int k = 0; k <= degree_; ++k)
                out.push_back((*rc[0])[static_cast<std::size_t>(j)] * (*rc[1])[static_cast<std::size_t>(k)]);
    }
    out[1] = 0.0;  // cc[0][0] is folded into a0
    return out;
}

std::vector<double> FourierFunction::sample_grid(int n) const {
    if (n <= 0) throw Error("grid size must be positive");
    const TrigTable& t = trig_table(n);
    const auto un = static_cast<std::uint64_t>(n);
    if (domain_ == Domain::Circle) {
        std::vector<double> out(static_cast<std::size_t>(n), a0_);
        for (int k = 1; k <= degree_; ++k) {
            const double a = c_[static_cast<std::size_t>(k - 1)], b = s_[static_cast<std::size_t>(k - 1)];
            if (a == 0.0 && b == 0.0) continue;
            const auto un = static_cast<std::size_t>(n);
            const auto step = static_cast<std::size_t>(k) % un;
            if ((un & (un - 1)) == 0) {
                const std::size_t mask = un - 1;
                for (std::size_t i = 0; i < un; ++i) {
                    const std::size_t m = (i * step) & mask;
                    out[i] += a * t.c[m] + b * t.s[m];
                }
                continue;
            }
            std::size_t m = 0;
            for (auto& v : out) {
                v += a * t.c[m] + b * t.s[m];
                m += step;
                if (m >= un) m -= un;
            }
        }
        return out;
    }
    const auto d1 = static_cast<std::size_t>(degree_ + 1);
    std::vector<double> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    std::vector<double> wc(d1), ws(d1);
    std::vector<std::size_t> mods(d1);
    for (int i = 0; i < n; ++i) {
        // collapse the q1 dependence: f = sum_k wc[k] cos(2 pi k q2) + ws[k] sin(2 pi k q2)
        for (int k = 0; k <= degree_; ++k) {
            double a = 0.0, b = 0.0;
            for (int j = 0; j <= degree_; ++j) {
                const auto m = static_cast<std::size_t>((static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(i)) % un);
                const auto e = idx(j, k, degree_);
                a += cc_[e] * t.c[m] + sc_[e] * t.s[m];
                b += cs_[e] * t.c[m] + ss_[e] * t.s[m];
            }
            wc[static_cast<std::size_t>(k)] = a;
            ws[static_cast<std::size_t>(k)] = b;
        }
        double* row = out.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(n);
        std::fill(row, row + n, a0_);
        for (int k = 0; k <= degree_; ++k) {
            const double a = wc[static_cast<std::size_t>(k)], b = ws[static_cast<std::size_t>(k)];
            if (a == 0.0 && b == 0.0) continue;
            const auto step = static_cast<std::size_t>(k) % static_cast<std::size_t>(n);
            std::size_t m = 0;
            for (int jj = 0; jj < n; ++jj) {
                row[jj] += a * t.c[m] + b * t.s[m];
                m += step;
                if (m >= static_cast<std::size_t>(n)) m -= static_cast<std::size_t>(n);
            }
        }
    }
    return out;
}

double FourierFunction::derivative_bound(int order) const noexcept {
    double total = order == 0 ? std::abs(a0_) : 0.0;
    if (domain_ == Domain::Circle) {
        for (int k = 1; k <= degree_; ++k) {
            const auto u = static_cast<std::size_t>(k - 1);
            total += (std::abs(c_[u]) + std::abs(s_[u])) * std::pow(kTwoPi * k, order);
        }
        return total;
    }
    for (int j = 0; j <= degree_; ++j) {
        for (int k = 0; k <= degree_; ++k) {
            const auto i = idx(j, k, degree_);
            const double mag = std::abs(cc_[i]) + std::abs(cs_[i]) + std::abs(sc_[i]) + std::abs(ss_[i]);
            total += mag * std::pow(kTwoPi * std::sqrt(static_cast<double>(j * j + k * k)), order);
        }
    }
    return total;
}

double FourierFunction::max_abs_coefficient() const noexcept {
    double m = std::abs(a0_);
    for (const auto* v : {&c_, &s_, &cc_, &cs_, &sc_, &ss_})
        for (double x : *v) m = std::max(m, std::abs(x));
    return m;
}

void FourierFunction::check_same_domain(const FourierFunction& other) const {
    if (domain_ != other.domain_)
        throw DomainMismatch("cannot combine functions on " + std::string(to_string(domain_)) + " and " +
                             std::string(to_string(other.domain_)));
}

FourierFunction& FourierFunction::operator+=(const FourierFunction& other) {
    check_same_domain(other);
    if (other.degree_ > degree_) *this = padded(other.degree_);
    const FourierFunction& o = other.degree_ < degree_ ? other.padded(degree_) : other;
    a0_ += o.a0_;
    auto add = [](std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    add(c_, o.c_);
    add(s_, o.s_);
    add(cc_, o.cc_);
    add(cs_, o.cs_);
    add(sc_, o.sc_);
    add(ss_, o.ss_);
    return *this;
}

FourierFunction& FourierFunction::operator-=(const FourierFunction& other) {
    check_same_domain(other);
    if (other.degree_ > degree_) *this = padded(other.degree_);
    const FourierFunction& o = other.degree_ < degree_ ? other.padded(degree_) : other;
    a0_ -= o.a0_;
    auto sub = [](std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    };
    sub(c_, o.c_);
    sub(s_, o.s_);
    sub(cc_, o.cc_);
    sub(cs_, o.cs_);
    sub(sc_, o.sc_);
    sub(ss_, o.ss_);
    return *this;
}

FourierFunction& FourierFunction::operator*=(double s) noexcept {
    a0_ *= s;
    for (auto* v : {&c_, &s_, &cc_, &cs_, &sc_, &ss_})
        for (double& x : *v) x *= s;
    return *this;
}

FourierFunction& FourierFunction::operator+=(double c) noexcept {
    a0_ += c;
    return *this;
}

bool operator==(const FourierFunction& a, const FourierFunction& b) {
    if (a.domain_ != b.domain_) return false;
    const int d = std::max(a.degree_, b.degree_);
    const FourierFunction pa = a.padded(d), pb = b.padded(d);
    return pa.a0_ == pb.a0_ && pa.c_ == pb.c_ && pa.s_ == pb.s_ && pa.cc_ == pb.cc_ && pa.cs_ == pb.cs_ &&
           pa.sc_ == pb.sc_ && pa.ss_ == pb.ss_;
}

// ---------------------------------------------------------------------------
// Extrema and critical points
// ---------------------------------------------------------------------------

namespace {

struct Candidate {
    double value;
    Point point;
};

// Pick the largest value; among values within tie_tol of it, the smallest point.
Candidate select_best(std::vector<Candidate> cands, double tie_tol) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : cands) best = std::max(best, c.value);
    Candidate out{best, Point{2.0, 2.0}};
    for (const auto& c : cands)
        if (c.value >= best - tie_tol && c.point < out.point) out.point = c.point;
    return out;
}

// Newton ascent on sign*f from a grid seed, confined to two grid cells around it.
Point newton_ascent(const FourierFunction& f, double sign, Point seed, double h, const ScanOptions& o) {
    Point p = seed;
    const bool torus = f.domain() == Domain::Torus2;
    for (int it = 0; it < o.newton_max_iter; ++it) {
        const LocalJet j = f.local_jet(p);
        const double g1 = sign * j.grad[0], g2 = sign * j.grad[1];
        if (std::hypot(g1, g2) <= o.newton_residual) break;
        const double h11 = sign * j.hess[0], h12 = sign * j.hess[1], h22 = sign * j.hess[2];
        double s1 = 0.0, s2 = 0.0;
        if (!torus) {
            if (h11 >= 0.0) break;
            s1 = -g1 / h11;
        } else {
            const double det = h11 * h22 - h12 * h12;
            if (h11 >= 0.0 || det <= 0.0) break;
            s1 = -(h22 * g1 - h12 * g2) / det;
            s2 = -(-h12 * g1 + h11 * g2) / det;
        }
        const double len = std::hypot(s1, s2);
        if (len > h) {
            s1 *= h / len;
            s2 *= h / len;
        }
        p.q1 += s1;
        p.q2 += s2;
        if (periodic_distance(p, seed, f.domain()) > 2.0 * h) return seed;
        if (len < 1e-17) break;
    }
    return p;
}

// Safeguarded Newton for a root of g on [lo, hi] with g(lo) * g(hi) < 0.
template <class G>  // G: double -> std::pair<double, double> (value, derivative)
double bracketed_root(G&& g, double lo, double hi, const ScanOptions& o) {
    double glo = g(lo).first;
    if (glo > 0.0) {
        std::swap(lo, hi);
        glo = g(lo).first;
    }
    // now g(lo) < 0 < g(hi) (lo may exceed hi)
    double x = 0.5 * (lo + hi);
    double dx_old = std::abs(hi - lo), dx = dx_old;
    auto [gx, dgx] = g(x);
    for (int it = 0; it < 100; ++it) {
        if (std::abs(gx) <= o.newton_residual) break;
        const bool newton_out = ((x - hi) * dgx - gx) * ((x - lo) * dgx - gx) > 0.0;
        const bool newton_slow = std::abs(2.0 * gx) > std::abs(dx_old * dgx);
        dx_old = dx;
        if (newton_out || newton_slow || dgx == 0.0) {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx = gx / dgx;
            x -= dx;
        }
        if (std::abs(dx) < 1e-17) break;
        std::tie(gx, dgx) = g(x);
        if (gx < 0.0)
            lo = x;
        else
            hi = x;
    }
    return x;
}

double grid_margin(const FourierFunction& f, double h) {
    const double m2 = f.derivative_bound(2);
    const double geometric = f.domain() == Domain::Circle ? h * h / 8.0 : h * h / 4.0;
    return 1.01 * m2 * geometric + 64.0 * std::numeric_limits<double>::epsilon() * f.derivative_bound(0);
}

template <class Pred>
std::vector<std::size_t> discrete_local_maxima(const std::vector<double>& v, Domain d, int n, Pred keep) {
    std::vector<std::size_t> out;
    if (d == Domain::Circle) {
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const double x = v[ui];
            const double prev = v[static_cast<std::size_t>((i + n - 1) % n)];
            const double next = v[static_cast<std::size_t>((i + 1) % n)];
            // strict on the left side so flat runs yield a single seed
            if (x > prev && x >= next && keep(x)) out.push_back(ui);
        }
        if (out.empty()) {
            const auto it = std::max_element(v.begin(), v.end());
            out.push_back(static_cast<std::size_t>(it - v.begin()));
        }
        return out;
    }
    const auto un = static_cast<std::size_t>(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = v[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)];
            if (!keep(x)) continue;
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const auto ni = static_cast<std::size_t>((i + di + n) % n);
                    const auto nj = static_cast<std::size_t>((j + dj + n) % n);
                    const double y = v[ni * un + nj];
                    // lexicographic tie-break among equal neighbours
                    const bool before = di < 0 || (di == 0 && dj < 0);
                    if (y > x || (y == x && before)) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) out.push_back(static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j));
        }
    }
    if (out.empty()) {
        const auto it = std::max_element(v.begin(), v.end());
        out.push_back(static_cast<std::size_t>(it - v.begin()));
    }
    return out;
}

Point grid_point(std::size_t index, Domain d, int n) {
    const double h = 1.0 / n;
    if (d == Domain::Circle) return {static_cast<double>(index) * h, 0.0};
    const auto un = static_cast<std::size_t>(n);
    return {static_cast<double>(index / un) * h, static_cast<double>(index % un) * h};
}

int grid_size(const FourierFunction& f, const ScanOptions& o) {
    return f.domain() == Domain::Circle ? o.circle_grid : o.torus_grid;
}

Extremum maximize(const FourierFunction& f, const ScanOptions& o) {
    if (f.is_constant()) return {f.mean(), Point{}};
    const int n = grid_size(f, o);
    const double h = 1.0 / n;
    const std::vector<double> vals = f.sample_grid(n);
    const double gmax = *std::max_element(vals.begin(), vals.end());
    const double floor = gmax - grid_margin(f, h);
    const auto seeds = discrete_local_maxima(vals, f.domain(), n, [&](double x) { return x >= floor; });
    std::vector<Candidate> cands;
    cands.reserve(seeds.size());
    for (std::size_t s : seeds) {
        const Point seed = grid_point(s, f.domain(), n);
        const Point p = wrap(newton_ascent(f, 1.0, seed, h, o));
        const double v = f(p);
        cands.push_back(v >= vals[s] ? Candidate{v, p} : Candidate{vals[s], seed});
    }
    const Candidate best = select_best(std::move(cands), o.tie_tolerance);
    return {best.value, best.point};
}

}  // namespace

Extremum extremum(const FourierFunction& f, ExtremumMode mode, const ScanOptions& opts) {
    if (mode == ExtremumMode::Max) return maximize(f, opts);
    const Extremum e = maximize(-f, opts);
    return {-e.value, e.point};
}

namespace {

// Refined local maxima of |f| seeded from grid points within `slack` (plus
// the grid error margin) of the grid max.
std::vector<SupNorm> sup_candidates(const FourierFunction& f, double slack, const ScanOptions& o) {
    if (f.is_constant()) return {{std::abs(f.mean()), Point{}, f.mean() < 0.0 ? -1 : 1}};
    const int n = grid_size(f, o);
    const double h = 1.0 / n;
    const std::vector<double> vals = f.sample_grid(n);
    std::vector<double> mags(vals.size());
    std::transform(vals.begin(), vals.end(), mags.begin(), [](double x) { return std::abs(x); });
    const double gmax = *std::max_element(mags.begin(), mags.end());
    const double floor = gmax - grid_margin(f, h) - slack;
    const auto seeds = discrete_local_maxima(mags, f.domain(), n, [&](double x) { return x >= floor; });

    std::vector<Candidate> cands;
    std::vector<int> signs;
    for (std::size_t s : seeds) {
        const Point seed = grid_point(s, f.domain(), n);
        const double sign = vals[s] < 0.0 ? -1.0 : 1.0;
        Point p = seed;
        if (f.domain() == Domain::Circle) {
            // root of f' between the neighbouring grid points when it changes sign there
            auto g = [&](double q) {
                const LocalJet j = f.local_jet({q, 0.0});
                return std::pair{j.grad[0], j.hess[0]};
            };
            const double lo = seed.q1 - h, hi = seed.q1 + h;
            const double glo = sign * g(lo).first, ghi = sign * g(hi).first;
            if (glo > 0.0 && ghi < 0.0)
                p = {bracketed_root(g, lo, hi, o), 0.0};
            else
                p = newton_ascent(f, sign, seed, h, o);
        } else {
            p = newton_ascent(f, sign, seed, h, o);
        }
        p = wrap(p);
        const double v = std::abs(f(p));
        if (v >= mags[s]) {
            cands.push_back({v, p});
            signs.push_back(f(p) < 0.0 ? -1 : 1);
        } else {
            cands.push_back({mags[s], seed});
            signs.push_back(static_cast<int>(sign));
        }
    }
    std::vector<SupNorm> out;
    for (std::size_t i = 0; i < cands.size(); ++i) out.push_back({cands[i].value, cands[i].point, signs[i]});
    return out;
}

}  // namespace

SupNorm sup_norm(const FourierFunction& f, const ScanOptions& o) {
    const std::vector<SupNorm> all = sup_candidates(f, 0.0, o);
    std::vector<Candidate> cands;
    for (const auto& c : all) cands.push_back({c.value, c.point});
    const Candidate best = select_best(cands, o.tie_tolerance);
    int sign = 1;
    for (const auto& c : all)
        if (c.point == best.point) sign = c.sign;
    return {best.value, best.point, sign};
}

std::vector<SupNorm> near_sup_points(const FourierFunction& f, double slack, const ScanOptions& o) {
    std::vector<SupNorm> all = sup_candidates(f, slack, o);
    double best = 0.0;
    for (const auto& c : all) best = std::max(best, c.value);
    std::vector<SupNorm> out;
    for (const auto& c : all) {
        if (c.value < best - slack) continue;
        bool dup = false;
        for (const auto& d : out) dup = dup || periodic_distance(c.point, d.point, f.domain()) <= 1e-10;
        if (!dup) out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const SupNorm& x, const SupNorm& y) { return x.point < y.point; });
    return out;
}

std::vector<double> cluster_values(std::vector<double> values, double tol) {
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= values.size(); ++i) {
        if (i == values.size() || values[i] - values[i - 1] > tol) {
            if (i > start) {
                double sum = 0.0;
                for (std::size_t k = start; k < i; ++k) sum += values[k];
                out.push_back(sum / static_cast<double>(i - start));
            }
            start = i;
        }
    }
    return out;
}

namespace {

void add_unique(std::vector<Point>& pts, Point p, Domain d, double sep) {
    for (const Point& q : pts)
        if (periodic_distance(p, q, d) < sep) return;
    pts.push_back(p);
}

// One representative scan point per distinct value among flat scan points.
void add_plateau_representatives(const FourierFunction& f, const std::vector<std::size_t>& flat, int n,
                                 double tol, std::vector<Point>& pts) {
    std::vector<std::pair<double, Point>> vp;
    vp.reserve(flat.size());
    for (std::size_t i : flat) {
        const Point p = grid_point(i, f.domain(), n);
        vp.emplace_back(f(p), p);
    }
    std::sort(vp.begin(), vp.end());
    for (std::size_t i = 0; i < vp.size(); ++i)
        if (i == 0 || vp[i].first - vp[i - 1].first > tol) pts.push_back(vp[i].second);
}

CriticalSet circle_critical_set(const FourierFunction& f, const ScanOptions& o) {
    CriticalSet out;
    out.tolerance = o.cluster_tolerance;
    const int n = o.circle_grid;
    const double h = 1.0 / n;
    const FourierFunction df = f.derivative();
    const FourierFunction d2f = df.derivative();
    const std::vector<double> dv = df.sample_grid(n);

    std::vector<std::size_t> flat;
    for (std::size_t i = 0; i < dv.size(); ++i)
        if (std::abs(dv[i]) < o.point_tolerance) flat.push_back(i);
    out.plateau = static_cast<double>(flat.size()) > o.plateau_fraction * n;

    std::vector<Point> pts;
    auto accept = [&](double q) {
        q = wrap1(q);
        if (std::abs(df(q)) <= o.point_tolerance) add_unique(pts, {q, 0.0}, Domain::Circle, 1e-10);
    };
    auto g1 = [&](double q) {
        const LocalJet j = f.local_jet({q, 0.0});
        return std::pair{j.grad[0], j.hess[0]};
    };
    auto g2 = [&](double q) { return std::pair{d2f(q), d2f.derivative()(q)}; };

    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const auto un = static_cast<std::size_t>((i + 1) % n);
        const auto up = static_cast<std::size_t>((i + n - 1) % n);
        const double q = i * h;
        if (out.plateau && std::abs(dv[ui]) < o.point_tolerance) continue;
        if (dv[ui] == 0.0) {
            accept(q);
            continue;
        }
        if (dv[ui] * dv[un] < 0.0) {
            accept(bracketed_root(g1, q, q + h, o));
            continue;
        }
        // touching zero of f': |f'| has a local minimum without a sign change
        const bool local_min = std::abs(dv[ui]) <= std::abs(dv[up]) && std::abs(dv[ui]) < std::abs(dv[un]);
        if (local_min && dv[up] * dv[ui] > 0.0) {
            const double lo = q - h, hi = q + h;
            if (d2f(lo) * d2f(hi) < 0.0) accept(bracketed_root(g2, lo, hi, o));
        }
    }
    std::sort(pts.begin(), pts.end());
    if (out.plateau) add_plateau_representatives(f, flat, n, o.cluster_tolerance, pts);
    std::vector<double> vals;
    for (const Point& p : pts) vals.push_back(f(p));
    out.points = std::move(pts);
    out.values = cluster_values(std::move(vals), o.cluster_tolerance);
    return out;
}

CriticalSet torus_critical_set(const FourierFunction& f, const ScanOptions& o) {
    CriticalSet out;
    out.tolerance = o.cluster_tolerance;
    const int n = o.torus_grid;
    const double h = 1.0 / n;
    const std::vector<double> gx = f.partial(0).sample_grid(n);
    const std::vector<double> gy = f.partial(1).sample_grid(n);
    std::vector<double> neg_g2(gx.size());
    std::vector<std::size_t> flat;
    const double pt2 = o.point_tolerance * o.point_tolerance;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double g2 = gx[i] * gx[i] + gy[i] * gy[i];
        neg_g2[i] = -g2;
        if (g2 < pt2) flat.push_back(i);
    }
    out.plateau = static_cast<double>(flat.size()) > o.plateau_fraction * static_cast<double>(gx.size());

    auto seeds = discrete_local_maxima(neg_g2, Domain::Torus2, n,
                                       [&](double x) { return !(out.plateau && -x < pt2); });
    std::vector<Point> pts;
    for (std::size_t s : seeds) {
        if (out.plateau && -neg_g2[s] < pt2) continue;
        Point p = grid_point(s, Domain::Torus2, n);
        for (int it = 0; it < o.newton_max_iter; ++it) {
            const LocalJet j = f.local_jet(p);
            if (std::hypot(j.grad[0], j.grad[1]) <= o.newton_residual) break;
            const double det = j.hess[0] * j.hess[2] - j.hess[1] * j.hess[1];
            if (det == 0.0) break;
            double s1 = -(j.hess[2] * j.grad[0] - j.hess[1] * j.grad[1]) / det;
            double s2 = -(-j.hess[1] * j.grad[0] + j.hess[0] * j.grad[1]) / det;
            const double len = std::hypot(s1, s2);
            if (len > 2.0 * h) {
                s1 *= 2.0 * h / len;
                s2 *= 2.0 * h / len;
            }
            p = wrap({p.q1 + s1, p.q2 + s2});
            if (len < 1e-17) break;
        }
        p = wrap(p);
        const LocalJet j = f.local_jet(p);
        // seeds still outside the tolerance after the iteration cap are dropped
        if (std::hypot(j.grad[0], j.grad[1]) <= o.point_tolerance) add_unique(pts, p, Domain::Torus2, 1e-8);
    }
    std::sort(pts.begin(), pts.end());
    if (out.plateau) add_plateau_representatives(f, flat, n, o.cluster_tolerance, pts);
    std::vector<double> vals;
    for (const Point& p : pts) vals.push_back(f(p));
    out.points = std::move(pts);
    out.values = cluster_values(std::move(vals), o.cluster_tolerance);
    return out;
}

}  // namespace

CriticalSet critical_set(const FourierFunction& f, const ScanOptions& opts) {
    if (f.is_constant()) {
        CriticalSet out;
        out.tolerance = opts.cluster_tolerance;
        out.plateau = true;
        out.points = {Point{}};
        out.values = {f.mean()};
        return out;
    }
    return f.domain() == Domain::Circle ? circle_critical_set(f, opts) : torus_critical_set(f, opts);
}

bool is_morse(const FourierFunction& f, const ScanOptions& opts) {
    const CriticalSet cs = critical_set(f, opts);
    if (cs.plateau || cs.points.empty()) return false;
    for (const Point& p : cs.points) {
        const LocalJet j = f.local_jet(p);
        const double det = f.domain() == Domain::Circle ? j.hess[0] : j.hess[0] * j.hess[2] - j.hess[1] * j.hess[1];
        if (std::abs(det) <= opts.degeneracy_tolerance) return false;
    }
    return true;
}

std::vector<Point> sup_attaining_points(const FourierFunction& f, double slack, const ScanOptions& opts) {
    const SupNorm s = sup_norm(f, opts);
    const CriticalSet cs = critical_set(f, opts);
    std::vector<Point> pts{s.point};
    for (const Point& p : cs.points)
        if (std::abs(f(p)) >= s.value - slack) add_unique(pts, p, f.domain(), 1e-10);
    std::sort(pts.begin(), pts.end());
    return pts;
}

FourierFunction random_fourier(Domain domain, int degree, std::mt19937_64& rng, double amplitude) {
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    if (domain == Domain::Circle) {
        const double a0 = u(rng);
        std::vector<double> c(static_cast<std::size_t>(degree)), s(static_cast<std::size_t>(degree));
        for (int k = 1; k <= degree; ++k) {
            c[static_cast<std::size_t>(k - 1)] = u(rng) / (1.0 + k * k);
            s[static_cast<std::size_t>(k - 1)] = u(rng) / (1.0 + k * k);
        }
        return FourierFunction::circle(a0, std::move(c), std::move(s));
    }
    const double a0 = u(rng);
    const auto n = static_cast<std::size_t>((degree + 1) * (degree + 1));
    std::vector<double> m[4];
    for (auto& v : m) {
        v.resize(n);
        for (int j = 0; j <= degree; ++j)
            for (int k = 0; k <= degree; ++k) v[idx(j, k, degree)] = u(rng) / (1.0 + j * j + k * k);
    }
    return FourierFunction::torus(a0, degree, std::move(m[0]), std::move(m[1]), std::move(m[2]), std::move(m[3]));
}

}  // namespace jetflat
