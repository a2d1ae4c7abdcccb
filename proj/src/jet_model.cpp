#include "jetflat/jet_model.hpp"

#include <algorithm>
#include <cmath>

#include "jetflat/errors.hpp"

namespace jetflat {

JetPoint JetLegendrian::point_over(Point q) const {
    const LocalJet j = generator_.local_jet(q);
    JetPoint out;
    out.q = {q.q1, domain() == Domain::Torus2 ? q.q2 : 0.0};
    out.p = j.grad;
    out.z = j.value;
    return out;
}

JetLegendrian reeb_translate(const JetLegendrian& L, double t) { return JetLegendrian(L.generator() + t); }

ChordSpectrum chord_spectrum(const JetLegendrian& L1, const JetLegendrian& L0, const ScanOptions& opts) {
    if (L1.domain() != L0.domain()) throw DomainMismatch("chord spectrum between Legendrians of different bases");
    ChordSpectrum out;
    out.source = critical_set(L1.generator() - L0.generator(), opts);
    out.lengths = out.source.values;
    out.plateau = out.source.plateau;
    return out;
}

bool in_spectrum(const ChordSpectrum& spectrum, double length, double tol) {
    return std::any_of(spectrum.lengths.begin(), spectrum.lengths.end(),
                       [&](double v) { return std::abs(v - length) <= tol; });
}

OrderVerdict pointwise_leq(const JetLegendrian& L1, const JetLegendrian& L0, double tol, const ScanOptions& opts) {
    if (L1.domain() != L0.domain()) throw DomainMismatch("order between Legendrians of different bases");
    OrderVerdict v;
    v.max_difference = extremum(L1.generator() - L0.generator(), ExtremumMode::Max, opts).value;
    v.leq = v.max_difference <= tol;
    v.marginal = std::abs(v.max_difference) <= tol;
    return v;
}

}  // namespace jetflat
