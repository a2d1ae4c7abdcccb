#pragma once

// JSON documents for functions, paths and contactomorphisms, and the JSON
// form of every report the command line prints.
//
//   circle:  {"domain":"S1","a0":x,"cos":[...],"sin":[...]}
//   torus:   {"domain":"T2","coeffs":{"a0":x,"cc":[[...]],"cs":[[...]],"sc":[[...]],"ss":[[...]]}}
//   path:    {"times":[0,...,1],"knots":[<function>,...]}
//   contactomorphism: {"displacement":<function>}
//   family:  {"times":[...],"samples":[<function>,...]}
//
// A "cos"/"sin" document tagged "T2" is read as a function of q1 alone.

#include <string>
#include <vector>

#include <json.hpp>

#include "jetflat/contact_product.hpp"
#include "jetflat/geodesics.hpp"
#include "jetflat/isotopy_path.hpp"
#include "jetflat/spectral_metric.hpp"

namespace jetflat::io {

using nlohmann::json;

/// Parses text as JSON; ParseError on syntax errors.
[[nodiscard]] json parse_document(const std::string& text);

[[nodiscard]] FourierFunction function_from_json(const json& j);
[[nodiscard]] json to_json(const FourierFunction& f);

[[nodiscard]] IsotopyPath path_from_json(const json& j);
[[nodiscard]] json to_json(const IsotopyPath& p);

[[nodiscard]] CircleContactomorphism contactomorphism_from_json(const json& j);
[[nodiscard]] json to_json(const CircleContactomorphism& phi);

struct ContactPath {
    std::vector<CircleContactomorphism> knots;
    std::vector<double> times;
};
/// {"times":[...],"knots":[{"displacement":...},...]}; times are validated like IsotopyPath.
[[nodiscard]] ContactPath contact_path_from_json(const json& j);

struct SampledFamily {
    std::vector<double> times;
    std::vector<FourierFunction> samples;
};
[[nodiscard]] SampledFamily family_from_json(const json& j);

[[nodiscard]] json to_json(Point p, Domain d);
[[nodiscard]] json to_json(const SelectorReport& r);
[[nodiscard]] json to_json(const ChordSpectrum& s, Domain d);
[[nodiscard]] json to_json(const QAWitness& w, Domain d);
[[nodiscard]] json to_json(const CommonWitness& w, Domain d);
[[nodiscard]] json to_json(const Segmentation& s);
[[nodiscard]] json to_json(const GeodesicReport& r, Domain d);
[[nodiscard]] json to_json(const OptimizeResult& r);
[[nodiscard]] json to_json(const MonotoneReport& r);
[[nodiscard]] json to_json(const MetricLength& m);
[[nodiscard]] json to_json(const HamiltonianBounds& b);
[[nodiscard]] json to_json(const IntegralCriterion& c, Domain d);
[[nodiscard]] json to_json(const AxiomReport& r);
[[nodiscard]] json to_json(const SpectralNorm& n);
[[nodiscard]] json to_json(const TranslatedPoints& t, const CircleContactomorphism& phi);
[[nodiscard]] json to_json(const ContactQA& q);
[[nodiscard]] json to_json(const ShelukhinBound& b);

/// One CSV row per case: case_id,ell_plus,ell_minus,d_spec,in_spectrum.
struct CsvRow {
    std::string case_id;
    SelectorReport report;
};
inline constexpr const char* kCsvHeader = "case_id,ell_plus,ell_minus,d_spec,in_spectrum";
[[nodiscard]] std::string to_csv(const std::vector<CsvRow>& rows);

}  // namespace jetflat::io
