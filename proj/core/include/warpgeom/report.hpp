#pragma once

// JSON and CSV serialization. Objects use sorted keys and non-finite numbers
// are written as the strings "inf", "-inf" and "nan", so identical inputs
// produce byte-identical output.

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "warpgeom/dgeom.hpp"
#include "warpgeom/harness.hpp"
#include "warpgeom/modelspace.hpp"

namespace warpgeom {

nlohmann::json number_json(double v);

nlohmann::json to_json(const Provenance& p);
nlohmann::json to_json(const Hypothesis& h);
nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const QuotientCurve& c);
nlohmann::json to_json(const EndsReport& e);
nlohmann::json to_json(const ToneReport& t);
nlohmann::json to_json(const BalanceReport& b);
nlohmann::json to_json(const ParabolicityReport& p);
nlohmann::json to_json(const LimsupEstimate& l);
nlohmann::json to_json(const CheegerBound& c);
nlohmann::json to_json(const CapacityResult& c);
nlohmann::json to_json(const EndsCount& e);

/// Pretty-printed, two-space indent, trailing newline.
std::string dump(const nlohmann::json& j);

/// R, volume, model volume, flux, model flux and both quotients, with units.
void write_curve_csv(const QuotientCurve& curve, std::ostream& out);

/// Model profile columns r, w, eta, volS, volB, q, q*eta.
void write_model_csv(const ModelSpace& model, const RadiusGrid& grid, std::ostream& out,
                     const QuadratureConfig& q = {});

}  // namespace warpgeom
