#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hsvi/heston_lt_smile.hpp"
#include "hsvi/model_params.hpp"
#include "hsvi/smile.hpp"
#include "hsvi/svi_fit.hpp"
#include "hsvi/svi_surface.hpp"

namespace hsvi {

// Parameter records serialize with their field names verbatim. from_json
// requires every field and rejects non-numeric values.
void to_json(nlohmann::json& j, const HestonParams& p);
void from_json(const nlohmann::json& j, HestonParams& p);
void to_json(nlohmann::json& j, const SVIOmegaParams& p);
void from_json(const nlohmann::json& j, SVIOmegaParams& p);
void to_json(nlohmann::json& j, const SVIRawParams& p);
void from_json(const nlohmann::json& j, SVIRawParams& p);

void to_json(nlohmann::json& j, const DerivedConstants& c);
void to_json(nlohmann::json& j, const SmileDiagnostics& d);
void to_json(nlohmann::json& j, const WingSlopes& w);
void to_json(nlohmann::json& j, const FitInterpretation& f);
void to_json(nlohmann::json& j, const FitResult& f);

// 17 significant digits: round-trips every double.
std::string format_double(double v);

// "# T=<value>" metadata line, then a "k,vol" header and one row per point.
void write_smile_csv(std::ostream& os, const Smile& smile);
// Parses the format written by write_smile_csv. Other '#' lines are ignored.
// Throws MalformedInputError on a missing T, a bad header or a bad row.
Smile read_smile_csv(std::istream& is);

}  // namespace hsvi
