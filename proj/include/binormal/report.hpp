#pragma once

// JSON forms of reports and estimates. Doubles are written in shortest
// round-trip form; non-finite values become null.

#include "json.hpp"

#include "binormal/binormal.hpp"
#include "binormal/wos.hpp"

namespace binormal {

nlohmann::ordered_json to_json(const Point& p);
nlohmann::ordered_json to_json(const Coefficients& c);
nlohmann::ordered_json to_json(const VerificationReport& r);
nlohmann::ordered_json to_json(const McEstimate& e);

}  // namespace binormal
