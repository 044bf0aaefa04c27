#pragma once

#include <json.hpp>

#include "knightian/context.hpp"
#include "knightian/dominance.hpp"
#include "knightian/finite_mechanism.hpp"
#include "knightian/price_expression.hpp"
#include "knightian/welfare.hpp"

namespace knightian {

// Rationals serialize as strings ("23/45", "10") so no precision is lost;
// parsing accepts strings, integers and decimal strings.
nlohmann::json to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PriceExpression& p);
PriceExpression price_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AllocationVector& a);
AllocationVector allocation_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CandidateSet& s);
CandidateSet candidate_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Context& ctx);
Context context_from_json(const nlohmann::json& j);

// Tables are stored row-major with player 0 varying slowest, matching the
// in-memory layout.
nlohmann::json to_json(const FiniteMechanism& m);
FiniteMechanism mechanism_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DirectMechanism& m);
DirectMechanism direct_mechanism_from_json(const nlohmann::json& j);

nlohmann::json to_json(const UdedResult& r);
nlohmann::json to_json(const ProbeResult& r);
nlohmann::json to_json(const MixedStrategy& s);
nlohmann::json to_json(const RatioReport& r);
nlohmann::json to_json(const AuditReport& r);
nlohmann::json to_json(const TheoremWitness& w);
nlohmann::json to_json(const BoundCurves& c);

} // namespace knightian
