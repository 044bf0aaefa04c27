#include "knightian/json_io.hpp"

#include "knightian/errors.hpp"

namespace knightian {

using nlohmann::json;

json to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw DomainError("expected a rational (string or integer)");
}

json to_json(const PriceExpression& p) {
    json out;
    out["rational"] = to_json(p.rational_part());
    json logs = json::array();
    for (const auto& [coeff, atom] : p.log_terms()) {
        json term;
        term["coeff"] = to_json(coeff);
        term["atom"] = atom.get_str();
        logs.push_back(std::move(term));
    }
    out["logs"] = std::move(logs);
    return out;
}

PriceExpression price_from_json(const json& j) {
    if (j.is_string() || j.is_number_integer())
        return PriceExpression(rational_from_json(j));
    if (!j.is_object()) throw DomainError("expected a price expression");
    PriceExpression p(rational_from_json(j.at("rational")));
    if (j.contains("logs"))
        for (const auto& term : j.at("logs"))
            p += PriceExpression::log_term(
                rational_from_json(term.at("coeff")),
                Rational::parse(term.at("atom").get<std::string>()));
    return p;
}

json to_json(const AllocationVector& a) {
    json out = json::array();
    for (const Rational& p : a.probs) out.push_back(to_json(p));
    return out;
}

AllocationVector allocation_from_json(const json& j) {
    if (!j.is_array()) throw DomainError("expected an allocation array");
    AllocationVector a;
    for (const auto& e : j) a.probs.push_back(rational_from_json(e));
    validate_allocation(a);
    return a;
}

json to_json(const CandidateSet& s) {
    json out = json::array();
    for (long v : s.values()) out.push_back(v);
    return out;
}

CandidateSet candidate_set_from_json(const json& j) {
    if (!j.is_array()) throw DomainError("expected a candidate set array");
    std::vector<long> vals;
    for (const auto& e : j) vals.push_back(e.get<long>());
    return CandidateSet(vals);
}

json to_json(const Context& ctx) {
    json out;
    out["n"] = ctx.n;
    out["B"] = ctx.B;
    out["delta"] = to_json(ctx.delta);
    json K = json::array();
    for (const auto& s : ctx.K) K.push_back(to_json(s));
    out["K"] = std::move(K);
    out["theta"] = ctx.theta;
    return out;
}

Context context_from_json(const json& j) {
    Context ctx;
    ctx.n = j.at("n").get<int>();
    ctx.B = j.at("B").get<long>();
    ctx.delta = rational_from_json(j.at("delta"));
    for (const auto& s : j.at("K")) ctx.K.push_back(candidate_set_from_json(s));
    ctx.theta = j.at("theta").get<std::vector<long>>();
    auto problems = validate_context(ctx);
    if (!problems.empty()) throw DomainError("invalid context: " + problems.front());
    return ctx;
}

json to_json(const FiniteMechanism& m) {
    json out;
    out["id"] = m.id();
    out["strategy_counts"] = m.strategy_counts();
    out["strategies_are_bids"] = m.strategies_are_bids();
    if (m.dm_degree()) out["dm_degree"] = *m.dm_degree();
    json alloc = json::array(), prices = json::array();
    for (std::size_t idx = 0; idx < m.profile_count(); ++idx) {
        alloc.push_back(to_json(m.allocation(idx)));
        json row = json::array();
        for (int i = 0; i < m.players(); ++i)
            row.push_back(to_json(m.price(idx, static_cast<std::size_t>(i))));
        prices.push_back(std::move(row));
    }
    out["alloc"] = std::move(alloc);
    out["prices"] = std::move(prices);
    return out;
}

FiniteMechanism mechanism_from_json(const json& j) {
    std::string id = j.at("id").get<std::string>();
    std::vector<int> counts = j.at("strategy_counts").get<std::vector<int>>();
    std::vector<AllocationVector> alloc;
    for (const auto& row : j.at("alloc")) alloc.push_back(allocation_from_json(row));
    std::vector<std::vector<PriceExpression>> prices;
    for (const auto& row : j.at("prices")) {
        std::vector<PriceExpression> p;
        for (const auto& e : row) p.push_back(price_from_json(e));
        prices.push_back(std::move(p));
    }
    bool bids = j.value("strategies_are_bids", false);
    std::optional<int> dm;
    if (j.contains("dm_degree") && !j.at("dm_degree").is_null())
        dm = j.at("dm_degree").get<int>();
    return FiniteMechanism(std::move(id), std::move(counts), std::move(alloc),
                           std::move(prices), bids, dm);
}

json to_json(const DirectMechanism& m) {
    json out;
    out["mechanism"] = to_json(m.table);
    json reports = json::array();
    for (const auto& [lo, hi] : m.reports) reports.push_back({lo, hi});
    out["reports"] = std::move(reports);
    return out;
}

DirectMechanism direct_mechanism_from_json(const json& j) {
    DirectMechanism m{mechanism_from_json(j.at("mechanism")), {}};
    for (const auto& r : j.at("reports")) {
        if (!r.is_array() || r.size() != 2) throw DomainError("bad report entry");
        m.reports.emplace_back(r[0].get<long>(), r[1].get<long>());
    }
    for (int c : m.table.strategy_counts())
        if (static_cast<std::size_t>(c) != m.reports.size())
            throw DomainError("report list does not match the strategy count");
    return m;
}

json to_json(const UdedResult& r) {
    json out;
    out["strategies"] = r.strategies;
    json cert = json::array();
    for (bool b : r.certified) cert.push_back(b);
    out["certified"] = std::move(cert);
    out["exact"] = r.exact;
    return out;
}

json to_json(const MixedStrategy& s) {
    json out = json::array();
    for (const auto& [strat, w] : s.weights)
        out.push_back({{"strategy", strat}, {"weight", to_json(w)}});
    return out;
}

json to_json(const ProbeResult& r) {
    json out;
    out["epsilon"] = to_json(r.epsilon);
    out["epsilon_decimal"] = r.epsilon.decimal(12);
    out["sigma"] = to_json(r.sigma);
    out["sigma_prime"] = to_json(r.sigma_prime);
    out["uded_first"] = r.uded_first;
    out["uded_second"] = r.uded_second;
    return out;
}

json to_json(const RatioReport& r) {
    json out;
    out["ratio"] = to_json(r.ratio);
    out["ratio_decimal"] = r.ratio.decimal(12);
    out["mechanism"] = r.mechanism_id;
    out["witness_context"] = to_json(r.witness_context);
    out["witness_bids"] = r.witness_profile;
    out["witness_certified"] = r.witness_certified;
    out["conservative_uded"] = r.conservative_uded;
    return out;
}

json to_json(const AuditReport& r) {
    json out;
    out["truthful"] = r.truthful;
    out["invariance_holds"] = r.invariance_holds;
    if (r.invariance_witness) {
        out["invariance_witness"] = {
            {"player", r.invariance_witness->player},
            {"center", r.invariance_witness->x},
            {"opponent_reports", r.invariance_witness->t_others}};
    }
    out["c"] = r.c;
    out["bound"] = to_json(r.bound);
    out["ratio"] = to_json(r.ratio);
    out["ratio_decimal"] = r.ratio.decimal(12);
    out["within_bound"] = r.within_bound;
    return out;
}

json to_json(const TheoremWitness& w) {
    json out;
    out["context"] = to_json(w.context);
    out["bids"] = w.bids;
    out["welfare"] = to_json(w.lhs);
    out["required"] = to_json(w.rhs);
    return out;
}

json to_json(const BoundCurves& c) {
    json out;
    out["random"] = to_json(c.random);
    out["second_price"] = to_json(c.second_price);
    out["opt"] = to_json(c.opt);
    return out;
}

} // namespace knightian
