#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "l2lb/family.hpp"
#include "l2lb/params.hpp"
#include "l2lb/risk.hpp"
#include "l2lb/verifier.hpp"

namespace l2lb {

using json = nlohmann::ordered_json;

/// Real number with infinities encoded as the strings "inf"/"-inf".
json real_to_json(double v);
/// Accepts numbers or the strings "inf"/"-inf"; throws otherwise.
double real_from_json(const json& j);

json params_to_json(const ClassParams& p);
ClassParams params_from_json(const json& j);

// Report serializers.  Each report carries a "provenance" object tagging
// every numeric as closed-form / quadrature / monte-carlo / estimated-constant.
json rate_to_json(const RateReport& r);
json relation_to_json(const RelationReport& r);
json conditions_to_json(const ConditionReport& r);
json family_to_json(const PerturbationFamily& fam);
json checklist_to_json(const AssumptionChecklist& r);
json chi_to_json(const ChiBudget& r);
json certificate_to_json(const Certificate& r);
json sandwich_to_json(const SandwichReport& r);
json wjk_to_json(const WjkReport& r);
json risk_table_to_json(const RiskTable& r);
std::string risk_table_to_csv(const RiskTable& r);

/// Canonical serialization used for hashing and file output.
std::string canonical_dump(const json& j);

/// FNV-1a 64-bit hash and its fixed-width hex form; keys output files.
std::uint64_t fnv1a(std::string_view s);
std::string hash_hex(std::uint64_t h);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace l2lb
