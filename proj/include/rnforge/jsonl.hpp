#pragma once

// JSONL records. Every integer is written as a decimal string so values
// beyond 64 bits survive round trips unchanged.

#include <json.hpp>

#include <string>

#include "rnforge/certify.hpp"
#include "rnforge/model.hpp"
#include "rnforge/search.hpp"

namespace rnforge {

using Json = nlohmann::json;

Json int_json(const Int& v);
Json int_json(std::int64_t v);
Json int_json(std::uint64_t v);

// Reads a decimal-string integer field; throws FormatError.
Int json_int(const Json& j, const char* key);
std::int64_t json_i64(const Json& j, const char* key);
const Json& json_field(const Json& j, const char* key);

Json completeness_json(const Completeness& c);
Completeness completeness_from_json(const Json& j);

// {type:"solution", A, k, B, x, n}
Json solution_record(const Equation& eq, const Solution& s);

Json solution_list_json(const std::vector<Solution>& solutions);
std::vector<Solution> solution_list_from_json(const Json& j);

Json solution_set_json(const SolutionSet& set);
SolutionSet solution_set_from_json(const Json& j);

Json candidate_json(const Candidate& c);
Candidate candidate_from_json(const Json& j);

// {type:"hit", equation, solutions[], completeness, source}
Json hit_record(const SearchHit& hit);
SearchHit hit_from_json(const Json& j);

Json power_sieve_json(const PowerSieveCertificate& cert);
PowerSieveCertificate power_sieve_from_json(const Json& j);

Json certificate_step_json(const CertificateStep& step);
CertificateStep certificate_step_from_json(const Json& j);

// {type:"certificate", equation, direct_range, steps[], final}
Json certificate_record(const CompletenessCertificate& cert);
CompletenessCertificate certificate_from_json(const Json& j);

// One compact line, no trailing newline.
std::string dump_line(const Json& j);

}  // namespace rnforge
