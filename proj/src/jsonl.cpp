#include "rnforge/jsonl.hpp"

#include "rnforge/errors.hpp"

namespace rnforge {

Json int_json(const Int& v) { return to_string(v); }
Json int_json(std::int64_t v) { return std::to_string(v); }
Json int_json(std::uint64_t v) { return std::to_string(v); }

const Json& json_field(const Json& j, const char* key) {
  if (!j.is_object()) throw FormatError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

Int json_int(const Json& j, const char* key) {
  const Json& v = json_field(j, key);
  if (!v.is_string()) throw FormatError(std::string("field '") + key + "' must be a decimal string");
  return parse_int(v.get<std::string>());
}

std::int64_t json_i64(const Json& j, const char* key) {
  Int v = json_int(j, key);
  if (!v.fits_slong_p()) throw FormatError(std::string("field '") + key + "' out of range");
  return v.get_si();
}

Json completeness_json(const Completeness& c) {
  if (const auto* b = std::get_if<BoundedCompleteness>(&c)) {
    return Json{{"kind", "bounded"}, {"n_max", int_json(b->n_max)}};
  }
  return Json{{"kind", "certified"}, {"certificate", std::get<CertifiedCompleteness>(c).certificate_id}};
}

Completeness completeness_from_json(const Json& j) {
  const Json& kind = json_field(j, "kind");
  if (kind == "bounded") return BoundedCompleteness{json_i64(j, "n_max")};
  if (kind == "certified") return CertifiedCompleteness{json_field(j, "certificate").get<std::string>()};
  throw FormatError("unknown completeness kind");
}

Json solution_record(const Equation& eq, const Solution& s) {
  return Json{{"type", "solution"}, {"A", int_json(eq.A())}, {"k", int_json(eq.k())},
              {"B", int_json(eq.B())},  {"x", int_json(s.x)},    {"n", int_json(s.n)}};
}

Json solution_list_json(const std::vector<Solution>& solutions) {
  Json out = Json::array();
  for (const auto& s : solutions) out.push_back(Json{{"x", int_json(s.x)}, {"n", int_json(s.n)}});
  return out;
}

std::vector<Solution> solution_list_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("solution list must be an array");
  std::vector<Solution> out;
  for (const Json& e : j) {
    std::int64_t n = json_i64(e, "n");
    if (n < 0) throw FormatError("negative exponent in solution list");
    out.push_back({json_int(e, "x"), static_cast<std::uint64_t>(n)});
  }
  return out;
}

Json solution_set_json(const SolutionSet& set) {
  return Json{{"equation", set.equation().to_text()},
              {"solutions", solution_list_json(set.solutions())},
              {"completeness", completeness_json(set.completeness())}};
}

SolutionSet solution_set_from_json(const Json& j) {
  try {
    return SolutionSet(Equation::parse(json_field(j, "equation").get<std::string>()),
                       solution_list_from_json(json_field(j, "solutions")),
                       completeness_from_json(json_field(j, "completeness")));
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid solution set: ") + e.what());
  }
}

Json candidate_json(const Candidate& c) {
  return Json{{"A", int_json(c.A)}, {"k", int_json(c.k)},   {"q", int_json(c.q)}, {"p", int_json(c.p)},
              {"d", int_json(c.d)}, {"x1", int_json(c.x1)}, {"x2", int_json(c.x2)}, {"B", int_json(c.B)}};
}

Candidate candidate_from_json(const Json& j) {
  return Candidate{json_int(j, "A"), json_int(j, "k"),  json_i64(j, "q"),  json_i64(j, "p"),
                   json_int(j, "d"), json_int(j, "x1"), json_int(j, "x2"), json_int(j, "B")};
}

Json hit_record(const SearchHit& hit) {
  Json j = solution_set_json(hit.solutions);
  j["type"] = "hit";
  j["source"] = candidate_json(hit.source);
  return j;
}

SearchHit hit_from_json(const Json& j) {
  if (json_field(j, "type") != "hit") throw FormatError("not a hit record");
  SolutionSet set = solution_set_from_json(j);
  Equation eq = set.equation();
  return SearchHit{std::move(eq), std::move(set), candidate_from_json(json_field(j, "source"))};
}

std::string dump_line(const Json& j) { return j.dump(); }

}  // namespace rnforge

namespace rnforge {

namespace {

Json u64_list(const std::vector<std::uint64_t>& v) {
  Json out = Json::array();
  for (auto x : v) out.push_back(std::to_string(x));
  return out;
}

std::uint64_t parse_u64(const Json& v) {
  if (!v.is_string()) throw FormatError("expected a decimal string");
  Int i = parse_int(v.get<std::string>());
  if (i < 0 || !i.fits_ulong_p()) throw FormatError("value out of range");
  return i.get_ui();
}

std::vector<std::uint64_t> u64_list_from(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array");
  std::vector<std::uint64_t> out;
  out.reserve(j.size());
  for (const Json& v : j) out.push_back(parse_u64(v));
  return out;
}

std::uint64_t json_u64(const Json& j, const char* key) { return parse_u64(json_field(j, key)); }

const Json& json_array(const Json& j, const char* key) {
  const Json& v = json_field(j, key);
  if (!v.is_array()) throw FormatError(std::string("field '") + key + "' must be an array");
  return v;
}

Parity parse_parity(const std::string& s) {
  if (s == "any") return Parity::any;
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw FormatError("unknown parity '" + s + "'");
}

Equation equation_field(const Json& j, const char* key) {
  const Json& v = json_field(j, key);
  if (!v.is_string()) throw FormatError(std::string("field '") + key + "' must be an equation string");
  try {
    return Equation::parse(v.get<std::string>());
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
}

}  // namespace

Json power_sieve_json(const PowerSieveCertificate& cert) {
  Json problems = Json::array();
  for (const auto& pc : cert.problems) {
    Json classes = Json::array();
    for (const auto& cl : pc.classes) classes.push_back(Json{{"x", int_json(cl.x0)}, {"y", int_json(cl.y0)}});
    Json branches = Json::array();
    for (const auto& br : pc.branches) {
      Json open = Json::array();
      for (const auto& o : br.open) open.push_back(u64_list(o));
      branches.push_back(Json{{"class", int_json(static_cast<std::uint64_t>(br.class_index))},
                              {"x", int_json(br.x_start)},
                              {"y", int_json(br.y_start)},
                              {"direct_steps", int_json(br.direct_steps)},
                              {"hits", u64_list(br.hit_indices)},
                              {"open", std::move(open)}});
    }
    problems.push_back(Json{{"D", int_json(pc.source.problem.D)},
                            {"N", int_json(pc.source.problem.N)},
                            {"r", int_json(static_cast<std::uint64_t>(pc.source.r))},
                            {"unit", Json{{"u", int_json(pc.unit.u)}, {"v", int_json(pc.unit.v)}}},
                            {"classes", std::move(classes)},
                            {"base_modulus", int_json(pc.base_modulus)},
                            {"moduli", u64_list(pc.moduli)},
                            {"periods", u64_list(pc.periods)},
                            {"branches", std::move(branches)}});
  }
  return Json{{"kind", "power_sieve"},
              {"k", int_json(cert.k)},
              {"depth", int_json(static_cast<std::uint64_t>(cert.depth))},
              {"problems", std::move(problems)},
              {"solutions", solution_list_json(cert.solutions)}};
}

PowerSieveCertificate power_sieve_from_json(const Json& j) {
  PowerSieveCertificate cert;
  cert.k = json_int(j, "k");
  cert.depth = static_cast<unsigned>(json_u64(j, "depth"));
  for (const Json& pj : json_array(j, "problems")) {
    SieveProblemCertificate pc;
    pc.source.problem = PellProblem{json_int(pj, "D"), json_int(pj, "N")};
    pc.source.r = static_cast<unsigned>(json_u64(pj, "r"));
    const Json& uj = json_field(pj, "unit");
    pc.unit = PellUnit{pc.source.problem.D, json_int(uj, "u"), json_int(uj, "v")};
    for (const Json& cj : json_array(pj, "classes")) {
      pc.classes.push_back(PellClass{pc.source.problem, json_int(cj, "x"), json_int(cj, "y"), pc.unit});
    }
    pc.base_modulus = json_u64(pj, "base_modulus");
    pc.moduli = u64_list_from(json_field(pj, "moduli"));
    pc.periods = u64_list_from(json_field(pj, "periods"));
    for (const Json& bj : json_array(pj, "branches")) {
      SieveBranch br;
      br.class_index = json_u64(bj, "class");
      br.x_start = json_int(bj, "x");
      br.y_start = json_int(bj, "y");
      br.direct_steps = json_u64(bj, "direct_steps");
      br.hit_indices = u64_list_from(json_field(bj, "hits"));
      for (const Json& o : json_array(bj, "open")) br.open.push_back(u64_list_from(o));
      pc.branches.push_back(std::move(br));
    }
    cert.problems.push_back(std::move(pc));
  }
  cert.solutions = solution_list_from_json(json_field(j, "solutions"));
  return cert;
}

Json certificate_step_json(const CertificateStep& step) {
  if (const auto* r = std::get_if<ReductionStep>(&step)) {
    return Json{{"kind", "reduction"},
                {"s", int_json(static_cast<std::uint64_t>(r->s))},
                {"residual", r->residual.to_text()},
                {"low_range_checked", int_json(r->low_range_checked)}};
  }
  if (const auto* m = std::get_if<ModularCertificate>(&step)) {
    return Json{{"kind", "modular"},
                {"modulus", int_json(m->modulus)},
                {"n0", int_json(m->n0)},
                {"parity", to_string(m->parity)},
                {"method", m->kind == ModularKind::linear ? "linear" : "odd_pell"}};
  }
  if (const auto* f = std::get_if<FactorizationCertificate>(&step)) {
    Json pairs = Json::array();
    for (const auto& p : f->factor_pairs) pairs.push_back(Json::array({to_string(p.d), to_string(p.e)}));
    Json sols = Json::array();
    for (const auto& s : f->admissible) sols.push_back(Json{{"m", int_json(s.m)}, {"x", int_json(s.x)}});
    return Json{{"kind", "factorization"},
                {"k", int_json(f->k)},
                {"B", int_json(f->B)},
                {"pairs", std::move(pairs)},
                {"solutions", std::move(sols)}};
  }
  return power_sieve_json(std::get<PowerSieveCertificate>(step));
}

CertificateStep certificate_step_from_json(const Json& j) {
  const Json& kind = json_field(j, "kind");
  if (kind == "reduction") {
    return ReductionStep{static_cast<unsigned>(json_u64(j, "s")), equation_field(j, "residual"),
                         json_i64(j, "low_range_checked")};
  }
  if (kind == "modular") {
    ModularCertificate m;
    m.modulus = json_u64(j, "modulus");
    m.n0 = json_i64(j, "n0");
    m.parity = parse_parity(json_field(j, "parity").get<std::string>());
    const Json& method = json_field(j, "method");
    if (method == "linear") m.kind = ModularKind::linear;
    else if (method == "odd_pell") m.kind = ModularKind::odd_pell;
    else throw FormatError("unknown modular method");
    return m;
  }
  if (kind == "factorization") {
    FactorizationCertificate f;
    f.k = json_int(j, "k");
    f.B = json_int(j, "B");
    for (const Json& p : json_array(j, "pairs")) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) throw FormatError("bad factor pair");
      f.factor_pairs.push_back({parse_int(p[0].get<std::string>()), parse_int(p[1].get<std::string>())});
    }
    for (const Json& s : json_array(j, "solutions")) f.admissible.push_back({json_u64(s, "m"), json_int(s, "x")});
    return f;
  }
  if (kind == "power_sieve") return power_sieve_from_json(j);
  throw FormatError("unknown certificate step kind");
}

Json certificate_record(const CompletenessCertificate& cert) {
  Json steps = Json::array();
  for (const auto& s : cert.steps) steps.push_back(certificate_step_json(s));
  return Json{{"type", "certificate"},
              {"equation", cert.equation.to_text()},
              {"direct_range", int_json(cert.direct_range)},
              {"steps", std::move(steps)},
              {"final", solution_set_json(cert.final_solution_set)}};
}

CompletenessCertificate certificate_from_json(const Json& j) {
  if (json_field(j, "type") != "certificate") throw FormatError("not a certificate record");
  Equation eq = equation_field(j, "equation");
  std::vector<CertificateStep> steps;
  for (const Json& s : json_array(j, "steps")) steps.push_back(certificate_step_from_json(s));
  return CompletenessCertificate{eq, json_i64(j, "direct_range"), std::move(steps),
                                 solution_set_from_json(json_field(j, "final"))};
}

}  // namespace rnforge
