#include <algorithm>
#include <functional>
#include <sstream>

#include "rnforge/app.hpp"
#include "rnforge/certify.hpp"
#include "rnforge/errors.hpp"
#include "rnforge/families.hpp"

namespace rnforge {

namespace {

using Ns = std::vector<std::uint64_t>;

struct Expected {
  Int A, k, B;
  Ns n;
};

std::string ns_text(const Ns& v) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out + "}";
}

Ns positive_ns(const SolutionSet& s) {
  Ns out;
  for (const auto& sol : s.solutions())
    if (sol.x > 0 && sol.n > 0) out.push_back(sol.n);
  return out;
}

Json row(const Equation& eq, const Ns& expected, const Ns& got) {
  Json e = Json::array(), g = Json::array();
  for (auto n : expected) e.push_back(int_json(n));
  for (auto n : got) g.push_back(int_json(n));
  return Json{{"equation", eq.to_text()}, {"expected_n", e}, {"found_n", g}, {"match", expected == got}};
}

void compare(ReproduceReport& rep, const std::string& label, const Equation& eq, const Ns& expected, const Ns& got) {
  rep.rows.push_back(row(eq, expected, got));
  if (expected != got) rep.diffs.push_back(label + " " + eq.to_text() + ": expected " + ns_text(expected) + ", got " + ns_text(got));
}

const std::vector<Expected>& thm25_rows() {
  static const std::vector<Expected> rows = {
      {28, 3, 2997, {0, 2, 5, 6, 10}},         {70, 3, 414, {0, 3, 4, 5, 8}},
      {130, 3, 5550606, {0, 6, 11, 15, 16}},   {148, 3, 41877, {0, 5, 6, 9, 17}},
      {8740, 3, 57402189, {0, 4, 9, 15, 29}},  {6, 5, 11875, {0, 4, 5, 6, 9}},
      {14, 5, 6875, {0, 2, 4, 5, 6}},          {248, 6, 23161, {0, 1, 3, 4, 5}},
      {1513, 6, Int("19379701008"), {0, 7, 9, 10, 12}},
  };
  return rows;
}

// Curve degree per row of thm25_rows().
const unsigned kThm25Degree[9] = {3, 3, 4, 3, 4, 3, 3, 4, 4};

const std::vector<Expected>& table13_rows() {
  static const std::vector<Expected> rows = {
      {-1, 6, 8865, {3, 4, 5}},
      {-1, 6, 48177, {3, 5, 6}},
      {-1, 6, 2538945, {4, 7, 8}},
      {-1, 6, 334401777, {7, 9, 10}},
      {-1, 6, 1410808185, {7, 10, 11}},
      {-1, 12, 448206057, {5, 7, 8}},
      {-1, 14, 166113185, {4, 6, 7}},
      {-1, 18, Int("4598905354020657"), {7, 9, 12}},
      {-1, 21, 5340742, {1, 3, 5}},
      {-1, 22, Int("61234181657"), {5, 7, 8}},
      {-1, 30, 739595025, {3, 5, 6}},
      {-1, 34, Int("170442204313460705"), {8, 10, 11}},
      {-1, 40, 109475600, {3, 4, 5}},
      {-1, 40, Int("17264710025"), {3, 5, 6}},
  };
  return rows;
}

const std::vector<Expected>& thm32_rows() {
  static const std::vector<Expected> rows = {
      {1, 6, 2185, {3, 4, 6}},
      {1, 6, Int("274837012705"), {4, 12, 13}},
      {1, 12, 25029865, {2, 6, 8}},
  };
  return rows;
}

std::vector<Solution> sols(std::initializer_list<std::pair<long, std::uint64_t>> v) {
  std::vector<Solution> out;
  for (auto [x, n] : v) out.push_back({Int(x), n});
  return out;
}

void certify_and_compare(ReproduceReport& rep, const Equation& eq, const std::vector<Solution>& expected,
                         const std::vector<Strategy>& strategy) {
  const CertifyResult res = certify_equation(eq, -1, strategy);
  Json r{{"equation", eq.to_text()}};
  if (!res.certificate) {
    rep.diffs.push_back(eq.to_text() + ": no certificate (" + res.failure + ")");
    r["certificate"] = nullptr;
    r["failure"] = res.failure;
    rep.rows.push_back(r);
    return;
  }
  const auto& cert = *res.certificate;
  const std::string why = verify_certificate_detail(cert);
  if (!why.empty()) rep.diffs.push_back(eq.to_text() + ": certificate does not verify: " + why);
  const auto& got = cert.final_solution_set.solutions();
  if (got != expected) {
    std::ostringstream d;
    d << eq.to_text() << ": certified set differs from the stated one";
    rep.diffs.push_back(d.str());
  }
  r["certificate_id"] = certificate_id(cert.equation, cert.direct_range, cert.steps);
  r["solutions"] = solution_list_json(got);
  r["verified"] = why.empty();
  rep.rows.push_back(r);
}

ReproduceReport run_thm22(const std::string&) {
  ReproduceReport rep;
  std::vector<FamilyInstance> grid;
  for (int v : {1, 2})
    for (std::uint64_t m = 1; m <= 40; ++m) grid.push_back(family_k2_five(v, m));
  for (const auto& r : verify_family_range(grid)) {
    const auto& inst = r.instance;
    const std::string label = to_string(inst.family) + " m=" + std::to_string(inst.params[0].second);
    if (!r.promised_ok || !r.missing.empty()) rep.diffs.push_back(label + ": promised solution missing");
    const bool documented = inst.family == FamilyId::k2_five_1 && inst.params[0].second == 1;
    if (documented && r.extra != sols({{9, 4}})) rep.diffs.push_back(label + ": expected the extra solution n=4");
    if (!documented && inst.promised.size() != 5) rep.diffs.push_back(label + ": fewer than five distinct exponents");
    Ns extra;
    for (const auto& s : r.extra) extra.push_back(s.n);
    rep.rows.push_back(Json{{"instance", label},
                            {"equation", inst.equation.to_text()},
                            {"promised", solution_list_json(inst.promised)},
                            {"extra_n", extra},
                            {"degenerate", inst.degenerate},
                            {"n_max", int_json(r.n_max)}});
  }
  return rep;
}

ReproduceReport run_thm23(const std::string&) {
  ReproduceReport rep;
  certify_and_compare(rep, Equation(57, 2, 117440512),
                      sols({{10837, 0}, {10880, 14}, {11008, 16}, {13312, 20}, {32768, 24}, {45056, 25}}),
                      {Strategy::kadic_reduction, Strategy::modular});
  certify_and_compare(rep, Equation(165, 2, 26404),
                      sols({{163, 0}, {178, 5}, {218, 7}, {262, 8}, {442, 10}, {838, 12}}), default_strategy());
  return rep;
}

ReproduceReport run_thm25(const std::string&) {
  ReproduceReport rep;
  for (const auto& e : thm25_rows()) {
    const Equation eq(e.A, e.k, e.B);
    compare(rep, "enumeration", eq, e.n, enumerate_solutions(eq, 200).exponents());
  }
  return rep;
}

ReproduceReport run_thm32(const std::string&) {
  ReproduceReport rep;
  for (const auto& e : thm32_rows()) {
    const Equation eq(e.A, e.k, e.B);
    compare(rep, "enumeration", eq, e.n, positive_ns(enumerate_solutions(eq, 200)));
  }
  certify_and_compare(rep, Equation(1, 12, 25029865), sols({{5003, 2}, {5293, 6}, {21331, 8}}),
                      {Strategy::factor_even});
  return rep;
}

ReproduceReport run_table13(const std::string&) {
  ReproduceReport rep;
  for (const auto& e : table13_rows()) {
    const Equation eq(e.A, e.k, e.B);
    compare(rep, "table13", eq, e.n, enumerate_solutions(eq, 10'000).exponents());
  }
  return rep;
}

ReproduceReport run_tables(const std::string& curve_path) {
  ReproduceReport rep;
  const auto records = ingest_curve_tables(curve_path);
  std::map<int, std::size_t> per_table;
  for (const auto& r : records) ++per_table[r.table_id];
  Json counts = Json::object();
  for (const auto& [t, c] : per_table) counts[std::to_string(t)] = std::to_string(c);
  rep.rows.push_back(Json{{"points", std::to_string(records.size())}, {"per_table", counts}, {"on_curve", true}});

  auto extract = [&](int table, const Int& A, const Int& k, unsigned degree, const Ns& expected) {
    std::vector<CurvePointRecord> sub;
    for (const auto& r : records)
      if (r.table_id == table) sub.push_back(r);
    const SolutionSet got = extract_equation_solutions(sub, A, k, degree);
    compare(rep, "table " + std::to_string(table), got.equation(), expected, got.exponents());
    const SolutionSet direct = enumerate_solutions(got.equation(), 200);
    if (direct.solutions() != got.solutions())
      rep.diffs.push_back("table " + std::to_string(table) + ": extracted x values differ from enumeration");
  };
  extract(1, 165, 2, 3, {0, 5, 7, 8, 10, 12});
  for (std::size_t i = 0; i < thm25_rows().size(); ++i) {
    const auto& e = thm25_rows()[i];
    extract(static_cast<int>(i) + 2, e.A, e.k, kThm25Degree[i], e.n);
  }
  extract(11, 1, 6, 3, {3, 4, 6});
  return rep;
}

ReproduceReport run_remark1088(const std::string&) {
  ReproduceReport rep;
  const Equation eq(1, 2, 1088);
  const SolutionSet got = enumerate_solutions(eq, 1000);
  const auto want = sols({{33, 0}, {40, 9}, {56, 11}, {72, 12}, {184, 15}});
  compare(rep, "remark", eq, {0, 9, 11, 12, 15}, got.exponents());
  if (got.solutions() != want) rep.diffs.push_back("x values differ");
  return rep;
}

ReproduceReport run_stiller(const std::string&) {
  ReproduceReport rep;
  const Equation six(15, 2, -119), five(35, 2, -391);
  const SolutionSet a = enumerate_solutions(six, 100), b = enumerate_solutions(five, 100);
  if (a.size() != 6) rep.diffs.push_back(six.to_text() + ": expected exactly 6 solutions, got " + std::to_string(a.size()));
  if (b.size() != 5) rep.diffs.push_back(five.to_text() + ": expected exactly 5 solutions, got " + std::to_string(b.size()));
  compare(rep, "stiller", six, {3, 4, 5, 6, 8, 15}, a.exponents());
  compare(rep, "stiller", five, {4, 5, 6, 11, 14}, b.exponents());
  return rep;
}

using Runner = std::function<ReproduceReport(const std::string&)>;

const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"thm2.2", run_thm22},         {"thm2.3", run_thm23},   {"thm2.5", run_thm25},
      {"thm3.2", run_thm32},         {"table13", run_table13}, {"tables1-12", run_tables},
      {"remark-1088", run_remark1088}, {"stiller", run_stiller},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& reproduce_targets() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, _] : runners()) v.push_back(n);
    return v;
  }();
  return names;
}

ReproduceReport reproduce(const std::string& target, const std::string& curve_path) {
  for (const auto& [name, run] : runners()) {
    if (name != target) continue;
    ReproduceReport rep = run(curve_path);
    rep.target = target;
    rep.pass = rep.diffs.empty();
    return rep;
  }
  throw DomainError("unknown reproduce target: " + target);
}

}  // namespace rnforge
