#include "rnforge/app.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>

#include "rnforge/errors.hpp"
#include "rnforge/parallel.hpp"

namespace rnforge {

bool on_curve(const CurvePointRecord& r) {
  if (r.kind == CurveKind::cubic) return r.x * r.x == r.Y * r.Y * r.Y + r.C * r.a * r.a;
  const Int y2 = r.Y * r.Y;
  return r.x * r.x == r.a * y2 * y2 + r.C;
}

std::string describe(const CurvePointRecord& r) {
  std::ostringstream out;
  out << "table " << r.table_id << " " << (r.kind == CurveKind::cubic ? "cubic" : "quartic") << " a=" << r.a
      << " C=" << r.C << " point (" << r.Y << ", " << r.x << ")";
  return out.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<CurvePointRecord> parse_curve_tables(std::istream& in, const std::string& source) {
  std::vector<CurvePointRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(lineno);
    auto f = split_csv(line);
    if (!header) {
      if (f != std::vector<std::string>{"table_id", "kind", "a", "C", "Y", "x"})
        throw FormatError(where + ": expected header table_id,kind,a,C,Y,x");
      header = true;
      continue;
    }
    if (f.size() != 6) throw FormatError(where + ": expected 6 fields, got " + std::to_string(f.size()));
    CurvePointRecord r;
    try {
      r.table_id = std::stoi(f[0]);
      r.a = parse_int(f[2]);
      r.C = parse_int(f[3]);
      r.Y = parse_int(f[4]);
      r.x = parse_int(f[5]);
    } catch (const std::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    if (f[1] == "cubic") {
      r.kind = CurveKind::cubic;
    } else if (f[1] == "quartic") {
      r.kind = CurveKind::quartic;
    } else {
      throw FormatError(where + ": unknown curve kind '" + f[1] + "'");
    }
    if (r.x < 0) throw FormatError(where + ": x must be non-negative");
    if (!on_curve(r)) throw DataError(where + ": " + describe(r) + " is not on its curve");
    out.push_back(std::move(r));
  }
  if (!header) throw FormatError(source + ": missing header");
  return out;
}

std::vector<CurvePointRecord> ingest_curve_tables(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_curve_tables(in, path);
}

std::string default_curve_table_path() { return std::string(RNFORGE_DATA_DIR) + "/curve_tables.csv"; }

SolutionSet extract_equation_solutions(const std::vector<CurvePointRecord>& records, const Int& A, const Int& k,
                                       unsigned degree) {
  if (degree != 3 && degree != 4) throw DomainError("extract_equation_solutions: degree must be 3 or 4");
  const CurveKind kind = degree == 3 ? CurveKind::cubic : CurveKind::quartic;
  std::vector<Int> mult;
  for (unsigned i = 0; i < degree; ++i) mult.push_back(A * ipow(k, i));
  std::optional<Int> C;
  std::vector<Solution> found;
  for (const auto& r : records) {
    if (r.kind != kind) continue;
    const auto it = std::find(mult.begin(), mult.end(), r.a);
    if (it == mult.end()) continue;
    if (C && *C != r.C) throw DataError("mixed constants among records: " + describe(r));
    C = r.C;
    const std::uint64_t i = static_cast<std::uint64_t>(it - mult.begin());
    if (kind == CurveKind::cubic) {
      if (r.Y % r.a != 0) continue;
      const auto m = is_power_of(r.Y / r.a, k);
      if (!m) continue;
      if (r.x % r.a != 0) throw DataError("x not divisible by a: " + describe(r));
      found.push_back({r.x / r.a, 3 * *m + i});
    } else {
      const auto m = is_power_of(abs(r.Y), k);
      if (!m) continue;
      found.push_back({r.x, 4 * *m + i});
    }
  }
  if (!C) throw DataError("no curve records for multiplier " + to_string(A));
  std::sort(found.begin(), found.end(), [](const Solution& a, const Solution& b) { return a.n < b.n; });
  found.erase(std::unique(found.begin(), found.end()), found.end());
  std::string tables;
  for (const auto& r : records)
    if (r.kind == kind && std::find(mult.begin(), mult.end(), r.a) != mult.end() &&
        tables.find("," + std::to_string(r.table_id)) == std::string::npos)
      tables += "," + std::to_string(r.table_id);
  try {
    return SolutionSet(Equation(A, k, *C), std::move(found), CertifiedCompleteness{"curve-table" + tables});
  } catch (const DomainError& e) {
    throw DataError(std::string("extracted solutions inconsistent: ") + e.what());
  }
}

std::vector<YnSolution> conjecture_yn(const Int& B, std::uint64_t y_max, const Int& value_cap) {
  std::vector<YnSolution> out;
  for (std::uint64_t n = 3; ipow(Int(2), n) <= value_cap; ++n) {
    for (std::uint64_t y = 2; y <= y_max; ++y) {
      const Int p = ipow(Int(y), n);
      if (p > value_cap) break;
      const Int v = p + B;
      if (v <= 0) continue;
      if (auto x = is_square(v)) out.push_back({*x, Int(y), n});
    }
  }
  return out;
}

CensusResult census_max_solutions(const CensusConfig& cfg) {
  std::vector<std::pair<std::uint64_t, std::int64_t>> cells;
  for (auto k : cfg.ks)
    for (std::int64_t A = cfg.A_min; A <= cfg.A_max; ++A)
      if (A != 0) cells.emplace_back(k, A);
  std::vector<CensusResult> part(cells.size());
  const SquareSieve& sieve = SquareSieve::standard();
  parallel_for(cells.size(), cfg.workers, [&](std::size_t c) {
    auto& res = part[c];
    const auto [k, A] = cells[c];
    for (std::int64_t B = cfg.B_min; B <= cfg.B_max; ++B) {
      if (B == 0 || (A < 0 && B < 0)) continue;
      const Equation eq{Int(A), Int(k), Int(B)};
      const SolutionSet set = enumerate_solutions(eq, cfg.n_max, sieve);
      const std::size_t n = set.size();
      ++res.equations;
      ++res.histogram[n];
      if (n > res.max_count) {
        res.max_count = n;
        res.extremal.clear();
      }
      if (n == res.max_count && res.extremal.size() < 20) res.extremal.push_back({eq, set.solutions()});
      if (n > cfg.conjectured_max) res.counterexamples.push_back({eq, set.solutions()});
    }
  });
  CensusResult out;
  for (auto& r : part) {
    out.equations += r.equations;
    for (const auto& [n, c] : r.histogram) out.histogram[n] += c;
    if (r.equations == 0) continue;
    if (r.max_count > out.max_count) {
      out.max_count = r.max_count;
      out.extremal.clear();
    }
    if (r.max_count == out.max_count)
      for (auto& e : r.extremal)
        if (out.extremal.size() < 20) out.extremal.push_back(std::move(e));
    for (auto& e : r.counterexamples) out.counterexamples.push_back(std::move(e));
  }
  return out;
}

Json report_record(const ReproduceReport& r) {
  return Json{{"type", "report"},
              {"target", r.target},
              {"status", r.pass ? "pass" : "fail"},
              {"diffs", r.diffs},
              {"rows", Json(r.rows)}};
}

Json conjecture_record(const Int& B, const YnSolution& s) {
  return Json{{"type", "yn_solution"}, {"B", int_json(B)}, {"x", int_json(s.x)}, {"y", int_json(s.y)},
              {"n", int_json(s.n)}};
}

namespace {

Json census_entry_json(const CensusEntry& e) {
  return Json{{"equation", e.equation.to_text()}, {"solutions", solution_list_json(e.solutions)}};
}

}  // namespace

Json census_record(const CensusConfig& cfg, const CensusResult& r) {
  Json hist = Json::object();
  for (const auto& [n, c] : r.histogram) hist[std::to_string(n)] = std::to_string(c);
  Json ks = Json::array();
  for (auto k : cfg.ks) ks.push_back(int_json(k));
  Json extremal = Json::array(), counter = Json::array();
  for (const auto& e : r.extremal) extremal.push_back(census_entry_json(e));
  for (const auto& e : r.counterexamples) counter.push_back(census_entry_json(e));
  return Json{{"type", "census"},
              {"k", ks},
              {"A_range", {int_json(cfg.A_min), int_json(cfg.A_max)}},
              {"B_range", {int_json(cfg.B_min), int_json(cfg.B_max)}},
              {"n_max", int_json(cfg.n_max)},
              {"equations", int_json(r.equations)},
              {"histogram", hist},
              {"max_count", int_json(static_cast<std::uint64_t>(r.max_count))},
              {"conjectured_max", int_json(static_cast<std::uint64_t>(cfg.conjectured_max))},
              {"extremal", extremal},
              {"counterexamples", counter}};
}

Json run_record_json(const RunRecord& r) {
  Json config = Json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  return Json{{"type", "run"},       {"command", r.command},         {"config", config},
              {"started", r.started}, {"finished", r.finished},       {"results", Json(r.results)},
              {"code_version", r.code_version}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void append_jsonl(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open " + path);
  out << dump_line(j) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace rnforge
