#pragma once

// Curve-table ingestion, the box scans behind the conjectures, and the
// reproduction targets that re-derive the published tables.

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "rnforge/jsonl.hpp"
#include "rnforge/model.hpp"

namespace rnforge {

enum class CurveKind {
  cubic,    // x^2 = Y^3 + C*a^2
  quartic,  // x^2 = a*Y^4 + C
};

struct CurvePointRecord {
  int table_id = 0;
  CurveKind kind = CurveKind::cubic;
  Int a, C, Y, x;
  friend bool operator==(const CurvePointRecord&, const CurvePointRecord&) = default;
};

bool on_curve(const CurvePointRecord& r);
std::string describe(const CurvePointRecord& r);

// CSV with header table_id,kind,a,C,Y,x; lines starting with '#' are
// comments. Throws FormatError with the line number, DataError naming any
// point that is off its curve.
std::vector<CurvePointRecord> parse_curve_tables(std::istream& in, const std::string& source = "<input>");
std::vector<CurvePointRecord> ingest_curve_tables(const std::string& path);
std::string default_curve_table_path();

// Solutions of x^2 = A*k^n + C read off the points with a = A*k^i, i < degree.
// Cubic points with Y = a*k^m give n = 3m + i and x = X/a; quartic points with
// Y = k^m give n = 4m + i. Every record with a matching multiplier and kind
// must share one C. Throws DataError on an inexact division or mixed C.
SolutionSet extract_equation_solutions(const std::vector<CurvePointRecord>& records, const Int& A, const Int& k,
                                       unsigned degree);

struct YnSolution {
  Int x, y;
  std::uint64_t n = 0;
  friend bool operator==(const YnSolution&, const YnSolution&) = default;
};

// x^2 = y^n + B with x >= 1, n >= 3, 2 <= y <= y_max and y^n <= value_cap,
// sorted by (n, y).
std::vector<YnSolution> conjecture_yn(const Int& B, std::uint64_t y_max, const Int& value_cap);

struct CensusConfig {
  std::vector<std::uint64_t> ks{2, 3, 5};
  std::int64_t A_min = -50, A_max = -1;
  std::int64_t B_min = 1, B_max = 5000;
  std::int64_t n_max = 100;  // A < 0 also stops at auto_bound
  std::size_t conjectured_max = 4;
  unsigned workers = 1;
};

struct CensusEntry {
  Equation equation;
  std::vector<Solution> solutions;
};

struct CensusResult {
  std::map<std::size_t, std::uint64_t> histogram;  // solution count -> equations
  std::size_t max_count = 0;
  std::uint64_t equations = 0;
  std::vector<CensusEntry> extremal;        // equations reaching max_count, first 20
  std::vector<CensusEntry> counterexamples;  // count > conjectured_max
};

// Every (k, A, B) in the box with A, B nonzero and not both negative.
CensusResult census_max_solutions(const CensusConfig& cfg);

struct ReproduceReport {
  std::string target;
  bool pass = false;
  std::vector<std::string> diffs;
  std::vector<Json> rows;
};

const std::vector<std::string>& reproduce_targets();
// Throws DomainError for an unknown target.
ReproduceReport reproduce(const std::string& target, const std::string& curve_path = default_curve_table_path());

Json report_record(const ReproduceReport& r);
Json conjecture_record(const Int& B, const YnSolution& s);
Json census_record(const CensusConfig& cfg, const CensusResult& r);

struct RunRecord {
  std::string command;
  std::map<std::string, std::string> config;
  std::string started, finished;
  std::vector<Json> results;
  std::string code_version;
};

Json run_record_json(const RunRecord& r);
std::string utc_timestamp();
inline constexpr const char* kCodeVersion = "rnforge 0.1.0";

// Appends one JSON line. Throws IoError.
void append_jsonl(const std::string& path, const Json& j);

}  // namespace rnforge
