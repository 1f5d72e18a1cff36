#pragma once

// Divisor-method generator. Two solutions are planted at exponents q < p by
// splitting A*(k^p - k^q) = x_p^2 - x_q^2 into d * (K/d); each split yields a
// B, and the resulting equation is then enumerated for further solutions.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rnforge/model.hpp"

namespace rnforge {

struct ExponentRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  bool empty() const { return hi < lo; }
};

enum class SearchMode { general, unit_A, negative_A };

// Which B a divisor split produces. The default plants solutions at n = q and
// n = p; the alternative subtracts A*k^p instead and is kept for
// experimentation only.
enum class BFormula { planted, subtract_A_kp };

struct SearchConfig {
  Int k = 2;
  ExponentRange p_range{1, 30};
  // |A| values (A itself is negated in negative_A mode).
  ExponentRange A_range{1, 1000};
  // Lower seeded exponent for unit_A and negative_A modes.
  ExponentRange q_range{0, 0};
  std::int64_t n_max = 60;
  std::size_t min_solutions = 2;
  bool require_sqfree_gcd = true;
  SearchMode mode = SearchMode::general;
  bool require_coprime_B_k = false;
  bool exclude_B_divisible_k2 = true;  // unit_A only
  BFormula b_formula = BFormula::planted;
  unsigned workers = 1;
  std::optional<std::string> checkpoint_path;

  // Throws DomainError on an invalid configuration.
  void validate() const;
};

struct Candidate {
  Int A;
  Int k;
  std::int64_t q = 0;  // lower planted exponent
  std::int64_t p = 0;  // upper planted exponent
  Int d;
  Int x1;  // smaller planted root
  Int x2;  // larger planted root
  Int B;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct SearchHit {
  Equation equation;  // normalized
  SolutionSet solutions;
  Candidate source;
};

// Seeds at n = 0 and n = p for A > 0. One candidate per divisor
// d <= isqrt(K) of K = A(k^p - 1) with K/d = d (mod 2); B = 0 dropped.
std::vector<Candidate> candidates_for(const Int& A, const Int& k, std::int64_t p,
                                      BFormula formula = BFormula::planted);

// General seeding at n = q < p for either sign of A.
std::vector<Candidate> candidates_seeded(const Int& A, const Int& k, std::int64_t q, std::int64_t p,
                                         BFormula formula = BFormula::planted);
std::vector<Candidate> candidates_seeded(const Int& A, const Int& k, std::int64_t q, std::int64_t p,
                                         const Factorization& K_factorization, BFormula formula);

// Dispatches on cfg.mode. Output is deduplicated on the normalized equation
// and sorted by (solution count desc, A asc, |B| asc), independent of the
// worker count. Throws IoError when the checkpoint cannot be written; the
// checkpoint then holds every stripe committed so far.
std::vector<SearchHit> run_search(const SearchConfig& cfg);
std::vector<SearchHit> run_search_unit_A(const SearchConfig& cfg);
std::vector<SearchHit> run_search_negative_A(const SearchConfig& cfg);

// Strict ordering used for the final output.
bool hit_rank_less(const SearchHit& a, const SearchHit& b);

}  // namespace rnforge
