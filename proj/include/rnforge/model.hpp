#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rnforge/arith.hpp"

namespace rnforge {

// x^2 = A*k^n + B with A, B nonzero, k >= 2 and A, B not both negative.
class Equation {
 public:
  Equation(Int A, Int k, Int B);

  const Int& A() const { return A_; }
  const Int& k() const { return k_; }
  const Int& B() const { return B_; }

  // A*k^n + B.
  Int value_at(std::uint64_t n) const;

  // Canonical text "x^2 = A*k^n + B" (or "- |B|" when B < 0).
  std::string to_text() const;
  static Equation parse(std::string_view text);

  friend bool operator==(const Equation&, const Equation&) = default;
  friend auto operator<=>(const Equation& a, const Equation& b) {
    if (auto c = cmp(a.A_, b.A_); c != 0) return c <=> 0;
    if (auto c = cmp(a.k_, b.k_); c != 0) return c <=> 0;
    return cmp(a.B_, b.B_) <=> 0;
  }

 private:
  Int A_, k_, B_;
};

struct Solution {
  Int x;
  std::uint64_t n = 0;

  friend bool operator==(const Solution&, const Solution&) = default;
};

struct BoundedCompleteness {
  std::int64_t n_max = 0;
  friend bool operator==(const BoundedCompleteness&, const BoundedCompleteness&) = default;
};

struct CertifiedCompleteness {
  std::string certificate_id;
  friend bool operator==(const CertifiedCompleteness&, const CertifiedCompleteness&) = default;
};

using Completeness = std::variant<BoundedCompleteness, CertifiedCompleteness>;

// Verified solutions in strictly increasing n.
class SolutionSet {
 public:
  // Checks every solution against the equation, ordering and the bound.
  SolutionSet(Equation equation, std::vector<Solution> solutions, Completeness completeness);

  const Equation& equation() const { return equation_; }
  const std::vector<Solution>& solutions() const { return solutions_; }
  const Completeness& completeness() const { return completeness_; }
  std::size_t size() const { return solutions_.size(); }

  std::vector<std::uint64_t> exponents() const;
  // Solutions with x > 0 and n > 0.
  std::size_t positive_count() const;

  friend bool operator==(const SolutionSet&, const SolutionSet&) = default;

 private:
  Equation equation_;
  std::vector<Solution> solutions_;
  Completeness completeness_;
};

// Throws DomainError for n < 0.
bool verify_solution(const Equation& eq, const Int& x, std::int64_t n);

struct Normalized {
  Equation equation;
  Int scale;  // d with d^2 | gcd(A, B) maximal
};

Normalized normalize(const Equation& eq);

// Largest n with |A|*k^n <= B, or -1 when |A| > B. Requires A < 0.
std::int64_t auto_bound(const Equation& eq);

inline constexpr std::int64_t kDefaultNMax = 100;

const std::vector<std::uint64_t>& default_sieve_moduli();

// Precomputed square-residue tables for a fixed list of moduli, reusable
// across many equations.
class SquareSieve {
 public:
  SquareSieve() = default;
  explicit SquareSieve(std::span<const std::uint64_t> moduli);

  static const SquareSieve& standard();

  std::size_t size() const { return residues_.size(); }
  const SquareResidues& at(std::size_t i) const { return residues_[i]; }

 private:
  std::vector<SquareResidues> residues_;
};

// All solutions with 0 <= n <= n_max (and n <= auto_bound when A < 0). The
// sieve only skips values that are provably non-square.
SolutionSet enumerate_solutions(const Equation& eq, std::int64_t n_max);
SolutionSet enumerate_solutions(const Equation& eq, std::int64_t n_max, std::span<const std::uint64_t> sieve_moduli);
SolutionSet enumerate_solutions(const Equation& eq, std::int64_t n_max, const SquareSieve& sieve);

// Number of solutions with n <= n_max; stops early once `stop_at` is reached.
std::size_t count_solutions(const Equation& eq, std::int64_t n_max, const SquareSieve& sieve,
                            std::size_t stop_at = SIZE_MAX);

}  // namespace rnforge
