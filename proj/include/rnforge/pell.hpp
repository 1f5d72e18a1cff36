#pragma once

// Generalized Pell machinery: x^2 - D*y^2 = N with D > 0 nonsquare.
//
// Solutions of x^2 = A*k^n + B with n = 2t + r are the solutions of
// x^2 - (A*k^r)*y^2 = B with y = k^t. The power sieve shows that only finitely
// many orbit elements have y a power of k and lists them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rnforge/arith.hpp"
#include "rnforge/model.hpp"

namespace rnforge {

struct PellProblem {
  Int D;
  Int N;

  // Throws DomainError when D < 2, D is a square, or N = 0.
  void validate() const;
  friend bool operator==(const PellProblem&, const PellProblem&) = default;
};

struct PellUnit {
  Int D;
  Int u;
  Int v;
  friend bool operator==(const PellUnit&, const PellUnit&) = default;
};

struct PellClass {
  PellProblem problem;
  Int x0;
  Int y0;
  PellUnit unit;
};

struct ContinuedFraction {
  Int a0;
  std::vector<Int> period;
};

ContinuedFraction cf_sqrt(const Int& D);

// Minimal u, v >= 1 with u^2 - D*v^2 = 1.
PellUnit pell_fundamental(const Int& D);

// Orbit-minimal representatives, one per class under (x, y) -> unit*(x, y),
// sign change and conjugation, sorted by (y0, x0). Every solution with y > 0
// lies, up to the sign of x, on a branch of exactly one class.
std::vector<PellClass> pell_class_reps(const PellProblem& pr);

// The scan limit isqrt(|N|(u+1)/(2D)) + 1 used for representatives.
Int class_scan_bound(const PellProblem& pr, const PellUnit& unit);

// One recurrence step (x, y) -> (u*x + D*v*y, v*x + u*y).
void orbit_step(const PellUnit& unit, Int& x, Int& y);

// First `count` elements (x_i, y_i) of the forward orbit of the representative.
std::vector<std::pair<Int, Int>> orbit_unfold(const PellClass& cl, std::size_t count);

// The starting points whose forward orbits together carry every |y| of the
// class: the representative itself and, unless y0 = 0, the conjugate shifted
// by one unit. Signs are chosen so each branch's y is eventually positive.
std::vector<std::pair<Int, Int>> class_branches(const PellClass& cl);

struct OrbitModulus {
  std::uint64_t m = 0;
  std::uint64_t period = 0;
  std::vector<std::uint64_t> y_residues;
};

inline constexpr std::uint64_t kOrbitPeriodCap = 10'000'000;

// Exact period of y_i mod m along the representative's forward orbit.
// Throws ResourceError past kOrbitPeriodCap.
OrbitModulus orbit_mod(const PellClass& cl, std::uint64_t m);

// Order of the orbit matrix [[u, D v], [v, u]] modulo m, or nullopt past cap.
std::optional<std::uint64_t> orbit_matrix_order(const PellUnit& unit, std::uint64_t m, std::uint64_t cap);

struct SieveProblem {
  PellProblem problem;
  unsigned r = 0;  // n = 2t + r
};

// Orbit elements i < direct_steps are checked one by one; from direct_steps
// on y is positive, increasing and at least k^depth.
struct SieveBranch {
  std::size_t class_index = 0;
  Int x_start;
  Int y_start;
  std::uint64_t direct_steps = 0;
  std::vector<std::uint64_t> hit_indices;  // direct indices with |y| a power of k
  // open[s] are the orbit-index residues mod periods[s] still possible
  // after s sieve steps; the last entry must be empty.
  std::vector<std::vector<std::uint64_t>> open;
};

struct SieveProblemCertificate {
  SieveProblem source;
  PellUnit unit;
  std::vector<PellClass> classes;
  std::vector<SieveBranch> branches;
  std::uint64_t base_modulus = 0;  // k^depth
  std::vector<std::uint64_t> moduli;  // auxiliary, in order of use
  std::vector<std::uint64_t> periods;  // periods[0] for base, then one per modulus
};

struct PowerSieveCertificate {
  Int k;
  unsigned depth = 0;
  std::vector<SieveProblemCertificate> problems;
  // (x, n) with x >= 0 in increasing n.
  std::vector<Solution> solutions;

  std::vector<std::uint64_t> resulting_n_set() const;
};

struct PowerSieveOptions {
  unsigned j_max = 12;
  std::vector<std::uint64_t> aux_moduli;  // empty: auto-select
  std::uint64_t aux_limit = 10'000;
  std::uint64_t aux_period_cap = 20'000;
  std::uint64_t combined_period_cap = 200'000;
  std::uint64_t direct_check_bound = 64;  // max direct steps per branch
};

struct PowerSieveResult {
  std::optional<PowerSieveCertificate> certificate;
  std::string failure;  // set when no certificate
};

PowerSieveResult power_sieve(const std::vector<SieveProblem>& problems, const Int& k,
                             const PowerSieveOptions& opts = {});

// The two problems r = 0, 1 of x^2 = A*k^n + B. Throws DomainError when A < 1
// or A*k^r is a square.
std::vector<SieveProblem> sieve_problems_for(const Equation& eq);

// Re-derives every claim from scratch along a separate code path: unit
// minimality, completeness of the class list, branch starts, the direct
// regions, each period, and every exclusion. Returns an empty string on
// success, otherwise the first failed check.
std::string verify_power_sieve(const PowerSieveCertificate& cert);

}  // namespace rnforge
