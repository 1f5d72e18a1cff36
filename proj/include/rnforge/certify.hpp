#pragma once

// Completeness certificates for x^2 = A*k^n + B.
//
// A certificate is an equation, a range n <= direct_range checked by plain
// enumeration, and an ordered list of steps covering every larger n. Steps
// act on a current equation that starts as the input; a reduction replaces it
// by (A, k, B/k^(2s)) and shifts exponents by 2s. Every other step covers one
// or both exponent parities of the current equation, exactly once each.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rnforge/model.hpp"
#include "rnforge/pell.hpp"

namespace rnforge {

struct ReductionStep {
  unsigned s = 0;
  Equation residual;
  std::int64_t low_range_checked = 0;  // n < 2s of the equation it reduces
};

enum class Parity { any, even, odd };

enum class ModularKind {
  linear,    // A*k^n + B is a non-residue mod m
  odd_pell,  // a^2 - A*k*b^2 = B has no solution mod m with b = k^t mod m
};

struct ModularCertificate {
  std::uint64_t modulus = 0;
  std::int64_t n0 = 0;
  Parity parity = Parity::any;
  ModularKind kind = ModularKind::linear;
};

struct FactorPair {
  Int d, e;
  friend bool operator==(const FactorPair&, const FactorPair&) = default;
};

struct FactorSolution {
  std::uint64_t m = 0;  // n = 2m
  Int x;
  friend bool operator==(const FactorSolution&, const FactorSolution&) = default;
};

// x^2 - k^(2m) = B. For B > 0 the pairs are d = x - k^m, e = x + k^m; for
// B < 0 they are d = k^m - x, e = k^m + x. Pairs list every d <= e with
// d*e = |B|.
struct FactorizationCertificate {
  Int k;
  Int B;
  std::vector<FactorPair> factor_pairs;
  std::vector<FactorSolution> admissible;
};

using CertificateStep = std::variant<ReductionStep, ModularCertificate, FactorizationCertificate, PowerSieveCertificate>;

struct CompletenessCertificate {
  Equation equation;
  std::int64_t direct_range = 0;
  std::vector<CertificateStep> steps;
  SolutionSet final_solution_set;
};

enum class Strategy { kadic_reduction, modular, factor_even, pell_sieve };

const std::vector<Strategy>& default_strategy();

std::optional<ReductionStep> reduce_kadic(const Equation& eq);

std::optional<ModularCertificate> modular_nonexistence(const Equation& eq, std::uint64_t m, std::int64_t n0,
                                                       Parity parity = Parity::any);

// Smallest m in [2, m_max] with a certificate.
std::optional<ModularCertificate> find_modular_certificate(const Equation& eq, std::int64_t n0, std::uint64_t m_max,
                                                           Parity parity = Parity::any);

FactorizationCertificate even_exponent_factor_solve(const Int& k, const Int& B);

// Odd exponents n = 2t + 1 of x^2 = A*k^n + B, as x^2 - (A k) y^2 = B with
// y = k^t.
std::optional<ModularCertificate> odd_exponent_obstruction(const Int& k, const Int& B, std::uint64_t m);
std::optional<ModularCertificate> odd_exponent_obstruction(const Equation& eq, std::uint64_t m);

struct CertifyOptions {
  std::uint64_t modulus_max = 10'000;
  PowerSieveOptions sieve;
};

struct CertifyResult {
  std::optional<CompletenessCertificate> certificate;
  SolutionSet partial;  // bounded enumeration up to the direct range
  std::string failure;
};

// n_direct < 0 picks a default from the reductions and the known solutions.
CertifyResult certify_equation(const Equation& eq, std::int64_t n_direct,
                               const std::vector<Strategy>& strategy = default_strategy(),
                               const CertifyOptions& opts = {});

// Content digest used as the certificate id of the final solution set.
std::string certificate_id(const Equation& eq, std::int64_t direct_range, const std::vector<CertificateStep>& steps);

// Empty string when the certificate re-verifies, else the first failed check.
std::string verify_certificate_detail(const CompletenessCertificate& cert);
bool verify_certificate(const CompletenessCertificate& cert);

std::string to_string(Parity p);
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

}  // namespace rnforge
