#pragma once

// Exact integer primitives shared by every other module. All values are
// arbitrary precision (GMP); nothing here touches floating point.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rnforge {

using Int = mpz_class;

std::string to_string(const Int& v);

// Parses an optionally signed decimal integer. Throws FormatError.
Int parse_int(std::string_view text);

Int ipow(const Int& base, std::uint64_t exponent);

// Non-negative residue of a modulo m (m >= 1).
std::uint64_t mod_u64(const Int& a, std::uint64_t m);

// floor(sqrt(n)); throws DomainError for n < 0.
Int isqrt(const Int& n);

// The non-negative root when n is a perfect square.
std::optional<Int> is_square(const Int& n);

// Deterministic Miller-Rabin with the first thirteen prime bases, which is
// exact below 3.3e24. Larger inputs additionally go through GMP's
// Baillie-PSW based test.
bool is_prime(const Int& n);

struct PrimePower {
  Int prime;
  unsigned exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

class Factorization {
 public:
  // The unit 1.
  Factorization() = default;

  // Validates the invariants and recomputes the value.
  static Factorization from_parts(int sign, std::vector<PrimePower> factors);

  const Int& value() const { return value_; }
  int sign() const { return sign_; }
  const std::vector<PrimePower>& factors() const { return factors_; }

  std::uint64_t divisor_count() const;

  Factorization operator*(const Factorization& other) const;

  friend bool operator==(const Factorization& a, const Factorization& b) {
    return a.sign_ == b.sign_ && a.factors_ == b.factors_;
  }

 private:
  Int value_ = 1;
  int sign_ = 1;
  std::vector<PrimePower> factors_;
};

// Trial division to 1e6, then Brent's variant of Pollard rho with fixed
// seeds. Throws DomainError for n = 0.
Factorization factorize(const Int& n);

// All positive divisors in increasing order.
std::vector<Int> divisors(const Factorization& f);

// The square-free s with n = s*m^2, carrying the sign of n.
Int sqfree_part(const Int& n);

// Largest d >= 1 with d^2 | n (n != 0).
Int square_cofactor_root(const Int& n);

// t with k^t = y, if any.
std::optional<std::uint64_t> is_power_of(const Int& y, const Int& k);

// The eventually periodic sequence k^n mod m, split into a pre-period and a
// cycle.
struct ResidueCycle {
  std::vector<std::uint64_t> tail;
  std::vector<std::uint64_t> cycle;

  std::uint64_t at(std::uint64_t n) const;
  std::size_t length() const { return tail.size() + cycle.size(); }
};

ResidueCycle power_residue_cycle(const Int& k, std::uint64_t m);

inline constexpr std::uint64_t kDefaultResidueCap = 1'000'000;

// Membership table of {x^2 mod m}.
class SquareResidues {
 public:
  SquareResidues() = default;
  explicit SquareResidues(std::uint64_t modulus);

  std::uint64_t modulus() const { return modulus_; }
  bool contains(std::uint64_t residue) const { return mask_[residue % modulus_]; }
  std::vector<std::uint64_t> values() const;

 private:
  std::uint64_t modulus_ = 1;
  std::vector<bool> mask_;
};

// Throws ResourceError when m exceeds cap, DomainError when m < 2.
SquareResidues square_residues(std::uint64_t m, std::uint64_t cap = kDefaultResidueCap);

}  // namespace rnforge
