#pragma once

// Parametric families of x^2 = A*k^n + B with several known solutions, and a
// batch driver that checks promised solutions and looks for extra ones.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rnforge/arith.hpp"
#include "rnforge/model.hpp"

namespace rnforge {

using Rat = mpq_class;

// Polynomial over Q, coefficient i of t^i, no trailing zeros.
class RationalPoly {
 public:
  RationalPoly() = default;
  explicit RationalPoly(std::vector<Rat> coefficients);

  static RationalPoly constant(const Rat& c);
  static RationalPoly monomial(const Rat& c, std::size_t degree);
  static RationalPoly t() { return monomial(Rat(1), 1); }

  const std::vector<Rat>& coefficients() const { return c_; }
  // -1 for the zero polynomial.
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }

  Rat eval(const Rat& at) const;
  RationalPoly pow(unsigned e) const;

  friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator-(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b);
  friend bool operator==(const RationalPoly& a, const RationalPoly& b) { return a.c_ == b.c_; }

  std::string to_text() const;

 private:
  void trim();
  std::vector<Rat> c_;
};

// f = q*g + r with deg r < deg g. Throws DomainError when g = 0.
std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& f, const RationalPoly& g);

enum class FamilyId { four, k2_five_1, k2_five_2, beukers, even_k, neg_poly, neg_conj_1, neg_conj_2 };

std::string to_string(FamilyId id);
FamilyId parse_family(const std::string& name);

struct FamilyInstance {
  FamilyId family;
  std::vector<std::pair<std::string, std::int64_t>> params;
  Equation equation;
  // Distinct exponents, increasing, x >= 0.
  std::vector<Solution> promised;
  // Two of the listed formulas give the same exponent.
  bool degenerate = false;
};

// The four-point construction at (1, k^p, k^q, k^r).
FamilyInstance construct_four(const Int& k, std::uint64_t p, std::uint64_t q, std::uint64_t r);

FamilyInstance family_k2_five(int variant, std::uint64_t m);

// k = 4t^2 + eps. Throws DomainError when (k^m - eps)/(4t) is not integral,
// which happens exactly for eps = -1 and even m.
FamilyInstance family_beukers(std::uint64_t t, int eps, std::uint64_t m);

FamilyInstance family_even_k(std::uint64_t t, std::uint64_t m);

FamilyInstance family_neg_conj(int variant, std::uint64_t m);

struct PolySolution {
  RationalPoly x;
  std::uint64_t n = 0;
};

// x^2 + k^n = H with k = t^2 + 1, in Q[t].
struct NegPolyFamily {
  std::uint64_t m = 0;
  RationalPoly k;
  RationalPoly H;
  std::vector<PolySolution> solutions;
};

NegPolyFamily family_neg_poly(std::uint64_t m);

// The integer equation x^2 = -k^n + H(t) at an integer t >= 1. Throws
// DomainError when H(t) or one of the x values is not an integer.
FamilyInstance family_neg_poly_at(std::uint64_t m, std::uint64_t t);

struct FamilyReport {
  FamilyInstance instance;
  std::int64_t n_max = 0;
  bool promised_ok = false;
  std::vector<Solution> found;
  std::vector<Solution> extra;    // found but not promised
  std::vector<Solution> missing;  // promised but not found
};

// n_max < 0 means 2 * (largest promised n) + 16.
FamilyReport verify_family_instance(const FamilyInstance& inst, std::int64_t n_max = -1);
std::vector<FamilyReport> verify_family_range(const std::vector<FamilyInstance>& grid, std::int64_t n_max = -1,
                                              unsigned workers = 1);

}  // namespace rnforge
