#include "rnforge/model.hpp"

#include <algorithm>
#include <cctype>

#include "rnforge/errors.hpp"

namespace rnforge {

Equation::Equation(Int A, Int k, Int B) : A_(std::move(A)), k_(std::move(k)), B_(std::move(B)) {
  if (k_ < 2) throw DomainError("equation requires k >= 2, got " + to_string(k_));
  if (A_ == 0) throw DomainError("equation requires A != 0");
  if (B_ == 0) throw DomainError("equation requires B != 0");
  if (A_ < 0 && B_ < 0) throw DomainError("equation requires A, B not both negative");
}

Int Equation::value_at(std::uint64_t n) const { return A_ * ipow(k_, n) + B_; }

std::string Equation::to_text() const {
  std::string out = "x^2 = " + to_string(A_) + "*" + to_string(k_) + "^n ";
  if (B_ < 0) {
    out += "- " + to_string(Int(-B_));
  } else {
    out += "+ " + to_string(B_);
  }
  return out;
}

Equation Equation::parse(std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  auto fail = [&]() -> Equation { throw FormatError("cannot parse equation '" + std::string(text) + "'"); };
  const std::string prefix = "x^2=";
  if (s.rfind(prefix, 0) != 0) return fail();
  std::size_t star = s.find('*', prefix.size());
  std::size_t caret = s.find("^n", star == std::string::npos ? 0 : star);
  if (star == std::string::npos || caret == std::string::npos) return fail();
  std::string a_text = s.substr(prefix.size(), star - prefix.size());
  std::string k_text = s.substr(star + 1, caret - star - 1);
  std::string b_text = s.substr(caret + 2);
  if (b_text.empty() || (b_text[0] != '+' && b_text[0] != '-')) return fail();
  Int A = parse_int(a_text);
  Int k = parse_int(k_text);
  Int B;
  if (b_text.size() > 1 && b_text[0] == '+' && b_text[1] == '-') {
    B = parse_int(b_text.substr(1));
  } else {
    B = parse_int(b_text);
  }
  return Equation(A, k, B);
}

SolutionSet::SolutionSet(Equation equation, std::vector<Solution> solutions, Completeness completeness)
    : equation_(std::move(equation)), solutions_(std::move(solutions)), completeness_(std::move(completeness)) {
  for (std::size_t i = 0; i < solutions_.size(); ++i) {
    const Solution& s = solutions_[i];
    if (s.x < 0) throw DomainError("solution x must be non-negative");
    if (i > 0 && s.n <= solutions_[i - 1].n) throw DomainError("solutions must have strictly increasing n");
    if (s.x * s.x != equation_.value_at(s.n)) {
      throw DomainError("(" + to_string(s.x) + ", " + std::to_string(s.n) + ") does not solve " + equation_.to_text());
    }
  }
  if (const auto* b = std::get_if<BoundedCompleteness>(&completeness_)) {
    if (!solutions_.empty() && static_cast<std::int64_t>(solutions_.back().n) > b->n_max) {
      throw DomainError("solution beyond the bounded-completeness limit");
    }
  }
}

std::vector<std::uint64_t> SolutionSet::exponents() const {
  std::vector<std::uint64_t> out;
  out.reserve(solutions_.size());
  for (const auto& s : solutions_) out.push_back(s.n);
  return out;
}

std::size_t SolutionSet::positive_count() const {
  return static_cast<std::size_t>(
      std::count_if(solutions_.begin(), solutions_.end(), [](const Solution& s) { return s.x > 0 && s.n > 0; }));
}

bool verify_solution(const Equation& eq, const Int& x, std::int64_t n) {
  if (n < 0) throw DomainError("verify_solution: negative exponent");
  return x * x == eq.value_at(static_cast<std::uint64_t>(n));
}

Normalized normalize(const Equation& eq) {
  Int g;
  mpz_gcd(g.get_mpz_t(), eq.A().get_mpz_t(), eq.B().get_mpz_t());
  Int d = square_cofactor_root(g);
  if (d == 1) return {eq, Int(1)};
  Int d2 = d * d;
  return {Equation(Int(eq.A() / d2), eq.k(), Int(eq.B() / d2)), d};
}

std::int64_t auto_bound(const Equation& eq) {
  if (eq.A() >= 0) throw DomainError("auto_bound requires A < 0");
  const Int a = abs(eq.A());
  if (a > eq.B()) return -1;
  std::int64_t n = 0;
  Int v = a * eq.k();
  while (v <= eq.B()) {
    ++n;
    v *= eq.k();
  }
  return n;
}

const std::vector<std::uint64_t>& default_sieve_moduli() {
  static const std::vector<std::uint64_t> moduli{9, 5, 7, 13, 16, 11, 63};
  return moduli;
}

SquareSieve::SquareSieve(std::span<const std::uint64_t> moduli) {
  residues_.reserve(moduli.size());
  for (std::uint64_t m : moduli) residues_.push_back(square_residues(m));
}

const SquareSieve& SquareSieve::standard() {
  static const SquareSieve sieve(default_sieve_moduli());
  return sieve;
}

namespace {

// Walks n = 0..limit, invoking on_square(x, n) for every square value.
// Returns false from on_square to stop early.
template <class OnSquare>
void walk_squares(const Equation& eq, std::int64_t n_max, const SquareSieve& sieve, OnSquare&& on_square) {
  std::int64_t limit = n_max;
  if (eq.A() < 0) limit = std::min(limit, auto_bound(eq));
  if (limit < 0) return;

  struct Lane {
    std::uint64_t m, a, b, k, pk;
    const SquareResidues* squares;
  };
  std::vector<Lane> lanes;
  lanes.reserve(sieve.size());
  for (std::size_t i = 0; i < sieve.size(); ++i) {
    const SquareResidues& sq = sieve.at(i);
    const std::uint64_t m = sq.modulus();
    lanes.push_back({m, mod_u64(eq.A(), m), mod_u64(eq.B(), m), mod_u64(eq.k(), m), 1 % m, &sq});
  }

  const bool small_k = eq.k().fits_ulong_p();
  const unsigned long k_ui = small_k ? eq.k().get_ui() : 0;
  Int term = eq.A();  // A*k^n
  Int value;
  for (std::int64_t n = 0; n <= limit; ++n) {
    bool candidate = true;
    for (Lane& lane : lanes) {
      if (candidate) {
        const std::uint64_t r = (lane.a * lane.pk + lane.b) % lane.m;
        if (!lane.squares->contains(r)) candidate = false;
      }
      lane.pk = (lane.pk * lane.k) % lane.m;
    }
    if (candidate) {
      value = term + eq.B();
      if (value >= 0 && mpz_perfect_square_p(value.get_mpz_t())) {
        Int x;
        mpz_sqrt(x.get_mpz_t(), value.get_mpz_t());
        if (!on_square(std::move(x), static_cast<std::uint64_t>(n))) return;
      }
    }
    if (small_k) {
      mpz_mul_ui(term.get_mpz_t(), term.get_mpz_t(), k_ui);
    } else {
      term *= eq.k();
    }
  }
}

}  // namespace

SolutionSet enumerate_solutions(const Equation& eq, std::int64_t n_max) {
  return enumerate_solutions(eq, n_max, SquareSieve::standard());
}

SolutionSet enumerate_solutions(const Equation& eq, std::int64_t n_max, std::span<const std::uint64_t> sieve_moduli) {
  return enumerate_solutions(eq, n_max, SquareSieve(sieve_moduli));
}

SolutionSet enumerate_solutions(const Equation& eq, std::int64_t n_max, const SquareSieve& sieve) {
  if (n_max < 0) throw DomainError("enumerate_solutions: n_max must be >= 0");
  std::vector<Solution> found;
  walk_squares(eq, n_max, sieve, [&](Int x, std::uint64_t n) {
    found.push_back({std::move(x), n});
    return true;
  });
  return SolutionSet(eq, std::move(found), BoundedCompleteness{n_max});
}

std::size_t count_solutions(const Equation& eq, std::int64_t n_max, const SquareSieve& sieve, std::size_t stop_at) {
  std::size_t count = 0;
  walk_squares(eq, n_max, sieve, [&](const Int&, std::uint64_t) { return ++count < stop_at; });
  return count;
}

}  // namespace rnforge
