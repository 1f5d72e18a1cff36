#include "rnforge/arith.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "rnforge/errors.hpp"

namespace rnforge {

namespace {

constexpr std::uint32_t kTrialLimit = 1'000'000;

const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<bool> composite(kTrialLimit + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i <= kTrialLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j <= kTrialLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

bool miller_rabin_round(const Int& n, const Int& d, unsigned s, unsigned long base) {
  Int a = base;
  if (a % n == 0) return true;
  Int x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  const Int n_minus_1 = n - 1;
  if (x == 1 || x == n_minus_1) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = x * x % n;
    if (x == n_minus_1) return true;
    if (x == 1) return false;
  }
  return false;
}

// Brent's cycle-finding rho; returns a nontrivial factor or n on failure.
Int rho_brent(const Int& n, unsigned long c) {
  if (n % 2 == 0) return 2;
  Int y = 2, x, g = 1, q = 1, ys;
  const unsigned long m = 128;
  unsigned long r = 1;
  auto f = [&](const Int& v) { return Int((v * v + c) % n); };
  while (g == 1) {
    x = y;
    for (unsigned long i = 0; i < r; ++i) y = f(y);
    unsigned long k = 0;
    while (k < r && g == 1) {
      ys = y;
      for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
        y = f(y);
        Int diff = abs(x - y);
        q = q * diff % n;
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += m;
    }
    r *= 2;
    if (r > (1ul << 26)) break;
  }
  if (g == n || g == 0) {
    do {
      ys = f(ys);
      Int diff = abs(x - ys);
      mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g;
}

void split_into(const Int& n, std::vector<Int>& primes) {
  if (n == 1) return;
  if (is_prime(n)) {
    primes.push_back(n);
    return;
  }
  if (auto r = is_square(n)) {
    split_into(*r, primes);
    split_into(*r, primes);
    return;
  }
  for (unsigned long c = 1; c < 1000; ++c) {
    Int g = rho_brent(n, c);
    if (g != n && g != 1) {
      split_into(g, primes);
      split_into(Int(n / g), primes);
      return;
    }
  }
  throw ResourceError("factorize: rho failed on " + to_string(n));
}

}  // namespace

std::string to_string(const Int& v) { return v.get_str(10); }

Int parse_int(std::string_view text) {
  std::string s(text);
  auto is_digit = [](char ch) { return ch >= '0' && ch <= '9'; };
  std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (start == s.size() || !std::all_of(s.begin() + static_cast<long>(start), s.end(), is_digit)) {
    throw FormatError("not a decimal integer: '" + s + "'");
  }
  if (s[0] == '+') s.erase(0, 1);
  return Int(s, 10);
}

Int ipow(const Int& base, std::uint64_t exponent) {
  Int out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

std::uint64_t mod_u64(const Int& a, std::uint64_t m) {
  return mpz_fdiv_ui(a.get_mpz_t(), m);
}

Int isqrt(const Int& n) {
  if (n < 0) throw DomainError("isqrt of negative integer " + to_string(n));
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

std::optional<Int> is_square(const Int& n) {
  if (n < 0) return std::nullopt;
  if (!mpz_perfect_square_p(n.get_mpz_t())) return std::nullopt;
  return isqrt(n);
}

bool is_prime(const Int& n) {
  if (n < 2) return false;
  static constexpr std::array<unsigned long, 13> kBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  for (unsigned long p : kBases) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  Int d = n - 1;
  unsigned s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  for (unsigned long b : kBases) {
    if (!miller_rabin_round(n, d, s, b)) return false;
  }
  static const Int kDeterministicBound("3317044064679887385961981", 10);
  if (n >= kDeterministicBound) return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
  return true;
}

Factorization Factorization::from_parts(int sign, std::vector<PrimePower> factors) {
  if (sign != 1 && sign != -1) throw DomainError("factorization sign must be +1 or -1");
  Factorization f;
  f.sign_ = sign;
  Int value = sign;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].exponent == 0) throw DomainError("factorization exponent must be positive");
    if (i > 0 && factors[i].prime <= factors[i - 1].prime) {
      throw DomainError("factorization primes must be strictly increasing");
    }
    if (!is_prime(factors[i].prime)) throw DomainError("non-prime factor " + to_string(factors[i].prime));
    value *= ipow(factors[i].prime, factors[i].exponent);
  }
  f.factors_ = std::move(factors);
  f.value_ = value;
  return f;
}

std::uint64_t Factorization::divisor_count() const {
  std::uint64_t c = 1;
  for (const auto& pp : factors_) c *= pp.exponent + 1;
  return c;
}

Factorization Factorization::operator*(const Factorization& other) const {
  Factorization out;
  out.sign_ = sign_ * other.sign_;
  out.value_ = value_ * other.value_;
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() || (a != factors_.end() && a->prime < b->prime)) {
      out.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->prime < a->prime) {
      out.factors_.push_back(*b++);
    } else {
      out.factors_.push_back({a->prime, a->exponent + b->exponent});
      ++a;
      ++b;
    }
  }
  return out;
}

Factorization factorize(const Int& n) {
  if (n == 0) throw DomainError("factorize(0)");
  Int rest = abs(n);
  std::vector<PrimePower> out;
  Int limit = isqrt(rest);
  for (std::uint32_t p : small_primes()) {
    if (mpz_cmp_ui(limit.get_mpz_t(), p) < 0) break;
    if (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      unsigned e = 0;
      do {
        mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
        ++e;
      } while (mpz_divisible_ui_p(rest.get_mpz_t(), p));
      out.push_back({Int(p), e});
      limit = isqrt(rest);
    }
  }
  if (rest > 1) {
    std::vector<Int> primes;
    split_into(rest, primes);
    std::sort(primes.begin(), primes.end());
    for (const Int& p : primes) {
      if (!out.empty() && out.back().prime == p) {
        ++out.back().exponent;
      } else {
        out.push_back({p, 1});
      }
    }
  }
  Factorization f = Factorization::from_parts(sgn(n) < 0 ? -1 : 1, std::move(out));
  return f;
}

std::vector<Int> divisors(const Factorization& f) {
  std::vector<Int> out{Int(1)};
  out.reserve(f.divisor_count());
  for (const auto& [p, e] : f.factors()) {
    const std::size_t base = out.size();
    Int power = 1;
    for (unsigned i = 1; i <= e; ++i) {
      power *= p;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * power);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Int sqfree_part(const Int& n) {
  if (n == 0) throw DomainError("sqfree_part(0)");
  Int s = sgn(n);
  const Factorization f = factorize(n);
  for (const auto& [p, e] : f.factors()) {
    if (e % 2 == 1) s *= p;
  }
  return s;
}

Int square_cofactor_root(const Int& n) {
  if (n == 0) throw DomainError("square_cofactor_root(0)");
  Int d = 1;
  const Factorization f = factorize(n);
  for (const auto& [p, e] : f.factors()) d *= ipow(p, e / 2);
  return d;
}

std::optional<std::uint64_t> is_power_of(const Int& y, const Int& k) {
  if (y < 1 || k < 2) return std::nullopt;
  Int rest = y;
  std::uint64_t t = 0;
  while (rest % k == 0) {
    rest /= k;
    ++t;
  }
  if (rest != 1) return std::nullopt;
  return t;
}

std::uint64_t ResidueCycle::at(std::uint64_t n) const {
  if (n < tail.size()) return tail[n];
  return cycle[(n - tail.size()) % cycle.size()];
}

ResidueCycle power_residue_cycle(const Int& k, std::uint64_t m) {
  if (m < 2) throw DomainError("power_residue_cycle: modulus must be >= 2");
  const std::uint64_t base = mod_u64(k, m);
  std::vector<std::uint64_t> seq;
  std::uint64_t v = 1 % m;
  std::int64_t start = -1;
  if (m <= 10'000'000) {
    std::vector<std::int64_t> seen(m, -1);
    while (seen[v] < 0) {
      seen[v] = static_cast<std::int64_t>(seq.size());
      seq.push_back(v);
      v = static_cast<std::uint64_t>((static_cast<unsigned __int128>(v) * base) % m);
    }
    start = seen[v];
  } else {
    std::unordered_map<std::uint64_t, std::int64_t> seen;
    while (!seen.count(v)) {
      seen.emplace(v, static_cast<std::int64_t>(seq.size()));
      seq.push_back(v);
      v = static_cast<std::uint64_t>((static_cast<unsigned __int128>(v) * base) % m);
    }
    start = seen[v];
  }
  ResidueCycle out;
  out.tail.assign(seq.begin(), seq.begin() + start);
  out.cycle.assign(seq.begin() + start, seq.end());
  return out;
}

SquareResidues::SquareResidues(std::uint64_t modulus) : modulus_(modulus), mask_(modulus, false) {
  for (std::uint64_t x = 0; x <= modulus / 2; ++x) {
    mask_[static_cast<std::size_t>((static_cast<unsigned __int128>(x) * x) % modulus)] = true;
  }
}

std::vector<std::uint64_t> SquareResidues::values() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t r = 0; r < modulus_; ++r) {
    if (mask_[r]) out.push_back(r);
  }
  return out;
}

SquareResidues square_residues(std::uint64_t m, std::uint64_t cap) {
  if (m < 2) throw DomainError("square_residues: modulus must be >= 2");
  if (m > cap) throw ResourceError("square_residues: modulus " + std::to_string(m) + " above cap");
  return SquareResidues(m);
}

}  // namespace rnforge
