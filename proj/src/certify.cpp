#include "rnforge/certify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "rnforge/errors.hpp"
#include "rnforge/jsonl.hpp"

namespace rnforge {

const std::vector<Strategy>& default_strategy() {
  static const std::vector<Strategy> s{Strategy::kadic_reduction, Strategy::modular, Strategy::factor_even,
                                       Strategy::pell_sieve};
  return s;
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::any:
      return "any";
    case Parity::even:
      return "even";
    case Parity::odd:
      return "odd";
  }
  return "any";
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kadic_reduction:
      return "kadic_reduction";
    case Strategy::modular:
      return "modular";
    case Strategy::factor_even:
      return "factor_even";
    case Strategy::pell_sieve:
      return "pell_sieve";
  }
  return "";
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : {Strategy::kadic_reduction, Strategy::modular, Strategy::factor_even, Strategy::pell_sieve}) {
    if (to_string(s) == name) return s;
  }
  throw FormatError("unknown strategy '" + name + "'");
}

std::optional<ReductionStep> reduce_kadic(const Equation& eq) {
  const Int k2 = eq.k() * eq.k();
  Int B = eq.B();
  unsigned s = 0;
  while (B % k2 == 0) {
    B /= k2;
    ++s;
  }
  if (s == 0) return std::nullopt;
  return ReductionStep{s, Equation(eq.A(), eq.k(), B), static_cast<std::int64_t>(2 * s) - 1};
}

namespace {

bool parity_matches(Parity p, std::int64_t n) {
  return p == Parity::any || (p == Parity::even) == (n % 2 == 0);
}

}  // namespace

std::optional<ModularCertificate> modular_nonexistence(const Equation& eq, std::uint64_t m, std::int64_t n0,
                                                       Parity parity) {
  if (m < 2) throw DomainError("modular_nonexistence: m must be >= 2");
  if (n0 < 0) throw DomainError("modular_nonexistence: n0 must be >= 0");
  const ResidueCycle rc = power_residue_cycle(eq.k(), m);
  const SquareResidues sq = square_residues(m);
  const std::uint64_t a = mod_u64(eq.A(), m), b = mod_u64(eq.B(), m);
  // past the tail the pair (position in cycle, parity of n) repeats with
  // period dividing 2 * |cycle|
  const std::int64_t end = std::max<std::int64_t>(n0, static_cast<std::int64_t>(rc.tail.size())) +
                           2 * static_cast<std::int64_t>(rc.cycle.size());
  for (std::int64_t n = n0; n < end; ++n) {
    if (!parity_matches(parity, n)) continue;
    const std::uint64_t v = (a * rc.at(static_cast<std::uint64_t>(n)) % m + b) % m;
    if (sq.contains(v)) return std::nullopt;
  }
  return ModularCertificate{m, n0, parity, ModularKind::linear};
}

std::optional<ModularCertificate> find_modular_certificate(const Equation& eq, std::int64_t n0, std::uint64_t m_max,
                                                           Parity parity) {
  if (m_max < 2) throw DomainError("find_modular_certificate: m_max must be >= 2");
  for (std::uint64_t m = 2; m <= m_max; ++m) {
    if (auto c = modular_nonexistence(eq, m, n0, parity)) return c;
  }
  return std::nullopt;
}

std::optional<ModularCertificate> odd_exponent_obstruction(const Equation& eq, std::uint64_t m) {
  if (m < 2) throw DomainError("odd_exponent_obstruction: m must be >= 2");
  const ResidueCycle rc = power_residue_cycle(eq.k(), m);
  const SquareResidues sq = square_residues(m);
  const std::uint64_t Dk = mod_u64(Int(eq.A() * eq.k()), m), B = mod_u64(eq.B(), m);
  std::vector<std::uint64_t> bs = rc.tail;
  bs.insert(bs.end(), rc.cycle.begin(), rc.cycle.end());
  for (std::uint64_t b : bs) {
    // some a with a^2 = Dk*b^2 + B (mod m)?
    const std::uint64_t v = (Dk * (b * b % m) % m + B) % m;
    if (sq.contains(v)) return std::nullopt;
  }
  return ModularCertificate{m, 1, Parity::odd, ModularKind::odd_pell};
}

std::optional<ModularCertificate> odd_exponent_obstruction(const Int& k, const Int& B, std::uint64_t m) {
  return odd_exponent_obstruction(Equation(1, k, B), m);
}

FactorizationCertificate even_exponent_factor_solve(const Int& k, const Int& B) {
  if (B == 0) throw DomainError("even_exponent_factor_solve: B must be nonzero");
  if (k < 2) throw DomainError("even_exponent_factor_solve: k must be >= 2");
  FactorizationCertificate fc{k, B, {}, {}};
  const Int absB = abs(B);
  for (const Int& d : divisors(factorize(absB))) {
    const Int e = absB / d;
    if (d > e) break;
    fc.factor_pairs.push_back({d, e});
    if (mpz_odd_p(Int(d + e).get_mpz_t())) continue;
    const Int km = B > 0 ? Int((e - d) / 2) : Int((d + e) / 2);
    const Int x = B > 0 ? Int((d + e) / 2) : Int((e - d) / 2);
    if (km < 1) continue;
    if (auto m = is_power_of(km, k)) fc.admissible.push_back({*m, x});
  }
  std::sort(fc.admissible.begin(), fc.admissible.end(),
            [](const FactorSolution& a, const FactorSolution& b) { return a.m < b.m; });
  return fc;
}

std::string certificate_id(const Equation& eq, std::int64_t direct_range, const std::vector<CertificateStep>& steps) {
  Json body{{"equation", eq.to_text()}, {"direct_range", int_json(direct_range)}, {"steps", Json::array()}};
  for (const auto& st : steps) body["steps"].push_back(certificate_step_json(st));
  const std::string text = body.dump();
  std::uint64_t h = 14695981039346656037ull;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string id = "fnv1a64:";
  for (int i = 15; i >= 0; --i) id.push_back(hex[(h >> (4 * i)) & 15]);
  return id;
}

namespace {

struct Resolved {
  std::uint64_t n;  // current-equation exponent
  Int x;
};

}  // namespace

CertifyResult certify_equation(const Equation& eq, std::int64_t n_direct, const std::vector<Strategy>& strategy,
                               const CertifyOptions& opts) {
  Equation cur = eq;
  std::int64_t offset = 0;
  bool even_open = true, odd_open = true;
  std::vector<CertificateStep> steps;
  std::vector<Resolved> resolved;
  std::string notes;

  std::int64_t direct = -1;
  auto fix_direct = [&] {
    if (direct >= 0) return;
    if (n_direct >= 0) {
      direct = n_direct;
    } else {
      const SolutionSet known = enumerate_solutions(eq, kDefaultNMax);
      const std::int64_t top = known.size() ? static_cast<std::int64_t>(known.solutions().back().n) : 0;
      direct = std::max(offset + 2, top + 8);
    }
    direct = std::max(direct, offset - 1);
  };
  auto bounded = [&] {
    fix_direct();
    return enumerate_solutions(eq, direct);
  };

  for (Strategy s : strategy) {
    if (!even_open && !odd_open) break;
    switch (s) {
      case Strategy::kadic_reduction: {
        if (!(even_open && odd_open) || direct >= 0) break;
        if (auto r = reduce_kadic(cur)) {
          cur = r->residual;
          offset += 2 * static_cast<std::int64_t>(r->s);
          steps.push_back(std::move(*r));
        }
        break;
      }
      case Strategy::modular: {
        fix_direct();
        const std::int64_t n0 = std::max<std::int64_t>(0, direct + 1 - offset);
        std::vector<Parity> tries;
        if (even_open && odd_open) tries = {Parity::any, Parity::even, Parity::odd};
        else if (even_open) tries = {Parity::even};
        else tries = {Parity::odd};
        for (Parity p : tries) {
          if ((p == Parity::even && !even_open) || (p == Parity::odd && !odd_open)) continue;
          if (auto c = find_modular_certificate(cur, n0, opts.modulus_max, p)) {
            if (p != Parity::odd) even_open = false;
            if (p != Parity::even) odd_open = false;
            steps.push_back(*c);
          }
        }
        break;
      }
      case Strategy::factor_even: {
        if (cur.A() != 1) {
          notes += "factor_even needs A = 1; ";
          break;
        }
        fix_direct();
        if (even_open) {
          FactorizationCertificate fc = even_exponent_factor_solve(cur.k(), cur.B());
          for (const auto& sol : fc.admissible) resolved.push_back({2 * sol.m, sol.x});
          steps.push_back(std::move(fc));
          even_open = false;
        }
        if (odd_open) {
          for (std::uint64_t m = 2; m <= opts.modulus_max; ++m) {
            if (auto c = odd_exponent_obstruction(cur, m)) {
              steps.push_back(*c);
              odd_open = false;
              break;
            }
          }
        }
        break;
      }
      case Strategy::pell_sieve: {
        fix_direct();
        if (cur.A() < 1) {
          notes += "pell_sieve needs A >= 1; ";
          break;
        }
        std::vector<SieveProblem> problems;
        bool usable = true;
        for (unsigned r = 0; r < 2; ++r) {
          if ((r == 0 && !even_open) || (r == 1 && !odd_open)) continue;
          PellProblem pr{cur.A() * ipow(cur.k(), r), cur.B()};
          if (is_square(pr.D)) {
            usable = false;
            notes += "pell_sieve: A*k^" + std::to_string(r) + " is a square; ";
            break;
          }
          problems.push_back({pr, r});
        }
        if (!usable || problems.empty()) break;
        PowerSieveResult res = power_sieve(problems, cur.k(), opts.sieve);
        if (!res.certificate) {
          notes += res.failure + "; ";
          break;
        }
        for (const auto& sol : res.certificate->solutions) resolved.push_back({sol.n, sol.x});
        for (const auto& sp : problems) (sp.r == 0 ? even_open : odd_open) = false;
        steps.push_back(std::move(*res.certificate));
        break;
      }
    }
  }

  if (even_open || odd_open) {
    std::string why = "exponents left uncovered:";
    if (even_open) why += " even";
    if (odd_open) why += " odd";
    if (!notes.empty()) why += " (" + notes.substr(0, notes.size() - 2) + ")";
    return {std::nullopt, bounded(), why};
  }

  fix_direct();
  SolutionSet low = enumerate_solutions(eq, direct);
  std::map<std::uint64_t, Int> all;
  for (const auto& s : low.solutions()) all.emplace(s.n, s.x);
  const Int scale = ipow(eq.k(), static_cast<std::uint64_t>(offset / 2));
  for (const auto& r : resolved) {
    const std::uint64_t n = r.n + static_cast<std::uint64_t>(offset);
    if (static_cast<std::int64_t>(n) > direct) all.emplace(n, r.x * scale);
  }
  std::vector<Solution> sols;
  for (auto& [n, x] : all) sols.push_back({x, n});
  const std::string id = certificate_id(eq, direct, steps);
  SolutionSet final_set(eq, std::move(sols), CertifiedCompleteness{id});
  CompletenessCertificate cert{eq, direct, std::move(steps), std::move(final_set)};
  return {std::move(cert), std::move(low), ""};
}

// ---------------------------------------------------------------------------
// Verifier. Uses the data types, arith/model primitives and the separate
// power-sieve checker only.

namespace {

std::vector<bool> square_table(std::uint64_t m) {
  std::vector<bool> t(m, false);
  for (std::uint64_t x = 0; x < m; ++x) t[static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * x) % m)] = true;
  return t;
}

// A*k^n + B mod m is a non-square for every n >= n0 of the given parity,
// checked over n0 .. n0 + 3m + 2, which contains a full pre-period plus two
// periods of k^n mod m.
bool recheck_linear(const Equation& eq, std::uint64_t m, std::int64_t n0, Parity parity) {
  const auto sq = square_table(m);
  const std::uint64_t a = mod_u64(eq.A(), m), b = mod_u64(eq.B(), m), k = mod_u64(eq.k(), m);
  std::uint64_t p = 1 % m;
  for (std::int64_t n = 0; n < n0; ++n) p = p * k % m;
  for (std::int64_t n = n0; n <= n0 + 3 * static_cast<std::int64_t>(m) + 2; ++n) {
    const bool wanted = parity == Parity::any || (parity == Parity::even) == (n % 2 == 0);
    if (wanted && sq[(a * p % m + b) % m]) return false;
    p = p * k % m;
  }
  return true;
}

}  // namespace

std::string verify_certificate_detail(const CompletenessCertificate& cert) {
  const Equation& eq = cert.equation;
  if (cert.direct_range < 0) return "negative direct range";
  if (!(cert.final_solution_set.equation() == eq)) return "final set belongs to another equation";
  const auto* cc = std::get_if<CertifiedCompleteness>(&cert.final_solution_set.completeness());
  if (!cc) return "final set is not marked certified";
  if (cc->certificate_id != certificate_id(eq, cert.direct_range, cert.steps)) return "certificate id does not match content";

  Int A = eq.A(), k = eq.k(), B = eq.B();
  std::int64_t offset = 0;
  bool even_open = true, odd_open = true, covering = false;
  std::map<std::uint64_t, Int> resolved;  // current exponent -> x

  for (const auto& step : cert.steps) {
    if (const auto* r = std::get_if<ReductionStep>(&step)) {
      if (covering) return "reduction after a covering step";
      if (r->s < 1) return "reduction with s < 1";
      Int kk = 1;
      for (unsigned i = 0; i < 2 * r->s; ++i) kk *= k;
      if (B % kk != 0) return "k^(2s) does not divide B";
      B /= kk;
      if (!(r->residual == Equation(A, k, B))) return "residual equation is wrong";
      if (r->low_range_checked != 2 * static_cast<std::int64_t>(r->s) - 1) return "low range of reduction is wrong";
      offset += 2 * static_cast<std::int64_t>(r->s);
      continue;
    }
    covering = true;
    const Equation cur(A, k, B);
    if (const auto* m = std::get_if<ModularCertificate>(&step)) {
      if (m->modulus < 2 || m->modulus > 1'000'000 || m->n0 < 0) return "modular certificate out of range";
      if (m->kind == ModularKind::odd_pell && m->parity != Parity::odd) return "odd obstruction must cover odd n";
      const bool ev = m->parity != Parity::odd, od = m->parity != Parity::even;
      if ((ev && !even_open) || (od && !odd_open)) return "parity covered twice";
      if (offset + m->n0 - 1 > cert.direct_range) return "modular threshold above the direct range";
      if (!recheck_linear(cur, m->modulus, m->n0, m->parity)) {
        return "modular claim fails for m = " + std::to_string(m->modulus);
      }
      if (ev) even_open = false;
      if (od) odd_open = false;
    } else if (const auto* f = std::get_if<FactorizationCertificate>(&step)) {
      if (A != 1 || f->k != k || f->B != B) return "factorization step does not match the equation";
      if (!even_open) return "parity covered twice";
      const Int absB = abs(B);
      std::vector<FactorPair> pairs;
      std::vector<FactorSolution> sols;
      for (const Int& d : divisors(factorize(absB))) {
        const Int e = absB / d;
        if (d * d > absB) break;
        pairs.push_back({d, e});
        if ((d + e) % 2 != 0) continue;
        const Int km = B > 0 ? Int((e - d) / 2) : Int((d + e) / 2);
        const Int x = B > 0 ? Int((d + e) / 2) : Int((e - d) / 2);
        if (km < 1) continue;
        Int t = km;
        std::uint64_t e2 = 0;
        while (t % k == 0) {
          t /= k;
          ++e2;
        }
        if (t == 1) sols.push_back({e2, x});
      }
      std::sort(sols.begin(), sols.end(), [](const auto& a, const auto& b) { return a.m < b.m; });
      if (pairs != f->factor_pairs) return "factor pairs are incomplete or wrong";
      if (sols != f->admissible) return "recovered solutions are wrong";
      for (const auto& s : sols) {
        if (s.x * s.x != ipow(k, 2 * s.m) + B) return "factorization solution does not verify";
        resolved.emplace(2 * s.m, s.x);
      }
      even_open = false;
    } else if (const auto* p = std::get_if<PowerSieveCertificate>(&step)) {
      if (p->k != k) return "power sieve uses another k";
      if (A < 1) return "power sieve needs A >= 1";
      std::set<unsigned> rs;
      for (const auto& pc : p->problems) {
        const unsigned r = pc.source.r;
        if (r > 1 || !rs.insert(r).second) return "power sieve residues repeat";
        if (pc.source.problem.D != A * ipow(k, r) || pc.source.problem.N != B) {
          return "power sieve problem does not match the equation";
        }
        if ((r == 0 && !even_open) || (r == 1 && !odd_open)) return "parity covered twice";
      }
      if (rs.empty()) return "power sieve covers nothing";
      if (std::string why = verify_power_sieve(*p); !why.empty()) return "power sieve: " + why;
      for (const auto& s : p->solutions) {
        if (s.x * s.x != A * ipow(k, s.n) + B) return "sieve solution does not verify";
        resolved.emplace(s.n, s.x);
      }
      for (unsigned r : rs) (r == 0 ? even_open : odd_open) = false;
    }
  }
  if (even_open || odd_open) return "exponents beyond the direct range are not fully covered";
  if (offset - 1 > cert.direct_range) return "direct range below the reduction threshold";

  std::map<std::uint64_t, Int> want;
  const SolutionSet low = enumerate_solutions(eq, cert.direct_range);
  for (const auto& s : low.solutions()) want.emplace(s.n, s.x);
  Int scale = 1;
  for (std::int64_t i = 0; i < offset / 2; ++i) scale *= k;
  for (const auto& [n, x] : resolved) {
    const std::uint64_t n0 = n + static_cast<std::uint64_t>(offset);
    if (static_cast<std::int64_t>(n0) > cert.direct_range) want.emplace(n0, x * scale);
  }
  std::vector<Solution> want_list;
  for (auto& [n, x] : want) want_list.push_back({x, n});
  if (want_list != cert.final_solution_set.solutions()) return "final solution set differs from the re-derived set";
  return "";
}

bool verify_certificate(const CompletenessCertificate& cert) { return verify_certificate_detail(cert).empty(); }

}  // namespace rnforge
