#include "rnforge/pell.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "rnforge/errors.hpp"

namespace rnforge {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

struct Mat {
  u64 a, b, c, d;  // [[a, b], [c, d]]
};

Mat mat_mul(const Mat& x, const Mat& y, u64 m) {
  return {(mulmod(x.a, y.a, m) + mulmod(x.b, y.c, m)) % m, (mulmod(x.a, y.b, m) + mulmod(x.b, y.d, m)) % m,
          (mulmod(x.c, y.a, m) + mulmod(x.d, y.c, m)) % m, (mulmod(x.c, y.b, m) + mulmod(x.d, y.d, m)) % m};
}

Mat unit_matrix(const PellUnit& unit, u64 m) {
  return {mod_u64(unit.u, m), mod_u64(Int(unit.D * unit.v), m), mod_u64(unit.v, m), mod_u64(unit.u, m)};
}

bool is_identity(const Mat& x, u64 m) { return x.a == 1 % m && x.b == 0 && x.c == 0 && x.d == 1 % m; }

// y_i mod m for i in [0, length) starting from (x, y).
std::vector<u64> y_table(const PellUnit& unit, const Int& x, const Int& y, u64 m, u64 length) {
  const Mat M = unit_matrix(unit, m);
  u64 xs = mod_u64(x, m), ys = mod_u64(y, m);
  std::vector<u64> out(length);
  for (u64 i = 0; i < length; ++i) {
    out[i] = ys;
    const u64 nx = (mulmod(M.a, xs, m) + mulmod(M.b, ys, m)) % m;
    const u64 ny = (mulmod(M.c, xs, m) + mulmod(M.d, ys, m)) % m;
    xs = nx;
    ys = ny;
  }
  return out;
}

// (x, y) and (X, Y) lie in one class under the unit group, up to sign.
bool same_orbit(const Int& N, const Int& x, const Int& y, const Int& X, const Int& Y, const Int& D) {
  const Int n = abs(N);
  return (x * X - D * y * Y) % n == 0 && (x * Y - X * y) % n == 0;
}

bool same_class(const PellProblem& pr, const Int& x, const Int& y, const Int& X, const Int& Y) {
  return same_orbit(pr.N, x, y, X, Y, pr.D) || same_orbit(pr.N, x, y, X, Int(-Y), pr.D);
}

std::vector<std::pair<Int, Int>> scan_solutions(const PellProblem& pr, const Int& bound) {
  std::vector<std::pair<Int, Int>> out;
  for (Int y = 0; y <= bound; ++y) {
    Int v = pr.N + pr.D * y * y;
    if (auto x = is_square(v)) out.emplace_back(*x, y);
  }
  return out;
}

u64 lcm_u64(u64 a, u64 b) { return a / std::gcd(a, b) * b; }

std::optional<u64> to_u64(const Int& v) {
  if (v < 0 || !v.fits_ulong_p()) return std::nullopt;
  return static_cast<u64>(v.get_ui());
}

}  // namespace

void PellProblem::validate() const {
  if (D < 2) throw DomainError("Pell: D must be >= 2");
  if (is_square(D)) throw DomainError("Pell: D must not be a square");
  if (N == 0) throw DomainError("Pell: N must be nonzero");
}

ContinuedFraction cf_sqrt(const Int& D) {
  if (D < 2 || is_square(D)) throw DomainError("cf_sqrt: D must be a nonsquare >= 2");
  ContinuedFraction cf;
  cf.a0 = isqrt(D);
  Int m = 0, d = 1, a = cf.a0;
  do {
    m = d * a - m;
    d = (D - m * m) / d;
    a = (cf.a0 + m) / d;
    cf.period.push_back(a);
  } while (a != 2 * cf.a0);
  return cf;
}

PellUnit pell_fundamental(const Int& D) {
  const ContinuedFraction cf = cf_sqrt(D);
  // Convergent p/q at the end of the period (or of two periods when its length
  // is odd).
  const std::size_t len = cf.period.size();
  const std::size_t steps = len % 2 == 0 ? len : 2 * len;
  Int p_prev = 1, p = cf.a0, q_prev = 0, q = 1;
  for (std::size_t i = 0; i + 1 < steps; ++i) {
    const Int& a = cf.period[i % len];
    Int pn = a * p + p_prev, qn = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
  }
  if (p * p - D * q * q != 1) throw DomainError("pell_fundamental: internal check failed");
  return PellUnit{D, p, q};
}

Int class_scan_bound(const PellProblem& pr, const PellUnit& unit) {
  return isqrt(Int(abs(pr.N) * (unit.u + 1) / (2 * pr.D))) + 1;
}

std::vector<PellClass> pell_class_reps(const PellProblem& pr) {
  pr.validate();
  const PellUnit unit = pell_fundamental(pr.D);
  auto sols = scan_solutions(pr, class_scan_bound(pr, unit));
  std::sort(sols.begin(), sols.end(), [](const auto& a, const auto& b) {
    if (int c = cmp(a.second, b.second); c != 0) return c < 0;
    return a.first < b.first;
  });
  std::vector<PellClass> out;
  for (const auto& [x, y] : sols) {
    bool known = false;
    for (const auto& cl : out) {
      if (same_class(pr, cl.x0, cl.y0, x, y)) {
        known = true;
        break;
      }
    }
    if (!known) out.push_back(PellClass{pr, x, y, unit});
  }
  return out;
}

void orbit_step(const PellUnit& unit, Int& x, Int& y) {
  Int nx = unit.u * x + unit.D * unit.v * y;
  Int ny = unit.v * x + unit.u * y;
  x = std::move(nx);
  y = std::move(ny);
}

std::vector<std::pair<Int, Int>> orbit_unfold(const PellClass& cl, std::size_t count) {
  if (count < 1) throw DomainError("orbit_unfold: count must be >= 1");
  std::vector<std::pair<Int, Int>> out;
  Int x = cl.x0, y = cl.y0;
  for (std::size_t i = 0; i < count; ++i) {
    out.emplace_back(x, y);
    orbit_step(cl.unit, x, y);
  }
  return out;
}

std::vector<std::pair<Int, Int>> class_branches(const PellClass& cl) {
  std::vector<std::pair<Int, Int>> out;
  out.emplace_back(cl.x0, cl.y0);
  if (cl.y0 != 0) {
    // conjugate of the representative, one unit forward; x0 - y0*sqrt(D) has
    // the sign of N
    Int x = cl.x0, y = -cl.y0;
    if (cl.problem.N < 0) {
      x = -x;
      y = -y;
    }
    orbit_step(cl.unit, x, y);
    out.emplace_back(x, y);
  }
  return out;
}

std::optional<std::uint64_t> orbit_matrix_order(const PellUnit& unit, std::uint64_t m, std::uint64_t cap) {
  if (m < 2) return 1;
  const Mat M = unit_matrix(unit, m);
  Mat P = M;
  for (u64 i = 1; i <= cap; ++i) {
    if (is_identity(P, m)) return i;
    P = mat_mul(P, M, m);
  }
  return std::nullopt;
}

OrbitModulus orbit_mod(const PellClass& cl, std::uint64_t m) {
  if (m < 2) throw DomainError("orbit_mod: m must be >= 2");
  const Mat M = unit_matrix(cl.unit, m);
  const u64 x0 = mod_u64(cl.x0, m), y0 = mod_u64(cl.y0, m);
  OrbitModulus om{m, 0, {}};
  u64 xs = x0, ys = y0;
  // y obeys y_{i+1} = 2u*y_i - y_{i-1}, so the pair (y_i, y_{i+1}) fixes the
  // rest of the sequence.
  const u64 y1 = (mulmod(M.c, x0, m) + mulmod(M.d, y0, m)) % m;
  for (u64 i = 0; i < kOrbitPeriodCap; ++i) {
    om.y_residues.push_back(ys);
    const u64 nx = (mulmod(M.a, xs, m) + mulmod(M.b, ys, m)) % m;
    const u64 ny = (mulmod(M.c, xs, m) + mulmod(M.d, ys, m)) % m;
    xs = nx;
    ys = ny;
    if (ys == y0) {
      const u64 nny = (mulmod(M.c, xs, m) + mulmod(M.d, ys, m)) % m;
      if (nny == y1) {
        om.period = i + 1;
        return om;
      }
    }
  }
  throw ResourceError("orbit_mod: period exceeds cap");
}

std::vector<std::uint64_t> PowerSieveCertificate::resulting_n_set() const {
  std::vector<std::uint64_t> out;
  for (const auto& s : solutions) out.push_back(s.n);
  return out;
}

std::vector<SieveProblem> sieve_problems_for(const Equation& eq) {
  if (eq.A() < 1) throw DomainError("power sieve needs A >= 1");
  std::vector<SieveProblem> out;
  for (unsigned r = 0; r < 2; ++r) {
    PellProblem pr{eq.A() * ipow(eq.k(), r), eq.B()};
    pr.validate();
    out.push_back({pr, r});
  }
  return out;
}

namespace {

struct AuxCandidate {
  u64 m;
  u64 period;
  std::vector<bool> admissible;  // residues k^t mod m, t >= 0
  double density;
};

// Moduli coprime to k, ordered by the share of residues that are powers of k;
// periods come from prime-power parts combined by lcm.
std::vector<AuxCandidate> aux_candidates(const PellUnit& unit, const Int& k, const PowerSieveOptions& opts) {
  std::vector<u64> list = opts.aux_moduli;
  const bool automatic = list.empty();
  if (automatic) {
    for (u64 m = 3; m <= opts.aux_limit; ++m) list.push_back(m);
  }
  std::map<u64, std::optional<u64>> pp_order;
  std::vector<AuxCandidate> out;
  for (u64 m : list) {
    if (m < 2 || mod_u64(k, m) == 0) continue;
    Int g;
    mpz_gcd_ui(g.get_mpz_t(), k.get_mpz_t(), m);
    if (g != 1) continue;
    u64 period = 1;
    bool ok = true;
    u64 rest = m;
    for (u64 p = 2; p * p <= rest || rest > 1; ++p) {
      if (p * p > rest) p = rest;
      if (rest % p) continue;
      u64 q = 1;
      while (rest % p == 0) {
        rest /= p;
        q *= p;
      }
      auto it = pp_order.find(q);
      if (it == pp_order.end()) it = pp_order.emplace(q, orbit_matrix_order(unit, q, opts.aux_period_cap)).first;
      if (!it->second) {
        ok = false;
        break;
      }
      period = lcm_u64(period, *it->second);
      if (period > opts.aux_period_cap) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    AuxCandidate c{m, period, std::vector<bool>(m, false), 0};
    const ResidueCycle rc = power_residue_cycle(k, m);
    u64 count = 0;
    for (u64 r : rc.cycle) {
      if (!c.admissible[r]) {
        c.admissible[r] = true;
        ++count;
      }
    }
    c.density = static_cast<double>(count) / static_cast<double>(m);
    if (count == m) continue;
    out.push_back(std::move(c));
  }
  if (automatic) {
    std::stable_sort(out.begin(), out.end(), [](const AuxCandidate& a, const AuxCandidate& b) {
      if (a.density != b.density) return a.density < b.density;
      return a.m < b.m;
    });
  }
  return out;
}

struct ProblemState {
  SieveProblem source;
  PellUnit unit;
  std::vector<PellClass> classes;
  std::vector<std::pair<std::size_t, std::pair<Int, Int>>> starts;
  std::vector<AuxCandidate> aux;
  std::map<u64, std::vector<std::vector<u64>>> tables;  // per modulus, per branch
};

const std::vector<std::vector<u64>>& branch_tables(ProblemState& ps, u64 m, u64 period) {
  auto it = ps.tables.find(m);
  if (it != ps.tables.end()) return it->second;
  std::vector<std::vector<u64>> t;
  for (const auto& [ci, start] : ps.starts) t.push_back(y_table(ps.unit, start.first, start.second, m, period));
  return ps.tables.emplace(m, std::move(t)).first->second;
}

// Close one problem at depth j; nullopt if it stays open.
std::optional<SieveProblemCertificate> sieve_problem(ProblemState& ps, const Int& k, unsigned j, u64 base,
                                                     const PowerSieveOptions& opts, std::string& why) {
  SieveProblemCertificate cert{ps.source, ps.unit, ps.classes, {}, base, {}, {}};
  const Int kj = ipow(k, j);
  for (const auto& [ci, start] : ps.starts) {
    SieveBranch br{ci, start.first, start.second, 0, {}, {}};
    Int x = start.first, y = start.second;
    u64 i = 0;
    for (;; ++i) {
      if (i > opts.direct_check_bound) {
        why = "branch did not reach its monotone range within the direct bound";
        return std::nullopt;
      }
      Int nx = x, ny = y;
      orbit_step(ps.unit, nx, ny);
      if (y > 0 && y >= kj && ny >= y) break;
      if (y != 0 && is_power_of(abs(y), k)) br.hit_indices.push_back(i);
      x = std::move(nx);
      y = std::move(ny);
    }
    br.direct_steps = i;
    cert.branches.push_back(std::move(br));
  }

  auto L0 = orbit_matrix_order(ps.unit, base, opts.combined_period_cap);
  if (!L0) {
    why = "orbit period modulo k^j exceeds the cap";
    return std::nullopt;
  }
  u64 L = *L0;
  cert.periods.push_back(L);
  const auto& base_tables = branch_tables(ps, base, L);
  std::vector<std::vector<u64>> open(cert.branches.size());
  std::size_t total = 0;
  for (std::size_t b = 0; b < open.size(); ++b) {
    for (u64 c = 0; c < L; ++c) {
      if (base_tables[b][c] == 0) open[b].push_back(c);
    }
    total += open[b].size();
  }
  for (std::size_t b = 0; b < open.size(); ++b) cert.branches[b].open.push_back(open[b]);

  for (const AuxCandidate& cand : ps.aux) {
    if (total == 0) break;
    const u64 L2 = lcm_u64(L, cand.period);
    if (L2 > opts.combined_period_cap) continue;
    const auto& tables = branch_tables(ps, cand.m, cand.period);
    std::vector<std::vector<u64>> next(open.size());
    std::size_t next_total = 0;
    for (std::size_t b = 0; b < open.size(); ++b) {
      for (u64 lift = 0; lift < L2; lift += L) {
        for (u64 c : open[b]) {
          const u64 idx = c + lift;
          if (cand.admissible[tables[b][idx % cand.period]]) next[b].push_back(idx);
        }
      }
      std::sort(next[b].begin(), next[b].end());
      next_total += next[b].size();
    }
    if (static_cast<u128>(next_total) * L >= static_cast<u128>(total) * L2) continue;
    open = std::move(next);
    total = next_total;
    L = L2;
    cert.moduli.push_back(cand.m);
    cert.periods.push_back(L);
    for (std::size_t b = 0; b < open.size(); ++b) cert.branches[b].open.push_back(open[b]);
  }
  if (total != 0) {
    std::ostringstream os;
    os << total << " orbit residues mod " << L << " remain open at depth " << j;
    why = os.str();
    return std::nullopt;
  }
  return cert;
}

}  // namespace

PowerSieveResult power_sieve(const std::vector<SieveProblem>& problems, const Int& k, const PowerSieveOptions& opts) {
  if (k < 2) throw DomainError("power_sieve: k must be >= 2");
  std::vector<ProblemState> states;
  for (const auto& sp : problems) {
    sp.problem.validate();
    ProblemState ps{sp, pell_fundamental(sp.problem.D), pell_class_reps(sp.problem), {}, {}, {}};
    for (std::size_t ci = 0; ci < ps.classes.size(); ++ci) {
      for (auto& st : class_branches(ps.classes[ci])) ps.starts.emplace_back(ci, std::move(st));
    }
    if (!ps.starts.empty()) ps.aux = aux_candidates(ps.unit, k, opts);
    states.push_back(std::move(ps));
  }

  std::string why = "no depth attempted";
  for (unsigned j = 1; j <= opts.j_max; ++j) {
    const auto base = to_u64(ipow(k, j));
    if (!base || *base > (u64{1} << 32)) {
      why = "k^j exceeds the supported modulus size";
      break;
    }
    PowerSieveCertificate cert{k, j, {}, {}};
    bool closed = true;
    for (auto& ps : states) {
      auto pc = sieve_problem(ps, k, j, *base, opts, why);
      if (!pc) {
        closed = false;
        break;
      }
      cert.problems.push_back(std::move(*pc));
    }
    if (!closed) continue;

    std::map<u64, Int> found;
    for (const auto& pc : cert.problems) {
      for (const auto& br : pc.branches) {
        Int x = br.x_start, y = br.y_start;
        std::size_t h = 0;
        for (u64 i = 0; i < br.direct_steps && h < br.hit_indices.size(); ++i) {
          if (i == br.hit_indices[h]) {
            const u64 t = *is_power_of(abs(y), k);
            found.emplace(2 * t + pc.source.r, abs(x));
            ++h;
          }
          orbit_step(pc.unit, x, y);
        }
      }
    }
    for (auto& [n, x] : found) cert.solutions.push_back({x, n});
    return {std::move(cert), ""};
  }
  return {std::nullopt, "power sieve inconclusive: " + why};
}

// ---------------------------------------------------------------------------
// Verification. Nothing above is reused except the data types and the exact
// integer primitives of arith.

namespace {

struct Check {
  std::string error;
  bool fail(const std::string& e) {
    if (error.empty()) error = e;
    return false;
  }
};

bool check_unit(const PellUnit& unit, Check& ck) {
  if (unit.u < 1 || unit.v < 1 || unit.u * unit.u - unit.D * unit.v * unit.v != 1) {
    return ck.fail("unit does not satisfy u^2 - D v^2 = 1");
  }
  if (unit.v > 10'000'000) return ck.fail("unit too large to confirm minimality");
  for (Int v = 1; v < unit.v; ++v) {
    if (mpz_perfect_square_p(Int(unit.D * v * v + 1).get_mpz_t())) return ck.fail("unit is not minimal");
  }
  return true;
}

// x^2 - D y^2 = N and (X, Y) = g * (x, y) for g in the unit group, up to sign
// and conjugation: N divides both coordinates of (x + y s)(X -+ Y s).
bool associated(const PellProblem& pr, const Int& x, const Int& y, const Int& X, const Int& Y) {
  const Int n = abs(pr.N);
  for (int s : {1, -1}) {
    const Int Ys = s * Y;
    Int a = x * X - pr.D * y * Ys;
    Int b = X * y - x * Ys;
    if (mpz_divisible_p(a.get_mpz_t(), n.get_mpz_t()) && mpz_divisible_p(b.get_mpz_t(), n.get_mpz_t())) return true;
  }
  return false;
}

bool check_classes(const SieveProblemCertificate& pc, Check& ck) {
  const PellProblem& pr = pc.source.problem;
  for (const auto& cl : pc.classes) {
    if (cl.x0 * cl.x0 - pr.D * cl.y0 * cl.y0 != pr.N || cl.y0 < 0) return ck.fail("class representative is not a solution");
  }
  for (std::size_t a = 0; a < pc.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < pc.classes.size(); ++b) {
      if (associated(pr, pc.classes[a].x0, pc.classes[a].y0, pc.classes[b].x0, pc.classes[b].y0)) {
        return ck.fail("two class representatives are associated");
      }
    }
  }
  // Every solution with 0 <= y <= bound must be associated to a listed class.
  Int bound = isqrt(Int(abs(pr.N) * (pc.unit.u + 1) / (2 * pr.D))) + 1;
  for (Int y = 0; y <= bound; ++y) {
    Int v = pr.N + pr.D * y * y;
    if (v < 0 || !mpz_perfect_square_p(v.get_mpz_t())) continue;
    Int x;
    mpz_sqrt(x.get_mpz_t(), v.get_mpz_t());
    bool covered = false;
    for (const auto& cl : pc.classes) {
      if (associated(pr, cl.x0, cl.y0, x, y)) {
        covered = true;
        break;
      }
    }
    if (!covered) return ck.fail("solution (" + to_string(x) + ", " + to_string(y) + ") lies in no listed class");
  }
  return true;
}

// The branch starts prescribed for the class list, in order.
bool check_branch_starts(const SieveProblemCertificate& pc, Check& ck) {
  std::vector<std::tuple<std::size_t, Int, Int>> want;
  const Int& u = pc.unit.u;
  const Int Dv = pc.unit.D * pc.unit.v;
  for (std::size_t ci = 0; ci < pc.classes.size(); ++ci) {
    const Int& x0 = pc.classes[ci].x0;
    const Int& y0 = pc.classes[ci].y0;
    want.emplace_back(ci, x0, y0);
    if (y0 != 0) {
      const int s = pc.source.problem.N > 0 ? 1 : -1;
      want.emplace_back(ci, Int(s * (u * x0 - Dv * y0)), Int(s * (pc.unit.v * x0 - u * y0)));
    }
  }
  if (want.size() != pc.branches.size()) return ck.fail("branch list does not match the classes");
  for (std::size_t b = 0; b < want.size(); ++b) {
    const auto& br = pc.branches[b];
    if (br.class_index != std::get<0>(want[b]) || br.x_start != std::get<1>(want[b]) ||
        br.y_start != std::get<2>(want[b])) {
      return ck.fail("branch start differs from the prescribed start");
    }
  }
  return true;
}

bool check_direct(const SieveProblemCertificate& pc, const Int& k, unsigned depth, Check& ck) {
  Int kj = 1;
  for (unsigned i = 0; i < depth; ++i) kj *= k;
  for (const auto& br : pc.branches) {
    Int x = br.x_start, y = br.y_start;
    std::vector<u64> hits;
    for (u64 i = 0; i < br.direct_steps; ++i) {
      if (y != 0) {
        Int t = abs(y);
        while (t % k == 0) t /= k;
        if (t == 1) hits.push_back(i);
      }
      Int nx = pc.unit.u * x + pc.unit.D * pc.unit.v * y;
      Int ny = pc.unit.v * x + pc.unit.u * y;
      x = nx;
      y = ny;
    }
    if (hits != br.hit_indices) return ck.fail("direct-range hits differ");
    Int ny = pc.unit.v * x + pc.unit.u * y;
    if (!(y > 0 && y >= kj && ny >= y)) return ck.fail("direct range ends before the monotone range");
  }
  return true;
}

u64 mat_power_identity(const PellUnit& unit, u64 m, u64 e) {
  // returns 1 if M^e = I mod m
  auto red = [&](const Int& v) { return mod_u64(v, m); };
  u64 r[4] = {1 % m, 0, 0, 1 % m};
  u64 b[4] = {red(unit.u), red(Int(unit.D * unit.v)), red(unit.v), red(unit.u)};
  auto mul = [&](const u64* p, const u64* q, u64* out) {
    u64 t[4] = {(mulmod(p[0], q[0], m) + mulmod(p[1], q[2], m)) % m, (mulmod(p[0], q[1], m) + mulmod(p[1], q[3], m)) % m,
                (mulmod(p[2], q[0], m) + mulmod(p[3], q[2], m)) % m, (mulmod(p[2], q[1], m) + mulmod(p[3], q[3], m)) % m};
    std::copy(t, t + 4, out);
  };
  while (e) {
    if (e & 1) mul(r, b, r);
    mul(b, b, b);
    e >>= 1;
  }
  return r[0] == 1 % m && r[1] == 0 && r[2] == 0 && r[3] == 1 % m;
}

// y_i mod m for i < count by direct iteration from the branch start.
std::vector<u64> iterate_y(const PellUnit& unit, const SieveBranch& br, u64 m, u64 count) {
  const u64 u = mod_u64(unit.u, m), dv = mod_u64(Int(unit.D * unit.v), m), v = mod_u64(unit.v, m);
  u64 x = mod_u64(br.x_start, m), y = mod_u64(br.y_start, m);
  std::vector<u64> out;
  out.reserve(count);
  for (u64 i = 0; i < count; ++i) {
    out.push_back(y);
    const u64 nx = (mulmod(u, x, m) + mulmod(dv, y, m)) % m;
    const u64 nyv = (mulmod(v, x, m) + mulmod(u, y, m)) % m;
    x = nx;
    y = nyv;
  }
  return out;
}

bool check_sieve(const SieveProblemCertificate& pc, const Int& k, unsigned depth, Check& ck) {
  Int kj = 1;
  for (unsigned i = 0; i < depth; ++i) kj *= k;
  if (Int(static_cast<unsigned long>(pc.base_modulus)) != kj) return ck.fail("base modulus is not k^depth");
  if (pc.periods.size() != pc.moduli.size() + 1) return ck.fail("period list length mismatch");
  const u64 base = pc.base_modulus;
  if (pc.periods[0] == 0 || !mat_power_identity(pc.unit, base, pc.periods[0])) {
    return ck.fail("claimed period modulo k^depth is wrong");
  }
  for (std::size_t s = 0; s < pc.moduli.size(); ++s) {
    const u64 m = pc.moduli[s];
    const u64 L = pc.periods[s + 1];
    if (m < 2 || L == 0 || L % pc.periods[s] != 0 || !mat_power_identity(pc.unit, m, L)) {
      return ck.fail("claimed combined period for modulus " + std::to_string(m) + " is wrong");
    }
  }
  if (pc.periods.back() > 50'000'000) return ck.fail("period too large to check");

  // powers k^t mod m with t >= depth, by iteration until the residue repeats
  auto powers_from = [&](u64 m) {
    std::vector<bool> seen_state(m, false), admissible(m, false);
    u64 r = mod_u64(kj, m);
    const u64 km = mod_u64(k, m);
    while (!seen_state[r]) {
      seen_state[r] = true;
      admissible[r] = true;
      r = mulmod(r, km, m);
    }
    return admissible;
  };

  for (const auto& br : pc.branches) {
    if (br.open.size() != pc.periods.size()) return ck.fail("open-set history length mismatch");
    const u64 L0 = pc.periods[0];
    const auto y0 = iterate_y(pc.unit, br, base, L0);
    std::vector<u64> want;
    for (u64 c = 0; c < L0; ++c) {
      if (y0[c] == 0) want.push_back(c);
    }
    if (br.open[0] != want) return ck.fail("initial open set differs from the k^depth residue scan");
    for (std::size_t s = 0; s < pc.moduli.size(); ++s) {
      const u64 m = pc.moduli[s], Lp = pc.periods[s], L = pc.periods[s + 1];
      const auto ym = iterate_y(pc.unit, br, m, L);
      const auto adm = powers_from(m);
      std::set<u64> prev(br.open[s].begin(), br.open[s].end());
      std::set<u64> cur(br.open[s + 1].begin(), br.open[s + 1].end());
      for (u64 c : cur) {
        if (c >= L || !prev.count(c % Lp)) return ck.fail("open residue without an open parent");
      }
      for (u64 c : prev) {
        if (c >= Lp) return ck.fail("open residue out of range");
        for (u64 idx = c; idx < L; idx += Lp) {
          if (!cur.count(idx) && adm[ym[idx]]) {
            return ck.fail("residue " + std::to_string(idx) + " excluded without reason modulo " + std::to_string(m));
          }
        }
      }
    }
    if (!br.open.back().empty()) return ck.fail("open residues remain");
  }
  return true;
}

}  // namespace

std::string verify_power_sieve(const PowerSieveCertificate& cert) {
  Check ck;
  if (cert.k < 2) return "k must be >= 2";
  if (cert.depth < 1) return "depth must be >= 1";
  std::map<u64, Int> found;
  std::set<unsigned> residues;
  for (const auto& pc : cert.problems) {
    const PellProblem& pr = pc.source.problem;
    if (pr.D < 2 || mpz_perfect_square_p(pr.D.get_mpz_t()) || pr.N == 0) return "invalid Pell problem";
    if (pc.unit.D != pr.D) return "unit belongs to another D";
    if (!check_unit(pc.unit, ck) || !check_classes(pc, ck) || !check_branch_starts(pc, ck) ||
        !check_direct(pc, cert.k, cert.depth, ck) || !check_sieve(pc, cert.k, cert.depth, ck)) {
      return ck.error;
    }
    for (const auto& br : pc.branches) {
      Int x = br.x_start, y = br.y_start;
      for (u64 i = 0; i < br.direct_steps; ++i) {
        if (std::binary_search(br.hit_indices.begin(), br.hit_indices.end(), i)) {
          Int t = abs(y);
          u64 e = 0;
          while (t % cert.k == 0) {
            t /= cert.k;
            ++e;
          }
          found.emplace(2 * e + pc.source.r, abs(x));
        }
        Int nx = pc.unit.u * x + pc.unit.D * pc.unit.v * y;
        Int ny = pc.unit.v * x + pc.unit.u * y;
        x = nx;
        y = ny;
      }
    }
  }
  std::vector<Solution> want;
  for (auto& [n, x] : found) want.push_back({x, n});
  if (want != cert.solutions) return "listed solutions differ from the branch hits";
  return "";
}

}  // namespace rnforge
