#include "rnforge/families.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

#include "rnforge/errors.hpp"
#include "rnforge/parallel.hpp"

namespace rnforge {

RationalPoly::RationalPoly(std::vector<Rat> coefficients) : c_(std::move(coefficients)) {
  for (auto& c : c_) c.canonicalize();
  trim();
}

void RationalPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

RationalPoly RationalPoly::constant(const Rat& c) { return RationalPoly({c}); }

RationalPoly RationalPoly::monomial(const Rat& c, std::size_t degree) {
  std::vector<Rat> v(degree + 1, Rat(0));
  v[degree] = c;
  return RationalPoly(std::move(v));
}

Rat RationalPoly::eval(const Rat& at) const {
  Rat acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * at + *it;
  return acc;
}

RationalPoly RationalPoly::pow(unsigned e) const {
  RationalPoly result = constant(Rat(1));
  RationalPoly base = *this;
  while (e) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
  std::vector<Rat> v(std::max(a.c_.size(), b.c_.size()), Rat(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
  return RationalPoly(std::move(v));
}

RationalPoly operator-(const RationalPoly& a, const RationalPoly& b) {
  std::vector<Rat> v(std::max(a.c_.size(), b.c_.size()), Rat(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] -= b.c_[i];
  return RationalPoly(std::move(v));
}

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rat> v(a.c_.size() + b.c_.size() - 1, Rat(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return RationalPoly(std::move(v));
}

std::string RationalPoly::to_text() const {
  if (c_.empty()) return "0";
  std::string out;
  for (std::size_t i = c_.size(); i-- > 0;) {
    const Rat& c = c_[i];
    if (c == 0) continue;
    Rat mag = abs(c);
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    const bool unit = mag == 1 && i > 0;
    if (!unit) out += mag.get_str();
    if (i > 0) {
      if (!unit) out += "*";
      out += "t";
      if (i > 1) out += "^" + std::to_string(i);
    }
  }
  return out;
}

std::pair<RationalPoly, RationalPoly> divmod(const RationalPoly& f, const RationalPoly& g) {
  if (g.is_zero()) throw DomainError("polynomial division by zero");
  std::vector<Rat> r = f.coefficients();
  const auto& gc = g.coefficients();
  const std::size_t dg = gc.size() - 1;
  if (r.size() < gc.size()) return {RationalPoly{}, f};
  std::vector<Rat> q(r.size() - dg, Rat(0));
  for (std::size_t i = r.size(); i-- > dg;) {
    if (r[i] == 0) continue;
    Rat c = r[i] / gc[dg];
    q[i - dg] = c;
    for (std::size_t j = 0; j <= dg; ++j) r[i - dg + j] -= c * gc[j];
  }
  r.resize(dg);
  return {RationalPoly(std::move(q)), RationalPoly(std::move(r))};
}

namespace {

const std::map<FamilyId, std::string>& family_names() {
  static const std::map<FamilyId, std::string> names = {
      {FamilyId::four, "four"},           {FamilyId::k2_five_1, "k2_five_1"}, {FamilyId::k2_five_2, "k2_five_2"},
      {FamilyId::beukers, "beukers"},     {FamilyId::even_k, "even_k"},       {FamilyId::neg_poly, "neg_poly"},
      {FamilyId::neg_conj_1, "neg_conj_1"}, {FamilyId::neg_conj_2, "neg_conj_2"},
  };
  return names;
}

Int two_pow(std::uint64_t e) { return ipow(Int(2), e); }

Int exact_div(const Int& a, const Int& b, const char* what) {
  if (a % b != 0) throw DomainError(std::string("non-integral ") + what);
  return a / b;
}

// Sorts by n, drops repeated exponents and checks every pair exactly.
FamilyInstance finish(FamilyId id, std::vector<std::pair<std::string, std::int64_t>> params, const Equation& eq,
                      std::vector<Solution> listed) {
  for (auto& s : listed) {
    s.x = abs(s.x);
    if (!verify_solution(eq, s.x, static_cast<std::int64_t>(s.n)))
      throw std::logic_error(to_string(id) + ": listed solution fails at n=" + std::to_string(s.n));
  }
  std::sort(listed.begin(), listed.end(), [](const Solution& a, const Solution& b) { return a.n < b.n; });
  const std::size_t before = listed.size();
  listed.erase(std::unique(listed.begin(), listed.end(),
                           [](const Solution& a, const Solution& b) { return a.n == b.n; }),
               listed.end());
  FamilyInstance inst{id, std::move(params), eq, std::move(listed), false};
  inst.degenerate = inst.promised.size() != before;
  return inst;
}

std::vector<Solution> roots_at(const Equation& eq, const std::vector<std::uint64_t>& ns, const char* family) {
  std::vector<Solution> out;
  for (auto n : ns) {
    auto x = is_square(eq.value_at(n));
    if (!x) throw std::logic_error(std::string(family) + ": no square at n=" + std::to_string(n));
    out.push_back({*x, n});
  }
  return out;
}

std::int64_t i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

}  // namespace

std::string to_string(FamilyId id) { return family_names().at(id); }

FamilyId parse_family(const std::string& name) {
  for (const auto& [id, n] : family_names())
    if (n == name) return id;
  throw FormatError("unknown family: " + name);
}

FamilyInstance construct_four(const Int& k, std::uint64_t p, std::uint64_t q, std::uint64_t r) {
  if (k < 2) throw DomainError("construct_four: k < 2");
  if (!(0 < p && p < q && q < r)) throw DomainError("construct_four: need 0 < p < q < r");
  const Int a[4] = {Int(1), ipow(k, p), ipow(k, q), ipow(k, r)};
  Int s1 = 0, s2 = 0, s3 = 0, s4 = a[0] * a[1] * a[2] * a[3];
  for (int i = 0; i < 4; ++i) {
    s1 += a[i];
    for (int j = i + 1; j < 4; ++j) {
      s2 += a[i] * a[j];
      for (int l = j + 1; l < 4; ++l) s3 += a[i] * a[j] * a[l];
    }
  }
  const Int P = 8 * (s1 * s1 * s1 - 4 * s2 * s1 + 8 * s3);
  const Int Q = s1 * s1 * s1 * s1 - 8 * s2 * s1 * s1 + 16 * s2 * s2 - 64 * s4;
  const Equation eq(P, k, Q);
  return finish(FamilyId::four, {{"p", i64(p)}, {"q", i64(q)}, {"r", i64(r)}}, eq, roots_at(eq, {0, p, q, r}, "four"));
}

FamilyInstance family_k2_five(int variant, std::uint64_t m) {
  if (m < 1) throw DomainError("family_k2_five: m < 1");
  const Int k = 2;
  if (variant == 1) {
    const Equation eq(two_pow(3 * m) + 1, k, 1 - two_pow(3 * m + 3));
    std::vector<Solution> s = {
        {Int(3), 3},
        {two_pow(2 * m + 1) - two_pow(m + 1) - 1, m + 2},
        {two_pow(3 * m + 1) - 1, 3 * m + 2},
        {two_pow(3 * m + 2) + 1, 3 * m + 4},
        {two_pow(6 * m + 3) + two_pow(3 * m + 2) - 1, 9 * m + 6},
    };
    return finish(FamilyId::k2_five_1, {{"m", i64(m)}}, eq, std::move(s));
  }
  if (variant == 2) {
    const Equation eq(exact_div(two_pow(6 * m) - 1, 9, "A"), k, exact_div(two_pow(6 * m + 3) + 1, 9, "B"));
    std::vector<Solution> s = {
        {two_pow(3 * m), 0},
        {exact_div(two_pow(4 * m + 1) + two_pow(2 * m + 1) - 1, 3, "x"), 2 * m + 2},
        {exact_div(two_pow(6 * m + 1) + 1, 3, "x"), 6 * m + 2},
        {exact_div(two_pow(6 * m + 2) - 1, 3, "x"), 6 * m + 4},
        {exact_div(two_pow(12 * m + 3) - two_pow(6 * m + 2) - 1, 3, "x"), 18 * m + 6},
    };
    return finish(FamilyId::k2_five_2, {{"m", i64(m)}}, eq, std::move(s));
  }
  throw DomainError("family_k2_five: variant must be 1 or 2");
}

FamilyInstance family_beukers(std::uint64_t t, int eps, std::uint64_t m) {
  if (t < 1 || m < 1) throw DomainError("family_beukers: need t, m >= 1");
  if (eps != 1 && eps != -1) throw DomainError("family_beukers: eps must be 1 or -1");
  const Int k = 4 * Int(t) * Int(t) + eps;
  const Int km = ipow(k, m);
  const Int w = exact_div(km - eps, 4 * Int(t), "(k^m - eps)/(4t)");
  const Equation eq(Int(1), k, w * w - km);
  std::vector<Solution> s = {
      {w - 2 * Int(t), 1},
      {w, m},
      {2 * Int(t) * km + eps * w, 2 * m + 1},
  };
  return finish(FamilyId::beukers, {{"t", i64(t)}, {"eps", eps}, {"m", i64(m)}}, eq, std::move(s));
}

FamilyInstance family_even_k(std::uint64_t t, std::uint64_t m) {
  if (t < 1) throw DomainError("family_even_k: t < 1");
  const Int T = t;
  const Int k = 2 * T;
  const Int km2 = ipow(k, m + 2);
  const Int B = T * T * (km2 * km2 - 2 * (k + 1) * km2 + (k - 1) * (k - 1));
  const Equation eq(Int(1), k, B);
  if (B % (k * k) == 0) throw std::logic_error("family_even_k: B divisible by k^2");
  std::vector<Solution> s = {
      {T * (km2 - k - 1), 3},
      {T * (km2 - k + 1), m + 4},
      {T * (km2 + k - 1), m + 5},
  };
  return finish(FamilyId::even_k, {{"t", i64(t)}, {"m", i64(m)}}, eq, std::move(s));
}

FamilyInstance family_neg_conj(int variant, std::uint64_t m) {
  if (m < 1) throw DomainError("family_neg_conj: m < 1");
  const Int k = 2;
  if (variant == 1) {
    const Int B = two_pow(4 * (m + 1)) + two_pow(3 * (m + 1)) + two_pow(2 * m) + two_pow(m + 1) + 1;
    const Equation eq(-(two_pow(m + 1) + 1), k, B);
    return finish(FamilyId::neg_conj_1, {{"m", i64(m)}}, eq,
                  roots_at(eq, {0, m + 2, 2 * m + 3, 3 * m + 3}, "neg_conj_1"));
  }
  if (variant == 2) {
    const Int B = exact_div(49 * ipow(Int(4), 2 * m + 5) - 11 * ipow(Int(4), m + 3) + 1, 9, "B");
    const Equation eq(-exact_div(two_pow(2 * m + 6) - 1, 3, "A"), k, B);
    return finish(FamilyId::neg_conj_2, {{"m", i64(m)}}, eq,
                  roots_at(eq, {0, 3, 2 * m + 7, 2 * m + 8}, "neg_conj_2"));
  }
  throw DomainError("family_neg_conj: variant must be 1 or 2");
}

namespace {

RationalPoly exact_poly_div(const RationalPoly& f, const RationalPoly& g, const char* what) {
  auto [q, r] = divmod(f, g);
  if (!r.is_zero()) throw std::logic_error(std::string("family_neg_poly: ") + what + " not divisible");
  return q;
}

}  // namespace

NegPolyFamily family_neg_poly(std::uint64_t m) {
  const auto t = RationalPoly::t();
  const auto one = RationalPoly::constant(Rat(1));
  const auto two = RationalPoly::constant(Rat(2));
  const RationalPoly k = t * t + one;
  const RationalPoly km = k.pow(static_cast<unsigned>(m));
  const RationalPoly h = k.pow(static_cast<unsigned>(2 * m + 2)) + two * (k - two) * km + one;
  const RationalPoly four_t2 = RationalPoly::monomial(Rat(4), 2);
  const RationalPoly H = k * k * exact_poly_div(h, four_t2, "h");
  const RationalPoly two_t = RationalPoly::monomial(Rat(2), 1);

  NegPolyFamily fam{m, k, H, {}};
  fam.solutions.push_back({exact_poly_div(km * k * k + k - two, two_t, "x0"), 0});
  fam.solutions.push_back({exact_poly_div(k * (km * k - one), two_t, "x1"), m + 2});
  fam.solutions.push_back({exact_poly_div(k * (km * (k - two) + one), two_t, "x2"), 2 * m + 2});
  for (const auto& s : fam.solutions)
    if (!(s.x * s.x + k.pow(static_cast<unsigned>(s.n)) == H))
      throw std::logic_error("family_neg_poly: identity fails at n=" + std::to_string(s.n));
  return fam;
}

FamilyInstance family_neg_poly_at(std::uint64_t m, std::uint64_t t) {
  if (t < 1) throw DomainError("family_neg_poly_at: t < 1");
  const NegPolyFamily fam = family_neg_poly(m);
  const Rat at{Int(t)};
  auto integral = [](const Rat& v, const char* what) {
    if (v.get_den() != 1) throw DomainError(std::string("family_neg_poly_at: non-integral ") + what);
    return Int(v.get_num());
  };
  const Int k = integral(fam.k.eval(at), "k");
  const Equation eq(Int(-1), k, integral(fam.H.eval(at), "H"));
  std::vector<Solution> s;
  for (const auto& ps : fam.solutions) s.push_back({integral(ps.x.eval(at), "x"), ps.n});
  return finish(FamilyId::neg_poly, {{"m", i64(m)}, {"t", i64(t)}}, eq, std::move(s));
}

FamilyReport verify_family_instance(const FamilyInstance& inst, std::int64_t n_max) {
  FamilyReport rep{inst, n_max, true, {}, {}, {}};
  std::int64_t top = 0;
  for (const auto& s : inst.promised) {
    top = std::max(top, static_cast<std::int64_t>(s.n));
    if (!verify_solution(inst.equation, s.x, static_cast<std::int64_t>(s.n))) rep.promised_ok = false;
  }
  if (rep.n_max < 0) rep.n_max = 2 * top + 16;
  const SolutionSet found = enumerate_solutions(inst.equation, rep.n_max);
  rep.found = found.solutions();
  auto has = [](const std::vector<Solution>& v, const Solution& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  for (const auto& s : rep.found)
    if (!has(inst.promised, s)) rep.extra.push_back(s);
  for (const auto& s : inst.promised)
    if (!has(rep.found, s)) rep.missing.push_back(s);
  return rep;
}

std::vector<FamilyReport> verify_family_range(const std::vector<FamilyInstance>& grid, std::int64_t n_max,
                                              unsigned workers) {
  std::vector<std::optional<FamilyReport>> slots(grid.size());
  parallel_for(grid.size(), workers, [&](std::size_t i) { slots[i] = verify_family_instance(grid[i], n_max); });
  std::vector<FamilyReport> out;
  out.reserve(slots.size());
  for (auto& r : slots) out.push_back(std::move(*r));
  return out;
}

}  // namespace rnforge
