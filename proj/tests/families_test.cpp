#include "rnforge/families.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "rnforge/errors.hpp"

using namespace rnforge;

namespace {

std::vector<std::uint64_t> ns(const std::vector<Solution>& v) {
  std::vector<std::uint64_t> out;
  for (const auto& s : v) out.push_back(s.n);
  return out;
}

unsigned long ul(const Int& v) { return v.get_ui(); }

// Every promised pair squares correctly, checked with GMP directly.
void expect_promised_by_oracle(const FamilyInstance& inst) {
  const auto& eq = inst.equation;
  for (const auto& s : inst.promised) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), ul(eq.k()), s.n);
    EXPECT_EQ(s.x * s.x, eq.A() * p + eq.B()) << eq.to_text() << " n=" << s.n;
  }
}

RationalPoly random_poly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(0, 6), num(-20, 20), den(1, 9);
  std::vector<Rat> c;
  for (int i = deg(rng); i >= 0; --i) c.emplace_back(num(rng), den(rng));
  return RationalPoly(std::move(c));
}

}  // namespace

TEST(RationalPoly, TrimAndDegree) {
  EXPECT_TRUE(RationalPoly({Rat(0), Rat(0)}).is_zero());
  EXPECT_EQ(RationalPoly().degree(), -1);
  RationalPoly p({Rat(1), Rat(2, 4), Rat(0)});
  EXPECT_EQ(p.degree(), 1);
  EXPECT_EQ(p.coefficients()[1], Rat(1, 2));
  EXPECT_EQ((p - p).degree(), -1);
  EXPECT_EQ((RationalPoly::t() * RationalPoly::t() + RationalPoly::constant(1)).to_text(), "t^2 + 1");
}

TEST(RationalPoly, ProductEvaluatesPointwise) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 17);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = random_poly(rng), g = random_poly(rng);
    auto fg = f * g;
    for (int i = 0; i < 10; ++i) {
      Rat pt(num(rng), den(rng));
      pt.canonicalize();
      EXPECT_EQ(fg.eval(pt), f.eval(pt) * g.eval(pt));
      EXPECT_EQ((f + g).eval(pt), f.eval(pt) + g.eval(pt));
    }
  }
}

TEST(RationalPoly, DivisionWithRemainder) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_poly(rng), g = random_poly(rng);
    if (g.is_zero()) continue;
    auto [q, r] = divmod(f, g);
    EXPECT_EQ(q * g + r, f);
    EXPECT_LT(r.degree(), g.degree());
  }
  EXPECT_THROW(divmod(RationalPoly::t(), RationalPoly()), DomainError);
}

TEST(ConstructFour, SmallExample) {
  auto inst = construct_four(Int(2), 1, 2, 3);
  EXPECT_EQ(inst.equation, Equation(Int(1080), Int(2), Int(-1071)));
  std::vector<Solution> want = {{Int(3), 0}, {Int(33), 1}, {Int(57), 2}, {Int(87), 3}};
  EXPECT_EQ(inst.promised, want);
  auto nz = normalize(inst.equation);
  EXPECT_EQ(nz.scale, 3);
  EXPECT_EQ(nz.equation, Equation(Int(120), Int(2), Int(-119)));
  auto e = oracle::exponents(120, 2, -119, 40);
  for (std::uint64_t n : {0, 1, 2, 3}) EXPECT_NE(std::find(e.begin(), e.end(), n), e.end());
}

TEST(ConstructFour, RandomTriples) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> kd(2, 7), pd(1, 10);
  for (int trial = 0; trial < 50; ++trial) {
    std::uint64_t p = pd(rng), q = p + pd(rng), r = q + pd(rng);
    Int k = kd(rng);
    auto inst = construct_four(k, p, q, r);
    ASSERT_EQ(ns(inst.promised), (std::vector<std::uint64_t>{0, p, q, r}));
    expect_promised_by_oracle(inst);
    // n = 0 value is F(1) = A + B.
    EXPECT_EQ(inst.promised[0].x * inst.promised[0].x, inst.equation.A() + inst.equation.B());
    auto nz = normalize(inst.equation);
    auto e = oracle::exponents(nz.equation.A(), ul(k), nz.equation.B(), r);
    for (auto n : ns(inst.promised)) EXPECT_NE(std::find(e.begin(), e.end(), n), e.end());
  }
  EXPECT_THROW(construct_four(Int(2), 2, 2, 3), DomainError);
}

TEST(K2Five, FirstVariantDegenerateAtOne) {
  auto inst = family_k2_five(1, 1);
  EXPECT_EQ(inst.equation, Equation(Int(9), Int(2), Int(-63)));
  EXPECT_TRUE(inst.degenerate);
  EXPECT_EQ(ns(inst.promised), (std::vector<std::uint64_t>{3, 5, 7, 15}));
  auto rep = verify_family_instance(inst);
  EXPECT_TRUE(rep.promised_ok);
  EXPECT_TRUE(rep.missing.empty());
  EXPECT_EQ(rep.extra, (std::vector<Solution>{{Int(9), 4}}));
}

TEST(K2Five, FirstVariantAtTwo) {
  auto inst = family_k2_five(1, 2);
  // B = 1 - 2^9.
  EXPECT_EQ(inst.equation, Equation(Int(65), Int(2), Int(-511)));
  EXPECT_FALSE(inst.degenerate);
  EXPECT_EQ(ns(inst.promised), (std::vector<std::uint64_t>{3, 4, 8, 10, 24}));
  EXPECT_EQ(inst.promised[1].x, 23);
  EXPECT_EQ(oracle::exponents(65, 2, -511, 80), (std::vector<std::uint64_t>{3, 4, 8, 10, 24}));
}

TEST(K2Five, SecondVariantAtOne) {
  auto inst = family_k2_five(2, 1);
  EXPECT_EQ(inst.equation, Equation(Int(7), Int(2), Int(57)));
  std::vector<Solution> want = {{Int(8), 0}, {Int(13), 4}, {Int(43), 8}, {Int(85), 10}, {Int(10837), 24}};
  EXPECT_EQ(inst.promised, want);
}

TEST(K2Five, GridOneToForty) {
  std::vector<FamilyInstance> grid;
  for (int v : {1, 2})
    for (std::uint64_t m = 1; m <= 40; ++m) grid.push_back(family_k2_five(v, m));
  auto reports = verify_family_range(grid, -1, 4);
  ASSERT_EQ(reports.size(), grid.size());
  for (const auto& rep : reports) {
    EXPECT_TRUE(rep.promised_ok);
    EXPECT_TRUE(rep.missing.empty());
    EXPECT_EQ(rep.instance.promised.size(), rep.instance.degenerate ? 4u : 5u);
  }
  for (std::uint64_t m = 1; m <= 6; ++m) expect_promised_by_oracle(grid[m - 1]);
  for (std::uint64_t m = 1; m <= 4; ++m) expect_promised_by_oracle(grid[40 + m - 1]);
}

TEST(Beukers, Examples) {
  auto inst = family_beukers(1, 1, 2);
  EXPECT_EQ(inst.equation, Equation(Int(1), Int(5), Int(11)));
  std::vector<Solution> want = {{Int(4), 1}, {Int(6), 2}, {Int(56), 5}};
  EXPECT_EQ(inst.promised, want);

  auto odd = family_beukers(1, -1, 3);
  EXPECT_EQ(odd.equation, Equation(Int(1), Int(3), Int(22)));
  EXPECT_EQ(oracle::exponents(1, 3, 22, 40), (std::vector<std::uint64_t>{1, 3, 7}));
  EXPECT_EQ(odd.promised[1].x, 7);

  EXPECT_THROW(family_beukers(1, -1, 2), DomainError);
  EXPECT_TRUE(family_beukers(2, 1, 1).degenerate);
}

TEST(Beukers, Grid) {
  for (std::uint64_t t = 1; t <= 5; ++t)
    for (int eps : {1, -1})
      for (std::uint64_t m = 1; m <= 8; ++m) {
        if (eps == -1 && m % 2 == 0) {
          EXPECT_THROW(family_beukers(t, eps, m), DomainError);
          continue;
        }
        auto inst = family_beukers(t, eps, m);
        expect_promised_by_oracle(inst);
        const Int k = inst.equation.k();
        EXPECT_EQ(inst.promised[m == 1 ? 0 : 1].x * 4 * t, ipow(k, m) - eps);
        EXPECT_EQ(gcd(k, inst.equation.B()), 1);
      }
}

TEST(EvenK, Examples) {
  auto rn = family_even_k(1, 0);
  EXPECT_EQ(rn.equation, Equation(Int(1), Int(2), Int(-7)));
  std::vector<Solution> want = {{Int(1), 3}, {Int(3), 4}, {Int(5), 5}};
  EXPECT_EQ(rn.promised, want);

  auto four = family_even_k(2, 0);
  EXPECT_EQ(four.equation, Equation(Int(1), Int(4), Int(420)));
  auto e = oracle::exponents(1, 4, 420, 40);
  for (std::uint64_t n : {3, 4, 5}) EXPECT_NE(std::find(e.begin(), e.end(), n), e.end());
}

TEST(EvenK, Grid) {
  for (std::uint64_t t = 1; t <= 6; ++t)
    for (std::uint64_t m = 0; m <= 10; ++m) {
      auto inst = family_even_k(t, m);
      EXPECT_EQ(ns(inst.promised), (std::vector<std::uint64_t>{3, m + 4, m + 5}));
      expect_promised_by_oracle(inst);
      const Int k = inst.equation.k();
      EXPECT_NE(inst.equation.B() % (k * k), 0);
    }
}

TEST(NegPoly, IdentityAsPolynomials) {
  const auto t = RationalPoly::t();
  const auto k = t * t + RationalPoly::constant(1);
  for (std::uint64_t m = 0; m <= 20; ++m) {
    auto fam = family_neg_poly(m);
    ASSERT_EQ(fam.solutions.size(), 3u);
    EXPECT_EQ(fam.k, k);
    // H * 4 t^2 = k^2 * h, coefficient by coefficient.
    const auto km = k.pow(static_cast<unsigned>(m));
    const auto h = k.pow(static_cast<unsigned>(2 * m + 2)) + RationalPoly::constant(2) * (k - RationalPoly::constant(2)) * km +
                   RationalPoly::constant(1);
    EXPECT_EQ(fam.H * RationalPoly::monomial(Rat(4), 2), k * k * h);
    for (const auto& s : fam.solutions) {
      EXPECT_TRUE((s.x * s.x + k.pow(static_cast<unsigned>(s.n)) - fam.H).is_zero());
      // Coefficients can be halves, but values at integer t are integers.
      for (int at = -6; at <= 6; ++at) EXPECT_EQ(s.x.eval(Rat(at)).get_den(), 1) << "m=" << m << " t=" << at;
    }
    EXPECT_EQ(ns({{Int(0), fam.solutions[0].n}, {Int(0), fam.solutions[1].n}, {Int(0), fam.solutions[2].n}}),
              (std::vector<std::uint64_t>{0, m + 2, 2 * m + 2}));
    EXPECT_EQ(fam.H.eval(Rat(1)), Rat(ipow(Int(2), 2 * m + 2) + 1));
  }
}

TEST(NegPoly, AtTEqualsOne) {
  auto m1 = family_neg_poly_at(1, 1);
  EXPECT_EQ(m1.equation, Equation(Int(-1), Int(2), Int(17)));
  std::vector<Solution> want = {{Int(4), 0}, {Int(3), 3}, {Int(1), 4}};
  EXPECT_EQ(m1.promised, want);

  auto m0 = family_neg_poly_at(0, 1);
  EXPECT_TRUE(m0.degenerate);
  EXPECT_EQ(ns(m0.promised), (std::vector<std::uint64_t>{0, 2}));

  for (std::uint64_t m = 1; m <= 20; ++m) {
    auto inst = family_neg_poly_at(m, 1);
    EXPECT_FALSE(inst.degenerate);
    const Int B = ipow(Int(2), 2 * m + 2) + 1;
    auto exps = oracle::exponents(-1, 2, B, 200);
    EXPECT_EQ(exps, (std::vector<std::uint64_t>{0, m + 2, 2 * m + 2})) << "m=" << m;
  }
}

TEST(NegPoly, OtherIntegerT) {
  for (std::uint64_t t = 2; t <= 6; ++t)
    for (std::uint64_t m = 1; m <= 6; ++m) {
      try {
        auto inst = family_neg_poly_at(m, t);
        expect_promised_by_oracle(inst);
        EXPECT_EQ(inst.equation.k(), Int(t * t + 1));
      } catch (const DomainError&) {
        // H(t) or an x value is not an integer at this t.
      }
    }
  auto inst = family_neg_poly_at(1, 2);
  EXPECT_EQ(inst.equation, Equation(Int(-1), Int(5), Int(1025)));
}

TEST(NegConj, Examples) {
  auto c1 = family_neg_conj(1, 1);
  EXPECT_EQ(c1.equation, Equation(Int(-5), Int(2), Int(329)));
  std::vector<Solution> want = {{Int(18), 0}, {Int(17), 3}, {Int(13), 5}, {Int(3), 6}};
  EXPECT_EQ(c1.promised, want);

  auto c2 = family_neg_conj(2, 1);
  EXPECT_EQ(c2.equation.A(), -85);
  EXPECT_EQ(c2.equation.B() * 9, 49 * ipow(Int(4), 7) - 11 * ipow(Int(4), 4) + 1);
  EXPECT_EQ(ns(c2.promised), (std::vector<std::uint64_t>{0, 3, 9, 10}));
}

TEST(NegConj, ExactlyFourUpToBound) {
  for (int v : {1, 2})
    for (std::uint64_t m = 1; m <= 20; ++m) {
      auto inst = family_neg_conj(v, m);
      auto rep = verify_family_instance(inst, 100000);
      EXPECT_TRUE(rep.promised_ok);
      EXPECT_TRUE(rep.extra.empty()) << to_string(inst.family) << " m=" << m;
      EXPECT_EQ(rep.found.size(), 4u);
      auto exps = oracle::exponents(inst.equation.A(), 2, inst.equation.B(), 10 * m + 40);
      EXPECT_EQ(exps, ns(inst.promised));
    }
}

TEST(Families, NamesRoundTrip) {
  for (auto id : {FamilyId::four, FamilyId::k2_five_1, FamilyId::k2_five_2, FamilyId::beukers, FamilyId::even_k,
                  FamilyId::neg_poly, FamilyId::neg_conj_1, FamilyId::neg_conj_2})
    EXPECT_EQ(parse_family(to_string(id)), id);
  EXPECT_THROW(parse_family("nope"), FormatError);
}

TEST(Families, ParallelMatchesSerial) {
  std::vector<FamilyInstance> grid;
  for (std::uint64_t m = 1; m <= 10; ++m) grid.push_back(family_neg_conj(1, m));
  for (std::uint64_t t = 1; t <= 5; ++t) grid.push_back(family_even_k(t, 2));
  auto a = verify_family_range(grid, 60, 1);
  auto b = verify_family_range(grid, 60, 6);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].found, b[i].found);
    EXPECT_EQ(a[i].extra, b[i].extra);
  }
}
