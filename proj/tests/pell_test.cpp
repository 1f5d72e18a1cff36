#include <gtest/gtest.h>

#include <chrono>
#include <set>

#include "oracle.hpp"
#include "rnforge/errors.hpp"
#include "rnforge/pell.hpp"

using namespace rnforge;
using Exps = std::vector<std::uint64_t>;

namespace {

std::vector<Int> ys(const std::vector<PellClass>& cls) {
  std::vector<Int> out;
  for (const auto& c : cls) out.push_back(c.y0);
  return out;
}

std::vector<Int> xs(const std::vector<PellClass>& cls) {
  std::vector<Int> out;
  for (const auto& c : cls) out.push_back(c.x0);
  return out;
}

}  // namespace

TEST(ContinuedFraction, Examples) {
  auto a = cf_sqrt(2);
  EXPECT_EQ(a.a0, 1);
  EXPECT_EQ(a.period, std::vector<Int>{2});
  auto b = cf_sqrt(3);
  EXPECT_EQ(b.a0, 1);
  EXPECT_EQ(b.period, (std::vector<Int>{1, 2}));
  EXPECT_THROW(cf_sqrt(16), DomainError);
}

TEST(PellFundamental, Examples) {
  EXPECT_EQ(pell_fundamental(165), (PellUnit{165, 1079, 84}));
  EXPECT_EQ(pell_fundamental(330), (PellUnit{330, 109, 6}));
  EXPECT_EQ(pell_fundamental(2), (PellUnit{2, 3, 2}));
  EXPECT_THROW(pell_fundamental(49), DomainError);
}

TEST(PellFundamental, UnitIdentityAndMinimality) {
  for (long D = 2; D <= 10000; ++D) {
    if (is_square(D)) continue;
    PellUnit u = pell_fundamental(D);
    ASSERT_EQ(u.u * u.u - D * u.v * u.v, 1) << D;
    if (u.v <= 100000) {
      for (Int v = 1; v < u.v; ++v) ASSERT_FALSE(is_square(Int(D * v * v + 1))) << D;
    }
  }
}

TEST(ClassReps, FirstRemarkSet) {
  auto cls = pell_class_reps({165, 26404});
  // the published list pairs 1142 with 82, but 1142^2 - 165*82^2 = 194704;
  // the representative is (1142, 88)
  std::vector<Int> want_y{1, 3, 13, 16, 27, 32, 64, 75, 88, 103, 201, 235};
  std::vector<Int> want_x{163, 167, 233, 262, 383, 442, 838, 977, 1142, 1333, 2587, 3023};
  EXPECT_EQ(ys(cls), want_y);
  EXPECT_EQ(xs(cls), want_x);
  EXPECT_NE(Int(1142) * 1142 - 165 * 82 * 82, 26404);
}

TEST(ClassReps, SecondRemarkSet) {
  auto cls = pell_class_reps({330, 26404});
  EXPECT_EQ(ys(cls), (std::vector<Int>{4, 8, 20, 60}));
  EXPECT_EQ(xs(cls), (std::vector<Int>{178, 218, 398, 1102}));
}

TEST(ClassReps, UnitProblem) {
  auto cls = pell_class_reps({2, 1});
  ASSERT_EQ(cls.size(), 1u);
  EXPECT_EQ(cls[0].x0, 1);
  EXPECT_EQ(cls[0].y0, 0);
}

// Every solution with y <= limit, found by brute force, appears with the same
// |y| on a branch of some class.
TEST(ClassReps, CompletenessAgainstBruteForce) {
  const long limit = 100000;
  int problems = 0;
  for (long D : {2L, 3L, 5L, 6L, 7L, 10L, 13L, 21L, 30L, 45L, 61L, 110L, 165L, 199L}) {
    for (long N : {-9999L, -4400L, -71L, -2L, -1L, 1L, 4L, 14L, 79L, 441L, 2030L, 9801L, 10000L}) {
      auto cls = pell_class_reps({D, N});
      std::set<std::string> reach;
      for (const auto& cl : cls) {
        for (auto [x, y] : class_branches(cl)) {
          for (int i = 0; i < 60 && abs(y) <= 4 * limit; ++i) {
            reach.insert(to_string(abs(x)) + "," + to_string(abs(y)));
            orbit_step(cl.unit, x, y);
          }
        }
      }
      for (long y = 1; y <= limit; ++y) {
        mpz_class r;
        if (!oracle::square_root(mpz_class(N) + mpz_class(D) * y * y, r)) continue;
        ASSERT_TRUE(reach.count(to_string(r) + "," + std::to_string(y))) << D << " " << N << " " << y;
      }
      ++problems;
    }
  }
  EXPECT_EQ(problems, 14 * 13);
}

TEST(Orbit, UnfoldExamples) {
  auto c1 = pell_class_reps({165, 26404})[0];
  auto o1 = orbit_unfold(c1, 2);
  EXPECT_EQ(o1[1], (std::pair<Int, Int>{189737, 14771}));
  auto u = pell_class_reps({2, 1})[0];
  auto o2 = orbit_unfold(u, 3);
  EXPECT_EQ(o2, (std::vector<std::pair<Int, Int>>{{1, 0}, {3, 2}, {17, 12}}));
  auto c2 = pell_class_reps({330, 26404})[0];
  EXPECT_EQ(orbit_unfold(c2, 2)[1], (std::pair<Int, Int>{27322, 1504}));
  EXPECT_THROW(orbit_unfold(c2, 0), DomainError);
}

TEST(Orbit, Conservation) {
  for (const PellProblem& pr : {PellProblem{165, 26404}, PellProblem{330, 26404}, PellProblem{7, -3}, PellProblem{61, 1}}) {
    for (const auto& cl : pell_class_reps(pr)) {
      for (const auto& orbit : {orbit_unfold(cl, 25)}) {
        for (const auto& [x, y] : orbit) ASSERT_EQ(x * x - pr.D * y * y, pr.N);
      }
      for (auto [x, y] : class_branches(cl)) {
        for (int i = 0; i < 25; ++i) {
          ASSERT_EQ(x * x - pr.D * y * y, pr.N);
          orbit_step(cl.unit, x, y);
        }
      }
    }
  }
}

TEST(OrbitMod, MatchesDirectIteration) {
  auto c1 = pell_class_reps({165, 26404})[0];
  auto c2 = pell_class_reps({330, 26404})[0];
  for (const auto& [cl, m] : std::vector<std::pair<PellClass, std::uint64_t>>{{c1, 2}, {c2, 4}, {c1, 2047}, {c2, 97}}) {
    OrbitModulus om = orbit_mod(cl, m);
    ASSERT_GE(om.period, 1u);
    EXPECT_EQ(om.y_residues[0], mod_u64(cl.y0, m));
    auto order = orbit_matrix_order(cl.unit, m, 1'000'000);
    ASSERT_TRUE(order);
    EXPECT_EQ(*order % om.period, 0u);
    auto orbit = orbit_unfold(cl, std::max<std::size_t>(20, 4 * om.period));
    for (std::size_t i = 0; i < orbit.size(); ++i) {
      ASSERT_EQ(om.y_residues[i % om.period], mod_u64(orbit[i].second, m)) << m << " " << i;
    }
  }
  EXPECT_EQ(orbit_mod(c2, 4).y_residues[0], 0u);
}

TEST(PowerSieve, SixSolutionEquation) {
  const auto t0 = std::chrono::steady_clock::now();
  auto res = power_sieve(sieve_problems_for(Equation(165, 2, 26404)), 2, PowerSieveOptions{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_TRUE(res.certificate) << res.failure;
  EXPECT_EQ(res.certificate->resulting_n_set(), (Exps{0, 5, 7, 8, 10, 12}));
  for (const auto& s : res.certificate->solutions) EXPECT_TRUE(verify_solution(Equation(165, 2, 26404), s.x, s.n));
  EXPECT_EQ(verify_power_sieve(*res.certificate), "");
  EXPECT_LT(secs, 30.0);
  RecordProperty("sieve_seconds", std::to_string(secs));
}

TEST(PowerSieve, UnitProblemOddExponents) {
  // x^2 = 2^n + 1 with n odd is x^2 - 2y^2 = 1, y = 2^t
  auto res = power_sieve({SieveProblem{{2, 1}, 1}}, 2, PowerSieveOptions{});
  ASSERT_TRUE(res.certificate) << res.failure;
  EXPECT_EQ(res.certificate->resulting_n_set(), Exps{3});
  EXPECT_EQ(res.certificate->solutions[0].x, 3);
  EXPECT_EQ(verify_power_sieve(*res.certificate), "");
}

TEST(PowerSieve, NoClasses) {
  // x^2 - 3y^2 = 2 has no integer solutions (squares mod 3)
  ASSERT_TRUE(pell_class_reps({3, 2}).empty());
  auto res = power_sieve({SieveProblem{{3, 2}, 0}}, 2, PowerSieveOptions{});
  ASSERT_TRUE(res.certificate);
  EXPECT_TRUE(res.certificate->resulting_n_set().empty());
  EXPECT_EQ(verify_power_sieve(*res.certificate), "");
}

TEST(PowerSieve, RejectsSquareD) {
  EXPECT_THROW(sieve_problems_for(Equation(1, 2, 5)), DomainError);
  EXPECT_THROW(sieve_problems_for(Equation(-3, 2, 5)), DomainError);
}

class SieveTamper : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    auto res = power_sieve(sieve_problems_for(Equation(165, 2, 26404)), 2, PowerSieveOptions{});
    ASSERT_TRUE(res.certificate);
    cert_ = new PowerSieveCertificate(*res.certificate);
  }
  static void TearDownTestSuite() { delete cert_; }
  static PowerSieveCertificate* cert_;
};

PowerSieveCertificate* SieveTamper::cert_ = nullptr;

TEST_F(SieveTamper, DroppedClass) {
  auto c = *cert_;
  c.problems[0].classes.pop_back();
  EXPECT_NE(verify_power_sieve(c), "");
}

TEST_F(SieveTamper, DroppedSolution) {
  auto c = *cert_;
  c.solutions.pop_back();
  EXPECT_NE(verify_power_sieve(c), "");
}

TEST_F(SieveTamper, ExtraExclusion) {
  auto c = *cert_;
  // drop a residue that was still open at some step, for each step in turn
  int tried = 0;
  for (std::size_t s = 0; s + 1 < c.problems[0].periods.size(); ++s) {
    for (std::size_t b = 0; b < c.problems[0].branches.size(); ++b) {
      if (c.problems[0].branches[b].open[s].empty()) continue;
      auto t = c;
      t.problems[0].branches[b].open[s].pop_back();
      EXPECT_NE(verify_power_sieve(t), "") << s << " " << b;
      ++tried;
      break;
    }
  }
  EXPECT_GE(tried, 2);
}

TEST_F(SieveTamper, ShortDirectRange) {
  auto c = *cert_;
  for (auto& br : c.problems[1].branches) {
    if (br.direct_steps > 0) {
      br.direct_steps -= 1;
      break;
    }
  }
  EXPECT_NE(verify_power_sieve(c), "");
}

TEST_F(SieveTamper, WrongUnit) {
  auto c = *cert_;
  c.problems[0].unit = PellUnit{165, Int(1079) * 1079 + 165 * 84 * 84, 2 * 1079 * 84};
  EXPECT_NE(verify_power_sieve(c), "");
}

TEST_F(SieveTamper, WrongPeriod) {
  auto c = *cert_;
  c.problems[0].periods.back() /= 2;
  EXPECT_NE(verify_power_sieve(c), "");
}
