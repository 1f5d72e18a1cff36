#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <tuple>

#include "oracle.hpp"
#include "rnforge/errors.hpp"
#include "rnforge/jsonl.hpp"
#include "rnforge/search.hpp"

using namespace rnforge;
using Exps = std::vector<std::uint64_t>;

namespace {

const SearchHit* find_hit(const std::vector<SearchHit>& hits, const Equation& eq) {
  for (const auto& h : hits) {
    if (h.equation == eq) return &h;
  }
  return nullptr;
}

std::string dump_all(const std::vector<SearchHit>& hits) {
  std::string s;
  for (const auto& h : hits) s += dump_line(hit_record(h)) + "\n";
  return s;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rnforge_" + name + "_" + std::to_string(::getpid()));
}

}  // namespace

TEST(Candidates, ContainsPlantedPair) {
  auto cs = candidates_for(165, 2, 5);
  bool found = false;
  for (const auto& c : cs) {
    if (c.d == 15) {
      EXPECT_EQ(c.x1, 163);
      EXPECT_EQ(c.x2, 178);
      EXPECT_EQ(c.B, 26404);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Candidates, DegenerateSmallCases) {
  auto a = candidates_for(1, 2, 1);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].d, 1);
  EXPECT_EQ(a[0].x1, 0);
  EXPECT_EQ(a[0].x2, 1);
  EXPECT_EQ(a[0].B, -1);

  auto b = candidates_for(3, 2, 2);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].d, 1);
  EXPECT_EQ(b[0].x1, 4);
  EXPECT_EQ(b[0].x2, 5);
  EXPECT_EQ(b[0].B, 13);
  EXPECT_EQ(b[1].d, 3);
  EXPECT_EQ(b[1].x1, 0);
  EXPECT_EQ(b[1].B, -3);
  EXPECT_THROW(candidates_for(0, 2, 2), DomainError);
}

TEST(Candidates, AlternativeFormulaSubtractsTopPower) {
  for (const auto& c : candidates_for(165, 2, 5, BFormula::subtract_A_kp)) {
    EXPECT_EQ(c.B, c.x1 * c.x1 - 165 * 32);
  }
}

TEST(Candidates, SoundnessRandom) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10000; ++i) {
    const long A = static_cast<long>(rng() % 500) + 1;
    const unsigned long k = rng() % 9 + 2;
    const long p = static_cast<long>(rng() % 8) + 1;
    const Int K = A * (ipow(k, p) - 1);
    for (const auto& c : candidates_for(A, k, p)) {
      ASSERT_EQ(K % c.d, 0);
      ASSERT_LE(c.d * c.d, K);
      ASSERT_EQ(c.x2 * c.x2 - c.x1 * c.x1, K);
      ASSERT_EQ(c.x1 * c.x1, A + c.B);
      ASSERT_EQ(c.x2 * c.x2, A * ipow(k, p) + c.B);
      ASSERT_NE(c.B, 0);
    }
  }
}

TEST(Candidates, SeededBothSigns) {
  for (long A : {-7L, -1L, 3L, 20L}) {
    for (long q = 0; q < 4; ++q) {
      for (long p = q + 1; p < 7; ++p) {
        const Int kq = ipow(3, q), kp = ipow(3, p);
        for (const auto& c : candidates_seeded(A, 3, q, p)) {
          const Int vq = A * kq + c.B, vp = A * kp + c.B;
          EXPECT_TRUE(is_square(vq) && is_square(vp));
          EXPECT_TRUE(*is_square(vq) == c.x1 || *is_square(vq) == c.x2);
        }
      }
    }
  }
}

// Every (A, B, p) with solutions at n = 0 and n = p, found by walking x1 over
// [0, K/2] (x2 - x1 >= 1 forces x1 <= (K - 1)/2), is produced by the divisor
// walk and vice versa.
TEST(Candidates, OracleEquivalenceWithBruteForce) {
  std::set<std::tuple<long, long, long>> walk, brute;
  for (long A = 1; A <= 50; ++A) {
    for (long p = 1; p <= 6; ++p) {
      for (const auto& c : candidates_for(A, 2, p)) walk.emplace(A, c.B.get_si(), p);
      const long K = A * ((1L << p) - 1);
      for (long x1 = 0; 2 * x1 <= K; ++x1) {
        const long B = x1 * x1 - A;
        if (B == 0) continue;
        mpz_class r;
        if (oracle::square_root(mpz_class(A * (1L << p) + B), r)) brute.emplace(A, B, p);
      }
    }
  }
  EXPECT_EQ(walk, brute);

  // and enumeration of each found equation sees both planted solutions
  for (const auto& [A, B, p] : walk) {
    auto ex = oracle::exponents(A, 2, B, 40);
    EXPECT_TRUE(std::count(ex.begin(), ex.end(), 0u) == 1);
    EXPECT_TRUE(std::count(ex.begin(), ex.end(), static_cast<std::uint64_t>(p)) == 1);
  }
}

TEST(SearchConfig, Validation) {
  SearchConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_max = 10;
  EXPECT_THROW(c.validate(), DomainError);
  c = SearchConfig{};
  c.min_solutions = 1;
  EXPECT_THROW(c.validate(), DomainError);
  c = SearchConfig{};
  c.A_range = {5, 4};
  EXPECT_THROW(c.validate(), DomainError);
  c = SearchConfig{};
  c.k = 1;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(RunSearch, SingleASixSolutions) {
  SearchConfig c;
  c.p_range = {1, 5};
  c.A_range = {165, 165};
  c.min_solutions = 6;
  c.n_max = 60;
  auto hits = run_search(c);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].equation, Equation(165, 2, 26404));
  EXPECT_EQ(hits[0].solutions.exponents(), (Exps{0, 5, 7, 8, 10, 12}));
  EXPECT_EQ(hits[0].source.d, 15);
}

TEST(RunSearch, BaseThreeFiveSolutions) {
  SearchConfig c;
  c.k = 3;
  c.p_range = {1, 12};
  c.A_range = {1, 200};
  c.min_solutions = 5;
  c.n_max = 60;
  auto hits = run_search(c);
  const SearchHit* a = find_hit(hits, Equation(28, 3, 2997));
  const SearchHit* b = find_hit(hits, Equation(70, 3, 414));
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->solutions.exponents(), oracle::exponents(28, 3, 2997, 60));
  EXPECT_EQ(b->solutions.exponents(), oracle::exponents(70, 3, 414, 60));
  std::set<Equation> seen;
  for (const auto& h : hits) {
    EXPECT_TRUE(seen.insert(h.equation).second) << h.equation.to_text();
    EXPECT_GE(h.solutions.size(), 5u);
    EXPECT_EQ(normalize(h.equation).scale, 1);
  }
  for (std::size_t i = 1; i < hits.size(); ++i) EXPECT_TRUE(hit_rank_less(hits[i - 1], hits[i]));
}

TEST(RunSearch, DeterministicAcrossWorkers) {
  SearchConfig c;
  c.p_range = {1, 14};
  c.A_range = {1, 120};
  c.min_solutions = 4;
  c.n_max = 40;
  c.workers = 1;
  const std::string one = dump_all(run_search(c));
  c.workers = 8;
  const std::string eight = dump_all(run_search(c));
  EXPECT_FALSE(one.empty());
  EXPECT_EQ(one, eight);
}

TEST(RunSearchUnitA, BaseSixAndTwelve) {
  SearchConfig c;
  c.mode = SearchMode::unit_A;
  c.k = 6;
  c.q_range = {0, 6};
  c.p_range = {1, 8};
  c.n_max = 100;
  c.min_solutions = 3;
  c.require_coprime_B_k = true;
  auto hits = run_search_unit_A(c);
  const SearchHit* h = find_hit(hits, Equation(1, 6, 2185));
  ASSERT_TRUE(h);
  EXPECT_EQ(h->solutions.exponents(), (Exps{3, 4, 6}));

  c.k = 12;
  hits = run_search(c);
  h = find_hit(hits, Equation(1, 12, 25029865));
  ASSERT_TRUE(h);
  EXPECT_EQ(h->solutions.exponents(), (Exps{2, 6, 8}));
  for (const auto& hit : hits) {
    Int g;
    mpz_gcd(g.get_mpz_t(), hit.equation.B().get_mpz_t(), Int(12).get_mpz_t());
    EXPECT_EQ(g, 1);
  }
}

TEST(RunSearchUnitA, TrivialSeedAtZero) {
  SearchConfig c;
  c.mode = SearchMode::unit_A;
  c.k = 2;
  c.q_range = {0, 0};
  c.p_range = {3, 3};
  c.n_max = 20;
  c.min_solutions = 2;
  c.exclude_B_divisible_k2 = false;
  auto hits = run_search(c);
  const SearchHit* h = find_hit(hits, Equation(1, 2, 8));
  ASSERT_TRUE(h);
  auto ex = h->solutions.exponents();
  EXPECT_TRUE(std::count(ex.begin(), ex.end(), 0u) && std::count(ex.begin(), ex.end(), 3u));
  EXPECT_EQ(h->source.x1, 3);

  c.exclude_B_divisible_k2 = true;
  EXPECT_FALSE(find_hit(run_search(c), Equation(1, 2, 8)));
}

TEST(RunSearchNegativeA, TableRows) {
  SearchConfig c;
  c.mode = SearchMode::negative_A;
  c.k = 6;
  c.A_range = {1, 1};
  c.q_range = {0, 6};
  c.p_range = {1, 7};
  c.n_max = 100;
  c.min_solutions = 3;
  auto hits = run_search_negative_A(c);
  const SearchHit* h = find_hit(hits, Equation(-1, 6, 8865));
  ASSERT_TRUE(h);
  EXPECT_EQ(h->solutions.exponents(), (Exps{3, 4, 5}));
  for (const auto& hit : hits) {
    for (auto n : hit.solutions.exponents()) EXPECT_LE(static_cast<std::int64_t>(n), auto_bound(hit.equation));
  }

  c.k = 21;
  h = nullptr;
  hits = run_search(c);
  h = find_hit(hits, Equation(-1, 21, 5340742));
  ASSERT_TRUE(h);
  EXPECT_EQ(h->solutions.exponents(), (Exps{1, 3, 5}));
}

TEST(RunSearchNegativeA, SmallSeed) {
  SearchConfig c;
  c.mode = SearchMode::negative_A;
  c.k = 2;
  c.A_range = {1, 1};
  c.q_range = {0, 0};
  c.p_range = {2, 2};
  c.n_max = 10;
  c.min_solutions = 2;
  auto hits = run_search(c);
  const SearchHit* h = find_hit(hits, Equation(-1, 2, 5));
  ASSERT_TRUE(h);
  std::vector<Solution> want{{2, 0}, {1, 2}};
  EXPECT_EQ(h->solutions.solutions(), want);
}

TEST(Checkpoint, ResumeMatchesFreshRun) {
  SearchConfig c;
  c.p_range = {1, 12};
  c.A_range = {1, 80};
  c.min_solutions = 4;
  c.n_max = 40;
  const std::string fresh = dump_all(run_search(c));

  const auto path = temp_path("ckpt");
  c.checkpoint_path = path.string();
  EXPECT_EQ(dump_all(run_search(c)), fresh);

  // cut the file in the middle of a record, as after a crash
  std::string body;
  {
    std::ifstream in(path);
    body.assign(std::istreambuf_iterator<char>(in), {});
  }
  ASSERT_NE(body.find("A_done=40\n"), std::string::npos);
  const std::size_t cut = body.find("A_done=40\n") + 10;
  {
    std::ofstream out(path, std::ios::trunc);
    out << body.substr(0, cut) << body.substr(cut, 25);
  }
  EXPECT_EQ(dump_all(run_search(c)), fresh);
  {
    std::ifstream in(path);
    std::string again(std::istreambuf_iterator<char>(in), {});
    EXPECT_EQ(again, body);
  }
  std::filesystem::remove(path);
}

TEST(Checkpoint, UnwritablePathIsIoError) {
  SearchConfig c;
  c.p_range = {1, 4};
  c.A_range = {1, 3};
  c.checkpoint_path = "/nonexistent-dir/ckpt.jsonl";
  EXPECT_THROW(run_search(c), IoError);
}
