#include "rnforge/search.hpp"

#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "rnforge/errors.hpp"
#include "rnforge/jsonl.hpp"
#include "rnforge/parallel.hpp"

namespace rnforge {

void SearchConfig::validate() const {
  if (k < 2) throw DomainError("search: k must be >= 2");
  if (p_range.empty() || p_range.lo < 1) throw DomainError("search: p_range must be a nonempty range of p >= 1");
  if (mode != SearchMode::unit_A && (A_range.empty() || A_range.lo < 1)) {
    throw DomainError("search: A_range must be a nonempty range of |A| >= 1");
  }
  if (mode != SearchMode::general) {
    if (q_range.empty() || q_range.lo < 0) throw DomainError("search: q_range must be a nonempty range of q >= 0");
    if (q_range.lo >= p_range.hi) throw DomainError("search: no (q, p) pair with q < p");
  }
  if (n_max < p_range.hi) throw DomainError("search: n_max must be >= max(p_range)");
  if (min_solutions < 2) throw DomainError("search: min_solutions must be >= 2");
  if (workers < 1) throw DomainError("search: workers must be >= 1");
}

std::vector<Candidate> candidates_seeded(const Int& A, const Int& k, std::int64_t q, std::int64_t p,
                                         const Factorization& K_factorization, BFormula formula) {
  const Int& K = K_factorization.value();
  if (K <= 0) return {};
  const Int root = isqrt(K);
  const Int kq = ipow(k, static_cast<std::uint64_t>(q));
  const Int kp = ipow(k, static_cast<std::uint64_t>(p));
  std::vector<Candidate> out;
  for (const Int& d : divisors(K_factorization)) {
    if (d > root) break;
    Int e = K / d;
    Int diff = e - d;
    if (mpz_odd_p(diff.get_mpz_t())) continue;
    Int lo = diff / 2;
    Int hi = (e + d) / 2;
    Int B;
    if (formula == BFormula::subtract_A_kp) {
      B = lo * lo - A * kp;
    } else if (A > 0) {
      B = lo * lo - A * kq;  // lo at n = q, hi at n = p
    } else {
      B = lo * lo - A * kp;  // lo at n = p, hi at n = q
    }
    if (B == 0) continue;
    out.push_back(Candidate{A, k, q, p, d, std::move(lo), std::move(hi), std::move(B)});
  }
  return out;
}

std::vector<Candidate> candidates_seeded(const Int& A, const Int& k, std::int64_t q, std::int64_t p,
                                         BFormula formula) {
  if (A == 0) throw DomainError("candidates: A must be nonzero");
  if (k < 2) throw DomainError("candidates: k must be >= 2");
  if (q < 0 || p <= q) throw DomainError("candidates: need 0 <= q < p");
  const Int K = abs(A) * (ipow(k, static_cast<std::uint64_t>(p)) - ipow(k, static_cast<std::uint64_t>(q)));
  return candidates_seeded(A, k, q, p, factorize(K), formula);
}

std::vector<Candidate> candidates_for(const Int& A, const Int& k, std::int64_t p, BFormula formula) {
  if (A < 1) throw DomainError("candidates_for: A must be >= 1");
  return candidates_seeded(A, k, 0, p, formula);
}

namespace {

bool source_less(const Candidate& a, const Candidate& b) {
  if (int c = cmp(abs(a.A), abs(b.A)); c != 0) return c < 0;
  if (a.q != b.q) return a.q < b.q;
  if (a.p != b.p) return a.p < b.p;
  return a.d < b.d;
}

using HitMap = std::map<Equation, SearchHit>;

void merge_hit(HitMap& into, SearchHit hit) {
  auto it = into.find(hit.equation);
  if (it == into.end()) {
    Equation key = hit.equation;
    into.emplace(std::move(key), std::move(hit));
  } else if (source_less(hit.source, it->second.source)) {
    it->second = std::move(hit);
  }
}

// Factorizations of k^e - 1 and of k, shared by all stripes.
class FactorCache {
 public:
  FactorCache(const Int& k, std::int64_t max_e) : k_factor_(factorize(k)) {
    for (std::int64_t e = 0; e <= max_e; ++e) {
      Int v = ipow(k, static_cast<std::uint64_t>(e)) - 1;
      km1_.push_back(v == 0 ? Factorization() : factorize(v));
    }
  }

  // |A| * (k^p - k^q) = |A| * k^q * (k^(p-q) - 1)
  Factorization seeded(const Factorization& a, std::int64_t q, std::int64_t p) const {
    Factorization f = a * km1_[static_cast<std::size_t>(p - q)];
    for (std::int64_t i = 0; i < q; ++i) f = f * k_factor_;
    return f;
  }

 private:
  Factorization k_factor_;
  std::vector<Factorization> km1_;
};

struct Stripe {
  std::int64_t key;  // |A|, or q in unit_A mode
};

std::vector<SearchHit> evaluate_stripe(const SearchConfig& cfg, const FactorCache& cache, std::int64_t key) {
  const SquareSieve& sieve = SquareSieve::standard();
  HitMap local;

  auto consider = [&](const Int& eq_A, const Candidate& cand) {
    const Int& B = cand.B;
    if (eq_A < 0 && B < 0) return;
    Int g;
    if (cfg.require_coprime_B_k) {
      mpz_gcd(g.get_mpz_t(), B.get_mpz_t(), cfg.k.get_mpz_t());
      if (g != 1) return;
    }
    if (cfg.mode == SearchMode::unit_A && cfg.exclude_B_divisible_k2 && B % (cfg.k * cfg.k) == 0) return;
    Normalized nz = normalize(Equation(eq_A, cfg.k, B));
    if (cfg.require_sqfree_gcd && nz.scale != 1) return;
    if (count_solutions(nz.equation, cfg.n_max, sieve) < cfg.min_solutions) return;
    SolutionSet set = enumerate_solutions(nz.equation, cfg.n_max, sieve);
    merge_hit(local, SearchHit{nz.equation, std::move(set), cand});
  };

  if (cfg.mode == SearchMode::unit_A) {
    const std::int64_t q = key;
    const Int one = 1;
    for (std::int64_t p = std::max(cfg.p_range.lo, q + 1); p <= cfg.p_range.hi; ++p) {
      for (const Candidate& c : candidates_seeded(one, cfg.k, q, p, cache.seeded(Factorization(), q, p), cfg.b_formula)) {
        consider(one, c);
      }
    }
  } else {
    const Int a_abs = key;
    const Int A = cfg.mode == SearchMode::negative_A ? Int(-a_abs) : a_abs;
    const Factorization a_factor = factorize(a_abs);
    const ExponentRange qs = cfg.mode == SearchMode::general ? ExponentRange{0, 0} : cfg.q_range;
    for (std::int64_t q = qs.lo; q <= qs.hi; ++q) {
      for (std::int64_t p = std::max(cfg.p_range.lo, q + 1); p <= cfg.p_range.hi; ++p) {
        for (const Candidate& c : candidates_seeded(A, cfg.k, q, p, cache.seeded(a_factor, q, p), cfg.b_formula)) {
          consider(A, c);
        }
      }
    }
  }

  std::vector<SearchHit> out;
  out.reserve(local.size());
  for (auto& [eq, hit] : local) out.push_back(std::move(hit));
  return out;
}

struct CheckpointState {
  std::int64_t done_through;  // last committed stripe key, or lo - 1
  std::vector<SearchHit> hits;
  std::vector<std::string> lines;  // valid prefix to keep
};

CheckpointState read_checkpoint(const std::string& path, std::int64_t first_key) {
  CheckpointState st{first_key - 1, {}, {}};
  std::ifstream in(path);
  if (!in) return st;
  std::vector<std::string> pending_lines;
  std::vector<SearchHit> pending_hits;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("A_done=", 0) == 0) {
      const std::int64_t key = parse_int(line.substr(7)).get_si();
      if (key != st.done_through + 1) break;  // non-contiguous; keep the valid prefix
      st.done_through = key;
      st.lines.insert(st.lines.end(), pending_lines.begin(), pending_lines.end());
      st.lines.push_back(line);
      for (auto& h : pending_hits) st.hits.push_back(std::move(h));
      pending_lines.clear();
      pending_hits.clear();
    } else if (line[0] == '{') {
      try {
        pending_hits.push_back(hit_from_json(Json::parse(line)));
        pending_lines.push_back(line);
      } catch (const std::exception&) {
        break;  // torn write
      }
    } else if (line[0] == '#') {
      if (st.lines.empty() && pending_lines.empty()) st.lines.push_back(line);
    } else {
      break;
    }
  }
  return st;
}

std::vector<SearchHit> run_striped(const SearchConfig& cfg, ExponentRange keys, std::int64_t max_exponent) {
  const FactorCache cache(cfg.k, max_exponent);

  std::vector<SearchHit> restored;
  std::int64_t start = keys.lo;
  std::ofstream out;
  if (cfg.checkpoint_path) {
    CheckpointState st = read_checkpoint(*cfg.checkpoint_path, keys.lo);
    restored = std::move(st.hits);
    start = st.done_through + 1;
    out.open(*cfg.checkpoint_path, std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint " + *cfg.checkpoint_path);
    if (st.lines.empty()) out << "# rnforge search checkpoint k=" << to_string(cfg.k) << "\n";
    for (const auto& l : st.lines) out << l << "\n";
    out.flush();
    if (!out) throw IoError("cannot write checkpoint " + *cfg.checkpoint_path);
  }

  const std::size_t count = start > keys.hi ? 0 : static_cast<std::size_t>(keys.hi - start + 1);
  std::vector<std::optional<std::vector<SearchHit>>> results(count);
  std::size_t next_commit = 0;
  std::mutex commit_mutex;

  parallel_for(count, cfg.workers, [&](std::size_t i) {
    auto hits = evaluate_stripe(cfg, cache, start + static_cast<std::int64_t>(i));
    std::lock_guard lock(commit_mutex);
    results[i] = std::move(hits);
    if (!cfg.checkpoint_path) return;
    while (next_commit < count && results[next_commit]) {
      for (const auto& h : *results[next_commit]) out << dump_line(hit_record(h)) << "\n";
      out << "A_done=" << (start + static_cast<std::int64_t>(next_commit)) << "\n";
      out.flush();
      if (!out) throw IoError("checkpoint write failed: " + *cfg.checkpoint_path);
      ++next_commit;
    }
  });

  HitMap merged;
  for (auto& h : restored) merge_hit(merged, std::move(h));
  for (auto& r : results) {
    for (auto& h : *r) merge_hit(merged, std::move(h));
  }
  std::vector<SearchHit> hits;
  hits.reserve(merged.size());
  for (auto& [eq, hit] : merged) hits.push_back(std::move(hit));
  std::sort(hits.begin(), hits.end(), hit_rank_less);
  return hits;
}

}  // namespace

bool hit_rank_less(const SearchHit& a, const SearchHit& b) {
  if (a.solutions.size() != b.solutions.size()) return a.solutions.size() > b.solutions.size();
  if (int c = cmp(a.equation.A(), b.equation.A()); c != 0) return c < 0;
  if (int c = cmp(abs(a.equation.B()), abs(b.equation.B())); c != 0) return c < 0;
  if (int c = cmp(a.equation.B(), b.equation.B()); c != 0) return c < 0;
  return a.equation.k() < b.equation.k();
}

std::vector<SearchHit> run_search(const SearchConfig& cfg) {
  cfg.validate();
  switch (cfg.mode) {
    case SearchMode::unit_A:
      return run_search_unit_A(cfg);
    case SearchMode::negative_A:
      return run_search_negative_A(cfg);
    case SearchMode::general:
      break;
  }
  return run_striped(cfg, cfg.A_range, cfg.p_range.hi);
}

std::vector<SearchHit> run_search_unit_A(const SearchConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SearchMode::unit_A) throw DomainError("run_search_unit_A requires mode unit_A");
  return run_striped(cfg, cfg.q_range, cfg.p_range.hi);
}

std::vector<SearchHit> run_search_negative_A(const SearchConfig& cfg) {
  cfg.validate();
  if (cfg.mode != SearchMode::negative_A) throw DomainError("run_search_negative_A requires mode negative_A");
  return run_striped(cfg, cfg.A_range, cfg.p_range.hi);
}

}  // namespace rnforge
