// Command-line front end. Every subcommand writes JSONL records to stdout
// (or --out). Exit status: 0 success, 1 mathematical failure, 2 usage or
// input error.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "rnforge/app.hpp"
#include "rnforge/certify.hpp"
#include "rnforge/errors.hpp"
#include "rnforge/families.hpp"
#include "rnforge/jsonl.hpp"
#include "rnforge/parallel.hpp"
#include "rnforge/pell.hpp"
#include "rnforge/search.hpp"

using namespace rnforge;

namespace {

struct Output {
  std::ostream* out = &std::cout;
  std::ofstream file;
  std::vector<Json> results;

  void emit(const Json& j) {
    *out << dump_line(j) << '\n';
    results.push_back(j);
  }
};

std::vector<Strategy> parse_strategies(const std::string& list) {
  std::vector<Strategy> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(parse_strategy(item));
  if (out.empty()) throw DomainError("empty strategy list");
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& list) {
  std::vector<std::uint64_t> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(std::stoull(item));
  return out;
}

// Returns 1 when any certificate in the file fails to verify.
int verify_file(const std::string& path, Output& out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  int status = 0;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw FormatError(path + ": " + e.what());
    }
    if (!j.is_object() || j.value("type", "") != "certificate") continue;
    ++count;
    std::string why;
    try {
      why = verify_certificate_detail(certificate_from_json(j));
    } catch (const std::exception& e) {
      why = e.what();
    }
    Json r{{"type", "verification"}, {"equation", j.contains("equation") ? j["equation"] : Json()}, {"valid", why.empty()}};
    if (!why.empty()) {
      r["reason"] = why;
      status = 1;
    }
    out.emit(r);
  }
  if (count == 0) throw FormatError(path + ": no certificate records");
  return status;
}

Json family_json(const FamilyReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.instance.params) params[k] = int_json(v);
  return Json{{"type", "family"},
              {"family", to_string(r.instance.family)},
              {"params", params},
              {"equation", r.instance.equation.to_text()},
              {"promised", solution_list_json(r.instance.promised)},
              {"degenerate", r.instance.degenerate},
              {"n_max", int_json(r.n_max)},
              {"found", solution_list_json(r.found)},
              {"extra", solution_list_json(r.extra)},
              {"missing", solution_list_json(r.missing)}};
}

// Replaces "--config FILE" by one --key=value argument per line of FILE,
// inserted right after the subcommand path so explicit flags still win.
std::vector<std::string> expand_config(int argc, char** argv, const std::set<std::string>& subcommands) {
  std::vector<std::string> args;
  std::vector<std::string> extra;
  std::size_t insert_at = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc) {
      path = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      args.push_back(a);
      if (subcommands.count(a)) insert_at = args.size();
      continue;
    }
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::string line;
    while (std::getline(in, line)) {
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos || line[b] == '#' || line[b] == ';') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw FormatError("config line without '=': " + line);
      auto trim = [](std::string v) {
        const auto x = v.find_first_not_of(" \t\r"), y = v.find_last_not_of(" \t\r");
        return x == std::string::npos ? std::string() : v.substr(x, y - x + 1);
      };
      const std::string key = trim(line.substr(b, eq - b)), value = trim(line.substr(eq + 1));
      if (value == "true") {
        extra.push_back("--" + key);
      } else if (value != "false") {
        extra.push_back("--" + key + "=" + value);
      }
    }
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(insert_at), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tools for x^2 = A*k^n + B"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path, run_log;
  unsigned workers = 1;
  app.add_option("--out", out_path, "write JSONL here instead of stdout");
  app.add_option("--run-log", run_log, "append a run record to this JSONL file");
  app.add_option("--workers", workers, "worker threads (RNFORGE_WORKERS overrides)");

  std::string A_s, k_s = "2", B_s;
  std::int64_t n_max = kDefaultNMax;

  auto* en = app.add_subcommand("enumerate", "all solutions with n <= n-max");
  en->add_option("--A", A_s)->required();
  en->add_option("--k", k_s);
  en->add_option("--B", B_s)->required();
  en->add_option("--n-max", n_max);

  SearchConfig sc;
  std::string mode = "general", k_search = "2";
  auto* se = app.add_subcommand("search", "divisor-method search for equations with many solutions");
  se->add_option("--k", k_search);
  se->add_option("--A-min", sc.A_range.lo);
  se->add_option("--A-max", sc.A_range.hi);
  se->add_option("--p-min", sc.p_range.lo);
  se->add_option("--p-max", sc.p_range.hi);
  se->add_option("--q-min", sc.q_range.lo);
  se->add_option("--q-max", sc.q_range.hi);
  se->add_option("--n-max", sc.n_max);
  se->add_option("--min-solutions", sc.min_solutions);
  se->add_option("--mode", mode)->check(CLI::IsMember({"general", "unit_A", "negative_A"}));
  bool coprime = false, any_gcd = false, allow_k2 = false;
  se->add_flag("--coprime-B-k", coprime, "require gcd(B, k) = 1");
  se->add_flag("--any-gcd", any_gcd, "keep equations whose gcd(A, B) is not square-free");
  se->add_flag("--allow-B-div-k2", allow_k2, "unit_A: keep B divisible by k^2");
  std::string checkpoint;
  se->add_option("--checkpoint", checkpoint);

  std::int64_t n_direct = -1;
  std::string strategy_s, verify_only;
  std::uint64_t modulus_max = 10'000;
  auto* ce = app.add_subcommand("certify", "completeness certificate for one equation");
  ce->add_option("--A", A_s);
  ce->add_option("--k", k_s);
  ce->add_option("--B", B_s);
  ce->add_option("--n-direct", n_direct);
  ce->add_option("--strategy", strategy_s, "comma list of kadic_reduction,modular,factor_even,pell_sieve");
  ce->add_option("--modulus-max", modulus_max);
  ce->add_option("--verify-only", verify_only, "verify the certificates in this file instead");

  std::string cert_file;
  auto* vc = app.add_subcommand("verify-cert", "re-verify certificate records from a file");
  vc->add_option("file", cert_file)->required();

  std::string family_name;
  std::int64_t fm = 1, ft = 1, feps = 1, fp = 1, fq = 2, fr = 3, fm_max = -1, fn_max = -1;
  std::string fk = "2";
  auto* fa = app.add_subcommand("family", "build and check a parametric family instance");
  fa->add_option("name", family_name)->required();
  fa->add_option("--m", fm);
  fa->add_option("--m-max", fm_max, "sweep m from --m to --m-max");
  fa->add_option("--t", ft);
  fa->add_option("--eps", feps);
  fa->add_option("--k", fk);
  fa->add_option("--p", fp);
  fa->add_option("--q", fq);
  fa->add_option("--r", fr);
  fa->add_option("--n-max", fn_max);

  std::string D_s, N_s;
  std::size_t orbit = 0;
  auto* pe = app.add_subcommand("pell", "fundamental unit and classes of x^2 - D y^2 = N");
  pe->add_option("--D", D_s)->required();
  pe->add_option("--N", N_s, "omit for the unit only");
  pe->add_option("--orbit", orbit, "also list this many orbit elements per class");

  auto* co = app.add_subcommand("conjecture", "box scans behind the conjectures");
  co->require_subcommand(1);
  std::string yn_B, yn_cap = "100000000000000";
  std::uint64_t yn_ymax = 5000;
  auto* yn = co->add_subcommand("yn", "x^2 = y^n + B with n >= 3");
  yn->add_option("--B", yn_B)->required();
  yn->add_option("--y-max", yn_ymax);
  yn->add_option("--cap", yn_cap);
  CensusConfig cc;
  std::string census_ks = "2,3,5";
  auto* cs = co->add_subcommand("census", "solution counts over a box of (k, A, B)");
  cs->add_option("--k", census_ks, "comma list");
  cs->add_option("--A-min", cc.A_min);
  cs->add_option("--A-max", cc.A_max);
  cs->add_option("--B-min", cc.B_min);
  cs->add_option("--B-max", cc.B_max);
  cs->add_option("--n-max", cc.n_max);
  cs->add_option("--bound", cc.conjectured_max, "conjectured maximum count");

  std::string target, curves = default_curve_table_path();
  auto* re = app.add_subcommand("reproduce", "re-derive a published table or theorem");
  re->add_option("target", target, "one of the targets, or 'all'")->required();
  re->add_option("--curves", curves);

  std::string config_path;
  app.add_option("--config", config_path, "flat key=value file with option defaults");

  try {
    auto args = expand_config(argc, argv, {"enumerate", "search", "certify", "verify-cert", "family", "pell",
                                           "conjecture", "yn", "census", "reproduce"});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  Output out;
  RunRecord run;
  run.started = utc_timestamp();
  run.code_version = kCodeVersion;
  int status = 0;
  try {
    if (!out_path.empty()) {
      out.file.open(out_path);
      if (!out.file) throw IoError("cannot open " + out_path);
      out.out = &out.file;
    }
    workers = workers_from_env(workers);
    for (auto* sub : app.get_subcommands()) {
      run.command = sub->get_name();
      for (auto* s = sub; s;) {
        for (const auto* opt : s->get_options())
          if (opt->count() > 0 && !opt->get_name().empty() && opt->get_name() != "--help")
            run.config[opt->get_name()] = opt->as<std::string>();
        auto subs = s->get_subcommands();
        s = subs.empty() ? nullptr : subs[0];
        if (s) run.command += " " + s->get_name();
      }
    }
    run.config["workers"] = std::to_string(workers);

    if (*en) {
      const Equation eq(parse_int(A_s), parse_int(k_s), parse_int(B_s));
      const SolutionSet set = enumerate_solutions(eq, n_max);
      for (const auto& s : set.solutions()) out.emit(solution_record(eq, s));
      std::cerr << set.size() << " solutions with x >= 0, n >= 0 (" << set.positive_count()
                << " with x, n > 0)\n";
    } else if (*se) {
      sc.k = parse_int(k_search);
      sc.mode = mode == "unit_A" ? SearchMode::unit_A : mode == "negative_A" ? SearchMode::negative_A : SearchMode::general;
      sc.require_coprime_B_k = coprime;
      sc.require_sqfree_gcd = !any_gcd;
      sc.exclude_B_divisible_k2 = !allow_k2;
      sc.workers = workers;
      if (!checkpoint.empty()) sc.checkpoint_path = checkpoint;
      const auto hits = run_search(sc);
      for (const auto& h : hits) out.emit(hit_record(h));
      std::cerr << hits.size() << " equations with at least " << sc.min_solutions << " solutions\n";
    } else if (*ce) {
      if (!verify_only.empty()) {
        status = verify_file(verify_only, out);
      } else {
        if (A_s.empty() || B_s.empty()) throw CLI::RequiredError("--A and --B");
        const Equation eq(parse_int(A_s), parse_int(k_s), parse_int(B_s));
        CertifyOptions opts;
        opts.modulus_max = modulus_max;
        const auto strategy = strategy_s.empty() ? default_strategy() : parse_strategies(strategy_s);
        const CertifyResult res = certify_equation(eq, n_direct, strategy, opts);
        if (res.certificate) {
          Json j = certificate_record(*res.certificate);
          j["certificate_id"] =
              certificate_id(res.certificate->equation, res.certificate->direct_range, res.certificate->steps);
          out.emit(j);
        } else {
          Json j{{"type", "certify_failure"}, {"equation", eq.to_text()}, {"reason", res.failure},
                 {"partial", solution_set_json(res.partial)}};
          out.emit(j);
          std::cerr << "no certificate: " << res.failure << "\n";
          status = 1;
        }
      }
    } else if (*vc) {
      status = verify_file(cert_file, out);
    } else if (*fa) {
      const FamilyId id = parse_family(family_name);
      const std::int64_t last = fm_max < 0 ? fm : fm_max;
      std::vector<FamilyInstance> grid;
      for (std::int64_t m = fm; m <= last; ++m) {
        const auto um = static_cast<std::uint64_t>(m);
        switch (id) {
          case FamilyId::four:
            grid.push_back(construct_four(parse_int(fk), fp, fq, fr));
            break;
          case FamilyId::k2_five_1: grid.push_back(family_k2_five(1, um)); break;
          case FamilyId::k2_five_2: grid.push_back(family_k2_five(2, um)); break;
          case FamilyId::beukers: grid.push_back(family_beukers(ft, static_cast<int>(feps), um)); break;
          case FamilyId::even_k: grid.push_back(family_even_k(ft, um)); break;
          case FamilyId::neg_poly: grid.push_back(family_neg_poly_at(um, ft)); break;
          case FamilyId::neg_conj_1: grid.push_back(family_neg_conj(1, um)); break;
          case FamilyId::neg_conj_2: grid.push_back(family_neg_conj(2, um)); break;
        }
        if (id == FamilyId::four) break;
      }
      for (const auto& r : verify_family_range(grid, fn_max, workers)) {
        out.emit(family_json(r));
        if (!r.promised_ok || !r.missing.empty()) status = 1;
      }
    } else if (*pe) {
      const Int D = parse_int(D_s);
      const PellUnit unit = pell_fundamental(D);
      Json j{{"type", "pell"}, {"D", int_json(D)}, {"u", int_json(unit.u)}, {"v", int_json(unit.v)}};
      if (!N_s.empty()) {
        const PellProblem pr{D, parse_int(N_s)};
        j["N"] = int_json(pr.N);
        Json classes = Json::array();
        for (const auto& cl : pell_class_reps(pr)) {
          Json c{{"x0", int_json(cl.x0)}, {"y0", int_json(cl.y0)}};
          if (orbit > 0) {
            Json o = Json::array();
            for (const auto& [x, y] : orbit_unfold(cl, orbit)) o.push_back({int_json(x), int_json(y)});
            c["orbit"] = o;
          }
          classes.push_back(c);
        }
        j["classes"] = classes;
      }
      out.emit(j);
    } else if (*yn) {
      const Int B = parse_int(yn_B);
      for (const auto& s : conjecture_yn(B, yn_ymax, parse_int(yn_cap))) out.emit(conjecture_record(B, s));
    } else if (*cs) {
      cc.ks = parse_u64_list(census_ks);
      cc.workers = workers;
      const CensusResult r = census_max_solutions(cc);
      out.emit(census_record(cc, r));
      if (!r.counterexamples.empty()) {
        std::cerr << r.counterexamples.size() << " equations exceed the conjectured bound\n";
        status = 1;
      } else {
        std::cerr << "no counterexample in box; max count " << r.max_count << "\n";
      }
    } else if (*re) {
      const auto targets = target == "all" ? reproduce_targets() : std::vector<std::string>{target};
      for (const auto& t : targets) {
        const ReproduceReport rep = reproduce(t, curves);
        out.emit(report_record(rep));
        std::cerr << t << ": " << (rep.pass ? "pass" : "FAIL") << "\n";
        if (!rep.pass) status = 1;
      }
    }
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  out.out->flush();

  if (!run_log.empty()) {
    run.finished = utc_timestamp();
    run.results = out.results;
    try {
      append_jsonl(run_log, run_record_json(run));
    } catch (const IoError& e) {
      std::cerr << "io error: " << e.what() << "\n";
      return 2;
    }
  }
  return status;
}
