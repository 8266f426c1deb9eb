// Command-line front end: structural verification suites, exact homology
// reports, and dimension/table inspection.  Exit codes: 0 all checks pass,
// 1 mathematical counterexample, 2 usage or bounds error.
#include <CLI11.hpp>
#include <algorithm>
#include <climits>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "enbar/evalhom.hpp"
#include "enbar/verify.hpp"

using namespace enbar;
using evalhom::OperadChoice;
using evalhom::Report;
using evalhom::ReportRow;
using exactlin::Ring;

namespace {

// complexes above this total dimension are refused before the certified
// integral reduction is attempted
constexpr long kDimGuard = 5000;

std::string ts(long v) { return std::to_string(v); }

// number of pure level-n words on r letters: ordered set partitions into
// blocks carrying level-(n-1) words, down to single leaves
long tn_count(int n, int r) {
  static std::map<std::pair<int, int>, long> memo;
  if (n == 0) return r == 1 ? 1 : 0;
  if (r == 0) return 0;
  auto it = memo.find({n, r});
  if (it != memo.end()) return it->second;
  // peel the first factor: choose its k letters, a level-(n-1) word on them,
  // and a level-n word on the rest
  long total = 0;
  for (int k = 1; k <= r; ++k) {
    long choose = 1;
    for (int i = 0; i < k; ++i) choose = choose * (r - i) / (i + 1);
    const long inner = tn_count(n - 1, k);
    if (inner == 0) continue;
    total += choose * inner * (r == k ? 1 : tn_count(n, r - k));
  }
  memo[{n, r}] = total;
  return total;
}

long stirling2(int r, int s) {
  if (s < 0 || s > r) return 0;
  if (r == 0) return s == 0 ? 1 : 0;
  std::vector<std::vector<long>> t(r + 1, std::vector<long>(s + 1, 0));
  t[0][0] = 1;
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= std::min(i, s); ++j)
      t[i][j] = t[i - 1][j - 1] + j * t[i - 1][j];
  return t[r][s];
}

// dimension of the level-n commutative bar module at arity r
long bar_c_dim(int n, int r) {
  long total = 0;
  for (int s = 1; s <= r; ++s) total += tn_count(n, s) * stirling2(r, s);
  return total;
}

long ipow(long b, int e) {
  long out = 1;
  while (e-- > 0) out *= b;
  return out;
}

long factorial(int r) {
  long out = 1;
  for (int i = 2; i <= r; ++i) out *= i;
  return out;
}

void write_out(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ContractError("cannot open output path " + path);
  out << text;
}

std::string render(const Report& rep, const std::string& format) {
  if (format == "json") return evalhom::report_json(rep);
  if (format == "csv") return evalhom::report_csv(rep);
  std::ostringstream out;
  out << "object: " << rep.object << "\n"
      << "ring: " << rep.ring.encode() << "\n"
      << "bounds: " << rep.bounds << "\n";
  for (const ReportRow& row : rep.table) {
    out << "  arity " << row.arity << " weight " << row.weight << " degree "
        << row.degree << ": free rank " << row.free_rank;
    if (!row.torsion.empty()) {
      out << ", torsion";
      for (const auto& t : row.torsion) out << " Z/" << t.get_str();
    }
    out << "\n";
  }
  for (const auto& n : rep.notes) out << "note: " << n << "\n";
  out << (rep.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

void guard_dimension(const std::string& what, long estimate) {
  if (estimate > kDimGuard)
    throw ContractError(what + " has an estimated " + ts(estimate) +
                        " basis elements; the certified integral reduction "
                        "is only attempted up to " +
                        ts(kDimGuard) + " -- tighten the bounds");
}

long en_module_dim(Ring ring, int n, int r) {
  symseq::SigmaModule m = operads::en_suboperad_module(ring, n, r);
  return static_cast<long>(m.at(r).size());
}

// dimension of the level-n bar module over E_n at arity r, computed from
// the per-arity suboperad dimensions without building the lift
long bar_en_dim(Ring ring, int n, int r) {
  namespace ops = operads;
  symseq::SigmaModule m = ops::en_suboperad_module(ring, n, r);
  std::map<int, long> dim_e;
  for (int k = 1; k <= r; ++k) dim_e[k] = static_cast<long>(m.at(k).size());
  const symseq::FiniteSet ground = symseq::canonical_set(r);
  long total = 0;
  for (int s = 1; s <= r; ++s) {
    const long words = tn_count(n, s);
    if (words == 0) continue;
    long arg_sum = 0;
    for (const auto& part : symseq::set_partitions(ground, s)) {
      long prod = 1;
      for (const auto& b : part) prod *= dim_e[static_cast<int>(b.size())];
      arg_sum += prod;
    }
    total += words * arg_sum;
  }
  return total;
}

struct HomologyArgs {
  std::string object;
  std::string ring = "z";
  int n = 2;
  int arity = 3;
  int arity_max = 3;
  std::string operad;  // c, e, en; empty = per-object default
  std::string algebra = "trivial:1";
  int weight_max = 0;  // 0 = derive from degree_max
  int degree_max = -1;
  int window = 2;
  int n_max = 3;
  int threads = 1;
  std::string format = "json";
  std::string output;
};

int cmd_homology(const HomologyArgs& a) {
  const Ring ring = Ring::parse(a.ring);
  if (a.threads < 1 || a.threads > 64)
    throw ContractError("--threads must be between 1 and 64");
  Report rep;
  if (a.object == "en-operad") {
    const long dim = en_module_dim(ring, a.n, a.arity);
    guard_dimension("the E_" + ts(a.n) + "(" + ts(a.arity) + ") chain complex",
                    dim);
    rep = evalhom::en_homology_report(ring, a.n, a.arity);
  } else if (a.object == "bar-module") {
    const std::string op = a.operad.empty() ? "en" : a.operad;
    const OperadChoice choice = evalhom::parse_choice(op);
    if (choice == OperadChoice::c) {
      guard_dimension("the level-" + ts(a.n) + " commutative bar module at arity " +
                          ts(a.arity),
                      bar_c_dim(a.n, a.arity));
    } else if (choice == OperadChoice::en) {
      guard_dimension("the level-" + ts(a.n) + " bar module over E_" + ts(a.n) +
                          " at arity " + ts(a.arity),
                      bar_en_dim(ring, a.n, a.arity));
    } else {
      if (a.degree_max < 0)
        throw ContractError(
            "the bar module over the full Barratt-Eccles operad needs "
            "--degree-max");
      // crude pre-enumeration bound: capped nondegenerate simplex counts
      long est = 0;
      const long f = factorial(a.arity);
      for (int d = 0; d <= a.degree_max; ++d) est += f * ipow(f - 1, d);
      guard_dimension("the degree-capped Barratt-Eccles bar module at arity " +
                          ts(a.arity),
                      est);
    }
    rep = evalhom::bar_module_report(ring, a.n, choice, a.arity, a.degree_max);
  } else if (a.object == "bar-eval") {
    const std::string op = a.operad.empty() ? "c" : a.operad;
    const OperadChoice choice = evalhom::parse_choice(op);
    int wmax = a.weight_max;
    if (wmax == 0) {
      if (a.degree_max < 0)
        throw ContractError("bar-eval needs --weight-max or --degree-max");
      wmax = std::clamp(a.degree_max - a.n + 1, 1, 6);
    }
    // generators of the evaluated algebra, for the size estimate
    long gens = 1;
    const auto colon = a.algebra.find(':');
    if (colon != std::string::npos) {
      try {
        gens = std::stol(a.algebra.substr(colon + 1));
      } catch (...) {
        gens = 1;  // algebra_from_spec reports the malformed spec itself
      }
    } else if (a.algebra == "operad") {
      gens = wmax;
    }
    long est = 0;
    for (int s = 1; s <= wmax; ++s)
      est += tn_count(a.n, s) * stirling2(wmax, s) * ipow(std::max(gens, 1L), s);
    guard_dimension("the weight-" + ts(wmax) + " evaluated bar complex", est);
    rep = evalhom::bar_eval_report(ring, a.n, choice, a.algebra, wmax,
                                   a.degree_max < 0 ? INT_MAX : a.degree_max,
                                   a.threads);
  } else if (a.object == "harrison") {
    rep = evalhom::harrison_acyclicity_check(ring, a.arity_max, a.threads);
  } else if (a.object == "stabilization") {
    long est = 0;
    for (int n = 1; n <= a.n_max; ++n) est += bar_c_dim(n, a.arity);
    guard_dimension("the stabilization scan at arity " + ts(a.arity), est);
    rep = evalhom::stabilization_scan(ring, a.arity, a.window, a.n_max,
                                      a.threads);
  } else {
    throw ContractError("unknown homology object '" + a.object +
                        "'; expected bar-module, en-operad, bar-eval, "
                        "harrison, or stabilization");
  }
  write_out(render(rep, a.format), a.output);
  if (!rep.pass) {
    std::cerr << "FAIL: " << rep.object;
    for (const auto& n : rep.notes) std::cerr << "\n  " << n;
    std::cerr << "\n";
    return 1;
  }
  return 0;
}

struct VerifyArgs {
  std::string ring = "z";
  int n = 2;
  int arity_max = 3;
  int arg_degree_cap = 2;
  bool as_json = false;
  std::string output;
};

int cmd_verify(const VerifyArgs& a) {
  verify::SuiteOptions o;
  o.ring = Ring::parse(a.ring);
  o.level = a.n;
  o.arity_max = a.arity_max;
  o.arg_degree_cap = a.arg_degree_cap;
  const auto results = verify::run_verification(o);
  if (a.as_json) {
    write_out(verify::results_json(o, results), a.output);
  } else {
    std::ostringstream out;
    for (const auto& r : results) {
      out << r.suite << " [" << r.bounds << "]: "
          << (r.pass ? "pass" : "FAIL") << " (" << r.checks << " checks)\n";
      if (!r.pass) out << "  counterexample: " << r.counterexample << "\n";
    }
    out << (verify::all_pass(results) ? "all suites pass\n"
                                      : "verification FAILED\n");
    write_out(out.str(), a.output);
  }
  return verify::all_pass(results) ? 0 : 1;
}

struct InfoArgs {
  std::string object;
  std::string ring = "z";
  int n = 2;
  int arity = 3;
  int arity_max = 3;
  int m = 1;
  std::string output;
};

int cmd_info(const InfoArgs& a) {
  const Ring ring = Ring::parse(a.ring);
  std::ostringstream out;
  if (a.object == "tn") {
    symseq::SigmaModule tn = barcx::build_Tn(ring, a.n, a.arity);
    std::map<int, long> by_degree;
    for (const auto& x : tn.at(a.arity)) ++by_degree[x.degree];
    long total = 0;
    out << "T^" << a.n << "(" << a.arity << ") word dimensions\n";
    for (const auto& [d, k] : by_degree) {
      out << "  degree " << d << ": " << k << "\n";
      total += k;
    }
    out << "total dimension " << total << "\n";
  } else if (a.object == "gn") {
    const auto gens = barcx::generator_words(a.n, a.arity);
    std::map<int, long> by_degree;
    for (const auto& g : gens) ++by_degree[g.degree()];
    out << "G^" << a.n << "(" << a.arity << ") generator words\n";
    for (const auto& [d, k] : by_degree)
      out << "  degree " << d << ": " << k << "\n";
    out << "total " << gens.size() << "\n";
  } else if (a.object == "en") {
    symseq::SigmaModule m = operads::en_suboperad_module(ring, a.n, a.arity);
    std::map<int, long> by_degree;
    for (const auto& x : m.at(a.arity)) ++by_degree[x.degree];
    out << "E_" << a.n << "(" << a.arity << ") per degree\n";
    long total = 0;
    for (const auto& [d, k] : by_degree) {
      out << "  degree " << d << ": " << k << "\n";
      total += k;
    }
    out << "total dimension " << total << "\n";
  } else if (a.object == "cup") {
    if (a.m < 0 || a.m > 6) throw ContractError("--m must be between 0 and 6");
    const auto cup = lifting::cup_product(ring, a.m);
    out << "cup product m=" << a.m << ":";
    int level = 0;
    for (const auto& [e, c] : cup.terms) {
      out << " " << c.encode() << "*" << e.label;
      level = std::max(level,
                       operads::filtration_level(operads::elem_simplex(e)));
    }
    out << "\ndegree " << a.m << ", filtration level " << level << "\n";
  } else if (a.object == "twist") {
    if (a.n > 3 || a.arity_max > 4)
      throw ContractError("twisting tables are printed up to n=3, arity 4");
    lifting::LiftContext ctx = lifting::lift_context(ring, a.n, a.arity_max);
    lifting::LiftedTwist lift = lifting::lift_twisting(ctx);
    out << lifting::twist_json(lift.hom);
  } else {
    throw ContractError("unknown info object '" + a.object +
                        "'; expected tn, gn, en, cup, or twist");
  }
  write_out(out.str(), a.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "exact homology and verification for iterated bar complexes over "
      "E_n suboperads of the Barratt-Eccles operad"};
  app.require_subcommand(1);

  VerifyArgs va;
  CLI::App* v = app.add_subcommand("verify",
                                   "run the structural identity suites");
  v->add_option("--ring", va.ring, "coefficient ring: z, q, fp:<p>")
      ->envname("ENBAR_RING");
  v->add_option("--n", va.n, "bar iteration level")->check(CLI::Range(1, 3));
  v->add_option("--arity-max", va.arity_max, "generator arity bound")
      ->check(CLI::Range(1, 4));
  v->add_option("--arg-degree-cap", va.arg_degree_cap,
                "total simplicial degree allowed in composite arguments")
      ->check(CLI::Range(0, 3));
  v->add_flag("--json", va.as_json, "serialize the results as JSON");
  v->add_option("--output", va.output, "write to a file instead of stdout");

  HomologyArgs ha;
  CLI::App* h = app.add_subcommand("homology", "exact homology reports");
  h->add_option("--object", ha.object,
                "bar-module | en-operad | bar-eval | harrison | stabilization")
      ->required();
  h->add_option("--ring", ha.ring, "coefficient ring: z, q, fp:<p>")
      ->envname("ENBAR_RING");
  h->add_option("--n", ha.n, "bar iteration level")->check(CLI::Range(1, 3));
  h->add_option("--arity", ha.arity, "arity of the reported component")
      ->check(CLI::Range(1, 6));
  h->add_option("--arity-max", ha.arity_max, "arity bound (harrison)")
      ->check(CLI::Range(1, 6));
  h->add_option("--operad", ha.operad,
                "operad the module lives over: c, e, en (default: en for "
                "bar-module, c for bar-eval)");
  h->add_option("--algebra", ha.algebra,
                "algebra datum for bar-eval: trivial:<g>, poly:<w>, operad");
  h->add_option("--weight-max", ha.weight_max, "largest evaluated weight")
      ->check(CLI::Range(1, 6));
  h->add_option("--degree-max", ha.degree_max, "truncate above this degree")
      ->check(CLI::Range(-1, 12));
  h->add_option("--window", ha.window, "degree window (stabilization)")
      ->check(CLI::Range(1, 4));
  h->add_option("--n-max", ha.n_max, "last bar level (stabilization)")
      ->check(CLI::Range(1, 4));
  h->add_option("--threads", ha.threads, "worker count for block jobs")
      ->envname("ENBAR_THREADS");
  h->add_option("--format", ha.format, "json | csv | text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  h->add_option("--output", ha.output, "write to a file instead of stdout");

  InfoArgs ia;
  CLI::App* i = app.add_subcommand("info", "dimension tables and twist data");
  i->add_option("--object", ia.object, "tn | gn | en | cup | twist")
      ->required();
  i->add_option("--ring", ia.ring, "coefficient ring: z, q, fp:<p>")
      ->envname("ENBAR_RING");
  i->add_option("--n", ia.n, "bar iteration level")->check(CLI::Range(1, 4));
  i->add_option("--arity", ia.arity, "arity")->check(CLI::Range(1, 6));
  i->add_option("--arity-max", ia.arity_max, "arity bound (twist)")
      ->check(CLI::Range(1, 4));
  i->add_option("--m", ia.m, "cup product index");
  i->add_option("--output", ia.output, "write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*v) return cmd_verify(va);
    if (*h) return cmd_homology(ha);
    return cmd_info(ia);
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const MathError& e) {
    std::cerr << "counterexample: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
