#include "enbar/evalhom.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace enbar::evalhom {

using barcx::WordSum;
using exactlin::RingKind;
using symseq::Bijection;
using symseq::SignedElement;

namespace {

FiniteSet full_set(int r) {
  FiniteSet e(r);
  std::iota(e.begin(), e.end(), 1);
  return e;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

std::string ts(int v) { return std::to_string(v); }

LinT lin_of(Ring ring, const BasisElement& x) {
  LinT l(ring);
  l.add_int(x, 1);
  return l;
}

void add_to(std::map<std::string, Scalar>& col, const std::string& label,
            const Scalar& c) {
  auto [it, fresh] = col.try_emplace(label, c);
  if (!fresh) it->second = it->second + c;
}

// Fan count independent jobs out to a pool; job(i) must only touch state it
// owns (slot i of a result vector).  Inline when single-threaded so errors
// surface with their original stack.
template <class Fn>
void run_blocks(int threads, int count, Fn job) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int width = std::min(threads, count);
  pool.reserve(width);
  for (int t = 0; t < width; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

long binom(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long out = 1;
  for (long i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

long factorial(int k) {
  long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

// --- labeled chain complexes -------------------------------------------------

int ChainComplex::dim(int degree) const {
  auto it = basis.find(degree);
  return it == basis.end() ? 0 : static_cast<int>(it->second.size());
}

int ChainComplex::min_degree() const {
  return basis.empty() ? 0 : basis.begin()->first;
}

int ChainComplex::max_degree() const {
  return basis.empty() ? 0 : basis.rbegin()->first;
}

SparseMatrix boundary_matrix(const ChainComplex& cc, int degree) {
  static const std::vector<std::string> none;
  auto sit = cc.basis.find(degree);
  auto tit = cc.basis.find(degree - 1);
  const auto& src = sit == cc.basis.end() ? none : sit->second;
  const auto& dst = tit == cc.basis.end() ? none : tit->second;
  SparseMatrix m(cc.ring, static_cast<int>(dst.size()),
                 static_cast<int>(src.size()));
  std::map<std::string, int> row;
  for (int i = 0; i < static_cast<int>(dst.size()); ++i) row.emplace(dst[i], i);
  for (int j = 0; j < static_cast<int>(src.size()); ++j) {
    auto dit = cc.diff.find(src[j]);
    if (dit == cc.diff.end()) continue;
    for (const auto& [target, c] : dit->second) {
      if (c.is_zero()) continue;
      auto rit = row.find(target);
      if (rit == row.end())
        throw MathError("differential of " + src[j] +
                        " leaves the recorded basis at " + target);
      m.add(rit->second, j, c);
    }
  }
  return m;
}

std::map<int, HomologySummary> homology(const ChainComplex& cc) {
  std::map<int, HomologySummary> out;
  if (cc.basis.empty()) return out;
  const int lo = cc.min_degree();
  const int hi = cc.max_degree();
  for (int d = lo; d <= hi; ++d) {
    if (cc.truncated && d == hi) continue;  // incoming boundaries missing
    out.emplace(d, exactlin::chain_homology(boundary_matrix(cc, d + 1),
                                            boundary_matrix(cc, d)));
  }
  return out;
}

std::map<std::pair<int, int>, HomologySummary> homology_by_weight(
    const ChainComplex& cc) {
  std::map<int, ChainComplex> blocks;
  auto weight_of = [&](const std::string& label) {
    auto it = cc.weight.find(label);
    return it == cc.weight.end() ? 0 : it->second;
  };
  for (const auto& [d, labels] : cc.basis)
    for (const auto& label : labels) {
      auto [it, fresh] = blocks.try_emplace(weight_of(label));
      if (fresh) it->second.ring = cc.ring;
      it->second.basis[d].push_back(label);
    }
  for (auto& [w, block] : blocks) {
    block.truncated = cc.truncated && block.max_degree() == cc.max_degree();
    for (const auto& [d, labels] : block.basis)
      for (const auto& label : labels) {
        auto dit = cc.diff.find(label);
        if (dit == cc.diff.end()) continue;
        auto& col = block.diff[label];
        for (const auto& [target, c] : dit->second) {
          if (c.is_zero()) continue;
          if (weight_of(target) != w)
            throw MathError("differential does not preserve weight: " + label +
                            " -> " + target);
          col.emplace(target, c);
        }
      }
  }
  std::map<std::pair<int, int>, HomologySummary> out;
  for (auto& [w, block] : blocks)
    for (auto& [d, h] : homology(block)) out.emplace(std::make_pair(w, d), h);
  return out;
}

// --- bar modules as complexes ------------------------------------------------

std::string choice_name(OperadChoice c) {
  switch (c) {
    case OperadChoice::c: return "c";
    case OperadChoice::e: return "e";
    case OperadChoice::en: return "en";
  }
  throw ContractError("unknown operad choice");
}

OperadChoice parse_choice(const std::string& s) {
  if (s == "c") return OperadChoice::c;
  if (s == "e") return OperadChoice::e;
  if (s == "en") return OperadChoice::en;
  throw ContractError("unknown operad choice '" + s + "' (expected c, e, en)");
}

const CompositionModule& BarModule::mod() const {
  switch (choice) {
    case OperadChoice::c: return ctx.mod_c;
    case OperadChoice::e: return ctx.mod_e;
    case OperadChoice::en: return ctx.mod_en;
  }
  throw ContractError("unknown operad choice");
}

const SigmaModule& BarModule::operad_module() const {
  switch (choice) {
    case OperadChoice::c: return ctx.comm.module;
    case OperadChoice::e: return ctx.be.module;
    case OperadChoice::en: return ctx.en.module;
  }
  throw ContractError("unknown operad choice");
}

BasisElement BarModule::operad_unit() const {
  switch (choice) {
    case OperadChoice::c: return ctx.comm.unit;
    case OperadChoice::e: return ctx.be.unit;
    case OperadChoice::en: return ctx.en.unit;
  }
  throw ContractError("unknown operad choice");
}

BarModule bar_module(Ring ring, int level, OperadChoice choice,
                     int arity_max) {
  BarModule bm;
  bm.choice = choice;
  bm.ctx = lifting::lift_context(ring, level, arity_max);
  switch (choice) {
    case OperadChoice::c:
      bm.hom = bm.ctx.gamma;
      break;
    case OperadChoice::e:
      bm.hom = lifting::lift_twisting(bm.ctx).hom;
      break;
    case OperadChoice::en:
      bm.hom = lifting::restrict_to_en(bm.ctx, lifting::lift_twisting(bm.ctx).hom);
      break;
  }
  return bm;
}

ChainComplex bar_module_complex(const BarModule& bm, int r, int degree_max) {
  if (r < 1 || r > bm.ctx.arity_max)
    throw ContractError("arity " + ts(r) + " outside the module bound " +
                        ts(bm.ctx.arity_max));
  ChainComplex cc;
  cc.ring = bm.ring();
  std::vector<BasisElement> elems;
  if (bm.choice == OperadChoice::e) {
    if (degree_max < 0)
      throw ContractError(
          "the bar module over the full Barratt-Eccles operad is unbounded "
          "in every degree; pass a degree bound");
    cc.truncated = true;
    operads::Operad capped = operads::barratt_eccles(bm.ring(), r, degree_max);
    const FiniteSet e = full_set(r);
    for (int s = 1; s <= r; ++s)
      for (const BasisElement& wx : bm.ctx.tn.at(s)) {
        if (wx.degree > degree_max) continue;
        for (const auto& part : symseq::set_partitions(e, s)) {
          std::vector<std::vector<BasisElement>> opts(s);
          bool dead = false;
          for (int i = 0; i < s && !dead; ++i) {
            const FiniteSet& b = part[i];
            Bijection up{full_set(static_cast<int>(b.size())),
                         std::vector<int>(b.begin(), b.end())};
            for (const BasisElement& y :
                 capped.module.at(static_cast<int>(b.size()))) {
              if (wx.degree + y.degree > degree_max) continue;
              SignedElement sy = capped.module.relabel_one(up, y);
              if (sy.sign != 1)
                throw MathError("unexpected relabel sign on " + y.label);
              opts[i].push_back(sy.elem);
            }
            if (opts[i].empty()) dead = true;
          }
          if (dead) continue;
          std::vector<std::size_t> idx(s, 0);
          for (;;) {
            int total = wx.degree;
            for (int i = 0; i < s; ++i)
              total += opts[i][idx[i]].degree;
            if (total <= degree_max) {
              std::vector<BasisElement> args;
              args.reserve(s);
              for (int i = 0; i < s; ++i) args.push_back(opts[i][idx[i]]);
              SignedElement se = bm.ctx.mod_e.make(wx, args);
              if (se.sign != 1)
                throw MathError("unexpected assembly sign under " + wx.label);
              elems.push_back(se.elem);
            }
            int k = s - 1;
            while (k >= 0 && ++idx[k] == opts[k].size()) idx[k--] = 0;
            if (k < 0) break;
          }
        }
      }
  } else {
    for (const BasisElement& x : bm.mod().module.at(r)) {
      if (degree_max >= 0 && x.degree > degree_max) {
        cc.truncated = true;
        continue;
      }
      elems.push_back(x);
    }
  }
  for (const BasisElement& x : elems) {
    cc.basis[x.degree].push_back(x.label);
    cc.weight[x.label] = r;
  }
  for (auto& [d, labels] : cc.basis) std::sort(labels.begin(), labels.end());
  for (const BasisElement& x : elems) {
    LinT dx = barcx::twisted_diff(bm.hom, lin_of(cc.ring, x));
    auto& col = cc.diff[x.label];
    for (const auto& [target, c] : dx.terms) col.emplace(target.label, c);
  }
  return cc;
}

ChainComplex en_complex(Ring ring, int n, int r) {
  if (n < 1 || r < 1) throw ContractError("en_complex needs n, r >= 1");
  SigmaModule m = operads::en_suboperad_module(ring, n, r);
  ChainComplex cc;
  cc.ring = ring;
  for (const BasisElement& x : m.at(r)) cc.basis[x.degree].push_back(x.label);
  for (auto& [d, labels] : cc.basis) std::sort(labels.begin(), labels.end());
  for (const BasisElement& x : m.at(r)) {
    LinT dx = m.diff(lin_of(ring, x));
    auto& col = cc.diff[x.label];
    for (const auto& [target, c] : dx.terms) col.emplace(target.label, c);
  }
  return cc;
}

std::map<int, HomologySummary> en_homology(Ring ring, int n, int r) {
  return homology(en_complex(ring, n, r));
}

std::vector<long> gerstenhaber_dims(int n, int r) {
  if (n < 1 || r < 1) throw ContractError("gerstenhaber_dims needs n, r >= 1");
  if (n == 1) return {factorial(r)};
  std::vector<long> dims(static_cast<std::size_t>((n - 1) * (r - 1)) + 1, 0);
  const FiniteSet e = full_set(r);
  for (int s = 1; s <= r; ++s)
    for (const auto& part : symseq::set_partitions(e, s)) {
      int degree = 0;
      long dim = 1;
      for (const auto& b : part) {
        degree += (n - 1) * (static_cast<int>(b.size()) - 1);
        dim *= factorial(static_cast<int>(b.size()) - 1);
      }
      dims[degree] += dim;
    }
  return dims;
}

Scalar augmentation_to_unit(const BarModule& bm, const BasisElement& x) {
  const Ring ring = bm.ring();
  if (x.inputs.size() != 1) return Scalar::zero(ring);
  auto [m, args] = bm.mod().split(x);
  if (args.size() != 1 || args[0].degree != 0) return Scalar::zero(ring);
  Bijection slot{full_set(1), {x.inputs[0]}};
  SignedElement unit = bm.operad_module().relabel_one(slot, bm.operad_unit());
  if (unit.sign != 1 || !(args[0] == unit.elem)) return Scalar::zero(ring);
  // the only arity-one word of T^n is the full nesting, in degree n
  if (barcx::elem_word(m).degree() != bm.level()) return Scalar::zero(ring);
  return Scalar::one(ring);
}

// --- algebras ------------------------------------------------------------------

const AlgebraElement& AlgebraDatum::at(const std::string& label) const {
  for (const auto& a : basis)
    if (a.label == label) return a;
  throw ContractError("unknown algebra element " + label);
}

namespace {

// operad elements (at canonical arity) reachable by evaluation: the unit plus
// every argument of every twisting-table value.  Keyed by (label, arity)
// because the commutative operad reuses one label across arities.
std::map<std::pair<std::string, int>, BasisElement> action_elements(
    const BarModule& bm) {
  std::map<std::pair<std::string, int>, BasisElement> out;
  const SigmaModule& om = bm.operad_module();
  out.emplace(std::make_pair(bm.operad_unit().label, 1), bm.operad_unit());
  for (const auto& [gen, value] : bm.hom.table)
    for (const auto& [comp, c] : value.terms) {
      auto [m, args] = bm.hom.mod.split(comp);
      for (const BasisElement& y : args) {
        const int k = static_cast<int>(y.inputs.size());
        Bijection down{y.inputs, full_set(k)};
        SignedElement sy = om.relabel_one(down, y);
        if (sy.sign != 1)
          throw MathError("unexpected relabel sign on " + y.label);
        out.emplace(std::make_pair(sy.elem.label, k), sy.elem);
      }
    }
  return out;
}

// every ordered tuple of basis labels of the given length
template <class Fn>
void for_tuples(const std::vector<AlgebraElement>& basis, int len, Fn fn) {
  std::vector<std::size_t> idx(len, 0);
  for (;;) {
    std::vector<std::string> t;
    t.reserve(len);
    for (int i = 0; i < len; ++i) t.push_back(basis[idx[i]].label);
    fn(t);
    int k = len - 1;
    while (k >= 0 && ++idx[k] == basis.size()) idx[k--] = 0;
    if (k < 0) break;
  }
}

}  // namespace

AlgebraDatum trivial_algebra(const BarModule& bm, int generators) {
  if (generators < 1)
    throw ContractError("trivial algebra needs at least one generator");
  AlgebraDatum a;
  a.ring = bm.ring();
  a.kind = AlgebraKind::trivial;
  a.name = "trivial:" + ts(generators);
  for (int i = 1; i <= generators; ++i) a.basis.push_back({"a" + ts(i), 0, 1});
  const std::string unit = bm.operad_unit().label;
  for (const auto& [key, y] : action_elements(bm)) {
    const int k = static_cast<int>(y.inputs.size());
    for_tuples(a.basis, k, [&](const std::vector<std::string>& t) {
      std::map<std::string, Scalar> value;
      if (k == 1 && key.first == unit && y.degree == 0)
        value.emplace(t[0], Scalar::one(a.ring));
      a.action.emplace(std::make_pair(key.first, join(t)), std::move(value));
    });
  }
  return a;
}

AlgebraDatum truncated_polynomial_algebra(const BarModule& bm,
                                          int weight_max) {
  if (weight_max < 1)
    throw ContractError("truncated polynomial algebra needs weight_max >= 1");
  AlgebraDatum a;
  a.ring = bm.ring();
  a.kind = AlgebraKind::commutative;
  a.name = "poly:" + ts(weight_max);
  for (int i = 1; i <= weight_max; ++i) a.basis.push_back({"a" + ts(i), 0, i});
  for (const auto& [key, y] : action_elements(bm)) {
    const int k = static_cast<int>(y.inputs.size());
    for_tuples(a.basis, k, [&](const std::vector<std::string>& t) {
      std::map<std::string, Scalar> value;
      if (y.degree == 0) {  // positive-degree simplices act through eps as 0
        int total = 0;
        for (const auto& l : t) total += a.at(l).weight;
        if (total <= weight_max)
          value.emplace("a" + ts(total), Scalar::one(a.ring));
      }
      a.action.emplace(std::make_pair(key.first, join(t)), std::move(value));
    });
  }
  return a;
}

AlgebraDatum operad_as_algebra(const BarModule& bm) {
  if (bm.choice != OperadChoice::c)
    throw ContractError(
        "operad-as-algebra evaluation is defined over the commutative "
        "operad (choice c)");
  AlgebraDatum a;
  a.ring = bm.ring();
  a.kind = AlgebraKind::operad_as_algebra;
  a.name = "operad";
  const int rmax = bm.ctx.arity_max;
  for (int i = 1; i <= rmax; ++i) a.basis.push_back({"c" + ts(i), 0, i});
  for (const auto& [key, y] : action_elements(bm)) {
    const int k = static_cast<int>(y.inputs.size());
    for_tuples(a.basis, k, [&](const std::vector<std::string>& t) {
      std::map<std::string, Scalar> value;
      int total = 0;
      for (const auto& l : t) total += a.at(l).weight;
      if (total <= rmax) value.emplace("c" + ts(total), Scalar::one(a.ring));
      a.action.emplace(std::make_pair(key.first, join(t)), std::move(value));
    });
  }
  return a;
}

AlgebraDatum algebra_from_spec(const BarModule& bm, const std::string& spec) {
  if (spec == "operad") return operad_as_algebra(bm);
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  int arg = 0;
  bool have_arg = false;
  if (colon != std::string::npos) {
    const std::string rest = spec.substr(colon + 1);
    try {
      std::size_t pos = 0;
      arg = std::stoi(rest, &pos);
      have_arg = pos == rest.size();
    } catch (const std::exception&) {
      have_arg = false;
    }
  }
  if (head == "trivial" && have_arg) return trivial_algebra(bm, arg);
  if (head == "poly" && have_arg)
    return truncated_polynomial_algebra(bm, arg);
  throw ContractError("unknown algebra spec '" + spec +
                      "' (expected trivial:<g>, poly:<w>, operad)");
}

// --- evaluation ------------------------------------------------------------------

namespace {

// canonical representative of the relabeling orbit of (word, slot entries):
// the minimal "encode|entries" over simultaneous renamings of the leaves.
// Leaves of pure words are distinct singletons, so orbits are free, and with
// even-degree entries no Koszul sign appears.
std::string orbit_key(const LevelWord& w, const std::vector<std::string>& t) {
  const int s = static_cast<int>(t.size());
  if (s == 1) return w.encode() + "|" + t[0];
  std::vector<int> values(s);
  std::iota(values.begin(), values.end(), 1);
  std::string best;
  do {
    Bijection u = Bijection::from_values(values);
    LevelWord rw = barcx::relabel_word(u, w);
    std::vector<std::string> nt(s);
    for (int j = 1; j <= s; ++j) nt[values[j - 1] - 1] = t[j - 1];
    std::string key = rw.encode() + "|" + join(nt);
    if (best.empty() || key < best) best = std::move(key);
  } while (std::next_permutation(values.begin(), values.end()));
  return best;
}

std::string pair_label(const std::string& key) { return "w[" + key + "]"; }

void check_datum(const BarModule& bm, const AlgebraDatum& a,
                 const EvalBounds& b) {
  if (!(a.ring == bm.ring()))
    throw ContractError("algebra ring " + a.ring.encode() +
                        " does not match the module ring " +
                        bm.ring().encode());
  if (b.weight_min < 1 || b.weight_max < b.weight_min)
    throw ContractError("evaluation needs 1 <= weight_min <= weight_max");
  if (b.weight_max > bm.ctx.arity_max)
    throw ContractError("evaluation weight bound " + ts(b.weight_max) +
                        " exceeds the module arity bound " +
                        ts(bm.ctx.arity_max));
  if (a.basis.empty()) throw ContractError("algebra datum has no basis");
  for (const auto& e : a.basis) {
    if (e.degree < 0 || e.degree % 2 != 0)
      throw ContractError("algebra element " + e.label +
                          " has odd degree; evaluation orbits need even "
                          "degrees to stay sign-free");
    if (e.weight < 1)
      throw ContractError("algebra element " + e.label + " has weight < 1");
  }
  for (const auto& [label, row] : a.differential) {
    const AlgebraElement& src = a.at(label);
    for (const auto& [target, c] : row)
      if (a.at(target).degree != src.degree - 1)
        throw ContractError("algebra differential entry " + label + " -> " +
                            target + " is not of degree -1");
  }
}

ChainComplex evaluate_plain(const BarModule& bm, const AlgebraDatum& a,
                            const EvalBounds& b) {
  const Ring ring = bm.ring();
  ChainComplex cc;
  cc.ring = ring;
  struct Rep {
    BasisElement wx;
    LevelWord word;
    std::vector<std::string> entries;
    int wsum = 0;
    int degree = 0;
    std::string label;
  };
  std::vector<Rep> reps;
  for (int s = 1; s <= b.weight_max; ++s)
    for (const BasisElement& wx : bm.ctx.tn.at(s)) {
      const LevelWord w = barcx::elem_word(wx);
      for_tuples(a.basis, s, [&](const std::vector<std::string>& t) {
        int wsum = 0;
        int degree = wx.degree;
        for (const auto& l : t) {
          const AlgebraElement& e = a.at(l);
          wsum += e.weight;
          degree += e.degree;
        }
        if (wsum < b.weight_min || wsum > b.weight_max) return;
        if (degree > b.degree_max) {
          cc.truncated = true;
          return;
        }
        const std::string own = w.encode() + "|" + join(t);
        if (own != orbit_key(w, t)) return;
        reps.push_back({wx, w, t, wsum, degree, pair_label(own)});
      });
    }
  std::set<std::string> kept;
  for (const Rep& rep : reps) {
    cc.basis[rep.degree].push_back(rep.label);
    cc.weight[rep.label] = rep.wsum;
    kept.insert(rep.label);
  }
  for (auto& [d, labels] : cc.basis) std::sort(labels.begin(), labels.end());

  const BasisElement unit = bm.operad_unit();
  const SigmaModule& om = bm.operad_module();
  for (const Rep& rep : reps) {
    const int s = static_cast<int>(rep.entries.size());
    std::vector<BasisElement> units;
    units.reserve(s);
    for (int j = 1; j <= s; ++j) {
      Bijection slot{full_set(1), {j}};
      SignedElement su = om.relabel_one(slot, unit);
      units.push_back(su.elem);
    }
    SignedElement base = bm.mod().make(rep.wx, units);
    if (base.sign != 1)
      throw MathError("unexpected assembly sign under " + rep.wx.label);
    LinT du = barcx::twisted_diff(bm.hom, lin_of(ring, base.elem));

    std::map<std::string, Scalar> col;
    for (const auto& [comp, coeff] : du.terms) {
      auto [m2, args2] = bm.mod().split(comp);
      const LevelWord w2 = barcx::elem_word(m2);
      const int s2 = static_cast<int>(args2.size());
      std::vector<std::vector<std::pair<std::string, Scalar>>> slots(s2);
      Scalar pre = coeff;
      bool zero = false;
      for (int j = 0; j < s2 && !zero; ++j) {
        const BasisElement& y = args2[j];
        const int k = static_cast<int>(y.inputs.size());
        Bijection down{y.inputs, full_set(k)};
        SignedElement sy = om.relabel_one(down, y);
        if (sy.sign != 1)
          throw MathError("unexpected relabel sign on " + y.label);
        std::vector<std::string> tup;
        tup.reserve(k);
        for (int i : y.inputs) tup.push_back(rep.entries[i - 1]);
        auto ait = a.action.find({sy.elem.label, join(tup)});
        if (ait == a.action.end())
          throw ContractError("action-incomplete: algebra '" + a.name +
                              "' has no entry for " + sy.elem.label +
                              " on (" + join(tup) + ")");
        if (ait->second.empty()) {
          zero = true;
          break;
        }
        slots[j].assign(ait->second.begin(), ait->second.end());
      }
      if (zero) continue;
      std::vector<std::size_t> idx(s2, 0);
      for (;;) {
        std::vector<std::string> nt(s2);
        Scalar c2 = pre;
        for (int j = 0; j < s2; ++j) {
          nt[j] = slots[j][idx[j]].first;
          c2 = c2 * slots[j][idx[j]].second;
        }
        if (!c2.is_zero())
          add_to(col, pair_label(orbit_key(w2, nt)), c2);
        int k = s2 - 1;
        while (k >= 0 && ++idx[k] == slots[k].size()) idx[k--] = 0;
        if (k < 0) break;
      }
    }
    // internal differential of the algebra entries, past the word part
    const Scalar word_sign(ring, rep.wx.degree % 2 == 0 ? 1 : -1);
    for (int i = 0; i < s; ++i) {
      auto dit = a.differential.find(rep.entries[i]);
      if (dit == a.differential.end()) continue;
      for (const auto& [target, c] : dit->second) {
        std::vector<std::string> nt = rep.entries;
        nt[i] = target;
        add_to(col, pair_label(orbit_key(rep.word, nt)), c * word_sign);
      }
    }
    for (auto it = col.begin(); it != col.end();) {
      if (it->second.is_zero()) {
        it = col.erase(it);
        continue;
      }
      if (!kept.count(it->first))
        throw MathError("evaluated differential leaves the basis: " +
                        rep.label + " -> " + it->first);
      ++it;
    }
    cc.diff.emplace(rep.label, std::move(col));
  }
  return cc;
}

// Over the commutative operad acting on itself the slots carry input sets,
// not just weights: the differential recombines a composite's argument sets
// along the blocks of each twisted term.  The result is the bar module
// itself, basis by basis -- asserted against bar_module_complex in the tests.
ChainComplex evaluate_on_operad(const BarModule& bm, const EvalBounds& b) {
  const Ring ring = bm.ring();
  ChainComplex cc;
  cc.ring = ring;
  std::set<std::string> kept;
  std::vector<BasisElement> elems;
  for (int r = b.weight_min; r <= b.weight_max; ++r)
    for (const BasisElement& x : bm.ctx.mod_c.module.at(r)) {
      if (x.degree > b.degree_max) {
        cc.truncated = true;
        continue;
      }
      elems.push_back(x);
      cc.basis[x.degree].push_back(x.label);
      cc.weight[x.label] = r;
      kept.insert(x.label);
    }
  for (auto& [d, labels] : cc.basis) std::sort(labels.begin(), labels.end());

  for (const BasisElement& x : elems) {
    auto [m, args] = bm.ctx.mod_c.split(x);
    const int s = static_cast<int>(args.size());
    std::vector<BasisElement> units;
    units.reserve(s);
    for (int j = 1; j <= s; ++j) units.push_back(operads::comm_elem({j}));
    SignedElement base = bm.ctx.mod_c.make(m, units);
    if (base.sign != 1)
      throw MathError("unexpected assembly sign under " + m.label);
    LinT du = barcx::twisted_diff(bm.hom, lin_of(ring, base.elem));

    std::map<std::string, Scalar> col;
    for (const auto& [comp, coeff] : du.terms) {
      auto [m2, args2] = bm.ctx.mod_c.split(comp);
      std::vector<BasisElement> nargs;
      nargs.reserve(args2.size());
      for (const BasisElement& y : args2) {
        FiniteSet merged;
        for (int i : y.inputs)
          merged.insert(merged.end(), args[i - 1].inputs.begin(),
                        args[i - 1].inputs.end());
        std::sort(merged.begin(), merged.end());
        nargs.push_back(operads::comm_elem(merged));
      }
      SignedElement se = bm.ctx.mod_c.make(m2, nargs);
      if (se.sign == 0) continue;
      add_to(col, se.elem.label,
             se.sign == 1 ? coeff : coeff * Scalar(ring, -1));
    }
    for (auto it = col.begin(); it != col.end();) {
      if (it->second.is_zero()) {
        it = col.erase(it);
        continue;
      }
      if (!kept.count(it->first))
        throw MathError("evaluated differential leaves the basis: " + x.label +
                        " -> " + it->first);
      ++it;
    }
    cc.diff.emplace(x.label, std::move(col));
  }
  return cc;
}

}  // namespace

ChainComplex evaluate_module(const BarModule& bm, const AlgebraDatum& a,
                             const EvalBounds& b) {
  check_datum(bm, a, b);
  if (a.kind == AlgebraKind::operad_as_algebra) {
    if (bm.choice != OperadChoice::c)
      throw ContractError(
          "operad-as-algebra evaluation is defined over the commutative "
          "operad (choice c)");
    return evaluate_on_operad(bm, b);
  }
  return evaluate_plain(bm, a, b);
}

// --- counting oracles -------------------------------------------------------------

std::map<std::pair<int, int>, long> free_lie_dims(int gen_degree,
                                                  int weight_max,
                                                  int degree_max) {
  if (gen_degree < 1)
    throw ContractError("free_lie_dims needs a positive generator degree");
  if (weight_max < 0 || degree_max < 0) return {};
  const int W = weight_max;
  const int D = degree_max;
  auto zeros = [&] {
    return std::vector<std::vector<long>>(W + 1,
                                          std::vector<long>(D + 1, 0));
  };
  // tensor-algebra series 1/(1 - u t^g), the target of the product expansion
  auto target = zeros();
  for (int k = 0; k <= W; ++k) {
    const long d = static_cast<long>(k) * gen_degree;
    if (d <= D) target[k][d] = 1;
  }
  auto product = zeros();
  product[0][0] = 1;
  std::map<std::pair<int, int>, long> out;
  for (int w = 1; w <= W; ++w)
    for (int d = 0; d <= D; ++d) {
      const long l = target[w][d] - product[w][d];
      if (l == 0) continue;
      if (l < 0 || d == 0)
        throw MathError("tensor series does not split at weight " + ts(w) +
                        ", degree " + ts(d));
      out.emplace(std::make_pair(w, d), l);
      // multiply the running product by the cell factor at (w, d)
      auto next = zeros();
      for (int a = 0; a <= W; ++a)
        for (int bdeg = 0; bdeg <= D; ++bdeg) {
          const long base = product[a][bdeg];
          if (base == 0) continue;
          for (int j = 0; a + j * w <= W && bdeg + j * d <= D; ++j) {
            const long coef =
                d % 2 == 0 ? binom(l + j - 1, j) : binom(l, j);
            if (coef == 0) break;
            next[a + j * w][bdeg + j * d] += base * coef;
          }
        }
      product = std::move(next);
    }
  return out;
}

std::map<std::pair<int, int>, long> trivial_algebra_oracle(int n,
                                                           int weight_max,
                                                           int degree_max) {
  if (n < 1) throw ContractError("trivial_algebra_oracle needs n >= 1");
  const int shift = n - 1;
  const int W = weight_max;
  const int D = degree_max;
  if (W < 1 || D < 0) return {};
  auto lie = free_lie_dims(1, W, std::max(0, D - shift));
  std::vector<std::vector<long>> sym(W + 1, std::vector<long>(D + 1, 0));
  sym[0][0] = 1;
  for (const auto& [cell, l] : lie) {
    const int w = cell.first;
    const int d = cell.second + shift;  // suspended n-1 times
    if (w > W || d > D) continue;
    auto next = std::vector<std::vector<long>>(W + 1,
                                               std::vector<long>(D + 1, 0));
    for (int a = 0; a <= W; ++a)
      for (int b = 0; b <= D; ++b) {
        const long base = sym[a][b];
        if (base == 0) continue;
        for (int j = 0; a + j * w <= W && b + j * d <= D; ++j) {
          const long coef = d % 2 == 0 ? binom(l + j - 1, j) : binom(l, j);
          if (coef == 0) break;
          next[a + j * w][b + j * d] += base * coef;
        }
      }
    sym = std::move(next);
  }
  std::map<std::pair<int, int>, long> out;
  for (int w = 1; w <= W; ++w)
    for (int d = 0; d <= D; ++d)
      if (sym[w][d] != 0) out.emplace(std::make_pair(w, d), sym[w][d]);
  return out;
}

// --- reports --------------------------------------------------------------------

namespace {

ReportRow row_from(int arity, int weight, int degree,
                   const HomologySummary& h) {
  return {arity, weight, degree, h.free_rank, h.torsion};
}

void sort_rows(Report& r) {
  std::sort(r.table.begin(), r.table.end(),
            [](const ReportRow& a, const ReportRow& b) {
              return std::tie(a.arity, a.weight, a.degree) <
                     std::tie(b.arity, b.weight, b.degree);
            });
}

std::string torsion_text(const std::vector<mpz_class>& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ';';
    out += t[i].get_str();
  }
  return out;
}

std::string degree_bound_text(int degree_max) {
  return degree_max == INT_MAX ? "none" : ts(degree_max);
}

}  // namespace

std::string report_json(const Report& r) {
  nlohmann::ordered_json j;
  j["object"] = r.object;
  j["ring"] = r.ring.encode();
  j["bounds"] = r.bounds;
  j["table"] = nlohmann::ordered_json::array();
  for (const ReportRow& row : r.table) {
    nlohmann::ordered_json e;
    e["arity"] = row.arity;
    e["weight"] = row.weight;
    e["degree"] = row.degree;
    e["free_rank"] = row.free_rank;
    auto t = nlohmann::ordered_json::array();
    for (const auto& f : row.torsion) t.push_back(f.get_str());
    e["torsion"] = std::move(t);
    j["table"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string report_csv(const Report& r) {
  std::ostringstream os;
  os << "arity,weight,degree,free_rank,torsion\n";
  for (const ReportRow& row : r.table)
    os << row.arity << ',' << row.weight << ',' << row.degree << ','
       << row.free_rank << ',' << torsion_text(row.torsion) << '\n';
  return os.str();
}

bool reports_uct_consistent(const Report& over_z, const Report& over_field,
                            std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (over_z.ring.kind != RingKind::Z)
    return fail("first report is over " + over_z.ring.encode() + ", not z");
  if (!over_field.ring.is_field())
    return fail("second report is over " + over_field.ring.encode() +
                ", not a field");
  using Key = std::tuple<int, int, int>;
  std::map<Key, HomologySummary> zt;
  std::map<Key, long> ft;
  std::set<Key> keys;
  for (const ReportRow& row : over_z.table) {
    Key k{row.arity, row.weight, row.degree};
    zt[k] = {row.free_rank, row.torsion};
    keys.insert(k);
    if (!row.torsion.empty())
      keys.insert({row.arity, row.weight, row.degree + 1});
  }
  for (const ReportRow& row : over_field.table) {
    Key k{row.arity, row.weight, row.degree};
    ft[k] = row.free_rank;
    keys.insert(k);
  }
  for (const Key& k : keys) {
    auto [a, w, d] = k;
    const HomologySummary at = zt.count(k) ? zt.at(k) : HomologySummary{};
    const Key below{a, w, d - 1};
    const HomologySummary under =
        zt.count(below) ? zt.at(below) : HomologySummary{};
    const long expect = over_field.ring.kind == RingKind::Q
                            ? at.free_rank
                            : exactlin::uct_expected_fp_rank(
                                  at, under, over_field.ring.p);
    const long got = ft.count(k) ? ft.at(k) : 0;
    if (expect != got)
      return fail("rank over " + over_field.ring.encode() + " at arity=" +
                  ts(a) + ", weight=" + ts(w) + ", degree=" + ts(d) + " is " +
                  std::to_string(got) + ", universal coefficients expect " +
                  std::to_string(expect));
  }
  return true;
}

Report en_homology_report(Ring ring, int n, int r) {
  Report rep;
  rep.object = "en-operad";
  rep.ring = ring;
  rep.bounds = "n=" + ts(n) + ",arity=" + ts(r);
  const auto found = en_homology(ring, n, r);
  const auto dims = gerstenhaber_dims(n, r);
  int top = static_cast<int>(dims.size()) - 1;
  if (!found.empty()) top = std::max(top, found.rbegin()->first);
  for (int d = 0; d <= top; ++d) {
    const HomologySummary h =
        found.count(d) ? found.at(d) : HomologySummary{};
    rep.table.push_back(row_from(r, 0, d, h));
    const long want = d < static_cast<int>(dims.size()) ? dims[d] : 0;
    if (h.free_rank != want || !h.torsion.empty()) {
      rep.pass = false;
      rep.notes.push_back("degree " + ts(d) + ": found " + h.encode() +
                          ", expected free rank " + std::to_string(want));
    }
  }
  if (rep.pass)
    rep.notes.push_back(
        "homology matches the block-partition count, one factor (s-1)! in "
        "degree (n-1)(s-1) per block");
  sort_rows(rep);
  return rep;
}

Report bar_module_report(Ring ring, int n, OperadChoice choice, int r,
                         int degree_max) {
  BarModule bm = bar_module(ring, n, choice, r);
  ChainComplex cc = bar_module_complex(bm, r, degree_max);
  const auto found = homology(cc);
  Report rep;
  rep.object = "bar-module";
  rep.ring = ring;
  rep.bounds = "n=" + ts(n) + ",operad=" + choice_name(choice) + ",arity=" +
               ts(r) + ",degree_max=" +
               (degree_max < 0 ? "none" : ts(degree_max));
  for (const auto& [d, h] : found) rep.table.push_back(row_from(r, 0, d, h));
  if (choice == OperadChoice::e) {
    rep.notes.push_back(
        "no closed-form expectation over the full operad; informational");
  } else {
    const int want_degree = choice == OperadChoice::c ? n * r : n;
    const bool want_class = choice == OperadChoice::c || r == 1;
    for (const auto& [d, h] : found) {
      const long want = want_class && d == want_degree ? 1 : 0;
      if (h.free_rank != want || !h.torsion.empty()) {
        rep.pass = false;
        rep.notes.push_back("degree " + ts(d) + ": found " + h.encode() +
                            ", expected free rank " + std::to_string(want));
      }
    }
    if (want_class &&
        (found.empty() || !found.count(want_degree)) &&
        !cc.truncated) {
      rep.pass = false;
      rep.notes.push_back("expected class in degree " + ts(want_degree) +
                          " not computed");
    }
  }
  if (cc.truncated)
    rep.notes.push_back("complex truncated; top degree omitted");
  sort_rows(rep);
  return rep;
}

Report bar_eval_report(Ring ring, int n, OperadChoice choice,
                       const std::string& algebra_spec, int weight_max,
                       int degree_max, int threads) {
  if (weight_max < 1)
    throw ContractError("bar_eval_report needs weight_max >= 1");
  std::vector<std::map<std::pair<int, int>, HomologySummary>> blocks(
      weight_max);
  run_blocks(threads, weight_max, [&](int i) {
    const int w = i + 1;
    BarModule bm = bar_module(ring, n, choice, w);
    AlgebraDatum a = algebra_from_spec(bm, algebra_spec);
    ChainComplex cc = evaluate_module(bm, a, {w, w, degree_max});
    blocks[i] = homology_by_weight(cc);
  });
  Report rep;
  rep.object = "bar-eval";
  rep.ring = ring;
  rep.bounds = "n=" + ts(n) + ",operad=" + choice_name(choice) + ",algebra=" +
               algebra_spec + ",weight_max=" + ts(weight_max) +
               ",degree_max=" + degree_bound_text(degree_max);
  for (int i = 0; i < weight_max; ++i)
    for (const auto& [key, h] : blocks[i])
      rep.table.push_back(row_from(0, key.first, key.second, h));
  rep.notes.push_back(
      "homology of the evaluated bar complex by (weight, degree); "
      "informational");
  sort_rows(rep);
  return rep;
}

Report free_commutative_check(Ring ring, int r_max, int threads) {
  if (r_max < 1) throw ContractError("free_commutative_check needs r >= 1");
  struct Block {
    std::vector<ReportRow> rows;
    std::vector<std::string> notes;
    bool ok = true;
  };
  const int count = 2 * r_max;
  std::vector<Block> blocks(count);
  run_blocks(threads, count, [&](int i) {
    const int n = 1 + i / r_max;
    const int r = 1 + i % r_max;
    BarModule bm = bar_module(ring, n, OperadChoice::c, r);
    ChainComplex cc = bar_module_complex(bm, r);
    Block& b = blocks[i];
    for (const auto& [d, h] : homology(cc)) {
      b.rows.push_back(row_from(r, n, d, h));
      const long want = d == n * r ? 1 : 0;
      if (h.free_rank != want || !h.torsion.empty()) {
        b.ok = false;
        b.notes.push_back("n=" + ts(n) + ", arity=" + ts(r) + ", degree " +
                          ts(d) + ": found " + h.encode() +
                          ", expected free rank " + std::to_string(want));
      }
    }
  });
  Report rep;
  rep.object = "free-commutative";
  rep.ring = ring;
  rep.bounds = "arity<=" + ts(r_max) + ",n<=2";
  rep.notes.push_back("weight column holds the bar level n");
  for (Block& b : blocks) {
    rep.table.insert(rep.table.end(), b.rows.begin(), b.rows.end());
    rep.notes.insert(rep.notes.end(), b.notes.begin(), b.notes.end());
    rep.pass = rep.pass && b.ok;
  }
  if (rep.pass)
    rep.notes.push_back(
        "one class in degree n*arity throughout, as for a free graded "
        "commutative algebra on one generator");
  sort_rows(rep);
  return rep;
}

// --- Harrison quotient via the cone on the shuffle subcomplex ---------------------

namespace {

// ordered set partitions of e as level-one words, grouped by factor count
std::map<int, std::vector<LevelWord>> ordered_partition_words(
    const FiniteSet& e) {
  std::map<int, std::vector<LevelWord>> out;
  for (int k = 1; k <= static_cast<int>(e.size()); ++k) {
    auto& bucket = out[k];
    for (const auto& part : symseq::set_partitions(e, k)) {
      std::vector<int> order(k);
      std::iota(order.begin(), order.end(), 0);
      do {
        std::vector<LevelWord> factors;
        factors.reserve(k);
        for (int i : order) factors.push_back(LevelWord::leaf_word(part[i]));
        bucket.push_back(LevelWord::node(1, std::move(factors)));
      } while (std::next_permutation(order.begin(), order.end()));
    }
    std::sort(bucket.begin(), bucket.end(),
              [](const LevelWord& a, const LevelWord& b) {
                return a.encode() < b.encode();
              });
  }
  return out;
}

// reduced column-space basis: a lattice basis over Z (through the certified
// Smith form: the first rank columns of G*V), a reduced echelon basis over a
// field
std::vector<std::vector<Scalar>> column_space_basis(const SparseMatrix& g) {
  std::vector<std::vector<Scalar>> out;
  if (g.cols() == 0 || g.rows() == 0 || g.is_zero()) return out;
  const Ring ring = g.ring();
  if (ring.kind == RingKind::Z) {
    auto snf = exactlin::smith_normal_form(g);
    out.assign(snf.rank(),
               std::vector<Scalar>(g.rows(), Scalar::zero(ring)));
    for (const auto& [rc, val] : g.entries()) {
      const auto [row, k] = rc;
      for (int j = 0; j < snf.rank(); ++j) {
        const mpz_class& vkj = snf.V[k][j];
        if (vkj != 0) out[j][row] = out[j][row] + val * Scalar(ring, vkj);
      }
    }
    return out;
  }
  std::vector<int> pivot_row;
  for (int c = 0; c < g.cols(); ++c) {
    std::vector<Scalar> v(g.rows(), Scalar::zero(ring));
    for (const auto& [rc, val] : g.entries())
      if (rc.second == c) v[rc.first] = val;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Scalar f = v[pivot_row[i]];
      if (f.is_zero()) continue;
      for (int r = 0; r < g.rows(); ++r) v[r] = v[r] - out[i][r] * f;
    }
    int lead = -1;
    for (int r = 0; r < g.rows(); ++r)
      if (!v[r].is_zero()) {
        lead = r;
        break;
      }
    if (lead < 0) continue;
    const Scalar inv = v[lead].inverse();
    for (int r = 0; r < g.rows(); ++r) v[r] = v[r] * inv;
    pivot_row.push_back(lead);
    out.push_back(std::move(v));
  }
  return out;
}

struct HarrisonBlock {
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
  bool ok = true;
};

HarrisonBlock harrison_block(Ring ring, int r) {
  HarrisonBlock out;
  const FiniteSet e = full_set(r);
  const auto words = ordered_partition_words(e);

  // ambient bar complex V with index maps per degree (degree = factor count)
  std::map<int, std::vector<LevelWord>> vbasis;
  std::map<int, std::map<std::string, int>> vindex;
  for (const auto& [k, ws] : words) {
    vbasis[k] = ws;
    auto& ix = vindex[k];
    for (int i = 0; i < static_cast<int>(ws.size()); ++i)
      ix.emplace(ws[i].encode(), i);
  }
  auto vdim = [&](int d) {
    auto it = vbasis.find(d);
    return it == vbasis.end() ? 0 : static_cast<int>(it->second.size());
  };
  auto to_vector = [&](int d, const WordSum& s) {
    std::vector<Scalar> v(vdim(d), Scalar::zero(ring));
    for (const auto& [w, c] : s.terms) {
      auto it = vindex[d].find(w.encode());
      if (it == vindex[d].end())
        throw MathError("bar differential leaves the ambient basis at " +
                        w.encode());
      v[it->second] = v[it->second] + c;
    }
    return v;
  };
  std::map<int, SparseMatrix> vdiff;  // V_d -> V_{d-1}
  for (int d = 1; d <= r; ++d) {
    SparseMatrix m(ring, vdim(d - 1), vdim(d));
    for (int j = 0; j < vdim(d); ++j) {
      const auto col = to_vector(d - 1, barcx::bar_differential(ring, vbasis[d][j]));
      for (int i = 0; i < vdim(d - 1); ++i)
        if (!col[i].is_zero()) m.add(i, j, col[i]);
    }
    vdiff.emplace(d, std::move(m));
  }

  // shuffle-image generators, then a reduced basis of W_d
  std::map<int, std::vector<std::vector<Scalar>>> gens;
  for (const auto& [u, v] : symseq::two_splits(e)) {
    const auto left = ordered_partition_words(u);
    const auto right = ordered_partition_words(v);
    for (const auto& [ka, xs] : left)
      for (const auto& [kb, ys] : right)
        for (const LevelWord& x : xs)
          for (const LevelWord& y : ys)
            gens[ka + kb].push_back(
                to_vector(ka + kb, barcx::shuffle_words(ring, x, y)));
  }
  std::map<int, std::vector<std::vector<Scalar>>> wbasis;
  for (const auto& [d, cols] : gens) {
    SparseMatrix g(ring, vdim(d), static_cast<int>(cols.size()));
    for (int j = 0; j < static_cast<int>(cols.size()); ++j)
      for (int i = 0; i < vdim(d); ++i)
        if (!cols[j][i].is_zero()) g.add(i, j, cols[j][i]);
    wbasis.emplace(d, column_space_basis(g));
  }
  auto wdim = [&](int d) {
    auto it = wbasis.find(d);
    return it == wbasis.end() ? 0 : static_cast<int>(it->second.size());
  };
  auto wmatrix = [&](int d) {
    SparseMatrix m(ring, vdim(d), wdim(d));
    if (wdim(d) == 0) return m;
    const auto& cols = wbasis.at(d);
    for (int j = 0; j < wdim(d); ++j)
      for (int i = 0; i < vdim(d); ++i)
        if (!cols[j][i].is_zero()) m.add(i, j, cols[j][i]);
    return m;
  };

  // the differential must descend: dV of each W generator solves in W_{d-1}
  std::map<int, SparseMatrix> wdiff;  // W_d -> W_{d-1}, coordinates
  bool descends = true;
  for (int d = 1; d <= r; ++d) {
    SparseMatrix m(ring, wdim(d - 1), wdim(d));
    const SparseMatrix lower = wmatrix(d - 1);
    for (int j = 0; j < wdim(d); ++j) {
      std::vector<Scalar> image(vdim(d - 1), Scalar::zero(ring));
      for (const auto& [rc, val] : vdiff.at(d).entries())
        image[rc.first] =
            image[rc.first] + val * wbasis.at(d)[j][rc.second];
      bool zero = true;
      for (const auto& s : image) zero = zero && s.is_zero();
      if (zero) continue;
      auto coords = exactlin::solve(lower, image);
      if (!coords) {
        descends = false;
        break;
      }
      for (int i = 0; i < wdim(d - 1); ++i)
        if (!(*coords)[i].is_zero()) m.add(i, j, (*coords)[i]);
    }
    if (!descends) break;
    wdiff.emplace(d, std::move(m));
  }
  if (!descends) {
    out.ok = false;
    out.notes.push_back("arity " + ts(r) +
                        ": shuffle image is not a subcomplex over " +
                        ring.encode());
    return out;
  }

  // cone(W -> V): cone_d = W_{d-1} (+) V_d, D(w, v) = (-dW w, dV v - w);
  // its homology is the homology of the quotient complex V/W
  auto cone_dim = [&](int d) { return wdim(d - 1) + vdim(d); };
  auto cone_matrix = [&](int d) {
    SparseMatrix m(ring, cone_dim(d - 1), cone_dim(d));
    const int wrows = wdim(d - 2);
    if (wdim(d - 1) > 0) {
      for (const auto& [rc, val] : wdiff.at(d - 1).entries())
        m.add(rc.first, rc.second, -val);
      for (int j = 0; j < wdim(d - 1); ++j)
        for (int i = 0; i < vdim(d - 1); ++i) {
          const Scalar& s = wbasis.at(d - 1)[j][i];
          if (!s.is_zero()) m.add(wrows + i, j, -s);
        }
    }
    if (vdim(d) > 0)
      for (const auto& [rc, val] : vdiff.at(d).entries())
        m.add(wrows + rc.first, wdim(d - 1) + rc.second, val);
    return m;
  };
  for (int d = 1; d <= r + 1; ++d) {
    const HomologySummary h =
        exactlin::chain_homology(cone_matrix(d + 1), cone_matrix(d));
    if (d <= r) {
      out.rows.push_back(row_from(r, 0, d, h));
      const long want = r == 1 && d == 1 ? 1 : 0;
      if (h.free_rank != want || !h.torsion.empty()) {
        out.ok = false;
        out.notes.push_back("arity " + ts(r) + ", degree " + ts(d) +
                            ": found " + h.encode() + ", expected free rank " +
                            std::to_string(want));
      }
    } else if (h.free_rank != 0 || !h.torsion.empty()) {
      out.ok = false;
      out.notes.push_back("arity " + ts(r) + ": cone carries homology " +
                          h.encode() + " above the ambient degrees");
    }
  }

  // cross-check the dimensions against the quotient summary
  const auto summary =
      barcx::harrison_complex(barcx::commutative_algebra(ring, r), e);
  bool sizes = summary.differential_descends;
  for (int d = 1; d <= r; ++d) {
    const auto adim = summary.ambient_dim.count(d) ? summary.ambient_dim.at(d) : 0;
    const auto srank = summary.shuffle_rank.count(d) ? summary.shuffle_rank.at(d) : 0;
    const auto qdim = summary.quotient_dim.count(d) ? summary.quotient_dim.at(d) : 0;
    sizes = sizes && adim == vdim(d) && srank == wdim(d) &&
            qdim == vdim(d) - wdim(d);
  }
  if (!sizes) {
    out.ok = false;
    out.notes.push_back("arity " + ts(r) +
                        ": dimensions disagree with the quotient summary");
  }
  return out;
}

}  // namespace

Report harrison_acyclicity_check(Ring ring, int r_max, int threads) {
  if (r_max < 1 || r_max > 5)
    throw ContractError("harrison_acyclicity_check supports arities 1..5");
  std::vector<HarrisonBlock> blocks(r_max);
  run_blocks(threads, r_max,
             [&](int i) { blocks[i] = harrison_block(ring, i + 1); });
  Report rep;
  rep.object = "harrison";
  rep.ring = ring;
  rep.bounds = "arity<=" + ts(r_max);
  for (HarrisonBlock& b : blocks) {
    rep.table.insert(rep.table.end(), b.rows.begin(), b.rows.end());
    rep.notes.insert(rep.notes.end(), b.notes.begin(), b.notes.end());
    rep.pass = rep.pass && b.ok;
  }
  if (rep.pass)
    rep.notes.push_back(
        "quotient homology is the suspended identity sequence: one class in "
        "degree 1 at arity 1, acyclic at higher arities");
  sort_rows(rep);
  return rep;
}

Report trivial_algebra_check(Ring ring, int n, int degree_max, int threads) {
  if (ring.kind == RingKind::Fp)
    throw ContractError(
        "trivial_algebra_check compares against a characteristic-zero "
        "count; run it over z or q");
  if (n < 1 || n > 3)
    throw ContractError("trivial_algebra_check supports n in 1..3");
  if (degree_max < 0) throw ContractError("degree_max must be >= 0");
  const int weight_max = std::min(degree_max - n + 1, 6);
  std::vector<std::map<std::pair<int, int>, HomologySummary>> blocks(
      std::max(weight_max, 0));
  run_blocks(threads, std::max(weight_max, 0), [&](int i) {
    const int w = i + 1;
    BarModule bm = bar_module(ring, n, OperadChoice::c, w);
    AlgebraDatum a = trivial_algebra(bm, 1);
    ChainComplex cc = evaluate_module(bm, a, {w, w, INT_MAX});
    blocks[i] = homology_by_weight(cc);
  });
  const auto oracle = trivial_algebra_oracle(n, std::max(weight_max, 0),
                                             degree_max);
  Report rep;
  rep.object = "trivial-algebra";
  rep.ring = ring;
  rep.bounds = "n=" + ts(n) + ",degree_max=" + ts(degree_max) +
               ",weight_max=" + ts(std::max(weight_max, 0));
  std::map<std::pair<int, int>, HomologySummary> found;
  for (const auto& block : blocks)
    for (const auto& [key, h] : block)
      if (key.second <= degree_max) found.emplace(key, h);
  std::set<std::pair<int, int>> cells;
  for (const auto& [key, h] : found) cells.insert(key);
  for (const auto& [key, dim] : oracle) cells.insert(key);
  bool torsion_seen = false;
  for (const auto& key : cells) {
    const HomologySummary h = found.count(key) ? found.at(key)
                                               : HomologySummary{};
    if (found.count(key)) rep.table.push_back(row_from(0, key.first, key.second, h));
    const long want = oracle.count(key) ? oracle.at(key) : 0;
    if (h.free_rank != want) {
      rep.pass = false;
      rep.notes.push_back("weight " + ts(key.first) + ", degree " +
                          ts(key.second) + ": free rank " +
                          std::to_string(h.free_rank) + ", the Lie-coalgebra "
                          "count expects " + std::to_string(want));
    }
    torsion_seen = torsion_seen || !h.torsion.empty();
  }
  rep.notes.push_back(
      "free ranks against the symmetric expansion of the suspended free Lie "
      "dimensions");
  if (torsion_seen)
    rep.notes.push_back("torsion present; reported in the rows, not graded");
  sort_rows(rep);
  return rep;
}

Report stabilization_scan(Ring ring, int r, int degree_window, int n_max,
                          int threads) {
  if (r < 1 || degree_window < 0 || n_max < 1)
    throw ContractError("stabilization_scan needs r, n_max >= 1 and a "
                        "nonnegative window");
  struct Block {
    std::vector<ReportRow> rows;
    bool window_zero = true;
    bool expected_r1 = true;
    bool vanish = true;  // map to the next level, when present
    std::string map_note;
  };
  std::vector<Block> blocks(n_max);
  run_blocks(threads, n_max, [&](int i) {
    const int n = i + 1;
    Block& b = blocks[i];
    BarModule lo = bar_module(ring, n, OperadChoice::c, r);
    ChainComplex clo = bar_module_complex(lo, r);
    const auto found = homology(clo);
    for (int ds = 0; ds <= degree_window; ++ds) {
      const int d = ds + n;
      const HomologySummary h =
          found.count(d) ? found.at(d) : HomologySummary{};
      b.rows.push_back(row_from(r, n, ds, h));
      if (h.free_rank != 0 || !h.torsion.empty()) b.window_zero = false;
      const long want = ds == 0 ? 1 : 0;
      if (h.free_rank != want || !h.torsion.empty()) b.expected_r1 = false;
    }
    if (n == n_max) return;
    BarModule hi = bar_module(ring, n + 1, OperadChoice::c, r);
    ChainComplex chi = bar_module_complex(hi, r);
    std::map<std::string, BasisElement> by_label;
    for (const BasisElement& x : lo.ctx.mod_c.module.at(r))
      by_label.emplace(x.label, x);
    for (int ds = 0; ds <= degree_window && b.vanish; ++ds) {
      const int d = ds + n;
      const auto labels = clo.basis.count(d) ? clo.basis.at(d)
                                             : std::vector<std::string>{};
      if (labels.empty()) continue;
      const auto cycles = exactlin::kernel_basis(boundary_matrix(clo, d));
      const SparseMatrix target = boundary_matrix(chi, d + 2);
      std::map<std::string, int> hi_index;
      const auto hi_labels = chi.basis.count(d + 1)
                                 ? chi.basis.at(d + 1)
                                 : std::vector<std::string>{};
      for (int k = 0; k < static_cast<int>(hi_labels.size()); ++k)
        hi_index.emplace(hi_labels[k], k);
      for (const auto& z : cycles) {
        LinT zl(ring);
        for (int k = 0; k < static_cast<int>(labels.size()); ++k)
          if (!z[k].is_zero()) zl.add(by_label.at(labels[k]), z[k]);
        LinT sz = barcx::suspension_on_composites(lo.ctx.mod_c,
                                                  hi.ctx.mod_c, zl);
        std::vector<Scalar> b2(hi_labels.size(), Scalar::zero(ring));
        for (const auto& [x, c] : sz.terms) {
          auto it = hi_index.find(x.label);
          if (it == hi_index.end())
            throw MathError("suspension leaves the target basis at " +
                            x.label);
          b2[it->second] = b2[it->second] + c;
        }
        if (!exactlin::solve(target, b2)) {
          b.vanish = false;
          break;
        }
      }
    }
    b.map_note = "suspension map n=" + ts(n) + "->" + ts(n + 1) +
                 " vanishes on window homology: " +
                 (b.vanish ? "yes" : "no");
  });
  Report rep;
  rep.object = "stabilization";
  rep.ring = ring;
  rep.bounds = "arity=" + ts(r) + ",window=" + ts(degree_window) + ",n<=" +
               ts(n_max);
  rep.notes.push_back(
      "weight column holds the bar level n; degree column is the shifted "
      "degree d-n");
  bool maps_vanish = true;
  for (int i = 0; i < n_max; ++i) {
    rep.table.insert(rep.table.end(), blocks[i].rows.begin(),
                     blocks[i].rows.end());
    if (!blocks[i].map_note.empty()) rep.notes.push_back(blocks[i].map_note);
    if (i + 1 < n_max) maps_vanish = maps_vanish && blocks[i].vanish;
  }
  if (r == 1) {
    for (const Block& b : blocks) rep.pass = rep.pass && b.expected_r1;
    if (rep.pass)
      rep.notes.push_back(
          "stable class of the unit in shifted degree 0 at every level");
  } else {
    rep.pass = maps_vanish && blocks[n_max - 1].window_zero;
    if (rep.pass)
      rep.notes.push_back(
          "all suspension maps vanish on window homology and the last level "
          "is acyclic there: the colimit vanishes in the window");
  }
  sort_rows(rep);
  return rep;
}

}  // namespace enbar::evalhom
