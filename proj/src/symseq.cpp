#include "enbar/symseq.hpp"

#include <algorithm>

namespace enbar::symseq {

bool is_valid_set(const FiniteSet& e) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] < 1) return false;
    if (i && e[i] <= e[i - 1]) return false;
  }
  return true;
}

FiniteSet canonical_set(int r) {
  FiniteSet e(r);
  for (int i = 0; i < r; ++i) e[i] = i + 1;
  return e;
}

FiniteSet set_union_disjoint(const FiniteSet& a, const FiniteSet& b) {
  FiniteSet out;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] == out[i - 1]) throw ContractError("blocks overlap");
  return out;
}

std::string encode_set(const FiniteSet& e) {
  bool digits = !e.empty() && e.back() <= 9;
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i && !digits) s += ",";
    s += std::to_string(e[i]);
  }
  return s;
}

std::vector<std::vector<FiniteSet>> set_partitions(const FiniteSet& e, int r) {
  std::vector<std::vector<FiniteSet>> out;
  if (r < 1 || (int)e.size() < r) return out;
  std::vector<FiniteSet> blocks;
  // elements are assigned in increasing order, so blocks appear min-sorted
  std::function<void(std::size_t)> rec = [&](std::size_t idx) {
    if (e.size() - idx < (std::size_t)(r - (int)blocks.size())) return;
    if (idx == e.size()) {
      if ((int)blocks.size() == r) out.push_back(blocks);
      return;
    }
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      // index, not reference: the recursive call may reallocate `blocks`
      blocks[bi].push_back(e[idx]);
      rec(idx + 1);
      blocks[bi].pop_back();
    }
    if ((int)blocks.size() < r) {
      blocks.push_back({e[idx]});
      rec(idx + 1);
      blocks.pop_back();
    }
  };
  rec(0);
  return out;
}

std::vector<std::pair<FiniteSet, FiniteSet>> two_splits(const FiniteSet& e) {
  std::vector<std::pair<FiniteSet, FiniteSet>> out;
  int n = (int)e.size();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    FiniteSet u, v;
    for (int i = 0; i < n; ++i) ((mask >> i) & 1 ? u : v).push_back(e[i]);
    out.push_back({u, v});
  }
  return out;
}

std::vector<std::vector<int>> multishuffles(const std::vector<int>& lens) {
  std::vector<std::vector<int>> out;
  std::vector<int> left = lens, word;
  int total = 0;
  for (int l : lens) total += l;
  std::function<void()> rec = [&]() {
    if ((int)word.size() == total) {
      out.push_back(word);
      return;
    }
    for (std::size_t i = 0; i < left.size(); ++i) {
      if (left[i] == 0) continue;
      --left[i];
      word.push_back((int)i);
      rec();
      word.pop_back();
      ++left[i];
    }
  };
  rec();
  return out;
}

int koszul_reorder_sign(const std::vector<int>& degrees,
                        const std::vector<int>& new_pos) {
  int sign = 1;
  for (std::size_t i = 0; i < degrees.size(); ++i)
    for (std::size_t j = i + 1; j < degrees.size(); ++j)
      if (new_pos[i] > new_pos[j] && (degrees[i] * degrees[j]) % 2 != 0)
        sign = -sign;
  return sign;
}

Bijection Bijection::identity(const FiniteSet& e) {
  return {e, std::vector<int>(e.begin(), e.end())};
}

Bijection Bijection::from_values(const std::vector<int>& values) {
  return {canonical_set((int)values.size()), values};
}

FiniteSet Bijection::target() const {
  FiniteSet t = image;
  std::sort(t.begin(), t.end());
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] == t[i - 1]) throw ContractError("bijection image not distinct");
  return t;
}

int Bijection::apply(int x) const {
  auto it = std::lower_bound(source.begin(), source.end(), x);
  if (it == source.end() || *it != x)
    throw ContractError("bijection applied outside source");
  return image[it - source.begin()];
}

Bijection Bijection::inverse() const {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < source.size(); ++i)
    pairs.push_back({image[i], source[i]});
  std::sort(pairs.begin(), pairs.end());
  Bijection out;
  for (auto& [a, b] : pairs) {
    out.source.push_back(a);
    out.image.push_back(b);
  }
  return out;
}

Bijection Bijection::after(const Bijection& first) const {
  Bijection out;
  out.source = first.source;
  for (int v : first.image) out.image.push_back(apply(v));
  return out;
}

int Bijection::sign() const {
  // source is sorted, so inversions of the image sequence give the parity
  int s = 1;
  for (std::size_t i = 0; i < image.size(); ++i)
    for (std::size_t j = i + 1; j < image.size(); ++j)
      if (image[i] > image[j]) s = -s;
  return s;
}

std::string Bijection::encode() const {
  std::string s = "(";
  for (std::size_t i = 0; i < image.size(); ++i)
    s += (i ? "," : "") + std::to_string(image[i]);
  return s + ")";
}

static Bijection restrict_bijection(const Bijection& u, const FiniteSet& sub) {
  Bijection out;
  out.source = sub;
  for (int x : sub) out.image.push_back(u.apply(x));
  return out;
}

Truncation Truncation::intersect(const Truncation& o) const {
  Truncation t;
  t.arity_max = std::min(arity_max, o.arity_max);
  t.degree_min = std::max(degree_min, o.degree_min);
  t.degree_max = std::min(degree_max, o.degree_max);
  return t;
}

static int sat_add(int a, int b) {
  if (a == INT_MAX || b == INT_MAX) return INT_MAX;
  if (a == INT_MIN || b == INT_MIN) return INT_MIN;
  long s = (long)a + b;
  if (s > INT_MAX) return INT_MAX;
  if (s < INT_MIN) return INT_MIN;
  return (int)s;
}

// ---------------------------------------------------------------------------

const std::vector<BasisElement>& SigmaModule::at(int arity) const {
  if (!trunc.admits_arity(arity))
    throw ContractError(name + ": arity " + std::to_string(arity) +
                        " outside truncation");
  auto it = cache_->by_arity.find(arity);
  if (it != cache_->by_arity.end()) return it->second;
  std::vector<BasisElement> b = basis_fn(arity);
  std::erase_if(b, [&](const BasisElement& e) { return !trunc.admits_degree(e.degree); });
  std::sort(b.begin(), b.end());
  return cache_->by_arity.emplace(arity, std::move(b)).first->second;
}

int SigmaModule::dim(int arity, int degree) const {
  int n = 0;
  for (const auto& e : at(arity))
    if (e.degree == degree) ++n;
  return n;
}

int SigmaModule::dim(int arity) const { return (int)at(arity).size(); }

SignedElement SigmaModule::relabel_one(const Bijection& u,
                                       const BasisElement& x) const {
  if (u.source != x.inputs)
    throw ContractError(name + ": relabel source does not match inputs");
  return relabel_fn(u, x);
}

Lin<BasisElement> SigmaModule::relabel(const Bijection& u,
                                       const Lin<BasisElement>& v) const {
  Lin<BasisElement> out(ring);
  for (const auto& [k, c] : v.terms) {
    SignedElement s = relabel_one(u, k);
    if (s.sign == 0) continue;
    out.add(s.elem, c * Scalar(ring, s.sign));
  }
  return out;
}

Lin<BasisElement> SigmaModule::diff(const Lin<BasisElement>& v) const {
  Lin<BasisElement> out(ring);
  for (const auto& [k, c] : v.terms) {
    Lin<BasisElement> dk = diff_fn(k);
    for (const auto& [k2, c2] : dk.terms)
      if (trunc.admits_degree(k2.degree)) out.add(k2, c2 * c);
  }
  return out;
}

// ---------------------------------------------------------------------------

SigmaModule unit_module(Ring ring) {
  SigmaModule m;
  m.ring = ring;
  m.name = "I";
  m.trunc.arity_max = 1;
  m.basis_fn = [](int arity) {
    std::vector<BasisElement> out;
    if (arity == 1) out.push_back({"i", 0, {1}});
    return out;
  };
  m.relabel_fn = [](const Bijection& u, const BasisElement& x) {
    return SignedElement{{x.label, 0, u.target()}, 1};
  };
  m.diff_fn = [ring](const BasisElement&) { return Lin<BasisElement>(ring); };
  return m;
}

SigmaModule commutative_module(Ring ring, int arity_max) {
  SigmaModule m;
  m.ring = ring;
  m.name = "Cbar";
  m.trunc.arity_max = arity_max;
  m.basis_fn = [](int arity) {
    std::vector<BasisElement> out;
    out.push_back({"c", 0, canonical_set(arity)});
    return out;
  };
  m.relabel_fn = [](const Bijection& u, const BasisElement& x) {
    return SignedElement{{x.label, x.degree, u.target()}, 1};
  };
  m.diff_fn = [ring](const BasisElement&) { return Lin<BasisElement>(ring); };
  return m;
}

// --- tensor product --------------------------------------------------------

namespace {
struct TensorInfo {
  FiniteSet u, v;
  BasisElement x, y;
};
using TensorReg = std::map<std::string, TensorInfo>;

std::string tensor_label(const TensorInfo& i) {
  return "t[" + encode_set(i.u) + ":" + i.x.label + "|" + encode_set(i.v) +
         ":" + i.y.label + "]";
}

BasisElement tensor_elem(const TensorInfo& i, std::shared_ptr<TensorReg> reg) {
  BasisElement e{tensor_label(i), i.x.degree + i.y.degree,
                 set_union_disjoint(i.u, i.v)};
  reg->emplace(e.label, i);
  return e;
}
}  // namespace

SigmaModule tensor_product(const SigmaModule& M, const SigmaModule& N) {
  exactlin::Ring ring = M.ring;
  if (!(ring == N.ring)) throw ContractError("tensor_product: ring mismatch");
  SigmaModule P;
  P.ring = ring;
  P.name = "(" + M.name + "(x)" + N.name + ")";
  P.trunc.arity_max = sat_add(M.trunc.arity_max, N.trunc.arity_max);
  P.trunc.degree_min = sat_add(M.trunc.degree_min, N.trunc.degree_min);
  P.trunc.degree_max = sat_add(M.trunc.degree_max, N.trunc.degree_max);
  auto reg = std::make_shared<TensorReg>();
  auto lookup = [reg](const BasisElement& e) -> const TensorInfo& {
    auto it = reg->find(e.label);
    if (it == reg->end())
      throw ContractError("tensor element not registered: " + e.label);
    return it->second;
  };
  P.basis_fn = [M, N, reg](int arity) {
    std::vector<BasisElement> out;
    for (const auto& [u, v] : two_splits(canonical_set(arity))) {
      if (!M.trunc.admits_arity((int)u.size()) ||
          !N.trunc.admits_arity((int)v.size()))
        continue;  // truncation says drop
      Bijection bu{canonical_set((int)u.size()), std::vector<int>(u.begin(), u.end())};
      Bijection bv{canonical_set((int)v.size()), std::vector<int>(v.begin(), v.end())};
      for (const auto& x : M.at((int)u.size())) {
        SignedElement xu = M.relabel_one(bu, x);
        for (const auto& y : N.at((int)v.size())) {
          SignedElement yv = N.relabel_one(bv, y);
          // increasing relabels are the chosen basis identification; their
          // signs are +-1 global constants per element and get absorbed
          out.push_back(tensor_elem({u, v, xu.elem, yv.elem}, reg));
        }
      }
    }
    return out;
  };
  P.relabel_fn = [M, N, reg, lookup](const Bijection& w, const BasisElement& e) {
    const TensorInfo info = lookup(e);
    SignedElement sx = M.relabel_one(restrict_bijection(w, info.u), info.x);
    SignedElement sy = N.relabel_one(restrict_bijection(w, info.v), info.y);
    if (sx.sign == 0 || sy.sign == 0) return SignedElement{{}, 0};
    // factor order is fixed (M-part first), so no Koszul sign here
    TensorInfo ni{sx.elem.inputs, sy.elem.inputs, sx.elem, sy.elem};
    return SignedElement{tensor_elem(ni, reg), sx.sign * sy.sign};
  };
  P.diff_fn = [M, N, reg, lookup, ring](const BasisElement& e) {
    const TensorInfo info = lookup(e);
    Lin<BasisElement> out(ring);
    Lin<BasisElement> dx = M.diff_fn(info.x);
    for (const auto& [k, c] : dx.terms)
      out.add(tensor_elem({info.u, info.v, k, info.y}, reg), c);
    Lin<BasisElement> dy = N.diff_fn(info.y);
    Scalar sgn(ring, info.x.degree % 2 == 0 ? 1 : -1);
    for (const auto& [k, c] : dy.terms)
      out.add(tensor_elem({info.u, info.v, info.x, k}, reg), c * sgn);
    return out;
  };
  return P;
}

// --- composition product ---------------------------------------------------

namespace {
struct CompInfo {
  BasisElement x;                 // M-part, on {1..s}
  std::vector<BasisElement> ys;   // ys[i] on blocks[i], blocks min-sorted
};
using CompReg = std::map<std::string, CompInfo>;

std::string comp_label(const CompInfo& i) {
  std::string s = "o[" + i.x.label;
  for (const auto& y : i.ys)
    s += "|" + encode_set(y.inputs) + ":" + y.label;
  return s + "]";
}

BasisElement comp_elem(const CompInfo& i, std::shared_ptr<CompReg> reg) {
  int deg = i.x.degree;
  FiniteSet inputs;
  for (const auto& y : i.ys) {
    deg += y.degree;
    inputs = set_union_disjoint(inputs, y.inputs);
  }
  BasisElement e{comp_label(i), deg, inputs};
  reg->emplace(e.label, i);
  return e;
}
}  // namespace

CompositionModule composition_module(const SigmaModule& M,
                                     const SigmaModule& N) {
  exactlin::Ring ring = M.ring;
  if (!(ring == N.ring))
    throw ContractError("composition_product: ring mismatch");
  SigmaModule P;
  P.ring = ring;
  P.name = "(" + M.name + "o" + N.name + ")";
  P.trunc.arity_max =
      (M.trunc.arity_max == INT_MAX || N.trunc.arity_max == INT_MAX)
          ? INT_MAX
          : (int)std::min<long>((long)M.trunc.arity_max * N.trunc.arity_max,
                                INT_MAX);
  auto reg = std::make_shared<CompReg>();
  auto lookup = [reg](const BasisElement& e) -> const CompInfo& {
    auto it = reg->find(e.label);
    if (it == reg->end())
      throw ContractError("composite element not registered: " + e.label);
    return it->second;
  };
  P.basis_fn = [M, N, reg](int arity) {
    std::vector<BasisElement> out;
    int smax = std::min(arity, M.trunc.arity_max);
    for (int s = 1; s <= smax; ++s) {
      for (const auto& blocks : set_partitions(canonical_set(arity), s)) {
        bool ok = true;
        for (const auto& b : blocks)
          if (!N.trunc.admits_arity((int)b.size())) ok = false;
        if (!ok) continue;  // truncation says drop
        // assemble one slot list per choice of N-basis elements
        std::vector<std::vector<BasisElement>> slot_choices;
        for (const auto& b : blocks) {
          Bijection bb{canonical_set((int)b.size()),
                       std::vector<int>(b.begin(), b.end())};
          std::vector<BasisElement> ch;
          for (const auto& y : N.at((int)b.size()))
            ch.push_back(N.relabel_one(bb, y).elem);
          slot_choices.push_back(std::move(ch));
        }
        std::vector<BasisElement> pick(s, BasisElement{});
        std::function<void(int)> rec = [&](int i) {
          if (i == s) {
            for (const auto& x : M.at(s))
              out.push_back(comp_elem({x, pick}, reg));
            return;
          }
          for (const auto& y : slot_choices[i]) {
            pick[i] = y;
            rec(i + 1);
          }
        };
        rec(0);
      }
    }
    return out;
  };
  // assemble x(y_1,...,y_s) from slot order: sort blocks by minimum, relabel
  // the M-part along the sorting permutation, emit the Koszul reorder sign
  auto assemble = [M, reg](const BasisElement& x,
                           const std::vector<BasisElement>& ys) {
    int s = (int)ys.size();
    if (x.inputs != canonical_set(s))
      throw ContractError("composition make: M-part of " + x.label +
                          " must live on {1..s}");
    std::vector<int> order(s);
    for (int i = 0; i < s; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return ys[a].inputs.front() < ys[b].inputs.front();
    });
    std::vector<int> new_pos(s);
    for (int rank = 0; rank < s; ++rank) new_pos[order[rank]] = rank;
    // Koszul sign from reordering the slot factors by their degrees
    std::vector<int> degs;
    for (const auto& y : ys) degs.push_back(y.degree);
    int sign = koszul_reorder_sign(degs, new_pos);
    // the M-part is relabeled along i |-> new_pos[i]+1
    std::vector<int> vals(s);
    for (int i = 0; i < s; ++i) vals[i] = new_pos[i] + 1;
    SignedElement sx = M.relabel_one(Bijection::from_values(vals), x);
    if (sx.sign == 0) return SignedElement{{}, 0};
    CompInfo ni;
    ni.x = sx.elem;
    ni.ys.resize(s);
    for (int i = 0; i < s; ++i) ni.ys[new_pos[i]] = ys[i];
    return SignedElement{comp_elem(ni, reg), sign * sx.sign};
  };
  P.relabel_fn = [N, lookup, assemble](const Bijection& w,
                                       const BasisElement& e) {
    const CompInfo info = lookup(e);
    // relabel each slot, then renormalize via assemble
    int sign = 1;
    std::vector<BasisElement> sy;
    for (const auto& y : info.ys) {
      SignedElement r = N.relabel_one(restrict_bijection(w, y.inputs), y);
      if (r.sign == 0) return SignedElement{{}, 0};
      sign *= r.sign;
      sy.push_back(r.elem);
    }
    SignedElement out = assemble(info.x, sy);
    out.sign *= sign;
    return out;
  };
  P.diff_fn = [M, N, reg, lookup, ring](const BasisElement& e) {
    const CompInfo info = lookup(e);
    Lin<BasisElement> out(ring);
    Lin<BasisElement> dx = M.diff_fn(info.x);
    for (const auto& [k, c] : dx.terms)
      out.add(comp_elem({k, info.ys}, reg), c);
    int prefix = info.x.degree;
    for (std::size_t i = 0; i < info.ys.size(); ++i) {
      Scalar sgn(ring, prefix % 2 == 0 ? 1 : -1);
      Lin<BasisElement> dy = N.diff_fn(info.ys[i]);
      for (const auto& [k, c] : dy.terms) {
        CompInfo ni = info;
        ni.ys[i] = k;
        out.add(comp_elem(ni, reg), c * sgn);
      }
      prefix += info.ys[i].degree;
    }
    return out;
  };
  CompositionModule cm;
  cm.module = P;
  cm.make = assemble;
  cm.split = [lookup](const BasisElement& e) {
    const CompInfo& info = lookup(e);
    return std::make_pair(info.x, info.ys);
  };
  return cm;
}

SigmaModule composition_product(const SigmaModule& M, const SigmaModule& N) {
  return composition_module(M, N).module;
}

// --- suspensions -----------------------------------------------------------

namespace {
// wrapper labels do not encode the input set, so key on (label, inputs)
using WrapReg = std::map<std::pair<std::string, FiniteSet>, BasisElement>;
}

SigmaModule suspend(const SigmaModule& M, int k) {
  SigmaModule P;
  P.ring = M.ring;
  P.name = "S^" + std::to_string(k) + M.name;
  P.trunc = M.trunc;
  if (M.trunc.degree_min != INT_MIN) P.trunc.degree_min = M.trunc.degree_min + k;
  if (M.trunc.degree_max != INT_MAX) P.trunc.degree_max = M.trunc.degree_max + k;
  auto reg = std::make_shared<WrapReg>();
  std::string tag = "s^" + std::to_string(k) + "[";
  auto wrap = [reg, tag, k](const BasisElement& x) {
    BasisElement e{tag + x.label + "]", x.degree + k, x.inputs};
    reg->emplace(std::make_pair(e.label, e.inputs), x);
    return e;
  };
  auto unwrap = [reg](const BasisElement& e) -> const BasisElement& {
    auto it = reg->find({e.label, e.inputs});
    if (it == reg->end())
      throw ContractError("suspended element not registered: " + e.label);
    return it->second;
  };
  P.basis_fn = [M, wrap](int arity) {
    std::vector<BasisElement> out;
    for (const auto& x : M.at(arity)) out.push_back(wrap(x));
    return out;
  };
  P.relabel_fn = [M, wrap, unwrap](const Bijection& u, const BasisElement& e) {
    SignedElement s = M.relabel_one(u, unwrap(e));
    if (s.sign == 0) return s;
    return SignedElement{wrap(s.elem), s.sign};
  };
  P.diff_fn = [M, wrap, unwrap, k](const BasisElement& e) {
    // d(s^k x) = (-1)^k s^k(dx)
    Lin<BasisElement> out(M.ring);
    Lin<BasisElement> dx = M.diff_fn(unwrap(e));
    Scalar sgn(M.ring, k % 2 == 0 ? 1 : -1);
    for (const auto& [x, c] : dx.terms) out.add(wrap(x), c * sgn);
    return out;
  };
  return P;
}

SigmaModule operadic_suspend(const SigmaModule& M, int k) {
  SigmaModule P;
  P.ring = M.ring;
  P.name = "L^" + std::to_string(k) + M.name;
  P.trunc.arity_max = M.trunc.arity_max;
  auto reg = std::make_shared<WrapReg>();
  std::string tag = "l^" + std::to_string(k) + "[";
  auto wrap = [reg, tag, k](const BasisElement& x) {
    int r = (int)x.inputs.size();
    BasisElement e{tag + x.label + "]", x.degree + k * (1 - r), x.inputs};
    reg->emplace(std::make_pair(e.label, e.inputs), x);
    return e;
  };
  auto unwrap = [reg](const BasisElement& e) -> const BasisElement& {
    auto it = reg->find({e.label, e.inputs});
    if (it == reg->end())
      throw ContractError("operadic suspension element not registered: " +
                          e.label);
    return it->second;
  };
  P.basis_fn = [M, wrap](int arity) {
    std::vector<BasisElement> out;
    for (const auto& x : M.at(arity)) out.push_back(wrap(x));
    return out;
  };
  P.relabel_fn = [M, wrap, unwrap, k](const Bijection& u, const BasisElement& e) {
    SignedElement s = M.relabel_one(u, unwrap(e));
    if (s.sign == 0) return s;
    int sign = s.sign;
    if (k % 2 != 0) sign *= u.sign();  // sgn^k twist
    return SignedElement{wrap(s.elem), sign};
  };
  P.diff_fn = [M, wrap, unwrap, k](const BasisElement& e) {
    const BasisElement& x = unwrap(e);
    int r = (int)x.inputs.size();
    Lin<BasisElement> out(M.ring);
    Lin<BasisElement> dx = M.diff_fn(x);
    Scalar sgn(M.ring, (k * (1 - r)) % 2 == 0 ? 1 : -1);
    for (const auto& [y, c] : dx.terms) out.add(wrap(y), c * sgn);
    return out;
  };
  return P;
}

}  // namespace enbar::symseq
