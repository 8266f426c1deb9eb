#include "enbar/operads.hpp"

#include <algorithm>

namespace enbar::operads {

using symseq::canonical_set;
using symseq::encode_set;
using symseq::multishuffles;
using symseq::set_union_disjoint;

// --- orderings ---------------------------------------------------------------

Perm Perm::increasing(const FiniteSet& e) { return {std::vector<int>(e.begin(), e.end())}; }

FiniteSet Perm::inputs() const {
  FiniteSet e = order;
  std::sort(e.begin(), e.end());
  for (std::size_t i = 1; i < e.size(); ++i)
    if (e[i] == e[i - 1]) throw ContractError("ordering repeats an entry");
  return e;
}

Perm Perm::relabeled(const Bijection& u) const {
  Perm out;
  for (int v : order) out.order.push_back(u.apply(v));
  return out;
}

Perm Perm::restricted(const FiniteSet& sub) const {
  Perm out;
  for (int v : order)
    if (std::binary_search(sub.begin(), sub.end(), v)) out.order.push_back(v);
  return out;
}

bool Perm::before(int e, int f) const {
  for (int v : order) {
    if (v == e) return true;
    if (v == f) return false;
  }
  throw ContractError("ordering does not contain the requested pair");
}

std::string Perm::encode() const {
  bool digits = true;
  for (int v : order)
    if (v > 9) digits = false;
  std::string s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i && !digits) s += ",";
    s += std::to_string(order[i]);
  }
  return s;
}

Perm Perm::parse(const std::string& s) {
  Perm p;
  if (s.empty()) throw ContractError("empty ordering");
  if (s.find(',') != std::string::npos) {
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t comma = s.find(',', pos);
      std::string tok = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
      if (tok.empty()) throw ContractError("bad ordering: " + s);
      for (char c : tok)
        if (!isdigit((unsigned char)c)) throw ContractError("bad ordering: " + s);
      p.order.push_back(std::stoi(tok));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } else {
    for (char c : s) {
      if (!isdigit((unsigned char)c) || c == '0')
        throw ContractError("bad ordering: " + s);
      p.order.push_back(c - '0');
    }
  }
  p.inputs();  // validates distinctness
  return p;
}

// --- simplices ---------------------------------------------------------------

FiniteSet Simplex::inputs() const {
  if (words.empty()) throw ContractError("empty simplex");
  FiniteSet e = words[0].inputs();
  for (const auto& w : words)
    if (w.inputs() != e) throw ContractError("simplex words order different sets");
  return e;
}

bool Simplex::is_degenerate() const {
  for (std::size_t i = 0; i + 1 < words.size(); ++i)
    if (words[i] == words[i + 1]) return true;
  return false;
}

Simplex Simplex::face(int i) const {
  Simplex out = *this;
  out.words.erase(out.words.begin() + i);
  return out;
}

Simplex Simplex::relabeled(const Bijection& u) const {
  Simplex out;
  for (const auto& w : words) out.words.push_back(w.relabeled(u));
  return out;
}

std::string Simplex::encode() const {
  std::string s = "[";
  for (std::size_t i = 0; i < words.size(); ++i)
    s += (i ? "|" : "") + words[i].encode();
  return s + "]";
}

Simplex Simplex::parse(const std::string& s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ContractError("bad simplex: " + s);
  Simplex out;
  std::size_t pos = 1;
  while (pos < s.size() - 1) {
    std::size_t bar = s.find('|', pos);
    std::size_t end = bar == std::string::npos ? s.size() - 1 : bar;
    out.words.push_back(Perm::parse(s.substr(pos, end - pos)));
    pos = end + 1;
  }
  if (out.words.empty()) throw ContractError("bad simplex: " + s);
  out.inputs();  // validates
  return out;
}

BasisElement simplex_elem(const Simplex& x) {
  if (x.is_degenerate())
    throw ContractError("degenerate simplex has no basis element: " + x.encode());
  return {x.encode(), x.degree(), x.inputs()};
}

Simplex elem_simplex(const BasisElement& e) { return Simplex::parse(e.label); }

BasisElement comm_elem(const FiniteSet& e) { return {"c", 0, e}; }

namespace {
void add_simplex(LinE& lin, const Simplex& x, const Scalar& c) {
  if (x.is_degenerate()) return;
  lin.add(simplex_elem(x), c);
}
}  // namespace

// --- operad shell ------------------------------------------------------------

LinE Operad::compose(const LinE& x, const std::vector<LinE>& ys) const {
  LinE out(module.ring);
  std::vector<std::pair<BasisElement, Scalar>> pick;
  std::function<void(std::size_t, const BasisElement&, const Scalar&)> rec =
      [&](std::size_t i, const BasisElement& xb, const Scalar& c) {
        if (i == ys.size()) {
          std::vector<BasisElement> slots;
          for (auto& [b, s] : pick) slots.push_back(b);
          out += compose_basis(xb, slots).scaled(c);
          return;
        }
        for (const auto& [yb, yc] : ys[i].terms) {
          pick.push_back({yb, yc});
          rec(i + 1, xb, c * yc);
          pick.pop_back();
        }
      };
  for (const auto& [xb, xc] : x.terms) rec(0, xb, xc);
  return out;
}

namespace {
void check_composable(const BasisElement& x,
                      const std::vector<BasisElement>& ys) {
  if (x.inputs != canonical_set((int)ys.size()))
    throw ContractError("composition: arity of x must match slot count");
  FiniteSet seen;
  for (const auto& y : ys) seen = set_union_disjoint(seen, y.inputs);
}
}  // namespace

Operad commutative_operad(Ring ring, int arity_max) {
  Operad P;
  P.module = symseq::commutative_module(ring, arity_max);
  P.unit = comm_elem({1});
  P.compose_basis = [ring](const BasisElement& x,
                           const std::vector<BasisElement>& ys) {
    check_composable(x, ys);
    FiniteSet e;
    for (const auto& y : ys) e = set_union_disjoint(e, y.inputs);
    LinE out(ring);
    out.add(comm_elem(e), Scalar(ring, 1));
    return out;
  };
  return P;
}

namespace {
// replace entry i of kappa by the sequence ps[i-1]
Perm substitute(const Perm& kappa, const std::vector<Perm>& ps) {
  Perm out;
  for (int v : kappa.order)
    for (int w : ps[v - 1].order) out.order.push_back(w);
  return out;
}
}  // namespace

Operad associative_operad(Ring ring, int arity_max) {
  Operad P;
  SigmaModule m;
  m.ring = ring;
  m.name = "A";
  m.trunc.arity_max = arity_max;
  m.basis_fn = [](int arity) {
    std::vector<BasisElement> out;
    std::vector<int> v(canonical_set(arity));
    do {
      Perm w{v};
      out.push_back({w.encode(), 0, canonical_set(arity)});
    } while (std::next_permutation(v.begin(), v.end()));
    return out;
  };
  m.relabel_fn = [](const Bijection& u, const BasisElement& x) {
    Perm w = Perm::parse(x.label).relabeled(u);
    return symseq::SignedElement{{w.encode(), 0, w.inputs()}, 1};
  };
  m.diff_fn = [ring](const BasisElement&) { return LinE(ring); };
  P.module = m;
  P.unit = {"1", 0, {1}};
  P.compose_basis = [ring](const BasisElement& x,
                           const std::vector<BasisElement>& ys) {
    check_composable(x, ys);
    std::vector<Perm> ps;
    for (const auto& y : ys) ps.push_back(Perm::parse(y.label));
    Perm w = substitute(Perm::parse(x.label), ps);
    LinE out(ring);
    out.add({w.encode(), 0, w.inputs()}, Scalar(ring, 1));
    return out;
  };
  return P;
}

// --- Barratt-Eccles ----------------------------------------------------------

namespace {
std::function<symseq::SignedElement(const Bijection&, const BasisElement&)>
be_relabel() {
  return [](const Bijection& u, const BasisElement& x) {
    Simplex s = elem_simplex(x).relabeled(u);
    // the diagonal action of a bijection carries no sign
    return symseq::SignedElement{simplex_elem(s), 1};
  };
}

std::function<LinE(const BasisElement&)> be_diff(Ring ring) {
  return [ring](const BasisElement& x) {
    LinE out(ring);
    Simplex s = elem_simplex(x);
    if (s.degree() == 0) return out;
    for (int i = 0; i <= s.degree(); ++i)
      add_simplex(out, s.face(i), Scalar(ring, i % 2 == 0 ? 1 : -1));
    return out;
  };
}

// all nondegenerate simplices on {1..r}, extended degree by degree while
// keep(simplex) holds; keep must be monotone under dropping trailing words
std::vector<BasisElement> enumerate_simplices(
    int r, const std::function<bool(const Simplex&)>& keep) {
  std::vector<BasisElement> out;
  std::vector<Perm> all;
  std::vector<int> v(canonical_set(r));
  do {
    all.push_back(Perm{v});
  } while (std::next_permutation(v.begin(), v.end()));
  std::vector<Simplex> level;
  for (const auto& w : all) {
    Simplex s{{w}};
    if (keep(s)) level.push_back(s);
  }
  while (!level.empty()) {
    for (const auto& s : level) out.push_back(simplex_elem(s));
    std::vector<Simplex> next;
    for (const auto& s : level)
      for (const auto& w : all) {
        if (w == s.words.back()) continue;
        Simplex t = s;
        t.words.push_back(w);
        if (keep(t)) next.push_back(t);
      }
    level = std::move(next);
  }
  return out;
}

// the Eilenberg-Zilber composite: factor 0 is x, factor i is ys[i-1]
LinE ez_compose(Ring ring, const BasisElement& xe,
                const std::vector<BasisElement>& ys) {
  check_composable(xe, ys);
  Simplex x = elem_simplex(xe);
  std::vector<Simplex> ps;
  for (const auto& y : ys) ps.push_back(elem_simplex(y));
  std::vector<int> lens{x.degree()};
  for (const auto& p : ps) lens.push_back(p.degree());
  LinE out(ring);
  for (const auto& steps : multishuffles(lens)) {
    // sign: parity of pairs of steps taken in decreasing factor order
    long inv = 0;
    for (std::size_t t = 0; t < steps.size(); ++t)
      for (std::size_t t2 = t + 1; t2 < steps.size(); ++t2)
        if (steps[t] > steps[t2]) ++inv;
    std::vector<int> coord(lens.size(), 0);
    Simplex comp;
    auto vertex = [&]() {
      std::vector<Perm> slot_words;
      for (std::size_t i = 0; i < ps.size(); ++i)
        slot_words.push_back(ps[i].words[coord[i + 1]]);
      comp.words.push_back(substitute(x.words[coord[0]], slot_words));
    };
    vertex();
    for (int f : steps) {
      ++coord[f];
      vertex();
    }
    add_simplex(out, comp, Scalar(ring, inv % 2 == 0 ? 1 : -1));
  }
  return out;
}
}  // namespace

Operad barratt_eccles(Ring ring, int arity_max, int degree_max) {
  Operad P;
  SigmaModule m;
  m.ring = ring;
  m.name = "E";
  m.trunc.arity_max = arity_max;
  m.trunc.degree_max = degree_max;
  m.basis_fn = [degree_max](int arity) {
    return enumerate_simplices(
        arity, [&](const Simplex& s) { return s.degree() <= degree_max; });
  };
  m.relabel_fn = be_relabel();
  m.diff_fn = be_diff(ring);
  P.module = m;
  P.unit = {"[1]", 0, {1}};
  P.compose_basis = [ring](const BasisElement& x,
                           const std::vector<BasisElement>& ys) {
    return ez_compose(ring, x, ys);
  };
  return P;
}

LinE be_eps(Ring ring, const LinE& v) {
  LinE out(ring);
  for (const auto& [k, c] : v.terms)
    if (k.degree == 0) out.add(comm_elem(k.inputs), c);
  return out;
}

LinE be_iota(Ring ring, const LinE& v) {
  LinE out(ring);
  for (const auto& [k, c] : v.terms) {
    Simplex s{{Perm::increasing(k.inputs)}};
    out.add(simplex_elem(s), c);
  }
  return out;
}

// nu appends sigma at the final position, scaled by (-1)^(d+1): with the
// (-1)^i face signs this is the convention that makes delta nu + nu delta
// equal to id - iota eps on the nose (plain appending gives the negative)
LinE be_nu(Ring ring, const LinE& v) {
  LinE out(ring);
  for (const auto& [k, c] : v.terms) {
    Simplex s = elem_simplex(k);
    s.words.push_back(Perm::increasing(k.inputs));
    Scalar sgn(ring, (k.degree + 1) % 2 == 0 ? 1 : -1);
    add_simplex(out, s, c * sgn);
  }
  return out;
}

LinE be_nu(Ring ring, const LinE& v, const Perm& sigma) {
  LinE out(ring);
  for (const auto& [k, c] : v.terms) {
    if (sigma.inputs() != k.inputs)
      throw ContractError("nu: sigma does not order the input set");
    Simplex s = elem_simplex(k);
    s.words.push_back(sigma);
    Scalar sgn(ring, (k.degree + 1) % 2 == 0 ? 1 : -1);
    add_simplex(out, s, c * sgn);
  }
  return out;
}

// --- complete graph operad -----------------------------------------------------

int KGraph::weight_of(int e, int f) const {
  if (e > f) std::swap(e, f);
  auto it = weight.find({e, f});
  if (it == weight.end())
    throw ContractError("complete graph has no edge {" + std::to_string(e) +
                        "," + std::to_string(f) + "}");
  return it->second;
}

static std::string pair_key(int e, int f) {
  if (f <= 9) return std::to_string(e) + std::to_string(f);
  return std::to_string(e) + "." + std::to_string(f);
}

std::string KGraph::encode() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [ef, w] : weight) {
    if (!first) s += ",";
    first = false;
    s += pair_key(ef.first, ef.second) + ":" + std::to_string(w);
    s += sigma.before(ef.first, ef.second) ? '>' : '<';
  }
  s += "}sigma=(";
  for (std::size_t i = 0; i < sigma.order.size(); ++i)
    s += (i ? "," : "") + std::to_string(sigma.order[i]);
  return s + ")";
}

KGraph KGraph::parse(const std::string& s) {
  std::size_t close = s.find("}sigma=(");
  if (s.empty() || s.front() != '{' || close == std::string::npos ||
      s.back() != ')')
    throw ContractError("bad complete graph: " + s);
  KGraph out;
  std::string sig = s.substr(close + 8, s.size() - close - 9);
  for (std::size_t pos = 0; pos < sig.size();) {
    std::size_t comma = sig.find(',', pos);
    std::size_t end = comma == std::string::npos ? sig.size() : comma;
    out.sigma.order.push_back(std::stoi(sig.substr(pos, end - pos)));
    pos = end + 1;
  }
  FiniteSet e = out.sigma.inputs();
  std::string body = s.substr(1, close - 1);
  std::vector<std::pair<std::pair<int, int>, char>> seen;
  for (std::size_t pos = 0; pos < body.size();) {
    std::size_t comma = body.find(',', pos);
    std::size_t end = comma == std::string::npos ? body.size() : comma;
    std::string tok = body.substr(pos, end - pos);
    std::size_t colon = tok.find(':');
    if (colon == std::string::npos || tok.size() < colon + 3)
      throw ContractError("bad complete graph edge: " + tok);
    std::string key = tok.substr(0, colon);
    int a, b;
    std::size_t dot = key.find('.');
    if (dot != std::string::npos) {
      a = std::stoi(key.substr(0, dot));
      b = std::stoi(key.substr(dot + 1));
    } else if (key.size() == 2 && isdigit((unsigned char)key[0]) &&
               isdigit((unsigned char)key[1])) {
      a = key[0] - '0';
      b = key[1] - '0';
    } else {
      throw ContractError("bad complete graph edge key: " + key);
    }
    char dir = tok.back();
    int w = std::stoi(tok.substr(colon + 1, tok.size() - colon - 2));
    if (a >= b || w < 0 || (dir != '>' && dir != '<'))
      throw ContractError("bad complete graph edge: " + tok);
    out.weight[{a, b}] = w;
    seen.push_back({{a, b}, dir});
    pos = end + 1;
  }
  // every pair of sigma's set exactly once, orientations coherent with sigma
  std::size_t expected = e.size() * (e.size() - 1) / 2;
  if (out.weight.size() != expected || seen.size() != expected)
    throw ContractError("complete graph edges do not match the input set");
  for (const auto& [ef, dir] : seen) {
    if (!std::binary_search(e.begin(), e.end(), ef.first) ||
        !std::binary_search(e.begin(), e.end(), ef.second))
      throw ContractError("edge outside the input set");
    if ((dir == '>') != out.sigma.before(ef.first, ef.second))
      throw ContractError("edge orientation incoherent with sigma: " +
                          pair_key(ef.first, ef.second));
  }
  return out;
}

bool kgraph_leq(const KGraph& a, const KGraph& b) {
  FiniteSet e = a.inputs();
  if (e != b.inputs())
    throw ContractError("complete graph comparison: input sets differ");
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      int mu = a.weight_of(e[i], e[j]), nu = b.weight_of(e[i], e[j]);
      if (mu < nu) continue;
      if (mu == nu &&
          a.sigma.before(e[i], e[j]) == b.sigma.before(e[i], e[j]))
        continue;
      return false;
    }
  return true;
}

KGraph kgraph_compose(const KGraph& kappa, const std::vector<KGraph>& pis) {
  int r = (int)pis.size();
  if (kappa.inputs() != canonical_set(r))
    throw ContractError("complete graph composition: arity mismatch");
  std::vector<FiniteSet> blocks;
  FiniteSet e;
  for (const auto& p : pis) {
    blocks.push_back(p.inputs());
    e = set_union_disjoint(e, blocks.back());
  }
  KGraph out;
  // global ordering: substitute each vertex of kappa's ordering by its block
  for (int v : kappa.sigma.order)
    for (int w : pis[v - 1].sigma.order) out.sigma.order.push_back(w);
  auto block_of = [&](int x) {
    for (int i = 0; i < r; ++i)
      if (std::binary_search(blocks[i].begin(), blocks[i].end(), x)) return i;
    throw ContractError("vertex outside all blocks");
  };
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      int bi = block_of(e[i]), bj = block_of(e[j]);
      int w = bi == bj ? pis[bi].weight_of(e[i], e[j])
                       : kappa.weight_of(bi + 1, bj + 1);
      out.weight[{e[i], e[j]}] = w;
    }
  return out;
}

KGraph kgraph_restrict(const KGraph& k, const FiniteSet& block) {
  KGraph out;
  out.sigma = k.sigma.restricted(block);
  if ((int)out.sigma.order.size() != (int)block.size())
    throw ContractError("restriction block is not a subset");
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = i + 1; j < block.size(); ++j)
      out.weight[{block[i], block[j]}] = k.weight_of(block[i], block[j]);
  return out;
}

// --- cells ---------------------------------------------------------------------

int variations(const Simplex& x, int e, int f) {
  int count = 0;
  for (std::size_t i = 0; i + 1 < x.words.size(); ++i)
    if (x.words[i].before(e, f) != x.words[i + 1].before(e, f)) ++count;
  return count;
}

bool in_cell(const Simplex& x, const KGraph& kappa) {
  FiniteSet e = x.inputs();
  if (e != kappa.inputs())
    throw ContractError("cell membership: input sets differ");
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      int v = variations(x, e[i], e[j]);
      int mu = kappa.weight_of(e[i], e[j]);
      if (v > mu) return false;
      if (v == mu && x.words.back().before(e[i], e[j]) !=
                         kappa.sigma.before(e[i], e[j]))
        return false;
    }
  return true;
}

KGraph min_cell(const Simplex& x) {
  FiniteSet e = x.inputs();
  KGraph out;
  out.sigma = x.words.back();
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j)
      out.weight[{e[i], e[j]}] = variations(x, e[i], e[j]);
  return out;
}

int filtration_level(const Simplex& x) {
  FiniteSet e = x.inputs();
  int max_v = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j)
      max_v = std::max(max_v, variations(x, e[i], e[j]));
  return 1 + max_v;
}

SigmaModule en_suboperad_module(Ring ring, int n, int arity_max) {
  SigmaModule m;
  m.ring = ring;
  m.name = "E_" + std::to_string(n);
  m.trunc.arity_max = arity_max;
  m.basis_fn = [n](int arity) {
    return enumerate_simplices(
        arity, [&](const Simplex& s) { return filtration_level(s) <= n; });
  };
  m.relabel_fn = be_relabel();
  m.diff_fn = be_diff(ring);
  return m;
}

}  // namespace enbar::operads
