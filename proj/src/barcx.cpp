#include "enbar/barcx.hpp"

#include <algorithm>
#include <numeric>

namespace enbar::barcx {

using operads::comm_elem;
using operads::kgraph_compose;
using operads::kgraph_leq;
using operads::kgraph_restrict;
using operads::Perm;
using symseq::canonical_set;
using symseq::encode_set;
using symseq::is_valid_set;
using symseq::koszul_reorder_sign;
using symseq::multishuffles;
using symseq::set_partitions;
using symseq::set_union_disjoint;
using symseq::Truncation;
using symseq::two_splits;

// --- level words -------------------------------------------------------------

LevelWord LevelWord::leaf_word(FiniteSet e) {
  if (!is_valid_set(e) || e.empty())
    throw ContractError("level word leaf needs a nonempty set");
  LevelWord w;
  w.leaf = std::move(e);
  return w;
}

LevelWord LevelWord::node(int level, std::vector<LevelWord> factors) {
  if (level < 1) throw ContractError("level word node needs level >= 1");
  if (factors.empty()) throw ContractError("level word node needs factors");
  FiniteSet seen;
  for (const auto& f : factors) {
    if (f.level != level - 1)
      throw ContractError("level word factor level mismatch");
    seen = set_union_disjoint(seen, f.inputs());  // throws on overlap
  }
  LevelWord w;
  w.level = level;
  w.factors = std::move(factors);
  return w;
}

int LevelWord::degree() const {
  if (level == 0) return 0;
  int d = (int)factors.size();
  for (const auto& f : factors) d += f.degree();
  return d;
}

FiniteSet LevelWord::inputs() const {
  if (level == 0) return leaf;
  FiniteSet e;
  for (const auto& f : factors) e = set_union_disjoint(e, f.inputs());
  return e;
}

bool LevelWord::pure() const {
  if (level == 0) return leaf.size() == 1;
  return std::all_of(factors.begin(), factors.end(),
                     [](const LevelWord& f) { return f.pure(); });
}

std::vector<int> LevelWord::planar_leaves() const {
  if (level == 0) return leaf;
  std::vector<int> out;
  for (const auto& f : factors) {
    auto sub = f.planar_leaves();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

std::string LevelWord::encode() const {
  if (level == 0) return encode_set(leaf);
  std::string s;
  for (const auto& f : factors) s += "(" + f.encode() + ")";
  return s;
}

namespace {
LevelWord parse_span(const std::string& s, std::size_t begin, std::size_t end) {
  if (begin >= end) throw ContractError("level word parse: empty span");
  if (s[begin] != '(') {
    // leaf: digits, or comma-separated numbers when elements pass 9
    FiniteSet e;
    std::string span = s.substr(begin, end - begin);
    if (span.find(',') != std::string::npos) {
      std::size_t pos = 0;
      while (pos < span.size()) {
        std::size_t next = span.find(',', pos);
        if (next == std::string::npos) next = span.size();
        e.push_back(std::stoi(span.substr(pos, next - pos)));
        pos = next + 1;
      }
    } else {
      for (char ch : span) {
        if (ch < '0' || ch > '9')
          throw ContractError("level word parse: bad leaf " + span);
        e.push_back(ch - '0');
      }
    }
    std::sort(e.begin(), e.end());
    if (!is_valid_set(e))
      throw ContractError("level word parse: bad leaf set " + span);
    return LevelWord::leaf_word(e);
  }
  std::vector<LevelWord> factors;
  std::size_t pos = begin;
  while (pos < end) {
    if (s[pos] != '(')
      throw ContractError("level word parse: expected ( in " + s);
    int depth = 0;
    std::size_t close = pos;
    for (; close < end; ++close) {
      if (s[close] == '(') ++depth;
      if (s[close] == ')' && --depth == 0) break;
    }
    if (close == end) throw ContractError("level word parse: unbalanced " + s);
    factors.push_back(parse_span(s, pos + 1, close));
    pos = close + 1;
  }
  int level = factors.front().level + 1;  // read before the move
  return LevelWord::node(level, std::move(factors));
}
}  // namespace

LevelWord LevelWord::parse(const std::string& s) {
  return parse_span(s, 0, s.size());
}

bool LevelWord::operator==(const LevelWord& o) const {
  return level == o.level && leaf == o.leaf && factors == o.factors;
}

bool LevelWord::operator<(const LevelWord& o) const {
  if (level != o.level) return level < o.level;
  if (leaf != o.leaf) return leaf < o.leaf;
  return std::lexicographical_compare(factors.begin(), factors.end(),
                                      o.factors.begin(), o.factors.end());
}

BasisElement word_elem(const LevelWord& w) {
  return {w.encode(), w.degree(), w.inputs()};
}

LevelWord elem_word(const BasisElement& e) { return LevelWord::parse(e.label); }

LevelWord relabel_word(const Bijection& u, const LevelWord& w) {
  if (w.level == 0) {
    FiniteSet e;
    for (int x : w.leaf) e.push_back(u.apply(x));
    std::sort(e.begin(), e.end());
    return LevelWord::leaf_word(e);
  }
  std::vector<LevelWord> fs;
  for (const auto& f : w.factors) fs.push_back(relabel_word(u, f));
  return LevelWord::node(w.level, std::move(fs));
}

// --- enumeration and the generating collection ------------------------------

std::vector<LevelWord> enumerate_words(int n, const FiniteSet& e) {
  if (e.empty()) return {};
  if (n == 0) {
    if (e.size() == 1) return {LevelWord::leaf_word(e)};
    return {};
  }
  std::vector<LevelWord> out;
  for (int k = 1; k <= (int)e.size(); ++k) {
    for (const auto& blocks : set_partitions(e, k)) {
      std::vector<int> order(k);
      std::iota(order.begin(), order.end(), 0);
      do {
        std::vector<std::vector<LevelWord>> choices;
        bool dead = false;
        for (int idx : order) {
          choices.push_back(enumerate_words(n - 1, blocks[idx]));
          if (choices.back().empty()) dead = true;
        }
        if (dead) continue;
        std::vector<LevelWord> pick(k);
        std::function<void(int)> rec = [&](int i) {
          if (i == k) {
            out.push_back(LevelWord::node(n, pick));
            return;
          }
          for (const auto& w : choices[i]) {
            pick[i] = w;
            rec(i + 1);
          }
        };
        rec(0);
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }
  return out;
}

namespace {
std::vector<LevelWord> gen_interval(int n, int a, int b);

// sequences of level-(n-1) generator words covering the interval [a,b]
std::vector<std::vector<LevelWord>> gen_sequences(int n, int a, int b) {
  std::vector<std::vector<LevelWord>> out;
  for (int c = a; c <= b; ++c) {
    for (const auto& first : gen_interval(n - 1, a, c)) {
      if (c == b) {
        out.push_back({first});
        continue;
      }
      for (const auto& tail : gen_sequences(n, c + 1, b)) {
        std::vector<LevelWord> seq{first};
        seq.insert(seq.end(), tail.begin(), tail.end());
        out.push_back(std::move(seq));
      }
    }
  }
  return out;
}

std::vector<LevelWord> gen_interval(int n, int a, int b) {
  if (n == 0) {
    if (a == b) return {LevelWord::leaf_word({a})};
    return {};
  }
  std::vector<LevelWord> out;
  for (auto& seq : gen_sequences(n, a, b))
    out.push_back(LevelWord::node(n, std::move(seq)));
  return out;
}
}  // namespace

std::vector<LevelWord> generator_words(int n, int r) {
  if (r < 1) return {};
  return gen_interval(n, 1, r);
}

SigmaModule build_Tn(Ring ring, int n, int arity_max) {
  if (n < 0) throw ContractError("build_Tn: negative level");
  SigmaModule m;
  m.ring = ring;
  m.name = "T^" + std::to_string(n);
  m.trunc.arity_max = arity_max;
  m.basis_fn = [n](int arity) {
    std::vector<BasisElement> out;
    for (const auto& w : enumerate_words(n, canonical_set(arity)))
      out.push_back(word_elem(w));
    return out;
  };
  m.relabel_fn = [](const Bijection& u, const BasisElement& x) {
    // leaf transport only: factor order is structural, never reordered
    return SignedElement{word_elem(relabel_word(u, elem_word(x))), 1};
  };
  m.diff_fn = [ring](const BasisElement&) { return LinT(ring); };
  return m;
}

namespace {
LevelWord canonical_shape(const LevelWord& w, int& next) {
  if (w.level == 0) return LevelWord::leaf_word({next++});
  std::vector<LevelWord> fs;
  for (const auto& f : w.factors) fs.push_back(canonical_shape(f, next));
  return LevelWord::node(w.level, std::move(fs));
}
}  // namespace

Canonical canonicalize(const LevelWord& w) {
  if (!w.pure()) throw ContractError("canonicalize needs a pure word");
  std::vector<int> leaves = w.planar_leaves();
  int next = 1;
  Canonical c;
  c.gen = canonical_shape(w, next);
  c.u = Bijection::from_values(leaves);
  c.sign = 1;
  return c;
}

// --- shuffle product and deconcatenation -------------------------------------

WordSum shuffle_words(Ring ring, const LevelWord& x, const LevelWord& y) {
  if (x.level != y.level)
    throw ContractError("shuffle of words of different levels");
  WordSum out(ring);
  if (x.level == 0) {
    out.add_int(LevelWord::leaf_word(set_union_disjoint(x.leaf, y.leaf)), 1);
    return out;
  }
  int r = (int)x.factors.size(), s = (int)y.factors.size();
  std::vector<int> degs;  // suspended factor degrees, x factors then y factors
  for (const auto& f : x.factors) degs.push_back(f.degree() + 1);
  for (const auto& f : y.factors) degs.push_back(f.degree() + 1);
  for (const auto& step : multishuffles({r, s})) {
    std::vector<LevelWord> merged;
    std::vector<int> new_pos(r + s);
    int xi = 0, yi = 0;
    for (int pos = 0; pos < r + s; ++pos) {
      if (step[pos] == 0) {
        new_pos[xi] = pos;
        merged.push_back(x.factors[xi++]);
      } else {
        new_pos[r + yi] = pos;
        merged.push_back(y.factors[yi++]);
      }
    }
    out.add_int(LevelWord::node(x.level, std::move(merged)),
                koszul_reorder_sign(degs, new_pos));
  }
  return out;
}

LinT shuffle_product(Ring ring, const LinT& x, const LinT& y) {
  LinT out(ring);
  for (const auto& [xe, xc] : x.terms) {
    LevelWord xw = elem_word(xe);
    for (const auto& [ye, yc] : y.terms) {
      WordSum ws = shuffle_words(ring, xw, elem_word(ye));
      for (const auto& [w, c] : ws.terms) out.add(word_elem(w), c * xc * yc);
    }
  }
  return out;
}

std::vector<std::pair<LevelWord, LevelWord>> deconcatenate(const LevelWord& w) {
  std::vector<std::pair<LevelWord, LevelWord>> out;
  if (w.level == 0) return out;
  int m = (int)w.factors.size();
  for (int i = 1; i < m; ++i) {
    std::vector<LevelWord> left(w.factors.begin(), w.factors.begin() + i);
    std::vector<LevelWord> right(w.factors.begin() + i, w.factors.end());
    out.emplace_back(LevelWord::node(w.level, std::move(left)),
                     LevelWord::node(w.level, std::move(right)));
  }
  return out;
}

// --- bar differential --------------------------------------------------------

WordSum bar_differential(Ring ring, const LevelWord& t) {
  WordSum out(ring);
  if (t.level == 0) return out;  // commutative factors carry no differential
  const auto& F = t.factors;
  int m = (int)F.size();
  auto with_replaced = [&](int i, int span, const LevelWord& w) {
    std::vector<LevelWord> fs(F.begin(), F.begin() + i);
    fs.push_back(w);
    fs.insert(fs.end(), F.begin() + i + span, F.end());
    return LevelWord::node(t.level, std::move(fs));
  };
  int fsum = 0;  // running sum of suspended factor degrees
  for (int i = 0; i + 1 < m; ++i) {
    fsum += F[i].degree() + 1;
    WordSum prod = shuffle_words(ring, F[i], F[i + 1]);
    for (const auto& [w, c] : prod.terms)
      out.add(with_replaced(i, 2, w), fsum % 2 == 0 ? c : -c);
  }
  int prefix = 0;
  for (int i = 0; i < m; ++i) {
    WordSum di = bar_differential(ring, F[i]);
    for (const auto& [w, c] : di.terms)
      out.add(with_replaced(i, 1, w), prefix % 2 == 0 ? -c : c);
    prefix += F[i].degree() + 1;
  }
  return out;
}

// --- the commutative twisting homomorphism -----------------------------------

namespace {
// a word with commutative leaf factors, as a composite of T^n o C
SignedElement tree_composite(const CompositionModule& mod, const LevelWord& t) {
  int next = 1;
  LevelWord pure = canonical_shape(t, next);
  std::vector<BasisElement> args;
  std::function<void(const LevelWord&)> collect = [&](const LevelWord& w) {
    if (w.level == 0) {
      args.push_back(comm_elem(w.leaf));
      return;
    }
    for (const auto& f : w.factors) collect(f);
  };
  collect(t);
  return mod.make(word_elem(pure), args);
}
}  // namespace

TwistingHom build_gamma(Ring ring, int n, int arity_max) {
  if (n < 1) throw ContractError("build_gamma: level must be >= 1");
  TwistingHom g;
  g.ring = ring;
  g.level = n;
  g.target = operads::commutative_operad(ring, INT_MAX);
  g.tn = build_Tn(ring, n, arity_max);
  g.mod = symseq::composition_module(g.tn, g.target.module);
  for (int r = 1; r <= arity_max; ++r) {
    for (const auto& gen : generator_words(n, r)) {
      WordSum d = bar_differential(ring, gen);
      LinT val(ring);
      for (const auto& [t, c] : d.terms) {
        SignedElement se = tree_composite(g.mod, t);
        if (se.sign == 0) continue;
        val.add(se.elem, se.sign > 0 ? c : -c);
      }
      g.table.emplace(gen.encode(), std::move(val));
    }
  }
  return g;
}

LinT apply_twist(const TwistingHom& a, const BasisElement& composite) {
  auto [x, ps] = a.mod.split(composite);
  int r = (int)ps.size();
  Canonical can = canonicalize(elem_word(x));
  auto it = a.table.find(can.gen.encode());
  if (it == a.table.end())
    throw ContractError("twisting table has no entry for " +
                        can.gen.encode());
  // equivariant extension to the arbitrary word, then the right R-action
  LinT val = a.mod.module.relabel(can.u, it->second);
  LinT out(a.ring);
  for (const auto& [zel, zc] : val.terms) {
    auto [zeta, cs] = a.mod.split(zel);
    int s = (int)cs.size();
    // Koszul sign of regrouping (c_1..c_s, p_1..p_r) into
    // (c_1, p_{b_1}, c_2, p_{b_2}, ...), b_j the slot block of c_j
    std::vector<int> degs;
    for (const auto& c : cs) degs.push_back(c.degree);
    for (const auto& p : ps) degs.push_back(p.degree);
    std::vector<int> new_pos(s + r);
    int pos = 0;
    for (int j = 0; j < s; ++j) {
      new_pos[j] = pos++;
      for (int i : cs[j].inputs) new_pos[s + (i - 1)] = pos++;
    }
    int sign = koszul_reorder_sign(degs, new_pos);
    // compose each block through the target operad
    std::vector<LinT> parts;
    bool dropped = false;
    for (int j = 0; j < s && !dropped; ++j) {
      const FiniteSet& b = cs[j].inputs;
      Bijection to_slots{b, canonical_set((int)b.size())};
      SignedElement sc = a.target.module.relabel_one(to_slots, cs[j]);
      if (sc.sign == 0) {
        dropped = true;
        break;
      }
      sign *= sc.sign;
      LinT head(a.ring);
      head.add_int(sc.elem, 1);
      std::vector<LinT> args;
      for (int i : b) {
        LinT arg(a.ring);
        arg.add_int(ps[i - 1], 1);
        args.push_back(std::move(arg));
      }
      parts.push_back(a.target.compose(head, args));
    }
    if (dropped) continue;
    // multilinear expansion; all terms of one part share a degree, so the
    // expansion itself carries no further sign
    std::vector<BasisElement> pick(s);
    Scalar base = zc * Scalar(a.ring, sign);
    std::function<void(int, const Scalar&)> rec = [&](int j, const Scalar& c) {
      if (j == s) {
        SignedElement made = a.mod.make(zeta, pick);
        if (made.sign == 0) return;
        out.add(made.elem, made.sign > 0 ? c : -c);
        return;
      }
      for (const auto& [q, qc] : parts[j].terms) {
        pick[j] = q;
        rec(j + 1, c * qc);
      }
    };
    rec(0, base);
  }
  return out;
}

LinT apply_twist(const TwistingHom& a, const LinT& z) {
  LinT out(a.ring);
  for (const auto& [e, c] : z.terms) out += apply_twist(a, e).scaled(c);
  return out;
}

LinT twisted_diff(const TwistingHom& a, const LinT& z) {
  LinT out = a.mod.module.diff(z);
  out += apply_twist(a, z);
  return out;
}

// --- suspension --------------------------------------------------------------

LevelWord suspension_word(const LevelWord& w) {
  return LevelWord::node(w.level + 1, {w});
}

LinT suspension_on_composites(const CompositionModule& from,
                              const CompositionModule& to, const LinT& z) {
  LinT out(z.ring);
  for (const auto& [e, c] : z.terms) {
    auto [x, ys] = from.split(e);
    SignedElement made =
        to.make(word_elem(suspension_word(elem_word(x))), ys);
    if (made.sign == 0) continue;
    out.add(made.elem, made.sign > 0 ? c : -c);
  }
  return out;
}

// --- complete-graph cells ----------------------------------------------------

namespace {
void fill_min_weights(const LevelWord& w,
                      std::map<std::pair<int, int>, int>& weight) {
  if (w.level == 0) return;
  for (std::size_t i = 0; i < w.factors.size(); ++i) {
    for (std::size_t j = i + 1; j < w.factors.size(); ++j) {
      for (int e : w.factors[i].inputs())
        for (int f : w.factors[j].inputs())
          weight[{std::min(e, f), std::max(e, f)}] = w.level - 1;
    }
    fill_min_weights(w.factors[i], weight);
  }
}
}  // namespace

KGraph word_min_cell(const LevelWord& w) {
  if (!w.pure()) throw ContractError("word_min_cell needs a pure word");
  KGraph k;
  k.sigma = Perm{w.planar_leaves()};
  fill_min_weights(w, k.weight);
  return k;
}

bool word_in_cell(const LevelWord& w, const KGraph& kappa) {
  if (!w.pure()) throw ContractError("word_in_cell needs a pure word");
  if (w.level == 0) return true;
  // block index of every leaf at this level
  std::map<int, int> block_of;
  for (std::size_t i = 0; i < w.factors.size(); ++i)
    for (int e : w.factors[i].inputs()) block_of[e] = (int)i;
  FiniteSet e = w.inputs();
  for (std::size_t a = 0; a < e.size(); ++a) {
    for (std::size_t b = a + 1; b < e.size(); ++b) {
      int i = block_of[e[a]], j = block_of[e[b]];
      if (i == j) continue;  // handled by the factor recursion
      int mu = kappa.weight_of(e[a], e[b]);
      if (mu < w.level - 1) return false;
      if (mu == w.level - 1 && (i < j) != kappa.sigma.before(e[a], e[b]))
        return false;
    }
  }
  for (const auto& f : w.factors)
    if (!word_in_cell(f, kgraph_restrict(kappa, f.inputs()))) return false;
  return true;
}

bool composite_in_cell_over_c(const CompositionModule& mod,
                              const BasisElement& composite,
                              const KGraph& kappa) {
  auto [x, cs] = mod.split(composite);
  std::vector<KGraph> pis;
  for (const auto& c : cs) {
    KGraph pi;
    pi.sigma = kappa.sigma.restricted(c.inputs);
    for (std::size_t a = 0; a < c.inputs.size(); ++a)
      for (std::size_t b = a + 1; b < c.inputs.size(); ++b)
        pi.weight[{c.inputs[a], c.inputs[b]}] = 0;
    pis.push_back(std::move(pi));
  }
  return kgraph_leq(kgraph_compose(word_min_cell(elem_word(x)), pis), kappa);
}

// --- Harrison quotients --------------------------------------------------------

CommAlgebra unit_algebra(Ring ring) {
  CommAlgebra a;
  a.module = symseq::unit_module(ring);
  a.product = [ring](const BasisElement&, const BasisElement&) {
    return LinT(ring);
  };
  return a;
}

CommAlgebra commutative_algebra(Ring ring, int arity_max) {
  CommAlgebra a;
  a.module = symseq::commutative_module(ring, arity_max);
  a.product = [ring](const BasisElement& x, const BasisElement& y) {
    LinT out(ring);
    out.add_int(comm_elem(set_union_disjoint(x.inputs, y.inputs)), 1);
    return out;
  };
  return a;
}

namespace {
using BarWord = std::vector<BasisElement>;
using LinB = Lin<BarWord>;

int bar_degree(const BarWord& w) {
  int d = 0;
  for (const auto& a : w) d += a.degree + 1;
  return d;
}

std::vector<BarWord> bar_words(const CommAlgebra& A, const FiniteSet& e) {
  std::vector<BarWord> out;
  for (int k = 1; k <= (int)e.size(); ++k) {
    for (const auto& blocks : set_partitions(e, k)) {
      std::vector<int> order(k);
      std::iota(order.begin(), order.end(), 0);
      do {
        std::vector<std::vector<BasisElement>> choices;
        bool dead = false;
        for (int idx : order) {
          const auto& b = blocks[idx];
          if (!A.module.trunc.admits_arity((int)b.size())) {
            dead = true;
            break;
          }
          Bijection bb{canonical_set((int)b.size()),
                       std::vector<int>(b.begin(), b.end())};
          std::vector<BasisElement> ch;
          for (const auto& y : A.module.at((int)b.size()))
            ch.push_back(A.module.relabel_one(bb, y).elem);
          choices.push_back(std::move(ch));
          if (choices.back().empty()) dead = true;
        }
        if (dead) continue;
        BarWord pick(k);
        std::function<void(int)> rec = [&](int i) {
          if (i == k) {
            out.push_back(pick);
            return;
          }
          for (const auto& y : choices[i]) {
            pick[i] = y;
            rec(i + 1);
          }
        };
        rec(0);
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

LinB bar_word_diff(const CommAlgebra& A, const BarWord& w) {
  Ring ring = A.module.ring;
  LinB out(ring);
  int m = (int)w.size();
  int fsum = 0;
  for (int i = 0; i + 1 < m; ++i) {
    fsum += w[i].degree + 1;
    LinT prod = A.product(w[i], w[i + 1]);
    for (const auto& [y, c] : prod.terms) {
      BarWord nw(w.begin(), w.begin() + i);
      nw.push_back(y);
      nw.insert(nw.end(), w.begin() + i + 2, w.end());
      out.add(nw, fsum % 2 == 0 ? c : -c);
    }
  }
  int prefix = 0;
  for (int i = 0; i < m; ++i) {
    LinT di = A.module.diff_fn(w[i]);
    for (const auto& [y, c] : di.terms) {
      BarWord nw = w;
      nw[i] = y;
      out.add(nw, prefix % 2 == 0 ? -c : c);
    }
    prefix += w[i].degree + 1;
  }
  return out;
}

LinB bar_word_shuffle(Ring ring, const BarWord& x, const BarWord& y) {
  LinB out(ring);
  int r = (int)x.size(), s = (int)y.size();
  std::vector<int> degs;
  for (const auto& a : x) degs.push_back(a.degree + 1);
  for (const auto& a : y) degs.push_back(a.degree + 1);
  for (const auto& step : multishuffles({r, s})) {
    BarWord merged;
    std::vector<int> new_pos(r + s);
    int xi = 0, yi = 0;
    for (int pos = 0; pos < r + s; ++pos) {
      if (step[pos] == 0) {
        new_pos[xi] = pos;
        merged.push_back(x[xi++]);
      } else {
        new_pos[r + yi] = pos;
        merged.push_back(y[yi++]);
      }
    }
    out.add_int(merged, koszul_reorder_sign(degs, new_pos));
  }
  return out;
}
}  // namespace

HarrisonSummary harrison_complex(const CommAlgebra& A, const FiniteSet& e) {
  Ring ring = A.module.ring;
  std::vector<BarWord> words = bar_words(A, e);
  std::map<int, std::map<BarWord, int>> index;  // degree -> word -> column
  HarrisonSummary out;
  for (const auto& w : words) {
    int d = bar_degree(w);
    int next = (int)index[d].size();
    index[d].emplace(w, next);
    out.ambient_dim[d] += 1;
  }
  // shuffle-image generators per degree
  std::map<int, std::vector<LinB>> gens;
  for (const auto& [u, v] : two_splits(e)) {
    std::vector<BarWord> left = bar_words(A, u), right = bar_words(A, v);
    for (const auto& x : left)
      for (const auto& y : right)
        gens[bar_degree(x) + bar_degree(y)].push_back(
            bar_word_shuffle(ring, x, y));
  }
  auto to_matrix = [&](int degree, const std::vector<LinB>& columns) {
    int rows =
        index.count(degree) ? (int)index[degree].size() : 0;
    exactlin::SparseMatrix m(ring, rows, (int)columns.size());
    for (int c = 0; c < (int)columns.size(); ++c)
      for (const auto& [w, coef] : columns[c].terms)
        m.set(index[degree].at(w), c, coef);
    return m;
  };
  for (auto& [d, cols] : gens) {
    out.shuffle_rank[d] = exactlin::rank(to_matrix(d, cols));
    // image closed under the differential: appending the boundaries of the
    // degree-d generators to the degree-(d-1) image must not raise its rank
    std::vector<LinB> below =
        gens.count(d - 1) ? gens[d - 1] : std::vector<LinB>{};
    int base = (int)below.size();
    for (const auto& g : cols) {
      LinB dg(ring);
      for (const auto& [w, c] : g.terms) dg += bar_word_diff(A, w).scaled(c);
      if (!dg.is_zero()) below.push_back(dg);
    }
    if ((int)below.size() > base) {
      int r0 = base == 0
                   ? 0
                   : exactlin::rank(to_matrix(
                         d - 1, std::vector<LinB>(below.begin(),
                                                  below.begin() + base)));
      if (exactlin::rank(to_matrix(d - 1, below)) != r0)
        out.differential_descends = false;
    }
  }
  for (const auto& [d, dim] : out.ambient_dim) {
    int rank = out.shuffle_rank.count(d) ? out.shuffle_rank[d] : 0;
    out.quotient_dim[d] = dim - rank;
  }
  return out;
}

}  // namespace enbar::barcx
