#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "enbar/barcx.hpp"

using namespace enbar;
using namespace enbar::barcx;
using exactlin::Ring;
using exactlin::Scalar;
using symseq::Bijection;
using symseq::canonical_set;
using symseq::FiniteSet;

namespace {

const Ring Z = Ring::z();

LevelWord W(const std::string& s) { return LevelWord::parse(s); }

LinT one(const BasisElement& e) {
  LinT v(Z);
  v.add_int(e, 1);
  return v;
}

long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// counting oracle: number of level-n words on an r-set, via sequences of
// level-(n-1) words on the blocks of an ordered partition
long count_words(int n, int r) {
  if (n == 0) return r == 1 ? 1 : 0;
  if (r == 0) return 0;
  std::function<long(int)> seq = [&](int m) -> long {
    if (m == 0) return 1;
    long total = 0;
    for (int s = 1; s <= m; ++s)
      total += binom(m, s) * count_words(n - 1, s) * seq(m - s);
    return total;
  };
  return seq(r);
}

// counting oracle: generators = compositions with generator choices per part
long count_generators(int n, int r) {
  if (n == 0) return r == 1 ? 1 : 0;
  if (r == 0) return 0;
  std::function<long(int)> seq = [&](int m) -> long {
    if (m == 0) return 1;
    long total = 0;
    for (int s = 1; s <= m; ++s)
      total += count_generators(n - 1, s) * seq(m - s);
    return total;
  };
  return seq(r);
}

WordSum lin_bar(const WordSum& z) {
  WordSum out(Z);
  for (const auto& [w, c] : z.terms) out += bar_differential(Z, w).scaled(c);
  return out;
}

WordSum lin_shuffle(const WordSum& x, const WordSum& y) {
  WordSum out(Z);
  for (const auto& [xw, xc] : x.terms)
    for (const auto& [yw, yc] : y.terms)
      out += shuffle_words(Z, xw, yw).scaled(xc * yc);
  return out;
}

WordSum one_word(const LevelWord& w) {
  WordSum out(Z);
  out.add_int(w, 1);
  return out;
}

// the generator as a composite with singleton commutative factors attached
BasisElement unit_composite(const TwistingHom& th, const LevelWord& gen) {
  std::vector<BasisElement> args;
  for (int i : gen.inputs()) args.push_back(operads::comm_elem({i}));
  SignedElement se = th.mod.make(word_elem(gen), args);
  REQUIRE(se.sign == 1);
  return se.elem;
}

std::vector<Bijection> all_perms(int r) {
  std::vector<int> v(canonical_set(r));
  std::vector<Bijection> out;
  do {
    out.push_back(Bijection::from_values(v));
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

// every complete graph on {1..r} with pair weights <= wmax
std::vector<operads::KGraph> all_kgraphs(int r, int wmax, bool id_only) {
  std::vector<std::pair<int, int>> pairs;
  for (int e = 1; e <= r; ++e)
    for (int f = e + 1; f <= r; ++f) pairs.push_back({e, f});
  std::vector<operads::KGraph> out;
  for (const auto& u : all_perms(r)) {
    if (id_only && u.image != canonical_set(r)) continue;
    std::vector<int> w(pairs.size(), 0);
    while (true) {
      operads::KGraph k;
      k.sigma = operads::Perm{u.image};
      for (std::size_t i = 0; i < pairs.size(); ++i) k.weight[pairs[i]] = w[i];
      out.push_back(k);
      std::size_t i = 0;
      while (i < pairs.size() && w[i] == wmax) w[i++] = 0;
      if (i == pairs.size()) break;
      ++w[i];
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("barcx") {

TEST_CASE("level words: encode, parse, degree, inputs") {
  LevelWord w = W("((1)(2))((3))");
  CHECK(w.level == 2);
  CHECK(w.factors.size() == 2);
  CHECK(w.degree() == 5);  // 2 factors + degrees 2 and 1
  CHECK(w.inputs() == FiniteSet{1, 2, 3});
  CHECK(w.encode() == "((1)(2))((3))");
  CHECK(w.planar_leaves() == std::vector<int>{1, 2, 3});
  CHECK(w.pure());

  // arity-1 words are nested singletons of degree n
  CHECK(W("1").degree() == 0);
  CHECK(W("(1)").degree() == 1);
  CHECK(W("((1))").degree() == 2);
  CHECK(W("(((1)))").degree() == 3);
  CHECK(W("((7))").inputs() == FiniteSet{7});

  // leaves may carry sets (commutative factors)
  LevelWord t = W("(13)(2)");
  CHECK(t.degree() == 2);
  CHECK(!t.pure());
  CHECK(t.inputs() == FiniteSet{1, 2, 3});
  CHECK(t.factors[0].leaf == FiniteSet{1, 3});

  CHECK_THROWS_AS(W(""), ContractError);
  CHECK_THROWS_AS(W("((1)"), ContractError);
  CHECK_THROWS_AS(W("(1)((2))"), ContractError);  // mixed levels
  CHECK_THROWS_AS(W("(1)(1)"), ContractError);    // overlapping blocks
  CHECK_THROWS_AS(W("()"), ContractError);

  // round trips
  for (const char* s : {"1", "(1)(2)", "((2)(3))((1))", "(((1))((2)))"}) {
    CHECK(W(s).encode() == s);
  }
}

TEST_CASE("word enumeration matches the counting oracles") {
  for (int r = 1; r <= 4; ++r)
    CHECK((long)enumerate_words(1, canonical_set(r)).size() == factorial(r));
  CHECK(enumerate_words(2, canonical_set(2)).size() == 4);
  CHECK(enumerate_words(2, canonical_set(3)).size() == 24);
  CHECK(enumerate_words(3, canonical_set(3)).size() == 54);
  for (int n = 1; n <= 3; ++n) {
    for (int r = 1; r <= 4; ++r) {
      long words = (long)enumerate_words(n, canonical_set(r)).size();
      long gens = (long)generator_words(n, r).size();
      CHECK(words == count_words(n, r));
      CHECK(gens == count_generators(n, r));
      // free symmetric structure: every word is a unique relabeled generator
      CHECK(words == gens * factorial(r));
    }
  }
  // frozen generator counts
  CHECK(generator_words(1, 4).size() == 1);
  CHECK(generator_words(2, 3).size() == 4);
  CHECK(generator_words(2, 4).size() == 8);
  CHECK(generator_words(3, 3).size() == 9);
  CHECK(generator_words(3, 4).size() == 27);
  // generators read 1..r in planar order
  for (const auto& g : generator_words(3, 4))
    CHECK(g.planar_leaves() == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("build_Tn: dims, degrees, relabeling") {
  SigmaModule t1 = build_Tn(Z, 1, 4);
  CHECK(t1.dim(2) == 2);
  CHECK(t1.dim(2, 2) == 2);  // both words in degree 2
  CHECK(t1.dim(2, 1) == 0);
  CHECK(t1.dim(1, 1) == 1);

  SigmaModule t2 = build_Tn(Z, 2, 4);
  CHECK(t2.dim(3) == 24);
  CHECK(t2.dim(3, 4) == 6);   // single block, both leaves together
  CHECK(t2.dim(3, 5) == 12);  // two blocks
  CHECK(t2.dim(3, 6) == 6);   // three blocks
  CHECK(t2.dim(1, 2) == 1);
  CHECK_THROWS_AS(t2.at(5), ContractError);

  // relabeling transports leaves, never a sign
  Bijection u = Bijection::from_values({3, 1, 2});
  BasisElement x = word_elem(W("((1)(3))((2))"));
  SignedElement sx = t2.relabel_one(u, x);
  CHECK(sx.sign == 1);
  CHECK(sx.elem.label == "((3)(2))((1))");
  CHECK(sx.elem.degree == x.degree);
  // functoriality over all permutation pairs on a sample word
  for (const auto& a : all_perms(3)) {
    for (const auto& b : all_perms(3)) {
      Bijection ab = a.after(b);
      CHECK(t2.relabel_one(ab, x).elem ==
            t2.relabel_one(a, t2.relabel_one(b, x).elem).elem);
    }
  }
  CHECK(t2.diff(one(x)).is_zero());
}

TEST_CASE("canonicalize: unique generator factorization") {
  // a canonical word returns itself with the identity bijection
  LevelWord g = W("((1)(2))((3))");
  Canonical c = canonicalize(g);
  CHECK(c.gen == g);
  CHECK(c.u == Bijection::identity({1, 2, 3}));
  CHECK(c.sign == 1);

  // the two words of T^1({1,2}) share the single generator of G^1(2)
  Canonical c12 = canonicalize(W("(1)(2)"));
  Canonical c21 = canonicalize(W("(2)(1)"));
  CHECK(c12.gen == c21.gen);
  CHECK(c12.gen == W("(1)(2)"));
  CHECK(c12.u == Bijection::from_values({1, 2}));
  CHECK(c21.u == Bijection::from_values({2, 1}));

  // round trip on random words, n <= 3, r <= 4
  std::mt19937 rng(20240817);
  for (int n = 1; n <= 3; ++n) {
    for (int r = 1; r <= 4; ++r) {
      auto words = enumerate_words(n, canonical_set(r));
      auto gens = generator_words(n, r);
      for (int trial = 0; trial < 9; ++trial) {
        const LevelWord& w = words[rng() % words.size()];
        Canonical can = canonicalize(w);
        CHECK(can.sign == 1);
        CHECK(relabel_word(can.u, can.gen) == w);
        CHECK(std::count(gens.begin(), gens.end(), can.gen) == 1);
      }
    }
  }
}

TEST_CASE("shuffle product: frozen values, symmetry, associativity") {
  // mu(x(1), x(2)) = x(1)(x)x(2) - x(2)(x)x(1): odd suspended factors
  WordSum m = shuffle_words(Z, W("(1)"), W("(2)"));
  WordSum expect(Z);
  expect.add_int(W("(1)(2)"), 1);
  expect.add_int(W("(2)(1)"), -1);
  CHECK(m == expect);

  // (2,2)-shuffles: binomial(4,2) = 6 terms
  CHECK(shuffle_words(Z, W("(1)(2)"), W("(3)(4)")).terms.size() == 6);

  // even total degree commutes without sign: level-2 singletons have degree 2
  CHECK(shuffle_words(Z, W("((1))"), W("((2))")) ==
        shuffle_words(Z, W("((2))"), W("((1))")));

  // graded commutativity across all pairs of small words
  for (int n = 1; n <= 3; ++n) {
    for (const auto& x : enumerate_words(n, {1, 2})) {
      for (const auto& y : enumerate_words(n, {3})) {
        int s = (x.degree() * y.degree()) % 2 == 0 ? 1 : -1;
        CHECK(shuffle_words(Z, x, y) ==
              shuffle_words(Z, y, x).scaled_int(s));
      }
    }
  }

  // associativity on words of mixed shapes
  for (int n = 1; n <= 2; ++n) {
    auto xs = enumerate_words(n, {1, 2});
    auto ys = enumerate_words(n, {3});
    auto zs = enumerate_words(n, {4, 5});
    for (std::size_t i = 0; i < xs.size(); i += 2) {
      for (const auto& y : ys) {
        for (std::size_t k = 0; k < zs.size(); k += 3) {
          WordSum left =
              lin_shuffle(shuffle_words(Z, xs[i], y), one_word(zs[k]));
          WordSum right =
              lin_shuffle(one_word(xs[i]), shuffle_words(Z, y, zs[k]));
          CHECK(left == right);
        }
      }
    }
  }

  CHECK_THROWS_AS(shuffle_words(Z, W("(1)"), W("((2))")), ContractError);
  CHECK_THROWS_AS(shuffle_words(Z, W("(1)(2)"), W("(2)(3)")), ContractError);

  // the element-level wrapper agrees with the word-level product
  LinT lhs = shuffle_product(Z, one(word_elem(W("(1)"))),
                             one(word_elem(W("(2)"))));
  CHECK(lhs.terms.size() == 2);
  CHECK(lhs.terms.at(word_elem(W("(2)(1)"))) == Scalar(Z, -1));
}

TEST_CASE("deconcatenation: splits and coassociativity") {
  CHECK(deconcatenate(W("((1)(2))")).empty());
  CHECK(deconcatenate(W("1")).empty());
  auto splits = deconcatenate(W("(1)(3)(2)"));
  REQUIRE(splits.size() == 2);
  CHECK(splits[0].first == W("(1)"));
  CHECK(splits[0].second == W("(3)(2)"));
  CHECK(splits[1].first == W("(1)(3)"));
  CHECK(splits[1].second == W("(2)"));

  // (Delta (x) id) Delta = (id (x) Delta) Delta as triple multisets
  for (int n = 1; n <= 2; ++n) {
    for (const auto& w : enumerate_words(n, canonical_set(3))) {
      std::multiset<std::string> left, right;
      for (const auto& [a, bc] : deconcatenate(w))
        for (const auto& [b, c] : deconcatenate(bc))
          left.insert(a.encode() + "#" + b.encode() + "#" + c.encode());
      for (const auto& [ab, c] : deconcatenate(w))
        for (const auto& [a, b] : deconcatenate(ab))
          right.insert(a.encode() + "#" + b.encode() + "#" + c.encode());
      CHECK(left == right);
    }
  }
}

TEST_CASE("bar differential: frozen terms and squared-zero") {
  // two adjacent merges on the arity-3 level-1 generator
  WordSum d3 = bar_differential(Z, W("(1)(2)(3)"));
  WordSum expect(Z);
  expect.add_int(W("(12)(3)"), -1);
  expect.add_int(W("(1)(23)"), 1);
  CHECK(d3 == expect);
  CHECK(bar_differential(Z, W("(1)")).is_zero());
  CHECK(bar_differential(Z, W("((1)(2))")) == one_word(W("((12))")));

  // squared differential vanishes on all generators, n <= 3, r <= 4
  for (int n = 1; n <= 3; ++n) {
    for (int r = 1; r <= 4; ++r) {
      for (const auto& g : generator_words(n, r)) {
        CHECK(lin_bar(bar_differential(Z, g)).is_zero());
      }
    }
  }
  // and on words with larger commutative leaves
  for (const char* s :
       {"(13)(2)", "((13))((2)(45))", "((12)(3))", "(((13)(2)))(((4)))"}) {
    CHECK(lin_bar(bar_differential(Z, W(s))).is_zero());
  }
}

TEST_CASE("bar differential is a coderivation for deconcatenation") {
  using Pair = std::pair<LevelWord, LevelWord>;
  auto coproduct = [](const WordSum& z) {
    Lin<Pair> out(Z);
    for (const auto& [w, c] : z.terms)
      for (const auto& p : deconcatenate(w)) out.add(p, c);
    return out;
  };
  for (int n = 1; n <= 3; ++n) {
    for (int r = 1; r <= (n == 3 ? 3 : 4); ++r) {
      for (const auto& g : generator_words(n, r)) {
        Lin<Pair> left = coproduct(bar_differential(Z, g));
        Lin<Pair> right(Z);
        for (const auto& [a, b] : deconcatenate(g)) {
          for (const auto& [da, c] : bar_differential(Z, a).terms)
            right.add({da, b}, c);
          Scalar koszul(Z, a.degree() % 2 == 0 ? 1 : -1);
          for (const auto& [db, c] : bar_differential(Z, b).terms)
            right.add({a, db}, c * koszul);
        }
        CHECK(left == right);
      }
    }
  }
}

TEST_CASE("shuffle product is a chain map for the bar differential") {
  std::mt19937 rng(414243);
  for (int n = 1; n <= 3; ++n) {
    auto xs = enumerate_words(n, {1, 4});
    auto ys = enumerate_words(n, {2, 3, 5});
    for (int trial = 0; trial < 6; ++trial) {
      const LevelWord& x = xs[rng() % xs.size()];
      const LevelWord& y = ys[rng() % ys.size()];
      WordSum left = lin_bar(shuffle_words(Z, x, y));
      WordSum right = lin_shuffle(bar_differential(Z, x), one_word(y));
      right += lin_shuffle(one_word(x), bar_differential(Z, y))
                   .scaled_int(x.degree() % 2 == 0 ? 1 : -1);
      CHECK(left == right);
    }
  }
}

TEST_CASE("gamma: frozen low-arity values") {
  TwistingHom g1 = build_gamma(Z, 1, 3);
  // arity 1: no adjacent pair
  CHECK(g1.table.at("(1)").is_zero());
  // arity 2: the single merge, with the sign fixed by the convention
  LinT expect(Z);
  expect.add(g1.mod.make(word_elem(W("(1)")), {operads::comm_elem({1, 2})}).elem,
             Scalar(Z, -1));
  CHECK(g1.table.at("(1)(2)") == expect);
  // arity 3: exactly the two adjacent merges
  CHECK(g1.table.at("(1)(2)(3)").terms.size() == 2);

  TwistingHom g2 = build_gamma(Z, 2, 2);
  LinT expect2(Z);
  expect2.add(
      g2.mod.make(word_elem(W("((1))")), {operads::comm_elem({1, 2})}).elem,
      Scalar(Z, 1));
  CHECK(g2.table.at("((1)(2))") == expect2);
}

TEST_CASE("gamma squares to zero on composites") {
  for (int n = 1; n <= 3; ++n) {
    int rmax = n == 3 ? 3 : 4;
    TwistingHom g = build_gamma(Z, n, rmax);
    for (int r = 1; r <= rmax; ++r) {
      for (const auto& gen : generator_words(n, r)) {
        LinT z = one(unit_composite(g, gen));
        CHECK(apply_twist(g, apply_twist(g, z)).is_zero());
        CHECK(twisted_diff(g, twisted_diff(g, z)).is_zero());
      }
    }
  }
  // composites with larger commutative factors attached
  TwistingHom g2 = build_gamma(Z, 2, 3);
  for (const auto& gen : generator_words(2, 2)) {
    SignedElement z = g2.mod.make(
        word_elem(gen),
        {operads::comm_elem({1, 4}), operads::comm_elem({2, 3})});
    REQUIRE(z.sign == 1);
    CHECK(apply_twist(g2, apply_twist(g2, one(z.elem))).is_zero());
  }
  for (const auto& gen : generator_words(2, 3)) {
    SignedElement z = g2.mod.make(
        word_elem(gen), {operads::comm_elem({1, 5}), operads::comm_elem({2}),
                         operads::comm_elem({3, 4})});
    REQUIRE(z.sign == 1);
    CHECK(apply_twist(g2, apply_twist(g2, one(z.elem))).is_zero());
  }
}

TEST_CASE("gamma commutes with relabeling") {
  TwistingHom g = build_gamma(Z, 2, 3);
  for (const auto& gen : generator_words(2, 3)) {
    LinT z = one(unit_composite(g, gen));
    for (const auto& u : all_perms(3)) {
      CHECK(apply_twist(g, g.mod.module.relabel(u, z)) ==
            g.mod.module.relabel(u, apply_twist(g, z)));
    }
  }
}

TEST_CASE("suspension embedding: primitives and the chain map") {
  // arity 1: the degree-(n-1) word becomes the degree-n nested word
  CHECK(suspension_word(W("(1)")) == W("((1))"));
  CHECK(suspension_word(W("(1)")).degree() == 2);
  // image elements are primitive
  CHECK(deconcatenate(suspension_word(W("(1)(2)(3)"))).empty());

  // gamma_n(susp g) = -susp(gamma_{n-1}(g)) on all generators
  for (int n = 2; n <= 3; ++n) {
    TwistingHom lower = build_gamma(Z, n - 1, 4);
    TwistingHom upper = build_gamma(Z, n, 4);
    for (int r = 1; r <= 4; ++r) {
      for (const auto& gen : generator_words(n - 1, r)) {
        LinT lifted = suspension_on_composites(
            lower.mod, upper.mod, lower.table.at(gen.encode()));
        CHECK(upper.table.at(suspension_word(gen).encode()) ==
              lifted.scaled_int(-1));
      }
    }
  }
}

TEST_CASE("word cells: minimal complete graphs and membership") {
  // frozen: blocks {1,3},{2} with 1,3 split one level deeper
  KGraph k = word_min_cell(W("((1)(3))((2))"));
  CHECK(k.encode() == "{12:1>,13:0>,23:1<}sigma=(1,3,2)");
  // weights stay below the level
  for (const auto& w : enumerate_words(3, canonical_set(3))) {
    for (const auto& [pair, mu] : word_min_cell(w).weight) CHECK(mu < 3);
  }
  // membership via the inductive conditions = comparison with the min cell
  for (int n = 1; n <= 3; ++n) {
    for (const auto& w : enumerate_words(n, canonical_set(3))) {
      KGraph mc = word_min_cell(w);
      for (const auto& kappa : all_kgraphs(3, n, false)) {
        CHECK(word_in_cell(w, kappa) == operads::kgraph_leq(mc, kappa));
      }
    }
  }
  // relabeling transports the minimal cell's ordering
  KGraph k2 = word_min_cell(W("((3)(2))((1))"));
  CHECK(k2.sigma.encode() == "321");
  CHECK(k2.weight_of(2, 3) == 0);
  CHECK(k2.weight_of(1, 2) == 1);
}

TEST_CASE("gamma preserves complete-graph cells") {
  for (int n = 1; n <= 3; ++n) {
    int rmax = n == 3 ? 3 : 4;
    TwistingHom g = build_gamma(Z, n, rmax);
    for (int r = 2; r <= rmax; ++r) {
      for (const auto& gen : generator_words(n, r)) {
        const LinT& val = g.table.at(gen.encode());
        for (const auto& kappa : all_kgraphs(r, n, true)) {
          if (!word_in_cell(gen, kappa)) continue;
          for (const auto& [term, c] : val.terms) {
            CHECK(composite_in_cell_over_c(g.mod, term, kappa));
          }
        }
      }
    }
  }
}

TEST_CASE("harrison quotients: dimensions and descent") {
  // L^c(Sigma I): quotient dims (r-1)!
  CommAlgebra I = unit_algebra(Z);
  HarrisonSummary h2 = harrison_complex(I, {1, 2});
  CHECK(h2.ambient_dim.at(2) == 2);
  CHECK(h2.shuffle_rank.at(2) == 1);
  CHECK(h2.quotient_dim.at(2) == 1);
  CHECK(h2.differential_descends);
  CHECK(harrison_complex(I, {1, 2, 3}).quotient_dim.at(3) == 2);
  CHECK(harrison_complex(I, {1, 2, 3, 4}).quotient_dim.at(4) == 6);

  // reduced commutative algebra: arity 1 leaves the single class
  CommAlgebra C = commutative_algebra(Z, 8);
  HarrisonSummary hc1 = harrison_complex(C, {1});
  CHECK(hc1.ambient_dim.at(1) == 1);
  CHECK(hc1.quotient_dim.at(1) == 1);
  CHECK(hc1.shuffle_rank.empty());

  HarrisonSummary hc2 = harrison_complex(C, {1, 2});
  CHECK(hc2.ambient_dim.at(1) == 1);
  CHECK(hc2.ambient_dim.at(2) == 2);
  CHECK(hc2.quotient_dim.at(2) == 1);
  CHECK(hc2.differential_descends);

  for (int r = 3; r <= 4; ++r) {
    FiniteSet e = canonical_set(r);
    HarrisonSummary h = harrison_complex(C, e);
    CHECK(h.differential_descends);
    // top degree: all blocks singletons, quotient of rank (r-1)!
    CHECK(h.ambient_dim.at(r) == factorial(r));
    CHECK(h.quotient_dim.at(r) == factorial(r - 1));
  }
}

}  // TEST_SUITE
