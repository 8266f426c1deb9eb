#pragma once
// Iterated tensor coalgebras T^n = (T^c Sigma)^n(I): level words and the
// generating collection G^n, shuffle product and deconcatenation, the bar
// differential of iterated bar complexes over the commutative operad (as a
// twisting homomorphism into T^n o C), suspension embeddings, complete-graph
// cell membership, and Harrison quotients.
//
// A level word of level 0 is a single leaf carrying a nonempty input set
// (a singleton for the words spanning T^n itself; larger sets appear when
// commutative factors are attached to the leaves).  A word of level n >= 1
// is an ordered nonempty sequence of level-(n-1) words on pairwise disjoint
// blocks.  Degree = number of factors + sum of factor degrees, so each
// factor counts with one suspension; the arity-1 word of level n has
// degree n.  Encoding: nested parentheses, e.g. ((1)(2))((3)); the level is
// recovered from the nesting depth.  Leaves with elements past 9 use the
// comma form of encode_set, so parsing is unambiguous as long as sets with
// all elements <= 9 use the plain digit form (always the case here).
//
// Sign conventions (certified by the squared-differential, coderivation and
// equivariance tests):
//  * shuffles and block reorderings use the Koszul rule on suspended factor
//    degrees, funneled through koszul_reorder_sign;
//  * the bar differential on a word with factors x_1,...,x_m carries
//    (-1)^(f_1+...+f_i) on the merge of (x_i, x_{i+1}) and
//    (-1)^(f_1+...+f_{i-1}+1) on the internal differential of x_i, where
//    f_j = deg x_j + 1;
//  * relabeling a word transports leaf entries and never produces a sign
//    (factor order is structural, nothing is reordered), so canonicalize
//    always reports sign +1.

#include "enbar/operads.hpp"

namespace enbar::barcx {

using exactlin::Ring;
using exactlin::Scalar;
using operads::KGraph;
using operads::Operad;
using symseq::BasisElement;
using symseq::Bijection;
using symseq::CompositionModule;
using symseq::FiniteSet;
using symseq::Lin;
using symseq::SigmaModule;
using symseq::SignedElement;

using LinT = Lin<BasisElement>;

struct LevelWord {
  int level = 0;
  FiniteSet leaf;                  // level 0 payload
  std::vector<LevelWord> factors;  // level >= 1 payload

  static LevelWord leaf_word(FiniteSet e);  // level 0
  // validates factor levels and block disjointness
  static LevelWord node(int level, std::vector<LevelWord> factors);

  int degree() const;
  FiniteSet inputs() const;
  bool pure() const;  // every leaf a singleton
  std::vector<int> planar_leaves() const;  // leaf entries left to right
  std::string encode() const;
  static LevelWord parse(const std::string&);

  bool operator==(const LevelWord&) const;
  bool operator<(const LevelWord&) const;  // (level, leaf, factors) lex
};

using WordSum = Lin<LevelWord>;

// basis-element view: label = encode(), inputs = leaf union
BasisElement word_elem(const LevelWord&);
LevelWord elem_word(const BasisElement&);

// transport every leaf entry along u (u must cover the inputs)
LevelWord relabel_word(const Bijection&, const LevelWord&);

// all pure level-n words on e (empty unless n >= 1 or e is a singleton)
std::vector<LevelWord> enumerate_words(int n, const FiniteSet& e);
// the generating collection G^n(r): words whose blocks at every level are
// contiguous increasing intervals, i.e. planar leaf order 1,...,r
std::vector<LevelWord> generator_words(int n, int r);

// T^n as a SigmaModule: zero differential, relabeling by leaf transport
SigmaModule build_Tn(Ring, int n, int arity_max);

// unique factorization w = sign * relabel(u, gen) with gen in G^n
struct Canonical {
  LevelWord gen;
  Bijection u;  // canonical leaf position -> actual leaf entry
  int sign = 1;
};
Canonical canonicalize(const LevelWord& w);

// shuffle of the top factor sequences with Koszul signs on the suspended
// factor degrees; at level 0 the commutative merge of the leaf sets
WordSum shuffle_words(Ring, const LevelWord& x, const LevelWord& y);
// the same on encoded elements of T^n, extended bilinearly
LinT shuffle_product(Ring, const LinT& x, const LinT& y);

// proper splits of the top factor sequence (no empty side, no signs)
std::vector<std::pair<LevelWord, LevelWord>> deconcatenate(const LevelWord&);

// full differential of the n-fold bar complex over C on a word whose leaves
// carry commutative factors: adjacent merges (shuffles below the top level,
// set unions at level 0) plus recursive internal differentials
WordSum bar_differential(Ring, const LevelWord&);

// A twisting homomorphism on the quasi-free right module T^n o R: values of
// the differential on the generating collection, at canonical arity.  The
// table is extended to arbitrary composites by equivariance and the right
// R-action (see apply_twist).
struct TwistingHom {
  Ring ring = Ring::z();
  int level = 1;  // n
  Operad target;  // R
  SigmaModule tn;
  CompositionModule mod;  // T^n o R
  std::map<std::string, LinT> table;  // generator label -> value
};

// the bar twisting homomorphism of B^n_C, tabulated on G^n up to arity_max
TwistingHom build_gamma(Ring, int n, int arity_max);

// twisting part of the differential on a composite xi(p_1,...,p_r):
// alpha(xi) composed with the attached operad elements
LinT apply_twist(const TwistingHom&, const BasisElement& composite);
LinT apply_twist(const TwistingHom&, const LinT&);
// full differential: internal Leibniz part of the module plus apply_twist
LinT twisted_diff(const TwistingHom&, const LinT&);

// single-factor embedding Sigma T^{n-1} -> T^n ...
LevelWord suspension_word(const LevelWord&);
// ... extended to composites of T^{n-1} o R -> T^n o R (word part wrapped,
// attached factors kept); anticommutes with the twisting differentials
LinT suspension_on_composites(const CompositionModule& from,
                              const CompositionModule& to, const LinT&);

// least kappa with w in (T^n)_kappa: pair weight = separation level - 1,
// ordering = planar leaf order (pure words only)
KGraph word_min_cell(const LevelWord&);
// membership via the inductive conditions: pairs split below level l need
// weight >= l-1, with the edge orientation matching the factor order at
// equality; equivalent to kgraph_leq(word_min_cell(w), kappa)
bool word_in_cell(const LevelWord&, const KGraph&);
// membership of a composite of T^n o C: the word cell composed with
// weight-zero graphs on the blocks (orderings restricted from kappa)
bool composite_in_cell_over_c(const CompositionModule&, const BasisElement&,
                              const KGraph&);

// commutative algebra datum: a SigmaModule with a bilinear basis product
struct CommAlgebra {
  SigmaModule module;
  std::function<LinT(const BasisElement&, const BasisElement&)> product;
};
CommAlgebra unit_algebra(Ring);                        // zero product
CommAlgebra commutative_algebra(Ring, int arity_max);  // Cbar, set union

// bar complex T^c(Sigma A)(e) modulo the image of the shuffle product:
// per-degree ambient dimensions, shuffle-image ranks, quotient dimensions,
// and the check that the bar differential maps the image into the image
struct HarrisonSummary {
  std::map<int, int> ambient_dim;
  std::map<int, int> shuffle_rank;
  std::map<int, int> quotient_dim;
  bool differential_descends = true;
};
HarrisonSummary harrison_complex(const CommAlgebra&, const FiniteSet& e);

}  // namespace enbar::barcx
