#pragma once
// Concrete operads: the commutative operad C, the associative operad A, the
// Barratt-Eccles operad E (normalized chains on E Sigma_*) with augmentation
// eps, section iota and homotopy nu, plus the complete graph poset operad K,
// its cells inside E, and the filtration by the suboperads E_n.
//
// Elements of E(e) in degree d are simplices (w_0,...,w_d): sequences of
// orderings of e with w_i != w_{i+1}; degenerate sequences are zero.  The
// differential is the alternating face sum.  Composition is realized by the
// shuffle-type Eilenberg-Zilber map followed by vertexwise substitution of
// orderings; its degree-0 part is plain block substitution (the associative
// operad sits inside E as the degree-0 part).

#include <optional>

#include "enbar/symseq.hpp"

namespace enbar::operads {

using exactlin::Ring;
using exactlin::Scalar;
using symseq::BasisElement;
using symseq::Bijection;
using symseq::FiniteSet;
using symseq::Lin;
using symseq::SigmaModule;

using LinE = Lin<BasisElement>;

// An ordering of a finite input set, written as the sequence it lists.
struct Perm {
  std::vector<int> order;

  static Perm increasing(const FiniteSet&);
  FiniteSet inputs() const;  // sorted copy of order
  int arity() const { return (int)order.size(); }
  Perm relabeled(const Bijection&) const;     // apply u to every entry
  Perm restricted(const FiniteSet& sub) const;  // subsequence on sub
  // true when e occurs before f
  bool before(int e, int f) const;
  std::string encode() const;  // "312" for entries <= 9, "3,1,2" otherwise
  static Perm parse(const std::string&);
  auto operator<=>(const Perm&) const = default;
};

// A simplex of E(e): orderings (w_0,...,w_d); may be degenerate as raw data,
// degenerate simplices are dropped when converted to linear combinations.
struct Simplex {
  std::vector<Perm> words;

  int degree() const { return (int)words.size() - 1; }
  FiniteSet inputs() const;
  bool is_degenerate() const;  // some w_i == w_{i+1}
  Simplex face(int i) const;   // omit w_i
  Simplex relabeled(const Bijection&) const;
  std::string encode() const;  // "[12|21]"
  static Simplex parse(const std::string&);
  auto operator<=>(const Simplex&) const = default;
};

// module basis element <-> structure conversions (labels are the encodings)
BasisElement simplex_elem(const Simplex&);
Simplex elem_simplex(const BasisElement&);
BasisElement comm_elem(const FiniteSet&);  // the commutative word on e

// An operad: a SigmaModule together with a basis-level composition product
// gamma(x; y_1,...,y_r) for x on {1..r} and y_i on pairwise disjoint input
// sets, and a unit in P(1).  compose() is the multilinear extension.
struct Operad {
  SigmaModule module;
  BasisElement unit;
  std::function<LinE(const BasisElement&, const std::vector<BasisElement>&)>
      compose_basis;

  LinE compose(const LinE& x, const std::vector<LinE>& ys) const;
};

Operad commutative_operad(Ring, int arity_max);
Operad associative_operad(Ring, int arity_max);
Operad barratt_eccles(Ring, int arity_max, int degree_max);

// chain-level structure maps of E; inputs/outputs are linear combinations
// over simplex-labeled (respectively commutative-word-labeled) elements
LinE be_eps(Ring, const LinE&);   // degree 0 simplices -> commutative word
LinE be_iota(Ring, const LinE&);  // word on e -> increasing 0-simplex
// append sigma (default: increasing ordering of the input set); satisfies
// delta nu + nu delta = id - iota eps and eps nu = 0
LinE be_nu(Ring, const LinE&);
LinE be_nu(Ring, const LinE&, const Perm& sigma);

// --- complete graph operad -------------------------------------------------

// A complete graph on an input set: a weight for every unordered pair plus a
// global ordering sigma (whose pair restrictions give the edge orientations).
struct KGraph {
  std::map<std::pair<int, int>, int> weight;  // key (e, f) with e < f
  Perm sigma;

  FiniteSet inputs() const { return sigma.inputs(); }
  int weight_of(int e, int f) const;
  // encoding: "{12:1>,13:0<,23:2>}sigma=(2,3,1)" where '>' on pair ef with
  // e < f means e precedes f; entries past 9 use "e.f" pair keys
  std::string encode() const;
  static KGraph parse(const std::string&);
  bool operator==(const KGraph&) const = default;
};

// poset order: mu_ef < nu_ef, or equal weight with equal orientation, per pair
bool kgraph_leq(const KGraph&, const KGraph&);
// substitution of complete graphs into the vertices of kappa
KGraph kgraph_compose(const KGraph& kappa, const std::vector<KGraph>& pis);
// subgraph generated by a subset of the vertices
KGraph kgraph_restrict(const KGraph&, const FiniteSet& block);

// --- cells of E --------------------------------------------------------------

// number of indices i with w_i|_{ef} != w_{i+1}|_{ef}
int variations(const Simplex&, int e, int f);
// x in E_kappa iff per pair: variations < mu, or = mu with w_d|_{ef} = sigma|_{ef}
bool in_cell(const Simplex&, const KGraph&);
// least kappa with x in E_kappa: weights = variation counts, sigma = w_d
KGraph min_cell(const Simplex&);
// 1 + max pair variations = least n with x in E_n
int filtration_level(const Simplex&);

// The suboperad E_n of E as a SigmaModule: all nondegenerate simplices of
// filtration level <= n.  Finite in every arity: a nondegenerate d-simplex
// has at least d total variations, so d <= (n-1) r(r-1)/2.
SigmaModule en_suboperad_module(Ring, int n, int arity_max);

}  // namespace enbar::operads
