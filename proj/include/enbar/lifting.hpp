#pragma once
// Lifting the bar twisting homomorphism from the commutative operad to the
// Barratt-Eccles operad.  The free module T^n o E contracts onto T^n o C
// through iota/eps/nu applied argumentwise (include_from_comm, project_to_comm,
// nu_tilde); the lifted differential is built by the staged recursion
//   eps_0 = iota~ . gamma,   eps_m = - sum_{p+q=m-1} nu~ . (d_{eps_p} . eps_q),
// which terminates because stage m lowers the word-part degree by m+1 and no
// word has degree below the level.  (The minus makes the stages kill the
// obstruction cycles: delta(eps_m) = - sum d_{eps_p} . eps_q.)  Restriction to the suboperad E_n holds
// simplex by simplex and is checked against the complete-graph cells.
//
// Signs: nu_tilde applies nu in one argument slot and iota.eps in the slots
// before it, with the Koszul evaluation sign (-1)^(deg x + deg p_1 + ... +
// deg p_{i-1}) of moving the degree-one operator past the word part and the
// skipped arguments.  With this convention
//   delta nu~ + nu~ delta = id - iota~ proj,  proj nu~ = 0,  proj iota~ = id
// hold elementwise (certified in the tests, together with the squared lifted
// differential).

#include "enbar/barcx.hpp"

namespace enbar::lifting {

using barcx::LevelWord;
using barcx::LinT;
using barcx::TwistingHom;
using exactlin::Ring;
using exactlin::Scalar;
using operads::KGraph;
using operads::LinE;
using operads::Operad;
using operads::Perm;
using operads::Simplex;
using symseq::BasisElement;
using symseq::CompositionModule;
using symseq::SigmaModule;

// Shared data for one level n: the word module T^n and the free right
// modules over the commutative operad, the full Barratt-Eccles operad and
// its filtration stage E_n (the last one bounded by arity_max).
struct LiftContext {
  Ring ring = Ring::z();
  int level = 1;  // n
  int arity_max = 1;
  Operad comm;
  Operad be;
  Operad en;  // E_n: same composition, module cut to filtration level <= n
  SigmaModule tn;
  TwistingHom gamma;         // bar twisting homomorphism, values in mod_c
  CompositionModule mod_c;   // T^n o C (the module of gamma)
  CompositionModule mod_e;   // T^n o E
  CompositionModule mod_en;  // T^n o E_n
};
LiftContext lift_context(Ring, int level, int arity_max);

// K o eps: arguments through the augmentation (positive-degree simplices
// die); lands in T^n o C
LinT project_to_comm(const LiftContext&, const LinT&);
// iota~ = K o iota: commutative arguments to increasing 0-simplices;
// section of project_to_comm
LinT include_from_comm(const LiftContext&, const LinT&);
// nu~: contracting homotopy of T^n o E onto the image of include_from_comm
LinT nu_tilde(const LiftContext&, const LinT&);

// The lifted twisting homomorphism, with the stages kept for inspection:
// stages[m] maps every generator of arity <= arity_max to its eps_m value
// (zero entries included), hom.table to the full sum.  hom targets the full
// Barratt-Eccles operad; see restrict_to_en for the cut to E_n.
struct LiftedTwist {
  TwistingHom hom;
  std::vector<std::map<std::string, LinT>> stages;
};
LiftedTwist lift_twisting(const LiftContext&);

// Membership of a composite of T^n o E in the cell kappa: the minimal cell
// of the word part composed with the minimal cells of the arguments.
bool composite_in_cell_over_e(const CompositionModule&, const BasisElement&,
                              const KGraph&);

// Checks that every table value of the lifted twist lands in T^n o E_n --
// every simplex has filtration level <= n and, sharper, every composite for
// a generator g sits in the minimal cell of g -- and returns the same table
// retargeted to E_n.  Throws ContractError naming the generator and the
// offending simplex otherwise.
TwistingHom restrict_to_en(const LiftContext&, const TwistingHom&);

// cup products in E(2): upsilon_0 = iota(mu) = [12] and
//   upsilon_m = nu(upsilon_{m-1} + (-1)^m tau upsilon_{m-1}),
// tau the transposition relabel.  upsilon_m has degree m and filtration
// level m+1, with delta(upsilon_m) = upsilon_{m-1} + (-1)^m tau upsilon_{m-1}.
LinE cup_product(Ring, int m);
// the cycle upsilon_m + (-1)^(m+1) tau upsilon_m in E_{m+1}(2); its class
// generates H_m(E_{m+1}(2)) and represents the degree-m bracket
LinE cup_cycle(Ring, int m);

// the word x(e_1) (x)_m x(e_2) of T^n({e_1,e_2}): split into two factors at
// level m (1 <= m <= n), single factors above
LevelWord tensor_split_word(int n, int m, int e1, int e2);

// Deterministic JSON for a twisting table: level, ring, and for every
// generator the signed composite terms (word part plus argument encodings).
std::string twist_json(const TwistingHom&);

}  // namespace enbar::lifting
