#pragma once
// Verification suites for the lifted twisting homomorphism.  Each suite
// checks one structural identity exhaustively within explicit bounds and
// reports the first counterexample as text instead of throwing, so a CLI
// run can serialize it.  The composite enumerations are deterministic; the
// bounds that were actually used are echoed in every result.
//
//   twisting-equation   (delta + d_eps)^2 = 0 on every enumerated composite
//   projection          (K o aug) d_eps = d_gamma (K o aug)
//   coderivation        the level-n bar differential is a coderivation for
//                       deconcatenation on every generator word
//   cell-preservation   gamma keeps every complete-graph cell of a generator
//   restriction         d_eps lands in the filtration-n suboperad, cell-sharp
//   suspension          the level-(n-1) table suspends (with a sign) onto the
//                       level-n table; at n = 1 the base case: degree-zero
//                       values and vanishing higher stages
#include <string>
#include <vector>

#include "enbar/lifting.hpp"

namespace enbar::verify {

using exactlin::Ring;

struct SuiteOptions {
  Ring ring = Ring::z();
  int level = 2;      // bar iteration n
  int arity_max = 3;  // generators and composites up to this arity
  // total degree allowed in the operad arguments of enumerated composites;
  // the word part is never truncated
  int arg_degree_cap = 2;
};

struct SuiteResult {
  std::string suite;
  std::string bounds;
  long checks = 0;  // identities verified
  bool pass = true;
  std::string counterexample;  // empty when pass
};

SuiteResult twisting_equation_suite(const SuiteOptions&);
SuiteResult projection_suite(const SuiteOptions&);
SuiteResult coderivation_suite(const SuiteOptions&);
SuiteResult cell_preservation_suite(const SuiteOptions&);
SuiteResult restriction_suite(const SuiteOptions&);
SuiteResult suspension_suite(const SuiteOptions&);

// all six, in the order documented above
std::vector<SuiteResult> run_verification(const SuiteOptions&);

bool all_pass(const std::vector<SuiteResult>&);

// {"ring", "level", "arity_max", "pass", "suites": [...]} with stable order
std::string results_json(const SuiteOptions&, const std::vector<SuiteResult>&);

}  // namespace enbar::verify
