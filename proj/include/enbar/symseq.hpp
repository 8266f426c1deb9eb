#pragma once
// Symmetric sequences (Sigma_*-modules): finite input sets, bijections and
// their signs, sparse linear combinations, and a basis-level module facade
// with tensor product, composition product, suspensions and relabeling.
//
// Conventions pinned here and used by every higher module:
//  * input sets are strictly increasing int vectors, elements >= 1;
//  * M(0) = 0 everywhere (no empty blocks, no empty factors);
//  * composite blocks are listed by increasing minimum;
//  * Koszul rule (-1)^(pq): reordering adjacent factors of degrees p, q
//    multiplies by (-1)^(pq); all reordering signs funnel through
//    koszul_reorder_sign.

#include <climits>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "enbar/exactlin.hpp"

namespace enbar::symseq {

using exactlin::Ring;
using exactlin::Scalar;

using FiniteSet = std::vector<int>;  // strictly increasing, entries >= 1

bool is_valid_set(const FiniteSet&);
FiniteSet canonical_set(int r);  // {1, ..., r}
FiniteSet set_union_disjoint(const FiniteSet&, const FiniteSet&);
std::string encode_set(const FiniteSet&);  // "134", or "1,13" past 9

// all partitions of e into exactly r nonempty blocks, blocks min-sorted
std::vector<std::vector<FiniteSet>> set_partitions(const FiniteSet& e, int r);
// ordered pairs (u, v) with u disjoint-union v = e, both nonempty
std::vector<std::pair<FiniteSet, FiniteSet>> two_splits(const FiniteSet& e);
// step words: all arrangements of lens[i] copies of each index i
std::vector<std::vector<int>> multishuffles(const std::vector<int>& lens);
// sign of permuting graded factors: factor i moves to slot new_pos[i]
int koszul_reorder_sign(const std::vector<int>& degrees,
                        const std::vector<int>& new_pos);

struct Bijection {
  FiniteSet source;
  std::vector<int> image;  // image[i] = u(source[i])

  static Bijection identity(const FiniteSet&);
  static Bijection from_values(const std::vector<int>& values);  // source {1..r}
  FiniteSet target() const;
  int apply(int x) const;
  Bijection inverse() const;
  Bijection after(const Bijection& first) const;  // this o first
  int sign() const;
  std::string encode() const;  // "(3,5,1)"
  bool operator==(const Bijection&) const = default;
};

// sparse linear combination over an ordered key type; never stores zeros
template <class K>
struct Lin {
  Ring ring;
  std::map<K, Scalar> terms;

  explicit Lin(Ring r) : ring(r) {}
  void add(const K& k, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms.try_emplace(k, c);
    if (fresh) return;
    it->second = it->second + c;
    if (it->second.is_zero()) terms.erase(it);
  }
  void add_int(const K& k, long c) { add(k, Scalar(ring, c)); }
  Lin& operator+=(const Lin& o) {
    for (const auto& [k, c] : o.terms) add(k, c);
    return *this;
  }
  Lin scaled(const Scalar& c) const {
    Lin out(ring);
    for (const auto& [k, v] : terms) out.add(k, v * c);
    return out;
  }
  Lin scaled_int(long c) const { return scaled(Scalar(ring, c)); }
  bool is_zero() const { return terms.empty(); }
  bool operator==(const Lin& o) const { return terms == o.terms; }
};

struct BasisElement {
  std::string label;
  int degree = 0;
  FiniteSet inputs;
  auto operator<=>(const BasisElement&) const = default;
};

struct SignedElement {
  BasisElement elem;
  int sign = 1;  // 0 means the element was dropped (truncation)
};

struct Truncation {
  int arity_max = INT_MAX;
  int degree_min = INT_MIN;
  int degree_max = INT_MAX;
  Truncation intersect(const Truncation&) const;
  bool admits_arity(int r) const { return r >= 1 && r <= arity_max; }
  bool admits_degree(int d) const { return d >= degree_min && d <= degree_max; }
};

// A Sigma_*-module presented by bases: basis_fn enumerates the canonical
// basis at arity r (inputs {1..r}); relabel_fn transports a basis element
// along a bijection of input sets (returning a signed basis element on the
// target set); diff_fn is the degree -1 differential on single elements.
// Copies share the memoized bases.
class SigmaModule {
 public:
  Ring ring = Ring::z();
  std::string name;
  Truncation trunc;
  std::function<std::vector<BasisElement>(int)> basis_fn;
  std::function<SignedElement(const Bijection&, const BasisElement&)> relabel_fn;
  std::function<Lin<BasisElement>(const BasisElement&)> diff_fn;

  const std::vector<BasisElement>& at(int arity) const;  // sorted, memoized
  int dim(int arity, int degree) const;
  int dim(int arity) const;
  SignedElement relabel_one(const Bijection& u, const BasisElement&) const;
  Lin<BasisElement> relabel(const Bijection& u, const Lin<BasisElement>&) const;
  Lin<BasisElement> diff(const Lin<BasisElement>&) const;

 private:
  struct Cache {
    std::map<int, std::vector<BasisElement>> by_arity;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

SigmaModule unit_module(Ring ring);
// reduced commutative symmetric sequence: one basis element in each arity >= 1
SigmaModule commutative_module(Ring ring, int arity_max);

// (M (x) N)(e) = sum over splits e = u |_| v of M(u) (x) N(v)
SigmaModule tensor_product(const SigmaModule&, const SigmaModule&);
// (M o N)(e) = sum over partitions of e into blocks e_1, ..., e_s (min-sorted)
// of M(s) (x) N(e_1) (x) ... (x) N(e_s)
SigmaModule composition_product(const SigmaModule&, const SigmaModule&);

// Composition product together with assembly/decomposition access to its
// synthesized basis.  make(x, ys) registers and returns the composite
// x(y_1,...,y_s): x on {1..s}, ys[i-1] plugged into slot i, input sets
// pairwise disjoint.  Blocks are re-sorted by minimum; the M-part is
// relabeled along the sorting permutation and the Koszul reorder sign of the
// slot degrees is emitted (sign 0 when truncation drops the element).
// split() recovers (x, ys) from a registered composite.
struct CompositionModule {
  SigmaModule module;
  std::function<SignedElement(const BasisElement&,
                              const std::vector<BasisElement>&)>
      make;
  std::function<std::pair<BasisElement, std::vector<BasisElement>>(
      const BasisElement&)>
      split;
};
CompositionModule composition_module(const SigmaModule&, const SigmaModule&);
// degree shift by k; d(s^k x) = (-1)^k s^k dx
SigmaModule suspend(const SigmaModule&, int k);
// operadic suspension: arity-r part shifted by k(1-r), relabel twisted by sgn^k
SigmaModule operadic_suspend(const SigmaModule&, int k);

}  // namespace enbar::symseq
