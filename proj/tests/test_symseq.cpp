#include <doctest.h>

#include <algorithm>
#include <set>

#include "enbar/symseq.hpp"

using namespace enbar;
using namespace enbar::symseq;

namespace {

// independent counting oracles ----------------------------------------------

long stirling2(int n, int k) {
  if (n == 0 && k == 0) return 1;
  if (n == 0 || k == 0) return 0;
  return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1);
}

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// number of partitions of an n-set weighted by block sizes: the block
// containing the smallest element has some size k, chosen via binom(n-1,k-1)
long weighted_partition_count(int n, const std::vector<long>& block_weight) {
  if (n == 0) return 1;
  long total = 0;
  for (int k = 1; k <= n; ++k) {
    long w = k < (int)block_weight.size() ? block_weight[k] : 0;
    if (w) total += binom(n - 1, k - 1) * w * weighted_partition_count(n - k, block_weight);
  }
  return total;
}

// a two-arity module with a nonzero differential, for Leibniz-rule tests:
// arity 1 holds u (deg 0); arity 2 holds a (deg 1) and b (deg 0), d a = b
SigmaModule toy_module(exactlin::Ring ring) {
  SigmaModule m;
  m.ring = ring;
  m.name = "Toy";
  m.trunc.arity_max = 2;
  m.basis_fn = [](int arity) {
    std::vector<BasisElement> out;
    if (arity == 1) out.push_back({"u", 0, {1}});
    if (arity == 2) {
      out.push_back({"a", 1, {1, 2}});
      out.push_back({"b", 0, {1, 2}});
    }
    return out;
  };
  m.relabel_fn = [](const Bijection& u, const BasisElement& x) {
    return SignedElement{{x.label, x.degree, u.target()}, 1};
  };
  m.diff_fn = [ring](const BasisElement& x) {
    Lin<BasisElement> out(ring);
    if (x.label == "a") out.add({"b", 0, x.inputs}, exactlin::Scalar(ring, 1));
    return out;
  };
  return m;
}

std::vector<Bijection> all_perms(int r) {
  std::vector<int> v(r);
  for (int i = 0; i < r; ++i) v[i] = i + 1;
  std::vector<Bijection> out;
  do {
    out.push_back(Bijection::from_values(v));
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

std::map<int, int> graded_dims(const SigmaModule& m, int arity) {
  std::map<int, int> out;
  for (const auto& e : m.at(arity)) out[e.degree]++;
  return out;
}

}  // namespace

TEST_SUITE("symseq") {

TEST_CASE("set utilities") {
  CHECK(is_valid_set({1, 3, 4}));
  CHECK(!is_valid_set({3, 1}));
  CHECK(!is_valid_set({0, 1}));
  CHECK(!is_valid_set({1, 1}));
  CHECK(canonical_set(3) == FiniteSet{1, 2, 3});
  CHECK(set_union_disjoint({1, 4}, {2, 7}) == FiniteSet{1, 2, 4, 7});
  CHECK_THROWS_AS(set_union_disjoint({1, 2}, {2, 3}), ContractError);
  CHECK(encode_set({1, 3, 4}) == "134");
  CHECK(encode_set({1, 13}) == "1,13");
  CHECK(encode_set({}) == "");
}

TEST_CASE("set partitions match the Stirling oracle and are min-sorted") {
  for (int n = 1; n <= 6; ++n) {
    FiniteSet e = canonical_set(n);
    for (int k = 1; k <= n; ++k) {
      auto parts = set_partitions(e, k);
      CHECK((long)parts.size() == stirling2(n, k));
      for (const auto& p : parts) {
        FiniteSet seen;
        int prev_min = 0;
        for (const auto& b : p) {
          REQUIRE(!b.empty());
          CHECK(is_valid_set(b));
          CHECK(b.front() > prev_min);
          prev_min = b.front();
          seen = set_union_disjoint(seen, b);
        }
        CHECK(seen == e);
      }
    }
  }
  // works on non-canonical sets too
  auto parts = set_partitions({2, 5, 9}, 2);
  CHECK(parts.size() == 3);
}

TEST_CASE("two_splits enumerates ordered nonempty splits") {
  for (int n = 1; n <= 5; ++n) {
    auto sp = two_splits(canonical_set(n));
    CHECK((long)sp.size() == (1L << n) - 2);
    std::set<std::pair<FiniteSet, FiniteSet>> uniq(sp.begin(), sp.end());
    CHECK(uniq.size() == sp.size());
    for (const auto& [u, v] : sp)
      CHECK(set_union_disjoint(u, v) == canonical_set(n));
  }
}

TEST_CASE("multishuffles: counts, distinctness, lexicographic order") {
  auto ms = multishuffles({2, 2});
  CHECK(ms.size() == 6);  // binom(4,2)
  CHECK(ms.front() == std::vector<int>{0, 0, 1, 1});
  CHECK(ms.back() == std::vector<int>{1, 1, 0, 0});
  CHECK(std::is_sorted(ms.begin(), ms.end()));
  std::set<std::vector<int>> uniq(ms.begin(), ms.end());
  CHECK(uniq.size() == ms.size());

  CHECK(multishuffles({1, 1, 1}).size() == 6);
  CHECK(multishuffles({3}).size() == 1);
  CHECK(multishuffles({2, 1, 2}).size() == 30);  // 5!/(2!1!2!)
}

TEST_CASE("koszul reorder signs") {
  // swapping two odd factors
  CHECK(koszul_reorder_sign({1, 1}, {1, 0}) == -1);
  CHECK(koszul_reorder_sign({1, 1}, {0, 1}) == 1);
  // odd past even is free
  CHECK(koszul_reorder_sign({1, 2}, {1, 0}) == 1);
  CHECK(koszul_reorder_sign({3, 2}, {1, 0}) == 1);
  // full reversal of three odd factors: three inversions
  CHECK(koszul_reorder_sign({1, 1, 1}, {2, 1, 0}) == -1);
  // degree 0 never contributes
  CHECK(koszul_reorder_sign({0, 5}, {1, 0}) == 1);
}

TEST_CASE("bijections: apply, inverse, composition, sign") {
  Bijection u = Bijection::from_values({3, 1, 2});
  CHECK(u.apply(1) == 3);
  CHECK(u.apply(3) == 2);
  CHECK_THROWS_AS(u.apply(4), ContractError);
  CHECK(u.sign() == 1);   // 3-cycle, two inversions
  CHECK(Bijection::from_values({2, 1}).sign() == -1);
  CHECK(u.inverse().after(u) == Bijection::identity({1, 2, 3}));
  CHECK(u.after(u.inverse()) == Bijection::identity({1, 2, 3}));
  CHECK(u.encode() == "(3,1,2)");

  // non-canonical source
  Bijection w{{2, 5}, {7, 3}};
  CHECK(w.target() == FiniteSet{3, 7});
  CHECK(w.sign() == -1);
  CHECK(w.inverse().apply(3) == 5);

  // signs are multiplicative under composition
  for (const auto& a : all_perms(4))
    for (const auto& b : all_perms(4))
      CHECK(a.after(b).sign() == a.sign() * b.sign());
}

TEST_CASE("Lin: cancellation and scaling") {
  exactlin::Ring z = exactlin::Ring::z();
  Lin<std::string> v(z);
  v.add_int("x", 2);
  v.add_int("y", 1);
  v.add_int("x", -2);
  CHECK(v.terms.size() == 1);
  CHECK(v.terms.count("y") == 1);
  Lin<std::string> w = v.scaled_int(-3);
  CHECK(w.terms.at("y").encode() == "-3");
  w += v.scaled_int(3);
  CHECK(w.is_zero());
}

TEST_CASE("unit and commutative modules") {
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule I = unit_module(z);
  CHECK(I.dim(1) == 1);
  CHECK(I.at(1)[0].degree == 0);
  CHECK_THROWS_AS(I.at(2), ContractError);

  SigmaModule C = commutative_module(z, 4);
  for (int r = 1; r <= 4; ++r) {
    CHECK(C.dim(r) == 1);
    CHECK(C.at(r)[0].degree == 0);
  }
  CHECK_THROWS_AS(C.at(5), ContractError);
  // every relabel acts trivially
  for (const auto& u : all_perms(3)) {
    SignedElement s = C.relabel_one(u, C.at(3)[0]);
    CHECK(s.sign == 1);
    CHECK(s.elem == C.at(3)[0]);
  }
}

TEST_CASE("tensor product: dimensions against the binomial oracle") {
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule I = unit_module(z);
  SigmaModule C = commutative_module(z, 4);

  SigmaModule II = tensor_product(I, I);
  CHECK(II.dim(2) == 2);  // frozen: the two splits of {1,2}
  CHECK(II.dim(1) == 0);  // no split of a singleton into two nonempty parts

  SigmaModule CC = tensor_product(C, C);
  CHECK(CC.dim(3) == 6);  // frozen
  auto dim_of = [](const SigmaModule& m, int r) {
    return m.trunc.admits_arity(r) ? m.dim(r) : 0;
  };
  for (int r = 1; r <= 4; ++r) {
    long expect = 0;
    for (int j = 1; j < r; ++j)
      expect += binom(r, j) * dim_of(I, j) * dim_of(I, r - j);
    CHECK((long)dim_of(II, r) == expect);
    expect = 0;
    for (int j = 1; j < r; ++j) expect += binom(r, j) * 1 * 1;
    CHECK((long)dim_of(CC, r) == expect);
  }

  // mixed arity bounds: C (x) I only admits the summands with |v| = 1
  SigmaModule CI = tensor_product(C, I);
  for (int r = 2; r <= 4; ++r) CHECK(CI.dim(r) == r);
}

TEST_CASE("composition product: dimensions, frozen values, unit laws") {
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule I = unit_module(z);
  SigmaModule C = commutative_module(z, 4);

  SigmaModule CoC = composition_product(C, C);
  CHECK(CoC.dim(2) == 2);  // frozen
  CHECK(CoC.dim(3) == 5);  // frozen
  // oracle: every block weighted 1, M contributes 1 per block count
  std::vector<long> w{0, 1, 1, 1, 1};
  for (int r = 1; r <= 4; ++r)
    CHECK((long)CoC.dim(r) == weighted_partition_count(r, w));

  // unit laws as graded-dimension identities
  SigmaModule IoC = composition_product(I, C);
  SigmaModule CoI = composition_product(C, I);
  for (int r = 1; r <= 4; ++r) {
    CHECK(IoC.dim(r) == C.dim(r));
    CHECK(CoI.dim(r) == C.dim(r));
  }
}

TEST_CASE("suspension shifts degrees and twists the differential sign") {
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule T = toy_module(z);
  SigmaModule S = suspend(T, 3);
  CHECK(S.dim(2, 4) == 1);  // a shifted
  CHECK(S.dim(2, 3) == 1);  // b shifted
  const BasisElement* sa = nullptr;
  for (const auto& e : S.at(2))
    if (e.degree == 4) sa = &e;
  REQUIRE(sa != nullptr);
  Lin<BasisElement> d = S.diff_fn(*sa);
  REQUIRE(d.terms.size() == 1);
  CHECK(d.terms.begin()->second.encode() == "-1");  // (-1)^3
  CHECK(d.terms.begin()->first.degree == 3);
}

TEST_CASE("operadic suspension: degree k(1-r) shift and sgn^k relabel twist") {
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule C = commutative_module(z, 4);
  SigmaModule LC = operadic_suspend(C, 1);
  for (int r = 1; r <= 4; ++r) {
    CHECK(LC.dim(r) == 1);
    CHECK(LC.at(r)[0].degree == 1 - r);
  }
  // transpositions act by -1, 3-cycles by +1
  CHECK(LC.relabel_one(Bijection::from_values({2, 1}), LC.at(2)[0]).sign == -1);
  CHECK(LC.relabel_one(Bijection::from_values({2, 1, 3}), LC.at(3)[0]).sign == -1);
  CHECK(LC.relabel_one(Bijection::from_values({2, 3, 1}), LC.at(3)[0]).sign == 1);
  // even operadic suspension has no sign twist
  SigmaModule L2C = operadic_suspend(C, 2);
  CHECK(L2C.at(2)[0].degree == -2);
  CHECK(L2C.relabel_one(Bijection::from_values({2, 1}), L2C.at(2)[0]).sign == 1);
}

TEST_CASE("relabeling is functorial on products, including signs") {
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule LC = operadic_suspend(commutative_module(z, 4), 1);
  SigmaModule P = composition_product(LC, LC);
  SigmaModule Q = tensor_product(LC, LC);
  for (const SigmaModule* m : {&P, &Q}) {
    for (int r = 2; r <= 3; ++r) {
      for (const auto& x : m->at(r)) {
        for (const auto& a : all_perms(r)) {
          SignedElement xa = m->relabel_one(a, x);
          REQUIRE(xa.sign != 0);
          // identity acts trivially
          SignedElement xi = m->relabel_one(Bijection::identity(x.inputs), x);
          CHECK(xi.sign == 1);
          CHECK(xi.elem == x);
          for (const auto& b : all_perms(r)) {
            SignedElement xab = m->relabel_one(b, xa.elem);
            SignedElement xc = m->relabel_one(b.after(a), x);
            CHECK(xab.elem == xc.elem);
            CHECK(xa.sign * xab.sign == xc.sign);
          }
        }
      }
    }
  }
}

TEST_CASE("operadic suspension of a composition matches the composed suspension") {
  // graded dimensions of L(C o C) and (LC o LC) agree arity by arity
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule C = commutative_module(z, 4);
  SigmaModule lhs = operadic_suspend(composition_product(C, C), 1);
  SigmaModule rhs = composition_product(operadic_suspend(C, 1), operadic_suspend(C, 1));
  for (int r = 1; r <= 4; ++r)
    CHECK(graded_dims(lhs, r) == graded_dims(rhs, r));
}

TEST_CASE("tensor associativity and distribution over composition: graded dims") {
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule C = commutative_module(z, 4);
  SigmaModule L = operadic_suspend(C, 1);

  SigmaModule a1 = tensor_product(tensor_product(C, L), C);
  SigmaModule a2 = tensor_product(C, tensor_product(L, C));
  for (int r = 1; r <= 4; ++r) CHECK(graded_dims(a1, r) == graded_dims(a2, r));

  // (M (x) N) o P = (M o P) (x) (N o P)
  SigmaModule d1 = composition_product(tensor_product(C, C), C);
  SigmaModule d2 = tensor_product(composition_product(C, C), composition_product(C, C));
  for (int r = 1; r <= 4; ++r) CHECK(graded_dims(d1, r) == graded_dims(d2, r));
}

TEST_CASE("product differentials satisfy Leibniz signs: d^2 = 0") {
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule T = toy_module(z);
  SigmaModule TT = tensor_product(T, T);
  SigmaModule ToT = composition_product(T, T);
  for (const SigmaModule* m : {&TT, &ToT}) {
    for (int r = 2; r <= 4; ++r) {
      if (!m->trunc.admits_arity(r)) continue;
      for (const auto& x : m->at(r)) {
        Lin<BasisElement> vx(z);
        vx.add_int(x, 1);
        CHECK(m->diff(m->diff(vx)).is_zero());
      }
    }
  }
  // spot check the mixed sign: d(a(x)a) = b(x)a - a(x)b
  Lin<BasisElement> found(z);
  for (const auto& x : TT.at(4)) {
    if (x.degree != 2) continue;
    Lin<BasisElement> vx(z);
    vx.add_int(x, 1);
    Lin<BasisElement> d = TT.diff(vx);
    REQUIRE(d.terms.size() == 2);
    long sum = 0;
    for (const auto& [k, c] : d.terms) {
      CHECK(k.degree == 1);
      sum += c.encode() == "1" ? 1 : -1;
    }
    CHECK(sum == 0);  // opposite signs
  }
}

TEST_CASE("differential commutes with relabeling on products") {
  exactlin::Ring z = exactlin::Ring::z();
  SigmaModule T = toy_module(z);
  for (SigmaModule m : {composition_product(T, T), tensor_product(T, T)}) {
    for (int r = 2; r <= 3; ++r) {
      for (const auto& x : m.at(r)) {
        Lin<BasisElement> vx(z);
        vx.add_int(x, 1);
        for (const auto& u : all_perms(r))
          CHECK(m.relabel(u, m.diff(vx)) == m.diff(m.relabel(u, vx)));
      }
    }
  }
}

}  // TEST_SUITE
