#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "enbar/lifting.hpp"

using namespace enbar;
using namespace enbar::lifting;
using barcx::LevelWord;
using barcx::LinT;
using barcx::TwistingHom;
using exactlin::Ring;
using exactlin::Scalar;
using operads::LinE;
using operads::Perm;
using operads::Simplex;
using symseq::BasisElement;
using symseq::FiniteSet;
using symseq::SignedElement;

namespace {

LinT lone(Ring rg, const SignedElement& se) {
  LinT out(rg);
  REQUIRE(se.sign != 0);
  out.add_int(se.elem, se.sign);
  return out;
}

BasisElement be_unit(int i) {
  return operads::simplex_elem(Simplex{{Perm{{i}}}});
}

// word of T^n as a composite with unit arguments attached to the leaves
LinT unit_composite(const LiftContext& ctx, const LevelWord& w) {
  std::vector<BasisElement> args;
  for (int i : w.inputs()) args.push_back(be_unit(i));
  return lone(ctx.ring, ctx.mod_e.make(barcx::word_elem(w), args));
}

LinT words_to_unit_composites(const LiftContext& ctx,
                              const barcx::WordSum& ws) {
  LinT out(ctx.ring);
  for (const auto& [w, c] : ws.terms) {
    std::vector<BasisElement> args;
    for (int i : w.inputs()) args.push_back(be_unit(i));
    SignedElement se = ctx.mod_e.make(barcx::word_elem(w), args);
    REQUIRE(se.sign == 1);
    out.add(se.elem, c);
  }
  return out;
}

Simplex random_simplex(std::mt19937& rng, const FiniteSet& e, int dmax) {
  int d = e.size() == 1 ? 0 : std::uniform_int_distribution<int>(0, dmax)(rng);
  Simplex s;
  for (int i = 0; i <= d; ++i) {
    Perm w{e};
    do {
      std::shuffle(w.order.begin(), w.order.end(), rng);
    } while (i > 0 && w.order == s.words[i - 1].order);
    s.words.push_back(w);
  }
  return s;
}

// random composite of T^n o E on the ground set {1..size}
LinT random_composite(const LiftContext& ctx, std::mt19937& rng, int size,
                      int dmax) {
  FiniteSet ground = symseq::canonical_set(size);
  int blocks = std::uniform_int_distribution<int>(1, size)(rng);
  auto parts = symseq::set_partitions(ground, blocks);
  auto part = parts[std::uniform_int_distribution<std::size_t>(
      0, parts.size() - 1)(rng)];
  auto words = barcx::enumerate_words(ctx.level, symseq::canonical_set(blocks));
  auto w = words[std::uniform_int_distribution<std::size_t>(
      0, words.size() - 1)(rng)];
  std::vector<BasisElement> args;
  for (const auto& b : part)
    args.push_back(operads::simplex_elem(random_simplex(rng, b, dmax)));
  SignedElement se = ctx.mod_e.make(barcx::word_elem(w), args);
  REQUIRE(se.sign == 1);  // blocks already min-sorted by set_partitions
  return lone(ctx.ring, se);
}

LinT sub(const LinT& a, const LinT& b) {
  LinT out = a;
  out += b.scaled_int(-1);
  return out;
}

LinE tau_relabel(Ring rg, const LinE& v) {
  symseq::Bijection tau = symseq::Bijection::from_values({2, 1});
  LinE out(rg);
  for (const auto& [s, c] : v.terms)
    out.add(operads::simplex_elem(operads::elem_simplex(s).relabeled(tau)), c);
  return out;
}

LinE lin_simplex(Ring rg, const std::string& enc, long c = 1) {
  LinE out(rg);
  out.add_int(operads::simplex_elem(Simplex::parse(enc)), c);
  return out;
}

}  // namespace

TEST_SUITE("lifting") {

TEST_CASE("context projections and section") {
  Ring rg = Ring::z();
  for (int n : {1, 2}) {
    LiftContext ctx = lift_context(rg, n, 3);
    // project . include = id on composites over C, for every word and every
    // one-block/two-block split of the ground set
    for (const auto& w : barcx::enumerate_words(n, symseq::canonical_set(2))) {
      SignedElement se = ctx.mod_c.make(
          barcx::word_elem(w),
          {operads::comm_elem({1}), operads::comm_elem({2})});
      LinT z = lone(rg, se);
      CHECK(project_to_comm(ctx, include_from_comm(ctx, z)) == z);
    }
    for (const auto& w : barcx::enumerate_words(n, symseq::canonical_set(1))) {
      SignedElement se =
          ctx.mod_c.make(barcx::word_elem(w), {operads::comm_elem({1, 2, 3})});
      LinT z = lone(rg, se);
      CHECK(project_to_comm(ctx, include_from_comm(ctx, z)) == z);
    }
    // positive-degree arguments die under the projection
    LevelWord w = barcx::generator_words(n, 1).front();
    SignedElement se = ctx.mod_e.make(
        barcx::word_elem(w),
        {operads::simplex_elem(Simplex::parse("[213|123]"))});
    CHECK(project_to_comm(ctx, lone(rg, se)).is_zero());
  }
}

TEST_CASE("nu-tilde is a contracting homotopy") {
  Ring rg = Ring::z();
  std::mt19937 rng(515253);
  for (int n : {1, 2}) {
    LiftContext ctx = lift_context(rg, n, 3);
    auto delta = [&](const LinT& v) { return ctx.mod_e.module.diff(v); };
    for (int trial = 0; trial < 25; ++trial) {
      int size = std::uniform_int_distribution<int>(1, 3)(rng);
      LinT z = random_composite(ctx, rng, size, 2);
      // delta nu~ + nu~ delta = id - iota~ proj
      LinT lhs = delta(nu_tilde(ctx, z));
      lhs += nu_tilde(ctx, delta(z));
      LinT rhs = sub(z, include_from_comm(ctx, project_to_comm(ctx, z)));
      CHECK(lhs == rhs);
      // proj nu~ = 0
      CHECK(project_to_comm(ctx, nu_tilde(ctx, z)).is_zero());
    }
  }
}

TEST_CASE("lifted twist: stages and frozen table at n=2") {
  Ring rg = Ring::z();
  LiftContext ctx = lift_context(rg, 2, 2);
  LiftedTwist lift = lift_twisting(ctx);

  // stage zero is iota~ gamma, and the projection recovers gamma exactly:
  // higher stages start with nu~ and die under K o eps
  for (const auto& [g, val] : lift.hom.table) {
    CHECK(lift.stages[0].at(g) ==
          include_from_comm(ctx, ctx.gamma.table.at(g)));
    CHECK(project_to_comm(ctx, val) == ctx.gamma.table.at(g));
    for (std::size_t m = 1; m < lift.stages.size(); ++m)
      CHECK(project_to_comm(ctx, lift.stages[m].at(g)).is_zero());
  }

  // frozen values.  deg ((1))((2)) = 4 so the stages stop at m = 1.
  CHECK(lift.stages.size() == 2);
  CHECK(lift.hom.table.at("((1))").is_zero());

  LinT v_sep(rg);  // iota mu on the merged leaves
  v_sep.add_int(ctx.mod_e
                    .make(barcx::word_elem(LevelWord::parse("((1))")),
                          {operads::simplex_elem(Simplex::parse("[12]"))})
                    .elem,
                1);
  CHECK(lift.hom.table.at("((1)(2))") == v_sep);

  LinT v_top(rg);  // word terms of the shuffle plus the first cup product
  v_top.add_int(ctx.mod_e
                    .make(barcx::word_elem(LevelWord::parse("((1)(2))")),
                          {be_unit(1), be_unit(2)})
                    .elem,
                1);
  v_top.add_int(ctx.mod_e
                    .make(barcx::word_elem(LevelWord::parse("((2)(1))")),
                          {be_unit(1), be_unit(2)})
                    .elem,
                -1);
  v_top.add_int(ctx.mod_e
                    .make(barcx::word_elem(LevelWord::parse("((1))")),
                          {operads::simplex_elem(Simplex::parse("[21|12]"))})
                    .elem,
                -1);
  CHECK(lift.hom.table.at("((1))((2))") == v_top);
}

TEST_CASE("twisted differential squares to zero") {
  for (Ring rg : {Ring::z(), Ring::fp(2)}) {
    for (auto [n, rmax] : {std::pair{1, 4}, {2, 3}}) {
      LiftContext ctx = lift_context(rg, n, rmax);
      LiftedTwist lift = lift_twisting(ctx);
      for (int r = 1; r <= rmax; ++r)
        for (const auto& g : barcx::generator_words(n, r)) {
          LinT z = unit_composite(ctx, g);
          CHECK(barcx::twisted_diff(lift.hom,
                                    barcx::twisted_diff(lift.hom, z))
                    .is_zero());
        }
      // composites with positive-degree arguments exercise every Koszul sign
      std::mt19937 rng(606162 + n);
      for (int trial = 0; trial < 15; ++trial) {
        LinT z = random_composite(ctx, rng, 3, 2);
        CHECK(barcx::twisted_diff(lift.hom, barcx::twisted_diff(lift.hom, z))
                  .is_zero());
      }
    }
  }
  // one deeper level over Z
  LiftContext ctx = lift_context(Ring::z(), 3, 3);
  LiftedTwist lift = lift_twisting(ctx);
  for (int r = 1; r <= 3; ++r)
    for (const auto& g : barcx::generator_words(3, r)) {
      LinT z = unit_composite(ctx, g);
      CHECK(barcx::twisted_diff(lift.hom, barcx::twisted_diff(lift.hom, z))
                .is_zero());
    }
}

TEST_CASE("projection intertwines the lifted and commutative differentials") {
  Ring rg = Ring::z();
  std::mt19937 rng(717273);
  for (int n : {1, 2}) {
    LiftContext ctx = lift_context(rg, n, 3);
    LiftedTwist lift = lift_twisting(ctx);
    for (int trial = 0; trial < 20; ++trial) {
      LinT z = random_composite(ctx, rng, 3, 2);
      LinT lhs = project_to_comm(ctx, barcx::twisted_diff(lift.hom, z));
      LinT rhs = barcx::twisted_diff(ctx.gamma, project_to_comm(ctx, z));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("level-one lift lands in degree zero") {
  LiftContext ctx = lift_context(Ring::z(), 1, 4);
  LiftedTwist lift = lift_twisting(ctx);
  for (const auto& [g, val] : lift.hom.table) {
    for (const auto& [e, c] : val.terms) {
      auto [x, ps] = ctx.mod_e.split(e);
      for (const auto& p : ps) CHECK(p.degree == 0);
    }
    for (std::size_t m = 1; m < lift.stages.size(); ++m)
      CHECK(lift.stages[m].at(g).is_zero());
  }
}

TEST_CASE("suspension embeds the lifted twists") {
  Ring rg = Ring::z();
  for (int n : {2, 3}) {
    int rmax = n == 2 ? 3 : 2;
    LiftContext lo = lift_context(rg, n - 1, rmax);
    LiftContext hi = lift_context(rg, n, rmax);
    LiftedTwist llo = lift_twisting(lo);
    LiftedTwist lhi = lift_twisting(hi);
    for (int r = 1; r <= rmax; ++r)
      for (const auto& g : barcx::generator_words(n - 1, r)) {
        LevelWord sg = barcx::suspension_word(g);
        LinT expected = barcx::suspension_on_composites(
                            lo.mod_e, hi.mod_e, llo.hom.table.at(g.encode()))
                            .scaled_int(-1);
        CHECK(lhi.hom.table.at(sg.encode()) == expected);
      }
  }
}

TEST_CASE("cup products") {
  Ring rg = Ring::z();
  // frozen ladder
  CHECK(cup_product(rg, 0) == lin_simplex(rg, "[12]"));
  CHECK(cup_product(rg, 1) == lin_simplex(rg, "[21|12]"));
  CHECK(cup_product(rg, 2) == lin_simplex(rg, "[12|21|12]"));
  CHECK(cup_product(rg, 3) == lin_simplex(rg, "[21|12|21|12]"));

  Operad be = operads::barratt_eccles(rg, 4, 8);
  for (int m = 1; m <= 4; ++m) {
    LinE ups = cup_product(rg, m);
    for (const auto& [s, c] : ups.terms) {
      CHECK(s.degree == m);
      CHECK(operads::filtration_level(operads::elem_simplex(s)) == m + 1);
    }
    // delta(upsilon_m) = upsilon_{m-1} + (-1)^m tau upsilon_{m-1}
    LinE prev = cup_product(rg, m - 1);
    LinE rhs = prev;
    rhs += tau_relabel(rg, prev).scaled_int(m % 2 == 0 ? 1 : -1);
    CHECK(be.module.diff(ups) == rhs);
    CHECK(be.module.diff(cup_cycle(rg, m)).is_zero());
  }

  // the cycle generates H_{n-1}(E_n(2)): E_n(2) stops in degree n-1, so the
  // homology there is the kernel of the differential, which is one rank
  for (int n : {2, 3}) {
    SigmaModule en = operads::en_suboperad_module(rg, n, 2);
    std::vector<BasisElement> top;
    for (const auto& b : en.at(2))
      if (b.degree == n - 1) top.push_back(b);
    CHECK((int)top.size() == 2);
    LinE lam = cup_cycle(rg, n - 1);
    // lam is supported on both top basis elements and spans the kernel
    CHECK(lam.terms.size() == 2);
    for (const auto& b : top) REQUIRE(lam.terms.count(b) == 1);
    // kernel rank: delta on the two top elements has rank 1, so ker = 1
    exactlin::SparseMatrix d(rg, en.dim(2, n - 2), 2);
    std::map<BasisElement, int> row;
    int ri = 0;
    for (const auto& b : en.at(2))
      if (b.degree == n - 2) row[b] = ri++;
    for (int j = 0; j < 2; ++j) {
      LinE img(rg);
      img.add_int(top[j], 1);
      for (const auto& [b, c] : en.diff(img).terms) d.set(row.at(b), j, c);
    }
    CHECK(exactlin::rank(d) == 1);
  }
}

TEST_CASE("tensor split words and the Chevalley differential") {
  CHECK(tensor_split_word(2, 1, 1, 2).encode() == "((1)(2))");
  CHECK(tensor_split_word(2, 2, 1, 2).encode() == "((1))((2))");
  CHECK(tensor_split_word(3, 2, 1, 2).encode() == "(((1))((2)))");
  CHECK(tensor_split_word(3, 3, 1, 2).encode() == "(((1)))(((2)))");

  Ring rg = Ring::z();
  for (int n : {2, 3}) {
    LiftContext ctx = lift_context(rg, n, 2);
    LiftedTwist lift = lift_twisting(ctx);
    LevelWord triv = tensor_split_word(n, 1, 1, 2);  // not split: arity-1 top
    // the split at level m contributes the cup product upsilon_{m-1} on the
    // merged pair, attached to the arity-1 word
    BasisElement one_word =
        barcx::word_elem(barcx::generator_words(n, 1).front());
    for (int m = 1; m <= n; ++m) {
      LevelWord w = tensor_split_word(n, m, 1, 2);
      const LinT& val = lift.hom.table.at(w.encode());
      LinE cup = cup_product(rg, m - 1);
      LinT cup_part(rg);
      for (const auto& [s, c] : cup.terms) {
        SignedElement se = ctx.mod_e.make(one_word, {s});
        REQUIRE(se.sign == 1);
        cup_part.add(se.elem, c);
      }
      // exactly the arity-one terms of the differential
      LinT arity_one(rg);
      for (const auto& [e, c] : val.terms)
        if (ctx.mod_e.split(e).second.size() == 1) arity_one.add(e, c);
      CHECK(arity_one ==
            cup_part.scaled_int((n + m - 1) % 2 == 0 ? 1 : -1));
    }
    // the product of the two arity-one words maps to the bracket cycle
    barcx::WordSum prod = barcx::shuffle_words(
        rg, barcx::generator_words(n, 1).front(),
        barcx::relabel_word(symseq::Bijection{{1}, {2}},
                            barcx::generator_words(n, 1).front()));
    LinT z = words_to_unit_composites(ctx, prod);
    LinT dz = barcx::twisted_diff(lift.hom, z);
    LinT lam_part(rg);
    for (const auto& [s, c] : cup_cycle(rg, n - 1).terms) {
      SignedElement se = ctx.mod_e.make(one_word, {s});
      REQUIRE(se.sign == 1);
      lam_part.add(se.elem, c);
    }
    CHECK(dz == lam_part.scaled_int(-1));
  }
}

TEST_CASE("restriction to E_n") {
  Ring rg = Ring::z();
  for (auto [n, rmax] : {std::pair{1, 4}, {2, 3}, {3, 3}}) {
    LiftContext ctx = lift_context(rg, n, rmax);
    LiftedTwist lift = lift_twisting(ctx);
    TwistingHom res = restrict_to_en(ctx, lift.hom);
    CHECK(res.table.size() == lift.hom.table.size());
    for (const auto& [g, val] : res.table) {
      for (const auto& [e, c] : val.terms) {
        auto [x, ps] = ctx.mod_en.split(e);
        for (const auto& p : ps)
          CHECK(operads::filtration_level(operads::elem_simplex(p)) <= n);
      }
      // same coefficients as before the restriction
      CHECK(val.terms.size() == lift.hom.table.at(g).terms.size());
    }
    // the restricted twist still squares to zero over the E_n module
    for (int r = 1; r <= rmax; ++r)
      for (const auto& g : barcx::generator_words(n, r)) {
        std::vector<BasisElement> args;
        for (int i : g.inputs()) args.push_back(be_unit(i));
        LinT z = lone(rg, ctx.mod_en.make(barcx::word_elem(g), args));
        CHECK(barcx::twisted_diff(res, barcx::twisted_diff(res, z)).is_zero());
      }
  }

  // violations are reported with the generator and the offending simplex
  LiftContext ctx = lift_context(rg, 2, 2);
  LiftedTwist lift = lift_twisting(ctx);
  TwistingHom bad = lift.hom;
  LinT v(rg);
  v.add_int(ctx.mod_e
                .make(barcx::word_elem(LevelWord::parse("((1))")),
                      {operads::simplex_elem(Simplex::parse("[12|21|12]"))})
                .elem,
            1);
  bad.table.insert_or_assign("((1))((2))", v);
  try {
    restrict_to_en(ctx, bad);
    FAIL("filtration violation not detected");
  } catch (const ContractError& err) {
    std::string msg = err.what();
    CHECK(msg.find("((1))((2))") != std::string::npos);
    CHECK(msg.find("[12|21|12]") != std::string::npos);
    CHECK(msg.find("filtration") != std::string::npos);
  }
  // a filtration-legal simplex can still sit in the wrong cell
  TwistingHom bad2 = lift.hom;
  LinT v2(rg);
  v2.add_int(ctx.mod_e
                 .make(barcx::word_elem(LevelWord::parse("((1))")),
                       {operads::simplex_elem(Simplex::parse("[21]"))})
                 .elem,
             1);
  bad2.table.insert_or_assign("((1)(2))", v2);
  try {
    restrict_to_en(ctx, bad2);
    FAIL("cell violation not detected");
  } catch (const ContractError& err) {
    std::string msg = err.what();
    CHECK(msg.find("((1)(2))") != std::string::npos);
    CHECK(msg.find("minimal cell") != std::string::npos);
  }
}

TEST_CASE("golden table and determinism") {
  Ring rg = Ring::z();
  LiftContext ctx = lift_context(rg, 2, 3);
  std::string js = twist_json(lift_twisting(ctx).hom);
  // rebuilding from scratch gives the identical serialization
  LiftContext ctx2 = lift_context(rg, 2, 3);
  CHECK(twist_json(lift_twisting(ctx2).hom) == js);

  std::filesystem::path golden =
      std::filesystem::path(ENBAR_GOLDEN_DIR) / "eps_n2.json";
  if (!std::filesystem::exists(golden)) {
    std::ofstream out(golden);
    out << js;
    FAIL("golden file was missing; wrote " << golden.string()
                                           << " -- rerun the suite");
  }
  std::ifstream in(golden);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == js);
}

}  // TEST_SUITE
