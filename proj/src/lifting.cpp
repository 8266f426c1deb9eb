#include "enbar/lifting.hpp"

#include <json.hpp>

#include <algorithm>
#include <climits>

namespace enbar::lifting {

using operads::comm_elem;
using operads::elem_simplex;
using operads::simplex_elem;
using symseq::Bijection;
using symseq::FiniteSet;
using symseq::SignedElement;

LiftContext lift_context(Ring ring, int level, int arity_max) {
  if (level < 1) throw ContractError("lift_context: level must be >= 1");
  if (arity_max < 1) throw ContractError("lift_context: arity_max must be >= 1");
  LiftContext ctx;
  ctx.ring = ring;
  ctx.level = level;
  ctx.arity_max = arity_max;
  // gamma owns the composite registry of T^n o C; reuse its pieces so that
  // split() works across everything built from this context
  ctx.gamma = barcx::build_gamma(ring, level, arity_max);
  ctx.comm = ctx.gamma.target;
  ctx.tn = ctx.gamma.tn;
  ctx.mod_c = ctx.gamma.mod;
  ctx.be = operads::barratt_eccles(ring, INT_MAX, INT_MAX);
  ctx.en = ctx.be;
  ctx.en.module = operads::en_suboperad_module(ring, level, arity_max);
  ctx.mod_e = symseq::composition_module(ctx.tn, ctx.be.module);
  ctx.mod_en = symseq::composition_module(ctx.tn, ctx.en.module);
  return ctx;
}

LinT project_to_comm(const LiftContext& ctx, const LinT& z) {
  LinT out(ctx.ring);
  for (const auto& [e, c] : z.terms) {
    auto [x, ps] = ctx.mod_e.split(e);
    std::vector<BasisElement> qs;
    bool dead = false;
    for (const auto& p : ps) {
      if (p.degree > 0) {  // eps kills positive-degree simplices
        dead = true;
        break;
      }
      qs.push_back(comm_elem(p.inputs));
    }
    if (dead) continue;
    SignedElement made = ctx.mod_c.make(x, qs);
    if (made.sign == 0) continue;
    out.add(made.elem, made.sign > 0 ? c : -c);
  }
  return out;
}

LinT include_from_comm(const LiftContext& ctx, const LinT& z) {
  LinT out(ctx.ring);
  for (const auto& [e, c] : z.terms) {
    auto [x, ps] = ctx.mod_c.split(e);
    std::vector<BasisElement> qs;
    for (const auto& p : ps)
      qs.push_back(simplex_elem(Simplex{{Perm::increasing(p.inputs)}}));
    SignedElement made = ctx.mod_e.make(x, qs);
    if (made.sign == 0) continue;
    out.add(made.elem, made.sign > 0 ? c : -c);
  }
  return out;
}

LinT nu_tilde(const LiftContext& ctx, const LinT& z) {
  LinT out(ctx.ring);
  for (const auto& [e, c] : z.terms) {
    auto [x, ps] = ctx.mod_e.split(e);
    int r = (int)ps.size();
    // Koszul evaluation sign of the degree-one nu moving past the word part
    // and the arguments it skips; the skipped arguments must survive
    // iota.eps, so only degree-zero ones ever contribute to the exponent
    int skipped = x.degree;
    for (int i = 0; i < r; ++i) {
      LinE single(ctx.ring);
      single.add_int(ps[i], 1);
      LinE nup = operads::be_nu(ctx.ring, single);  // appends increasing
      for (const auto& [q, qc] : nup.terms) {
        std::vector<BasisElement> args;
        for (int j = 0; j < i; ++j)
          args.push_back(
              simplex_elem(Simplex{{Perm::increasing(ps[j].inputs)}}));
        args.push_back(q);
        for (int j = i + 1; j < r; ++j) args.push_back(ps[j]);
        SignedElement made = ctx.mod_e.make(x, args);
        if (made.sign == 0) continue;
        int sgn = (skipped % 2 == 0 ? 1 : -1) * made.sign;
        out.add(made.elem, c * qc * Scalar(ctx.ring, sgn));
      }
      if (ps[i].degree > 0) break;  // iota.eps kills every later term
      skipped += ps[i].degree;
    }
  }
  return out;
}

LiftedTwist lift_twisting(const LiftContext& ctx) {
  LiftedTwist out;
  out.hom.ring = ctx.ring;
  out.hom.level = ctx.level;
  out.hom.target = ctx.be;
  out.hom.tn = ctx.tn;
  out.hom.mod = ctx.mod_e;

  std::vector<std::string> gens;
  int mmax = 0;
  for (int r = 1; r <= ctx.arity_max; ++r)
    for (const auto& g : barcx::generator_words(ctx.level, r)) {
      gens.push_back(g.encode());
      // stage m lowers the word-part degree by m+1 and words of arity >= 1
      // have degree >= level, so later stages vanish identically
      mmax = std::max(mmax, g.degree() - 1 - ctx.level);
    }

  out.stages.assign(mmax + 1, {});
  for (const auto& g : gens)
    out.stages[0].emplace(g, include_from_comm(ctx, ctx.gamma.table.at(g)));

  std::vector<TwistingHom> stage_hom(mmax + 1, out.hom);
  stage_hom[0].table = out.stages[0];
  for (int m = 1; m <= mmax; ++m) {
    for (const auto& g : gens) {
      LinT acc(ctx.ring);
      for (int p = 0; p <= m - 1; ++p) {
        const LinT& aq = out.stages[m - 1 - p].at(g);
        if (aq.is_zero()) continue;
        acc += barcx::apply_twist(stage_hom[p], aq);
      }
      // delta(nu~ R) = R - iota~ proj R - nu~ delta R and the obstruction R
      // is a cycle killed by proj, so -nu~ R solves delta(alpha_m) = -R_m
      out.stages[m].emplace(g, nu_tilde(ctx, acc).scaled_int(-1));
    }
    stage_hom[m].table = out.stages[m];
  }

  for (const auto& g : gens) {
    LinT total(ctx.ring);
    for (const auto& st : out.stages) total += st.at(g);
    out.hom.table.emplace(g, std::move(total));
  }
  return out;
}

bool composite_in_cell_over_e(const CompositionModule& mod,
                              const BasisElement& e, const KGraph& kappa) {
  auto [x, ps] = mod.split(e);
  std::vector<KGraph> pis;
  for (const auto& p : ps) pis.push_back(operads::min_cell(elem_simplex(p)));
  KGraph cell = operads::kgraph_compose(
      barcx::word_min_cell(barcx::elem_word(x)), pis);
  return operads::kgraph_leq(cell, kappa);
}

TwistingHom restrict_to_en(const LiftContext& ctx, const TwistingHom& hom) {
  TwistingHom out;
  out.ring = hom.ring;
  out.level = hom.level;
  out.target = ctx.en;
  out.tn = hom.tn;
  out.mod = ctx.mod_en;
  for (const auto& [glabel, val] : hom.table) {
    KGraph kappa = barcx::word_min_cell(LevelWord::parse(glabel));
    LinT moved(ctx.ring);
    for (const auto& [e, c] : val.terms) {
      auto [x, ps] = ctx.mod_e.split(e);
      for (const auto& p : ps) {
        Simplex s = elem_simplex(p);
        int lvl = operads::filtration_level(s);
        if (lvl > ctx.level)
          throw ContractError(
              "restriction to E_" + std::to_string(ctx.level) +
              " fails on generator " + glabel + ": simplex " + s.encode() +
              " has filtration level " + std::to_string(lvl));
      }
      if (!composite_in_cell_over_e(ctx.mod_e, e, kappa))
        throw ContractError("restriction to E_" + std::to_string(ctx.level) +
                            " fails on generator " + glabel + ": composite " +
                            e.label + " leaves the minimal cell " +
                            kappa.encode());
      SignedElement made = ctx.mod_en.make(x, ps);
      if (made.sign == 0)
        throw ContractError("restriction to E_" + std::to_string(ctx.level) +
                            ": composite " + e.label +
                            " dropped by the E_n truncation");
      moved.add(made.elem, made.sign > 0 ? c : -c);
    }
    out.table.emplace(glabel, std::move(moved));
  }
  return out;
}

LinE cup_product(Ring ring, int m) {
  if (m < 0) throw ContractError("cup_product: m must be >= 0");
  FiniteSet e{1, 2};
  LinE ups(ring);
  ups.add_int(simplex_elem(Simplex{{Perm::increasing(e)}}), 1);  // iota(mu)
  Bijection tau = Bijection::from_values({2, 1});
  for (int k = 1; k <= m; ++k) {
    LinE z = ups;
    for (const auto& [s, c] : ups.terms)
      z.add(simplex_elem(elem_simplex(s).relabeled(tau)),
            k % 2 == 0 ? c : -c);
    ups = operads::be_nu(ring, z);
  }
  return ups;
}

LinE cup_cycle(Ring ring, int m) {
  LinE ups = cup_product(ring, m);
  Bijection tau = Bijection::from_values({2, 1});
  LinE out = ups;
  for (const auto& [s, c] : ups.terms)
    out.add(simplex_elem(elem_simplex(s).relabeled(tau)),
            m % 2 == 0 ? -c : c);
  return out;
}

LevelWord tensor_split_word(int n, int m, int e1, int e2) {
  if (m < 1 || m > n)
    throw ContractError("tensor_split_word: need 1 <= m <= n");
  auto chain = [](int lvl, int e) {
    LevelWord w = LevelWord::leaf_word({e});
    for (int l = 1; l <= lvl; ++l) w = LevelWord::node(l, {w});
    return w;
  };
  LevelWord w = LevelWord::node(m, {chain(m - 1, e1), chain(m - 1, e2)});
  for (int l = m + 1; l <= n; ++l) w = LevelWord::node(l, {w});
  return w;
}

std::string twist_json(const TwistingHom& h) {
  nlohmann::ordered_json j;
  j["level"] = h.level;
  j["ring"] = h.ring.encode();
  j["target"] = h.target.module.name;
  auto gens = nlohmann::ordered_json::array();
  for (const auto& [g, val] : h.table) {
    auto terms = nlohmann::ordered_json::array();
    for (const auto& [e, c] : val.terms) {
      auto [x, ps] = h.mod.split(e);
      nlohmann::ordered_json t;
      t["coef"] = c.encode();
      t["word"] = x.label;
      auto args = nlohmann::ordered_json::array();
      for (const auto& p : ps)
        args.push_back(symseq::encode_set(p.inputs) + ":" + p.label);
      t["args"] = args;
      terms.push_back(std::move(t));
    }
    gens.push_back(nlohmann::ordered_json{{"generator", g},
                                          {"value", std::move(terms)}});
  }
  j["generators"] = std::move(gens);
  return j.dump(2) + "\n";
}

}  // namespace enbar::lifting
