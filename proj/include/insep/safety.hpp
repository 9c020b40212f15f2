#pragma once
// Safety for a signature (model inseparability from the empty TBox) for
// acyclic EL via direct/indirect dependencies, semantic empty-signature
// locality for Horn fragments, the syntactic bot/top locality grammars,
// and locality-based module extraction.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "insep/interp.hpp"
#include "insep/reasoner.hpp"
#include "insep/syntax.hpp"

namespace insep::safety {

struct SafetyReport {
  bool safe = true;
  std::vector<std::string> direct_witnesses;
  // (defined sigma-name, inducing set of sigma-lhs names)
  std::vector<std::pair<std::string, std::vector<std::string>>>
      indirect_witnesses;
  // sigma-interpretation no model of the TBox restricts to, when synthesis
  // within the search budget succeeds
  std::optional<interp::FiniteInterpretation> countermodel;
};

enum class ModuleKind { BotSyntactic, EmptySemantic };

inline const char* module_kind_name(ModuleKind k) {
  return k == ModuleKind::BotSyntactic ? "bot_syntactic" : "empty_semantic";
}

struct ModuleResult {
  syntax::TBox module;
  std::vector<std::size_t> indices;               // positions in the input
  std::vector<std::vector<std::size_t>> rounds;   // indices added per round
  std::size_t iterations = 0;                     // scan passes incl. final
  ModuleKind kind = ModuleKind::BotSyntactic;
};

namespace detail {

inline void require_acyclic_shape(const syntax::TBox& t, const char* who) {
  std::string why;
  if (!syntax::terminological_shape(t, &why))
    throw std::invalid_argument(std::string(who) + ": " + why);
}

inline bool subset(const std::set<std::string>& a,
                   const std::set<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace detail

// Sigma-names whose dependency closure meets sigma.
inline std::vector<std::string> direct_dependency(
    const syntax::TBox& t, const syntax::Signature& sigma) {
  detail::require_acyclic_shape(t, "direct_dependency");
  std::vector<std::string> out;
  for (const auto& a : sigma.concepts) {
    syntax::Signature dep = syntax::dependencies(t, a);
    bool hit = false;
    for (const auto& c : dep.concepts)
      if (sigma.has_concept(c)) {
        hit = true;
        break;
      }
    if (!hit)
      for (const auto& r : dep.roles)
        if (sigma.has_role(r)) {
          hit = true;
          break;
        }
    if (hit) out.push_back(a);
  }
  return out;
}

// Defined sigma-names whose non-defined definitional dependencies are all
// covered by the dependencies of the other sigma-names on left-hand sides.
// Only the maximal candidate inducing set needs to be tested.
inline std::vector<std::pair<std::string, std::vector<std::string>>>
indirect_dependency(const syntax::TBox& t, const syntax::Signature& sigma) {
  detail::require_acyclic_shape(t, "indirect_dependency");
  std::set<std::string> defined, lhs_sigma;
  for (const auto& ax : t.axioms) {
    if (ax.kind == syntax::AxKind::Equiv) defined.insert(ax.lhs->name);
    if (sigma.has_concept(ax.lhs->name)) lhs_sigma.insert(ax.lhs->name);
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& a : sigma.concepts) {
    if (!defined.count(a)) continue;
    std::set<std::string> inducing = lhs_sigma;
    inducing.erase(a);
    syntax::Signature need =
        syntax::dependencies(t, a, syntax::DepMode::Definitional);
    std::set<std::string> need_concepts;
    for (const auto& c : need.concepts)
      if (!defined.count(c)) need_concepts.insert(c);
    syntax::Signature pool;
    for (const auto& b : inducing) pool.merge(syntax::dependencies(t, b));
    if (detail::subset(need_concepts, pool.concepts) &&
        detail::subset(need.roles, pool.roles))
      out.emplace_back(a, std::vector<std::string>(inducing.begin(),
                                                   inducing.end()));
  }
  return out;
}

namespace detail {

// Exhaustive countermodel synthesis: a sigma-interpretation of domain <= 3
// that no expansion by the remaining symbols turns into a model.
inline std::optional<interp::FiniteInterpretation> find_countermodel(
    const syntax::TBox& t, const syntax::Signature& sigma, int max_domain = 3,
    std::uint64_t work_cap = std::uint64_t(1) << 20) {
  syntax::Signature all = syntax::sig(t);
  std::vector<std::string> sc(sigma.concepts.begin(), sigma.concepts.end());
  std::vector<std::string> sr(sigma.roles.begin(), sigma.roles.end());
  std::vector<std::string> oc, orr;
  for (const auto& c : all.concepts)
    if (!sigma.has_concept(c)) oc.push_back(c);
  for (const auto& r : all.roles)
    if (!sigma.has_role(r)) orr.push_back(r);

  for (int n = 1; n <= max_domain; ++n) {
    std::uint64_t cand_bits = std::uint64_t(n) * sc.size() +
                              std::uint64_t(n) * n * sr.size();
    std::uint64_t ext_bits = std::uint64_t(n) * oc.size() +
                             std::uint64_t(n) * n * orr.size();
    if (cand_bits + ext_bits > 40) break;
    std::uint64_t n_cand = std::uint64_t(1) << cand_bits;
    std::uint64_t n_ext = std::uint64_t(1) << ext_bits;
    if (n_cand > work_cap || n_ext > work_cap || n_cand * n_ext > work_cap)
      break;

    auto build = [n](const std::vector<std::string>& cs,
                     const std::vector<std::string>& rs, std::uint64_t bits,
                     interp::FiniteInterpretation& out) {
      std::uint64_t k = 0;
      for (const auto& c : cs)
        for (int e = 0; e < n; ++e, ++k)
          if (bits >> k & 1) out.set_concept(c, "d" + std::to_string(e));
      for (const auto& r : rs)
        for (int e = 0; e < n; ++e)
          for (int f = 0; f < n; ++f, ++k)
            if (bits >> k & 1)
              out.add_edge(r, "d" + std::to_string(e),
                           "d" + std::to_string(f));
    };

    for (std::uint64_t cand = 0; cand < n_cand; ++cand) {
      bool extendable = false;
      for (std::uint64_t ext = 0; ext < n_ext && !extendable; ++ext) {
        interp::FiniteInterpretation j;
        for (int e = 0; e < n; ++e) j.add_elem("d" + std::to_string(e));
        build(sc, sr, cand, j);
        build(oc, orr, ext, j);
        if (interp::satisfies_tbox(j, t)) extendable = true;
      }
      if (!extendable) {
        interp::FiniteInterpretation i0;
        for (int e = 0; e < n; ++e) i0.add_elem("d" + std::to_string(e));
        build(sc, sr, cand, i0);
        return i0;
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Model inseparability from the empty TBox: safe iff no dependencies.
inline SafetyReport model_insep_empty(const syntax::TBox& t,
                                      const syntax::Signature& sigma) {
  syntax::FragmentReport fr =
      syntax::validate_fragment(t, syntax::FragmentTag::AcyclicEL);
  if (!fr.ok)
    throw reasoner::UnsupportedFragment(
        "model_insep_empty: input is not acyclic EL (axiom " +
        std::to_string(fr.offending[0].first) + ": " +
        fr.offending[0].second + ")");
  SafetyReport rep;
  rep.direct_witnesses = direct_dependency(t, sigma);
  rep.indirect_witnesses = indirect_dependency(t, sigma);
  rep.safe = rep.direct_witnesses.empty() && rep.indirect_witnesses.empty();
  if (!rep.safe) rep.countermodel = detail::find_countermodel(t, sigma);
  return rep;
}

namespace detail {

// C is unsatisfiable w.r.t. the empty TBox (conservative for Not).
inline bool unsat(const syntax::ConceptPtr& c) {
  switch (c->ctor) {
    case syntax::Ctor::Bot:
      return true;
    case syntax::Ctor::And:
      for (const auto& k : c->kids)
        if (unsat(k)) return true;
      return false;
    case syntax::Ctor::Exists:
      return unsat(c->kids[0]);
    default:
      return false;
  }
}

// C is equivalent to Top w.r.t. the empty TBox (conservative).
inline bool taut(const syntax::ConceptPtr& c) {
  switch (c->ctor) {
    case syntax::Ctor::Top:
      return true;
    case syntax::Ctor::And:
      for (const auto& k : c->kids)
        if (!taut(k)) return false;
      return true;
    case syntax::Ctor::Forall:
      return taut(c->kids[0]);
    default:
      return false;
  }
}

// The empty TBox entails C <= D; structural, complete for Horn shapes.
inline bool valid_sub(const syntax::ConceptPtr& c, const syntax::ConceptPtr& d) {
  if (unsat(c) || taut(d)) return true;
  switch (d->ctor) {
    case syntax::Ctor::And:
      for (const auto& k : d->kids)
        if (!valid_sub(c, k)) return false;
      return true;
    case syntax::Ctor::Name:
      for (const auto& p : syntax::flatten_and(c))
        if (p->ctor == syntax::Ctor::Name && p->name == d->name) return true;
      return false;
    case syntax::Ctor::Exists:
      for (const auto& p : syntax::flatten_and(c))
        if (p->ctor == syntax::Ctor::Exists && p->role == d->role &&
            valid_sub(p->kids[0], d->kids[0]))
          return true;
      return false;
    case syntax::Ctor::Forall:
      for (const auto& p : syntax::flatten_and(c))
        if (p->ctor == syntax::Ctor::Forall && p->role == d->role &&
            valid_sub(p->kids[0], d->kids[0]))
          return true;
      return false;
    default:
      return false;  // Bot handled by unsat; the rest fails closed
  }
}

// The empty-signature rewriting: non-sigma concept names and existential
// guards become Bot, non-sigma value restrictions become Top.
inline syntax::ConceptPtr rw_empty(const syntax::ConceptPtr& c,
                                   const syntax::Signature& sigma) {
  switch (c->ctor) {
    case syntax::Ctor::Name:
      return sigma.has_concept(c->name) ? c : syntax::bot();
    case syntax::Ctor::Exists: {
      if (!sigma.has_role(c->role.name)) return syntax::bot();
      syntax::ConceptPtr k = rw_empty(c->kids[0], sigma);
      if (k->ctor == syntax::Ctor::Bot) return syntax::bot();
      return syntax::exists(c->role, k);
    }
    case syntax::Ctor::Forall: {
      if (!sigma.has_role(c->role.name)) return syntax::top();
      return syntax::forall(c->role, rw_empty(c->kids[0], sigma));
    }
    case syntax::Ctor::And: {
      std::vector<syntax::ConceptPtr> kids;
      for (const auto& k : c->kids) {
        syntax::ConceptPtr r = rw_empty(k, sigma);
        if (r->ctor == syntax::Ctor::Bot) return syntax::bot();
        kids.push_back(r);
      }
      return syntax::conj(kids);
    }
    case syntax::Ctor::Or: {
      std::vector<syntax::ConceptPtr> kids;
      for (const auto& k : c->kids) {
        syntax::ConceptPtr r = rw_empty(k, sigma);
        if (r->ctor == syntax::Ctor::Top) return syntax::top();
        kids.push_back(r);
      }
      return syntax::disj(kids);
    }
    case syntax::Ctor::Not: {
      syntax::ConceptPtr k = rw_empty(c->kids[0], sigma);
      if (k->ctor == syntax::Ctor::Bot) return syntax::top();
      if (k->ctor == syntax::Ctor::Top) return syntax::bot();
      return syntax::neg(k);
    }
    default:
      return c;  // Top, Bot
  }
}

inline bool axiom_empty_local(const syntax::Axiom& ax,
                              const syntax::Signature& sigma) {
  if (ax.kind == syntax::AxKind::RSub)
    return !sigma.has_role(ax.r1.name) || ax.r1 == ax.r2;
  syntax::ConceptPtr l = rw_empty(ax.lhs, sigma);
  syntax::ConceptPtr r = rw_empty(ax.rhs, sigma);
  if (ax.kind == syntax::AxKind::Sub) return valid_sub(l, r);
  return valid_sub(l, r) && valid_sub(r, l);
}

inline void require_horn_locality(const syntax::TBox& t, const char* who) {
  for (auto tag :
       {syntax::FragmentTag::EL, syntax::FragmentTag::DLLiteCoreH,
        syntax::FragmentTag::HornALC})
    if (syntax::validate_fragment(t, tag).ok) return;
  throw reasoner::UnsupportedFragment(
      std::string(who) +
      ": semantic locality covers EL, DL-Lite_core^(H), and Horn-ALC only; "
      "use the syntactic grammar for other inputs");
}

}  // namespace detail

// True iff rewriting every non-sigma symbol to its empty extension turns
// each axiom into a tautology.
inline bool semantic_empty_locality(const syntax::TBox& t,
                                    const syntax::Signature& sigma) {
  detail::require_horn_locality(t, "semantic_empty_locality");
  for (const auto& ax : t.axioms)
    if (!detail::axiom_empty_local(ax, sigma)) return false;
  return true;
}

namespace detail {

// bot-locality grammar; unsupported constructors fail closed
inline bool top_gr(const syntax::ConceptPtr& c, const syntax::Signature& s);

inline bool bot_gr(const syntax::ConceptPtr& c, const syntax::Signature& s) {
  switch (c->ctor) {
    case syntax::Ctor::Bot:
      return true;
    case syntax::Ctor::Name:
      return !s.has_concept(c->name);
    case syntax::Ctor::Not:
      return top_gr(c->kids[0], s);
    case syntax::Ctor::And:
      for (const auto& k : c->kids)
        if (bot_gr(k, s)) return true;
      return false;
    case syntax::Ctor::Exists:
      return !s.has_role(c->role.name) || bot_gr(c->kids[0], s);
    default:
      return false;
  }
}

inline bool top_gr(const syntax::ConceptPtr& c, const syntax::Signature& s) {
  switch (c->ctor) {
    case syntax::Ctor::Top:
      return true;
    case syntax::Ctor::Not:
      return bot_gr(c->kids[0], s);
    case syntax::Ctor::And:
      for (const auto& k : c->kids)
        if (!top_gr(k, s)) return false;
      return true;
    default:
      return false;
  }
}

// dual (top-locality) grammar: non-sigma symbols read as universal
inline bool dual_bot(const syntax::ConceptPtr& c, const syntax::Signature& s);

inline bool dual_top(const syntax::ConceptPtr& c, const syntax::Signature& s) {
  switch (c->ctor) {
    case syntax::Ctor::Top:
      return true;
    case syntax::Ctor::Name:
      return !s.has_concept(c->name);
    case syntax::Ctor::Not:
      return dual_bot(c->kids[0], s);
    case syntax::Ctor::And:
      for (const auto& k : c->kids)
        if (!dual_top(k, s)) return false;
      return true;
    case syntax::Ctor::Forall:
      return !s.has_role(c->role.name) || dual_top(c->kids[0], s);
    case syntax::Ctor::Exists:
      return !s.has_role(c->role.name) && dual_top(c->kids[0], s);
    default:
      return false;
  }
}

inline bool dual_bot(const syntax::ConceptPtr& c, const syntax::Signature& s) {
  switch (c->ctor) {
    case syntax::Ctor::Bot:
      return true;
    case syntax::Ctor::Not:
      return dual_top(c->kids[0], s);
    case syntax::Ctor::And:
      for (const auto& k : c->kids)
        if (dual_bot(k, s)) return true;
      return false;
    case syntax::Ctor::Exists:
      return dual_bot(c->kids[0], s);
    default:
      return false;
  }
}

}  // namespace detail

inline bool syntactic_bot_locality(const syntax::Axiom& ax,
                                   const syntax::Signature& sigma) {
  if (ax.kind == syntax::AxKind::RSub)
    return !sigma.has_role(ax.r1.name) || ax.r1 == ax.r2;
  bool fwd = detail::bot_gr(ax.lhs, sigma) || detail::top_gr(ax.rhs, sigma);
  if (ax.kind == syntax::AxKind::Sub) return fwd;
  return fwd && (detail::bot_gr(ax.rhs, sigma) || detail::top_gr(ax.lhs, sigma));
}

inline bool syntactic_bot_locality(const syntax::TBox& t,
                                   const syntax::Signature& sigma) {
  for (const auto& ax : t.axioms)
    if (!syntactic_bot_locality(ax, sigma)) return false;
  return true;
}

inline bool syntactic_top_locality(const syntax::Axiom& ax,
                                   const syntax::Signature& sigma) {
  if (ax.kind == syntax::AxKind::RSub)
    return !sigma.has_role(ax.r2.name) || ax.r1 == ax.r2;
  bool fwd = detail::dual_bot(ax.lhs, sigma) || detail::dual_top(ax.rhs, sigma);
  if (ax.kind == syntax::AxKind::Sub) return fwd;
  return fwd &&
         (detail::dual_bot(ax.rhs, sigma) || detail::dual_top(ax.lhs, sigma));
}

inline bool syntactic_top_locality(const syntax::TBox& t,
                                   const syntax::Signature& sigma) {
  for (const auto& ax : t.axioms)
    if (!syntactic_top_locality(ax, sigma)) return false;
  return true;
}

// Iteratively add every axiom that is non-local w.r.t. sigma plus the
// module signature; the remainder is local by construction (depleting).
inline ModuleResult extract_module(const syntax::TBox& t,
                                   const syntax::Signature& sigma,
                                   ModuleKind kind) {
  if (kind == ModuleKind::EmptySemantic)
    detail::require_horn_locality(t, "extract_module");
  ModuleResult res;
  res.kind = kind;
  std::vector<bool> in_mod(t.axioms.size(), false);
  syntax::Signature env = sigma;
  for (;;) {
    ++res.iterations;
    std::vector<std::size_t> added;
    for (std::size_t i = 0; i < t.axioms.size(); ++i) {
      if (in_mod[i]) continue;
      bool local = kind == ModuleKind::BotSyntactic
                       ? syntactic_bot_locality(t.axioms[i], env)
                       : detail::axiom_empty_local(t.axioms[i], env);
      if (!local) added.push_back(i);
    }
    if (added.empty()) break;
    for (std::size_t i : added) {
      in_mod[i] = true;
      env.merge(syntax::sig(syntax::TBox{{t.axioms[i]}, {}}));
    }
    res.rounds.push_back(std::move(added));
  }
  for (std::size_t i = 0; i < t.axioms.size(); ++i)
    if (in_mod[i]) {
      res.indices.push_back(i);
      res.module.axioms.push_back(t.axioms[i]);
    }
  return res;
}

}  // namespace insep::safety
