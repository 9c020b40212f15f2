#pragma once
// Saturation-based reasoning: EL completion (subsumption, classification,
// canonical models), Horn-ALC normalization and type saturation, DL-Lite
// basic-concept closure, role hierarchies, KB consistency.

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "insep/interp.hpp"
#include "insep/syntax.hpp"

namespace insep::reasoner {

constexpr std::size_t kDefaultBudget = 10'000'000;
constexpr std::size_t kDefaultWitnessCap = 65'536;

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedFragment : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using SubsumptionMap = std::map<std::string, std::set<std::string>>;

// ---------------------------------------------------------- role hierarchy

// Reflexive-transitive closure of the declared role inclusions, closed under
// inverses: r <= s implies r^- <= s^-.
class RoleHierarchy {
 public:
  RoleHierarchy() = default;

  explicit RoleHierarchy(const syntax::TBox& t) {
    std::map<Key, std::set<Key>> edges;
    for (const auto& ax : t.axioms) {
      if (ax.kind != syntax::AxKind::RSub) continue;
      roles_.insert(ax.r1.name);
      roles_.insert(ax.r2.name);
      edges[key(ax.r1)].insert(key(ax.r2));
      edges[key(ax.r1.inverse())].insert(key(ax.r2.inverse()));
    }
    for (const auto& [from, _] : edges) {
      std::set<Key> seen{from};
      std::vector<Key> work{from};
      while (!work.empty()) {
        Key k = work.back();
        work.pop_back();
        auto it = edges.find(k);
        if (it == edges.end()) continue;
        for (const Key& nxt : it->second)
          if (seen.insert(nxt).second) work.push_back(nxt);
      }
      seen.erase(from);
      closure_[from] = std::move(seen);
    }
  }

  bool subsumes(const syntax::Role& sub, const syntax::Role& sup) const {
    if (sub == sup) return true;
    auto it = closure_.find(key(sub));
    return it != closure_.end() && it->second.count(key(sup)) > 0;
  }

  // all S with r <= S, including r itself
  std::vector<syntax::Role> supers(const syntax::Role& r) const {
    std::vector<syntax::Role> out{r};
    auto it = closure_.find(key(r));
    if (it != closure_.end())
      for (const Key& k : it->second) out.push_back(syntax::Role{k.first, k.second});
    return out;
  }

  const std::set<std::string>& role_names() const { return roles_; }

 private:
  using Key = std::pair<std::string, bool>;
  static Key key(const syntax::Role& r) { return {r.name, r.inverted}; }
  std::map<Key, std::set<Key>> closure_;
  std::set<std::string> roles_;
};

// ------------------------------------------------------------ EL completion

namespace detail_el {

// Rule indexes over interned concept names; id 0 is Top.
struct Rules {
  std::vector<std::string> names{"Top"};
  std::map<std::string, int> ids;
  std::vector<std::vector<int>> atomic;                          // A -> B*
  std::vector<std::vector<std::pair<int, int>>> pairs;           // A -> (A2,B)*
  std::vector<std::vector<std::pair<std::string, int>>> ex_rhs;  // A -> (r,B)*
  std::map<std::string, std::vector<std::pair<int, int>>> ex_lhs;  // r -> (A,B)*

  int intern(const std::string& n) {
    auto it = ids.find(n);
    if (it != ids.end()) return it->second;
    int i = static_cast<int>(names.size());
    names.push_back(n);
    ids.emplace(n, i);
    return i;
  }
  int of(const syntax::ConceptPtr& c) {
    return c->ctor == syntax::Ctor::Top ? 0 : intern(c->name);
  }
  void fit() {
    atomic.resize(names.size());
    pairs.resize(names.size());
    ex_rhs.resize(names.size());
  }
};

inline Rules compile(const syntax::TBox& normalized,
                     const std::set<std::string>& seeds) {
  Rules r;
  for (const auto& s : seeds) r.intern(s);
  struct Row { int kind; int a, b, c; std::string role; };
  std::vector<Row> rows;
  for (const auto& ax : normalized.axioms) {
    const auto& l = ax.lhs;
    const auto& rr = ax.rhs;
    if (rr->ctor == syntax::Ctor::Top) continue;  // tautology
    if (l->ctor == syntax::Ctor::And) {
      rows.push_back({1, r.of(l->kids[0]), r.of(l->kids[1]), r.of(rr), ""});
    } else if (l->ctor == syntax::Ctor::Exists) {
      rows.push_back({3, r.of(l->kids[0]), r.of(rr), 0, l->role.name});
    } else if (rr->ctor == syntax::Ctor::Exists) {
      rows.push_back({2, r.of(l), r.of(rr->kids[0]), 0, rr->role.name});
    } else {
      rows.push_back({0, r.of(l), r.of(rr), 0, ""});
    }
  }
  r.fit();
  for (const auto& row : rows) {
    switch (row.kind) {
      case 0: r.atomic[row.a].push_back(row.b); break;
      case 1:
        r.pairs[row.a].emplace_back(row.b, row.c);
        if (row.a != row.b) r.pairs[row.b].emplace_back(row.a, row.c);
        break;
      case 2: r.ex_rhs[row.a].emplace_back(row.role, row.b); break;
      case 3: r.ex_lhs[row.role].emplace_back(row.a, row.b); break;
    }
  }
  return r;
}

}  // namespace detail_el

// Saturated completion structure for an EL TBox, optionally over an ABox.
// Elements 0..N-1 are the canonical name elements (one per interned name,
// element 0 standing for Top); N.. are ABox individuals.
class ELCore {
 public:
  ELCore(const syntax::TBox& t, const std::set<std::string>& seed_concepts,
         const syntax::ABox* abox, std::size_t budget = kDefaultBudget)
      : budget_(budget) {
    syntax::NormalizedEL norm = syntax::normalize_el(t);
    rules_ = detail_el::compile(norm.tbox, seed_concepts);
    if (abox)
      for (const auto& [c, a] : abox->concept_assertions) rules_.intern(c);
    rules_.fit();
    n_names_ = static_cast<int>(rules_.names.size());
    int total = n_names_;
    if (abox) {
      for (const auto& ind : abox->individuals()) {
        ind_elem_.emplace(ind, total);
        individuals_.push_back(ind);
        ++total;
      }
    }
    s_.resize(total);
    // seed via add_name so axioms with a Top lhs fire at every element
    for (int e = 0; e < total; ++e) add_name(e, 0);
    for (int i = 1; i < n_names_; ++i) add_name(i, i);
    if (abox) {
      for (const auto& [c, a] : abox->concept_assertions)
        add_name(ind_elem_.at(a), rules_.ids.at(c));
      for (const auto& [r, a, b] : abox->role_assertions)
        add_edge(r, ind_elem_.at(a), ind_elem_.at(b));
    }
    run();
  }

  int n_name_elems() const { return n_names_; }
  const std::vector<std::string>& names() const { return rules_.names; }
  const std::vector<std::string>& individuals() const { return individuals_; }

  int elem_of_name(const std::string& n) const {
    auto it = rules_.ids.find(n);
    return it == rules_.ids.end() ? -1 : it->second;
  }
  int elem_of_ind(const std::string& a) const {
    auto it = ind_elem_.find(a);
    return it == ind_elem_.end() ? -1 : it->second;
  }

  const std::set<int>& S(int elem) const { return s_[elem]; }
  bool has(int elem, int name_id) const { return s_[elem].count(name_id) > 0; }

  const std::map<std::string, std::set<std::pair<int, int>>>& R() const {
    return r_;
  }

 private:
  void bump() {
    if (++used_ > budget_)
      throw ResourceError("consequence budget exceeded (" +
                          std::to_string(budget_) + ")");
  }

  std::vector<int>& out_adj(const std::string& role, int e) {
    auto& v = out_[role];
    if (v.empty()) v.resize(s_.size());
    return v[e];
  }
  std::vector<int>& in_adj(const std::string& role, int e) {
    auto& v = in_[role];
    if (v.empty()) v.resize(s_.size());
    return v[e];
  }

  void add_name(int e, int n) {
    if (!s_[e].insert(n).second) return;
    bump();
    pending_names_.emplace(e, n);
  }

  void add_edge(const std::string& role, int x, int y) {
    if (!r_[role].emplace(x, y).second) return;
    bump();
    out_adj(role, x).push_back(y);
    in_adj(role, y).push_back(x);
    pending_edges_.emplace_back(role, x, y);
  }

  void run() {
    while (!pending_names_.empty() || !pending_edges_.empty()) {
      if (!pending_names_.empty()) {
        auto [e, n] = pending_names_.front();
        pending_names_.pop();
        for (int b : rules_.atomic[n]) add_name(e, b);
        for (auto [m, b] : rules_.pairs[n])
          if (s_[e].count(m)) add_name(e, b);
        for (const auto& [role, b] : rules_.ex_rhs[n]) add_edge(role, e, b);
        // n arriving at e can fire backward rules at r-predecessors of e
        for (auto& [role, rows] : rules_.ex_lhs) {
          bool relevant = false;
          for (auto [a, b] : rows)
            if (a == n) { relevant = true; break; }
          if (!relevant) continue;
          for (int p : in_adj(role, e))
            for (auto [a, b] : rows)
              if (a == n) add_name(p, b);
        }
        continue;
      }
      auto [role, x, y] = pending_edges_.back();
      pending_edges_.pop_back();
      auto it = rules_.ex_lhs.find(role);
      if (it != rules_.ex_lhs.end())
        for (auto [a, b] : it->second)
          if (s_[y].count(a)) add_name(x, b);
    }
  }

  detail_el::Rules rules_;
  int n_names_ = 0;
  std::vector<std::string> individuals_;
  std::map<std::string, int> ind_elem_;
  std::vector<std::set<int>> s_;
  std::map<std::string, std::set<std::pair<int, int>>> r_;
  std::map<std::string, std::vector<std::vector<int>>> out_, in_;
  std::queue<std::pair<int, int>> pending_names_;
  std::vector<std::tuple<std::string, int, int>> pending_edges_;
  std::size_t budget_, used_ = 0;
};

struct ELCanonical {
  interp::FiniteInterpretation model;
  std::string root;
};

namespace detail_el {

inline std::string fresh_outside(const syntax::Signature& sig,
                                 std::string base) {
  while (sig.has_concept(base) || sig.has_role(base)) base += "_";
  return base;
}

// Canonical model over the name elements of a completion; element ids are
// the names themselves, labels keep only `visible` concept names.
inline interp::FiniteInterpretation name_part_model(
    const ELCore& core, const std::set<std::string>& visible) {
  interp::FiniteInterpretation I;
  const auto& names = core.names();
  for (int e = 0; e < core.n_name_elems(); ++e) I.add_elem(names[e]);
  for (int e = 0; e < core.n_name_elems(); ++e)
    for (int n : core.S(e))
      if (visible.count(names[n])) I.set_concept(names[n], names[e]);
  for (const auto& [role, pairs] : core.R())
    for (auto [x, y] : pairs) I.add_edge(role, names[x], names[y]);
  return I;
}

}  // namespace detail_el

inline void require_el(const syntax::TBox& t, const char* who) {
  syntax::FragmentReport rep = syntax::validate_fragment(t, syntax::FragmentTag::EL);
  if (!rep.ok)
    throw UnsupportedFragment(std::string(who) + ": input is not EL (axiom " +
                              std::to_string(rep.offending[0].first) + ": " +
                              rep.offending[0].second + ")");
}

// Canonical model of the TBox itself: one element per concept name (plus
// Top), with x_A satisfying exactly the concepts subsuming A.
inline interp::FiniteInterpretation el_canonical_tbox(
    const syntax::TBox& t, const std::set<std::string>& extra_names = {},
    std::size_t budget = kDefaultBudget) {
  require_el(t, "el_canonical_tbox");
  std::set<std::string> seeds = extra_names;
  syntax::Signature sg = syntax::sig(t);
  seeds.insert(sg.concepts.begin(), sg.concepts.end());
  ELCore core(t, seeds, nullptr, budget);
  return detail_el::name_part_model(core, seeds);
}

// Canonical model of a concept w.r.t. an EL TBox.
inline ELCanonical el_canonical(const syntax::TBox& t,
                                const syntax::ConceptPtr& c,
                                std::size_t budget = kDefaultBudget) {
  require_el(t, "el_canonical");
  syntax::Signature all = syntax::sig(t);
  all.merge(syntax::sig(c));
  std::string root = detail_el::fresh_outside(all, "_root");
  syntax::TBox t2 = t;
  t2.axioms.push_back(syntax::Axiom::sub(syntax::name(root), c));
  std::set<std::string> visible = all.concepts;
  // seed the root so it is interned even when its defining axiom normalizes
  // away (c = Top); it stays out of `visible`, so no label leaks
  std::set<std::string> seeds = visible;
  seeds.insert(root);
  ELCore core(t2, seeds, nullptr, budget);
  ELCanonical out;
  out.model = detail_el::name_part_model(core, visible);
  out.root = root;
  return out;
}

// T |= c <= d for EL concepts (Bot accepted as a literal on either side).
inline bool el_subsumes(const syntax::TBox& t, const syntax::ConceptPtr& c,
                        const syntax::ConceptPtr& d,
                        std::size_t budget = kDefaultBudget) {
  if (c->ctor == syntax::Ctor::Bot) return true;
  if (d->ctor == syntax::Ctor::Bot) return false;
  if (d->ctor == syntax::Ctor::Top) return true;
  ELCanonical can = el_canonical(t, c, budget);
  return interp::satisfies(can.model, can.root, d);
}

// Subsumers of every concept name in sig(t); reflexive and transitive.
inline SubsumptionMap el_classify(const syntax::TBox& t,
                                  std::size_t budget = kDefaultBudget) {
  require_el(t, "el_classify");
  std::set<std::string> cs = syntax::sig(t).concepts;
  ELCore core(t, cs, nullptr, budget);
  SubsumptionMap out;
  for (const auto& a : cs) {
    std::set<std::string>& row = out[a];
    for (int n : core.S(core.elem_of_name(a))) {
      const std::string& nm = core.names()[n];
      if (cs.count(nm)) row.insert(nm);
    }
  }
  return out;
}

// --------------------------------------------------- Horn-ALC normalization

// Normal forms: conj <= name | name <= some r name | name <= all r name |
// some r name <= name | conj <= Bot.  Names are interned ints, 0 = Top,
// head -1 = Bot.
struct HornNF {
  std::vector<std::string> names{"Top"};
  std::map<std::string, int> ids;
  struct ConjRule {
    std::vector<int> body;  // sorted; empty body = Top
    int head;               // -1 = Bot
  };
  struct RoleRule {
    int guard;  // 0 = Top
    std::string role;
    int filler;  // 0 = Top
  };
  struct LhsSome {
    std::string role;
    int filler;  // 0 = Top
    int head;
  };
  std::vector<ConjRule> conj;
  std::vector<RoleRule> some, all;
  std::vector<LhsSome> lhs_some;
  std::set<std::string> roles;

  int intern(const std::string& n) {
    auto it = ids.find(n);
    if (it != ids.end()) return it->second;
    int i = static_cast<int>(names.size());
    names.push_back(n);
    ids.emplace(n, i);
    return i;
  }
  int lookup(const std::string& n) const {
    auto it = ids.find(n);
    return it == ids.end() ? -1 : it->second;
  }
};

namespace detail_horn {

inline bool atomic(const syntax::ConceptPtr& c) {
  return c->ctor == syntax::Ctor::Name || c->ctor == syntax::Ctor::Top;
}

struct Normalizer {
  HornNF nf;
  syntax::Signature used;
  int fresh_k = 0;

  int of(const syntax::ConceptPtr& c) {
    return c->ctor == syntax::Ctor::Top ? 0 : nf.intern(c->name);
  }

  syntax::ConceptPtr fresh() {
    for (;;) {
      std::string cand = "_h" + std::to_string(++fresh_k);
      if (!used.has_concept(cand) && !used.has_role(cand)) {
        used.concepts.insert(cand);
        return syntax::name(cand);
      }
    }
  }

  void emit_conj(std::vector<int> body, int head) {
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
    if (!body.empty() && body.front() == 0 && body.size() > 1)
      body.erase(body.begin());
    if (body.size() == 1 && body[0] == head) return;  // reflexive tautology
    nf.conj.push_back({std::move(body), head});
  }

  void process(syntax::ConceptPtr lhs, syntax::ConceptPtr rhs) {
    using syntax::Ctor;
    // right side
    switch (rhs->ctor) {
      case Ctor::Top:
        return;
      case Ctor::And:
        for (const auto& k : rhs->kids) process(lhs, k);
        return;
      case Ctor::Not:
        process(syntax::conj({lhs, rhs->kids[0]}), syntax::bot());
        return;
      case Ctor::Or:
        throw UnsupportedFragment("normalize_horn: positive disjunction");
      case Ctor::Exists:
      case Ctor::Forall: {
        nf.roles.insert(rhs->role.name);
        if (!atomic(rhs->kids[0])) {
          syntax::ConceptPtr x = fresh();
          process(lhs, rhs->ctor == Ctor::Exists
                           ? syntax::exists(rhs->role, x)
                           : syntax::forall(rhs->role, x));
          process(x, rhs->kids[0]);
          return;
        }
        break;
      }
      default:
        break;
    }
    // left side; rhs is now Name/Top/Bot or Q r (Name/Top)
    left(lhs, rhs);
  }

  void left(const syntax::ConceptPtr& lhs, const syntax::ConceptPtr& rhs) {
    using syntax::Ctor;
    switch (lhs->ctor) {
      case Ctor::Bot:
        return;
      case Ctor::Or:
        for (const auto& k : lhs->kids) left(k, rhs);
        return;
      case Ctor::Not:
      case Ctor::Forall:
        throw UnsupportedFragment("normalize_horn: negative " +
                                  std::string(lhs->ctor == Ctor::Not
                                                  ? "negation"
                                                  : "value restriction"));
      case Ctor::Exists: {
        nf.roles.insert(lhs->role.name);
        if (!atomic(lhs->kids[0])) {
          syntax::ConceptPtr x = fresh();
          process(lhs->kids[0], x);
          left(syntax::exists(lhs->role, x), rhs);
          return;
        }
        if (rhs->ctor == Ctor::Name) {
          nf.lhs_some.push_back({lhs->role.name, of(lhs->kids[0]), of(rhs)});
          return;
        }
        syntax::ConceptPtr x = fresh();
        nf.lhs_some.push_back({lhs->role.name, of(lhs->kids[0]), of(x)});
        left(x, rhs);
        return;
      }
      case Ctor::And: {
        std::vector<syntax::ConceptPtr> parts = syntax::flatten_and(lhs);
        for (std::size_t i = 0; i < parts.size(); ++i) {
          if (parts[i]->ctor == Ctor::Or) {  // distribute
            for (const auto& alt : parts[i]->kids) {
              std::vector<syntax::ConceptPtr> copy = parts;
              copy[i] = alt;
              left(syntax::conj(copy), rhs);
            }
            return;
          }
        }
        std::vector<int> body;
        for (auto& p : parts) {
          if (p->ctor == Ctor::Top) continue;
          if (p->ctor == Ctor::Bot) return;
          if (p->ctor == Ctor::Not || p->ctor == Ctor::Forall)
            throw UnsupportedFragment("normalize_horn: non-Horn conjunct " +
                                      p->repr);
          if (p->ctor == Ctor::Exists) {
            nf.roles.insert(p->role.name);
            syntax::ConceptPtr inner = p->kids[0];
            if (!atomic(inner)) {
              syntax::ConceptPtr x = fresh();
              process(inner, x);
              inner = x;
            }
            syntax::ConceptPtr y = fresh();
            nf.lhs_some.push_back({p->role.name, of(inner), of(y)});
            body.push_back(of(y));
            continue;
          }
          body.push_back(of(p));
        }
        finish(std::move(body), rhs);
        return;
      }
      default:  // Name or Top
        finish(lhs->ctor == Ctor::Top ? std::vector<int>{}
                                      : std::vector<int>{of(lhs)},
               rhs);
        return;
    }
  }

  void finish(std::vector<int> body, const syntax::ConceptPtr& rhs) {
    using syntax::Ctor;
    if (rhs->ctor == Ctor::Name) {
      emit_conj(std::move(body), of(rhs));
      return;
    }
    if (rhs->ctor == Ctor::Bot) {
      emit_conj(std::move(body), -1);
      return;
    }
    // rhs = Q r filler: need a single guard name
    int guard = 0;
    if (body.size() == 1) {
      guard = body[0];
    } else if (!body.empty()) {
      syntax::ConceptPtr x = fresh();
      guard = of(x);
      emit_conj(std::move(body), guard);
    }
    HornNF::RoleRule rule{guard, rhs->role.name, of(rhs->kids[0])};
    if (rhs->ctor == Ctor::Exists) nf.some.push_back(rule);
    else if (rule.filler != 0) nf.all.push_back(rule);  // all r Top is trivial
  }
};

}  // namespace detail_horn

inline HornNF normalize_horn(const syntax::TBox& t,
                             const std::set<std::string>& extra_names = {}) {
  syntax::FragmentReport rep =
      syntax::validate_fragment(t, syntax::FragmentTag::HornALC);
  if (!rep.ok)
    throw UnsupportedFragment("normalize_horn: not Horn (axiom " +
                              std::to_string(rep.offending[0].first) + ": " +
                              rep.offending[0].second + ")");
  detail_horn::Normalizer nm;
  nm.used = syntax::sig(t);
  for (const auto& n : nm.used.concepts) nm.nf.intern(n);
  for (const auto& n : extra_names) nm.nf.intern(n);
  for (const auto& r : nm.used.roles) nm.nf.roles.insert(r);
  for (const auto& ax : t.axioms) {
    nm.process(ax.lhs, ax.rhs);
    if (ax.kind == syntax::AxKind::Equiv) nm.process(ax.rhs, ax.lhs);
  }
  return nm.nf;
}

// ----------------------------------------------------- Horn-ALC saturation

// Chase-style fixpoint over ABox individuals with a witness table; witnesses
// are keyed by their creation base and deduplicated by saturated type at the
// end.  Inconsistency shows up as Bot reaching an individual.
class HornSaturation {
 public:
  struct Node {
    std::set<int> type{0};
    bool bot = false;
  };
  struct GenEdge {
    int from_ind = -1;  // index into individuals(), or
    int from_wit = -1;  // index into witnesses()
    std::string role;
    int to_wit = -1;
  };

  HornSaturation(const syntax::TBox& t, const syntax::ABox& a,
                 std::size_t witness_cap = kDefaultWitnessCap,
                 std::size_t budget = kDefaultBudget)
      : budget_(budget), cap_(witness_cap) {
    std::set<std::string> extra;
    for (const auto& [c, i] : a.concept_assertions) extra.insert(c);
    nf_ = normalize_horn(t, extra);
    for (const auto& ind : a.individuals()) {
      ind_index_.emplace(ind, static_cast<int>(individuals_.size()));
      individuals_.push_back(ind);
      inds_.emplace_back();
    }
    for (const auto& [c, i] : a.concept_assertions)
      add(inds_[ind_index_.at(i)], nf_.ids.at(c));
    for (const auto& [r, x, y] : a.role_assertions)
      edges_.emplace_back(r, ind_index_.at(x), ind_index_.at(y));
    fixpoint();
    finalize();
  }

  bool consistent() const {
    for (const auto& n : inds_)
      if (n.bot) return false;
    return true;
  }

  const HornNF& nf() const { return nf_; }
  const std::vector<std::string>& individuals() const { return individuals_; }
  const Node& ind_node(const std::string& name) const {
    return inds_[ind_index_.at(name)];
  }
  const std::vector<Node>& witnesses() const { return final_wits_; }
  const std::vector<GenEdge>& gen_edges() const { return final_gens_; }

 private:
  bool add(Node& n, int name) {
    if (name == -1) {
      if (n.bot) return false;
      n.bot = true;
      return true;
    }
    if (!n.type.insert(name).second) return false;
    if (++used_ > budget_)
      throw ResourceError("consequence budget exceeded (" +
                          std::to_string(budget_) + ")");
    return true;
  }

  bool close(Node& n) {
    bool any = false, again = true;
    while (again) {
      again = false;
      for (const auto& rule : nf_.conj) {
        bool fire = true;
        for (int b : rule.body)
          if (!n.type.count(b)) {
            fire = false;
            break;
          }
        if (fire && add(n, rule.head)) any = again = true;
      }
    }
    return any;
  }

  // base type of the witness required by `some` rule applied at node type
  std::vector<int> child_base(const Node& n, const HornNF::RoleRule& rule) const {
    std::set<int> base{0, rule.filler};
    for (const auto& ar : nf_.all)
      if (ar.role == rule.role && n.type.count(ar.guard))
        base.insert(ar.filler);
    return std::vector<int>(base.begin(), base.end());
  }

  int witness_for(const std::vector<int>& base) {
    auto it = wit_index_.find(base);
    if (it != wit_index_.end()) return it->second;
    if (wits_.size() >= cap_)
      throw ResourceError(
          "witness cap exceeded (" + std::to_string(cap_) +
          "); raise INSEP_WITNESS_CAP to allow a larger chase");
    int id = static_cast<int>(wits_.size());
    Node n;
    n.type.insert(base.begin(), base.end());
    used_ += n.type.size();
    wits_.push_back(std::move(n));
    wit_index_.emplace(base, id);
    created_ = true;
    return id;
  }

  void fixpoint() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& n : inds_) changed |= close(n);
      for (auto& w : wits_) changed |= close(w);
      // ABox edges: forward all-rules, backward some-on-the-left rules
      for (const auto& [role, x, y] : edges_) {
        for (const auto& ar : nf_.all)
          if (ar.role == role && inds_[x].type.count(ar.guard))
            changed |= add(inds_[y], ar.filler);
        for (const auto& lr : nf_.lhs_some)
          if (lr.role == role && inds_[y].type.count(lr.filler))
            changed |= add(inds_[x], lr.head);
        if (inds_[y].bot) changed |= add(inds_[x], -1);
      }
      // generated successors; wits_ may grow (and reallocate) while we scan,
      // so nodes are re-indexed after every witness_for call
      created_ = false;
      for (auto& n : inds_) {
        for (const auto& sr : nf_.some) {
          if (!n.type.count(sr.guard)) continue;
          int w = witness_for(child_base(n, sr));
          for (const auto& lr : nf_.lhs_some)
            if (lr.role == sr.role && wits_[w].type.count(lr.filler))
              changed |= add(n, lr.head);
          if (wits_[w].bot) changed |= add(n, -1);
        }
      }
      for (std::size_t i = 0; i < wits_.size(); ++i) {
        for (const auto& sr : nf_.some) {
          if (!wits_[i].type.count(sr.guard)) continue;
          int w = witness_for(child_base(wits_[i], sr));
          for (const auto& lr : nf_.lhs_some)
            if (lr.role == sr.role && wits_[w].type.count(lr.filler))
              changed |= add(wits_[i], lr.head);
          if (wits_[w].bot) changed |= add(wits_[i], -1);
        }
      }
      changed |= created_;
    }
  }

  // GC unreachable witnesses, dedup by saturated type, derive gen edges.
  void finalize() {
    auto gens_of = [&](const Node& n) {
      std::vector<std::pair<std::string, int>> out;
      for (const auto& sr : nf_.some)
        if (n.type.count(sr.guard))
          out.emplace_back(sr.role, wit_index_.at(child_base(n, sr)));
      return out;
    };
    std::map<std::pair<std::vector<int>, bool>, int> by_type;
    std::map<int, int> remap;
    std::vector<int> work;
    auto final_id = [&](int old) {
      auto it = remap.find(old);
      if (it != remap.end()) return it->second;
      std::vector<int> key(wits_[old].type.begin(), wits_[old].type.end());
      auto [slot, fresh] =
          by_type.try_emplace({key, wits_[old].bot}, static_cast<int>(final_wits_.size()));
      if (fresh) {
        final_wits_.push_back(wits_[old]);
        work.push_back(old);
      }
      remap.emplace(old, slot->second);
      return slot->second;
    };
    for (std::size_t i = 0; i < inds_.size(); ++i)
      for (const auto& [role, w] : gens_of(inds_[i])) {
        GenEdge g;
        g.from_ind = static_cast<int>(i);
        g.role = role;
        g.to_wit = final_id(w);
        final_gens_.push_back(std::move(g));
      }
    std::set<int> expanded;
    while (!work.empty()) {
      int old = work.back();
      work.pop_back();
      int self = remap.at(old);
      if (!expanded.insert(self).second) continue;
      for (const auto& [role, w] : gens_of(wits_[old])) {
        GenEdge g;
        g.from_wit = self;
        g.role = role;
        g.to_wit = final_id(w);
        final_gens_.push_back(std::move(g));
      }
    }
  }

  HornNF nf_;
  std::vector<std::string> individuals_;
  std::map<std::string, int> ind_index_;
  std::vector<Node> inds_, wits_;
  std::vector<std::tuple<std::string, int, int>> edges_;
  std::map<std::vector<int>, int> wit_index_;
  std::vector<Node> final_wits_;
  std::vector<GenEdge> final_gens_;
  std::size_t budget_, used_ = 0, cap_;
  bool created_ = false;
};

// ------------------------------------------------------------ DL-Lite core

struct Basic {
  enum Kind { Top, Bot, Name, Some } kind = Top;
  std::string name;
  syntax::Role role;

  static Basic top() { return {}; }
  static Basic bottom() { Basic b; b.kind = Bot; return b; }
  static Basic concept_name(std::string n) {
    Basic b;
    b.kind = Name;
    b.name = std::move(n);
    return b;
  }
  static Basic some(syntax::Role r) {
    Basic b;
    b.kind = Some;
    b.role = std::move(r);
    return b;
  }

  std::string key() const {
    switch (kind) {
      case Top: return "T";
      case Bot: return "F";
      case Name: return "N:" + name;
      case Some: return "E:" + role.name + (role.inverted ? "-" : "+");
    }
    return "?";
  }
  friend bool operator<(const Basic& a, const Basic& b) {
    return a.key() < b.key();
  }
  friend bool operator==(const Basic& a, const Basic& b) {
    return a.key() == b.key();
  }
};

inline std::optional<Basic> basic_of(const syntax::ConceptPtr& c) {
  switch (c->ctor) {
    case syntax::Ctor::Top: return Basic::top();
    case syntax::Ctor::Bot: return Basic::bottom();
    case syntax::Ctor::Name: return Basic::concept_name(c->name);
    case syntax::Ctor::Exists:
      if (c->kids[0]->ctor == syntax::Ctor::Top) return Basic::some(c->role);
      return std::nullopt;
    default: return std::nullopt;
  }
}

class DLLiteEngine {
 public:
  explicit DLLiteEngine(const syntax::TBox& t) : hier_(t) {
    syntax::FragmentReport rep =
        syntax::validate_fragment(t, syntax::FragmentTag::DLLiteCoreH);
    if (!rep.ok)
      throw UnsupportedFragment("DL-Lite engine: axiom " +
                                std::to_string(rep.offending[0].first) + ": " +
                                rep.offending[0].second);
    for (const auto& ax : t.axioms) {
      if (ax.kind != syntax::AxKind::Sub) continue;
      if (ax.rhs->ctor == syntax::Ctor::Bot &&
          ax.lhs->ctor == syntax::Ctor::And) {
        auto b1 = basic_of(ax.lhs->kids[0]), b2 = basic_of(ax.lhs->kids[1]);
        disjoint_.emplace(std::min(*b1, *b2), std::max(*b1, *b2));
        continue;
      }
      auto l = basic_of(ax.lhs), r = basic_of(ax.rhs);
      implies_[*l].insert(*r);
    }
    for (const auto& r : syntax::sig(t).roles) roles_.insert(r);
    compute_bad();
  }

  const RoleHierarchy& hierarchy() const { return hier_; }
  const std::set<std::string>& roles() const { return roles_; }

  std::set<Basic> closure(const std::set<Basic>& start) const {
    std::set<Basic> out = start;
    out.insert(Basic::top());
    std::vector<Basic> work(out.begin(), out.end());
    while (!work.empty()) {
      Basic b = work.back();
      work.pop_back();
      auto expand = [&](const Basic& nxt) {
        if (out.insert(nxt).second) work.push_back(nxt);
      };
      if (b.kind == Basic::Some)
        for (const auto& s : hier_.supers(b.role)) expand(Basic::some(s));
      auto it = implies_.find(b);
      if (it != implies_.end())
        for (const auto& nxt : it->second) expand(nxt);
    }
    return out;
  }

  bool clash(const std::set<Basic>& closed) const {
    if (closed.count(Basic::bottom())) return true;
    for (const auto& [b1, b2] : disjoint_)
      if (closed.count(b1) && closed.count(b2)) return true;
    return false;
  }

  std::set<Basic> witness_type(const syntax::Role& r) const {
    return closure({Basic::some(r.inverse())});
  }

  bool bad_role(const syntax::Role& r) const {
    return bad_.count({r.name, r.inverted}) > 0;
  }

  std::vector<syntax::Role> role_atoms() const {
    std::vector<syntax::Role> out;
    for (const auto& r : roles_) {
      out.emplace_back(r, false);
      out.emplace_back(r, true);
    }
    return out;
  }

 private:
  void compute_bad() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& r : role_atoms()) {
        std::pair<std::string, bool> k{r.name, r.inverted};
        if (bad_.count(k)) continue;
        std::set<Basic> wt = witness_type(r);
        bool isbad = clash(wt);
        if (!isbad) {
          for (const auto& b : wt) {
            if (b.kind != Basic::Some) continue;
            if (hier_.subsumes(r.inverse(), b.role)) continue;  // via parent
            if (bad_.count({b.role.name, b.role.inverted})) {
              isbad = true;
              break;
            }
          }
        }
        if (isbad) {
          bad_.insert(k);
          changed = true;
        }
      }
    }
  }

  RoleHierarchy hier_;
  std::map<Basic, std::set<Basic>> implies_;
  std::set<std::pair<Basic, Basic>> disjoint_;
  std::set<std::pair<std::string, bool>> bad_;
  std::set<std::string> roles_;
};

// Closed basic-concept type of one ABox individual.
inline std::set<Basic> dllite_ind_type(const DLLiteEngine& eng,
                                       const syntax::ABox& a,
                                       const std::string& ind) {
  std::set<Basic> base;
  for (const auto& [c, i] : a.concept_assertions)
    if (i == ind) base.insert(Basic::concept_name(c));
  for (const auto& [r, x, y] : a.role_assertions) {
    if (x == ind) base.insert(Basic::some(syntax::Role{r, false}));
    if (y == ind) base.insert(Basic::some(syntax::Role{r, true}));
  }
  return eng.closure(base);
}

// A required some(R) of `ind` is discharged when an asserted edge provides R.
inline bool dllite_discharged(const DLLiteEngine& eng, const syntax::ABox& a,
                              const std::string& ind, const syntax::Role& req) {
  for (const auto& [r, x, y] : a.role_assertions) {
    if (x == ind && eng.hierarchy().subsumes(syntax::Role{r, false}, req))
      return true;
    if (y == ind && eng.hierarchy().subsumes(syntax::Role{r, true}, req))
      return true;
  }
  return false;
}

// --------------------------------------------------------------- consistency

inline bool kb_consistent(const syntax::KB& kb,
                          std::size_t witness_cap = kDefaultWitnessCap,
                          std::size_t budget = kDefaultBudget) {
  syntax::FragmentTag tag =
      kb.tbox.fragment ? *kb.tbox.fragment : syntax::detect_fragment(kb.tbox);
  switch (tag) {
    case syntax::FragmentTag::EL:
    case syntax::FragmentTag::AcyclicEL:
      return true;
    case syntax::FragmentTag::DLLiteCore:
    case syntax::FragmentTag::DLLiteCoreH: {
      DLLiteEngine eng(kb.tbox);
      for (const auto& ind : kb.abox.individuals()) {
        std::set<Basic> type = dllite_ind_type(eng, kb.abox, ind);
        if (eng.clash(type)) return false;
        for (const auto& b : type) {
          if (b.kind != Basic::Some) continue;
          if (dllite_discharged(eng, kb.abox, ind, b.role)) continue;
          if (eng.bad_role(b.role)) return false;
        }
      }
      return true;
    }
    case syntax::FragmentTag::HornALC:
      return HornSaturation(kb.tbox, kb.abox, witness_cap, budget).consistent();
    default:
      throw UnsupportedFragment(
          "kb_consistent: fragment " + syntax::fragment_name(tag) +
          " is not supported (expected EL, DL-Lite, or Horn)");
  }
}

}  // namespace insep::reasoner
