// CQ and rooted-CQ entailment between Horn knowledge bases, decided by a
// simulation game on their generating structures.  The challenger plays
// elements of the model to embed, the responder answers with elements of the
// target model; with inverse roles the responder must track sets of
// challenger elements that share an image, so states are (set -> position).
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "insep/chase.hpp"
#include "insep/interp.hpp"
#include "insep/reasoner.hpp"
#include "insep/syntax.hpp"

namespace insep::qgames {

inline constexpr std::size_t kDefaultStateCap = 1u << 17;
inline constexpr std::size_t kAssignWorkCap = 1u << 20;
inline constexpr int kQueryDepthCap = 24;
inline constexpr std::size_t kQueryAtomCap = 200;

enum class Variant { Forward, SetState };

inline const char* variant_name(Variant v) {
  return v == Variant::Forward ? "forward" : "set_state";
}

struct GameArena {
  chase::GeneratingStructure left;   // challenger: the model that must embed
  chase::GeneratingStructure right;  // responder: the embedding target
  syntax::Signature sigma;
  Variant variant = Variant::SetState;
  bool rooted = false;
};

namespace detail {

using Labels = std::vector<std::string>;  // sorted, unique

inline void sort_unique(Labels& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// sub subseteq sup, both sorted
inline bool covers(const Labels& sup, const Labels& sub) {
  return std::includes(sup.begin(), sup.end(), sub.begin(), sub.end());
}

// signature roles of a generating edge, split by direction: fwd holds the
// role names r with (parent, child) in r, bwd those with (child, parent) in r
struct EdgeLabels {
  Labels fwd, bwd;

  bool empty() const { return fwd.empty() && bwd.empty(); }
  bool operator==(const EdgeLabels& o) const {
    return fwd == o.fwd && bwd == o.bwd;
  }
  bool operator<(const EdgeLabels& o) const {
    return fwd != o.fwd ? fwd < o.fwd : bwd < o.bwd;
  }
};

inline EdgeLabels gen_labels(const reasoner::RoleHierarchy& hier,
                             const syntax::Role& r,
                             const syntax::Signature& sigma) {
  EdgeLabels out;
  for (const auto& s : hier.supers(r)) {
    if (!sigma.has_role(s.name)) continue;
    (s.inverted ? out.bwd : out.fwd).push_back(s.name);
  }
  sort_unique(out.fwd);
  sort_unique(out.bwd);
  return out;
}

inline std::map<std::string, Labels> sigma_labels(
    const interp::FiniteInterpretation& base, const syntax::Signature& sigma) {
  std::map<std::string, Labels> out;
  for (const auto& id : base.elems) out[id];
  for (const auto& [name, ext] : base.concept_ext) {
    if (!sigma.has_concept(name)) continue;
    for (int e : ext) out[base.elems[e]].push_back(name);
  }
  for (auto& [id, v] : out) sort_unique(v);
  return out;
}

// ------------------------------------------------------------- challenger

struct CGen {
  int target = -1;  // challenger element index
  EdgeLabels lab;
};

struct CElem {
  std::string id;
  bool individual = false;
  Labels labels;           // signature concept labels
  std::vector<CGen> gens;  // signature-relevant generating edges
};

struct Challenger {
  std::vector<CElem> elems;
  std::map<std::string, int> index;
  // closed signature edges between individuals, keyed (from, to)
  std::map<std::pair<std::string, std::string>, Labels> abox_edges;

  bool sigma_active(int e) const {
    const CElem& c = elems[e];
    if (!c.labels.empty() || !c.gens.empty()) return true;
    for (const auto& [pair, lab] : abox_edges)
      if (pair.first == c.id || pair.second == c.id) return true;
    return false;
  }
};

inline Challenger make_challenger(const chase::GeneratingStructure& g,
                                  const syntax::Signature& sigma,
                                  bool rooted) {
  Challenger out;
  std::map<std::string, Labels> labels = sigma_labels(g.base, sigma);
  for (const auto& id : g.base.elems) {
    out.index[id] = static_cast<int>(out.elems.size());
    out.elems.push_back({id, g.is_individual(id), labels[id], {}});
  }
  for (const auto& gen : g.gens) {
    EdgeLabels lab = gen_labels(g.hier, gen.role, sigma);
    // in the rooted game only forward signature roles keep an element
    // connected to the individuals, so backward-only edges are not challenged
    bool relevant = rooted ? !lab.fwd.empty() : !lab.empty();
    if (!relevant) continue;
    out.elems[out.index.at(gen.from)].gens.push_back(
        {out.index.at(gen.to), std::move(lab)});
  }
  for (const auto& [role, pairs] : g.base.role_ext) {
    if (!sigma.has_role(role)) continue;
    for (auto [x, y] : pairs)
      out.abox_edges[{g.base.elems[x], g.base.elems[y]}].push_back(role);
  }
  for (auto& [pair, lab] : out.abox_edges) sort_unique(lab);
  return out;
}

// -------------------------------------------------------------- responder

// A responder position abstracts an element of the target model: an ABox
// individual, or a witness path-end together with the signature labels of
// the edge that created it.  The class pins down which edges connect the
// element to its parent, which is what ascending responses consume.
struct RPos {
  enum Kind { Ind, Wit, Root } kind = Ind;
  std::string elem;
  EdgeLabels cls;  // Wit only: labels of the creating edge
};

struct RMove {  // descending or ABox response
  EdgeLabels lab;
  int target = -1;  // position index
};

struct Responder {
  std::vector<RPos> positions;
  std::map<std::string, int> ind_pos;
  std::map<std::string, std::vector<int>> pos_of_elem;
  std::vector<Labels> pos_labels;
  std::vector<std::vector<RMove>> moves;  // per position
  std::vector<std::vector<int>> up;       // per position: ascent destinations
};

inline Responder make_responder(const chase::GeneratingStructure& g,
                                const syntax::Signature& sigma,
                                Variant variant) {
  Responder out;
  std::map<std::string, Labels> labels = sigma_labels(g.base, sigma);

  std::vector<EdgeLabels> glab(g.gens.size());
  std::map<std::string, std::set<EdgeLabels>> classes;
  for (std::size_t i = 0; i < g.gens.size(); ++i) {
    glab[i] = gen_labels(g.hier, g.gens[i].role, sigma);
    classes[g.gens[i].to].insert(glab[i]);
  }

  std::map<std::pair<std::string, EdgeLabels>, int> wit_pos;
  auto add_pos = [&](RPos p) {
    int id = static_cast<int>(out.positions.size());
    out.pos_of_elem[p.elem].push_back(id);
    out.pos_labels.push_back(labels[p.elem]);
    out.positions.push_back(std::move(p));
    return id;
  };
  for (const auto& id : g.base.elems) {
    if (g.is_individual(id)) {
      out.ind_pos[id] = add_pos({RPos::Ind, id, {}});
    } else if (auto it = classes.find(id); it != classes.end()) {
      for (const auto& cls : it->second)
        wit_pos[{id, cls}] = add_pos({RPos::Wit, id, cls});
    } else {
      add_pos({RPos::Root, id, {}});  // no creating edge: raw arenas only
    }
  }

  out.moves.resize(out.positions.size());
  out.up.resize(out.positions.size());
  for (std::size_t p = 0; p < out.positions.size(); ++p) {
    const RPos& pos = out.positions[p];
    if (auto it = g.gens_from.find(pos.elem); it != g.gens_from.end())
      for (int gi : it->second) {
        if (glab[gi].empty()) continue;
        out.moves[p].push_back(
            {glab[gi], wit_pos.at({g.gens[gi].to, glab[gi]})});
      }
    if (pos.kind == RPos::Ind) {
      std::map<std::string, EdgeLabels> acc;
      for (const auto& [role, pairs] : g.base.role_ext) {
        if (!sigma.has_role(role)) continue;
        for (auto [x, y] : pairs) {
          if (g.base.elems[x] == pos.elem)
            acc[g.base.elems[y]].fwd.push_back(role);
          if (g.base.elems[y] == pos.elem)
            acc[g.base.elems[x]].bwd.push_back(role);
        }
      }
      for (auto& [tgt, lab] : acc) {
        sort_unique(lab.fwd);
        sort_unique(lab.bwd);
        if (!lab.empty()) out.moves[p].push_back({lab, out.ind_pos.at(tgt)});
      }
    }
    if (variant == Variant::SetState && pos.kind == RPos::Wit) {
      std::set<int> dests;
      for (std::size_t i = 0; i < g.gens.size(); ++i) {
        if (g.gens[i].to != pos.elem || !(glab[i] == pos.cls)) continue;
        const std::string& from = g.gens[i].from;
        if (g.is_individual(from)) dests.insert(out.ind_pos.at(from));
        else
          for (int q : out.pos_of_elem.at(from)) dests.insert(q);
      }
      out.up[p].assign(dests.begin(), dests.end());
    }
  }
  return out;
}

// ------------------------------------------------------------------ game

class Game {
 public:
  Game(const GameArena& arena, std::size_t state_cap)
      : chal_(make_challenger(arena.left, arena.sigma, arena.rooted)),
        resp_(make_responder(arena.right, arena.sigma, arena.variant)),
        variant_(arena.variant),
        cap_(state_cap) {}

  const Challenger& challenger() const { return chal_; }
  const Responder& responder() const { return resp_; }

  // state id, or -1 when some member's signature labels are missing at pos
  int state(std::vector<int> members, int pos) {
    sort_unique_int(members);
    for (int m : members)
      if (!covers(resp_.pos_labels[pos], chal_.elems[m].labels)) return -1;
    std::string key;
    for (int m : members) key += std::to_string(m) + ",";
    key += "|" + std::to_string(pos);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    if (nodes_.size() >= cap_)
      throw reasoner::ResourceError("game state space exceeded its cap");
    int id = static_cast<int>(nodes_.size());
    ids_.emplace(std::move(key), id);
    nodes_.push_back({std::move(members), pos, {}, false, true});
    queue_.push_back(id);
    return id;
  }

  void solve() {
    while (!queue_.empty()) {
      int id = queue_.back();
      queue_.pop_back();
      if (!nodes_[id].expanded) expand(id);
    }
    rounds_ = 0;
    for (bool change = true; change; ++rounds_) {
      change = false;
      for (auto& n : nodes_) {
        if (!n.alive) continue;
        bool ok = false;
        for (const auto& alt : n.alts) {
          bool good = true;
          for (int s : alt.need_all)
            if (!nodes_[s].alive) { good = false; break; }
          if (good && !alt.need_any.empty()) {
            good = false;
            for (int s : alt.need_any)
              if (nodes_[s].alive) { good = true; break; }
          }
          if (good) { ok = true; break; }
        }
        if (!ok) {
          n.alive = false;
          change = true;
        }
      }
    }
  }

  bool alive(int sid) const { return sid >= 0 && nodes_[sid].alive; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t rounds() const { return rounds_; }

  std::string render(int sid) const {
    const Node& n = nodes_[sid];
    Labels ms;
    for (int m : n.members) ms.push_back(chal_.elems[m].id);
    std::sort(ms.begin(), ms.end());
    std::string out = "{";
    for (std::size_t i = 0; i < ms.size(); ++i)
      out += (i ? "," : "") + ms[i];
    out += "}->" + render_pos(n.pos);
    return out;
  }

  std::vector<std::string> alive_states() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].alive) out.push_back(render(static_cast<int>(i)));
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Alt {
    std::vector<int> need_all;  // every state must survive
    std::vector<int> need_any;  // some ascent destination must survive
  };
  struct Node {
    std::vector<int> members;
    int pos;
    std::vector<Alt> alts;
    bool expanded;
    bool alive;
  };
  struct Obl {
    EdgeLabels lab;
    int target;
    bool operator<(const Obl& o) const {
      return target != o.target ? target < o.target : lab < o.lab;
    }
    bool operator==(const Obl& o) const {
      return target == o.target && lab == o.lab;
    }
  };

  static void sort_unique_int(std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  std::string render_pos(int p) const {
    const RPos& pos = resp_.positions[p];
    if (resp_.pos_of_elem.at(pos.elem).size() == 1) return pos.elem;
    std::string out = pos.elem + "#";
    for (const auto& s : pos.cls.fwd) out += "+" + s;
    for (const auto& s : pos.cls.bwd) out += "-" + s;
    return out;
  }

  void expand(int id) {
    nodes_[id].expanded = true;
    const int pos = nodes_[id].pos;
    const RPos& rp = resp_.positions[pos];

    std::vector<Obl> obls;
    for (int m : nodes_[id].members)
      for (const auto& gen : chal_.elems[m].gens)
        obls.push_back({gen.lab, gen.target});
    std::sort(obls.begin(), obls.end());
    obls.erase(std::unique(obls.begin(), obls.end()), obls.end());
    if (obls.empty()) {
      nodes_[id].alts.push_back({});
      return;
    }

    // per obligation: usable responder moves, plus whether it may ascend
    std::vector<std::vector<int>> opts(obls.size());
    std::vector<bool> can_up(obls.size(), false);
    for (std::size_t i = 0; i < obls.size(); ++i) {
      const Obl& o = obls[i];
      for (std::size_t mv = 0; mv < resp_.moves[pos].size(); ++mv) {
        const RMove& m = resp_.moves[pos][mv];
        if (covers(m.lab.fwd, o.lab.fwd) && covers(m.lab.bwd, o.lab.bwd) &&
            covers(resp_.pos_labels[m.target], chal_.elems[o.target].labels))
          opts[i].push_back(static_cast<int>(mv));
      }
      if (variant_ == Variant::SetState && rp.kind == RPos::Wit &&
          !resp_.up[pos].empty() && covers(rp.cls.bwd, o.lab.fwd) &&
          covers(rp.cls.fwd, o.lab.bwd))
        can_up[i] = true;
      if (opts[i].empty() && !can_up[i]) return;  // no assignment exists
    }

    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
    std::map<int, std::vector<int>> groups;  // move -> challenger targets
    std::vector<int> upset;
    std::size_t work = 0;

    auto leaf = [&]() {
      Alt alt;
      for (const auto& [mv, members] : groups) {
        int s = state(members, resp_.moves[pos][mv].target);
        if (s < 0) return;
        alt.need_all.push_back(s);
      }
      if (!upset.empty()) {
        for (int dest : resp_.up[pos]) {
          bool ok = true;
          for (int m : upset)
            if (!covers(resp_.pos_labels[dest], chal_.elems[m].labels)) {
              ok = false;
              break;
            }
          if (!ok) continue;
          int s = state(upset, dest);
          if (s >= 0) alt.need_any.push_back(s);
        }
        if (alt.need_any.empty()) return;
        sort_unique_int(alt.need_any);
      }
      sort_unique_int(alt.need_all);
      if (seen.insert({alt.need_all, alt.need_any}).second)
        nodes_[id].alts.push_back(std::move(alt));
    };

    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (++work > kAssignWorkCap)
        throw reasoner::ResourceError(
            "game assignment enumeration exceeded its cap");
      if (i == obls.size()) {
        leaf();
        return;
      }
      for (int mv : opts[i]) {
        groups[mv].push_back(obls[i].target);
        self(self, i + 1);
        groups[mv].pop_back();
        if (groups[mv].empty()) groups.erase(mv);
      }
      if (can_up[i]) {
        upset.push_back(obls[i].target);
        self(self, i + 1);
        upset.pop_back();
      }
    };
    rec(rec, 0);
  }

  Challenger chal_;
  Responder resp_;
  Variant variant_;
  std::size_t cap_;
  std::vector<Node> nodes_;
  std::map<std::string, int> ids_;
  std::vector<int> queue_;
  std::size_t rounds_ = 0;
};

inline bool tbox_uses_inverse(const syntax::TBox& t) {
  for (const auto& ax : t.axioms) {
    if (ax.kind == syntax::AxKind::RSub) {
      if (ax.r1.inverted || ax.r2.inverted) return true;
      continue;
    }
    if (ax.lhs && syntax::detail::uses_inverse(ax.lhs)) return true;
    if (ax.rhs && syntax::detail::uses_inverse(ax.rhs)) return true;
  }
  return false;
}

inline void require_horn_kb(const syntax::TBox& t, const char* who) {
  syntax::FragmentTag tag =
      t.fragment ? *t.fragment : syntax::detect_fragment(t);
  switch (tag) {
    case syntax::FragmentTag::EL:
    case syntax::FragmentTag::AcyclicEL:
    case syntax::FragmentTag::DLLiteCore:
    case syntax::FragmentTag::DLLiteCoreH:
    case syntax::FragmentTag::HornALC:
      return;
    default:
      throw reasoner::UnsupportedFragment(
          std::string(who) + ": TBox is outside the supported Horn fragments");
  }
}

}  // namespace detail

// ------------------------------------------------------- winning region

struct WinningRegion {
  std::vector<std::string> states;  // rendered "{u,v}->w", sorted
  std::size_t states_explored = 0;
  std::size_t fixpoint_rounds = 0;

  bool contains(const std::string& s) const {
    return std::binary_search(states.begin(), states.end(), s);
  }
};

// All label-compatible singleton states and everything reachable from them,
// solved to the greatest fixpoint.
inline WinningRegion winning_region(const GameArena& arena,
                                    std::size_t state_cap = kDefaultStateCap) {
  detail::Game game(arena, state_cap);
  for (int e = 0; e < static_cast<int>(game.challenger().elems.size()); ++e)
    for (int p = 0; p < static_cast<int>(game.responder().positions.size());
         ++p)
      game.state({e}, p);
  game.solve();
  WinningRegion out;
  out.states = game.alive_states();
  out.states_explored = game.size();
  out.fixpoint_rounds = game.rounds();
  return out;
}

// --------------------------------------------------------- KB entailment

struct GameReport {
  bool entailed = false;
  bool triage = false;  // settled by consistency checks alone
  Variant variant = Variant::SetState;
  bool rooted = false;
  std::size_t states_explored = 0;
  std::size_t fixpoint_rounds = 0;
  std::optional<chase::ConjunctiveQuery> separating_query;
  std::vector<std::string> trace;
};

namespace detail {

// depth-bounded unfolding of the challenger cone at `root` as a query
inline chase::ConjunctiveQuery cone_query(const Challenger& chal, int root,
                                          int depth, bool anchored) {
  chase::ConjunctiveQuery q;
  int vars = 0;
  auto term = [&](int elem, bool top) {
    if (top && anchored) {
      const std::string& id = chal.elems[elem].id;
      q.pattern.add_elem(id);
      q.pattern.set_individual(id, id);
      return id;
    }
    std::string id = "q" + std::to_string(vars++);
    q.pattern.add_elem(id);
    return id;
  };
  std::vector<std::pair<int, std::string>> frontier{{root, term(root, true)}};
  std::size_t atoms = 0;
  for (const auto& c : chal.elems[root].labels) {
    q.pattern.set_concept(c, frontier[0].second);
    ++atoms;
  }
  for (int d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<std::pair<int, std::string>> next;
    for (const auto& [elem, id] : frontier)
      for (const auto& gen : chal.elems[elem].gens) {
        if (atoms + gen.lab.fwd.size() + gen.lab.bwd.size() +
                chal.elems[gen.target].labels.size() >
            kQueryAtomCap)
          return q;
        std::string kid = term(gen.target, false);
        for (const auto& r : gen.lab.fwd) q.pattern.add_edge(r, id, kid);
        for (const auto& r : gen.lab.bwd) q.pattern.add_edge(r, kid, id);
        for (const auto& c : chal.elems[gen.target].labels)
          q.pattern.set_concept(c, kid);
        atoms += gen.lab.fwd.size() + gen.lab.bwd.size() +
                 chal.elems[gen.target].labels.size();
        next.push_back({gen.target, kid});
      }
    frontier = std::move(next);
  }
  return q;
}

inline bool confirm_separation(const syntax::KB& k1, const syntax::KB& k2,
                               const chase::ConjunctiveQuery& q,
                               std::size_t witness_cap, std::size_t budget) {
  chase::CertainAnswer in2 = chase::certain_answer(k2, q, {}, witness_cap, budget);
  if (!in2.certain) return false;
  chase::CertainAnswer in1 = chase::certain_answer(k1, q, {}, witness_cap, budget);
  return !in1.certain;
}

// iterative deepening over the challenger cone at `root`
inline std::optional<chase::ConjunctiveQuery> separating_cone_query(
    const syntax::KB& k1, const syntax::KB& k2, const Challenger& chal,
    int root, bool anchored, std::size_t witness_cap, std::size_t budget,
    std::vector<std::string>& trace) {
  std::size_t last_size = 0;
  for (int d = 1; d <= kQueryDepthCap; ++d) {
    chase::ConjunctiveQuery q = cone_query(chal, root, d, anchored);
    if (q.size() == 0) return std::nullopt;
    if (confirm_separation(k1, k2, q, witness_cap, budget)) {
      trace.push_back("separating query found at depth " + std::to_string(d));
      return q;
    }
    if (q.size() == last_size) break;  // cone exhausted
    last_size = q.size();
  }
  trace.push_back("no separating query within the search bounds");
  return std::nullopt;
}

}  // namespace detail

inline GameArena make_arena(const syntax::KB& k1, const syntax::KB& k2,
                            const syntax::Signature& sigma, bool rooted = false,
                            std::size_t witness_cap = reasoner::kDefaultWitnessCap,
                            std::size_t budget = reasoner::kDefaultBudget) {
  GameArena a;
  a.left = chase::build_generating_structure(k2, witness_cap, budget);
  a.right = chase::build_generating_structure(k1, witness_cap, budget);
  a.sigma = sigma;
  a.variant =
      (detail::tbox_uses_inverse(k1.tbox) || detail::tbox_uses_inverse(k2.tbox))
          ? Variant::SetState
          : Variant::Forward;
  a.rooted = rooted;
  return a;
}

// Does k1 certainly answer every signature CQ (rooted CQ if `rooted`) that
// k2 certainly answers?  On failure the report carries a confirmed
// separating query whenever one is found within the search bounds.
inline GameReport kb_cq_entails(const syntax::KB& k1, const syntax::KB& k2,
                                const syntax::Signature& sigma,
                                bool rooted = false,
                                std::size_t state_cap = kDefaultStateCap,
                                std::size_t witness_cap = reasoner::kDefaultWitnessCap,
                                std::size_t budget = reasoner::kDefaultBudget) {
  detail::require_horn_kb(k1.tbox, "kb_cq_entails");
  detail::require_horn_kb(k2.tbox, "kb_cq_entails");

  GameReport out;
  out.rooted = rooted;

  bool c1 = reasoner::kb_consistent(k1, witness_cap, budget);
  bool c2 = reasoner::kb_consistent(k2, witness_cap, budget);
  if (!c1 || !c2) {
    out.triage = true;
    if (!c2) {
      out.entailed = !c1;
      out.trace.push_back(
          c1 ? "k2 is inconsistent, k1 is consistent: not entailed"
             : "both KBs are inconsistent: entailed");
      if (!out.entailed) {
        // any signature query k1 does not certainly answer separates
        std::vector<std::string> cands;
        for (const auto& c : sigma.concepts)
          cands.push_back("(query (var x) (ca " + c + " x))");
        for (const auto& r : sigma.roles) {
          cands.push_back("(query (var x) (var y) (ra " + r + " x y))");
          cands.push_back("(query (var x) (ra " + r + " x x))");
        }
        for (const auto& text : cands) {
          chase::ConjunctiveQuery q = chase::parse_query(text);
          if (detail::confirm_separation(k1, k2, q, witness_cap, budget)) {
            out.separating_query = q;
            break;
          }
        }
        if (!out.separating_query)
          out.trace.push_back("no separating query within the search bounds");
      }
    } else {
      out.entailed = true;
      out.trace.push_back("k1 is inconsistent: entailed");
    }
    return out;
  }

  GameArena arena = make_arena(k1, k2, sigma, rooted, witness_cap, budget);
  out.variant = arena.variant;

  detail::Game game(arena, state_cap);
  const detail::Challenger& chal = game.challenger();
  const detail::Responder& resp = game.responder();

  // closed responder edges between individuals, for the static ABox check
  std::map<std::pair<std::string, std::string>, detail::Labels> redges;
  for (const auto& [role, pairs] : arena.right.base.role_ext) {
    if (!sigma.has_role(role)) continue;
    for (auto [x, y] : pairs)
      redges[{arena.right.base.elems[x], arena.right.base.elems[y]}]
          .push_back(role);
  }
  for (auto& [pair, lab] : redges) detail::sort_unique(lab);

  // failing challenger element (if any) to build the separating query from
  int fail_elem = -1;
  bool fail_anchored = true;

  for (const auto& [pair, lab] : chal.abox_edges) {
    auto it = redges.find(pair);
    std::string missing;
    for (const auto& role : lab)
      if (it == redges.end() ||
          !std::binary_search(it->second.begin(), it->second.end(), role)) {
        missing = role;
        break;
      }
    if (missing.empty()) continue;
    out.trace.push_back("abox edge (" + missing + " " + pair.first + " " +
                        pair.second + ") is not reproduced");
    chase::ConjunctiveQuery q;
    q.pattern.add_elem(pair.first);
    q.pattern.set_individual(pair.first, pair.first);
    q.pattern.add_elem(pair.second);
    q.pattern.set_individual(pair.second, pair.second);
    q.pattern.add_edge(missing, pair.first, pair.second);
    if (detail::confirm_separation(k1, k2, q, witness_cap, budget)) {
      out.separating_query = std::move(q);
      return out;
    }
    fail_elem = chal.index.at(pair.first);  // fall back to the cone search
    break;
  }

  std::vector<std::pair<int, int>> ind_seeds;  // (challenger elem, state)
  std::vector<int> witnesses;
  if (fail_elem < 0) {
    for (int e = 0; e < static_cast<int>(chal.elems.size()); ++e) {
      const detail::CElem& c = chal.elems[e];
      if (!c.individual) {
        witnesses.push_back(e);
        continue;
      }
      auto it = resp.ind_pos.find(c.id);
      if (it == resp.ind_pos.end()) {
        if (chal.sigma_active(e)) {
          out.trace.push_back("individual " + c.id +
                              " is missing on the responder side");
          fail_elem = e;
          break;
        }
        continue;
      }
      int s = game.state({e}, it->second);
      if (s < 0) {
        out.trace.push_back("labels of individual " + c.id +
                            " are not reproduced");
        fail_elem = e;
        break;
      }
      ind_seeds.push_back({e, s});
    }
  }

  std::map<int, std::vector<int>> anchors;
  if (fail_elem < 0 && !rooted)
    for (int u : witnesses)
      for (int p = 0; p < static_cast<int>(resp.positions.size()); ++p) {
        int s = game.state({u}, p);
        if (s >= 0) anchors[u].push_back(s);
      }

  if (fail_elem < 0) {
    game.solve();
    out.states_explored = game.size();
    out.fixpoint_rounds = game.rounds();

    for (const auto& [e, s] : ind_seeds)
      if (!game.alive(s)) {
        out.trace.push_back("no winning strategy from ({" +
                            chal.elems[e].id + "} -> " + chal.elems[e].id +
                            ")");
        fail_elem = e;
        break;
      }
    if (fail_elem < 0 && !rooted)
      for (int u : witnesses) {
        bool won = false;
        for (int s : anchors[u])
          if (game.alive(s)) {
            won = true;
            break;
          }
        if (!won) {
          out.trace.push_back("witness " + chal.elems[u].id +
                              " has no winning anchor");
          fail_elem = u;
          fail_anchored = false;
          break;
        }
      }
  }

  if (fail_elem < 0) {
    out.entailed = true;
    return out;
  }
  out.entailed = false;
  out.separating_query = detail::separating_cone_query(
      k1, k2, chal, fail_elem, fail_anchored, witness_cap, budget, out.trace);
  return out;
}

struct InsepReport {
  bool inseparable = false;
  GameReport k1_entails_k2;
  GameReport k2_entails_k1;
};

inline InsepReport kb_cq_inseparable(const syntax::KB& k1, const syntax::KB& k2,
                                     const syntax::Signature& sigma,
                                     bool rooted = false,
                                     std::size_t state_cap = kDefaultStateCap,
                                     std::size_t witness_cap = reasoner::kDefaultWitnessCap,
                                     std::size_t budget = reasoner::kDefaultBudget) {
  InsepReport out;
  out.k1_entails_k2 =
      kb_cq_entails(k1, k2, sigma, rooted, state_cap, witness_cap, budget);
  out.k2_entails_k1 =
      kb_cq_entails(k2, k1, sigma, rooted, state_cap, witness_cap, budget);
  out.inseparable = out.k1_entails_k2.entailed && out.k2_entails_k1.entailed;
  return out;
}

// ------------------------------------------- DL-Lite TBox CQ entailment

struct TBoxEntailReport {
  bool entailed = true;
  std::size_t checks = 0;
  std::optional<syntax::ABox> failing_abox;
  std::optional<chase::ConjunctiveQuery> separating_query;
  std::vector<std::string> trace;
};

// T1 entails T2 for sigma2-CQs over every singleton sigma1-ABox.
inline TBoxEntailReport tbox_cq_entails_dllite(
    const syntax::TBox& t1, const syntax::TBox& t2,
    const syntax::Signature& sigma1, const syntax::Signature& sigma2,
    std::size_t state_cap = kDefaultStateCap,
    std::size_t witness_cap = reasoner::kDefaultWitnessCap,
    std::size_t budget = reasoner::kDefaultBudget) {
  for (const syntax::TBox* t : {&t1, &t2})
    if (!syntax::validate_fragment(*t, syntax::FragmentTag::DLLiteCoreH).ok)
      throw reasoner::UnsupportedFragment(
          "tbox_cq_entails_dllite: both TBoxes must be DL-Lite");

  TBoxEntailReport out;
  std::vector<syntax::ABox> singletons;
  for (const auto& a : sigma1.concepts) {
    syntax::ABox ab;
    ab.concept_assertions.push_back({a, "c"});
    singletons.push_back(std::move(ab));
  }
  for (const auto& r : sigma1.roles) {
    syntax::ABox ab;
    ab.role_assertions.push_back({r, "a", "b"});
    singletons.push_back(std::move(ab));
  }
  for (const auto& ab : singletons) {
    ++out.checks;
    GameReport rep = kb_cq_entails({t1, ab}, {t2, ab}, sigma2, false,
                                   state_cap, witness_cap, budget);
    if (rep.entailed) continue;
    out.entailed = false;
    out.failing_abox = ab;
    out.separating_query = rep.separating_query;
    std::string what = ab.concept_assertions.empty()
                           ? "(" + std::get<0>(ab.role_assertions[0]) + " a b)"
                           : "(" + ab.concept_assertions[0].first + " c)";
    out.trace.push_back("failing singleton abox: " + what);
    for (const auto& line : rep.trace) out.trace.push_back(line);
    break;
  }
  return out;
}

}  // namespace insep::qgames
