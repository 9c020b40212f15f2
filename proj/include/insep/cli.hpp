// Command-line front end: argument parsing, JSON reports, and the golden
// corpus runner.  Kept in a header so the test suite can drive dispatch()
// without spawning processes.
#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "insep/chase.hpp"
#include "insep/eldiff.hpp"
#include "insep/interp.hpp"
#include "insep/qgames.hpp"
#include "insep/reasoner.hpp"
#include "insep/safety.hpp"
#include "insep/syntax.hpp"

namespace insep::cli {

// exit codes: verdicts live in the JSON, never here
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFragment = 2;
inline constexpr int kExitResource = 3;
inline constexpr int kExitCorpusMismatch = 4;

struct RunConfig {
  std::size_t witness_cap = reasoner::kDefaultWitnessCap;
  std::size_t example_cap = 1;
  std::size_t parallelism = 1;
  bool text = false;
};

namespace detail {

using nlohmann::json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline syntax::Document load_document(const std::string& path) {
  return syntax::parse_document(read_file(path));
}

// --sigma takes a file name or the inline "concept:A,B;role:r" form
inline syntax::Signature load_signature(const std::string& arg) {
  if (std::filesystem::exists(arg)) return syntax::parse_signature(read_file(arg));
  return syntax::parse_signature(arg);
}

inline std::string axiom_sexpr(const syntax::Axiom& ax) {
  switch (ax.kind) {
    case syntax::AxKind::Sub:
      return "(sub " + ax.lhs->repr + " " + ax.rhs->repr + ")";
    case syntax::AxKind::Equiv:
      return "(equiv " + ax.lhs->repr + " " + ax.rhs->repr + ")";
    case syntax::AxKind::RSub:
      return "(rsub " + ax.r1.str() + " " + ax.r2.str() + ")";
  }
  return "";
}

inline std::string fragment_of(const syntax::TBox& t) {
  return syntax::fragment_name(syntax::detect_fragment(t));
}

inline json game_report_json(const qgames::GameReport& r) {
  json j;
  j["entailed"] = r.entailed;
  j["triage"] = r.triage;
  j["variant"] = qgames::variant_name(r.variant);
  j["rooted"] = r.rooted;
  j["states"] = r.states_explored;
  j["rounds"] = r.fixpoint_rounds;
  j["separatingQuery"] =
      r.separating_query ? json(chase::to_sexpr(*r.separating_query)) : json();
  j["trace"] = r.trace;
  return j;
}

inline void emit(const json& j, const std::vector<std::string>& text_lines,
                 const RunConfig& cfg, std::ostream& out) {
  if (cfg.text) {
    for (const auto& l : text_lines) out << l << "\n";
  } else {
    out << j.dump(2) << "\n";
  }
}

inline std::string yesno(bool b) { return b ? "yes" : "no"; }

// ------------------------------------------------------------- commands

inline int cmd_parse(const std::string& doc_path, const RunConfig& cfg,
                     std::ostream& out) {
  syntax::Document d = load_document(doc_path);
  json j;
  j["command"] = "parse";
  j["fragment"] = fragment_of(d.tbox);
  j["axioms"] = d.tbox.axioms.size();
  j["assertions"] = {{"concept", d.abox.concept_assertions.size()},
                     {"role", d.abox.role_assertions.size()}};
  emit(j,
       {"fragment: " + fragment_of(d.tbox),
        "axioms: " + std::to_string(d.tbox.axioms.size())},
       cfg, out);
  return kExitOk;
}

inline int cmd_diff(const std::string& t1p, const std::string& t2p,
                    const std::string& sigp, bool lhs_only,
                    const RunConfig& cfg, std::ostream& out) {
  syntax::TBox t1 = load_document(t1p).tbox;
  syntax::TBox t2 = load_document(t2p).tbox;
  syntax::Signature sigma = load_signature(sigp);
  eldiff::DiffReport rep =
      eldiff::el_diff(t1, t2, sigma, cfg.example_cap, lhs_only);
  json j;
  j["command"] = "diff";
  j["fragment"] = {{"t1", fragment_of(t1)}, {"t2", fragment_of(t2)}};
  j["variant"] = rep.lhs_only ? "lhs-only" : "two-sided";
  j["inseparable"] = rep.inseparable;
  j["lhsWitnesses"] = rep.lhs_witnesses;
  j["rhsWitnesses"] = rep.rhs_witnesses;
  j["truncated"] = rep.truncated;
  json ex = json::array();
  for (const auto& e : rep.examples)
    ex.push_back({{"axiom", axiom_sexpr(e.axiom)}, {"side", e.side}});
  j["examples"] = ex;
  std::vector<std::string> lines{"inseparable: " + yesno(rep.inseparable)};
  for (const auto& e : rep.examples)
    lines.push_back(e.side + " example: " + axiom_sexpr(e.axiom));
  emit(j, lines, cfg, out);
  return kExitOk;
}

inline int cmd_safety(const std::string& tp, const std::string& sigp,
                      const RunConfig& cfg, std::ostream& out) {
  syntax::TBox t = load_document(tp).tbox;
  syntax::Signature sigma = load_signature(sigp);
  safety::SafetyReport rep = safety::model_insep_empty(t, sigma);
  json j;
  j["command"] = "safety";
  j["fragment"] = fragment_of(t);
  j["variant"] = "model-inseparability-empty";
  j["safe"] = rep.safe;
  j["directWitnesses"] = rep.direct_witnesses;
  json ind = json::array();
  for (const auto& [name, by] : rep.indirect_witnesses)
    ind.push_back({{"name", name}, {"inducedBy", by}});
  j["indirectWitnesses"] = ind;
  j["countermodel"] =
      rep.countermodel ? json(interp::to_sexpr(*rep.countermodel)) : json();
  emit(j, {"safe: " + yesno(rep.safe)}, cfg, out);
  return kExitOk;
}

inline int cmd_locality(const std::string& tp, const std::string& sigp,
                        const std::string& kind, const RunConfig& cfg,
                        std::ostream& out) {
  syntax::TBox t = load_document(tp).tbox;
  syntax::Signature sigma = load_signature(sigp);
  bool local = false;
  if (kind == "semantic-empty") local = safety::semantic_empty_locality(t, sigma);
  else if (kind == "syntactic-bot") local = safety::syntactic_bot_locality(t, sigma);
  else if (kind == "syntactic-top") local = safety::syntactic_top_locality(t, sigma);
  else throw CLI::ValidationError("--kind", "unknown locality kind: " + kind);
  json j;
  j["command"] = "locality";
  j["fragment"] = fragment_of(t);
  j["kind"] = kind;
  j["local"] = local;
  emit(j, {"local: " + yesno(local)}, cfg, out);
  return kExitOk;
}

inline int cmd_module(const std::string& tp, const std::string& sigp,
                      const std::string& kind, const RunConfig& cfg,
                      std::ostream& out) {
  syntax::TBox t = load_document(tp).tbox;
  syntax::Signature sigma = load_signature(sigp);
  safety::ModuleKind mk;
  if (kind == "bot-syntactic") mk = safety::ModuleKind::BotSyntactic;
  else if (kind == "empty-semantic") mk = safety::ModuleKind::EmptySemantic;
  else throw CLI::ValidationError("--kind", "unknown module kind: " + kind);
  safety::ModuleResult res = safety::extract_module(t, sigma, mk);
  json j;
  j["command"] = "module";
  j["fragment"] = fragment_of(t);
  j["kind"] = kind;
  j["indices"] = res.indices;
  j["rounds"] = res.rounds;
  j["iterations"] = res.iterations;
  json axs = json::array();
  for (const auto& ax : res.module.axioms) axs.push_back(axiom_sexpr(ax));
  j["axioms"] = axs;
  emit(j,
       {"module size: " + std::to_string(res.indices.size()) + " of " +
        std::to_string(t.axioms.size())},
       cfg, out);
  return kExitOk;
}

inline int cmd_chase(const std::string& tp, const std::string& ap, int depth,
                     const std::string& query_path, const std::string& tuple,
                     const RunConfig& cfg, std::ostream& out) {
  syntax::Document td = load_document(tp);
  syntax::Document ad = load_document(ap);
  syntax::KB kb{td.tbox, ad.abox};
  json j;
  j["command"] = "chase";
  j["fragment"] = fragment_of(kb.tbox);
  chase::GeneratingStructure g;
  try {
    g = chase::build_generating_structure(kb, cfg.witness_cap);
  } catch (const chase::InconsistentKB&) {
    j["consistent"] = false;
    emit(j, {"consistent: no"}, cfg, out);
    return kExitOk;
  }
  j["consistent"] = true;
  j["elements"] = g.base.size();
  j["individuals"] = g.abox_elements.size();
  j["gens"] = g.gens.size();
  std::string dump = interp::to_sexpr(g.base);
  for (const auto& gen : g.gens)
    dump += "(gen " + gen.from + " " + gen.role.str() + " " + gen.to + ")\n";
  j["structure"] = dump;
  if (depth >= 0) {
    chase::CanonicalPrefix pre = chase::unravel(g, depth);
    j["prefixDepth"] = depth;
    j["prefix"] = interp::to_sexpr(pre.interpretation);
  }
  if (!query_path.empty()) {
    chase::ConjunctiveQuery q = chase::parse_query(read_file(query_path));
    std::vector<std::string> tup;
    std::istringstream ts(tuple);
    for (std::string part; std::getline(ts, part, ',');)
      if (!part.empty()) tup.push_back(part);
    // --tuple binds the first k declared variables, in declaration order;
    // the rest stay existential
    std::set<int> consts;
    for (const auto& [name, e] : q.pattern.individuals) consts.insert(e);
    for (std::size_t e = 0; e < q.pattern.elems.size(); ++e)
      if (!consts.count(static_cast<int>(e)) &&
          q.answer_vars.size() < tup.size())
        q.answer_vars.push_back(q.pattern.elems[e]);
    chase::CertainAnswer ca = chase::certain_answer(kb, q, tup, cfg.witness_cap);
    j["query"] = chase::to_sexpr(q);
    j["tuple"] = tup;
    j["certain"] = ca.certain;
  }
  std::vector<std::string> lines{dump};
  if (j.contains("certain"))
    lines.push_back("certain: " + yesno(j["certain"].get<bool>()));
  emit(j, lines, cfg, out);
  return kExitOk;
}

inline int cmd_sim(const std::string& i1p, const std::string& i2p,
                   const std::string& sigp, const std::string& kind,
                   const std::string& d1, const std::string& d2, bool anchored,
                   const RunConfig& cfg, std::ostream& out) {
  interp::FiniteInterpretation i1 =
      interp::interpretation_from_sexpr(read_file(i1p));
  interp::FiniteInterpretation i2 =
      interp::interpretation_from_sexpr(read_file(i2p));
  syntax::Signature sigma = load_signature(sigp);
  json j;
  j["command"] = "sim";
  j["kind"] = kind;
  std::vector<std::string> lines;
  if (kind == "hom") {
    interp::HomResult h = interp::check_homomorphism(i1, i2, sigma, anchored);
    j["anchored"] = anchored;
    j["holds"] = h.exists;
    j["mapping"] = h.exists ? json(h.mapping) : json();
    lines.push_back(h.exists ? "homomorphism found" : "none");
  } else if (kind == "sim" || kind == "bisim") {
    bool bisim = kind == "bisim";
    if (!d1.empty() != !d2.empty())
      throw CLI::ValidationError("--d1/--d2", "give both points or neither");
    interp::RelationResult r =
        d1.empty()
            ? [&] {
                interp::RelationResult g;
                interp::SimTable t(i1, i2, sigma, bisim);
                for (auto [x, y] : t.alive_pairs())
                  g.witness.emplace_back(i1.elems[x], i2.elems[y]);
                g.holds = !g.witness.empty();
                return g;
              }()
            : (bisim ? interp::check_bisimulation(i1, d1, i2, d2, sigma)
                     : interp::check_simulation(i1, d1, i2, d2, sigma));
    j["holds"] = d1.empty() ? json() : json(r.holds);
    json pairs = json::array();
    for (const auto& [x, y] : r.witness) pairs.push_back({x, y});
    j["pairs"] = pairs;
    lines.push_back(r.witness.empty() ? "none"
                                      : std::to_string(r.witness.size()) +
                                            " pairs in the greatest relation");
  } else {
    throw CLI::ValidationError("--kind", "unknown relation kind: " + kind);
  }
  emit(j, lines, cfg, out);
  return kExitOk;
}

inline int cmd_kb_entail(const std::string& t1p, const std::string& a1p,
                         const std::string& t2p, const std::string& a2p,
                         const std::string& sigp, bool rooted, bool insep,
                         const RunConfig& cfg, std::ostream& out) {
  syntax::KB k1{load_document(t1p).tbox, load_document(a1p).abox};
  syntax::KB k2{load_document(t2p).tbox, load_document(a2p).abox};
  syntax::Signature sigma = load_signature(sigp);
  json j;
  j["fragment"] = {{"t1", fragment_of(k1.tbox)}, {"t2", fragment_of(k2.tbox)}};
  if (insep) {
    qgames::InsepReport rep = qgames::kb_cq_inseparable(
        k1, k2, sigma, rooted, qgames::kDefaultStateCap, cfg.witness_cap);
    j["command"] = "kb-insep";
    j["inseparable"] = rep.inseparable;
    j["k1EntailsK2"] = game_report_json(rep.k1_entails_k2);
    j["k2EntailsK1"] = game_report_json(rep.k2_entails_k1);
    emit(j, {"inseparable: " + yesno(rep.inseparable)}, cfg, out);
  } else {
    qgames::GameReport rep = qgames::kb_cq_entails(
        k1, k2, sigma, rooted, qgames::kDefaultStateCap, cfg.witness_cap);
    j.update(game_report_json(rep));
    j["command"] = "kb-entail";
    emit(j, {"entailed: " + yesno(rep.entailed)}, cfg, out);
  }
  return kExitOk;
}

inline int cmd_tbox_entail_dllite(const std::string& t1p, const std::string& t2p,
                                  const std::string& s1p, const std::string& s2p,
                                  const RunConfig& cfg, std::ostream& out) {
  syntax::TBox t1 = load_document(t1p).tbox;
  syntax::TBox t2 = load_document(t2p).tbox;
  syntax::Signature s1 = load_signature(s1p);
  syntax::Signature s2 = load_signature(s2p);
  qgames::TBoxEntailReport rep = qgames::tbox_cq_entails_dllite(
      t1, t2, s1, s2, qgames::kDefaultStateCap, cfg.witness_cap);
  json j;
  j["command"] = "tbox-entail-dllite";
  j["fragment"] = {{"t1", fragment_of(t1)}, {"t2", fragment_of(t2)}};
  j["entailed"] = rep.entailed;
  j["checks"] = rep.checks;
  json fa;
  if (rep.failing_abox) {
    const syntax::ABox& ab = *rep.failing_abox;
    std::string s;
    for (const auto& [c, i] : ab.concept_assertions)
      s += "(ca " + c + " " + i + ")";
    for (const auto& [r, a, b] : ab.role_assertions)
      s += "(ra " + r + " " + a + " " + b + ")";
    fa = s;
  }
  j["failingAbox"] = fa;
  j["separatingQuery"] =
      rep.separating_query ? json(chase::to_sexpr(*rep.separating_query)) : json();
  j["trace"] = rep.trace;
  emit(j, {"entailed: " + yesno(rep.entailed)}, cfg, out);
  return kExitOk;
}

// --------------------------------------------------------- corpus runner

// expected must be contained in actual: objects key-wise, arrays exactly
inline bool json_subset(const json& expect, const json& actual,
                        std::string& why, std::string path) {
  if (expect.is_object()) {
    if (!actual.is_object()) {
      why = path + ": expected an object";
      return false;
    }
    for (const auto& [k, v] : expect.items()) {
      if (!actual.contains(k)) {
        why = path + "." + k + ": missing";
        return false;
      }
      if (!json_subset(v, actual.at(k), why, path + "." + k)) return false;
    }
    return true;
  }
  if (expect.is_array()) {
    if (!actual.is_array() || actual.size() != expect.size()) {
      why = path + ": array size differs";
      return false;
    }
    for (std::size_t i = 0; i < expect.size(); ++i)
      if (!json_subset(expect[i], actual[i], why,
                       path + "[" + std::to_string(i) + "]"))
        return false;
    return true;
  }
  if (expect != actual) {
    why = path + ": expected " + expect.dump() + ", got " + actual.dump();
    return false;
  }
  return true;
}

inline int dispatch_vec(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err);

inline std::string run_case(const std::filesystem::path& dir) {
  json spec;
  try {
    spec = json::parse(read_file((dir / "case.json").string()));
  } catch (const std::exception& e) {
    return "FAIL " + dir.filename().string() + ": " + e.what();
  }
  std::string id = spec.value("id", dir.filename().string());
  if (!spec.contains("argv") || !spec["argv"].is_array())
    return "FAIL " + id + ": case.json lacks an argv array";
  std::vector<std::string> argv;
  for (const auto& a : spec["argv"]) {
    std::string s = a.get<std::string>();
    if (std::filesystem::exists(dir / s)) s = (dir / s).string();
    argv.push_back(std::move(s));
  }
  if (!argv.empty() && argv[0] == "corpus")
    return "FAIL " + id + ": corpus cases may not nest";
  std::ostringstream cout_s, cerr_s;
  int rc;
  try {
    rc = dispatch_vec(argv, cout_s, cerr_s);
  } catch (const std::exception& e) {
    return "FAIL " + id + ": uncaught: " + std::string(e.what());
  }
  int want_rc = spec.value("expect_exit", 0);
  if (rc != want_rc)
    return "FAIL " + id + ": exit " + std::to_string(rc) + ", expected " +
           std::to_string(want_rc) +
           (cerr_s.str().empty() ? "" : " (" + cerr_s.str() + ")");
  if (spec.contains("expect")) {
    json actual;
    try {
      actual = json::parse(cout_s.str());
    } catch (const std::exception&) {
      return "FAIL " + id + ": output is not JSON";
    }
    std::string why;
    if (!json_subset(spec["expect"], actual, why, "$"))
      return "FAIL " + id + ": " + why;
  }
  return "PASS " + id;
}

inline int cmd_corpus(const std::string& dir_arg, const RunConfig& cfg,
                      std::ostream& out, std::ostream& err) {
  std::filesystem::path root(dir_arg);
  if (!std::filesystem::is_directory(root)) {
    err << "corpus: not a directory: " << dir_arg << "\n";
    return kExitUsage;
  }
  std::vector<std::filesystem::path> cases;
  for (const auto& e : std::filesystem::directory_iterator(root))
    if (e.is_directory() &&
        std::filesystem::exists(e.path() / "case.json"))
      cases.push_back(e.path());
  std::sort(cases.begin(), cases.end());
  std::vector<std::string> results(cases.size());
  std::size_t workers = std::max<std::size_t>(1, cfg.parallelism);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++)
      results[i] = run_case(cases[i]);
  };
  if (workers <= 1 || cases.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, cases.size()); ++w)
      pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::size_t failed = 0;
  for (const auto& r : results) {
    out << r << "\n";
    if (r.rfind("PASS", 0) != 0) ++failed;
  }
  out << results.size() - failed << " passed, " << failed << " failed\n";
  return failed == 0 ? kExitOk : kExitCorpusMismatch;
}

}  // namespace detail

// --------------------------------------------------------------- dispatch

inline int dispatch(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"inseparability toolkit for description-logic ontologies",
               "insep"};
  app.require_subcommand(1);
  app.fallthrough();  // lets the global flags appear after the subcommand

  RunConfig cfg;
  if (const char* env = std::getenv("INSEP_WITNESS_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) cfg.witness_cap = v;
  }
  app.add_option("--witness-cap", cfg.witness_cap, "chase witness cap")
      ->check(CLI::PositiveNumber);
  app.add_option("--examples", cfg.example_cap, "max diff examples per witness");
  app.add_option("--parallel", cfg.parallelism, "corpus runner threads")
      ->check(CLI::PositiveNumber);
  app.add_flag("--text", cfg.text, "plain-text output instead of JSON");

  std::string doc, t1, t2, a1, a2, sig, sig2, kind, i1, i2, d1, d2, query,
      tuple, corpus_dir;
  bool lhs_only = false, rooted = false, anchored = false;
  int depth = -1;

  CLI::App* parse = app.add_subcommand("parse", "parse a document");
  parse->add_option("--doc", doc)->required();

  CLI::App* diff = app.add_subcommand("diff", "EL concept diff");
  diff->add_option("--t1", t1)->required();
  diff->add_option("--t2", t2)->required();
  diff->add_option("--sigma", sig)->required();
  diff->add_flag("--lhs-only", lhs_only);

  CLI::App* safety_c = app.add_subcommand("safety", "signature safety");
  safety_c->add_option("--tbox", t1)->required();
  safety_c->add_option("--sigma", sig)->required();

  CLI::App* locality = app.add_subcommand("locality", "locality check");
  locality->add_option("--tbox", t1)->required();
  locality->add_option("--sigma", sig)->required();
  locality->add_option("--kind", kind)->required();

  CLI::App* module = app.add_subcommand("module", "module extraction");
  module->add_option("--tbox", t1)->required();
  module->add_option("--sigma", sig)->required();
  module->add_option("--kind", kind)->required();

  CLI::App* chase_c = app.add_subcommand("chase", "generating structure");
  chase_c->add_option("--tbox", t1)->required();
  chase_c->add_option("--abox", a1)->required();
  chase_c->add_option("--depth", depth);
  chase_c->add_option("--query", query);
  chase_c->add_option("--tuple", tuple);

  CLI::App* sim = app.add_subcommand("sim", "relational checks");
  sim->add_option("--i1", i1)->required();
  sim->add_option("--i2", i2)->required();
  sim->add_option("--sigma", sig)->required();
  sim->add_option("--kind", kind)->required();
  sim->add_option("--d1", d1);
  sim->add_option("--d2", d2);
  sim->add_flag("--anchored", anchored);

  CLI::App* kb_entail = app.add_subcommand("kb-entail", "KB CQ entailment");
  kb_entail->add_option("--t1", t1)->required();
  kb_entail->add_option("--a1", a1)->required();
  kb_entail->add_option("--t2", t2)->required();
  kb_entail->add_option("--a2", a2)->required();
  kb_entail->add_option("--sigma", sig)->required();
  kb_entail->add_flag("--rooted", rooted);

  CLI::App* kb_insep = app.add_subcommand("kb-insep", "KB CQ inseparability");
  kb_insep->add_option("--t1", t1)->required();
  kb_insep->add_option("--a1", a1)->required();
  kb_insep->add_option("--t2", t2)->required();
  kb_insep->add_option("--a2", a2)->required();
  kb_insep->add_option("--sigma", sig)->required();
  kb_insep->add_flag("--rooted", rooted);

  CLI::App* tbox_ent =
      app.add_subcommand("tbox-entail-dllite", "DL-Lite TBox CQ entailment");
  tbox_ent->add_option("--t1", t1)->required();
  tbox_ent->add_option("--t2", t2)->required();
  tbox_ent->add_option("--sigma1", sig)->required();
  tbox_ent->add_option("--sigma2", sig2)->required();

  CLI::App* corpus = app.add_subcommand("corpus", "golden corpus runner");
  CLI::App* corpus_run = corpus->add_subcommand("run", "run all cases");
  corpus_run->add_option("dir", corpus_dir)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (parse->parsed()) return detail::cmd_parse(doc, cfg, out);
    if (diff->parsed()) return detail::cmd_diff(t1, t2, sig, lhs_only, cfg, out);
    if (safety_c->parsed()) return detail::cmd_safety(t1, sig, cfg, out);
    if (locality->parsed()) return detail::cmd_locality(t1, sig, kind, cfg, out);
    if (module->parsed()) return detail::cmd_module(t1, sig, kind, cfg, out);
    if (chase_c->parsed())
      return detail::cmd_chase(t1, a1, depth, query, tuple, cfg, out);
    if (sim->parsed())
      return detail::cmd_sim(i1, i2, sig, kind, d1, d2, anchored, cfg, out);
    if (kb_entail->parsed())
      return detail::cmd_kb_entail(t1, a1, t2, a2, sig, rooted, false, cfg, out);
    if (kb_insep->parsed())
      return detail::cmd_kb_entail(t1, a1, t2, a2, sig, rooted, true, cfg, out);
    if (tbox_ent->parsed())
      return detail::cmd_tbox_entail_dllite(t1, t2, sig, sig2, cfg, out);
    if (corpus->parsed()) {
      if (!corpus_run->parsed()) {
        err << "corpus: expected the 'run' subcommand\n";
        return kExitUsage;
      }
      return detail::cmd_corpus(corpus_dir, cfg, out, err);
    }
  } catch (const CLI::ValidationError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const reasoner::UnsupportedFragment& e) {
    err << e.what() << "\n";
    return kExitFragment;
  } catch (const reasoner::ResourceError& e) {
    err << e.what() << "\n";
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  err << "no subcommand given\n";
  return kExitUsage;
}

namespace detail {
inline int dispatch_vec(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err) {
  return cli::dispatch(args, out, err);
}
}  // namespace detail

inline int main_entry(int argc, char** argv, std::ostream& out,
                      std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, out, err);
}

}  // namespace insep::cli
