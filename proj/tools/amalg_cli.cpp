// Command-line front end: construction runs, duels, gadget inspection, and
// verification, with JSON artifacts on stdout or in a run directory.
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amalg/adversary.hpp"
#include "amalg/amalgam.hpp"
#include "amalg/builder.hpp"
#include "amalg/closure.hpp"
#include "amalg/extension.hpp"
#include "amalg/gadgets.hpp"
#include "amalg/mu.hpp"
#include "amalg/oracle.hpp"
#include "amalg/structure.hpp"

namespace {

std::vector<amalg::Vertex> parse_vertex_list(const std::string& text) {
  std::vector<amalg::Vertex> out;
  std::stringstream is(text);
  std::string item;
  while (std::getline(is, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

std::vector<int> parse_script_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--script", "cannot open " + path);
  std::vector<int> cols;
  int c;
  while (f >> c) cols.push_back(c);
  return cols;
}

amalg::MuSnapshot snapshot_for(int n, const std::string& snap_file,
                               const std::string& seed_cols) {
  if (!snap_file.empty()) return amalg::snapshot_from_json_file(snap_file);
  std::vector<int> cols;
  for (amalg::Vertex v : parse_vertex_list(seed_cols)) cols.push_back(v);
  if (cols.empty()) cols = {0};
  return amalg::MuSnapshot::seeded(n, cols);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-structure amalgamation toolkit"};
  app.require_subcommand(1);

  // ---- build
  auto* build = app.add_subcommand("build", "Run the staged construction");
  int b_n = 1;
  std::uint64_t b_seed = 0;
  long long b_stages = 10;
  std::string b_script, b_out, b_candidate;
  bool b_adversary = false;
  int b_audit = 1;
  build->add_option("--n", b_n, "language parameter (>= 1)");
  build->add_option("--seed", b_seed, "determinism seed");
  build->add_option("--stages", b_stages, "stage budget");
  build->add_option("--script", b_script, "enumeration script file (one column per line)");
  build->add_flag("--adversary", b_adversary,
                  "derive the enumeration order from a duel against --candidate");
  build->add_option("--candidate", b_candidate, "candidate fact file for --adversary");
  build->add_option("--out", b_out, "run directory");
  build->add_option("--audit", b_audit, "audit level 0..2");

  // ---- duel
  auto* duel = app.add_subcommand("duel", "Run enumeration strategies against a candidate");
  std::string d_candidate, d_tuple = "0,1";
  int d_n = 1, d_index = 0;
  long long d_stages = 100;
  duel->add_option("--candidate", d_candidate, "fact file (V/E/STAGE lines)")->required();
  duel->add_option("--tuple", d_tuple, "comma-separated candidate tuple");
  duel->add_option("--index", d_index, "strategy index");
  duel->add_option("--n", d_n, "language parameter");
  duel->add_option("--stages", d_stages, "stage budget");

  // ---- gadget
  auto* gadget = app.add_subcommand("gadget", "Print a catalog structure as JSON");
  std::string g_kind;
  int g_k = 2, g_t = 4, g_n = 1;
  long long g_i = 0;
  gadget->add_option("kind", g_kind, "D | Dhat | P | H | L | omega")->required();
  gadget->add_option("--k", g_k, "base path length");
  gadget->add_option("--t", g_t, "cycle parameter");
  gadget->add_option("--i", g_i, "omega index");
  gadget->add_option("--n", g_n, "language parameter");

  // ---- check-class
  auto* check = app.add_subcommand("check-class", "Class membership with certificate");
  std::string c_in, c_snap, c_cols = "0";
  int c_n = 1, c_cap = 0;
  check->add_option("--in", c_in, "structure JSON file")->required();
  check->add_option("--snap", c_snap, "snapshot JSON file");
  check->add_option("--seed-cols", c_cols, "columns for a seeded snapshot");
  check->add_option("--n", c_n, "language parameter");
  check->add_option("--ext-cap", c_cap, "msa extension size cap (0 = full)");

  // ---- closure / gvalue / dim
  auto* closure = app.add_subcommand("closure", "Self-sufficient closure of a set");
  auto* gvalue = app.add_subcommand("gvalue", "g value of a set");
  auto* dimc = app.add_subcommand("dim", "dimension of a set");
  std::string s_in, s_set;
  for (auto* sub : {closure, gvalue, dimc}) {
    sub->add_option("--in", s_in, "structure JSON file")->required();
    sub->add_option("--set", s_set, "comma-separated vertex list")->required();
  }

  // ---- flat
  auto* flat = app.add_subcommand("flat", "Flatness defect of a family of closed sets");
  std::string f_in, f_sets;
  flat->add_option("--in", f_in, "structure JSON file")->required();
  flat->add_option("--sets", f_sets, "semicolon-separated vertex lists")->required();

  // ---- verify
  auto* verify = app.add_subcommand("verify", "Run an exhaustive oracle check");
  std::string v_lemma, v_params;
  verify->add_option("--lemma", v_lemma, "check id (see --list)");
  bool v_list = false;
  verify->add_flag("--list", v_list, "list known check ids");
  verify->add_option("--params", v_params, "comma-separated k=v pairs");

  // ---- export
  auto* exp = app.add_subcommand("export", "Convert a structure JSON file to DOT");
  std::string e_in;
  exp->add_option("--in", e_in, "structure JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (*build) {
      amalg::BuilderConfig cfg;
      cfg.n = b_n;
      cfg.seed = b_seed;
      cfg.stages = b_stages;
      cfg.audit_level = b_audit;
      cfg.out_dir = b_out;
      if (b_adversary) {
        if (b_candidate.empty()) {
          std::cerr << "--adversary requires --candidate\n";
          return 2;
        }
        amalg::CandidateStream cand = amalg::candidate_from_file(
            b_candidate, 0, parse_vertex_list(d_tuple));
        amalg::DuelTranscript tr = amalg::run_duel({cand}, b_n, b_stages);
        for (const auto& [col, codes] : tr.final_snap.columns)
          for (size_t r = 0; r < codes.size(); ++r) cfg.script.push_back(col);
      } else if (!b_script.empty()) {
        cfg.script = parse_script_file(b_script);
      } else {
        cfg.script = {0, 0};  // minimal default: one live column
      }
      amalg::StageState st = amalg::run_build(cfg);
      std::cout << amalg::stage_to_json_string(st) << "\n";
      return 0;
    }
    if (*duel) {
      amalg::CandidateStream cand =
          amalg::candidate_from_file(d_candidate, d_index, parse_vertex_list(d_tuple));
      amalg::DuelTranscript tr = amalg::run_duel({cand}, d_n, d_stages);
      for (const std::string& line : tr.lines) std::cout << line << "\n";
      return 0;
    }
    if (*gadget) {
      if (g_kind == "omega") {
        amalg::ExtensionTemplate t = amalg::omega(g_i, g_n);
        std::cout << amalg::to_json_string(t.pattern, true) << "\n";
        return 0;
      }
      amalg::Gadget g;
      if (g_kind == "D") g = amalg::build_D(g_k, g_t, g_n);
      else if (g_kind == "Dhat") g = amalg::build_D_hat(g_k, g_t, g_n);
      else if (g_kind == "P") g = amalg::build_path(amalg::PathKind::P, g_k, g_n);
      else if (g_kind == "H") g = amalg::build_path(amalg::PathKind::H, g_k, g_n);
      else if (g_kind == "L") g = amalg::build_path(amalg::PathKind::L, g_k, g_n);
      else {
        std::cerr << "unknown gadget kind: " << g_kind << "\n";
        return 2;
      }
      std::cout << amalg::to_json_string(g.structure, true) << "\n";
      return 0;
    }
    if (*check) {
      amalg::FinStructure s = amalg::structure_from_json_file(c_in);
      amalg::MuSnapshot snap = snapshot_for(c_n, c_snap, c_cols);
      amalg::InClassOptions opts;
      opts.ext_size_cap = c_cap;
      amalg::ClassVerdict v = amalg::in_class(s, snap, opts);
      std::cout << amalg::verdict_to_json_string(v, true) << "\n";
      return v.accepted ? 0 : 1;
    }
    if (*closure || *gvalue || *dimc) {
      amalg::FinStructure s = amalg::structure_from_json_file(s_in);
      std::vector<amalg::Vertex> a = parse_vertex_list(s_set);
      if (*closure) {
        amalg::ClosureReport rep = amalg::ss_closure(s, a);
        std::cout << "{\"closure\": [";
        for (size_t i = 0; i < rep.closure.size(); ++i)
          std::cout << (i ? "," : "") << rep.closure[i];
        std::cout << "], \"dim\": " << rep.delta_value << "}\n";
      } else if (*gvalue) {
        amalg::GValue g = amalg::g_value(s, a);
        if (g.finite)
          std::cout << "{\"finite\": true, \"value\": " << g.value << "}\n";
        else
          std::cout << "{\"finite\": false}\n";
      } else {
        std::cout << "{\"dim\": " << amalg::dim(s, a) << "}\n";
      }
      return 0;
    }
    if (*flat) {
      amalg::FinStructure s = amalg::structure_from_json_file(f_in);
      std::vector<std::vector<amalg::Vertex>> sets;
      std::stringstream is(f_sets);
      std::string part;
      while (std::getline(is, part, ';'))
        if (!part.empty()) sets.push_back(parse_vertex_list(part));
      long long defect = amalg::flatness_defect(s, sets);
      std::cout << "{\"defect\": " << defect << "}\n";
      return defect <= 0 ? 0 : 1;
    }
    if (*verify) {
      if (v_list) {
        for (const std::string& id : amalg::oracle::known_lemmas()) std::cout << id << "\n";
        return 0;
      }
      if (v_lemma.empty()) {
        std::cerr << "verify needs --lemma or --list\n";
        return 2;
      }
      std::map<std::string, long long> params;
      std::stringstream is(v_params);
      std::string pair;
      while (std::getline(is, pair, ',')) {
        auto eq = pair.find('=');
        if (eq == std::string::npos) continue;
        params[pair.substr(0, eq)] = std::stoll(pair.substr(eq + 1));
      }
      amalg::oracle::LemmaReport rep = amalg::oracle::verify_lemma(v_lemma, params);
      std::cout << amalg::oracle::report_to_json_string(rep) << "\n";
      return rep.pass ? 0 : 1;
    }
    if (*exp) {
      amalg::FinStructure s = amalg::structure_from_json_file(e_in);
      std::cout << amalg::to_dot(s) << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
