// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface of the T-OBDD pipeline: compile a QF_LRA formula to
// a theory-canonical BDD, count its theory-consistent assignments, decide
// equivalence of two formulas, classify sat/unsat/valid, or emit DOT.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tobdd/tobdd.hpp"

namespace {

struct CommonFlags {
  std::string mode = "direct";
  std::string order;
  std::string out_path;
  bool stats = false;
  bool verbose = false;
  std::uint64_t max_assignments = std::uint64_t{1} << 20;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tobdd::error("cannot open input file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

tobdd::CompileOptions make_options(const CommonFlags& flags,
                                   const tobdd::SmtScript& script) {
  tobdd::CompileOptions opts;
  opts.mode = flags.mode == "eq-elim" ? tobdd::Mode::EqElim : tobdd::Mode::Direct;
  opts.max_assignments = flags.max_assignments;
  if (flags.verbose) opts.trace = &std::cerr;
  for (const std::string& item : split_commas(flags.order))
    opts.order.push_back(tobdd::parse_atom_text(item, script.sorts));
  return opts;
}

nlohmann::ordered_json stats_json(const tobdd::CompileInfo& info) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["status"] = info.status == tobdd::SatStatus::Sat ? "sat" : "unsat";
  j["mode"] = info.mode == tobdd::Mode::EqElim ? "eq-elim" : "direct";
  j["alpha_atoms"] = info.alpha_count;
  j["beta_atoms"] = info.beta_count;
  j["lemmas"] = info.enum_stats.lemmas_emitted;
  j["defining_lemmas"] = info.enum_stats.defining_lemmas;
  j["assignments_explored"] = info.enum_stats.assignments_explored;
  j["theory_checks"] = info.enum_stats.theory_checks;
  j["consistent_assignments"] = info.enum_stats.consistent_assignments;
  j["bdd_nodes"] = info.node_count;
  j["model_count"] = tobdd::to_string(info.model_count);
  return j;
}

void write_output(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tobdd::error("cannot open output file: " + path);
  out << text;
}

void report_timing(const CommonFlags& flags, const tobdd::CompileInfo& info) {
  // Timing goes to stderr so stdout stays byte-identical across runs.
  if (flags.verbose)
    std::cerr << "wall_time_ms " << info.wall_ms << "\n";
}

int run_compile(const std::string& input, const CommonFlags& flags, bool dot_only) {
  tobdd::SmtScript script = tobdd::parse_script(read_file(input));
  tobdd::CompileOptions opts = make_options(flags, script);
  tobdd::CompileInfo info;
  tobdd::TDD t = tobdd::compile(script.formula, opts, info);
  report_timing(flags, info);
  if (dot_only) {
    if (flags.out_path.empty())
      std::cout << t.to_dot();
    else
      write_output(flags.out_path, t.to_dot());
    if (flags.stats) std::cerr << stats_json(info).dump() << "\n";
    return 0;
  }
  std::cout << stats_json(info).dump() << "\n";
  if (!flags.out_path.empty()) write_output(flags.out_path, t.to_dot());
  return 0;
}

int run_count(const std::string& input, const CommonFlags& flags) {
  tobdd::SmtScript script = tobdd::parse_script(read_file(input));
  tobdd::CompileOptions opts = make_options(flags, script);
  tobdd::CompileInfo info;
  tobdd::TDD t = tobdd::compile(script.formula, opts, info);
  report_timing(flags, info);
  std::cout << tobdd::to_string(tobdd::count_models(t)) << "\n";
  if (flags.stats) std::cerr << stats_json(info).dump() << "\n";
  return 0;
}

int run_equiv(const std::string& a_path, const std::string& b_path,
              const CommonFlags& flags) {
  tobdd::SmtScript a = tobdd::parse_script(read_file(a_path));
  tobdd::SmtScript b = tobdd::parse_script(read_file(b_path));
  // Order overrides are parsed against the union of both declaration sets.
  tobdd::SmtScript merged = a;
  for (const auto& [name, sort] : b.sorts) {
    auto it = merged.sorts.find(name);
    if (it != merged.sorts.end() && it->second != sort)
      throw tobdd::error("symbol '" + name + "' declared with different sorts");
    merged.sorts.emplace(name, sort);
  }
  tobdd::CompileOptions opts = make_options(flags, merged);
  bool equal = tobdd::equiv_check(a.formula, b.formula, opts);
  std::cout << (equal ? "equivalent" : "not-equivalent") << "\n";
  return equal ? 0 : 1;
}

int run_check(const std::string& input, const CommonFlags& flags) {
  tobdd::SmtScript script = tobdd::parse_script(read_file(input));
  tobdd::CompileOptions opts = make_options(flags, script);
  tobdd::EnumerateOptions eopts;
  eopts.max_assignments = opts.max_assignments;
  if (tobdd::check_sat(script.formula, eopts) == tobdd::SatStatus::Unsat) {
    std::cout << "unsat" << "\n";
    return 0;
  }
  std::cout << (tobdd::validity_check(script.formula, opts) ? "valid" : "sat") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Theory-canonical OBDD compiler for QF_LRA"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string input_a;
  std::string input_b;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--mode", flags.mode, "Lemma enumeration mode")
        ->check(CLI::IsMember({"direct", "eq-elim"}))
        ->capture_default_str();
    cmd->add_option("--order", flags.order,
                    "Comma-separated atom terms fixing the variable order");
    cmd->add_option("--max-assignments", flags.max_assignments,
                    "Cap on enumerated assignments")
        ->capture_default_str();
    cmd->add_flag("--stats", flags.stats, "Emit the JSON stats record to stderr");
    cmd->add_flag("--verbose", flags.verbose, "Trace theory conflicts to stderr");
  };

  CLI::App* compile_cmd =
      app.add_subcommand("compile", "Compile to a T-OBDD; prints JSON stats");
  compile_cmd->add_option("input", input_a, "SMT-LIB input file")->required();
  compile_cmd->add_option("--out", flags.out_path, "Write DOT to this path");
  add_common(compile_cmd);

  CLI::App* count_cmd =
      app.add_subcommand("count", "Print the number of T-consistent assignments");
  count_cmd->add_option("input", input_a, "SMT-LIB input file")->required();
  add_common(count_cmd);

  CLI::App* equiv_cmd =
      app.add_subcommand("equiv", "Decide T-equivalence of two formulas");
  equiv_cmd->add_option("first", input_a, "SMT-LIB input file")->required();
  equiv_cmd->add_option("second", input_b, "SMT-LIB input file")->required();
  add_common(equiv_cmd);

  CLI::App* check_cmd =
      app.add_subcommand("check", "Classify the formula as sat, unsat, or valid");
  check_cmd->add_option("input", input_a, "SMT-LIB input file")->required();
  add_common(check_cmd);

  CLI::App* dot_cmd = app.add_subcommand("dot", "Print the compiled diagram as DOT");
  dot_cmd->add_option("input", input_a, "SMT-LIB input file")->required();
  dot_cmd->add_option("--out", flags.out_path, "Write DOT to this path");
  add_common(dot_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (compile_cmd->parsed()) return run_compile(input_a, flags, false);
    if (count_cmd->parsed()) return run_count(input_a, flags);
    if (equiv_cmd->parsed()) return run_equiv(input_a, input_b, flags);
    if (check_cmd->parsed()) return run_check(input_a, flags);
    if (dot_cmd->parsed()) return run_compile(input_a, flags, true);
  } catch (const tobdd::resource_limit_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
